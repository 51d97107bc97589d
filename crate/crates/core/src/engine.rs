//! Certificate optimizers and experiments: bicyclicity and forward-shift
//! infima, the certificate driver, the `p_ε` decay sweep, the `F_ε`
//! double-integral ratio and the regime classifier.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, PowerMode};
use crate::error::{Error, Result};
use crate::fourier::{self, check_power_of_two, eval_on_grid, FourierSeries, SpaceIndex};
use crate::geometry::ArcUnion;
use crate::linalg::{weighted_least_squares, ConvOperator};
use crate::scalar::Real;

/// Frequency support allowed for the multiplier `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    AllIntegers,
    Nonneg,
    Positive,
}

impl Support {
    fn window(self, degree: usize) -> (i64, i64) {
        let d = degree as i64;
        match self {
            Support::AllIntegers => (-d, d),
            Support::Nonneg => (0, d),
            Support::Positive => (1, d.max(1)),
        }
    }
}

/// IRLS continuation settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// `μ_0 = mu0_factor·‖r‖_∞`.
    pub mu0_factor: f64,
    pub continuation_steps: usize,
    pub inner_cap: usize,
    pub rel_tol: f64,
    /// Conjugate-gradient steps per weighted solve on the iterative path.
    pub cg_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu0_factor: 0.1,
            continuation_steps: 8,
            inner_cap: 200,
            rel_tol: 1e-10,
            cg_iterations: 60,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub stage: usize,
    pub mu: f64,
    pub iterations: usize,
    /// Unsmoothed objective `‖t − Ac‖` after the stage.
    pub objective: f64,
}

/// Result of one infimum computation.
#[derive(Clone, Debug)]
pub struct Infimum<T> {
    /// `‖target − multiplier·f‖`, recomputed from `poly`.
    pub value: T,
    /// The optimal `P` (bicyclic) or `Q` (shift).
    pub poly: FourierSeries<T>,
    pub degree: usize,
    /// False when the last continuation stage hit the inner cap.
    pub converged: bool,
    pub trace: Vec<TraceEntry>,
}

/// Minimizes `‖target − f·c‖_{A^p_β}` over `c` supported on `[lo, hi]`.
fn minimize<T: Real>(
    f: &FourierSeries<T>,
    target: &FourierSeries<T>,
    space: &SpaceIndex<T>,
    lo: i64,
    hi: i64,
    cfg: &SolverConfig,
    warm: Option<&FourierSeries<T>>,
) -> Result<(FourierSeries<T>, bool, Vec<TraceEntry>)> {
    let p = space.p();
    if !(p > T::one()) {
        return Err(Error::InvalidInput(format!("p = {p} is not supported; need p > 1")));
    }
    let (fmin, fmax) = match (f.min_frequency(), f.max_frequency()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("f must be nonzero".into())),
    };
    let kernel = f.dense(fmin, fmax);
    let cols = (hi - lo + 1) as usize;
    let mut rlo = lo + fmin;
    let mut rhi = hi + fmax;
    if let (Some(a), Some(b)) = (target.min_frequency(), target.max_frequency()) {
        rlo = rlo.min(a);
        rhi = rhi.max(b);
    }
    let rows = (rhi - rlo + 1) as usize;
    let op = ConvOperator::new(kernel, fmin, lo, cols, rlo, rows)?;
    let t = target.dense(rlo, rhi);
    let beta = space.beta();
    let weight: Vec<T> = (rlo..=rhi).map(|n| space.weight(n)).collect();
    let objective = |c: &[Complex<T>]| -> T {
        let r = op.apply(c);
        let s: T = r
            .iter()
            .zip(&t)
            .zip(&weight)
            .map(|((a, b), w)| (*b - *a).norm().powf(p) * *w)
            .sum();
        s.powf(p.recip())
    };
    let w2: Vec<T> = (rlo..=rhi)
        .map(|n| (T::one() + T::from_i64_lossy(n.abs())).powf(T::lit(2.0) * beta))
        .collect();
    let c0 = warm.map(|w| w.dense(lo, hi));
    let mut c = weighted_least_squares(&op, &w2, &t, c0.as_deref(), cfg.cg_iterations * 8)?;
    if let Some(c0) = c0 {
        if objective(&c0) < objective(&c) {
            c = c0;
        }
    }
    let mut trace = Vec::new();
    let mut converged = true;
    if p != T::lit(2.0) {
        let mut best = c.clone();
        let mut best_obj = objective(&c);
        let r0 = op.apply(&c);
        let rmax = r0.iter().zip(&t).map(|(a, b)| (*b - *a).norm()).fold(T::zero(), T::max);
        let mu0 = T::lit(cfg.mu0_factor) * rmax;
        let half_p = p * T::lit(0.5);
        let expo = half_p - T::one();
        for stage in 0..cfg.continuation_steps {
            if mu0 == T::zero() {
                break;
            }
            let mu = mu0 * T::lit(0.5f64.powi(stage as i32));
            let mu2 = mu * mu;
            let smoothed = |r: &[Complex<T>]| -> T {
                r.iter()
                    .zip(&t)
                    .zip(&weight)
                    .map(|((a, b), w)| ((*b - *a).norm_sqr() + mu2).powf(half_p) * *w)
                    .sum()
            };
            let mut r = op.apply(&c);
            let mut prev = smoothed(&r);
            let mut iterations = 0;
            let mut stage_converged = false;
            while iterations < cfg.inner_cap {
                iterations += 1;
                let omega: Vec<T> = r
                    .iter()
                    .zip(&t)
                    .zip(&weight)
                    .map(|((a, b), w)| *w * ((*b - *a).norm_sqr() + mu2).powf(expo))
                    .collect();
                c = weighted_least_squares(&op, &omega, &t, Some(&c), cfg.cg_iterations)?;
                r = op.apply(&c);
                let cur = smoothed(&r);
                let obj = objective(&c);
                if obj < best_obj {
                    best_obj = obj;
                    best.clone_from(&c);
                }
                if (prev - cur).abs() <= T::lit(cfg.rel_tol) * cur {
                    stage_converged = true;
                    break;
                }
                prev = cur;
            }
            if stage + 1 == cfg.continuation_steps {
                converged = stage_converged;
            }
            trace.push(TraceEntry {
                stage,
                mu: mu.as_f64(),
                iterations,
                objective: best_obj.as_f64(),
            });
        }
        c = best;
    } else {
        trace.push(TraceEntry {
            stage: 0,
            mu: 0.0,
            iterations: 1,
            objective: objective(&c).as_f64(),
        });
    }
    Ok((FourierSeries::from_dense(lo, &c), converged, trace))
}

/// `inf ‖1 − P f‖_{A^p_β}` over `P` supported on `support ∩ [−degree, degree]`.
pub fn bicyclicity_infimum<T: Real>(
    f: &FourierSeries<T>,
    space: &SpaceIndex<T>,
    support: Support,
    degree: usize,
) -> Result<Infimum<T>> {
    bicyclicity_infimum_with(f, space, support, degree, &SolverConfig::default(), None)
}

pub fn bicyclicity_infimum_with<T: Real>(
    f: &FourierSeries<T>,
    space: &SpaceIndex<T>,
    support: Support,
    degree: usize,
    cfg: &SolverConfig,
    warm: Option<&FourierSeries<T>>,
) -> Result<Infimum<T>> {
    let (lo, hi) = support.window(degree);
    let one = FourierSeries::one();
    let (poly, converged, trace) = minimize(f, &one, space, lo, hi, cfg, warm)?;
    let value = (&one - &poly.product(f)).norm(space);
    Ok(Infimum {
        value,
        poly,
        degree,
        converged,
        trace,
    })
}

/// `inf ‖f − zQf‖_{A^p_β}` over analytic `Q` of degree at most `degree`.
pub fn forward_shift_infimum<T: Real>(f: &FourierSeries<T>, space: &SpaceIndex<T>, degree: usize) -> Result<Infimum<T>> {
    forward_shift_infimum_with(f, space, degree, &SolverConfig::default(), None)
}

pub fn forward_shift_infimum_with<T: Real>(
    f: &FourierSeries<T>,
    space: &SpaceIndex<T>,
    degree: usize,
    cfg: &SolverConfig,
    warm: Option<&FourierSeries<T>>,
) -> Result<Infimum<T>> {
    let zwarm = warm.map(|q| FourierSeries::from_coeffs(q.iter().map(|(n, c)| (n + 1, c))));
    let (zq, converged, trace) = minimize(f, f, space, 1, degree as i64 + 1, cfg, zwarm.as_ref())?;
    let q = FourierSeries::from_coeffs(zq.iter().map(|(n, c)| (n - 1, c)));
    let value = shift_residual(f, &q).norm(space);
    Ok(Infimum {
        value,
        poly: q,
        degree,
        converged,
        trace,
    })
}

/// `f − zQf`.
pub fn shift_residual<T: Real>(f: &FourierSeries<T>, q: &FourierSeries<T>) -> FourierSeries<T> {
    let zq = FourierSeries::from_coeffs(q.iter().map(|(n, c)| (n + 1, c)));
    f - &zq.product(f)
}

/// `exp(mean log|f|)` on a `g`-point grid; lower bound for every shift
/// infimum in `A^p_β` with `p ≤ 2`, `β ≥ 0`.
pub fn szego_bound<T: Real>(f: &FourierSeries<T>, g: usize) -> Result<f64> {
    let samples = eval_on_grid(f, g)?;
    let mean = samples.iter().map(|s| s.norm().as_f64().ln()).sum::<f64>() / g as f64;
    Ok(mean.exp())
}

/// Inputs of [`certify_cyclic`].
#[derive(Clone, Debug)]
pub struct CertificateProblem<T> {
    pub f: FourierSeries<T>,
    pub space: SpaceIndex<T>,
    pub support: Support,
    pub degree_budget: usize,
    pub epsilon_target: T,
    /// `‖f_true − f‖_{A^p_β}` for a truncated target, carried into the report.
    pub truncation_tail: T,
}

impl<T: Real> CertificateProblem<T> {
    pub fn new(f: FourierSeries<T>, space: SpaceIndex<T>, degree_budget: usize, epsilon_target: T) -> Result<Self> {
        let problem = Self {
            f,
            space,
            support: Support::AllIntegers,
            degree_budget,
            epsilon_target,
            truncation_tail: T::zero(),
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_target > T::zero()) {
            return Err(Error::InvalidInput("epsilon_target must be positive".into()));
        }
        if self.f.is_zero() {
            return Err(Error::InvalidInput("f must be nonzero".into()));
        }
        if self.space.beta_q() > T::one() {
            return Err(Error::Hypothesis(format!(
                "βq = {} > 1: the space has no cyclic vectors",
                self.space.beta_q()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVerdict {
    Certified,
    BicyclicOnly,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateStep {
    pub degree: usize,
    pub bicyclic_norm: f64,
    pub shift_norm: f64,
    pub bicyclic_converged: bool,
    pub shift_converged: bool,
}

#[derive(Clone, Debug)]
pub struct CertificateReport<T> {
    pub achieved_bicyclic_norm: T,
    pub achieved_shift_norm: T,
    /// Degrees at which the best `P` and `Q` were found.
    pub degrees_used: (usize, usize),
    pub verdict: CertificateVerdict,
    pub p: FourierSeries<T>,
    pub q: FourierSeries<T>,
    pub solver_trace: Vec<CertificateStep>,
    /// Szegő lower bound on the shift norm, when it applies (`p ≤ 2`, `β ≥ 0`).
    pub szego_lower_bound: Option<f64>,
    pub truncation_tail: T,
}

impl<T: Real> CertificateReport<T> {
    /// Recomputes both norms from the stored `P` and `Q`.
    pub fn reevaluate(&self, f: &FourierSeries<T>, space: &SpaceIndex<T>) -> (T, T) {
        let bic = (&FourierSeries::one() - &self.p.product(f)).norm(space);
        let shift = shift_residual(f, &self.q).norm(space);
        (bic, shift)
    }
}

fn doubling_schedule(budget: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 1;
    while d < budget {
        out.push(d);
        d *= 2;
    }
    out.push(budget);
    out
}

pub fn certify_cyclic<T: Real>(problem: &CertificateProblem<T>) -> Result<CertificateReport<T>> {
    certify_cyclic_with(problem, &SolverConfig::default())
}

/// Degree-doubling search for `P` and `Q`; best values are carried forward,
/// so both recorded sequences are nonincreasing.
pub fn certify_cyclic_with<T: Real>(problem: &CertificateProblem<T>, cfg: &SolverConfig) -> Result<CertificateReport<T>> {
    problem.validate()?;
    let (f, space, eps) = (&problem.f, &problem.space, problem.epsilon_target);
    let mut best_b: Option<Infimum<T>> = None;
    let mut best_s: Option<Infimum<T>> = None;
    let mut steps = Vec::new();
    for degree in doubling_schedule(problem.degree_budget) {
        let done_b = best_b.as_ref().is_some_and(|b| b.value < eps);
        let done_s = best_s.as_ref().is_some_and(|s| s.value < eps);
        if done_b && done_s {
            break;
        }
        let (b, s) = rayon::join(
            || (!done_b).then(|| bicyclicity_infimum_with(f, space, problem.support, degree, cfg, best_b.as_ref().map(|b| &b.poly))),
            || (!done_s).then(|| forward_shift_infimum_with(f, space, degree, cfg, best_s.as_ref().map(|s| &s.poly))),
        );
        if let Some(b) = b {
            let b = b?;
            if best_b.as_ref().is_none_or(|x| b.value < x.value) {
                best_b = Some(b);
            }
        }
        if let Some(s) = s {
            let s = s?;
            if best_s.as_ref().is_none_or(|x| s.value < x.value) {
                best_s = Some(s);
            }
        }
        let (b, s) = (best_b.as_ref().unwrap(), best_s.as_ref().unwrap());
        steps.push(CertificateStep {
            degree,
            bicyclic_norm: b.value.as_f64(),
            shift_norm: s.value.as_f64(),
            bicyclic_converged: b.converged,
            shift_converged: s.converged,
        });
    }
    let (b, s) = (best_b.unwrap(), best_s.unwrap());
    let verdict = if b.value < eps && s.value < eps {
        CertificateVerdict::Certified
    } else if b.value < eps {
        CertificateVerdict::BicyclicOnly
    } else {
        CertificateVerdict::Failed
    };
    let szego_lower_bound = if space.p() <= T::lit(2.0) && space.beta() >= T::zero() {
        let g = (4 * (f.degree() + 1)).next_power_of_two().max(1 << 12);
        Some(szego_bound(f, g)?)
    } else {
        None
    };
    Ok(CertificateReport {
        achieved_bicyclic_norm: b.value,
        achieved_shift_norm: s.value,
        degrees_used: (b.degree, s.degree),
        verdict,
        p: b.poly,
        q: s.poly,
        solver_trace: steps,
        szego_lower_bound,
        truncation_tail: problem.truncation_tail,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVerdict {
    Decays,
    Stalls,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCell {
    pub eps: f64,
    /// `M_ε` in unnormalized arc measure, from the gap-wise quadrature.
    pub m_eps: f64,
    /// `M̄_ε = M_ε/2π` on the grid, the exponent used by `p_ε`.
    pub normalizer: f64,
    pub norm: f64,
    /// `‖p_ε f‖² / ((1 + M̄_ε) e^{−2M̄_ε})`.
    pub ratio: f64,
    pub leakage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub schedule: Vec<DecayCell>,
    pub normalized_ratios: Vec<f64>,
    pub verdict: DecayVerdict,
    /// Thresholds behind the verdict.
    pub decay_factor: f64,
    pub monotone: bool,
    pub final_over_initial: f64,
    pub ratio_spread: f64,
}

/// Grid and tolerance settings for [`p_epsilon_decay`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub grid: usize,
    /// `M_ε` quadrature nodes per panel.
    pub quadrature_size: usize,
    /// `|f| ≤ vanish_tol·max|f|` is required at grid nodes on `E`.
    pub vanish_tol: f64,
    /// Verdict `decays` needs `final < decay_factor·initial`.
    pub decay_factor: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            grid: 1 << 14,
            quadrature_size: 16,
            vanish_tol: 1e-6,
            decay_factor: 0.1,
        }
    }
}

pub fn p_epsilon_decay<T: Real>(
    f: &FourierSeries<T>,
    set: &ArcUnion<T>,
    gamma: T,
    space: &SpaceIndex<T>,
    eps_schedule: &[T],
    cfg: &DecayConfig,
) -> Result<DecayReport> {
    if eps_schedule.is_empty() {
        return Err(Error::InvalidInput("empty ε schedule".into()));
    }
    if eps_schedule.windows(2).any(|w| !(w[1] < w[0])) || !(eps_schedule[eps_schedule.len() - 1] > T::zero()) {
        return Err(Error::InvalidInput("ε schedule must be positive and strictly decreasing".into()));
    }
    let g = cfg.grid;
    check_power_of_two(g)?;
    analytic::check_resolves(set, g)?;
    let samples = eval_on_grid(f, g)?;
    let distances = set.distances_on_grid(g);
    let fmax = samples.iter().map(|s| s.norm()).fold(T::zero(), T::max);
    let worst = samples
        .iter()
        .zip(&distances)
        .filter(|(_, d)| **d == T::zero())
        .map(|(s, _)| s.norm())
        .fold(T::zero(), T::max);
    if worst > T::lit(cfg.vanish_tol) * fmax {
        return Err(Error::Hypothesis(format!(
            "f does not vanish on E: |f| = {worst} on the set, max |f| = {fmax}"
        )));
    }
    let cells: Vec<DecayCell> = eps_schedule
        .par_iter()
        .map(|&eps| -> Result<DecayCell> {
            let pe = analytic::power_outer_from_distances(distances.clone(), gamma, eps, PowerMode::PEps, None)?;
            let prod: Vec<Complex<T>> = pe.outer.boundary.iter().zip(&samples).map(|(a, b)| *a * *b).collect();
            let series = fourier::series_from_samples(&prod, g / 2 - 1)?;
            let norm = series.norm(space).as_f64();
            let m_bar = pe.normalizer.as_f64();
            let m_eps = analytic::m_epsilon(set, gamma.as_f64(), eps.as_f64(), cfg.quadrature_size)?;
            Ok(DecayCell {
                eps: eps.as_f64(),
                m_eps,
                normalizer: m_bar,
                norm,
                ratio: norm * norm / ((1.0 + m_bar) * (-2.0 * m_bar).exp()),
                leakage: pe.outer.leakage.as_f64(),
            })
        })
        .collect::<Result<_>>()?;
    let monotone = cells.windows(2).all(|w| w[1].norm < w[0].norm);
    let final_over_initial = cells[cells.len() - 1].norm / cells[0].norm;
    let normalized_ratios: Vec<f64> = cells.iter().map(|c| c.ratio).collect();
    let (lo, hi) = normalized_ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let verdict = if monotone && final_over_initial < cfg.decay_factor {
        DecayVerdict::Decays
    } else {
        DecayVerdict::Stalls
    };
    Ok(DecayReport {
        schedule: cells,
        normalized_ratios,
        verdict,
        decay_factor: cfg.decay_factor,
        monotone,
        final_over_initial,
        ratio_spread: hi / lo,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KelRatio {
    pub eps: f64,
    pub lhs: f64,
    pub m_eps: f64,
    pub ratio: f64,
}

/// `∬ d(ζ',E)^{2(δ'−γ)} |F_ε(ζ) − F_ε(ζ')|² / |ζ − ζ'|² |dζ||dζ'|` divided
/// by `M_ε`, per `ε`. The diagonal is excluded from the double sum and
/// replaced by its first-order value `h²·Σ d^{2(δ'−γ)} |F'|²`.
pub fn lemma_kel_ratio<T: Real>(
    set: &ArcUnion<T>,
    gamma: f64,
    delta_prime: f64,
    eps_schedule: &[f64],
    g: usize,
) -> Result<Vec<KelRatio>> {
    if !(delta_prime > 0.5) {
        return Err(Error::InvalidInput(format!("δ' = {delta_prime} must exceed 1/2")));
    }
    if 2.0 * delta_prime - gamma - 1.0 < 0.0 {
        return Err(Error::Hypothesis(format!(
            "2δ' − γ − 1 = {} < 0",
            2.0 * delta_prime - gamma - 1.0
        )));
    }
    check_power_of_two(g)?;
    analytic::check_resolves(set, g)?;
    let distances: Vec<f64> = set.distances_on_grid(g).into_iter().map(|d| d.as_f64()).collect();
    let weight: Vec<f64> = distances.iter().map(|&d| weight_power(d, 2.0 * (delta_prime - gamma))).collect();
    let h = std::f64::consts::TAU / g as f64;
    let chord2: Vec<f64> = (0..g).map(|k| (2.0 * (k as f64 * h / 2.0).sin()).powi(2)).collect();
    eps_schedule
        .iter()
        .map(|&eps| {
            let m_eps = analytic::m_epsilon(set, gamma, eps, 16)?;
            if !(m_eps > 0.0) {
                return Err(Error::Hypothesis(format!("M_ε = {m_eps} ≤ 0 at ε = {eps}")));
            }
            let fe = analytic::power_outer_from_distances(distances.clone(), gamma, eps, PowerMode::FEps, None)?;
            let b = &fe.outer.boundary;
            let off: f64 = (0..g)
                .into_par_iter()
                .map(|j| {
                    let wj = weight[j];
                    if wj == 0.0 {
                        return 0.0;
                    }
                    let mut s = 0.0;
                    for i in 0..g {
                        if i != j {
                            let k = if i > j { i - j } else { j - i };
                            s += (b[i] - b[j]).norm_sqr() / chord2[k];
                        }
                    }
                    wj * s
                })
                .collect::<Vec<_>>()
                .iter()
                .sum::<f64>()
                * h
                * h;
            let diag: f64 = (0..g)
                .map(|j| {
                    let d = (b[(j + 1) % g] - b[(j + g - 1) % g]) / (2.0 * h);
                    weight[j] * d.norm_sqr()
                })
                .sum::<f64>()
                * h
                * h;
            let lhs = off + diag;
            Ok(KelRatio {
                eps,
                lhs,
                m_eps,
                ratio: lhs / m_eps,
            })
        })
        .collect()
}

fn weight_power(d: f64, e: f64) -> f64 {
    if d == 0.0 {
        if e > 0.0 {
            0.0
        } else if e == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        d.powf(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "delta")]
pub enum Smoothness {
    CInfty,
    LipDelta(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    CyclicSufficient,
    NotCyclic,
    NoCyclicVectors,
    Indeterminate,
}

/// Dimension-based classification of `f` with zero set of the given
/// dimension in `A^p_β`, `1 < p ≤ 2`.
pub fn classify_regime(
    dim_estimate: f64,
    space: &SpaceIndex<f64>,
    smoothness: Smoothness,
    log_nonintegrable: bool,
    log_dist_nonintegrable: bool,
) -> Result<Regime> {
    let (p, beta) = (space.p(), space.beta());
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidInput(format!("classification needs 1 < p ≤ 2, got {p}")));
    }
    if !(0.0..=1.0).contains(&dim_estimate) {
        return Err(Error::InvalidInput(format!("dimension {dim_estimate} outside [0, 1]")));
    }
    let q = space.q();
    let bq = beta * q;
    if bq > 1.0 {
        return Ok(Regime::NoCyclicVectors);
    }
    let small = dim_estimate < 2.0 * (1.0 - bq) / q;
    let sufficient = match smoothness {
        Smoothness::CInfty => small && log_nonintegrable,
        Smoothness::LipDelta(delta) => delta > beta + 1.0 / p - 0.5 && small && log_dist_nonintegrable,
    };
    Ok(if sufficient {
        Regime::CyclicSufficient
    } else if dim_estimate > 1.0 - bq {
        Regime::NotCyclic
    } else {
        Regime::Indeterminate
    })
}
