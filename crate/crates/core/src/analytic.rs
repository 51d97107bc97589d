//! Analytic objects on the disc built from boundary data: outer functions,
//! the rational family `h_k`, the certificate pair `p_ε`/`F_ε`, functions
//! vanishing smoothly on a set, and the Douglas seminorm.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{self, bin_frequency, check_power_of_two, Fft, FourierSeries};
use crate::geometry::ArcUnion;
use crate::quad;
use crate::scalar::Real;

/// Floor applied before taking logarithms of user moduli that vanish.
pub const MODULUS_FLOOR: f64 = 1e-12;

/// Default bound on the negative-frequency energy fraction of an outer
/// function's boundary samples.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;

/// Harmonic conjugate on a uniform grid: the Fourier multiplier
/// `−i·sign(n)`, with the mean and the Nyquist bin sent to zero.
pub fn conjugate_function<T: Real>(g: &[T]) -> Result<Vec<T>> {
    let n = g.len();
    check_power_of_two(n)?;
    let fft = Fft::new(n);
    let mut buf: Vec<Complex<T>> = g.iter().map(|&x| Complex::new(x, T::zero())).collect();
    fft.forward(&mut buf);
    let minus_i = Complex::new(T::zero(), -T::one());
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = bin_frequency(k, n);
        *c = if freq == 0 || (n % 2 == 0 && k == n / 2) {
            Complex::zero()
        } else if freq > 0 {
            *c * minus_i
        } else {
            -(*c * minus_i)
        };
    }
    fft.inverse(&mut buf);
    let inv = T::from_usize_lossy(n).recip();
    Ok(buf.into_iter().map(|c| c.re * inv).collect())
}

/// Positive boundary modulus sampled on a uniform power-of-two grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryModulus<T> {
    values: Vec<T>,
    floor: T,
}

impl<T: Real> BoundaryModulus<T> {
    /// Takes the values as given; every value must be positive.
    pub fn new(values: Vec<T>) -> Result<Self> {
        check_power_of_two(values.len())?;
        let floor = values.iter().copied().fold(T::infinity(), T::min);
        if !(floor > T::zero()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "boundary modulus must be finite and bounded below by a positive floor".into(),
            ));
        }
        Ok(Self { values, floor })
    }

    /// Clamps the values from below at `floor > 0`.
    pub fn with_floor(values: Vec<T>, floor: T) -> Result<Self> {
        if !(floor > T::zero()) {
            return Err(Error::InvalidInput(format!("modulus floor {floor} must be positive")));
        }
        check_power_of_two(values.len())?;
        Ok(Self {
            values: values.into_iter().map(|v| v.max(floor)).collect(),
            floor,
        })
    }

    /// Clamps at [`MODULUS_FLOOR`].
    pub fn floored(values: Vec<T>) -> Result<Self> {
        Self::with_floor(values, T::lit(MODULUS_FLOOR))
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn floor(&self) -> T {
        self.floor
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn mean_log(&self) -> T {
        self.values.iter().map(|v| v.ln()).sum::<T>() / T::from_usize_lossy(self.values.len())
    }
}

/// Outer function with prescribed boundary modulus.
#[derive(Clone, Debug)]
pub struct OuterFunction<T> {
    /// Boundary values at the `G`-th roots of unity.
    pub boundary: Vec<Complex<T>>,
    /// Coefficients at frequencies `0..G/2`.
    pub analytic_coeffs: FourierSeries<T>,
    /// `exp` of the mean of `log φ`, the value of the Herglotz formula at 0.
    pub value_at_zero: Complex<T>,
    /// Fraction of boundary energy at negative frequencies (Nyquist included).
    pub leakage: T,
    /// Free-form description of the modulus, echoed into reports.
    pub modulus_spec: serde_json::Value,
}

impl<T: Real> OuterFunction<T> {
    pub fn grid_size(&self) -> usize {
        self.boundary.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "boundary_grid_size": self.grid_size(),
            "analytic_coeffs": self.analytic_coeffs,
            "value_at_zero": [self.value_at_zero.re.as_f64(), self.value_at_zero.im.as_f64()],
            "modulus_spec": self.modulus_spec,
            "leakage": self.leakage.as_f64(),
        })
    }
}

impl<T: Real> Serialize for OuterFunction<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

pub fn outer_from_modulus<T: Real>(phi: &BoundaryModulus<T>) -> Result<OuterFunction<T>> {
    outer_from_modulus_with(phi, Some(LEAKAGE_TOLERANCE))
}

/// `exp(log φ + i·conj(log φ))` on the grid. With `leakage_tol = None`
/// the leakage is reported but not enforced.
pub fn outer_from_modulus_with<T: Real>(phi: &BoundaryModulus<T>, leakage_tol: Option<f64>) -> Result<OuterFunction<T>> {
    let g = phi.grid_size();
    let log_phi: Vec<T> = phi.values().iter().map(|v| v.ln()).collect();
    let conj = conjugate_function(&log_phi)?;
    let boundary: Vec<Complex<T>> = log_phi
        .iter()
        .zip(&conj)
        .map(|(&u, &v)| Complex::from_polar(u.exp(), v))
        .collect();
    let bins = Fft::new(g).coefficients(&boundary);
    let total: T = bins.iter().map(|c| c.norm_sqr()).sum();
    let negative: T = bins[g / 2..].iter().map(|c| c.norm_sqr()).sum();
    let leakage = if total > T::zero() { negative / total } else { T::zero() };
    if let Some(tol) = leakage_tol {
        if leakage.as_f64() > tol {
            return Err(Error::Leakage {
                leakage: leakage.as_f64(),
                tolerance: tol,
            });
        }
    }
    let analytic_coeffs = FourierSeries::from_coeffs((0..g / 2).map(|n| (n as i64, bins[n])));
    let mean_log = log_phi.iter().copied().sum::<T>() / T::from_usize_lossy(g);
    Ok(OuterFunction {
        boundary,
        analytic_coeffs,
        value_at_zero: Complex::new(mean_log.exp(), T::zero()),
        leakage,
        modulus_spec: serde_json::Value::Null,
    })
}

/// Truncated expansion of `h_k(z) = (z−1)/(z−1−1/k)` together with the
/// `A¹` norm of the discarded tail.
#[derive(Clone, Debug)]
pub struct HkSeries<T> {
    pub k: u32,
    pub series: FourierSeries<T>,
    /// `Σ_{n > N} |ĥ_k(n)| = (k/(k+1))^{N+1}`, which bounds every `A^p` tail.
    pub tail_bound: T,
}

/// `h_k = 1 − (k+1)^{-1} Σ_{n≥0} (1+1/k)^{-n} z^n`, truncated at `max_degree`.
pub fn h_k<T: Real>(k: u32, max_degree: usize) -> Result<HkSeries<T>> {
    if k == 0 {
        return Err(Error::InvalidInput("h_k needs k ≥ 1".into()));
    }
    let kf = T::lit(k as f64);
    let ratio = kf / (kf + T::one());
    let lead = (kf + T::one()).recip();
    let mut coeffs = Vec::with_capacity(max_degree + 1);
    let mut r_n = T::one();
    for n in 0..=max_degree {
        let c = if n == 0 { T::one() - lead } else { -lead * r_n };
        coeffs.push((n as i64, Complex::new(c, T::zero())));
        r_n *= ratio;
    }
    Ok(HkSeries {
        k,
        series: FourierSeries::from_coeffs(coeffs),
        tail_bound: r_n,
    })
}

/// Smallest truncation degree whose `A¹` tail bound is below `tol`.
pub fn h_k_degree_for_tail(k: u32, tol: f64) -> usize {
    let ratio = k as f64 / (k as f64 + 1.0);
    ((tol.ln() / ratio.ln()).ceil().max(1.0) as usize).saturating_sub(1)
}

/// `‖1 − h_k‖^p_{A^p} = ((k+1)^p − k^p)^{-1}`.
pub fn h_k_distance_closed_form(k: u32, p: f64) -> f64 {
    1.0 / ((k as f64 + 1.0).powf(p) - (k as f64).powf(p))
}

/// Checks that the grid resolves the set's dominant structure: at least
/// four nodes across its largest complementary gap.
pub fn check_resolves<T: Real>(set: &ArcUnion<T>, g: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet("set to resolve is empty"));
    }
    let largest = set
        .complementary_intervals()
        .into_iter()
        .fold(T::zero(), T::max)
        .as_f64();
    let spacing = std::f64::consts::TAU / g as f64;
    if largest > 0.0 && spacing * 4.0 > largest {
        return Err(Error::UnderResolved(format!(
            "grid spacing {spacing:e} does not resolve the largest gap {largest:e}"
        )));
    }
    Ok(())
}

/// `∫_0^{half} −log(chord(a)^γ + ε) da` on a mesh graded towards `a = 0`.
fn half_gap_log_integral(half: f64, gamma: f64, eps: f64, order: usize) -> f64 {
    if half <= 0.0 {
        return 0.0;
    }
    let f = |a: f64| -((2.0 * (a / 2.0).sin()).powf(gamma) + eps).ln();
    let scale = eps.powf(1.0 / gamma).min(half) * 1e-3;
    let mut edges = vec![half];
    let mut x = half;
    while x > scale {
        x *= 0.25;
        edges.push(x);
    }
    edges.push(0.0);
    edges
        .windows(2)
        .map(|w| quad::composite_gauss(f, w[1], w[0], 1, order))
        .sum()
}

/// `M_ε = ½ ∫_𝕋 log(1/(d(ζ,E)^γ + ε)) |dζ|` (unnormalized arc measure),
/// integrated gap by gap on graded meshes with `quadrature_size`
/// Gauss–Legendre nodes per panel; the arcs of `E` contribute
/// `½·|E|·log(1/ε)`.
pub fn m_epsilon<T: Real>(set: &ArcUnion<T>, gamma: f64, eps: f64, quadrature_size: usize) -> Result<f64> {
    if !(gamma > 0.0 && eps > 0.0) {
        return Err(Error::InvalidInput(format!("need γ > 0 and ε > 0, got γ = {gamma}, ε = {eps}")));
    }
    if set.is_empty() {
        return Err(Error::EmptySet("M_ε of an empty set"));
    }
    if quadrature_size < 4 {
        return Err(Error::UnderResolved(format!(
            "quadrature_size {quadrature_size} is below the 4 nodes per panel needed"
        )));
    }
    let mut by_length: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for g in set.complementary_intervals() {
        let g = g.as_f64();
        let key = (g * 2f64.powi(44)).round() as u64;
        by_length.entry(key).or_insert((g, 0)).1 += 1;
    }
    let gaps: f64 = by_length
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(g, count)| count as f64 * 2.0 * half_gap_log_integral(g / 2.0, gamma, eps, quadrature_size))
        .collect::<Vec<_>>()
        .iter()
        .sum();
    let on_set = set.total_measure().as_f64() * (1.0 / eps).ln();
    Ok(0.5 * (gaps + on_set))
}

/// Periodic-trapezoid value of `M_ε` on the `G`-point grid; normalizing
/// `p_ε` by it makes the discrete outer function equal 1 at the origin.
pub fn m_epsilon_on_grid<T: Real>(distances: &[T], gamma: T, eps: T) -> T {
    let g = T::from_usize_lossy(distances.len());
    let half = T::lit(0.5);
    distances
        .iter()
        .map(|&d| -(d.powf(gamma) + eps).ln())
        .sum::<T>()
        * half
        * T::tau()
        / g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    /// `|p_ε| = e^{−M̄_ε} (d^γ + ε)^{−1/2}` with `M̄_ε = M_ε/2π`.
    PEps,
    /// `|F_ε| = (d^γ + ε)^{1/2}`.
    FEps,
}

/// Outer function built from a power of `d(·,E)^γ + ε`.
#[derive(Clone, Debug)]
pub struct PowerOuter<T> {
    pub outer: OuterFunction<T>,
    pub mode: PowerMode,
    /// Grid value of `M_ε` (unnormalized measure).
    pub m_eps_grid: T,
    /// `M̄_ε = M_ε/2π`, the exponent actually used by `p_ε`.
    pub normalizer: T,
    /// `d(ζ_j, E)` on the grid.
    pub distances: Vec<T>,
}

/// Builds `p_ε` or `F_ε` on a `G`-point grid. `leakage_tol = None` reports
/// leakage without enforcing it.
pub fn outer_power_modulus<T: Real>(
    set: &ArcUnion<T>,
    gamma: T,
    eps: T,
    mode: PowerMode,
    g: usize,
    leakage_tol: Option<f64>,
) -> Result<PowerOuter<T>> {
    if !(gamma > T::zero() && eps > T::zero()) {
        return Err(Error::InvalidInput(format!("need γ > 0 and ε > 0, got γ = {gamma}, ε = {eps}")));
    }
    check_power_of_two(g)?;
    check_resolves(set, g)?;
    let distances = set.distances_on_grid(g);
    power_outer_from_distances(distances, gamma, eps, mode, leakage_tol)
}

pub(crate) fn power_outer_from_distances<T: Real>(
    distances: Vec<T>,
    gamma: T,
    eps: T,
    mode: PowerMode,
    leakage_tol: Option<f64>,
) -> Result<PowerOuter<T>> {
    let m_eps_grid = m_epsilon_on_grid(&distances, gamma, eps);
    let normalizer = m_eps_grid / T::tau();
    let half = T::lit(0.5);
    let values: Vec<T> = distances
        .iter()
        .map(|&d| {
            let base = d.powf(gamma) + eps;
            match mode {
                PowerMode::PEps => (-normalizer).exp() * base.powf(-half),
                PowerMode::FEps => base.powf(half),
            }
        })
        .collect();
    let mut outer = outer_from_modulus_with(&BoundaryModulus::new(values)?, leakage_tol)?;
    outer.modulus_spec = serde_json::json!({
        "mode": mode,
        "gamma": gamma.as_f64(),
        "eps": eps.as_f64(),
        "m_eps_grid": m_eps_grid.as_f64(),
    });
    Ok(PowerOuter {
        outer,
        mode,
        m_eps_grid,
        normalizer,
        distances,
    })
}

static DOUGLAS_WEIGHTS: OnceLock<RwLock<HashMap<u64, Arc<Vec<f64>>>>> = OnceLock::new();

/// Relative tolerance of the `w_α(n)` quadrature.
pub const DOUGLAS_WEIGHT_TOL: f64 = 1e-8;

fn douglas_weight_uncached(alpha: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let pi = std::f64::consts::PI;
    let nf = n as f64;
    let f = |th: f64| {
        if th == 0.0 {
            return 0.0;
        }
        let s = (nf * th / 2.0).sin();
        4.0 * s * s / (2.0 * (th / 2.0).sin()).powf(1.0 + 2.0 * alpha)
    };
    let panels = n.max(1);
    let h = pi / panels as f64;
    let half: f64 = (0..panels)
        .map(|k| quad::adaptive(f, k as f64 * h, (k + 1) as f64 * h, DOUGLAS_WEIGHT_TOL * 1e-2, 1e-300).0)
        .sum();
    // Symmetric in θ ↦ 2π − θ; the extra 2π comes from the rotation integral.
    std::f64::consts::TAU * 2.0 * half
}

/// `w_α(n) = 2π ∫_𝕋 |ζ^n − 1|² / |ζ − 1|^{1+2α} |dζ|`, so that
/// `D_α(f) = Σ_n |f̂(n)|² w_α(n)`. Tabulated once per `α` and shared.
pub fn douglas_weights(alpha: f64, max_n: usize) -> Arc<Vec<f64>> {
    let table = DOUGLAS_WEIGHTS.get_or_init(|| RwLock::new(HashMap::new()));
    let key = alpha.to_bits();
    if let Some(w) = table.read().unwrap().get(&key) {
        if w.len() > max_n {
            return Arc::clone(w);
        }
    }
    let len = (max_n + 1).next_power_of_two();
    let w: Vec<f64> = (0..len).into_par_iter().map(|n| douglas_weight_uncached(alpha, n)).collect();
    let w = Arc::new(w);
    let mut guard = table.write().unwrap();
    let entry = guard.entry(key).or_insert_with(|| Arc::clone(&w));
    if entry.len() < w.len() {
        *entry = Arc::clone(&w);
    }
    Arc::clone(entry)
}

pub fn douglas_weight(alpha: f64, n: i64) -> f64 {
    let m = n.unsigned_abs() as usize;
    douglas_weights(alpha, m)[m]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DouglasReport {
    pub alpha: f64,
    /// `Σ_n |f̂(n)|² w_α(n)`, the reported seminorm.
    pub coefficient_value: f64,
    /// Double sum over node pairs with chord ≥ `exclusion`.
    pub quadrature_offband: f64,
    /// Estimate of the excluded band from `|f'|²` (finite differences).
    pub band_correction: f64,
    pub quadrature_value: f64,
    pub exclusion: f64,
    pub relative_gap: f64,
}

/// Douglas seminorm `D_α(f) = ∬ |f(ζ)−f(ζ')|² / |ζ−ζ'|^{1+2α} |dζ||dζ'|`
/// of grid samples, with a direct double-sum cross-check.
pub fn douglas_seminorm<T: Real>(f_samples: &[Complex<T>], alpha: f64, exclusion: f64) -> Result<DouglasReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("α = {alpha} must lie in (0, 1)")));
    }
    if !(exclusion > 0.0) {
        return Err(Error::InvalidInput(format!("exclusion {exclusion} must be positive")));
    }
    let g = f_samples.len();
    check_power_of_two(g)?;
    let f: Vec<Complex<f64>> = f_samples.iter().map(|c| Complex::new(c.re.as_f64(), c.im.as_f64())).collect();

    let bins = Fft::new(g).coefficients(&f);
    let w = douglas_weights(alpha, g / 2);
    let coefficient_value: f64 = bins
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm_sqr() * w[bin_frequency(k, g).unsigned_abs() as usize])
        .sum();

    let h = std::f64::consts::TAU / g as f64;
    let power = 1.0 + 2.0 * alpha;
    let chord = |k: usize| 2.0 * (k as f64 * h / 2.0).sin();
    let first = (1..g).find(|&k| chord(k) >= exclusion).unwrap_or(g);
    let offband: f64 = (first..=g - first)
        .into_par_iter()
        .map(|k| {
            let s: f64 = (0..g).map(|i| (f[i] - f[(i + k) % g]).norm_sqr()).sum();
            s / chord(k).powf(power)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        * h
        * h;
    // |f(θ+s) − f(θ)|² ≈ |f'(θ)|² s² on the excluded band |s| < (first − ½)h.
    let deriv_sq: f64 = (0..g)
        .map(|i| {
            let at = |o: isize| f[((i as isize + o).rem_euclid(g as isize)) as usize];
            let d = (at(-2) - at(-1) * 8.0 + at(1) * 8.0 - at(2)) / (12.0 * h);
            d.norm_sqr()
        })
        .sum::<f64>()
        * h;
    let band = (first as f64 - 0.5) * h;
    let kernel = if band > 0.0 {
        quad::adaptive(
            |s| if s == 0.0 { 0.0 } else { s * s / (2.0 * (s / 2.0).sin()).powf(power) },
            0.0,
            band,
            1e-10,
            1e-300,
        )
        .0
    } else {
        0.0
    };
    let band_correction = 2.0 * deriv_sq * kernel;
    let quadrature_value = offband + band_correction;
    let relative_gap = if coefficient_value > 0.0 {
        (quadrature_value - coefficient_value).abs() / coefficient_value
    } else {
        quadrature_value.abs()
    };
    Ok(DouglasReport {
        alpha,
        coefficient_value,
        quadrature_offband: offband,
        band_correction,
        quadrature_value,
        exclusion,
        relative_gap,
    })
}

/// `f(ζ) = exp(−d(ζ,E)^{−γ})` on the grid, 0 on `E`.
#[derive(Clone, Debug)]
pub struct SmoothVanishing<T> {
    pub gamma: T,
    pub grid: Vec<Complex<T>>,
    pub series: FourierSeries<T>,
    /// `(m, sup_n |f̂(n)| (1+|n|)^m)` for `m = 0..=4`.
    pub decay_evidence: Vec<(u32, f64)>,
}

pub fn smooth_vanishing_function<T: Real>(set: &ArcUnion<T>, gamma: T, g: usize) -> Result<SmoothVanishing<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidInput(format!("γ = {gamma} must be positive")));
    }
    check_power_of_two(g)?;
    check_resolves(set, g)?;
    let grid: Vec<Complex<T>> = set
        .distances_on_grid(g)
        .into_iter()
        .map(|d| {
            let v = if d > T::zero() { (-d.powf(-gamma)).exp() } else { T::zero() };
            Complex::new(v, T::zero())
        })
        .collect();
    let series = fourier::series_from_samples(&grid, g / 2 - 1)?;
    let decay_evidence = (0..=4u32)
        .map(|m| {
            let sup = series
                .iter()
                .map(|(n, c)| c.norm().as_f64() * (1.0 + n.unsigned_abs() as f64).powi(m as i32))
                .fold(0.0, f64::max);
            (m, sup)
        })
        .collect();
    Ok(SmoothVanishing {
        gamma,
        grid,
        series,
        decay_evidence,
    })
}
