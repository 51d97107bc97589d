//! Closed subsets of the circle stored as finite unions of closed arcs.
//!
//! Angles live in `[0, 2π]`. Distances are Euclidean chords
//! `|e^{iθ} − e^{iθ'}|`; arc lengths, tube measures and gap lengths are in
//! radians (unnormalized `|dζ|`). A chordal radius `t` dilates an arc by the
//! angular radius `2·arcsin(t/2)`. Covering numbers use arcs of angular
//! length `2t`, which agrees with the chordal convention up to `O(t³)`.
//!
//! Box-counting dimension stands in for Hausdorff dimension; the two agree
//! for the self-similar generators shipped here.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::Real;

/// Finite union of disjoint closed arcs `[start, end]`, sorted by start.
/// Degenerate arcs (points) are allowed. Arcs ending at `2π` and starting
/// at `0` touch through the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcUnion<T> {
    arcs: Vec<(T, T)>,
}

impl<T: Real> ArcUnion<T> {
    /// Normalizes arbitrary arcs `(start, end)` with `end ≥ start`: angles are
    /// reduced into `[0, 2π]`, wrapping arcs are split and overlaps merged.
    pub fn new(raw: impl IntoIterator<Item = (T, T)>) -> Result<Self> {
        let tau = T::tau();
        let mut pieces = Vec::new();
        for (s, e) in raw {
            if !(s.is_finite() && e.is_finite()) || e < s {
                return Err(Error::InvalidInput(format!("arc [{s}, {e}] is not a valid arc")));
            }
            if e - s >= tau {
                return Ok(Self::full_circle());
            }
            let s0 = crate::scalar::rem_euclid(s, tau);
            let e0 = s0 + (e - s);
            if e0 > tau {
                pieces.push((s0, tau));
                pieces.push((T::zero(), e0 - tau));
            } else {
                pieces.push((s0, e0));
            }
        }
        pieces.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut arcs: Vec<(T, T)> = Vec::with_capacity(pieces.len());
        for (s, e) in pieces {
            match arcs.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => arcs.push((s, e)),
            }
        }
        Ok(Self { arcs })
    }

    /// Trusted constructor for arcs already sorted and disjoint.
    fn from_sorted(arcs: Vec<(T, T)>) -> Self {
        debug_assert!(arcs.windows(2).all(|w| w[0].1 < w[1].0));
        Self { arcs }
    }

    pub fn point(theta: T) -> Self {
        let t = crate::scalar::rem_euclid(theta, T::tau());
        Self { arcs: vec![(t, t)] }
    }

    pub fn points(thetas: impl IntoIterator<Item = T>) -> Result<Self> {
        Self::new(thetas.into_iter().map(|t| (t, t)))
    }

    pub fn full_circle() -> Self {
        Self {
            arcs: vec![(T::zero(), T::tau())],
        }
    }

    pub fn arcs(&self) -> &[(T, T)] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Sum of arc lengths in radians.
    pub fn total_measure(&self) -> T {
        self.arcs.iter().map(|&(s, e)| e - s).sum()
    }

    pub fn smallest_arc(&self) -> Option<T> {
        self.arcs.iter().map(|&(s, e)| e - s).reduce(T::min)
    }

    pub fn contains(&self, theta: T) -> bool {
        !self.is_empty() && self.angular_distance(theta) == T::zero()
    }

    /// Maximal connected pieces on the circle. The piece through the base
    /// point, if any, is returned last with `end > 2π`.
    pub fn components(&self) -> Vec<(T, T)> {
        let tau = T::tau();
        let mut comps: Vec<(T, T)> = Vec::with_capacity(self.arcs.len());
        for &(s, e) in &self.arcs {
            match comps.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => comps.push((s, e)),
            }
        }
        if comps.len() > 1 {
            let first = comps[0];
            let last = comps[comps.len() - 1];
            if last.1 >= tau && first.0 <= T::zero() {
                comps.remove(0);
                let n = comps.len();
                comps[n - 1].1 = tau + first.1;
            }
        }
        comps
    }

    /// Lengths of the complementary open arcs (radians).
    pub fn complementary_intervals(&self) -> Vec<T> {
        let comps = self.components();
        if comps.is_empty() {
            return Vec::new();
        }
        let tau = T::tau();
        if comps.len() == 1 {
            let gap = tau - (comps[0].1 - comps[0].0);
            return if gap > T::zero() { vec![gap] } else { Vec::new() };
        }
        let mut gaps: Vec<T> = comps.windows(2).map(|w| w[1].0 - w[0].1).collect();
        let wrap = comps[0].0 + tau - comps[comps.len() - 1].1;
        if wrap > T::zero() {
            gaps.push(wrap);
        }
        gaps.retain(|g| *g > T::zero());
        gaps
    }

    /// Shortest angular distance in `[0, π]` from `θ` to the set.
    pub fn angular_distance(&self, theta: T) -> T {
        let tau = T::tau();
        let pi = T::PI();
        let th = crate::scalar::rem_euclid(theta, tau);
        let arcs = &self.arcs;
        let n = arcs.len();
        assert!(n > 0, "distance to an empty set");
        let idx = arcs.partition_point(|a| a.0 <= th);
        let mut best = T::infinity();
        if idx > 0 {
            let (_, e) = arcs[idx - 1];
            if th <= e {
                return T::zero();
            }
            best = best.min(th - e);
        }
        if idx < n {
            best = best.min(arcs[idx].0 - th);
        }
        best = best.min(th + tau - arcs[n - 1].1);
        best = best.min(arcs[0].0 + tau - th);
        best.max(T::zero()).min(pi)
    }

    /// Euclidean (chordal) distance from `e^{iθ}` to the set.
    pub fn distance(&self, theta: T) -> T {
        chord(self.angular_distance(theta))
    }

    /// Chordal distances at the `G`-th roots of unity.
    pub fn distances_on_grid(&self, g: usize) -> Vec<T> {
        let step = T::tau() / T::from_usize_lossy(g);
        (0..g)
            .into_par_iter()
            .map(|j| self.distance(step * T::from_usize_lossy(j)))
            .collect()
    }
}

impl<T: Real> Serialize for ArcUnion<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ArcsJson {
            arcs: self.arcs.iter().map(|&(s, e)| [s.as_f64(), e.as_f64()]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for ArcUnion<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = ArcsJson::deserialize(deserializer)?;
        Self::new(raw.arcs.into_iter().map(|[s, e]| (T::lit(s), T::lit(e)))).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ArcsJson {
    arcs: Vec<[f64; 2]>,
}

/// Chord length subtending the angle `a`.
#[inline]
pub fn chord<T: Real>(a: T) -> T {
    T::lit(2.0) * (a * T::lit(0.5)).sin()
}

/// Angular radius of a chordal ball of radius `t` (saturates at `π`).
#[inline]
pub fn angular_radius<T: Real>(t: T) -> T {
    let two = T::lit(2.0);
    two * (t.min(two) / two).asin()
}

pub fn distance_to_set<T: Real>(theta: T, set: &ArcUnion<T>) -> Result<T> {
    if set.is_empty() {
        return Err(Error::EmptySet("distance to an empty set is undefined"));
    }
    Ok(set.distance(theta))
}

/// Lebesgue measure (radians) of `E_t = {ζ : d(ζ, E) ≤ t}`.
pub fn tube_measure<T: Real>(set: &ArcUnion<T>, t: T) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::InvalidInput(format!("tube radius t = {t} must be positive")));
    }
    if set.is_empty() {
        return Ok(T::zero());
    }
    let tau = T::tau();
    let r = angular_radius(t);
    let mut pieces: Vec<(T, T)> = Vec::with_capacity(set.len() + 1);
    for &(s, e) in set.arcs() {
        let (a, b) = (s - r, e + r);
        if b - a >= tau {
            return Ok(tau);
        }
        let a0 = crate::scalar::rem_euclid(a, tau);
        let b0 = a0 + (b - a);
        if b0 > tau {
            pieces.push((a0, tau));
            pieces.push((T::zero(), b0 - tau));
        } else {
            pieces.push((a0, b0));
        }
    }
    pieces.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = T::zero();
    let mut cur: Option<(T, T)> = None;
    for (s, e) in pieces {
        cur = match cur {
            Some((cs, ce)) if s <= ce => Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += ce - cs;
                Some((s, e))
            }
            None => Some((s, e)),
        };
    }
    if let Some((cs, ce)) = cur {
        total += ce - cs;
    }
    Ok(total.min(tau))
}

/// Number of arcs of angular length `2t` the greedy sweep needs to cover
/// the set. The sweep starts after the largest complementary gap, which is
/// optimal for a cut circle and within one arc of optimal in general.
pub fn covering_number<T: Real>(set: &ArcUnion<T>, t: T) -> Result<usize> {
    if set.is_empty() {
        return Err(Error::EmptySet("cannot cover an empty set"));
    }
    if !(t > T::zero()) {
        return Err(Error::InvalidInput(format!("covering radius t = {t} must be positive")));
    }
    let tau = T::tau();
    let width = t + t;
    if width >= tau {
        return Ok(1);
    }
    let comps = set.components();
    let n = comps.len();
    // Gap preceding component i on the circle.
    let gap_before = |i: usize| {
        if i == 0 {
            comps[0].0 + tau - comps[n - 1].1
        } else {
            comps[i].0 - comps[i - 1].1
        }
    };
    let start = (0..n)
        .max_by(|&i, &j| gap_before(i).partial_cmp(&gap_before(j)).unwrap())
        .unwrap_or(0);
    let mut count = 0usize;
    let mut covered = T::neg_infinity();
    let mut offset = T::zero();
    for k in 0..n {
        let i = (start + k) % n;
        if k > 0 && i == 0 {
            offset = tau;
        }
        let (s, e) = (comps[i].0 + offset, comps[i].1 + offset);
        if e <= covered {
            continue;
        }
        let from = if s > covered { s } else { covered };
        let need = ((e - from) / width).ceil().to_usize().unwrap_or(usize::MAX).max(1);
        // A cover arc started at an uncovered point always covers it.
        let need = if s > covered { need.max(1) } else { need };
        count += need;
        covered = from + width * T::from_usize_lossy(need);
    }
    Ok(count)
}

/// Logarithmically spaced `t` values from `t_min` to `t_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, count: usize) -> Self {
        Self { t_min, t_max, count }
    }

    pub fn values<T: Real>(&self) -> Vec<T> {
        if self.count == 1 {
            return vec![T::lit(self.t_min)];
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        (0..self.count)
            .map(|k| T::lit((a + (b - a) * k as f64 / (self.count - 1) as f64).exp()))
            .collect()
    }

    pub fn decades(&self) -> f64 {
        (self.t_max / self.t_min).log10()
    }
}

/// One `(t, N_E(t), |E_t|)` sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoveringSample {
    pub t: f64,
    pub covering_number: usize,
    pub tube_measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringProfile {
    pub samples: Vec<CoveringSample>,
}

impl CoveringProfile {
    /// Samples violating `t·N ≤ |E_t| ≤ 4t·N`.
    pub fn sandwich_violations(&self) -> Vec<CoveringSample> {
        self.samples
            .iter()
            .filter(|s| {
                let n = s.covering_number as f64;
                let slack = 1e-12 * s.tube_measure.max(1.0);
                s.t * n > s.tube_measure + slack || s.tube_measure > 4.0 * s.t * n + slack
            })
            .copied()
            .collect()
    }
}

pub fn covering_profile<T: Real>(set: &ArcUnion<T>, grid: &LogGrid) -> Result<CoveringProfile> {
    let samples = grid
        .values::<T>()
        .into_par_iter()
        .map(|t| {
            Ok(CoveringSample {
                t: t.as_f64(),
                covering_number: covering_number(set, t)?,
                tube_measure: tube_measure(set, t)?.as_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoveringProfile { samples })
}

/// Least-squares slope of `log N_E(t)` against `log(1/t)`.
pub fn box_dimension_estimate<T: Real>(set: &ArcUnion<T>, range: &LogGrid) -> Result<T> {
    if range.count < 2 || !(range.t_min > 0.0) || range.decades() < 2.0 - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "degenerate t-range: {} points over {:.2} decades (need ≥ 2 points over ≥ 2 decades)",
            range.count,
            range.decades()
        )));
    }
    let pts: Vec<(f64, f64)> = range
        .values::<T>()
        .into_iter()
        .map(|t| Ok(((1.0 / t.as_f64()).ln(), (covering_number(set, t)? as f64).ln())))
        .collect::<Result<_>>()?;
    Ok(T::lit(least_squares_slope(&pts)))
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Per-level gap rule of a symmetric Cantor construction on `[0, 2π]`.
#[derive(Clone, Debug, PartialEq)]
pub enum GapSchedule<T> {
    /// Level-`n` gaps of length `2π/3^n`.
    MiddleThirds,
    /// Level-`n` gaps of length `c·2^{−n}/n²`, `c` chosen so the gaps
    /// removed through the construction depth total `2π(1 − 2^{−depth})`.
    NonCarlesonN2,
    /// Explicit gap length per level.
    Custom(Vec<T>),
}

/// Cantor-type generator: at level `n` every remaining arc loses a centred
/// gap of the scheduled length.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorSpec<T> {
    pub schedule: GapSchedule<T>,
    pub depth: usize,
}

pub const PRESET_MIDDLE_THIRDS: &str = "middle_thirds";
pub const PRESET_NON_CARLESON: &str = "non_carleson_n2";

impl<T: Real> CantorSpec<T> {
    pub fn middle_thirds(depth: usize) -> Self {
        Self {
            schedule: GapSchedule::MiddleThirds,
            depth,
        }
    }

    pub fn non_carleson(depth: usize) -> Self {
        Self {
            schedule: GapSchedule::NonCarlesonN2,
            depth,
        }
    }

    pub fn custom(gaps: Vec<T>) -> Self {
        let depth = gaps.len();
        Self {
            schedule: GapSchedule::Custom(gaps),
            depth,
        }
    }

    pub fn preset(name: &str, depth: usize) -> Result<Self> {
        match name {
            PRESET_MIDDLE_THIRDS => Ok(Self::middle_thirds(depth)),
            PRESET_NON_CARLESON => Ok(Self::non_carleson(depth)),
            other => Err(Error::InvalidInput(format!("unknown set preset {other:?}"))),
        }
    }

    /// Gap length removed from each arc at `level` (1-based).
    pub fn gap_length(&self, level: usize) -> T {
        let tau = T::tau();
        match &self.schedule {
            GapSchedule::MiddleThirds => tau / T::lit(3f64.powi(level as i32)),
            GapSchedule::NonCarlesonN2 => {
                let raw = |n: usize| 2f64.powi(-(n as i32)) / (n * n) as f64;
                let per_level: f64 = (1..=self.depth).map(|n| 2f64.powi(n as i32 - 1) * raw(n)).sum();
                let c = std::f64::consts::TAU * (1.0 - 2f64.powi(-(self.depth as i32))) / per_level;
                T::lit(c * raw(level))
            }
            GapSchedule::Custom(g) => g.get(level - 1).copied().unwrap_or_else(T::zero),
        }
    }

    /// Total length removed through the construction depth.
    pub fn removed_length(&self) -> T {
        (1..=self.depth)
            .map(|n| T::lit(2f64.powi(n as i32 - 1)) * self.gap_length(n))
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if let GapSchedule::Custom(g) = &self.schedule {
            if g.len() < self.depth {
                return Err(Error::InvalidInput(format!(
                    "custom schedule has {} levels but depth is {}",
                    g.len(),
                    self.depth
                )));
            }
            if g.iter().any(|x| !(*x >= T::zero())) {
                return Err(Error::InvalidInput("custom gap lengths must be non-negative".into()));
            }
        }
        if self.removed_length() > T::tau() * T::lit(1.0 + 1e-12) {
            return Err(Error::InvalidInput("gap schedule removes more than 2π".into()));
        }
        Ok(())
    }
}

/// Iterated centred gap removal from `[0, 2π]`; returns the `2^depth` arcs
/// of the depth-level approximation.
pub fn cantor_build<T: Real>(spec: &CantorSpec<T>) -> Result<ArcUnion<T>> {
    spec.validate()?;
    let half = T::lit(0.5);
    let mut arcs = vec![(T::zero(), T::tau())];
    for level in 1..=spec.depth {
        let g = spec.gap_length(level);
        let mut next = Vec::with_capacity(arcs.len() * 2);
        for &(s, e) in &arcs {
            let len = e - s;
            if !(g < len) {
                return Err(Error::GapTooLarge {
                    level,
                    gap: g.as_f64(),
                    arc: len.as_f64(),
                });
            }
            let mid = (s + e) * half;
            next.push((s, mid - g * half));
            next.push((mid + g * half, e));
        }
        arcs = next;
    }
    Ok(ArcUnion::from_sorted(arcs))
}

/// Configuration of the Carleson diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonConfig {
    /// Tail ratio of successive dyadic increments at or above which the
    /// decay is judged sub-geometric (divergence evidence).
    pub increment_ratio_threshold: f64,
    /// Levels averaged for the tail ratio.
    pub tail_levels: usize,
    /// Optional threshold on the interval sum itself.
    pub sum_threshold: Option<f64>,
}

impl Default for CarlesonConfig {
    fn default() -> Self {
        Self {
            increment_ratio_threshold: 0.85,
            tail_levels: 4,
            sum_threshold: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarlesonVerdict {
    Carleson,
    NonCarlesonEvidence,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarlesonReport {
    /// `Σ |I_n| log |I_n|` over the complementary intervals.
    pub interval_sum: f64,
    /// `∫ log d(ζ, E) |dζ|` over the complement of the set.
    pub log_integral: f64,
    /// Partial sums over the `2^j − 1` largest complementary intervals.
    pub dyadic_sums: Vec<f64>,
    /// Mean ratio of successive dyadic increments over the tail.
    pub tail_increment_ratio: Option<f64>,
    pub verdict: CarlesonVerdict,
    pub set_measure: f64,
    /// The approximation has positive measure: the integral above excludes
    /// the arcs themselves, on which `log d = −∞`.
    pub positive_measure: bool,
    pub gap_count: usize,
}

/// `Σ |I| log |I|` over complementary intervals.
pub fn interval_sum<T: Real>(set: &ArcUnion<T>) -> T {
    set.complementary_intervals()
        .into_iter()
        .map(|g| g * g.ln())
        .sum()
}

/// `∫_0^x log(2 sin(a/2)) da`, split as `x log x − x` plus a smooth part.
fn log_chord_integral(x: f64, order: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let smooth = |a: f64| {
        if a == 0.0 {
            0.0
        } else {
            ((2.0 * (a / 2.0).sin()) / a).ln()
        }
    };
    x * x.ln() - x + quad::composite_gauss(smooth, 0.0, x, 1, order)
}

/// Carleson diagnostics of a finite-depth approximation. The log-distance
/// integral is evaluated gap by gap, each gap contributing
/// `2∫_0^{L/2} log(2 sin(a/2)) da`, with `quadrature_size` Gauss–Legendre
/// nodes on the smooth remainder.
pub fn carleson_test<T: Real>(set: &ArcUnion<T>, quadrature_size: usize, config: &CarlesonConfig) -> Result<CarlesonReport> {
    if set.is_empty() {
        return Err(Error::EmptySet("Carleson test of an empty set"));
    }
    if quadrature_size < 2 {
        return Err(Error::UnderResolved(format!(
            "quadrature_size {quadrature_size} is below the 2 nodes needed per gap"
        )));
    }
    let mut gaps: Vec<f64> = set.complementary_intervals().into_iter().map(|g| g.as_f64()).collect();
    let interval_sum: f64 = gaps.iter().map(|g| g * g.ln()).sum();
    let log_integral: f64 = gaps
        .par_iter()
        .map(|&g| 2.0 * log_chord_integral(g / 2.0, quadrature_size))
        .collect::<Vec<_>>()
        .iter()
        .sum();
    gaps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut dyadic_sums = Vec::new();
    let mut acc = 0.0;
    let mut taken = 0usize;
    let mut j = 1u32;
    while (1usize << j) - 1 <= gaps.len() {
        let upto = (1usize << j) - 1;
        acc += gaps[taken..upto].iter().map(|g| g * g.ln()).sum::<f64>();
        taken = upto;
        dyadic_sums.push(acc);
        j += 1;
    }
    let increments: Vec<f64> = dyadic_sums.windows(2).map(|w| w[1] - w[0]).collect();
    let tail_increment_ratio = if increments.len() > config.tail_levels {
        let tail = &increments[increments.len() - config.tail_levels - 1..];
        let ratios: Vec<f64> = tail
            .windows(2)
            .filter(|w| w[0] < 0.0 && w[1] < 0.0)
            .map(|w| w[1] / w[0])
            .collect();
        (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
    } else {
        None
    };
    let by_ratio = tail_increment_ratio.is_some_and(|r| r >= config.increment_ratio_threshold);
    let by_sum = config.sum_threshold.is_some_and(|th| interval_sum < th);
    let set_measure = set.total_measure().as_f64();
    Ok(CarlesonReport {
        interval_sum,
        log_integral,
        dyadic_sums,
        tail_increment_ratio,
        verdict: if by_ratio || by_sum {
            CarlesonVerdict::NonCarlesonEvidence
        } else {
            CarlesonVerdict::Carleson
        },
        set_measure,
        positive_measure: set_measure > 0.0,
        gap_count: gaps.len(),
    })
}

/// Interval sums of a generator along its construction depths.
pub fn interval_sum_profile<T: Real>(spec: &CantorSpec<T>) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut sums = Vec::with_capacity(spec.depth);
    let mut acc = 0.0;
    for level in 1..=spec.depth {
        let g = spec.gap_length(level).as_f64();
        acc += 2f64.powi(level as i32 - 1) * g * g.ln();
        sums.push(acc);
    }
    Ok(sums)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceConfig {
    /// Quadrature nodes per decade of `t`.
    pub nodes_per_decade: usize,
    /// Ratio of the last decade increment to the previous one at or above
    /// which the integral is judged divergent.
    pub growth_ratio_threshold: f64,
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        Self {
            nodes_per_decade: 48,
            growth_ratio_threshold: 0.75,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub gamma: f64,
    pub integral_estimate: f64,
    /// `(t_floor, estimate)` along the decade schedule, largest floor first.
    pub schedule: Vec<(f64, f64)>,
    pub divergent: bool,
}

/// Estimates `∫_{t_floor}^{2} |E_t| γ t^{−γ−1} dt` (the Stieltjes integral
/// `−∫ |E_t| dΛ(t)` for `Λ(t) = t^{−γ}`), along floors `10^{-1}, 10^{-2}, …`
/// down to `t_floor`.
pub fn lambda_divergence_test<T: Real>(
    set: &ArcUnion<T>,
    gamma: f64,
    t_floor: f64,
    config: &DivergenceConfig,
) -> Result<DivergenceReport> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidInput(format!("γ = {gamma} must be positive")));
    }
    if !(t_floor > 0.0 && t_floor < 2.0) {
        return Err(Error::InvalidInput(format!("t_floor = {t_floor} must lie in (0, 2)")));
    }
    if set.is_empty() {
        return Err(Error::EmptySet("divergence test of an empty set"));
    }
    // Integrate in u = log t: ∫ |E_t| γ t^{−γ} du.
    let integrand = |u: f64| -> f64 {
        let t = u.exp();
        tube_measure(set, T::lit(t)).map(|m| m.as_f64()).unwrap_or(0.0) * gamma * t.powf(-gamma)
    };
    let piece = |a: f64, b: f64| -> f64 {
        let decades = ((b - a) / std::f64::consts::LN_10).max(1e-3);
        let panels = ((decades * config.nodes_per_decade as f64 / 8.0).ceil() as usize).max(1);
        quad::composite_gauss(integrand, a, b, panels, 8)
    };
    let mut floors = Vec::new();
    let mut f = 0.1;
    while f > t_floor * (1.0 + 1e-12) {
        floors.push(f);
        f /= 10.0;
    }
    floors.push(t_floor);
    let mut schedule = Vec::with_capacity(floors.len());
    let mut acc = piece(floors[0].ln(), 2f64.ln());
    schedule.push((floors[0], acc));
    for w in floors.windows(2) {
        acc += piece(w[1].ln(), w[0].ln());
        schedule.push((w[1], acc));
    }
    let increments: Vec<f64> = schedule.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let divergent = match increments.len() {
        0 => false,
        1 => increments[0] >= config.growth_ratio_threshold * schedule[0].1,
        n => increments[n - 1] >= config.growth_ratio_threshold * increments[n - 2],
    };
    Ok(DivergenceReport {
        gamma,
        integral_estimate: acc,
        schedule,
        divergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn middle_thirds_depth_one() {
        let e = cantor_build(&CantorSpec::<f64>::middle_thirds(1)).unwrap();
        assert_eq!(e.len(), 2);
        for &(s, t) in e.arcs() {
            assert!((t - s - TAU / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn middle_thirds_measure_recursion() {
        for d in 0..10 {
            let e = cantor_build(&CantorSpec::<f64>::middle_thirds(d)).unwrap();
            assert_eq!(e.len(), 1 << d);
            assert!((e.total_measure() - TAU * (2.0f64 / 3.0).powi(d as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_carleson_preset_builds_positive_arcs() {
        let spec = CantorSpec::<f64>::non_carleson(20);
        assert!((spec.removed_length() - TAU * (1.0 - 2f64.powi(-20))).abs() < 1e-9);
        let e = cantor_build(&spec).unwrap();
        assert_eq!(e.len(), 1 << 20);
        assert!(e.smallest_arc().unwrap() > 0.0);
    }

    #[test]
    fn oversized_gap_is_rejected() {
        let spec = CantorSpec::custom(vec![2.0, (TAU - 2.0) / 2.0]);
        assert!(matches!(cantor_build(&spec), Err(Error::GapTooLarge { level: 2, .. })));
        let spec = CantorSpec::custom(vec![7.0]);
        assert!(cantor_build(&spec).is_err());
    }

    #[test]
    fn distances() {
        let e = ArcUnion::new([(1.0, 2.0)]).unwrap();
        assert_eq!(e.distance(1.5), 0.0);
        let p = ArcUnion::point(0.0);
        assert!((p.distance(PI) - 2.0).abs() < 1e-15);
        assert!(distance_to_set(0.3, &ArcUnion::<f64>::new([]).unwrap()).is_err());
    }

    #[test]
    fn distance_matches_brute_force_grid() {
        let e = ArcUnion::new([(0.4, 1.1), (3.0, 4.5)]).unwrap();
        let mut fine = Vec::new();
        for &(s, t) in e.arcs() {
            let k = 200_000;
            fine.extend((0..=k).map(|i| s + (t - s) * i as f64 / k as f64));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let th: f64 = rng.gen_range(0.0..TAU);
            let brute = fine
                .iter()
                .map(|&a| ((th.cos() - a.cos()).powi(2) + (th.sin() - a.sin()).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            // interior points of the fine grid sit at most half a step apart
            assert!((e.distance(th) - brute).abs() < 1.5 / 200_000.0 * 0.5 + 1e-12);
        }
    }

    #[test]
    fn distance_zero_iff_member() {
        let e = cantor_build(&CantorSpec::<f64>::middle_thirds(6)).unwrap();
        for &(s, t) in e.arcs() {
            assert_eq!(e.distance(s), 0.0);
            assert_eq!(e.distance(0.5 * (s + t)), 0.0);
            assert_eq!(e.distance(t), 0.0);
        }
        let gap_mid = 0.5 * (e.arcs()[0].1 + e.arcs()[1].0);
        assert!(e.distance(gap_mid) > 0.0);
        assert!(!e.contains(gap_mid));
    }

    #[test]
    fn tube_of_point() {
        let p = ArcUnion::point(0.0);
        assert!((tube_measure(&p, 1.0).unwrap() - TAU / 3.0).abs() < 1e-14);
        assert!((tube_measure(&p, 2.0).unwrap() - TAU).abs() < 1e-14);
        assert!((tube_measure(&p, 5.0).unwrap() - TAU).abs() < 1e-14);
        assert!(tube_measure(&p, 0.0).is_err());
    }

    #[test]
    fn tube_matches_monte_carlo() {
        let e = cantor_build(&CantorSpec::<f64>::middle_thirds(6)).unwrap();
        let t = 3f64.powi(-6);
        let exact = tube_measure(&e, t).unwrap() / TAU;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 1_000_000;
        let hits = (0..n).filter(|_| e.distance(rng.gen_range(0.0..TAU)) <= t).count() as f64;
        let est = hits / n as f64;
        let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((est - exact).abs() < 3.0 * sigma, "{est} vs {exact}");
    }

    #[test]
    fn covering_of_point_and_circle() {
        let p = ArcUnion::point(2.0);
        assert_eq!(covering_number(&p, 0.01).unwrap(), 1);
        let full = ArcUnion::<f64>::full_circle();
        for t in [0.3, 0.1, 0.01, 0.0123] {
            assert_eq!(covering_number(&full, t).unwrap(), (PI / t).ceil() as usize);
        }
    }

    #[test]
    fn covering_greedy_is_minimal_on_small_sets() {
        // Brute-force oracle: optimal cover of finitely many points by arcs of
        // length 2t, trying every point as the first arc start.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let mut pts: Vec<f64> = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(0.0..TAU)).collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let t = rng.gen_range(0.05..1.0);
            let set = ArcUnion::points(pts.clone()).unwrap();
            let n = pts.len();
            let best = (0..n)
                .map(|s| {
                    let mut count = 0;
                    let mut reach = f64::NEG_INFINITY;
                    for k in 0..n {
                        let i = (s + k) % n;
                        let x = pts[i] + if i < s { TAU } else { 0.0 };
                        if x > reach {
                            count += 1;
                            reach = x + 2.0 * t;
                        }
                    }
                    count
                })
                .min()
                .unwrap();
            let greedy = covering_number(&set, t).unwrap();
            assert!(greedy >= best && greedy <= best + 1);
        }
    }

    #[test]
    fn sandwich_on_generated_sets() {
        for spec in [CantorSpec::<f64>::middle_thirds(10), CantorSpec::non_carleson(14)] {
            let e = cantor_build(&spec).unwrap();
            let prof = covering_profile(&e, &LogGrid::new(1e-5, 0.5, 30)).unwrap();
            assert!(prof.sandwich_violations().is_empty(), "{:?}", prof.sandwich_violations());
            for w in prof.samples.windows(2) {
                assert!(w[0].covering_number >= w[1].covering_number);
                assert!(w[0].tube_measure <= w[1].tube_measure);
            }
        }
    }

    #[test]
    fn box_dimension_of_model_sets() {
        let g = LogGrid::new(1e-4, 1e-1, 16);
        let p = ArcUnion::<f64>::point(1.0);
        assert!(box_dimension_estimate(&p, &g).unwrap().abs() < 0.02);
        let pts = ArcUnion::points([0.5, 2.0, 4.0]).unwrap();
        assert!(box_dimension_estimate(&pts, &g).unwrap() < 0.05);
        let full = ArcUnion::<f64>::full_circle();
        assert!((box_dimension_estimate(&full, &g).unwrap() - 1.0).abs() < 0.02);
        let mt = cantor_build(&CantorSpec::<f64>::middle_thirds(12)).unwrap();
        let g = LogGrid::new(TAU * 3f64.powi(-11), TAU * 3f64.powi(-2), 40);
        let d = box_dimension_estimate(&mt, &g).unwrap();
        assert!((d - 2f64.ln() / 3f64.ln()).abs() < 0.05, "{d}");
        assert!(box_dimension_estimate(&mt, &LogGrid::new(0.01, 0.1, 5)).is_err());
    }

    #[test]
    fn log_integral_of_a_point_vanishes() {
        let p = ArcUnion::point(0.0);
        let r = carleson_test(&p, 16, &CarlesonConfig::default()).unwrap();
        assert!(r.log_integral.abs() < 1e-12, "{}", r.log_integral);
        assert!(!r.positive_measure);
    }

    #[test]
    fn log_integral_matches_uniform_quadrature() {
        let e = cantor_build(&CantorSpec::<f64>::middle_thirds(3)).unwrap();
        let r = carleson_test(&e, 16, &CarlesonConfig::default()).unwrap();
        let (val, _) = quad::adaptive(
            |th| {
                let d = e.distance(th);
                if d > 0.0 {
                    d.ln()
                } else {
                    0.0
                }
            },
            0.0,
            TAU,
            1e-11,
            1e-13,
        );
        assert!((r.log_integral - val).abs() < 1e-6, "{} vs {val}", r.log_integral);
        assert!(r.positive_measure);
    }

    #[test]
    fn carleson_verdicts() {
        let mt = cantor_build(&CantorSpec::<f64>::middle_thirds(16)).unwrap();
        let r = carleson_test(&mt, 8, &CarlesonConfig::default()).unwrap();
        assert_eq!(r.verdict, CarlesonVerdict::Carleson);
        let nc = cantor_build(&CantorSpec::<f64>::non_carleson(16)).unwrap();
        let r = carleson_test(&nc, 8, &CarlesonConfig::default()).unwrap();
        assert_eq!(r.verdict, CarlesonVerdict::NonCarlesonEvidence);
        assert!(carleson_test(&nc, 1, &CarlesonConfig::default()).is_err());
    }

    #[test]
    fn dyadic_sums_match_level_profile() {
        let spec = CantorSpec::<f64>::middle_thirds(10);
        let e = cantor_build(&spec).unwrap();
        let r = carleson_test(&e, 4, &CarlesonConfig::default()).unwrap();
        let prof = interval_sum_profile(&spec).unwrap();
        assert_eq!(r.dyadic_sums.len(), 10);
        for (a, b) in r.dyadic_sums.iter().zip(&prof) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((r.interval_sum - prof[9]).abs() < 1e-9);
    }

    #[test]
    fn lambda_divergence_cases() {
        let p = ArcUnion::point(0.0);
        let cfg = DivergenceConfig::default();
        assert!(!lambda_divergence_test(&p, 0.5, 1e-8, &cfg).unwrap().divergent);
        assert!(lambda_divergence_test(&p, 1.0, 1e-8, &cfg).unwrap().divergent);
        let full = ArcUnion::<f64>::full_circle();
        assert!(lambda_divergence_test(&full, 0.5, 1e-8, &cfg).unwrap().divergent);
        assert!(lambda_divergence_test(&p, 0.0, 1e-8, &cfg).is_err());
    }

    #[test]
    fn arc_normalization_and_json() {
        let e = ArcUnion::<f64>::new([(6.0, 7.0), (1.0, 2.0), (1.5, 2.5)]).unwrap();
        assert_eq!(e.len(), 3);
        assert!((e.total_measure() - 2.5).abs() < 1e-12);
        let s = serde_json::to_string(&ArcUnion::new([(1.0, 2.0)]).unwrap()).unwrap();
        assert_eq!(s, r#"{"arcs":[[1.0,2.0]]}"#);
        let back: ArcUnion<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back.arcs(), &[(1.0, 2.0)]);
    }
}
