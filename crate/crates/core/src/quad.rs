//! One-dimensional quadrature rules.

use crate::scalar::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
/// Returns the estimate and the accumulated error estimate.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> (f64, f64) {
    let mut stack = vec![(a, b, 0usize)];
    let (mut total, mut err) = (0.0, 0.0);
    let whole = gk15(&mut f, a, b).0.abs();
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(&mut f, lo, hi);
        let local_tol = (rel_tol * whole).max(abs_tol) * (hi - lo) / (b - a);
        if e <= local_tol || depth >= 48 || hi - lo < 1e-14 * (b - a).abs() {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    (total, err)
}

/// Composite Gauss–Legendre rule over `[a, b]` split into `panels` equal
/// pieces, generic in the scalar type.
pub fn composite_gauss<T: Real>(f: impl Fn(T) -> T, a: T, b: T, panels: usize, order: usize) -> T {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / T::from_usize_lossy(panels);
    let half = h * T::lit(0.5);
    (0..panels)
        .map(|k| {
            let c = a + h * T::from_usize_lossy(k) + half;
            x.iter()
                .zip(&w)
                .map(|(&xi, &wi)| T::lit(wi) * f(c + half * T::lit(xi)))
                .sum::<T>()
                * half
        })
        .sum()
}
