//! Weighted least squares for convolution operators `c ↦ f * c` with `c`
//! supported on a contiguous frequency window.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::Fft;
use crate::scalar::Real;

/// Unknown counts at or below this use a dense Cholesky solve.
pub const DENSE_LIMIT: usize = 600;

/// Convolution by a fixed dense kernel, mapping coefficients on `[lo, hi]`
/// to a residual window `[rlo, rlo + rows)`.
pub struct ConvOperator<T: Real> {
    kernel: Vec<Complex<T>>,
    cols: usize,
    rows: usize,
    /// Row index of `(f * c)` for kernel index 0 and column 0.
    shift: usize,
    fft: Fft<T>,
    kernel_hat: Vec<Complex<T>>,
}

impl<T: Real> ConvOperator<T> {
    /// `kernel[k]` is the coefficient at `kmin + k`; unknowns sit at
    /// `lo..lo + cols`; rows cover `rlo..rlo + rows`, which must contain
    /// the full output range.
    pub fn new(kernel: Vec<Complex<T>>, kmin: i64, lo: i64, cols: usize, rlo: i64, rows: usize) -> Result<Self> {
        if kernel.is_empty() || cols == 0 {
            return Err(Error::InvalidInput("empty convolution operator".into()));
        }
        let shift = kmin + lo - rlo;
        if shift < 0 || shift as usize + kernel.len() + cols - 1 > rows {
            return Err(Error::InvalidInput("residual window does not contain the operator range".into()));
        }
        let len = (rows + kernel.len()).next_power_of_two();
        let fft = Fft::new(len);
        let mut kernel_hat = vec![Complex::zero(); len];
        kernel_hat[..kernel.len()].copy_from_slice(&kernel);
        fft.forward(&mut kernel_hat);
        Ok(Self {
            kernel,
            cols,
            rows,
            shift: shift as usize,
            fft,
            kernel_hat,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)` of the dense matrix.
    fn entry(&self, i: usize, j: usize) -> Complex<T> {
        match i.checked_sub(j + self.shift) {
            Some(k) if k < self.kernel.len() => self.kernel[k],
            _ => Complex::zero(),
        }
    }

    pub fn apply(&self, c: &[Complex<T>]) -> Vec<Complex<T>> {
        let len = self.kernel_hat.len();
        let mut buf = vec![Complex::zero(); len];
        buf[..self.cols].copy_from_slice(c);
        self.fft.forward(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= *k;
        }
        self.fft.inverse(&mut buf);
        let inv = T::from_usize_lossy(len).recip();
        let mut out = vec![Complex::zero(); self.rows];
        let n = self.kernel.len() + self.cols - 1;
        for k in 0..n {
            out[k + self.shift] = buf[k] * inv;
        }
        out
    }

    pub fn adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let len = self.kernel_hat.len();
        let mut buf = vec![Complex::zero(); len];
        buf[..self.rows].copy_from_slice(y);
        self.fft.forward(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k.conj();
        }
        self.fft.inverse(&mut buf);
        let inv = T::from_usize_lossy(len).recip();
        (0..self.cols).map(|j| buf[j + self.shift] * inv).collect()
    }
}

/// Solves `min Σ_i ω_i |t_i − (A c)_i|²`, warm-started from `start` when
/// the iterative path is taken.
pub fn weighted_least_squares<T: Real>(
    op: &ConvOperator<T>,
    omega: &[T],
    target: &[Complex<T>],
    start: Option<&[Complex<T>]>,
    cg_iterations: usize,
) -> Result<Vec<Complex<T>>> {
    if op.cols() <= DENSE_LIMIT {
        dense_solve(op, omega, target)
    } else {
        Ok(cgnr(op, omega, target, start, cg_iterations))
    }
}

fn dense_solve<T: Real>(op: &ConvOperator<T>, omega: &[T], target: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let m = op.cols();
    let klen = op.kernel.len();
    // Column j is nonzero on rows shift + j .. shift + j + klen.
    let gram: Vec<Vec<Complex<T>>> = (0..m)
        .into_par_iter()
        .map(|j| {
            (0..m)
                .map(|l| {
                    let (a, b) = (j.max(l) + op.shift, j.min(l) + op.shift + klen);
                    let mut s = Complex::zero();
                    for i in a..b {
                        s += op.entry(i, j).conj() * op.entry(i, l) * omega[i];
                    }
                    s
                })
                .collect()
        })
        .collect();
    let rhs: Vec<Complex<T>> = (0..m)
        .map(|j| {
            let mut s = Complex::zero();
            for i in op.shift + j..op.shift + j + klen {
                s += op.entry(i, j).conj() * target[i] * omega[i];
            }
            s
        })
        .collect();
    let mut gram = gram;
    let trace: T = (0..m).map(|j| gram[j][j].re).sum();
    let ridge = trace / T::from_usize_lossy(m) * T::lit(1e-14);
    for (j, row) in gram.iter_mut().enumerate() {
        row[j].re += ridge;
    }
    cholesky_solve(gram, rhs)
}

/// Solves `H x = b` for Hermitian positive definite `H` (row-major).
pub fn cholesky_solve<T: Real>(mut h: Vec<Vec<Complex<T>>>, mut b: Vec<Complex<T>>) -> Result<Vec<Complex<T>>> {
    let n = b.len();
    for j in 0..n {
        let mut d = h[j][j].re;
        for k in 0..j {
            d -= h[j][k].norm_sqr();
        }
        if !(d > T::zero()) {
            return Err(Error::NoConvergence(format!("Gram matrix not positive definite at pivot {j}")));
        }
        let d = d.sqrt();
        h[j][j] = Complex::new(d, T::zero());
        let (top, rest) = h.split_at_mut(j + 1);
        let row_j = &top[j];
        rest.par_iter_mut().for_each(|row_i| {
            let mut s = row_i[j];
            for k in 0..j {
                s -= row_i[k] * row_j[k].conj();
            }
            row_i[j] = s / d;
        });
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= h[i][k] * b[k];
        }
        b[i] = s / h[i][i].re;
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= h[k][i].conj() * b[k];
        }
        b[i] = s / h[i][i].re;
    }
    Ok(b)
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Conjugate gradients on the weighted normal equations.
fn cgnr<T: Real>(
    op: &ConvOperator<T>,
    omega: &[T],
    target: &[Complex<T>],
    start: Option<&[Complex<T>]>,
    iterations: usize,
) -> Vec<Complex<T>> {
    let mut x = start.map(<[_]>::to_vec).unwrap_or_else(|| vec![Complex::zero(); op.cols()]);
    let ax = op.apply(&x);
    let weighted = |r: &[Complex<T>]| -> Vec<Complex<T>> { r.iter().zip(omega).map(|(v, &w)| *v * w).collect() };
    let residual: Vec<Complex<T>> = target.iter().zip(&ax).map(|(t, a)| *t - *a).collect();
    let mut g = op.adjoint(&weighted(&residual));
    let mut d = g.clone();
    let mut gg = dot(&g, &g);
    let g0 = gg;
    let tol = T::lit(1e-28);
    for _ in 0..iterations {
        if !(gg > tol * g0) || gg == T::zero() {
            break;
        }
        let ad = op.apply(&d);
        let q = weighted(&ad);
        let denom = dot(&ad, &q);
        if !(denom > T::zero()) {
            break;
        }
        let alpha = gg / denom;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += *di * alpha;
        }
        let aq = op.adjoint(&q);
        for (gi, ai) in g.iter_mut().zip(&aq) {
            *gi -= *ai * alpha;
        }
        let gg_new = dot(&g, &g);
        let beta = gg_new / gg;
        gg = gg_new;
        for (di, gi) in d.iter_mut().zip(&g) {
            *di = *gi + *di * beta;
        }
    }
    x
}
