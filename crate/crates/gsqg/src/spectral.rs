//! Trigonometric interpolation on uniform periodic grids over the unit circle.
//!
//! Plane curves are packed as complex samples `x + i y`, so one transform carries both
//! coordinates. The Nyquist mode is interpreted as a cosine, which keeps interpolants of
//! real data real.

use crate::vec2::Vec2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::TAU;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[inline]
pub fn to_complex(v: Vec2) -> Complex64 {
    Complex64::new(v.x, v.y)
}

#[inline]
pub fn to_vec2(c: Complex64) -> Vec2 {
    Vec2::new(c.re, c.im)
}

/// Signed wavenumber of FFT slot `j` for length `n`; the Nyquist slot maps to `n/2`.
#[inline]
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Normalized forward transform: `c_k = (1/n) Σ_j z_j e^{-2πi kj/n}`.
pub fn forward(z: &[Complex64]) -> Vec<Complex64> {
    let n = z.len();
    let mut buf = z.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let s = 1.0 / n as f64;
    for c in &mut buf {
        *c *= s;
    }
    buf
}

/// Inverse of [`forward`].
pub fn inverse(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut buf = c.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf
}

fn apply_multiplier(z: &[Complex64], mult: impl Fn(i64, bool) -> Complex64) -> Vec<Complex64> {
    let n = z.len();
    let mut c = forward(z);
    for (j, cj) in c.iter_mut().enumerate() {
        let nyq = n % 2 == 0 && j == n / 2;
        *cj *= mult(wavenumber(j, n), nyq);
    }
    inverse(&c)
}

/// `order`-th derivative in the grid parameter ξ ∈ [0, 1).
pub fn derivative_complex(z: &[Complex64], order: u32) -> Vec<Complex64> {
    apply_multiplier(z, |k, nyq| {
        if nyq && order % 2 == 1 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, TAU * k as f64).powu(order)
        }
    })
}

pub fn derivative(z: &[Vec2], order: u32) -> Vec<Vec2> {
    let c: Vec<Complex64> = z.iter().map(|&v| to_complex(v)).collect();
    derivative_complex(&c, order).into_iter().map(to_vec2).collect()
}

/// First and second ξ-derivatives from a single forward transform.
pub fn derivatives12(z: &[Vec2]) -> (Vec<Vec2>, Vec<Vec2>) {
    let n = z.len();
    let c: Vec<Complex64> = z.iter().map(|&v| to_complex(v)).collect();
    let coef = forward(&c);
    let mut d1 = coef.clone();
    let mut d2 = coef;
    for j in 0..n {
        let k = TAU * wavenumber(j, n) as f64;
        let nyq = j == n / 2;
        d1[j] *= if nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, k) };
        d2[j] *= -k * k;
    }
    (
        inverse(&d1).into_iter().map(to_vec2).collect(),
        inverse(&d2).into_iter().map(to_vec2).collect(),
    )
}

pub fn derivative_real(f: &[f64], order: u32) -> Vec<f64> {
    let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    derivative_complex(&c, order).into_iter().map(|c| c.re).collect()
}

/// Exponential low-pass filter `exp(−36 (|k|/k_max)^order)`: modes near the Nyquist
/// frequency are damped to roundoff, the resolved band is left untouched.
pub fn exponential_filter(z: &[Vec2], order: i32) -> Vec<Vec2> {
    let kmax = (z.len() / 2) as f64;
    let c: Vec<Complex64> = z.iter().map(|&v| to_complex(v)).collect();
    apply_multiplier(&c, |k, _| Complex64::new((-36.0 * (k.unsigned_abs() as f64 / kmax).powi(order)).exp(), 0.0))
        .into_iter()
        .map(to_vec2)
        .collect()
}

/// Values of the interpolant at the shifted grid `ξ_j + frac/n`.
pub fn shift(z: &[Vec2], frac: f64) -> Vec<Vec2> {
    let n = z.len();
    let c: Vec<Complex64> = z.iter().map(|&v| to_complex(v)).collect();
    apply_multiplier(&c, |k, nyq| {
        let ph = TAU * k as f64 * frac / n as f64;
        if nyq {
            Complex64::new(ph.cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, ph)
        }
    })
    .into_iter()
    .map(to_vec2)
    .collect()
}

/// Zero-padded resampling of the interpolant onto `m ≥ n` uniform points.
pub fn upsample(z: &[Vec2], m: usize) -> Vec<Vec2> {
    let n = z.len();
    assert!(m >= n && n % 2 == 0);
    let c: Vec<Complex64> = z.iter().map(|&v| to_complex(v)).collect();
    let coef = forward(&c);
    let mut big = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        let k = wavenumber(j, n);
        if j == n / 2 && m > n {
            let half = coef[j] * 0.5;
            big[n / 2] += half;
            big[m - n / 2] += half;
        } else {
            let slot = if k >= 0 { k as usize } else { (m as i64 + k) as usize };
            big[slot] += coef[j];
        }
    }
    inverse(&big).into_iter().map(to_vec2).collect()
}

/// Trigonometric interpolant of plane-valued samples, evaluable at arbitrary ξ.
#[derive(Clone, Debug)]
pub struct Interpolant {
    /// Coefficients for k = 0, 1, …, n/2 − 1.
    pos: Vec<Complex64>,
    /// Coefficients for k = −1, −2, …, −(n/2 − 1).
    neg: Vec<Complex64>,
    /// Nyquist coefficient, used as `c cos(π n ξ)`.
    nyq: Complex64,
    n: usize,
}

impl Interpolant {
    pub fn new(z: &[Vec2]) -> Self {
        let c: Vec<Complex64> = z.iter().map(|&v| to_complex(v)).collect();
        Self::from_complex(&c)
    }

    pub fn from_real(f: &[f64]) -> Self {
        let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_complex(&c)
    }

    pub fn from_complex(z: &[Complex64]) -> Self {
        let n = z.len();
        assert!(n >= 2 && n % 2 == 0);
        let coef = forward(z);
        let h = n / 2;
        let pos = coef[..h].to_vec();
        let neg = (1..h).map(|k| coef[n - k]).collect();
        Interpolant { pos, neg, nyq: coef[h], n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Value and first two ξ-derivatives at `xi`.
    pub fn eval3(&self, xi: f64) -> (Complex64, Complex64, Complex64) {
        let w = Complex64::from_polar(1.0, TAU * xi);
        let wc = w.conj();
        let mut p = Complex64::new(1.0, 0.0);
        let mut q = Complex64::new(1.0, 0.0);
        let mut f = self.pos[0];
        let mut f1 = Complex64::new(0.0, 0.0);
        let mut f2 = Complex64::new(0.0, 0.0);
        for k in 1..self.pos.len() {
            p *= w;
            q *= wc;
            let a = self.pos[k] * p;
            let b = self.neg[k - 1] * q;
            let kk = TAU * k as f64;
            f += a + b;
            f1 += Complex64::new(0.0, kk) * (a - b);
            f2 -= (a + b) * (kk * kk);
        }
        let m = std::f64::consts::PI * self.n as f64;
        let (s, c) = (m * xi).sin_cos();
        f += self.nyq * c;
        f1 -= self.nyq * (m * s);
        f2 -= self.nyq * (m * m * c);
        (f, f1, f2)
    }

    pub fn eval(&self, xi: f64) -> Vec2 {
        to_vec2(self.eval3(xi).0)
    }

    /// Position and ξ-derivative.
    pub fn eval_d1(&self, xi: f64) -> (Vec2, Vec2) {
        let (f, f1, _) = self.eval3(xi);
        (to_vec2(f), to_vec2(f1))
    }

    pub fn eval_real(&self, xi: f64) -> f64 {
        self.eval3(xi).0.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, r: f64) -> Vec<Vec2> {
        (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                Vec2::new(r * t.cos(), r * t.sin())
            })
            .collect()
    }

    #[test]
    fn circle_derivatives_are_exact() {
        let z = circle(32, 2.0);
        let (d1, d2) = derivatives12(&z);
        for j in 0..32 {
            let t = TAU * j as f64 / 32.0;
            let e1 = Vec2::new(-t.sin(), t.cos()) * (2.0 * TAU);
            assert!((d1[j] - e1).norm() < 1e-12);
            assert!((d2[j] + z[j] * (TAU * TAU)).norm() < 1e-10);
        }
    }

    #[test]
    fn interpolant_reproduces_nodes_and_shift() {
        let z: Vec<Vec2> = (0..16)
            .map(|j| {
                let t = TAU * j as f64 / 16.0;
                Vec2::new(t.cos() + 0.3 * (3.0 * t).sin(), (2.0 * t).cos() + t.sin())
            })
            .collect();
        let it = Interpolant::new(&z);
        for (j, p) in z.iter().enumerate() {
            assert!((it.eval(j as f64 / 16.0) - *p).norm() < 1e-13);
        }
        let mid = shift(&z, 0.5);
        for (j, m) in mid.iter().enumerate() {
            assert!((it.eval((j as f64 + 0.5) / 16.0) - *m).norm() < 1e-13);
            let t = TAU * (j as f64 + 0.5) / 16.0;
            let exact = Vec2::new(t.cos() + 0.3 * (3.0 * t).sin(), (2.0 * t).cos() + t.sin());
            assert!((exact - *m).norm() < 1e-13);
        }
        let up = upsample(&z, 64);
        for (j, p) in up.iter().enumerate() {
            assert!((it.eval(j as f64 / 64.0) - *p).norm() < 1e-13);
        }
    }

    #[test]
    fn interpolant_derivatives_match_grid_derivatives() {
        let z = circle(24, 1.5);
        let it = Interpolant::new(&z);
        let (d1, _) = derivatives12(&z);
        for j in 0..24 {
            let (_, g) = it.eval_d1(j as f64 / 24.0);
            assert!((g - d1[j]).norm() < 1e-11);
        }
    }
}
