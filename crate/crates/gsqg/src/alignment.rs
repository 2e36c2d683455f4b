//! Curve mollification, the alignment homeomorphism obtained from a projection flow
//! between mollified curves, and nearest-point maps.

use crate::bump;
use crate::curve::{h2_seminorm, ClosedCurve};
use crate::error::{Error, Result};
use crate::metrics::{frechet_coupling, point_polyline_distance, project_onto, self_distance};
use crate::spectral::{self, Interpolant};
use crate::spline::gauss_legendre8;
use crate::vec2::Vec2;
use rustfft::num_complex::Complex64;
use serde::Serialize;

/// Unit-mass even bump `σ(x) = ψ(x/w) / (w·∫ψ)` supported on `[-w, w]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    pub half_width: f64,
}

impl Mollifier {
    /// Width chosen so that `‖σ‖_{L²} = ℓ^{-1/2}`; the support stays inside `[-ℓ, ℓ]`.
    pub fn for_length(l: f64) -> Self {
        let m = bump::bump_mass();
        Mollifier { half_width: l * bump::bump_l2_sq() / (m * m) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        bump::bump(x / self.half_width) / (self.half_width * bump::bump_mass())
    }

    pub fn l2_norm(&self) -> f64 {
        let m = bump::bump_mass();
        (bump::bump_l2_sq() / (self.half_width * m * m)).sqrt()
    }

    /// `∫ σ(x) cos(ωx) dx`.
    pub fn fourier(&self, omega: f64) -> f64 {
        let panels = 64 + (omega.abs() * self.half_width).ceil() as usize;
        let h = 2.0 / panels as f64;
        let a = omega * self.half_width;
        (0..panels)
            .map(|k| {
                let lo = -1.0 + k as f64 * h;
                gauss_legendre8(lo, lo + h, |t| bump::bump(t) * (a * t).cos())
            })
            .sum::<f64>()
            / bump::bump_mass()
    }
}

/// Periodic convolution of the arclength parametrization with `σ_r(x) = σ(x/r)/r`.
/// The result is a path through the mollified nodes, generally not constant-speed.
pub fn mollify_curve(curve: &ClosedCurve, r: f64, sigma: &Mollifier) -> Result<ClosedCurve> {
    let l = curve.length()?;
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("mollification scale {r} must be positive")));
    }
    if r * sigma.half_width > l {
        return Err(Error::ScaleTooLarge(r));
    }
    let n = curve.len();
    let z: Vec<Complex64> = curve.nodes().iter().map(|&p| spectral::to_complex(p)).collect();
    let mut c = spectral::forward(&z);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = spectral::wavenumber(j, n) as f64;
        *cj *= sigma.fourier(std::f64::consts::TAU * k * r / l);
    }
    let nodes = spectral::inverse(&c).into_iter().map(spectral::to_vec2).collect();
    ClosedCurve::from_nodes(nodes)
}

/// Which smallness threshold the input distance satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentRegime {
    Theoretical,
    Practical,
    Unverified,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlignmentResult {
    /// Arclength on the second curve assigned to each node of the first, in `[0, ℓ₂)`.
    pub phi: Vec<f64>,
    pub residual: f64,
    pub phi_prime_range: (f64, f64),
    pub r: f64,
    pub frechet: f64,
    pub r1: f64,
    pub r2: f64,
    pub delta_theoretical: f64,
    pub delta_practical: f64,
    pub regime: AlignmentRegime,
    /// Largest number of flow steps used by any node.
    pub steps: usize,
    /// Every accepted flow step kept the node distance non-increasing.
    pub monotone_decrease: bool,
    /// Node residuals obeyed `|∂_tη^t| ≤ e^{-t/2}|∂_tη^0|`.
    pub decay_ok: bool,
}

pub const ALIGN_TOL: f64 = 1e-8;
pub const MAX_FLOW_STEPS: usize = 10_000;

/// Lifted arclength → value and s-derivatives on a curve of length `l`.
struct ArcEval<'a> {
    interp: &'a Interpolant,
    l: f64,
}

impl ArcEval<'_> {
    fn eval(&self, s: f64) -> (Vec2, Vec2, Vec2) {
        let (p, d1, d2) = self.interp.eval3((s / self.l).rem_euclid(1.0));
        (
            spectral::to_vec2(p),
            spectral::to_vec2(d1) * (1.0 / self.l),
            spectral::to_vec2(d2) * (1.0 / (self.l * self.l)),
        )
    }
}

/// `(R₁, R₂)` for the pair and the two smallness thresholds.
pub fn alignment_thresholds(c1: &ClosedCurve, c2: &ClosedCurve) -> Result<(f64, f64, f64, f64)> {
    let r1 = c1.length()?;
    let h1 = h2_seminorm(c1)?;
    let h2 = h2_seminorm(c2)?;
    let win = h2.powi(-2).min(0.5 * c2.length()?);
    let r2sq = (h1 * h1).max(1.0 / self_distance(c2, win)?);
    let theo = (1.0 / (512.0 * r2sq)).min(1.0 / (2f64.powi(56) * 3f64.powi(10) * r1.powi(6) * r2sq.powi(7)));
    let prac = 1e-3 * r1.min(1.0 / r2sq);
    Ok((r1, r2sq.sqrt(), theo, prac))
}

/// Monotone initial map from the discrete Fréchet coupling, lightly smoothed.
fn initial_map(c1: &ClosedCurve, c2: &ClosedCurve, l2: f64) -> Vec<f64> {
    let (n, m) = (c1.len(), c2.len());
    let coupling = frechet_coupling(c1, c2);
    let mut sum = vec![0.0; n];
    let mut cnt = vec![0usize; n];
    for &(i, j) in &coupling.path {
        if i < n {
            sum[i] += j as f64;
            cnt[i] += 1;
        }
    }
    let ds2 = l2 / m as f64;
    let raw: Vec<f64> = (0..n).map(|i| sum[i] / cnt[i] as f64 * ds2).collect();
    let lifted = |i: i64| {
        let q = i.div_euclid(n as i64);
        raw[i.rem_euclid(n as i64) as usize] + q as f64 * l2
    };
    const W: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
    (0..n as i64)
        .map(|i| (0..5).map(|k| W[k] * lifted(i + k as i64 - 2)).sum::<f64>() / 16.0)
        .collect()
}

/// Alignment homeomorphism between two constant-speed curves: the limit of
/// `∂_tη = (γ̂₁ − γ̂₂∘η)·∂_sγ̂₂∘η` started from a Fréchet coupling, where `γ̂ᵢ` are the
/// curves mollified at scale `r = 64‖γ₂‖²_{Ḣ²} d_F² / ℓ₁`.
pub fn align(c1: &ClosedCurve, c2: &ClosedCurve) -> Result<AlignmentResult> {
    let l1 = c1.length()?;
    let l2 = c2.length()?;
    let (r1, r2, delta_theoretical, delta_practical) = alignment_thresholds(c1, c2)?;
    let frechet = crate::metrics::frechet_distance(c1, c2);
    let regime = if frechet <= delta_theoretical {
        AlignmentRegime::Theoretical
    } else if frechet <= delta_practical {
        AlignmentRegime::Practical
    } else {
        AlignmentRegime::Unverified
    };
    let r = 64.0 * h2_seminorm(c2)?.powi(2) * frechet * frechet / l1;
    let sigma = Mollifier::for_length(l1);
    let (hat1, hat2) = if r > 0.0 {
        (mollify_curve(c1, r, &sigma)?, mollify_curve(c2, r, &sigma)?)
    } else {
        (c1.clone(), c2.clone())
    };
    let interp2 = hat2.interpolant();
    let g2 = ArcEval { interp: &interp2, l: l2 };
    let psi = initial_map(c1, c2, l2);
    let force = |target: Vec2, eta: f64| {
        let (p, d1, _) = g2.eval(eta);
        ((target - p).dot(d1), (target - p).norm())
    };
    let mut eta = psi;
    let mut steps = 0usize;
    let mut monotone = true;
    let mut decay_ok = true;
    let mut residual = 0.0f64;
    for (i, &target) in hat1.nodes().iter().enumerate() {
        let mut e = eta[i];
        let (f0, mut dist) = force(target, e);
        let mut f = f0;
        let mut dt = 0.5;
        let mut t = 0.0;
        let mut k = 0;
        while f.abs() > ALIGN_TOL && k < MAX_FLOW_STEPS {
            let k1 = f;
            let k2 = force(target, e + 0.5 * dt * k1).0;
            let k3 = force(target, e + 0.5 * dt * k2).0;
            let k4 = force(target, e + dt * k3).0;
            let cand = e + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
            let (fc, dc) = force(target, cand);
            if dc > dist * (1.0 + 1e-14) + 1e-300 {
                dt *= 0.5;
                if dt < 1e-12 {
                    monotone = false;
                    break;
                }
                continue;
            }
            e = cand;
            f = fc;
            dist = dc;
            t += dt;
            k += 1;
            if f.abs() > (-0.5 * t).exp() * f0.abs() * 1.02 + 1e-15 {
                decay_ok = false;
            }
        }
        eta[i] = e;
        steps = steps.max(k);
        residual = residual.max(f.abs());
    }
    if residual > ALIGN_TOL {
        return Err(Error::FlowStalled(residual));
    }
    let n = c1.len();
    let ds1 = l1 / n as f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let next = if i + 1 < n { eta[i + 1] } else { eta[0] + l2 };
        let d = (next - eta[i]) / ds1;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !(lo > 0.0) {
        return Err(Error::MonotonicityLost);
    }
    Ok(AlignmentResult {
        phi: eta.iter().map(|e| e.rem_euclid(l2)).collect(),
        residual,
        phi_prime_range: (lo, hi),
        r,
        frechet,
        r1,
        r2,
        delta_theoretical,
        delta_practical,
        regime,
        steps,
        monotone_decrease: monotone,
        decay_ok,
    })
}

/// For each node of `c1`, the arclength on `c2` of a nearest point. The nearest polygon
/// segment is chosen first (smallest arclength on ties) and then refined on the
/// interpolant.
pub fn nearest_point_map(c1: &ClosedCurve, c2: &ClosedCurve) -> Result<Vec<f64>> {
    let l2 = c2.length()?;
    let m = c2.len() as f64;
    let interp = c2.interpolant();
    Ok(c1
        .nodes()
        .iter()
        .map(|&x| {
            let (_, seg, t) = point_polyline_distance(c2, x);
            let xi0 = (seg as f64 + t) / m;
            let (dr, xi) = project_onto(&interp, x, xi0);
            let xi = if dr <= interp.eval(xi0).dist(x) { xi } else { xi0 };
            xi.rem_euclid(1.0) * l2
        })
        .collect())
}

/// Discretized alignment properties: sup bound, derivative bounds, tangential L² bound
/// and locality against the nearest-point map.
#[derive(Clone, Debug, Serialize)]
pub struct AlignmentCheck {
    pub sup_dev: f64,
    pub sup_bound: f64,
    pub tangential_l2: f64,
    pub tangential_bound: f64,
    /// Worst ratio `|s' − φ(s)| / (3 d + 342 R₂² d_F² + grid)`.
    pub locality_ratio: f64,
    /// `[sup, derivative, tangential, locality]`.
    pub passed: [bool; 4],
}

pub fn check_alignment(c1: &ClosedCurve, c2: &ClosedCurve, res: &AlignmentResult, slack: f64) -> Result<AlignmentCheck> {
    let l1 = c1.length()?;
    let l2 = c2.length()?;
    let interp = c2.interpolant();
    let g2 = ArcEval { interp: &interp, l: l2 };
    let ds1 = l1 / c1.len() as f64;
    let mut sup_dev = 0.0f64;
    let mut l2_dev = 0.0;
    let mut l2_tan = 0.0;
    for (x, &s) in c1.nodes().iter().zip(&res.phi) {
        let (p, d1, _) = g2.eval(s);
        let diff = *x - p;
        sup_dev = sup_dev.max(diff.norm());
        l2_dev += diff.norm2() * ds1;
        l2_tan += diff.dot(d1).powi(2) * ds1;
    }
    let (l2_dev, tangential_l2) = (l2_dev.sqrt(), l2_tan.sqrt());
    let sup_bound = 2.0 * res.frechet;
    let tangential_bound = 1e5 * res.r1.powf(0.9) * res.r2.powf(4.2) * l2_dev.powf(1.8);
    let near = nearest_point_map(c1, c2)?;
    let grid = l2 / c2.len() as f64;
    let mut locality_ratio = 0.0f64;
    for ((x, &sp), &ph) in c1.nodes().iter().zip(&near).zip(&res.phi) {
        let d = g2.eval(sp).0.dist(*x);
        let gap = (sp - ph).rem_euclid(l2);
        let gap = gap.min(l2 - gap);
        let bound = 3.0 * d + 342.0 * res.r2 * res.r2 * res.frechet.powi(2) + grid;
        locality_ratio = locality_ratio.max(gap / bound);
    }
    let (lo, hi) = res.phi_prime_range;
    let passed = [
        sup_dev <= sup_bound * (1.0 + slack) + 1e-12,
        lo >= (1.0 / 3.0) / (1.0 + slack) && hi <= 3.0 * (1.0 + slack),
        tangential_l2 <= tangential_bound * (1.0 + slack) + 1e-12,
        locality_ratio <= 1.0 + slack,
    ];
    Ok(AlignmentCheck { sup_dev, sup_bound, tangential_l2, tangential_bound, locality_ratio, passed })
}
