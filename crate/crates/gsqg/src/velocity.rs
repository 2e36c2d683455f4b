//! The g-SQG kernel, its cutoff, and boundary-integral evaluation of the patch velocity.

use crate::bump;
use crate::curve::{is_positively_oriented, ClosedCurve, Geometry};
use crate::error::{Error, Result};
use crate::metrics::{max_spacing, point_polyline_distance, self_crossing};
use crate::spectral;
use crate::spline::gauss_legendre8;
use crate::vec2::Vec2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Kernel parameters: `K(x) = c_α / (2α |x|^{2α})`, `K_ε(x) = χ(|x|/ε) K(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub alpha: f64,
    pub c_alpha: f64,
    pub epsilon: f64,
    /// χ vanishes on `[0, chi_floor]` and equals 1 on `[1, ∞)`.
    pub chi_floor: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec { alpha: 1.0 / 6.0, c_alpha: 1.0, epsilon: 0.0, chi_floor: 0.5 }
    }
}

impl KernelSpec {
    pub fn new(alpha: f64, c_alpha: f64, epsilon: f64) -> Result<Self> {
        let s = KernelSpec { alpha, c_alpha, epsilon, ..Default::default() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        KernelSpec { epsilon, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::InvalidInput(format!("alpha {} outside (0, 1/2)", self.alpha)));
        }
        if !(self.c_alpha > 0.0) || !(self.epsilon >= 0.0) {
            return Err(Error::InvalidInput("c_alpha must be > 0 and epsilon >= 0".into()));
        }
        if !(self.chi_floor > 0.0 && self.chi_floor < 1.0) {
            return Err(Error::InvalidInput("chi_floor must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Cutoff profile χ(t).
    pub fn chi(&self, t: f64) -> f64 {
        bump::smooth_step((t.abs() - self.chi_floor) / (1.0 - self.chi_floor))
    }

    pub fn chi_deriv(&self, t: f64) -> f64 {
        let w = 1.0 - self.chi_floor;
        bump::smooth_step_deriv((t.abs() - self.chi_floor) / w) / w * t.signum()
    }

    /// `C_α = 2π^{1/2+α}/(1−2α)` from the uniform velocity bound.
    pub fn velocity_bound_constant(&self) -> f64 {
        2.0 * std::f64::consts::PI.powf(0.5 + self.alpha) / (1.0 - 2.0 * self.alpha)
    }

    /// `K_ε` as a function of `r² = |x|²`; callers guarantee `r² > 0` when ε = 0.
    #[inline]
    fn k_of_r2(&self, r2: f64) -> f64 {
        let k = self.c_alpha / (2.0 * self.alpha) * r2.powf(-self.alpha);
        if self.epsilon > 0.0 {
            let eps2 = self.epsilon * self.epsilon;
            if r2 >= eps2 {
                k
            } else if r2 <= eps2 * self.chi_floor * self.chi_floor {
                0.0
            } else {
                k * self.chi(r2.sqrt() / self.epsilon)
            }
        } else {
            k
        }
    }

    /// `∇K_ε(x)`.
    #[inline]
    fn grad(&self, x: Vec2) -> Vec2 {
        let r2 = x.norm2();
        let k = self.c_alpha / (2.0 * self.alpha) * r2.powf(-self.alpha);
        let gk = x * (-2.0 * self.alpha * k / r2);
        if self.epsilon > 0.0 {
            let eps2 = self.epsilon * self.epsilon;
            if r2 >= eps2 {
                gk
            } else if r2 <= eps2 * self.chi_floor * self.chi_floor {
                Vec2::ZERO
            } else {
                let r = r2.sqrt();
                let t = r / self.epsilon;
                gk * self.chi(t) + x * (self.chi_deriv(t) / self.epsilon * k / r)
            }
        } else {
            gk
        }
    }
}

/// `K_ε(x)`.
pub fn kernel_eval(spec: &KernelSpec, x: Vec2) -> Result<f64> {
    let r2 = x.norm2();
    if r2 == 0.0 {
        return if spec.epsilon > 0.0 { Ok(0.0) } else { Err(Error::SingularEvaluation) };
    }
    Ok(spec.k_of_r2(r2))
}

/// `∇K_ε(x)`.
pub fn kernel_grad(spec: &KernelSpec, x: Vec2) -> Result<Vec2> {
    if x.norm2() == 0.0 {
        return if spec.epsilon > 0.0 { Ok(Vec2::ZERO) } else { Err(Error::SingularEvaluation) };
    }
    Ok(spec.grad(x))
}

/// Indexed boundaries with nonzero strengths.
#[derive(Clone, Debug)]
pub struct PatchFamily {
    pub curves: Vec<ClosedCurve>,
    pub strengths: Vec<f64>,
}

impl PatchFamily {
    /// Requires constant-speed, positively oriented, non-self-crossing curves and
    /// nonzero strengths.
    pub fn new(curves: Vec<ClosedCurve>, strengths: Vec<f64>) -> Result<Self> {
        if curves.len() != strengths.len() || curves.is_empty() {
            return Err(Error::InvalidInput("need one strength per curve".into()));
        }
        if strengths.iter().any(|t| !(t.abs() > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidInput("strengths must be finite and nonzero".into()));
        }
        for c in &curves {
            c.geometry()?;
            if !is_positively_oriented(c) {
                return Err(Error::InvalidInput("curves must be positively oriented".into()));
            }
            if self_crossing(c) {
                return Err(Error::NotSimple);
            }
        }
        Ok(PatchFamily { curves, strengths })
    }

    /// Skips validation; used for intermediate Runge–Kutta stages.
    pub(crate) fn new_unchecked(curves: Vec<ClosedCurve>, strengths: Vec<f64>) -> Self {
        PatchFamily { curves, strengths }
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// `|θ| = Σ|θ^λ|`.
    pub fn total_strength(&self) -> f64 {
        self.strengths.iter().map(|t| t.abs()).sum()
    }

    /// `m(θ) = min|θ^λ|`.
    pub fn min_strength(&self) -> f64 {
        self.strengths.iter().fold(f64::INFINITY, |a, t| a.min(t.abs()))
    }

    pub fn scaled(&self, factor: f64) -> PatchFamily {
        PatchFamily {
            curves: self.curves.clone(),
            strengths: self.strengths.iter().map(|t| t * factor).collect(),
        }
    }
}

/// Quadrature data for one source boundary: nodes and ξ-derivatives, plus the
/// half-shifted copies used on its own nodes when ε = 0.
struct Source {
    theta: f64,
    nodes: Vec<Vec2>,
    d1: Vec<Vec2>,
    mid: Vec<Vec2>,
    mid_d1: Vec<Vec2>,
}

impl Source {
    fn new(c: &ClosedCurve, theta: f64, staggered: bool) -> Source {
        let nodes = c.nodes().to_vec();
        let d1 = spectral::derivative(&nodes, 1);
        let (mid, mid_d1) = if staggered {
            (spectral::shift(&nodes, 0.5), spectral::shift(&d1, 0.5))
        } else {
            (Vec::new(), Vec::new())
        };
        Source { theta, nodes, d1, mid, mid_d1 }
    }

    fn weight(&self) -> f64 {
        -self.theta / self.nodes.len() as f64
    }
}

/// Riemann ζ(s) for real s ≠ 1 via Borwein's alternating-series acceleration.
pub fn riemann_zeta(s: f64) -> f64 {
    let n = 40usize;
    let mut d = vec![0.0f64; n + 1];
    let mut term = 1.0f64;
    let mut acc = term;
    d[0] = acc;
    for i in 1..=n {
        term *= 4.0 * (n + i - 1) as f64 * (n - i + 1) as f64 / ((2 * i) as f64 * (2 * i - 1) as f64);
        acc += term;
        d[i] = acc;
    }
    let mut sum = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - d[n]) / ((k + 1) as f64).powf(s);
    }
    let eta = -sum / d[n];
    eta / (1.0 - 2f64.powf(1.0 - s))
}

/// Hurwitz ζ(s, 1/2) = (2^s − 1) ζ(s).
pub fn hurwitz_zeta_half(s: f64) -> f64 {
    (2f64.powf(s) - 1.0) * riemann_zeta(s)
}

/// Precomputed sources for repeated velocity evaluation over one family.
pub struct VelocityField<'a> {
    spec: &'a KernelSpec,
    sources: Vec<Source>,
    /// Per source curve: ζ-correction factor multiplying `|z'_i|^{-2α} z'_i` on its own nodes.
    self_corr: Vec<f64>,
}

impl<'a> VelocityField<'a> {
    pub fn new(family: &PatchFamily, spec: &'a KernelSpec) -> Self {
        let staggered = spec.epsilon == 0.0;
        let sources: Vec<Source> = family
            .curves
            .iter()
            .zip(&family.strengths)
            .map(|(c, &t)| Source::new(c, t, staggered))
            .collect();
        let a = 2.0 * spec.alpha;
        let zeta = if staggered { hurwitz_zeta_half(a) } else { 0.0 };
        let self_corr = sources
            .iter()
            .map(|s| {
                let h = 1.0 / s.nodes.len() as f64;
                // Leading error of the offset midpoint rule for |ξ|^{-2α} g(ξ), divided by
                // the rule's weight h.
                2.0 * zeta * h.powf(-a) * spec.c_alpha / a
            })
            .collect();
        VelocityField { spec, sources, self_corr }
    }

    #[inline]
    fn sum_nodes(&self, x: Vec2, pts: &[Vec2], der: &[Vec2]) -> Vec2 {
        let mut acc = Vec2::ZERO;
        for (p, d) in pts.iter().zip(der) {
            let r2 = (x - *p).norm2();
            if r2 > 0.0 {
                acc += *d * self.spec.k_of_r2(r2);
            }
        }
        acc
    }

    /// Trapezoid evaluation at an arbitrary point.
    pub fn at(&self, x: Vec2) -> Vec2 {
        let mut u = Vec2::ZERO;
        for s in &self.sources {
            u += self.sum_nodes(x, &s.nodes, &s.d1) * s.weight();
        }
        u
    }

    /// Velocity at node `i` of boundary `lam`.
    fn on_node(&self, lam: usize, i: usize) -> Vec2 {
        let x = self.sources[lam].nodes[i];
        let mut u = Vec2::ZERO;
        for (mu, s) in self.sources.iter().enumerate() {
            if mu == lam && self.spec.epsilon == 0.0 {
                let raw = self.sum_nodes(x, &s.mid, &s.mid_d1);
                let d = s.d1[i];
                let corr = d * (self.self_corr[mu] * d.norm().powf(-2.0 * self.spec.alpha));
                u += (raw - corr) * s.weight();
            } else {
                u += self.sum_nodes(x, &s.nodes, &s.d1) * s.weight();
            }
        }
        u
    }

    pub fn on_boundary(&self, lam: usize) -> Vec<Vec2> {
        let n = self.sources[lam].nodes.len();
        (0..n).into_par_iter().map(|i| self.on_node(lam, i)).collect()
    }

    /// Boundary velocities of all curves.
    pub fn on_all_boundaries(&self) -> Vec<Vec<Vec2>> {
        (0..self.sources.len()).map(|l| self.on_boundary(l)).collect()
    }

    /// `∂_s(u∘z^λ)` at the nodes of boundary `lam`, from the kernel-gradient formula.
    pub fn tangential_derivative(&self, lam: usize, geom: &Geometry) -> Vec<Vec2> {
        let n = self.sources[lam].nodes.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let x = self.sources[lam].nodes[i];
                let t = geom.tangents[i];
                let mut acc = Vec2::ZERO;
                for (mu, s) in self.sources.iter().enumerate() {
                    let (pts, der) = if mu == lam && self.spec.epsilon == 0.0 {
                        (&s.mid, &s.mid_d1)
                    } else {
                        (&s.nodes, &s.d1)
                    };
                    let mut part = Vec2::ZERO;
                    for (p, d) in pts.iter().zip(der) {
                        let y = x - *p;
                        if y.norm2() > 0.0 {
                            // The ξ-derivative carries the factor |z'| that turns T ds into dξ.
                            part += *d * self.spec.grad(y).dot(t);
                        }
                    }
                    acc += part * s.weight();
                }
                acc
            })
            .collect()
    }
}

/// Contour-integral velocity at an off-boundary point.
pub fn contour_velocity(family: &PatchFamily, spec: &KernelSpec, x: Vec2) -> Result<Vec2> {
    if spec.epsilon == 0.0 {
        for c in &family.curves {
            let d = point_polyline_distance(c, x).0;
            if d <= max_spacing(c) {
                return Err(Error::TooCloseToBoundary(d));
            }
        }
    }
    Ok(VelocityField::new(family, spec).at(x))
}

/// Velocity at every node of boundary `lam`.
pub fn velocity_on_boundary(family: &PatchFamily, spec: &KernelSpec, lam: usize) -> Vec<Vec2> {
    VelocityField::new(family, spec).on_boundary(lam)
}

/// Tangential derivative samples along boundary `lam`.
pub struct TangentialDerivative {
    pub vector: Vec<Vec2>,
    /// `∂_s u · T`.
    pub along: Vec<f64>,
    /// `∂_s u · N`.
    pub across: Vec<f64>,
}

pub fn tangential_derivative(
    family: &PatchFamily,
    spec: &KernelSpec,
    lam: usize,
) -> Result<TangentialDerivative> {
    let geom = family.curves[lam].geometry()?;
    let vector = VelocityField::new(family, spec).tangential_derivative(lam, geom);
    let along = vector.iter().zip(&geom.tangents).map(|(v, t)| v.dot(*t)).collect();
    let across = vector.iter().zip(&geom.normals).map(|(v, n)| v.dot(*n)).collect();
    Ok(TangentialDerivative { vector, along, across })
}

/// Signed triangle `(x, p, q)` contribution of the area integral
/// `∫ (y − x)^⊥ |x − y|^{−2−2α} dy`, integrated along the edge.
fn edge_contribution(x: Vec2, p: Vec2, q: Vec2, alpha: f64) -> Vec2 {
    let w = q - p;
    let c0 = (p - x).cross(w);
    if c0 == 0.0 {
        return Vec2::ZERO;
    }
    let f = |t: f64| {
        let u = p + w * t - x;
        let r2 = u.norm2();
        u.perp() * r2.powf(-1.0 - alpha)
    };
    // Grade panels toward the foot point when x is close to the edge.
    let len = w.norm();
    let dist = (c0 / len).abs();
    let panels = ((len / dist).ceil() as usize).clamp(1, 64);
    let mut acc = Vec2::ZERO;
    for k in 0..panels {
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        acc += Vec2::new(
            gauss_legendre8(a, b, |t| f(t).x),
            gauss_legendre8(a, b, |t| f(t).y),
        );
    }
    acc * (c0 / (1.0 - 2.0 * alpha))
}

/// Area-integral velocity, computed in polar coordinates about `x` over the region
/// bounded by each boundary resampled to at least `resolution` nodes.
///
/// The orientation convention is the one of the contour formula:
/// `u(x) = c_α Σ θ ∫_Ω (y − x)^⊥ / |x − y|^{2+2α} dy`.
pub fn area_velocity(family: &PatchFamily, spec: &KernelSpec, x: Vec2, resolution: usize) -> Vec2 {
    let mut u = Vec2::ZERO;
    for (c, &th) in family.curves.iter().zip(&family.strengths) {
        let m = resolution.max(c.len()).div_ceil(2) * 2;
        let pts = spectral::upsample(c.nodes(), m);
        let mut acc = Vec2::ZERO;
        for i in 0..m {
            acc += edge_contribution(x, pts[i], pts[(i + 1) % m], spec.alpha);
        }
        u += acc * (th * spec.c_alpha);
    }
    u
}
