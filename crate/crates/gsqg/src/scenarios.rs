//! Initial data: analytic and random shapes, the inward perturbation with its
//! admissible size, nested-family separation, and reflected four-patch families.

use crate::bump;
use crate::curve::{
    c1beta_seminorm, geometry_fields, h2_seminorm, is_positively_oriented, resample_constant_speed,
    winding_number, ClosedCurve,
};
use crate::error::{Error, Result};
use crate::metrics::{
    classify_relation, frechet_distance, max_spacing, pair_distance, self_crossing, self_distance,
    RelationClass,
};
use crate::vec2::Vec2;
use crate::velocity::PatchFamily;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Analytic boundary shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Circle {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: [f64; 2],
        /// Rotation of the major axis, radians.
        #[serde(default)]
        angle: f64,
    },
    /// Polar graph `r(θ) = r0 + Σ_k cos[k-1]·cos(kθ) + sin[k-1]·sin(kθ)`.
    Fourier {
        r0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
        #[serde(default)]
        center: [f64; 2],
    },
}

fn sample(n: usize, f: impl Fn(f64) -> Vec2) -> Vec<Vec2> {
    (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect()
}

/// Positively oriented, simple, constant-speed curve with `n` nodes.
pub fn make_shape(shape: &Shape, n: usize) -> Result<ClosedCurve> {
    let curve = match shape {
        Shape::Circle { radius, center } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidInput("radius must be positive".into()));
            }
            let c = Vec2::from(*center);
            let raw = ClosedCurve::from_nodes(sample(n, |t| {
                c + Vec2::new(radius * t.cos(), radius * t.sin())
            }))?;
            geometry_fields(&raw)?
        }
        Shape::Ellipse { a, b, center, angle } => {
            if !(*a > 0.0 && *b > 0.0) {
                return Err(Error::InvalidInput("semi-axes must be positive".into()));
            }
            let c = Vec2::from(*center);
            let (sa, ca) = angle.sin_cos();
            let m = (4 * n).max(256);
            let raw = ClosedCurve::from_nodes(sample(m, |t| {
                let p = Vec2::new(a * t.cos(), b * t.sin());
                c + Vec2::new(ca * p.x - sa * p.y, sa * p.x + ca * p.y)
            }))?;
            resample_constant_speed(&raw, n)?
        }
        Shape::Fourier { r0, cos, sin, center } => {
            let c = Vec2::from(*center);
            let r = |t: f64| {
                r0 + cos.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * t).cos()).sum::<f64>()
                    + sin.iter().enumerate().map(|(k, b)| b * ((k + 1) as f64 * t).sin()).sum::<f64>()
            };
            let m = (4 * n).max(256);
            if (0..8 * m).any(|j| r(TAU * j as f64 / (8 * m) as f64) <= 0.0) {
                return Err(Error::NotSimple);
            }
            let raw = ClosedCurve::from_nodes(sample(m, |t| c + Vec2::new(t.cos(), t.sin()) * r(t)))?;
            resample_constant_speed(&raw, n)?
        }
    };
    if !is_positively_oriented(&curve) || self_crossing(&curve) {
        return Err(Error::NotSimple);
    }
    Ok(curve)
}

/// Random polar curve `1 + Σ_{k≤kmax} a_k cos kθ + b_k sin kθ` with coefficients uniform
/// in `[-amp/k², amp/k²]`.
pub fn random_fourier_shape(rng: &mut impl Rng, kmax: usize, amp: f64) -> Shape {
    let mut cos = Vec::with_capacity(kmax);
    let mut sin = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let bound = amp / (k * k) as f64;
        cos.push(rng.gen_range(-bound..=bound));
        sin.push(rng.gen_range(-bound..=bound));
    }
    Shape::Fourier { r0: 1.0, cos, sin, center: [0.0, 0.0] }
}

/// Admissible size and ingredients of the inward perturbation.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationBound {
    /// `‖γ‖_{Ċ^{1,1/2}}` (discrete).
    pub c1half: f64,
    /// Number of partition intervals.
    pub parts: usize,
    /// Partition constant measured from the constructed functions.
    pub m_const: f64,
    pub delta_h: f64,
    pub eps0: f64,
}

/// Normalized partition function `Φ(u) = ψ(u) / Σ_j ψ(u − j)` for unit spacing.
fn partition_profile(u: f64) -> f64 {
    let num = bump::bump(u);
    if num == 0.0 {
        return 0.0;
    }
    let den: f64 = (-2..=2).map(|j| bump::bump(u - j as f64)).sum();
    num / den
}

/// `(sup|Φ'|, ‖Φ''‖_{L²})` by finite differences on a fine grid.
fn partition_derivative_norms() -> (f64, f64) {
    let m = 20_000;
    let h = 2.0 / m as f64;
    let mut sup1 = 0.0f64;
    let mut l2 = 0.0;
    for i in 0..=m {
        let u = -1.0 + i as f64 * h;
        let (a, b, c) = (partition_profile(u - h), partition_profile(u), partition_profile(u + h));
        sup1 = sup1.max(((c - a) / (2.0 * h)).abs());
        l2 += ((c - 2.0 * b + a) / (h * h)).powi(2) * h;
    }
    (sup1, l2.sqrt())
}

pub fn perturbation_bound(curve: &ClosedCurve, h: f64, c: f64) -> Result<PerturbationBound> {
    let g = curve.geometry()?;
    let c1half = c1beta_seminorm(curve, 0.5)?;
    let hmax = c1half.powi(-2);
    if !(h > 0.0 && h <= hmax * (1.0 + 1e-12)) {
        return Err(Error::InvalidWindow { h, max: hmax });
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidInput(format!("factor c = {c} outside (0, 1]")));
    }
    let l = g.length;
    let parts = (16.0 * l * c1half * c1half).ceil() as usize;
    let d = l / parts as f64;
    let (sup1, l2) = partition_derivative_norms();
    let m_const = (sup1 / d / c1half.powi(2)).max(l2 * d.powf(-1.5) / c1half.powi(3));
    let delta_h = self_distance(curve, h.min(0.5 * l))?;
    let eps0 = (c * delta_h / 10.0).min(1.0 / (17.0 * m_const * l * c1half.powi(4)));
    Ok(PerturbationBound { c1half, parts, m_const, delta_h, eps0 })
}

/// Pushes the curve inward by `eps Σ_k φ_k(s) N(s_k)` for a smooth partition of unity
/// subordinate to equal arclength intervals. The result keeps the node correspondence
/// with the input and is returned as a general parametrization.
pub fn perturb_inward(curve: &ClosedCurve, h: f64, c: f64, eps: f64) -> Result<ClosedCurve> {
    let bound = perturbation_bound(curve, h, c)?;
    if eps > bound.eps0 * (1.0 + 1e-12) || !(eps >= 0.0) {
        return Err(Error::PerturbationTooLarge { eps, eps0: bound.eps0 });
    }
    let g = curve.geometry()?;
    let n = curve.len();
    let l = g.length;
    let parts = bound.parts;
    let d = l / parts as f64;
    let interp_n = crate::spectral::Interpolant::new(&g.normals);
    let centers: Vec<Vec2> =
        (0..parts).map(|k| interp_n.eval(k as f64 / parts as f64)).map(|v| v * (1.0 / v.norm())).collect();
    let nodes = curve
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let u = i as f64 * g.ds() / d;
            let k0 = u.floor() as i64;
            let mut shift = Vec2::ZERO;
            for k in k0 - 1..=k0 + 2 {
                let w = partition_profile(u - k as f64);
                if w > 0.0 {
                    shift += centers[k.rem_euclid(parts as i64) as usize] * w;
                }
            }
            p + shift * eps
        })
        .collect();
    let _ = n;
    ClosedCurve::from_nodes(nodes)
}

/// Outcome of checking the four properties of an inward perturbation.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationCheck {
    pub frechet: f64,
    pub inside: bool,
    pub separation: f64,
    pub separation_floor: f64,
    pub h2_ratio: f64,
    pub window_ratio: f64,
    pub passed: [bool; 4],
}

/// Verifies closeness, inward separation, Ḣ² growth and window separation of
/// `out = perturb_inward(curve, h, c, eps)`.
pub fn check_perturbation(
    curve: &ClosedCurve,
    out: &ClosedCurve,
    h: f64,
    c: f64,
    eps: f64,
) -> Result<PerturbationCheck> {
    let frechet = frechet_distance(out, curve);
    let res = resample_constant_speed(out, curve.len())?;
    let inside = res.nodes().iter().all(|&p| winding_number(curve, p).map(|w| w == 1).unwrap_or(false));
    let separation = pair_distance(&res, curve);
    // Polygon sagitta bounds the discretization error of the separation.
    let tol = |c: &ClosedCurve| {
        let g = c.geometry().unwrap();
        let k = g.curvature.iter().fold(0.0f64, |a, k| a.max(k.abs()));
        k * max_spacing(c).powi(2) / 8.0
    };
    let grid = tol(curve) + tol(&res);
    let separation_floor = eps / 4.0 - grid;
    let h2_ratio = h2_seminorm(&res)? / h2_seminorm(curve)?;
    let lo = self_distance(curve, h)?;
    let win = (c * h).min(0.5 * res.length()?);
    let window_ratio = self_distance(&res, win)? / ((2.0 * c / 7.0) * lo);
    let passed = [
        frechet <= eps * (1.0 + 1e-9) + 1e-14,
        inside && separation >= separation_floor,
        h2_ratio <= 4.0 * 1.01,
        window_ratio >= 0.99,
    ];
    Ok(PerturbationCheck { frechet, inside, separation, separation_floor, h2_ratio, window_ratio, passed })
}

/// Separates a nested family of same-sign boundaries: curves are ordered by
/// containment (innermost first) and shrunk inward by `eps, eps/5, eps/25, …` with
/// `c = 1/16` and the largest admissible window. Returns curves in input order.
pub fn separate_nested(curves: &[ClosedCurve], eps: f64) -> Result<Vec<ClosedCurve>> {
    let k = curves.len();
    // Depth = number of other curves containing this one.
    let mut depth = vec![0usize; k];
    for i in 0..k {
        for j in 0..k {
            if i != j && classify_relation(&curves[i], &curves[j]) == RelationClass::Nested1In2 {
                depth[i] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|a, b| depth[*b].cmp(&depth[*a]).then(a.cmp(b)));
    let mut out: Vec<Option<ClosedCurve>> = vec![None; k];
    let mut scale = eps;
    for idx in order {
        let c = &curves[idx];
        let h = c1beta_seminorm(c, 0.5)?.powi(-2);
        let moved = perturb_inward(c, h, 1.0 / 16.0, scale)?;
        out[idx] = Some(resample_constant_speed(&moved, c.len())?);
        scale /= 5.0;
    }
    Ok(out.into_iter().map(|c| c.expect("every index visited")).collect())
}

/// Reflection across the horizontal axis, renumbered so the result stays positively
/// oriented with node 0 mapped to node 0.
pub fn reflect_x2(curve: &ClosedCurve) -> Result<ClosedCurve> {
    let p = curve.nodes();
    let n = p.len();
    let nodes = (0..n).map(|j| {
        let q = p[(n - j) % n];
        Vec2::new(q.x, -q.y)
    });
    let raw = ClosedCurve::from_nodes(nodes.collect())?;
    geometry_fields(&raw)
}

/// Reflection across the vertical axis, renumbered like [`reflect_x2`].
pub fn reflect_x1(curve: &ClosedCurve) -> Result<ClosedCurve> {
    let p = curve.nodes();
    let n = p.len();
    let nodes = (0..n).map(|j| {
        let q = p[(n - j) % n];
        Vec2::new(-q.x, q.y)
    });
    let raw = ClosedCurve::from_nodes(nodes.collect())?;
    geometry_fields(&raw)
}

/// Each base patch followed, after all of them, by its mirror image below the axis
/// carrying the negated strength.
pub fn doubly_odd_config(base: &[(ClosedCurve, f64)]) -> Result<PatchFamily> {
    let mut curves = Vec::with_capacity(2 * base.len());
    let mut strengths = Vec::with_capacity(2 * base.len());
    for (c, _) in base {
        let ymin = c.nodes().iter().fold(f64::INFINITY, |a, p| a.min(p.y));
        if ymin < -1e-12 {
            return Err(Error::OutOfHalfPlane(ymin));
        }
    }
    for (c, t) in base {
        curves.push(c.clone());
        strengths.push(*t);
    }
    for (c, t) in base {
        let r = reflect_x2(c)?;
        let n = c.len();
        let err = (0..n)
            .map(|j| {
                let q = c.nodes()[(n - j) % n];
                r.nodes()[j].dist(Vec2::new(q.x, -q.y))
            })
            .fold(0.0, f64::max);
        debug_assert!(err <= 1e-10);
        curves.push(r);
        strengths.push(-t);
    }
    PatchFamily::new(curves, strengths)
}

/// Parameters of the built-in four-patch candidate: two circles above the axis,
/// mirror images of each other across the vertical axis with opposite strengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoublyOddPreset {
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Gap between the two upper patches along the axis.
    #[serde(default = "default_separation")]
    pub separation: f64,
    /// Gap between each upper patch and the horizontal axis.
    #[serde(default = "default_axis_gap")]
    pub axis_gap: f64,
    #[serde(default = "default_strength")]
    pub strength: f64,
    /// List the left patch first.
    #[serde(default)]
    pub swap_halves: bool,
}

fn default_radius() -> f64 {
    0.5
}
fn default_separation() -> f64 {
    0.4
}
fn default_axis_gap() -> f64 {
    0.2
}
fn default_strength() -> f64 {
    1.0
}

impl Default for DoublyOddPreset {
    fn default() -> Self {
        DoublyOddPreset {
            radius: default_radius(),
            separation: default_separation(),
            axis_gap: default_axis_gap(),
            strength: default_strength(),
            swap_halves: false,
        }
    }
}

impl DoublyOddPreset {
    /// Upper-half base list: the right patch with `+strength` and its mirror on the
    /// left with `−strength`.
    pub fn base(&self, n: usize) -> Result<Vec<(ClosedCurve, f64)>> {
        let cx = 0.5 * self.separation + self.radius;
        let cy = self.axis_gap + self.radius;
        let right = make_shape(&Shape::Circle { radius: self.radius, center: [cx, cy] }, n)?;
        let left = reflect_x1(&right)?;
        let mut base = vec![(right, self.strength), (left, -self.strength)];
        if self.swap_halves {
            base.swap(0, 1);
        }
        Ok(base)
    }

    pub fn family(&self, n: usize) -> Result<PatchFamily> {
        doubly_odd_config(&self.base(n)?)
    }
}
