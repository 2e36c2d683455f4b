//! Closed plane curves on a uniform parameter grid: reparametrization, geometry, norms,
//! orientation and transport.

use crate::error::{Error, Result};
use crate::spectral::{self, Interpolant};
use crate::spline::PeriodicSpline;
use crate::vec2::{point_segment, Vec2};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Relative spread of node speeds accepted for constant-speed curves.
pub const SPEED_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    ConstantSpeed,
    General,
}

/// Arclength-derived fields of a constant-speed curve.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub length: f64,
    pub tangents: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub curvature: Vec<f64>,
    pub speeds: Vec<f64>,
}

impl Geometry {
    /// Arclength spacing between consecutive nodes.
    pub fn ds(&self) -> f64 {
        self.length / self.tangents.len() as f64
    }
}

#[derive(Clone, Debug)]
pub struct ClosedCurve {
    nodes: Vec<Vec2>,
    param_kind: ParamKind,
    geometry: Option<Arc<Geometry>>,
}

/// Samples of a plane vector field at the nodes of a curve.
pub type VectorFieldSamples = Vec<Vec2>;

impl ClosedCurve {
    /// Wraps raw nodes as a general parametrization. Requires an even count of at least 16
    /// and no repeated consecutive nodes.
    pub fn from_nodes(nodes: Vec<Vec2>) -> Result<Self> {
        let n = nodes.len();
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "curve needs an even node count >= 16, got {n}"
            )));
        }
        if nodes.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidInput("non-finite node".into()));
        }
        for i in 0..n {
            if nodes[i] == nodes[(i + 1) % n] {
                return Err(Error::DegenerateCurve(format!("node {i} repeats its successor")));
            }
        }
        Ok(ClosedCurve { nodes, param_kind: ParamKind::General, geometry: None })
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn param_kind(&self) -> ParamKind {
        self.param_kind
    }

    /// Cached geometry; present for every constant-speed curve built by this crate.
    pub fn geometry(&self) -> Result<&Geometry> {
        self.geometry.as_deref().ok_or(Error::WrongParametrization(f64::NAN))
    }

    pub fn length(&self) -> Result<f64> {
        Ok(self.geometry()?.length)
    }

    /// Total length of the node polygon.
    pub fn polygon_length(&self) -> f64 {
        let n = self.nodes.len();
        (0..n).map(|i| self.nodes[i].dist(self.nodes[(i + 1) % n])).sum()
    }

    pub fn diameter_bound(&self) -> f64 {
        let (mut lo, mut hi) = (self.nodes[0], self.nodes[0]);
        for p in &self.nodes {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        hi.dist(lo)
    }

    /// Bounding box `(min, max)`.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        let (mut lo, mut hi) = (self.nodes[0], self.nodes[0]);
        for p in &self.nodes {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn interpolant(&self) -> Interpolant {
        Interpolant::new(&self.nodes)
    }

    /// Same nodes reversed about node 0, i.e. the opposite orientation.
    pub fn reversed(&self) -> ClosedCurve {
        let n = self.nodes.len();
        let nodes = (0..n).map(|j| self.nodes[(n - j) % n]).collect();
        ClosedCurve { nodes, param_kind: ParamKind::General, geometry: None }
    }

    /// Applies `f` to every node, downgrading the parametrization to general.
    pub fn map_nodes(&self, f: impl Fn(Vec2) -> Vec2) -> ClosedCurve {
        ClosedCurve {
            nodes: self.nodes.iter().map(|&p| f(p)).collect(),
            param_kind: ParamKind::General,
            geometry: None,
        }
    }

    /// Cyclic relabelling so that node `k` becomes node 0.
    pub fn rotated(&self, k: usize) -> ClosedCurve {
        let n = self.nodes.len();
        let nodes = (0..n).map(|j| self.nodes[(j + k) % n]).collect();
        let c = ClosedCurve { nodes, param_kind: ParamKind::General, geometry: None };
        match self.param_kind {
            ParamKind::ConstantSpeed => geometry_fields(&c).unwrap_or(c),
            ParamKind::General => c,
        }
    }

    /// Spectral zero-padding onto `m` nodes; keeps constant speed.
    pub fn upsampled(&self, m: usize) -> Result<ClosedCurve> {
        let nodes = spectral::upsample(&self.nodes, m);
        let c = ClosedCurve { nodes, param_kind: self.param_kind, geometry: None };
        match self.param_kind {
            ParamKind::ConstantSpeed => geometry_fields(&c),
            ParamKind::General => Ok(c),
        }
    }
}

fn speeds_of(nodes: &[Vec2]) -> (Vec<Vec2>, Vec<Vec2>, Vec<f64>) {
    let (d1, d2) = spectral::derivatives12(nodes);
    let sp = d1.iter().map(|v| v.norm()).collect();
    (d1, d2, sp)
}

fn spread(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    (hi - lo) / mean
}

/// Fills tangent, normal, curvature and length by spectral differentiation.
/// The input must already be (numerically) constant-speed.
pub fn geometry_fields(curve: &ClosedCurve) -> Result<ClosedCurve> {
    let (d1, d2, speeds) = speeds_of(&curve.nodes);
    let sp = spread(&speeds);
    if !(sp <= SPEED_TOL) {
        return Err(Error::WrongParametrization(sp));
    }
    let n = curve.len();
    let length = speeds.iter().sum::<f64>() / n as f64;
    let mut tangents = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for i in 0..n {
        let s = speeds[i];
        let t = d1[i] * (1.0 / s);
        tangents.push(t);
        normals.push(t.perp());
        curvature.push(d1[i].cross(d2[i]) / (s * s * s));
    }
    let geometry = Geometry { length, tangents, normals, curvature, speeds };
    Ok(ClosedCurve {
        nodes: curve.nodes.clone(),
        param_kind: ParamKind::ConstantSpeed,
        geometry: Some(Arc::new(geometry)),
    })
}

/// True when the Fourier tail of the nodes is negligible, so the trigonometric
/// interpolant is a faithful model of the curve.
fn spectrally_resolved(nodes: &[Vec2]) -> bool {
    let n = nodes.len();
    if n % 2 != 0 || n < 16 {
        return false;
    }
    let c: Vec<Complex64> = nodes.iter().map(|&v| spectral::to_complex(v)).collect();
    let coef = spectral::forward(&c);
    let (mut total, mut tail) = (0.0, 0.0);
    for (j, cj) in coef.iter().enumerate() {
        let k = spectral::wavenumber(j, n).unsigned_abs() as usize;
        if k == 0 {
            continue;
        }
        let e = cj.norm_sqr() * (k * k) as f64;
        total += e;
        if 4 * k > n {
            tail += e;
        }
    }
    tail <= 1e-20 * total
}

/// Maps equispaced arclength targets back to grid parameters of the trigonometric
/// interpolant of `nodes`, and samples it there.
fn spectral_equal_arclength(nodes: &[Vec2], n_out: usize) -> Vec<Vec2> {
    let n = nodes.len();
    let fine = spectral::upsample(nodes, 2 * n);
    let (_, _, sp_fine) = speeds_of(&fine);
    let m = sp_fine.len();
    let sc: Vec<Complex64> = sp_fine.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let a = spectral::forward(&sc);
    let length = a[0].re;
    // s(ξ) = length·ξ + Σ_{k≠0} a_k (e^{2πikξ} − 1)/(2πik), tabulated on the fine grid.
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    let mut b0 = Complex64::new(0.0, 0.0);
    for j in 1..m {
        let k = spectral::wavenumber(j, m);
        if j == m / 2 {
            continue;
        }
        b[j] = a[j] / Complex64::new(0.0, TAU * k as f64);
        b0 -= b[j];
    }
    b[0] = b0;
    let periodic = spectral::inverse(&b);
    let s_tab: Vec<f64> =
        (0..m).map(|j| length * j as f64 / m as f64 + periodic[j].re).collect();
    let s_eval = |xi: f64| -> f64 {
        let w = Complex64::from_polar(1.0, TAU * xi);
        let mut p = Complex64::new(1.0, 0.0);
        let mut acc = b[0];
        let mut q = Complex64::new(1.0, 0.0);
        for k in 1..m / 2 {
            p *= w;
            q *= w.conj();
            acc += b[k] * p + b[m - k] * q;
        }
        length * xi + acc.re
    };
    let interp = Interpolant::new(nodes);
    let mut out = Vec::with_capacity(n_out);
    let mut j0 = 0usize;
    for i in 0..n_out {
        let target = length * i as f64 / n_out as f64;
        while j0 + 1 < m && s_tab[j0 + 1] <= target {
            j0 += 1;
        }
        let (s_lo, s_hi) = (s_tab[j0], if j0 + 1 < m { s_tab[j0 + 1] } else { length });
        let frac = if s_hi > s_lo { (target - s_lo) / (s_hi - s_lo) } else { 0.0 };
        let mut xi = (j0 as f64 + frac) / m as f64;
        if i == 0 {
            xi = 0.0;
        } else {
            for _ in 0..8 {
                let g = s_eval(xi) - target;
                let (_, d) = interp.eval_d1(xi);
                let step = g / d.norm();
                xi -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
        }
        out.push(interp.eval(xi));
    }
    out
}

fn spline_equal_arclength(nodes: &[Vec2], n_out: usize) -> Vec<Vec2> {
    let sp = PeriodicSpline::new(nodes);
    let table = sp.arclength_table();
    let total = table[nodes.len()];
    (0..n_out)
        .map(|i| sp.point_at_arclength(&table, total * i as f64 / n_out as f64))
        .collect()
}

/// Resamples onto `n` nodes equispaced in arclength, keeping node 0 fixed.
///
/// Resolved inputs are inverted on their own trigonometric interpolant. Otherwise a
/// periodic cubic spline in chord length supplies the first pass, followed by spectral
/// polishing when that does not move nodes by more than a small fraction of the spacing.
pub fn resample_constant_speed(curve: &ClosedCurve, n: usize) -> Result<ClosedCurve> {
    if n < 16 || n % 2 != 0 {
        return Err(Error::InvalidInput(format!("target node count {n} must be even and >= 16")));
    }
    let nodes = &curve.nodes;
    let poly = curve.polygon_length();
    let scale = curve.nodes.iter().fold(1.0f64, |a, p| a.max(p.norm()));
    if !(poly > 1e-12 * scale) {
        return Err(Error::DegenerateCurve("polygon length vanishes".into()));
    }
    let mut out = if spectrally_resolved(nodes) {
        spectral_equal_arclength(nodes, n)
    } else {
        spline_equal_arclength(nodes, n)
    };
    for _ in 0..3 {
        let (_, _, speeds) = speeds_of(&out);
        if spread(&speeds) <= 1e-10 {
            break;
        }
        let polished = spectral_equal_arclength(&out, n);
        let h = poly / n as f64;
        let moved = out.iter().zip(&polished).map(|(a, b)| a.dist(*b)).fold(0.0, f64::max);
        let (_, _, sp2) = speeds_of(&polished);
        if moved > 0.05 * h || spread(&sp2) >= spread(&speeds) {
            break;
        }
        out = polished;
    }
    geometry_fields(&ClosedCurve { nodes: out, param_kind: ParamKind::General, geometry: None })
}

/// Ḣ² seminorm `(Σ κ_i² Δs)^{1/2}`.
pub fn h2_seminorm(curve: &ClosedCurve) -> Result<f64> {
    let g = curve.geometry()?;
    Ok((g.curvature.iter().map(|k| k * k).sum::<f64>() * g.ds()).sqrt())
}

/// Discrete Hölder seminorm of the tangent: sup over node pairs of
/// `|T_i − T_j| / d_arc(i, j)^β`. A lower bound of the continuum value.
pub fn c1beta_seminorm(curve: &ClosedCurve, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidExponent(beta));
    }
    let g = curve.geometry()?;
    let n = curve.len();
    let ds = g.ds();
    let inv: Vec<f64> = (0..=n / 2).map(|k| (k as f64 * ds).powf(-beta)).collect();
    let t = &g.tangents;
    let mut best = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let k = (j - i).min(n - (j - i));
            best = best.max((t[i] - t[j]).norm() * inv[k]);
        }
    }
    Ok(best)
}

/// Signed shoelace area; positive for counterclockwise curves.
pub fn enclosed_area(curve: &ClosedCurve) -> f64 {
    let p = &curve.nodes;
    let n = p.len();
    0.5 * (0..n).map(|i| p[i].cross(p[(i + 1) % n])).sum::<f64>()
}

/// Area of the trigonometric interpolant, `½∮ z × z' dξ` by the trapezoid rule.
/// Exact for band-limited curves.
pub fn spectral_area(curve: &ClosedCurve) -> f64 {
    let d1 = crate::spectral::derivative(&curve.nodes, 1);
    0.5 * curve.nodes.iter().zip(&d1).map(|(p, d)| p.cross(*d)).sum::<f64>() / curve.len() as f64
}

pub fn is_positively_oriented(curve: &ClosedCurve) -> bool {
    enclosed_area(curve) > 0.0
}

/// Winding number of the node polygon about `x`.
pub fn winding_number(curve: &ClosedCurve, x: Vec2) -> Result<i64> {
    let p = &curve.nodes;
    let n = p.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = p[i];
        let b = p[(i + 1) % n];
        if point_segment(x, a, b).0 < 1e-10 {
            return Err(Error::PointOnCurve);
        }
        let (u, v) = (a - x, b - x);
        total += u.cross(v).atan2(u.dot(v));
    }
    Ok((total / TAU).round() as i64)
}

/// Moves every node by `h · field(node)`.
pub fn transport(curve: &ClosedCurve, field: impl Fn(Vec2) -> Vec2, h: f64) -> ClosedCurve {
    if h == 0.0 {
        return curve.clone();
    }
    curve.map_nodes(|p| p + field(p) * h)
}

/// On-disk representation of a curve.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub nodes: Vec<Vec2>,
    pub param_kind: ParamKind,
    pub closed: bool,
}

impl ClosedCurve {
    pub fn to_file(&self) -> CurveFile {
        CurveFile { nodes: self.nodes.clone(), param_kind: self.param_kind, closed: true }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("curve serializes")
    }

    /// Parses a curve file. Constant-speed curves get their geometry refilled; a file
    /// claiming constant speed that fails the speed check is an error.
    pub fn from_json(s: &str) -> Result<ClosedCurve> {
        let f: CurveFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if !f.closed {
            return Err(Error::InvalidInput("only closed curves are supported".into()));
        }
        let c = ClosedCurve::from_nodes(f.nodes)?;
        match f.param_kind {
            ParamKind::ConstantSpeed => geometry_fields(&c),
            ParamKind::General => Ok(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn circle_nodes(n: usize, r: f64, c: Vec2) -> Vec<Vec2> {
        (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                c + Vec2::new(r * t.cos(), r * t.sin())
            })
            .collect()
    }

    fn ellipse_nodes(n: usize, a: f64, b: f64) -> Vec<Vec2> {
        (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                Vec2::new(a * t.cos(), b * t.sin())
            })
            .collect()
    }

    /// Independent arclength inversion: dense polyline on the exact ellipse.
    fn ellipse_arclength_oracle(a: f64, b: f64, n: usize) -> Vec<Vec2> {
        let m = 400_000;
        let pts: Vec<Vec2> = ellipse_nodes(m, a, b);
        let mut cum = vec![0.0; m + 1];
        for i in 0..m {
            cum[i + 1] = cum[i] + pts[i].dist(pts[(i + 1) % m]);
        }
        let total = cum[m];
        let mut out = Vec::new();
        let mut j = 0;
        for i in 0..n {
            let s = total * i as f64 / n as f64;
            while cum[j + 1] < s {
                j += 1;
            }
            let f = (s - cum[j]) / (cum[j + 1] - cum[j]);
            let t0 = TAU * j as f64 / m as f64;
            let t = t0 + f * TAU / m as f64;
            out.push(Vec2::new(a * t.cos(), b * t.sin()));
        }
        out
    }

    #[test]
    fn circle_resample_keeps_circle() {
        let c = ClosedCurve::from_nodes(circle_nodes(64, 1.0, Vec2::ZERO)).unwrap();
        let r = resample_constant_speed(&c, 128).unwrap();
        assert_eq!(r.len(), 128);
        assert_eq!(r.param_kind(), ParamKind::ConstantSpeed);
        for p in r.nodes() {
            assert!((p.norm() - 1.0).abs() < 1e-6);
        }
        assert_relative_eq!(r.length().unwrap(), TAU, max_relative = 1e-8);
        for k in &r.geometry().unwrap().curvature {
            assert_relative_eq!(*k, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn ellipse_resample_is_equispaced() {
        let c = ClosedCurve::from_nodes(ellipse_nodes(128, 2.0, 1.0)).unwrap();
        let r = resample_constant_speed(&c, 128).unwrap();
        let p = r.nodes();
        let oracle = ellipse_arclength_oracle(2.0, 1.0, 128);
        for i in 0..128 {
            assert!(p[i].dist(oracle[i]) < 1e-5, "{}", p[i].dist(oracle[i]));
            let ch = p[i].dist(p[(i + 1) % 128]);
            let co = oracle[i].dist(oracle[(i + 1) % 128]);
            assert!((ch - co).abs() / co < 1e-4);
        }
        let g = r.geometry().unwrap();
        assert!(spread(&g.speeds) < 1e-8);
    }

    #[test]
    fn uneven_polygon_goes_through_spline() {
        // Clustered angles make the input spectrally unresolved.
        let nodes: Vec<Vec2> = (0..48)
            .map(|j| {
                let u = j as f64 / 48.0;
                let t = TAU * (u + 0.12 * (TAU * u).sin());
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        let c = ClosedCurve::from_nodes(nodes).unwrap();
        let r = resample_constant_speed(&c, 64).unwrap();
        for p in r.nodes() {
            assert!((p.norm() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn resample_same_count_is_idempotent() {
        let c = ClosedCurve::from_nodes(ellipse_nodes(128, 2.0, 1.0)).unwrap();
        let r = resample_constant_speed(&c, 128).unwrap();
        let r2 = resample_constant_speed(&r, 128).unwrap();
        for (a, b) in r.nodes().iter().zip(r2.nodes()) {
            assert!(a.dist(*b) < 1e-10);
        }
    }

    #[test]
    fn degenerate_curve_rejected() {
        let nodes: Vec<Vec2> =
            (0..16).map(|i| Vec2::new(1.0 + (i % 2) as f64 * 1e-14, 1.0)).collect();
        let c = ClosedCurve::from_nodes(nodes).unwrap();
        assert!(matches!(resample_constant_speed(&c, 16), Err(Error::DegenerateCurve(_))));
        assert!(ClosedCurve::from_nodes(vec![Vec2::ZERO; 15]).is_err());
    }

    #[test]
    fn geometry_identities() {
        let c = ClosedCurve::from_nodes(circle_nodes(128, 2.0, Vec2::new(1.0, 1.0))).unwrap();
        let g = geometry_fields(&c).unwrap();
        let geo = g.geometry().unwrap();
        assert_relative_eq!(geo.length, 4.0 * std::f64::consts::PI, max_relative = 1e-10);
        for k in &geo.curvature {
            assert_relative_eq!(*k, 0.5, max_relative = 1e-10);
        }
        let e = resample_constant_speed(
            &ClosedCurve::from_nodes(ellipse_nodes(256, 2.0, 1.0)).unwrap(),
            256,
        )
        .unwrap();
        let geo = e.geometry().unwrap();
        // ∂_s T = κ N and ∂_s N = −κ T at nodes.
        let dt = spectral::derivative(&geo.tangents, 1);
        let dn = spectral::derivative(&geo.normals, 1);
        let kmax = geo.curvature.iter().fold(0.0f64, |a, k| a.max(k.abs()));
        for i in 0..256 {
            let lhs = dt[i] * (1.0 / geo.length);
            assert!((lhs - geo.normals[i] * geo.curvature[i]).norm() < 1e-6 * kmax);
            let lhs = dn[i] * (1.0 / geo.length);
            assert!((lhs + geo.tangents[i] * geo.curvature[i]).norm() < 1e-6 * kmax);
            assert!((geo.tangents[i].norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn ellipse_curvature_matches_closed_form() {
        let e = resample_constant_speed(
            &ClosedCurve::from_nodes(ellipse_nodes(512, 2.0, 1.0)).unwrap(),
            256,
        )
        .unwrap();
        let geo = e.geometry().unwrap();
        for (p, k) in e.nodes().iter().zip(&geo.curvature) {
            // For (a cos t, b sin t): κ = ab / (a² sin² t + b² cos² t)^{3/2}.
            let t = (p.y / 1.0).atan2(p.x / 2.0);
            let exact = 2.0 / (4.0 * t.sin().powi(2) + t.cos().powi(2)).powf(1.5);
            assert!((k - exact).abs() / exact < 1e-4);
        }
    }

    #[test]
    fn wrong_parametrization_detected() {
        let c = ClosedCurve::from_nodes(ellipse_nodes(64, 2.0, 1.0)).unwrap();
        assert!(matches!(geometry_fields(&c), Err(Error::WrongParametrization(_))));
    }

    #[test]
    fn h2_of_circles() {
        for (r, expect) in [(1.0, TAU.sqrt()), (4.0, (std::f64::consts::PI / 2.0).sqrt())] {
            let c = geometry_fields(&ClosedCurve::from_nodes(circle_nodes(128, r, Vec2::ZERO)).unwrap())
                .unwrap();
            assert_relative_eq!(h2_seminorm(&c).unwrap(), expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn ellipse_h2_converges() {
        let mk = |n| {
            resample_constant_speed(&ClosedCurve::from_nodes(ellipse_nodes(n, 2.0, 1.0)).unwrap(), n)
                .unwrap()
        };
        let oracle = h2_seminorm(&mk(4096)).unwrap();
        assert!((h2_seminorm(&mk(256)).unwrap() - oracle).abs() < 1e-4);
    }

    #[test]
    fn c1beta_of_circle() {
        let c = geometry_fields(&ClosedCurve::from_nodes(circle_nodes(256, 1.0, Vec2::ZERO)).unwrap())
            .unwrap();
        assert!((c1beta_seminorm(&c, 1.0).unwrap() - 1.0).abs() < 1e-3);
        // Scan oracle for sup 2|sin(d/2)|/√d over (0, π].
        let oracle = (1..=100_000)
            .map(|i| {
                let d = std::f64::consts::PI * i as f64 / 100_000.0;
                2.0 * (d / 2.0).sin() / d.sqrt()
            })
            .fold(0.0, f64::max);
        assert!((c1beta_seminorm(&c, 0.5).unwrap() - oracle).abs() < 1e-3);
        assert!(matches!(c1beta_seminorm(&c, 0.0), Err(Error::InvalidExponent(_))));
        assert!(matches!(c1beta_seminorm(&c, 1.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn areas_and_orientation() {
        let ccw = ClosedCurve::from_nodes(circle_nodes(128, 1.0, Vec2::ZERO)).unwrap();
        assert_relative_eq!(enclosed_area(&ccw), std::f64::consts::PI, max_relative = 1e-3);
        let fine = ccw.upsampled(4096).unwrap();
        assert_relative_eq!(enclosed_area(&fine), std::f64::consts::PI, max_relative = 1e-5);
        let cw = ccw.reversed();
        assert_relative_eq!(enclosed_area(&cw), -enclosed_area(&ccw), max_relative = 1e-14);
        assert!(is_positively_oriented(&ccw));
        assert!(!is_positively_oriented(&cw));
        assert_eq!(winding_number(&ccw, Vec2::ZERO).unwrap(), 1);
        assert_eq!(winding_number(&ccw, Vec2::new(3.0, 0.0)).unwrap(), 0);
        assert_eq!(winding_number(&cw, Vec2::ZERO).unwrap(), -1);
        assert!(matches!(winding_number(&ccw, ccw.nodes()[3]), Err(Error::PointOnCurve)));
    }

    #[test]
    fn transport_examples() {
        let c = ClosedCurve::from_nodes(circle_nodes(64, 1.0, Vec2::ZERO)).unwrap();
        let t = transport(&c, |_| Vec2::new(1.0, 0.0), 1.0);
        for (a, b) in c.nodes().iter().zip(t.nodes()) {
            assert!((*b - *a - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        }
        assert_eq!(t.param_kind(), ParamKind::General);
        let same = transport(&c, |p| p, 0.0);
        assert_eq!(same.nodes(), c.nodes());
        let big = transport(&c, |p| p, 0.5);
        for p in big.nodes() {
            assert!((p.norm() - 1.5).abs() < 1e-14);
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = geometry_fields(&ClosedCurve::from_nodes(circle_nodes(32, 1.0, Vec2::ZERO)).unwrap())
            .unwrap();
        let s = c.to_json();
        assert!(s.contains("\"param_kind\":\"constant_speed\""));
        assert!(s.contains("\"closed\":true"));
        let back = ClosedCurve::from_json(&s).unwrap();
        assert_eq!(back.nodes(), c.nodes());
        assert!(back.geometry().is_ok());
        assert!(ClosedCurve::from_json("{\"nodes\":[],\"param_kind\":\"general\",\"closed\":true,\"x\":1}").is_err());
    }
}
