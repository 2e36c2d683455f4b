//! Randomized verification of curve and kernel inequalities, and the periodic maximal
//! operator.

use crate::alignment::Mollifier;
use crate::curve::{c1beta_seminorm, enclosed_area, h2_seminorm, ClosedCurve};
use crate::error::Result;
use crate::metrics::{max_spacing, point_polyline_distance, project_onto, self_distance, self_distance_witness};
use crate::scenarios::{make_shape, random_fourier_shape, Shape};
use crate::spectral;
use crate::spline::gauss_legendre8;
use crate::vec2::Vec2;
use crate::velocity::{contour_velocity, KernelSpec, PatchFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Multiplicative slack on every inequality.
pub const SLACK_MUL: f64 = 0.02;
/// Additive slack on every inequality.
pub const SLACK_ADD: f64 = 1e-6;
/// Measured-constant bound for the maximal operator in L².
pub const MAXIMAL_CONSTANT: f64 = 4.0;

/// One-sided maximal function of node samples, each sample standing for one grid cell:
/// at node i, the largest average of `|f|` over `k ≤ n/2` consecutive cells starting or
/// ending at i.
pub fn maximal_operator(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    if n == 0 {
        return Vec::new();
    }
    let mut prefix = vec![0.0; 2 * n + 1];
    for j in 0..2 * n {
        prefix[j + 1] = prefix[j] + f[j % n].abs();
    }
    let kmax = (n / 2).max(1);
    (0..n)
        .map(|i| {
            let mut best = 0.0f64;
            for k in 1..=kmax {
                let fwd = prefix[i + k] - prefix[i];
                // Backward window i−k+1..=i, shifted by n to stay non-negative.
                let bwd = prefix[i + n + 1] - prefix[i + n + 1 - k];
                best = best.max(fwd.max(bwd) / k as f64);
            }
            best
        })
        .collect()
}

/// Outcome of one inequality over all trials.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    /// Largest `lhs / rhs` seen; the check passes when every evaluation has
    /// `lhs ≤ rhs·(1 + 2%) + 10⁻⁶`.
    pub worst_ratio: f64,
    pub evaluations: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub nodes: usize,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<24} {:>6} {:>12} {:>6}  {}\n",
            "check", "result", "worst ratio", "evals", "statement"
        );
        for c in &self.checks {
            s += &format!(
                "{:<24} {:>6} {:>12.6} {:>6}  {}\n",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.worst_ratio,
                c.evaluations,
                c.statement
            );
        }
        s
    }
}

/// Single evaluation: `lhs ≤ rhs` with the suite's slack.
#[derive(Clone, Debug)]
struct Eval {
    lhs: f64,
    rhs: f64,
    what: String,
}

impl Eval {
    fn new(lhs: f64, rhs: f64, what: impl Into<String>) -> Self {
        Eval { lhs, rhs, what: what.into() }
    }
    fn ok(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + SLACK_MUL) + SLACK_ADD
    }
    fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

const CHECKS: [(&str, &str); 11] = [
    ("length_sup_curvature", "length <= |curve|_inf^2 * |curve|_H2^2"),
    ("window_chord_upper", "Delta_h <= h for h in (0, length/2]"),
    ("tangent_turning", "length >= 2^(1+1/2b)/G^(1/b) and T.T' >= 1 - G^2|s-s'|^(2b)/2"),
    ("near_set_structure", "near set covered by <= length*G^(1/b) disjoint windows, |g_i| >= |s-s_i|/2"),
    ("window_simplicity", "Delta_h > 0 for simple curves; small Delta_h attained orthogonally beyond h"),
    ("length_area_window", "length <= 30 |area| / Delta_h for h <= G^(-1/b)"),
    ("area_potential_bound", "int_area |x-y|^(-1-2a) <= 2 pi^(1/2+a)/(1-2a) |area|^(1/2-a), same for |u|"),
    ("near_kernel_mass", "int_{|x-curve|<=e} |x-curve|^(-2a) ds <= 4/(1-2a) length G^(1/b) e^(1-2a)"),
    ("mollifier_bounds", "convolution with a unit-mass bump: Lp contraction, sup, Holder, W1p, W2p bounds"),
    ("interpolation_sup", "|f|_inf <= |mean| + |f'|_2^(1/2) |f - mean|_2^(1/2) <= second form"),
    ("maximal_l2", "|Mf|_2 <= 4 |f|_2"),
];

/// Samples of a random trigonometric polynomial on `ℓT`, its first two derivatives.
struct TrigPoly {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    l: f64,
}

impl TrigPoly {
    fn random(rng: &mut impl Rng, l: f64) -> Self {
        let k = rng.gen_range(1..=12);
        let decay = rng.gen_range(0.0..2.0);
        let mut cos = Vec::with_capacity(k);
        let mut sin = Vec::with_capacity(k);
        for j in 1..=k {
            let s = (j as f64).powf(-decay);
            cos.push(rng.gen_range(-1.0..1.0) * s);
            sin.push(rng.gen_range(-1.0..1.0) * s);
        }
        TrigPoly { mean: rng.gen_range(-1.0..1.0), cos, sin, l }
    }

    /// Value and derivatives at `s`, after applying the even multiplier `m(ω)`.
    fn eval(&self, s: f64, m: &dyn Fn(f64) -> f64) -> [f64; 3] {
        let mut v = [self.mean * m(0.0), 0.0, 0.0];
        for (j, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = TAU * (j + 1) as f64 / self.l;
            let f = m(w);
            let (sn, cs) = (w * s).sin_cos();
            v[0] += f * (a * cs + b * sn);
            v[1] += f * w * (-a * sn + b * cs);
            v[2] -= f * w * w * (a * cs + b * sn);
        }
        v
    }

    fn sample(&self, n: usize, m: &dyn Fn(f64) -> f64) -> Vec<[f64; 3]> {
        (0..n).map(|i| self.eval(self.l * i as f64 / n as f64, m)).collect()
    }
}

fn lp(v: &[f64], p: f64, ds: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    } else {
        (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() * ds).powf(1.0 / p)
    }
}

/// `∫_0^1 |p + t(q−p) − x|^{-1-2α} dt` weighted into the polar area integral.
fn polar_edge(x: Vec2, p: Vec2, q: Vec2, alpha: f64) -> f64 {
    let w = q - p;
    let c0 = (p - x).cross(w);
    if c0 == 0.0 {
        return 0.0;
    }
    let dist = (c0 / w.norm()).abs();
    let panels = ((w.norm() / dist).ceil() as usize).clamp(1, 64);
    let f = |t: f64| (p + w * t - x).norm().powf(-1.0 - 2.0 * alpha);
    let mut acc = 0.0;
    for k in 0..panels {
        acc += gauss_legendre8(k as f64 / panels as f64, (k + 1) as f64 / panels as f64, f);
    }
    acc * c0 / (1.0 - 2.0 * alpha)
}

/// `∫_Ω |x − y|^{-1-2α} dy` over the region bounded by the node polygon.
pub fn inverse_power_area_integral(curve: &ClosedCurve, x: Vec2, alpha: f64) -> f64 {
    let p = curve.nodes();
    let n = p.len();
    (0..n).map(|i| polar_edge(x, p[i], p[(i + 1) % n], alpha)).sum::<f64>().abs()
}

/// Ratio `ℓ / (‖γ‖²_∞‖γ‖²_{Ḣ²})`, equal to one for a circle centered at the origin.
pub fn length_bound_ratio(curve: &ClosedCurve) -> Result<f64> {
    let sup = curve.nodes().iter().fold(0.0f64, |a, p| a.max(p.norm()));
    Ok(curve.length()? / (sup * sup * h2_seminorm(curve)?.powi(2)))
}

struct Trial<'a> {
    rng: ChaCha8Rng,
    curve: &'a ClosedCurve,
    out: Vec<Vec<Eval>>,
}

impl Trial<'_> {
    fn push(&mut self, check: usize, e: Eval) {
        self.out[check].push(e);
    }
}

fn random_beta(rng: &mut impl Rng) -> f64 {
    [0.25, 0.5, 1.0][rng.gen_range(0..3)]
}

fn check_curve_inequalities(t: &mut Trial) -> Result<()> {
    let c = t.curve;
    let g = c.geometry()?;
    let l = g.length;
    let n = c.len();
    let ds = g.ds();
    // length vs sup norm and curvature
    t.push(0, Eval::new(length_bound_ratio(c)?, 1.0, "random curve"));
    // Δ_h ≤ h
    for _ in 0..3 {
        let h = t.rng.gen_range(1e-3..=1.0) * 0.5 * l;
        t.push(1, Eval::new(self_distance(c, h)?, h, format!("h = {h:.4}")));
    }
    let beta = random_beta(&mut t.rng);
    let gnorm = c1beta_seminorm(c, beta)?;
    let a = gnorm.powf(-1.0 / beta);
    // tangent turning and length lower bound
    t.push(2, Eval::new(2f64.powf(1.0 + 0.5 / beta) * a, l, format!("length, beta = {beta}")));
    for _ in 0..20 {
        let i = t.rng.gen_range(0..n);
        let j = t.rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let k = (i as i64 - j as i64).unsigned_abs() as usize;
        let sep = k.min(n - k) as f64 * ds;
        let lhs = 1.0 - g.tangents[i].dot(g.tangents[j]);
        t.push(2, Eval::new(lhs, 0.5 * gnorm * gnorm * sep.powf(2.0 * beta), format!("pair ({i}, {j}), beta = {beta}")));
    }
    // window simplicity and orthogonal attainment
    let h = t.rng.gen_range(0.05..=1.0) * a.min(0.5 * l);
    let (d, i, j) = self_distance_witness(c, h)?;
    t.push(4, Eval::new(if d > 0.0 { 0.0 } else { 1.0 }, 0.0, format!("Delta_h = {d:e}")));
    let thr = (1.0 + 4.0 * beta) / (2.0 * (1.0 + 2.0 * beta));
    if d < thr * h {
        let k = (i as i64 - j as i64).unsigned_abs() as usize;
        let sep = k.min(n - k) as f64 * ds;
        let chord = (c.nodes()[i] - c.nodes()[j]) * (1.0 / d);
        let orth = chord.dot(g.tangents[i]).abs().max(chord.dot(g.tangents[j]).abs());
        // Grid resolution limits orthogonality to about one cell of turning.
        let tol = 2.0 * ds * g.curvature.iter().fold(0.0f64, |m, k| m.max(k.abs())) + 1e-3;
        t.push(4, Eval::new(h, sep, "attained beyond h"));
        t.push(4, Eval::new(orth, tol, "orthogonal chord"));
    }
    // length vs area and window
    let area = enclosed_area(c);
    t.push(5, Eval::new(l * d, 30.0 * area, format!("h = {h:.4}, beta = {beta}")));
    Ok(())
}

/// Near-set structure around points placed close to the curve.
fn check_near_set(t: &mut Trial) -> Result<()> {
    let c = t.curve;
    let beta = random_beta(&mut t.rng);
    let gnorm = c1beta_seminorm(c, beta)?;
    let a = gnorm.powf(-1.0 / beta);
    let d0 = 0.25 * a;
    let fine = c.upsampled(4 * c.len())?;
    let fg = fine.geometry()?;
    let (m, l) = (fine.len(), fg.length);
    let fds = fg.ds();
    let interp = fine.interpolant();
    for _ in 0..3 {
        let s0 = t.rng.gen_range(0..m);
        let off = t.rng.gen_range(-2.0..2.0) * d0;
        let x = fine.nodes()[s0] + fg.normals[s0] * off;
        let dist: Vec<f64> = fine.nodes().iter().map(|p| p.dist(x)).collect();
        // Components of {dist < 2 d0} meeting {dist ≤ d0}, each represented by its
        // exact local minimizer.
        let inside: Vec<bool> = dist.iter().map(|&v| v < 2.0 * d0).collect();
        let mut centers: Vec<f64> = Vec::new();
        if inside.iter().all(|&b| b) {
            let k = (0..m).min_by(|&p, &q| dist[p].partial_cmp(&dist[q]).unwrap()).unwrap();
            if dist[k] <= d0 {
                centers.push(k as f64 / m as f64);
            }
        } else {
            let start = (0..m).find(|&k| !inside[k]).unwrap();
            let mut k = 0;
            while k < m {
                let idx = (start + k) % m;
                if inside[idx] {
                    let mut best = idx;
                    let mut len = 0;
                    while len < m && inside[(start + k + len) % m] {
                        let q = (start + k + len) % m;
                        if dist[q] < dist[best] {
                            best = q;
                        }
                        len += 1;
                    }
                    if dist[best] <= d0 {
                        centers.push(best as f64 / m as f64);
                    }
                    k += len;
                } else {
                    k += 1;
                }
            }
        }
        let centers: Vec<f64> = centers.into_iter().map(|xi| project_onto(&interp, x, xi).1 * l).collect();
        let what = format!("point offset {off:.4} from node {s0}, beta = {beta}");
        t.push(3, Eval::new(centers.len() as f64, l * gnorm.powf(1.0 / beta), format!("count, {what}")));
        let cyc = |u: f64, v: f64| {
            let d = (u - v).rem_euclid(l);
            d.min(l - d)
        };
        for p in 0..centers.len() {
            for q in p + 1..centers.len() {
                t.push(3, Eval::new(a, cyc(centers[p], centers[q]), format!("disjoint windows, {what}")));
            }
        }
        for k in 0..m {
            if dist[k] <= d0 {
                let s = k as f64 * fds;
                let near = centers.iter().map(|&c| cyc(s, c)).fold(f64::INFINITY, f64::min);
                t.push(3, Eval::new(near, 0.5 * a, format!("cover, {what}")));
            }
        }
        for &sc in &centers {
            let (_, tan) = interp.eval_d1(sc / l);
            let tan = tan * (1.0 / tan.norm());
            let steps = (a / fds).floor() as i64;
            for k in -steps..=steps {
                if k == 0 {
                    continue;
                }
                let s = sc + k as f64 * fds;
                let gval = (x - interp.eval((s / l).rem_euclid(1.0))).dot(tan).abs();
                t.push(3, Eval::new(0.5 * (k as f64 * fds).abs(), gval, format!("transversality, {what}")));
            }
        }
    }
    Ok(())
}

/// Area potential and velocity bounds.
fn check_area_potential(t: &mut Trial) -> Result<()> {
    let c = t.curve;
    let alpha = [1.0 / 12.0, 1.0 / 6.0, 0.25][t.rng.gen_range(0..3)];
    let fine = c.upsampled(8 * c.len())?;
    let area = enclosed_area(&fine);
    let konst = 2.0 * PI.powf(0.5 + alpha) / (1.0 - 2.0 * alpha);
    let (lo, hi) = c.bbox();
    let theta = if t.rng.gen_bool(0.5) { 1.0 } else { -1.0 } * t.rng.gen_range(0.5..2.0);
    let fam = PatchFamily::new(vec![c.clone()], vec![theta])?;
    let spec = KernelSpec { alpha, c_alpha: 1.0, epsilon: 0.0, chi_floor: 0.5 };
    let gap = 3.0 * max_spacing(c);
    for _ in 0..4 {
        let x = Vec2::new(
            t.rng.gen_range(lo.x - 0.5..hi.x + 0.5),
            t.rng.gen_range(lo.y - 0.5..hi.y + 0.5),
        );
        let rhs = konst * area.powf(0.5 - alpha);
        let what = format!("x = ({:.3}, {:.3}), alpha = {alpha:.4}", x.x, x.y);
        t.push(6, Eval::new(inverse_power_area_integral(&fine, x, alpha), rhs, what.clone()));
        if point_polyline_distance(c, x).0 > gap {
            let u = contour_velocity(&fam, &spec, x)?;
            t.push(6, Eval::new(u.norm(), spec.c_alpha * theta.abs() * rhs, format!("velocity, {what}")));
        }
    }
    Ok(())
}

/// Kernel mass of the part of the curve within ε of a point.
fn check_near_kernel(t: &mut Trial) -> Result<()> {
    let c = t.curve;
    let beta = random_beta(&mut t.rng);
    let gnorm = c1beta_seminorm(c, beta)?;
    let eps = t.rng.gen_range(0.1..=1.0) * 0.25 * gnorm.powf(-1.0 / beta);
    let alpha = [1.0 / 12.0, 1.0 / 6.0, 0.25][t.rng.gen_range(0..3)];
    let g = c.geometry()?;
    let l = g.length;
    let s0 = t.rng.gen_range(0..c.len());
    let off = t.rng.gen_range(0.1..1.0) * eps * if t.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let x = c.nodes()[s0] + g.normals[s0] * off;
    // Dense enough to resolve the integrand near its peak.
    let m = ((20.0 * l / off.abs()).ceil() as usize).next_power_of_two().max(c.len());
    let fine = spectral::upsample(c.nodes(), m);
    let ds = l / m as f64;
    let integral: f64 = fine
        .iter()
        .map(|p| p.dist(x))
        .filter(|&r| r <= eps)
        .map(|r| r.powf(-2.0 * alpha) * ds)
        .sum();
    let rhs = 4.0 / (1.0 - 2.0 * alpha) * l * gnorm.powf(1.0 / beta) * eps.powf(1.0 - 2.0 * alpha);
    t.push(7, Eval::new(integral, rhs, format!("eps = {eps:.4}, alpha = {alpha:.4}, beta = {beta}")));
    Ok(())
}

fn check_mollifier(t: &mut Trial) {
    let l2 = [1.0, TAU, 10.0][t.rng.gen_range(0..3)];
    let l1 = t.rng.gen_range(0.1..2.0) * l2;
    let r = t.rng.gen_range(0.01..0.5);
    let sigma = Mollifier { half_width: l1 };
    let f = TrigPoly::random(&mut t.rng, l2);
    let n = 512;
    let ds = l2 / n as f64;
    let id = |_: f64| 1.0;
    let mult = |w: f64| sigma.fourier(w * r);
    let raw = f.sample(n, &id);
    let mol = f.sample(n, &mult);
    let col = |v: &[[f64; 3]], k: usize| v.iter().map(|x| x[k]).collect::<Vec<f64>>();
    let (f0, f1, f2) = (col(&raw, 0), col(&raw, 1), col(&raw, 2));
    let m0 = col(&mol, 0);
    let diff: Vec<f64> = m0.iter().zip(&f0).map(|(a, b)| a - b).collect();
    let what = format!("l1 = {l1:.3}, l2 = {l2:.3}, r = {r:.3}");
    for p in [1.0, 2.0, f64::INFINITY] {
        t.push(8, Eval::new(lp(&m0, p, ds), lp(&f0, p, ds), format!("contraction p = {p}, {what}")));
        t.push(8, Eval::new(lp(&diff, p, ds), r * l1 * lp(&f1, p, ds), format!("first order p = {p}, {what}")));
        t.push(
            8,
            Eval::new(lp(&diff, p, ds), 0.5 * (r * l1).powi(2) * lp(&f2, p, ds), format!("second order p = {p}, {what}")),
        );
    }
    let wraps = (2.0 * r * l1 / l2).ceil();
    t.push(
        8,
        Eval::new(lp(&m0, f64::INFINITY, ds), r.powf(-0.5) * wraps.sqrt() * sigma.l2_norm() * lp(&f0, 2.0, ds), format!("sup, {what}")),
    );
    let beta = random_beta(&mut t.rng);
    let mut holder = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let k = (j - i).min(n - (j - i));
            holder = holder.max((f0[i] - f0[j]).abs() / (k as f64 * ds).powf(beta));
        }
    }
    t.push(
        8,
        Eval::new(lp(&diff, f64::INFINITY, ds), (r * l1).powf(beta) * holder, format!("Holder beta = {beta}, {what}")),
    );
}

fn check_interpolation(t: &mut Trial) {
    for l in [1.0, TAU, 10.0] {
        let f = TrigPoly::random(&mut t.rng, l);
        let n = 1024;
        let ds = l / n as f64;
        let v = f.sample(n, &|_| 1.0);
        let f0: Vec<f64> = v.iter().map(|x| x[0]).collect();
        let f1: Vec<f64> = v.iter().map(|x| x[1]).collect();
        let mean = f0.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = f0.iter().map(|x| x - mean).collect();
        let sup = lp(&f0, f64::INFINITY, ds);
        let (n0, n1, nc) = (lp(&f0, 2.0, ds), lp(&f1, 2.0, ds), lp(&centered, 2.0, ds));
        let first = mean.abs() + (n1 * nc).sqrt();
        let second = n0.sqrt() / l.sqrt() * (n0.sqrt() + l.sqrt() * n1.sqrt());
        t.push(9, Eval::new(sup, first, format!("first form, l = {l:.3}")));
        t.push(9, Eval::new(first, second, format!("second form, l = {l:.3}")));
    }
}

fn check_maximal(t: &mut Trial) {
    for _ in 0..2 {
        let n = [64, 128, 256][t.rng.gen_range(0..3)];
        let l = t.rng.gen_range(0.5..10.0);
        let ds = l / n as f64;
        let f: Vec<f64> = if t.rng.gen_bool(0.5) {
            (0..n).map(|_| t.rng.gen_range(-1.0..1.0)).collect()
        } else {
            let mut v = vec![0.0; n];
            for _ in 0..t.rng.gen_range(1..5) {
                v[t.rng.gen_range(0..n)] = t.rng.gen_range(-5.0..5.0);
            }
            v
        };
        let mf = maximal_operator(&f);
        let (a, b) = (lp(&mf, 2.0, ds), lp(&f, 2.0, ds));
        if b > 0.0 {
            t.push(10, Eval::new(a, MAXIMAL_CONSTANT * b, format!("n = {n}")));
        }
    }
}

fn run_trial(seed: u64, n: usize) -> Result<Vec<Vec<Eval>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = random_fourier_shape(&mut rng, 6, 0.15);
    let shape = match shape {
        Shape::Fourier { r0, cos, sin, .. } => {
            let scale = rng.gen_range(0.5..2.0);
            Shape::Fourier {
                r0: r0 * scale,
                cos: cos.iter().map(|c| c * scale).collect(),
                sin: sin.iter().map(|c| c * scale).collect(),
                center: [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)],
            }
        }
        s => s,
    };
    let curve = make_shape(&shape, n)?;
    let mut t = Trial { rng, curve: &curve, out: vec![Vec::new(); CHECKS.len()] };
    check_curve_inequalities(&mut t)?;
    check_near_set(&mut t)?;
    check_area_potential(&mut t)?;
    check_near_kernel(&mut t)?;
    check_mollifier(&mut t);
    check_interpolation(&mut t);
    check_maximal(&mut t);
    Ok(t.out)
}

/// Runs every check on `trials` random curves and fields. Deterministic in `seed`.
pub fn check_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    check_suite_with(seed, trials, 256)
}

pub fn check_suite_with(seed: u64, trials: usize, nodes: usize) -> Result<SuiteReport> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| master.gen()).collect();
    let per_trial: Vec<Vec<Vec<Eval>>> =
        seeds.par_iter().map(|&s| run_trial(s, nodes)).collect::<Result<Vec<_>>>()?;
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(k, &(name, statement))| {
            let mut worst = 0.0f64;
            let mut evaluations = 0;
            let mut failures = 0;
            let mut witness = None;
            for (trial, evals) in per_trial.iter().enumerate() {
                for e in &evals[k] {
                    evaluations += 1;
                    worst = worst.max(e.ratio());
                    if !e.ok() {
                        failures += 1;
                        if witness.is_none() {
                            witness = Some(format!(
                                "trial {trial} (seed {}): {} (lhs {:e}, rhs {:e})",
                                seeds[trial], e.what, e.lhs, e.rhs
                            ));
                        }
                    }
                }
            }
            CheckResult { name, statement, passed: failures == 0, worst_ratio: worst, evaluations, failures, witness }
        })
        .collect();
    Ok(SuiteReport { seed, trials, nodes, checks })
}
