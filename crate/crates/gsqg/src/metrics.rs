//! Distances within and between closed curves, and the containment relations that
//! decide which patch pairs enter the separation functional.

use crate::curve::{winding_number, ClosedCurve};
use crate::error::{Error, Result};
use crate::spectral::{self, Interpolant};
use crate::vec2::{point_segment, segment_segment, segments_cross, Vec2};
use crate::velocity::PatchFamily;
use serde::Serialize;

/// Multiple of the largest grid spacing below which two boundaries count as touching.
pub const TOUCH_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationClass {
    Nested1In2,
    Nested2In1,
    Disjoint,
    Overlapping,
}

/// Largest distance between consecutive nodes.
pub fn max_spacing(c: &ClosedCurve) -> f64 {
    let p = c.nodes();
    let n = p.len();
    (0..n).map(|i| p[i].dist(p[(i + 1) % n])).fold(0.0, f64::max)
}

/// Local Newton projection of `x` onto the interpolant, starting from parameter `xi`.
/// Steps are limited to one grid cell; returns the distance and the parameter in [0, 1).
pub fn project_onto(interp: &Interpolant, x: Vec2, xi: f64) -> (f64, f64) {
    let n = interp.len() as f64;
    let mut xi = xi;
    for _ in 0..12 {
        let (p, d1, d2) = interp.eval3(xi);
        let (p, d1, d2) = (spectral::to_vec2(p), spectral::to_vec2(d1), spectral::to_vec2(d2));
        let r = x - p;
        let g = -r.dot(d1);
        let mut h = d1.norm2() - r.dot(d2);
        if h <= 0.0 {
            h = d1.norm2();
        }
        let step = (g / h).clamp(-1.0 / n, 1.0 / n);
        xi -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    let xi = xi.rem_euclid(1.0);
    (interp.eval(xi).dist(x), xi)
}

/// Distance from `x` to the curve through the nodes of `curve`, measured on the
/// trigonometric interpolant after locating the nearest polygon segment. Never exceeds
/// the distance to the nearest node. Returns the distance and the grid parameter.
pub fn curve_point_distance(curve: &ClosedCurve, interp: &Interpolant, x: Vec2) -> (f64, f64) {
    let n = curve.len();
    let (dpoly, seg, t) = point_polyline_distance(curve, x);
    let (dref, xi) = project_onto(interp, x, (seg as f64 + t) / n as f64);
    let (near, dnode) = curve
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.dist(x)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    // A runaway projection falls back to the polygon.
    if !(dref <= dpoly + max_spacing(curve)) {
        return (dpoly.min(dnode), (seg as f64 + t) / n as f64);
    }
    if dnode < dref {
        (dnode, near as f64 / n as f64)
    } else {
        (dref, xi)
    }
}

/// Distance between two curves. Zero when the node polygons touch or cross; otherwise
/// the best node pairs are refined by alternating projection on the interpolants.
pub fn pair_distance(c1: &ClosedCurve, c2: &ClosedCurve) -> f64 {
    let (a, b) = (c1.nodes(), c2.nodes());
    let (n, m) = (a.len(), b.len());
    let nearest: Vec<(f64, usize)> = a
        .iter()
        .map(|p| {
            b.iter()
                .enumerate()
                .map(|(j, q)| (p.dist(*q), j))
                .fold((f64::INFINITY, 0), |x, y| if y.0 < x.0 { y } else { x })
        })
        .collect();
    let best = nearest.iter().fold(f64::INFINITY, |x, y| x.min(y.0));
    let (h1, h2) = (max_spacing(c1), max_spacing(c2));
    let reach = best + h1 + h2;
    for i in 0..n {
        let (p0, p1) = (a[i], a[(i + 1) % n]);
        for j in 0..m {
            let (q0, q1) = (b[j], b[(j + 1) % m]);
            if p0.dist(q0) <= reach && segment_segment(p0, p1, q0, q1) == 0.0 {
                return 0.0;
            }
        }
    }
    let mut cands: Vec<usize> = (0..n)
        .filter(|&i| {
            let d = nearest[i].0;
            d <= best + h1 + h2 && d <= nearest[(i + 1) % n].0 && d <= nearest[(i + n - 1) % n].0
        })
        .collect();
    cands.sort_by(|&x, &y| nearest[x].0.partial_cmp(&nearest[y].0).unwrap().then(x.cmp(&y)));
    cands.truncate(8);
    let (i1, i2) = (c1.interpolant(), c2.interpolant());
    let mut out = best;
    for i in cands {
        let (mut xi, mut eta) = (i as f64 / n as f64, nearest[i].1 as f64 / m as f64);
        let mut d = f64::INFINITY;
        for _ in 0..40 {
            eta = project_onto(&i2, i1.eval(xi), eta).1;
            let r = project_onto(&i1, i2.eval(eta), xi);
            xi = r.1;
            if (d - r.0).abs() < 1e-15 {
                d = r.0;
                break;
            }
            d = r.0;
        }
        out = out.min(d);
    }
    out
}

/// `Δ_h` together with the minimizing node indices (the second index may denote a
/// window-endpoint sample, reported as the node just before it).
pub fn self_distance_witness(curve: &ClosedCurve, h: f64) -> Result<(f64, usize, usize)> {
    let g = curve.geometry()?;
    let half = 0.5 * g.length;
    if !(h > 0.0 && h <= half * (1.0 + 1e-12)) {
        return Err(Error::InvalidWindow { h, max: half });
    }
    let p = curve.nodes();
    let n = p.len();
    let ds = g.ds();
    let r = h / ds;
    let k0 = r.ceil() as usize;
    let mut best = (f64::INFINITY, 0usize, 0usize);
    // Chords exactly at separation h, from the interpolant shifted by the fractional part.
    let base = r.floor() as usize;
    let frac = r - base as f64;
    if frac > 1e-12 {
        let shifted = spectral::shift(p, frac);
        for i in 0..n {
            let d = p[i].dist(shifted[(i + base) % n]);
            if d < best.0 {
                best = (d, i, (i + base) % n);
            }
        }
    }
    for k in k0.max(1)..=n / 2 {
        for i in 0..n {
            let d = p[i].dist(p[(i + k) % n]);
            if d < best.0 {
                best = (d, i, (i + k) % n);
            }
        }
    }
    Ok(best)
}

/// Minimum chord over node pairs whose cyclic arclength separation lies in `[h, ℓ/2]`.
pub fn self_distance(curve: &ClosedCurve, h: f64) -> Result<f64> {
    Ok(self_distance_witness(curve, h)?.0)
}

/// Optimal cyclic discrete Fréchet coupling.
#[derive(Clone, Debug)]
pub struct FrechetCoupling {
    pub value: f64,
    /// Index of the node of the second curve coupled with node 0 of the first.
    pub shift: usize,
    /// Monotone list of coupled index pairs `(i, j)`, both in original numbering, the
    /// first-curve index running from 0 to n (n meaning node 0 again).
    pub path: Vec<(usize, usize)>,
}

fn frechet_shift(
    a: &[Vec2],
    b: &[Vec2],
    k: usize,
    cap: f64,
    row: &mut Vec<f64>,
    prev: &mut Vec<f64>,
) -> f64 {
    let (n, m) = (a.len(), b.len());
    let bj = |j: usize| b[(k + j) % m];
    let ai = |i: usize| a[i % n];
    for j in 0..=m {
        let d = (ai(0) - bj(j)).norm2();
        prev[j] = if j == 0 { d } else { d.max(prev[j - 1]) };
    }
    for i in 1..=n {
        let mut rmin = f64::INFINITY;
        for j in 0..=m {
            let d = (ai(i) - bj(j)).norm2();
            let reach = if j == 0 {
                prev[0]
            } else {
                prev[j].min(row[j - 1]).min(prev[j - 1])
            };
            row[j] = d.max(reach);
            rmin = rmin.min(row[j]);
        }
        if rmin >= cap {
            return f64::INFINITY;
        }
        std::mem::swap(row, prev);
    }
    prev[m]
}

/// Discrete Fréchet distance between the cyclic node sequences, minimized over cyclic
/// shifts of the second sequence. An upper bound of the continuum distance.
pub fn frechet_distance(c1: &ClosedCurve, c2: &ClosedCurve) -> f64 {
    frechet_value_and_shift(c1.nodes(), c2.nodes()).0
}

fn frechet_value_and_shift(a: &[Vec2], b: &[Vec2]) -> (f64, usize) {
    let m = b.len();
    let mut row = vec![0.0; m + 1];
    let mut prev = vec![0.0; m + 1];
    // Try shifts in order of increasing start distance so pruning bites early.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| {
        (a[0] - b[x]).norm2().partial_cmp(&(a[0] - b[y]).norm2()).unwrap().then(x.cmp(&y))
    });
    let mut best = (f64::INFINITY, 0usize);
    for k in order {
        if (a[0] - b[k]).norm2() >= best.0 {
            continue;
        }
        let v = frechet_shift(a, b, k, best.0, &mut row, &mut prev);
        if v < best.0 || (v == best.0 && k < best.1) {
            best = (v, k);
        }
    }
    (best.0.sqrt(), best.1)
}

/// The optimal coupling behind [`frechet_distance`].
pub fn frechet_coupling(c1: &ClosedCurve, c2: &ClosedCurve) -> FrechetCoupling {
    let (a, b) = (c1.nodes(), c2.nodes());
    let (value, k) = frechet_value_and_shift(a, b);
    let (n, m) = (a.len(), b.len());
    let d = |i: usize, j: usize| (a[i % n] - b[(k + j) % m]).norm2();
    let mut f = vec![vec![0.0f64; m + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=m {
            let reach = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => f[0][j - 1],
                (_, 0) => f[i - 1][0],
                _ => f[i - 1][j].min(f[i][j - 1]).min(f[i - 1][j - 1]),
            };
            f[i][j] = d(i, j).max(reach);
        }
    }
    let mut path = vec![(n, k + m)];
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let cands = [(i - 1, j - 1), (i - 1, j), (i, j - 1)];
            *cands
                .iter()
                .min_by(|x, y| f[x.0][x.1].partial_cmp(&f[y.0][y.1]).unwrap())
                .unwrap()
        };
        path.push((i, k + j));
    }
    path.reverse();
    FrechetCoupling { value, shift: k, path }
}

/// Distance from `x` to the node polygon, the nearest segment index and its parameter.
pub fn point_polyline_distance(curve: &ClosedCurve, x: Vec2) -> (f64, usize, f64) {
    let p = curve.nodes();
    let n = p.len();
    let mut best = (f64::INFINITY, 0, 0.0);
    for i in 0..n {
        let (d, t) = point_segment(x, p[i], p[(i + 1) % n]);
        if d < best.0 {
            best = (d, i, t);
        }
    }
    best
}

fn directed_hausdorff(c1: &ClosedCurve, c2: &ClosedCurve) -> f64 {
    let it = c2.interpolant();
    c1.nodes()
        .iter()
        .map(|&x| curve_point_distance(c2, &it, x).0)
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance, sup over nodes of the distance to the other curve.
pub fn hausdorff_distance(c1: &ClosedCurve, c2: &ClosedCurve) -> f64 {
    directed_hausdorff(c1, c2).max(directed_hausdorff(c2, c1))
}

/// `∫ d(γ₁(s), im γ₂)² ds` over the arclength of `c1` by the trapezoid rule.
pub fn l2_deviation(c1: &ClosedCurve, c2: &ClosedCurve) -> Result<f64> {
    let ds = c1.geometry()?.ds();
    let it = c2.interpolant();
    Ok(c1
        .nodes()
        .iter()
        .map(|&x| curve_point_distance(c2, &it, x).0.powi(2))
        .sum::<f64>()
        * ds)
}

/// True when some pair of segments of the two polygons properly cross.
pub fn polylines_cross(c1: &ClosedCurve, c2: &ClosedCurve) -> bool {
    let (a, b) = (c1.nodes(), c2.nodes());
    let (n, m) = (a.len(), b.len());
    let reach = max_spacing(c1) + max_spacing(c2);
    for i in 0..n {
        let (p0, p1) = (a[i], a[(i + 1) % n]);
        for j in 0..m {
            let (q0, q1) = (b[j], b[(j + 1) % m]);
            if p0.dist(q0) <= reach && segments_cross(p0, p1, q0, q1) {
                return true;
            }
        }
    }
    false
}

/// True when two non-adjacent segments of the polygon properly cross.
pub fn self_crossing(curve: &ClosedCurve) -> bool {
    let a = curve.nodes();
    let n = a.len();
    let reach = 2.0 * max_spacing(curve);
    for i in 0..n {
        let (p0, p1) = (a[i], a[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (q0, q1) = (a[j], a[(j + 1) % n]);
            if p0.dist(q0) <= reach && segments_cross(p0, p1, q0, q1) {
                return true;
            }
        }
    }
    false
}

fn inside(curve: &ClosedCurve, probe: &ClosedCurve) -> Option<bool> {
    probe
        .nodes()
        .iter()
        .find_map(|&x| winding_number(curve, x).ok())
        .map(|w| w != 0)
}

pub fn classify_relation(c1: &ClosedCurve, c2: &ClosedCurve) -> RelationClass {
    if polylines_cross(c1, c2) {
        return RelationClass::Overlapping;
    }
    match (inside(c2, c1), inside(c1, c2)) {
        (None, _) | (_, None) => RelationClass::Overlapping,
        (Some(true), _) => RelationClass::Nested1In2,
        (_, Some(true)) => RelationClass::Nested2In1,
        _ => RelationClass::Disjoint,
    }
}

/// Indices entering `Σ^λ`, and any partners whose boundaries cross λ's.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SigmaSet {
    pub members: Vec<usize>,
    pub overlapping: Vec<usize>,
}

/// `Σ^λ`: same-sign nested partners together with opposite-sign disjoint partners.
/// λ itself is a member. Crossing partners are excluded and listed separately.
pub fn sigma_set(family: &PatchFamily, lambda: usize) -> SigmaSet {
    let mut out = SigmaSet::default();
    let (c, th) = (&family.curves[lambda], family.strengths[lambda]);
    for (mu, (d, tm)) in family.curves.iter().zip(&family.strengths).enumerate() {
        if mu == lambda {
            out.members.push(mu);
            continue;
        }
        let rel = classify_relation(c, d);
        let nested = matches!(rel, RelationClass::Nested1In2 | RelationClass::Nested2In1);
        match rel {
            RelationClass::Overlapping => out.overlapping.push(mu),
            _ if th * tm > 0.0 && nested => out.members.push(mu),
            RelationClass::Disjoint if th * tm < 0.0 => out.members.push(mu),
            _ => {}
        }
    }
    out
}

/// Whether two boundaries are within the discrete touch threshold.
pub fn touching(c1: &ClosedCurve, c2: &ClosedCurve) -> bool {
    pair_distance(c1, c2) < TOUCH_FACTOR * max_spacing(c1).max(max_spacing(c2))
}
