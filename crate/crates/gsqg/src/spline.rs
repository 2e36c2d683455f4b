//! Periodic cubic spline through plane points, parametrized by cumulative chord length.

use crate::vec2::Vec2;

/// Gauss–Legendre nodes and weights on [-1, 1], 8 points.
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

pub fn gauss_legendre8(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    GL8_X.iter().zip(GL8_W.iter()).map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// Solves the cyclic tridiagonal system `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`
/// (indices mod n) by the Sherman–Morrison correction of the Thomas algorithm.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= sup[n - 1] * sub[0] / gamma;
    let x = thomas(sub, &d, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    let z = thomas(sub, &d, sup, &u);
    let fact = (x[0] + sub[0] * x[n - 1] / gamma) / (1.0 + z[0] + sub[0] * z[n - 1] / gamma);
    x.iter().zip(z.iter()).map(|(a, b)| a - fact * b).collect()
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[derive(Clone, Debug)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    pts: Vec<Vec2>,
    m: Vec<Vec2>,
    period: f64,
}

impl PeriodicSpline {
    /// Requires at least 3 points with no coincident neighbours.
    pub fn new(pts: &[Vec2]) -> Self {
        let n = pts.len();
        let h: Vec<f64> = (0..n).map(|i| pts[(i + 1) % n].dist(pts[i])).collect();
        let mut knots = Vec::with_capacity(n);
        let mut acc = 0.0;
        for hi in &h {
            knots.push(acc);
            acc += hi;
        }
        let period = acc;
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rx = vec![0.0; n];
        let mut ry = vec![0.0; n];
        for i in 0..n {
            let hp = h[(i + n - 1) % n];
            let hi = h[i];
            sub[i] = hp;
            diag[i] = 2.0 * (hp + hi);
            sup[i] = hi;
            let s1 = (pts[(i + 1) % n] - pts[i]) * (1.0 / hi);
            let s0 = (pts[i] - pts[(i + n - 1) % n]) * (1.0 / hp);
            let r = (s1 - s0) * 6.0;
            rx[i] = r.x;
            ry[i] = r.y;
        }
        let mx = solve_cyclic(&sub, &diag, &sup, &rx);
        let my = solve_cyclic(&sub, &diag, &sup, &ry);
        let m = mx.into_iter().zip(my).map(|(x, y)| Vec2::new(x, y)).collect();
        PeriodicSpline { knots, pts: pts.to_vec(), m, period }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn segments(&self) -> usize {
        self.pts.len()
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.knots[i]
    }

    fn seg_len(&self, i: usize) -> f64 {
        let n = self.pts.len();
        if i + 1 < n {
            self.knots[i + 1] - self.knots[i]
        } else {
            self.period - self.knots[i]
        }
    }

    /// Position and derivative on segment `i` at local offset `u ∈ [0, h_i]`.
    pub fn eval_segment(&self, i: usize, u: f64) -> (Vec2, Vec2) {
        let n = self.pts.len();
        let j = (i + 1) % n;
        let h = self.seg_len(i);
        let a = h - u;
        let (p0, p1, m0, m1) = (self.pts[i], self.pts[j], self.m[i], self.m[j]);
        let pos = m0 * (a * a * a / (6.0 * h))
            + m1 * (u * u * u / (6.0 * h))
            + (p0 * (1.0 / h) - m0 * (h / 6.0)) * a
            + (p1 * (1.0 / h) - m1 * (h / 6.0)) * u;
        let der = m0 * (-a * a / (2.0 * h)) + m1 * (u * u / (2.0 * h)) + (p1 - p0) * (1.0 / h)
            - (m1 - m0) * (h / 6.0);
        (pos, der)
    }

    /// Arclength of segment `i` between local offsets 0 and `u`.
    pub fn arc_on_segment(&self, i: usize, u: f64) -> f64 {
        // Two panels keep the 8-point rule accurate for mildly curved segments.
        let half = 0.5 * u;
        let f = |t: f64| self.eval_segment(i, t).1.norm();
        gauss_legendre8(0.0, half, f) + gauss_legendre8(half, u, f)
    }

    /// Cumulative arclength at the start of every segment, plus the total as last entry.
    pub fn arclength_table(&self) -> Vec<f64> {
        let n = self.pts.len();
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for i in 0..n {
            out.push(acc);
            acc += self.arc_on_segment(i, self.seg_len(i));
        }
        out.push(acc);
        out
    }

    /// Point at arclength `s` measured from the first knot, given the table from
    /// [`arclength_table`](Self::arclength_table).
    pub fn point_at_arclength(&self, table: &[f64], s: f64) -> Vec2 {
        let n = self.pts.len();
        let total = table[n];
        let s = s.rem_euclid(total);
        let i = match table[..n].binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let target = s - table[i];
        let h = self.seg_len(i);
        let seg_arc = table[i + 1] - table[i];
        let mut u = h * target / seg_arc;
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..50 {
            let g = self.arc_on_segment(i, u) - target;
            if g > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let sp = self.eval_segment(i, u).1.norm();
            let mut next = u - g / sp;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() < 1e-15 * h.max(1.0) {
                u = next;
                break;
            }
            u = next;
        }
        self.eval_segment(i, u).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let v = gauss_legendre8(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn spline_interpolates_and_approximates_circle() {
        let pts: Vec<Vec2> = (0..40)
            .map(|j| {
                let t = TAU * j as f64 / 40.0;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        let sp = PeriodicSpline::new(&pts);
        for i in 0..40 {
            assert!((sp.eval_segment(i, 0.0).0 - pts[i]).norm() < 1e-12);
            let (p, _) = sp.eval_segment(i, 0.5 * sp.seg_len(i));
            assert!((p.norm() - 1.0).abs() < 1e-5);
        }
        let table = sp.arclength_table();
        assert!((table[40] - TAU).abs() < 1e-4);
        let q = sp.point_at_arclength(&table, table[40] / 4.0);
        assert!((q - Vec2::new(0.0, 1.0)).norm() < 1e-4);
    }
}
