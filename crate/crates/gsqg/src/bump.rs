//! Smooth compactly supported profiles shared by the kernel cutoff, the curve
//! mollifier and the partition of unity.

/// `exp(-1/u)` for `u > 0`, else 0.
#[inline]
fn e(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

#[inline]
fn de(u: f64) -> f64 {
    if u > 0.0 {
        e(u) / (u * u)
    } else {
        0.0
    }
}

/// C^∞ monotone step: 0 for `u ≤ 0`, 1 for `u ≥ 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let (a, b) = (e(u), e(1.0 - u));
        a / (a + b)
    }
}

pub fn smooth_step_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let (a, b) = (e(u), e(1.0 - u));
        let (da, db) = (de(u), de(1.0 - u));
        (da * b + a * db) / ((a + b) * (a + b))
    }
}

/// Unnormalized bump `exp(-1/(1-t²))` on (-1, 1).
pub fn bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Integral of [`bump`] over (-1, 1).
pub fn bump_mass() -> f64 {
    // Composite Gauss–Legendre; the integrand is flat at the ends.
    let panels = 64;
    (0..panels)
        .map(|k| {
            let a = -1.0 + 2.0 * k as f64 / panels as f64;
            crate::spline::gauss_legendre8(a, a + 2.0 / panels as f64, bump)
        })
        .sum()
}

/// Integral of [`bump`]² over (-1, 1).
pub fn bump_l2_sq() -> f64 {
    let panels = 64;
    (0..panels)
        .map(|k| {
            let a = -1.0 + 2.0 * k as f64 / panels as f64;
            crate::spline::gauss_legendre8(a, a + 2.0 / panels as f64, |t| bump(t).powi(2))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_monotone_and_symmetric() {
        let mut last = 0.0;
        for i in 0..=1000 {
            let u = i as f64 / 1000.0;
            let v = smooth_step(u);
            assert!(v >= last);
            assert!((v + smooth_step(1.0 - u) - 1.0).abs() < 1e-14);
            last = v;
        }
        let h = 1e-6;
        for u in [0.1, 0.37, 0.5, 0.9] {
            let fd = (smooth_step(u + h) - smooth_step(u - h)) / (2.0 * h);
            assert!((fd - smooth_step_deriv(u)).abs() < 1e-6);
        }
    }

    #[test]
    fn bump_mass_value() {
        // Known value of ∫ exp(-1/(1-t²)) dt over (-1, 1).
        assert!((bump_mass() - 0.443_993_816_168_079_4).abs() < 1e-12);
    }
}
