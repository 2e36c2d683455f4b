use gsqg::alignment::align;
use gsqg::curve::{
    c1beta_seminorm, enclosed_area, h2_seminorm, is_positively_oriented, resample_constant_speed, spectral_area,
    transport,
};
use gsqg::lab::{length_bound_ratio, maximal_operator};
use gsqg::metrics::{frechet_distance, hausdorff_distance, max_spacing, pair_distance, self_distance};
use gsqg::scenarios::{doubly_odd_config, make_shape, random_fourier_shape, reflect_x1, reflect_x2, DoublyOddPreset};
use gsqg::velocity::{contour_velocity, KernelSpec, PatchFamily};
use gsqg::{ClosedCurve, Vec2};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_curve(seed: u64, n: usize) -> ClosedCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    make_shape(&random_fourier_shape(&mut rng, 6, 0.15), n).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn constant_speed_and_unit_tangent(seed in any::<u64>()) {
        let c = random_curve(seed, 128);
        let g = c.geometry().unwrap();
        let mean = g.speeds.iter().sum::<f64>() / g.speeds.len() as f64;
        for (s, t) in g.speeds.iter().zip(&g.tangents) {
            prop_assert!((s - mean).abs() <= 1e-6 * mean);
            prop_assert!((t.norm() - 1.0).abs() <= 1e-8);
        }
        prop_assert!(is_positively_oriented(&c));
    }

    #[test]
    fn length_and_tangent_bounds(seed in any::<u64>()) {
        let c = random_curve(seed, 128);
        prop_assert!(length_bound_ratio(&c).unwrap() <= 1.0 + 1e-2);
        let g = c.geometry().unwrap();
        let l = g.length;
        let n = c.len();
        for beta in [0.5, 1.0] {
            let gn = c1beta_seminorm(&c, beta).unwrap();
            prop_assert!(l >= 2f64.powf(1.0 + 0.5 / beta) / gn.powf(1.0 / beta) * (1.0 - 1e-2));
            for i in (0..n).step_by(7) {
                for j in (0..n).step_by(5) {
                    let k = i.abs_diff(j).min(n - i.abs_diff(j));
                    let sep = k as f64 * g.ds();
                    let lhs = g.tangents[i].dot(g.tangents[j]);
                    prop_assert!(lhs >= 1.0 - 0.5 * gn * gn * sep.powf(2.0 * beta) - 1e-6);
                }
            }
        }
    }

    #[test]
    fn frechet_is_pseudometric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (random_curve(a, 128), random_curve(b, 128), random_curve(c, 128));
        let xy = frechet_distance(&x, &y);
        prop_assert_eq!(xy, frechet_distance(&y, &x));
        prop_assert!(frechet_distance(&x, &z) <= xy + frechet_distance(&y, &z) + 1e-12);
        prop_assert!(hausdorff_distance(&x, &y) <= xy + 1e-9);
    }

    #[test]
    fn frechet_ignores_starting_node(seed in any::<u64>(), k in 0usize..128) {
        let x = random_curve(seed, 128);
        prop_assert!(frechet_distance(&x, &x.rotated(k)) <= 1e-12);
    }

    #[test]
    fn window_distance_bounded_by_window(seed in any::<u64>(), frac in 0.01f64..1.0) {
        let c = random_curve(seed, 128);
        let l = c.length().unwrap();
        let h = frac * 0.5 * l;
        let d = self_distance(&c, h).unwrap();
        prop_assert!(d > 0.0);
        prop_assert!(d <= h + 2.0 * max_spacing(&c));
    }

    #[test]
    fn length_area_window(seed in any::<u64>()) {
        let c = random_curve(seed, 128);
        let l = c.length().unwrap();
        let h = c1beta_seminorm(&c, 0.5).unwrap().powi(-2).min(0.5 * l);
        let d = self_distance(&c, h).unwrap();
        prop_assert!(l <= 30.0 * enclosed_area(&c) / d * (1.0 + 1e-2));
    }

    #[test]
    fn velocity_linear_in_strength(seed in any::<u64>(), x in -3.0f64..3.0, y in 2.0f64..3.0) {
        let c = random_curve(seed, 128);
        let spec = KernelSpec::default();
        let f1 = PatchFamily::new(vec![c.clone()], vec![1.0]).unwrap();
        let f2 = PatchFamily::new(vec![c], vec![2.0]).unwrap();
        let p = Vec2::new(x, y);
        let (u1, u2) = (contour_velocity(&f1, &spec, p).unwrap(), contour_velocity(&f2, &spec, p).unwrap());
        prop_assert_eq!(u1 * 2.0, u2);
    }

    #[test]
    fn transport_conserves_area_to_first_order(seed in any::<u64>(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let c = random_curve(seed, 256);
        // Divergence-free field from the stream function a·x·y + b·sin(x)cos(y).
        let field = |p: Vec2| Vec2::new(a * p.x - b * p.x.sin() * p.y.sin(), -a * p.y - b * p.x.cos() * p.y.cos());
        let a0 = spectral_area(&c);
        let d1 = (spectral_area(&transport(&c, field, 1e-3)) - a0).abs();
        let d2 = (spectral_area(&transport(&c, field, 5e-4)) - a0).abs();
        prop_assert!(d2 <= 0.3 * d1 + 1e-12, "{d1:e} {d2:e}");
    }

    #[test]
    fn maximal_operator_dominates(f in prop::collection::vec(-10.0f64..10.0, 2..200)) {
        let m = maximal_operator(&f);
        for (a, b) in f.iter().zip(&m) {
            prop_assert!(b + 1e-12 >= a.abs());
        }
        let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(l2(&m) <= 4.0 * l2(&f) + 1e-12);
    }

    #[test]
    fn resampling_is_stable(seed in any::<u64>()) {
        let c = random_curve(seed, 128);
        let r = resample_constant_speed(&c, 128).unwrap();
        prop_assert!(hausdorff_distance(&c, &r) <= 1e-8);
    }

    #[test]
    fn generated_curves_are_simple(seed in any::<u64>()) {
        let c = random_curve(seed, 128);
        prop_assert!(is_positively_oriented(&c));
        prop_assert!(self_distance(&c, 0.1 * c.length().unwrap()).unwrap() > 0.0);
        prop_assert!(h2_seminorm(&c).unwrap().is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn alignment_flow_decreases_distance(seed in any::<u64>(), amp in 0.001f64..0.01) {
        let c1 = random_curve(seed, 128);
        let c2 = c1.map_nodes(|p| p * (1.0 + amp));
        let c2 = resample_constant_speed(&c2, 128).unwrap();
        let res = align(&c1, &c2).unwrap();
        prop_assert!(res.monotone_decrease);
        prop_assert!(res.decay_ok);
        prop_assert!(res.residual <= 1e-8);
        prop_assert!(res.phi_prime_range.0 >= 1.0 / 3.0 && res.phi_prime_range.1 <= 3.0);
    }

    #[test]
    fn doubly_odd_family_is_reflection_fixed(radius in 0.2f64..0.6, sep in 0.05f64..0.3, gap in 0.01f64..0.1) {
        let pre = DoublyOddPreset { radius, separation: sep, axis_gap: gap, ..DoublyOddPreset::default() };
        let fam = pre.family(64).unwrap();
        for reflect in [reflect_x1, reflect_x2] {
            for (c, th) in fam.curves.iter().zip(&fam.strengths) {
                let m = reflect(c).unwrap();
                let hit = fam.curves.iter().zip(&fam.strengths).any(|(d, t)| {
                    *t == -th && hausdorff_distance(&m, d) < 1e-12
                });
                prop_assert!(hit);
            }
        }
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                prop_assert!(pair_distance(&fam.curves[i], &fam.curves[j]) > 0.0);
            }
        }
        let base = pre.base(64).unwrap();
        prop_assert_eq!(doubly_odd_config(&base).unwrap().len(), 4);
    }
}
