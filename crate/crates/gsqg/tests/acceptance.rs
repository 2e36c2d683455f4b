//! End-to-end acceptance checks. Each test prints one `criterion N ... PASS|FAIL` line
//! with the measured values before asserting.

use gsqg::alignment::{align, check_alignment};
use gsqg::curve::{c1beta_seminorm, spectral_area};
use gsqg::dynamics::{ddt_h2, run_state, step_with, RunOptions, RunReport, RunStatus, SimState};
use gsqg::lab::{check_suite, length_bound_ratio};
use gsqg::metrics::{frechet_distance, pair_distance, point_polyline_distance};
use gsqg::scenarios::{
    check_perturbation, make_shape, perturb_inward, perturbation_bound, random_fourier_shape, separate_nested,
    DoublyOddPreset, Shape,
};
use gsqg::velocity::{area_velocity, contour_velocity, velocity_on_boundary, KernelSpec, PatchFamily};
use gsqg::{ClosedCurve, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: usize, name: &str, pass: bool, detail: String) {
    println!("criterion {n:>2} {name:<26} {}  {detail}", if pass { "PASS" } else { "FAIL" });
}

fn spec(alpha: f64, eps: f64) -> KernelSpec {
    KernelSpec { alpha, epsilon: eps, ..KernelSpec::default() }
}

fn integrate(fam: PatchFamily, eps: f64, t_end: f64, dt_max: f64, every: usize) -> RunReport {
    let opts = RunOptions { t_end, cfl: 0.5, dt_max, output_every: every, ceiling_l: None };
    run_state(SimState::new(fam, spec(1.0 / 6.0, eps)).unwrap(), &opts, |_, _| Ok(())).unwrap()
}

fn circle(r: f64, c: [f64; 2], n: usize) -> ClosedCurve {
    make_shape(&Shape::Circle { radius: r, center: c }, n).unwrap()
}

/// Random Fourier boundary with mean radius `r0` around `center`.
fn random_patch(rng: &mut ChaCha8Rng, r0: f64, center: [f64; 2], n: usize) -> ClosedCurve {
    let Shape::Fourier { cos, sin, .. } = random_fourier_shape(rng, 6, 0.15) else { unreachable!() };
    let shape = Shape::Fourier {
        r0,
        cos: cos.iter().map(|c| c * r0).collect(),
        sin: sin.iter().map(|c| c * r0).collect(),
        center,
    };
    make_shape(&shape, n).unwrap()
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> PatchFamily {
    let r1 = rng.gen_range(0.6..1.0);
    let r2 = rng.gen_range(0.3..0.6);
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let dist = 1.3 * (r1 + r2) + 0.2;
    let a = random_patch(rng, r1, [0.0, 0.0], n);
    let b = random_patch(rng, r2, [dist * angle.cos(), dist * angle.sin()], n);
    let s = |rng: &mut ChaCha8Rng| rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let (t1, t2) = (s(rng), s(rng));
    PatchFamily::new(vec![a, b], vec![t1, t2]).unwrap()
}

#[test]
fn c01_area_conservation() {
    let drift = |n: usize, dt: f64| {
        let c = make_shape(&Shape::Ellipse { a: 2.0, b: 1.0, center: [0.0, 0.0], angle: 0.0 }, n).unwrap();
        let fam = PatchFamily::new(vec![c], vec![1.0]).unwrap();
        let a0 = spectral_area(&fam.curves[0]);
        let rep = integrate(fam, 0.1, 1.0, dt, usize::MAX);
        assert_eq!(rep.status, RunStatus::Ok);
        ((spectral_area(&rep.final_state.family.curves[0]) - a0) / a0).abs()
    };
    let base = drift(256, f64::INFINITY);
    let coarse = drift(256, 0.005);
    let fine = drift(512, 0.0025);
    let pass = base <= 1e-3 && coarse <= 1e-3 && coarse >= 4.0 * fine;
    report(
        1,
        "area conservation",
        pass,
        format!("drift {base:.3e} (CFL), {coarse:.3e} (dt 5e-3), {fine:.3e} (2N, dt/2), reduction {:.1}x", coarse / fine),
    );
    assert!(pass);
}

#[test]
fn c02_rotating_circle() {
    let fam = PatchFamily::new(vec![circle(1.0, [0.0, 0.0], 256)], vec![1.0]).unwrap();
    let rep = integrate(fam, 0.1, 1.0, f64::INFINITY, usize::MAX);
    let st = &rep.final_state;
    let c = &st.family.curves[0];
    let radial = c.nodes().iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
    let u = velocity_on_boundary(&st.family, &st.spec, 0);
    let g = c.geometry().unwrap();
    let ut: Vec<f64> = u.iter().zip(&g.tangents).map(|(u, t)| u.dot(*t)).collect();
    let mean = ut.iter().sum::<f64>() / ut.len() as f64;
    let spread = ut.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs();
    let pass = rep.status == RunStatus::Ok && radial <= 1e-3 && spread <= 1e-3;
    report(2, "relative equilibrium", pass, format!("radial deviation {radial:.3e}, tangential spread {spread:.3e}"));
    assert!(pass);
}

#[test]
fn c03_h2_derivative_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dt = 1e-3;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let fam = random_pair(&mut rng, 128);
        let s = SimState::new(fam, spec(1.0 / 6.0, 0.1)).unwrap();
        let fwd = step_with(&s, dt, 1.0, None).unwrap();
        let mut back = s.clone();
        back.family = s.family.scaled(-1.0);
        let bwd = step_with(&back, dt, 1.0, None).unwrap();
        for lam in 0..2 {
            let sq = |st: &SimState| gsqg::curve::h2_seminorm(&st.family.curves[lam]).unwrap().powi(2);
            let fd = (sq(&fwd) - sq(&bwd)) / (2.0 * dt);
            let exact = ddt_h2(&s, lam).unwrap();
            worst = worst.max((fd - exact).abs() / exact.abs());
        }
    }
    let pass = worst <= 1e-2;
    report(3, "h2 derivative formula", pass, format!("worst relative error {worst:.3e} over 20 boundaries"));
    assert!(pass);
}

#[test]
fn c04_contour_vs_area_velocity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = spec(1.0 / 6.0, 0.0);
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut fam = random_pair(&mut rng, 512);
    while count < 100 {
        if count % 20 == 0 {
            fam = random_pair(&mut rng, 512);
        }
        let (mut lo, mut hi) = fam.curves[0].bbox();
        for c in &fam.curves {
            let (a, b) = c.bbox();
            lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        let x = Vec2::new(rng.gen_range(lo.x - 0.5..hi.x + 0.5), rng.gen_range(lo.y - 0.5..hi.y + 0.5));
        if fam.curves.iter().any(|c| point_polyline_distance(c, x).0 < 0.05) {
            continue;
        }
        let u = contour_velocity(&fam, &s, x).unwrap();
        let a = area_velocity(&fam, &s, x, 512);
        worst = worst.max((u - a).norm() / a.norm());
        count += 1;
    }
    let pass = worst <= 1e-4;
    report(4, "contour vs area velocity", pass, format!("worst relative difference {worst:.3e} at 100 points"));
    assert!(pass);
}

#[test]
fn c05_mollification_rate() {
    let c = make_shape(&Shape::Ellipse { a: 1.0, b: 0.6, center: [0.0, 0.0], angle: 0.0 }, 2048).unwrap();
    let fam = PatchFamily::new(vec![c], vec![1.0]).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for alpha in [1.0 / 12.0, 1.0 / 6.0] {
        let u0 = velocity_on_boundary(&fam, &spec(alpha, 0.0), 0);
        let eps = [0.2, 0.1, 0.05, 0.025];
        let pts: Vec<(f64, f64)> = eps
            .iter()
            .map(|&e| {
                let u = velocity_on_boundary(&fam, &spec(alpha, e), 0);
                let err = u.iter().zip(&u0).map(|(a, b)| a.dist(*b)).fold(0.0, f64::max);
                (e.ln(), err.ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        let need = 0.9 * (1.0 - 2.0 * alpha);
        pass &= slope >= need;
        detail.push(format!("alpha {alpha:.4}: slope {slope:.3} (need {need:.3})"));
    }
    report(5, "mollification rate", pass, detail.join(", "));
    assert!(pass);
}

#[test]
fn c06_inequality_suite() {
    let rep = check_suite(0, 100).unwrap();
    let failures: usize = rep.checks.iter().map(|c| c.failures).sum();
    let ratio = length_bound_ratio(&circle(1.0, [0.0, 0.0], 256)).unwrap();
    let pass = rep.all_passed() && rep.checks.len() == 11 && (ratio - 1.0).abs() <= 1e-3;
    report(
        6,
        "inequality suite",
        pass,
        format!("{} checks, {failures} violations, circle saturation {ratio:.6}", rep.checks.len()),
    );
    if !pass {
        print!("{}", rep.table());
    }
    assert!(pass);
}

#[test]
fn c07_perturbation_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = 1.0 / 16.0;
    let mut ok = 0;
    for _ in 0..20 {
        let curve = random_patch(&mut rng, 1.0, [0.0, 0.0], 1024);
        let h = c1beta_seminorm(&curve, 0.5).unwrap().powi(-2);
        let eps = perturbation_bound(&curve, h, c).unwrap().eps0 / 2.0;
        let out = perturb_inward(&curve, h, c, eps).unwrap();
        let chk = check_perturbation(&curve, &out, h, c, eps).unwrap();
        if chk.passed.iter().all(|&p| p) {
            ok += 1;
        } else {
            println!("perturbation check failed: {chk:?}");
        }
    }
    let circles: Vec<ClosedCurve> =
        [(1.0, 0.0), (2.0, -1.0), (3.0, -2.0)].iter().map(|&(r, cx)| circle(r, [cx, 0.0], 256)).collect();
    let eps = circles
        .iter()
        .map(|k| perturbation_bound(k, c1beta_seminorm(k, 0.5).unwrap().powi(-2), c).unwrap().eps0)
        .fold(f64::INFINITY, f64::min);
    let sep = separate_nested(&circles, eps).unwrap();
    let mut min_gap = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            min_gap = min_gap.min(pair_distance(&sep[i], &sep[j]));
        }
    }
    let pass = ok == 20 && min_gap > 0.0;
    report(7, "perturbation construction", pass, format!("{ok}/20 curves pass all four, nested triple min gap {min_gap:.3e}"));
    assert!(pass);
}

#[test]
fn c08_alignment() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = 0;
    let mut worst_res = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..20 {
        let Shape::Fourier { r0, cos, sin, center } = random_fourier_shape(&mut rng, 6, 0.15) else { unreachable!() };
        let amp = rng.gen_range(1e-3..1e-2);
        let mut jitter = |v: &[f64]| -> Vec<f64> {
            (0..6).map(|k| v.get(k).copied().unwrap_or(0.0) + amp * rng.gen_range(-1.0..1.0) / (k + 1) as f64).collect()
        };
        let other = Shape::Fourier { r0, cos: jitter(&cos), sin: jitter(&sin), center };
        let a = make_shape(&Shape::Fourier { r0, cos, sin, center }, 256).unwrap();
        let b = make_shape(&other, 256).unwrap();
        let res = align(&a, &b).unwrap();
        let chk = check_alignment(&a, &b, &res, 0.1).unwrap();
        worst_res = worst_res.max(res.residual);
        lo = lo.min(res.phi_prime_range.0);
        hi = hi.max(res.phi_prime_range.1);
        let good = res.residual <= 1e-8
            && res.phi_prime_range.0 >= 1.0 / 3.0
            && res.phi_prime_range.1 <= 3.0
            && res.monotone_decrease
            && chk.passed.iter().all(|&p| p);
        if good {
            ok += 1;
        } else {
            println!("alignment check failed: residual {:e}, {chk:?}", res.residual);
        }
    }
    let id = random_patch(&mut rng, 1.0, [0.0, 0.0], 256);
    let res = align(&id, &id).unwrap();
    let ds = id.length().unwrap() / 256.0;
    let id_err = res
        .phi
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = (p - i as f64 * ds).abs();
            d.min(id.length().unwrap() - d)
        })
        .fold(0.0, f64::max);
    let pass = ok == 20 && res.residual <= 1e-12 && id_err <= 1e-9;
    report(
        8,
        "alignment",
        pass,
        format!(
            "{ok}/20 pairs, worst residual {worst_res:.3e}, phi' in [{lo:.4}, {hi:.4}], identity residual {:.1e}",
            res.residual
        ),
    );
    assert!(pass);
}

#[test]
fn c09_doubly_odd_symmetry() {
    let n = 256;
    let run = |swap: bool| {
        let fam = DoublyOddPreset { swap_halves: swap, ..DoublyOddPreset::default() }.family(n).unwrap();
        integrate(fam, 0.1, 0.5, f64::INFINITY, 1)
    };
    let a = run(false);
    let b = run(true);
    let c = &a.final_state.family.curves;
    let mirror = |p: Vec2, x: bool| if x { Vec2::new(p.x, -p.y) } else { Vec2::new(-p.x, p.y) };
    let mut err = 0.0f64;
    // Patch order: right, left, then their reflections across the horizontal axis.
    for j in 0..n {
        let m = (n - j) % n;
        err = err.max(c[2].nodes()[j].dist(mirror(c[0].nodes()[m], true)));
        err = err.max(c[3].nodes()[j].dist(mirror(c[1].nodes()[m], true)));
        err = err.max(c[1].nodes()[j].dist(mirror(c[0].nodes()[m], false)));
    }
    let mut series = 0.0f64;
    let same_len = a.records.len() == b.records.len();
    for (x, y) in a.records.iter().zip(&b.records) {
        series = series.max((x.q - y.q).abs() / x.q).max((x.l - y.l).abs() / x.l).max((x.t - y.t).abs());
    }
    let pass = a.status == RunStatus::Ok && err <= 1e-6 && same_len && series <= 1e-10;
    report(
        9,
        "doubly-odd symmetry",
        pass,
        format!("mirror error {err:.3e}, exchange difference {series:.3e} over {} records", a.records.len()),
    );
    assert!(pass);
}

#[test]
fn c10_epsilon_stability() {
    let fam = || {
        let e = make_shape(&Shape::Ellipse { a: 0.8, b: 0.5, center: [0.0, 0.0], angle: 0.4 }, 256).unwrap();
        let c = circle(0.4, [1.7, 0.3], 256);
        PatchFamily::new(vec![e, c], vec![1.0, 0.8]).unwrap()
    };
    let finals: Vec<PatchFamily> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&e| {
            let r = integrate(fam(), e, 0.5, f64::INFINITY, usize::MAX);
            assert_eq!(r.status, RunStatus::Ok);
            r.final_state.family
        })
        .collect();
    let d: Vec<f64> = finals
        .windows(2)
        .map(|w| w[0].curves.iter().zip(&w[1].curves).map(|(a, b)| frechet_distance(a, b)).fold(0.0, f64::max))
        .collect();
    let pass = d[0] > d[1] && d[1] > d[2];
    report(10, "epsilon stability", pass, format!("d_F sequence {:.3e}, {:.3e}, {:.3e}", d[0], d[1], d[2]));
    assert!(pass);
}

#[test]
fn c11_growth_monitor() {
    let scenarios: Vec<(&str, Box<dyn Fn(usize) -> PatchFamily>)> = vec![
        ("circle", Box::new(|n| PatchFamily::new(vec![circle(1.0, [0.0, 0.0], n)], vec![1.0]).unwrap())),
        (
            "two circles",
            Box::new(|n| {
                PatchFamily::new(vec![circle(0.5, [-1.0, 0.0], n), circle(0.5, [1.0, 0.0], n)], vec![1.0, 1.0]).unwrap()
            }),
        ),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, make) in &scenarios {
        let coarse = integrate(make(128), 0.1, 0.5, 0.01, 1);
        let fine = integrate(make(256), 0.1, 0.5, 0.005, 1);
        let (a, b) = (coarse.growth_summary.fitted_c, fine.growth_summary.fitted_c);
        let change = if a == 0.0 && b == 0.0 { 1.0 } else { a.max(b) / a.min(b) };
        pass &= coarse.status == RunStatus::Ok && fine.status == RunStatus::Ok && change <= 2.0;
        detail.push(format!("{name}: C {a:.3e} -> {b:.3e} (x{change:.3})"));
    }
    report(11, "growth monitor", pass, detail.join(", "));
    assert!(pass);
}
