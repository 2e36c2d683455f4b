//! Time integration of the mollified patch evolution and its diagnostics.

use crate::config::SimConfig;
use crate::curve::{
    c1beta_seminorm, h2_seminorm, resample_constant_speed, spectral_area, ClosedCurve,
};
use crate::error::{Error, Result};
use crate::metrics::{pair_distance, polylines_cross, self_crossing, self_distance, sigma_set, touching};
use crate::scenarios::{perturb_inward, perturbation_bound};
use crate::spectral;
use crate::vec2::Vec2;
use crate::velocity::{KernelSpec, PatchFamily, VelocityField};
use serde::Serialize;

/// Relative change of L below which a finite difference is treated as zero.
pub const GROWTH_NOISE_FLOOR: f64 = 1e-10;
/// Order of the exponential filter applied to node positions after every step.
pub const FILTER_ORDER: i32 = 36;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub areas: Vec<f64>,
    pub h2: Vec<f64>,
    pub u_inf: f64,
    /// `+∞` when every partner lies in Σ.
    pub min_pair_delta: f64,
    /// `+∞` when `1/Q` exceeds half of every length.
    pub min_self_delta: f64,
    /// NaN before the first step.
    pub growth_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub family: PatchFamily,
    pub spec: KernelSpec,
    pub diagnostics: Option<DiagnosticsRecord>,
}

impl SimState {
    pub fn new(family: PatchFamily, spec: KernelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(SimState { t: 0.0, family, spec, diagnostics: None })
    }

    /// Smallest node spacing over all curves.
    pub fn min_spacing(&self) -> f64 {
        self.family
            .curves
            .iter()
            .map(|c| c.geometry().map(|g| g.ds()).unwrap_or(f64::INFINITY))
            .fold(f64::INFINITY, f64::min)
    }
}

fn boundary_velocity(curves: &[ClosedCurve], strengths: &[f64], spec: &KernelSpec) -> Vec<Vec<Vec2>> {
    let fam = PatchFamily::new_unchecked(curves.to_vec(), strengths.to_vec());
    VelocityField::new(&fam, spec).on_all_boundaries()
}

/// Velocity at every node of every curve.
pub fn rhs(state: &SimState) -> Vec<Vec<Vec2>> {
    boundary_velocity(&state.family.curves, &state.family.strengths, &state.spec)
}

fn sup_norm(vel: &[Vec<Vec2>]) -> f64 {
    vel.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Largest step allowed by the CFL condition for the given boundary velocity.
pub fn cfl_limit(state: &SimState, vel: &[Vec<Vec2>], cfl: f64) -> f64 {
    let u = sup_norm(vel);
    if u == 0.0 {
        f64::INFINITY
    } else {
        cfl * state.min_spacing() / u
    }
}

/// One RK4 step followed by constant-speed resampling, with the default CFL number.
pub fn step(state: &SimState, dt: f64) -> Result<SimState> {
    step_with(state, dt, 0.5, None)
}

/// RK4 step; `k1` may carry the already computed boundary velocity of `state`.
pub fn step_with(state: &SimState, dt: f64, cfl: f64, k1: Option<&[Vec<Vec2>]>) -> Result<SimState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("time step {dt} must be positive")));
    }
    let owned;
    let k1 = match k1 {
        Some(k) => k,
        None => {
            owned = rhs(state);
            &owned
        }
    };
    let limit = cfl_limit(state, k1, cfl);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepRejected { dt, limit });
    }
    let strengths = &state.family.strengths;
    let base = &state.family.curves;
    let stage = |k: &[Vec<Vec2>], a: f64| -> Result<Vec<ClosedCurve>> {
        base.iter()
            .zip(k)
            .map(|(c, v)| ClosedCurve::from_nodes(c.nodes().iter().zip(v).map(|(p, u)| *p + *u * a).collect()))
            .collect()
    };
    let k2 = boundary_velocity(&stage(k1, 0.5 * dt)?, strengths, &state.spec);
    let k3 = boundary_velocity(&stage(&k2, 0.5 * dt)?, strengths, &state.spec);
    let k4 = boundary_velocity(&stage(&k3, dt)?, strengths, &state.spec);
    let t = state.t + dt;
    let mut curves = Vec::with_capacity(base.len());
    for (l, c) in base.iter().enumerate() {
        let nodes: Vec<Vec2> = (0..c.len())
            .map(|i| c.nodes()[i] + (k1[l][i] + (k2[l][i] + k3[l][i]) * 2.0 + k4[l][i]) * (dt / 6.0))
            .collect();
        let nodes = spectral::exponential_filter(&nodes, FILTER_ORDER);
        let moved = ClosedCurve::from_nodes(nodes)
            .map_err(|e| Error::TopologyBreach { t, what: format!("curve {l}: {e}") })?;
        let res = resample_constant_speed(&moved, c.len())
            .map_err(|e| Error::TopologyBreach { t, what: format!("curve {l}: {e}") })?;
        if self_crossing(&res) {
            return Err(Error::TopologyBreach { t, what: format!("curve {l} crosses itself") });
        }
        curves.push(res);
    }
    for a in 0..curves.len() {
        for b in a + 1..curves.len() {
            if polylines_cross(&curves[a], &curves[b]) {
                return Err(Error::TopologyBreach { t, what: format!("curves {a} and {b} cross") });
            }
        }
    }
    Ok(SimState {
        t,
        family: PatchFamily::new_unchecked(curves, strengths.clone()),
        spec: state.spec,
        diagnostics: None,
    })
}

/// Q, W, L and the supporting quantities for the current state.
pub fn functionals(state: &SimState) -> Result<DiagnosticsRecord> {
    functionals_with(state, &rhs(state))
}

/// As [`functionals`], reusing a boundary velocity of `state` for `u_inf`.
pub fn functionals_with(state: &SimState, vel: &[Vec<Vec2>]) -> Result<DiagnosticsRecord> {
    let fam = &state.family;
    let m = fam.min_strength();
    let h2 = fam.curves.iter().map(h2_seminorm).collect::<Result<Vec<_>>>()?;
    let areas: Vec<f64> = fam.curves.iter().map(spectral_area).collect();
    let q = fam.strengths.iter().zip(&h2).map(|(t, h)| t.abs() * h * h).sum::<f64>() / m;
    let w = areas.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut min_self = f64::INFINITY;
    let mut min_pair = f64::INFINITY;
    let mut pair_cache = vec![vec![f64::NAN; fam.len()]; fam.len()];
    for lam in 0..fam.len() {
        let c = &fam.curves[lam];
        if 1.0 / q <= 0.5 * c.length()? {
            min_self = min_self.min(self_distance(c, 1.0 / q)?);
        }
        let sigma = sigma_set(fam, lam);
        for mu in 0..fam.len() {
            if sigma.members.contains(&mu) {
                continue;
            }
            let (a, b) = (lam.min(mu), lam.max(mu));
            if pair_cache[a][b].is_nan() {
                pair_cache[a][b] = pair_distance(&fam.curves[a], &fam.curves[b]);
            }
            min_pair = min_pair.min(pair_cache[a][b]);
        }
    }
    let inv = |d: f64| if d.is_finite() { 1.0 / d } else { 0.0 };
    let l = (2.0 * q).max(inv(min_self)).max(inv(min_pair));
    Ok(DiagnosticsRecord {
        t: state.t,
        q,
        w,
        l,
        areas,
        h2,
        u_inf: sup_norm(vel),
        min_pair_delta: min_pair,
        min_self_delta: min_self,
        growth_ratio: f64::NAN,
    })
}

/// `∂_t‖z^λ‖²_{Ḣ²} = 2∮κ(∂_s²u·N)ds − 3∮κ²(∂_su·T)ds` from spectral derivatives of
/// the sampled boundary velocity.
pub fn ddt_h2(state: &SimState, lam: usize) -> Result<f64> {
    if !(state.spec.epsilon > 0.0) {
        return Err(Error::InvalidInput("the derivative formula needs epsilon > 0".into()));
    }
    let c = state
        .family
        .curves
        .get(lam)
        .ok_or_else(|| Error::InvalidInput(format!("no curve with index {lam}")))?;
    c.geometry()?;
    let u = VelocityField::new(&state.family, &state.spec).on_boundary(lam);
    Ok(ddt_h2_from_velocity(c, &u)?)
}

/// Derivative formula for a given velocity sampled at the nodes of `c`.
pub fn ddt_h2_from_velocity(c: &ClosedCurve, u: &[Vec2]) -> Result<f64> {
    let g = c.geometry()?;
    let (d1, d2) = spectral::derivatives12(u);
    let l = g.length;
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    for i in 0..c.len() {
        let k = g.curvature[i];
        i1 += k * d2[i].dot(g.normals[i]) / (l * l);
        i2 += k * k * d1[i].dot(g.tangents[i]) / l;
    }
    Ok((2.0 * i1 - 3.0 * i2) * g.ds())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    TopologyBreach,
    CeilingHit,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub output_every: usize,
    /// Absolute ceiling on L; `None` means 10³·L(0).
    pub ceiling_l: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { t_end: 1.0, cfl: 0.5, dt_max: f64::INFINITY, output_every: 10, ceiling_l: None }
    }
}

impl RunOptions {
    pub fn from_config(c: &SimConfig) -> Self {
        RunOptions {
            t_end: c.t_end,
            cfl: c.cfl,
            dt_max: c.dt_max.unwrap_or(f64::INFINITY),
            output_every: c.output_every,
            ceiling_l: c.ceiling_l,
        }
    }
}

/// Summary of `∂_t⁺L / L^{3+2α}` over a run.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthSummary {
    /// Largest observed ratio, the fitted constant.
    pub fitted_c: f64,
    pub first_half_max: f64,
    pub second_half_max: f64,
    /// The second half did not need a constant more than twice the first half's.
    pub stable: bool,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub status: RunStatus,
    pub breach: Option<String>,
    /// Every recorded diagnostics row.
    pub records: Vec<DiagnosticsRecord>,
    /// Growth ratio after every accepted step.
    pub growth: Vec<(f64, f64)>,
    pub growth_summary: GrowthSummary,
    pub steps: usize,
    pub final_state: SimState,
    /// Curves pushed inward before the start because they touched a partner outside Σ.
    pub perturbed: Vec<usize>,
}

fn summarize_growth(g: &[(f64, f64)], t_end: f64) -> GrowthSummary {
    let half = 0.5 * t_end;
    let mx = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, f64::max);
    let first = mx(&mut g.iter().filter(|(t, _)| *t <= half).map(|p| p.1));
    let second = mx(&mut g.iter().filter(|(t, _)| *t > half).map(|p| p.1));
    GrowthSummary {
        fitted_c: first.max(second),
        first_half_max: first,
        second_half_max: second,
        stable: second <= 2.0 * first || second == 0.0,
    }
}

/// Pushes inward both members of every touching pair that lies outside Σ.
pub fn separate_touching(family: &PatchFamily) -> Result<(PatchFamily, Vec<usize>)> {
    let n = family.len();
    let mut hit = vec![false; n];
    for lam in 0..n {
        let sigma = sigma_set(family, lam);
        for mu in 0..n {
            if !sigma.members.contains(&mu) && touching(&family.curves[lam], &family.curves[mu]) {
                hit[lam] = true;
                hit[mu] = true;
            }
        }
    }
    let mut curves = family.curves.clone();
    let mut moved = Vec::new();
    for (l, c) in family.curves.iter().enumerate() {
        if hit[l] {
            let h = c1beta_seminorm(c, 0.5)?.powi(-2);
            let eps = perturbation_bound(c, h, 1.0 / 16.0)?.eps0;
            curves[l] = resample_constant_speed(&perturb_inward(c, h, 1.0 / 16.0, eps)?, c.len())?;
            moved.push(l);
        }
    }
    Ok((PatchFamily::new(curves, family.strengths.clone())?, moved))
}

/// Integrates from `state` to `opts.t_end`, calling `observe` on every recorded state.
pub fn run_state(
    mut state: SimState,
    opts: &RunOptions,
    mut observe: impl FnMut(&SimState, &DiagnosticsRecord) -> Result<()>,
) -> Result<RunReport> {
    if !(opts.cfl > 0.0 && opts.t_end >= 0.0 && opts.output_every > 0) {
        return Err(Error::ConfigError("invalid run options".into()));
    }
    let (family, perturbed) = separate_touching(&state.family)?;
    state.family = family;
    let p = 3.0 + 2.0 * state.spec.alpha;
    let mut vel = rhs(&state);
    let mut diag = functionals_with(&state, &vel)?;
    let ceiling = opts.ceiling_l.unwrap_or(1e3 * diag.l);
    state.diagnostics = Some(diag.clone());
    observe(&state, &diag)?;
    let mut records = vec![diag.clone()];
    let mut growth = Vec::new();
    let mut steps = 0usize;
    let mut status = RunStatus::Ok;
    let mut breach = None;
    while state.t < opts.t_end * (1.0 - 1e-14) {
        let mut dt = cfl_limit(&state, &vel, opts.cfl).min(opts.dt_max).min(opts.t_end - state.t);
        let next = loop {
            match step_with(&state, dt, opts.cfl, Some(&vel)) {
                Err(Error::StepRejected { .. }) => dt *= 0.5,
                other => break other,
            }
        };
        let next = match next {
            Ok(s) => s,
            Err(Error::TopologyBreach { t, what }) => {
                status = RunStatus::TopologyBreach;
                breach = Some(format!("t = {t}: {what}"));
                break;
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        let new_vel = rhs(&next);
        let mut nd = functionals_with(&next, &new_vel)?;
        let dl = nd.l - diag.l;
        let dl = if dl.abs() <= GROWTH_NOISE_FLOOR * diag.l { 0.0 } else { dl };
        nd.growth_ratio = (dl / dt).max(0.0) / diag.l.powf(p);
        growth.push((next.t, nd.growth_ratio));
        state = next;
        vel = new_vel;
        diag = nd;
        state.diagnostics = Some(diag.clone());
        let last = state.t >= opts.t_end * (1.0 - 1e-14);
        let over = diag.l > ceiling;
        if steps % opts.output_every == 0 || last || over {
            observe(&state, &diag)?;
            records.push(diag.clone());
        }
        if over {
            status = RunStatus::CeilingHit;
            break;
        }
    }
    if status == RunStatus::TopologyBreach {
        observe(&state, &diag)?;
        if records.last().map(|r| r.t) != Some(diag.t) {
            records.push(diag.clone());
        }
    }
    Ok(RunReport {
        status,
        breach,
        records,
        growth_summary: summarize_growth(&growth, opts.t_end),
        growth,
        steps,
        final_state: state,
        perturbed,
    })
}

/// Builds the initial state from a scenario and integrates it.
pub fn run(
    config: &SimConfig,
    observe: impl FnMut(&SimState, &DiagnosticsRecord) -> Result<()>,
) -> Result<RunReport> {
    config.validate()?;
    let family = config.initial_family()?;
    let spec = config.kernel(&family);
    run_state(SimState::new(family, spec)?, &RunOptions::from_config(config), observe)
}
