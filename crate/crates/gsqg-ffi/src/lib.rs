//! C ABI over the `gsqg` library.
//!
//! Objects are opaque heap handles released with the matching `*_free`. Every fallible
//! call returns an `i32` status: `GSQG_OK` or a negative error code, with the message
//! of the most recent failure on the calling thread available from
//! [`gsqg_last_error`].

use gsqg::curve::{enclosed_area, resample_constant_speed};
use gsqg::dynamics::{functionals, run_state, step, RunOptions, RunStatus, SimState};
use gsqg::metrics::{frechet_distance, hausdorff_distance, l2_deviation, pair_distance};
use gsqg::scenarios::{make_shape, Shape};
use gsqg::velocity::{KernelSpec, PatchFamily};
use gsqg::{ClosedCurve, Error, Vec2};
use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

pub const GSQG_OK: i32 = 0;
pub const GSQG_ERR_NULL: i32 = -1;
pub const GSQG_ERR_INVALID_INPUT: i32 = -2;
pub const GSQG_ERR_DEGENERATE: i32 = -3;
pub const GSQG_ERR_NOT_SIMPLE: i32 = -4;
pub const GSQG_ERR_STEP_REJECTED: i32 = -5;
pub const GSQG_ERR_TOPOLOGY_BREACH: i32 = -6;
pub const GSQG_ERR_CEILING_HIT: i32 = -7;
pub const GSQG_ERR_BUFFER_TOO_SMALL: i32 = -8;
pub const GSQG_ERR_OTHER: i32 = -9;
pub const GSQG_ERR_PANIC: i32 = -99;

pub const GSQG_METRIC_FRECHET: i32 = 0;
pub const GSQG_METRIC_HAUSDORFF: i32 = 1;
pub const GSQG_METRIC_DELTA: i32 = 2;
pub const GSQG_METRIC_DEVIATION: i32 = 3;

/// A closed plane curve.
pub struct GsqgCurve(ClosedCurve);

/// A patch family with its kernel and current time.
pub struct GsqgSim(SimState);

/// Curve functionals of a simulation state.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GsqgDiagnostics {
    pub t: f64,
    pub q: f64,
    pub w: f64,
    pub l: f64,
    pub u_inf: f64,
    pub min_pair_delta: f64,
    pub min_self_delta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::DegenerateCurve(_) | Error::WrongParametrization(_) => GSQG_ERR_DEGENERATE,
        Error::NotSimple => GSQG_ERR_NOT_SIMPLE,
        Error::StepRejected { .. } => GSQG_ERR_STEP_REJECTED,
        Error::TopologyBreach { .. } => GSQG_ERR_TOPOLOGY_BREACH,
        Error::InvalidInput(_) | Error::InvalidExponent(_) | Error::InvalidWindow { .. } | Error::ConfigError(_) => {
            GSQG_ERR_INVALID_INPUT
        }
        _ => GSQG_ERR_OTHER,
    }
}

/// Runs `f`, recording failures and converting panics into `GSQG_ERR_PANIC`.
fn guard(f: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GSQG_OK,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            GSQG_ERR_PANIC
        }
    }
}

fn lib(e: Error) -> (i32, String) {
    (code_of(&e), e.to_string())
}

fn null(what: &str) -> (i32, String) {
    (GSQG_ERR_NULL, format!("{what} is null"))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (i32, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn curve_ref<'a>(p: *const GsqgCurve) -> Result<&'a ClosedCurve, (i32, String)> {
    p.as_ref().map(|c| &c.0).ok_or_else(|| null("curve"))
}

/// Copies the most recent error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gsqg_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = e.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Curve through `n` points given as interleaved `x, y` pairs.
///
/// # Safety
/// `xy` must point to `2n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_from_nodes(xy: *const f64, n: usize, out: *mut *mut GsqgCurve) -> i32 {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if xy.is_null() {
            return Err(null("xy"));
        }
        let s = std::slice::from_raw_parts(xy, 2 * n);
        let nodes = s.chunks_exact(2).map(|p| Vec2::new(p[0], p[1])).collect();
        let c = ClosedCurve::from_nodes(nodes).map_err(lib)?;
        *out = Box::into_raw(Box::new(GsqgCurve(c)));
        Ok(())
    })
}

/// Constant-speed circle with `n` nodes.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_circle(radius: f64, cx: f64, cy: f64, n: usize, out: *mut *mut GsqgCurve) -> i32 {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let c = make_shape(&Shape::Circle { radius, center: [cx, cy] }, n).map_err(lib)?;
        *out = Box::into_raw(Box::new(GsqgCurve(c)));
        Ok(())
    })
}

/// Constant-speed resampling to `n` nodes.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_resample(curve: *const GsqgCurve, n: usize, out: *mut *mut GsqgCurve) -> i32 {
    guard(|| {
        let c = curve_ref(curve)?;
        let out = out_ptr(out, "out")?;
        let r = resample_constant_speed(c, n).map_err(lib)?;
        *out = Box::into_raw(Box::new(GsqgCurve(r)));
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_free(curve: *mut GsqgCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_len(curve: *const GsqgCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.len())
}

/// Writes the nodes as interleaved `x, y` pairs into `xy`, which holds `cap` doubles.
///
/// # Safety
/// `curve` must be a live handle; `xy` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_nodes(curve: *const GsqgCurve, xy: *mut f64, cap: usize) -> i32 {
    guard(|| {
        let c = curve_ref(curve)?;
        if xy.is_null() {
            return Err(null("xy"));
        }
        if cap < 2 * c.len() {
            return Err((GSQG_ERR_BUFFER_TOO_SMALL, format!("need {} doubles", 2 * c.len())));
        }
        let s = std::slice::from_raw_parts_mut(xy, 2 * c.len());
        for (d, p) in s.chunks_exact_mut(2).zip(c.nodes()) {
            d[0] = p.x;
            d[1] = p.y;
        }
        Ok(())
    })
}

/// Arclength of the trigonometric interpolant.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_length(curve: *const GsqgCurve, out: *mut f64) -> i32 {
    guard(|| {
        let c = curve_ref(curve)?;
        *out_ptr(out, "out")? = c.length().map_err(lib)?;
        Ok(())
    })
}

/// Signed polygon area, positive for counterclockwise curves.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_curve_area(curve: *const GsqgCurve, out: *mut f64) -> i32 {
    guard(|| {
        let c = curve_ref(curve)?;
        *out_ptr(out, "out")? = enclosed_area(c);
        Ok(())
    })
}

/// Distance between two curves; `metric` is one of the `GSQG_METRIC_*` constants.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_distance(a: *const GsqgCurve, b: *const GsqgCurve, metric: i32, out: *mut f64) -> i32 {
    guard(|| {
        let (a, b) = (curve_ref(a)?, curve_ref(b)?);
        let out = out_ptr(out, "out")?;
        *out = match metric {
            GSQG_METRIC_FRECHET => frechet_distance(a, b),
            GSQG_METRIC_HAUSDORFF => hausdorff_distance(a, b),
            GSQG_METRIC_DELTA => pair_distance(a, b),
            GSQG_METRIC_DEVIATION => l2_deviation(a, b).map_err(lib)?,
            m => return Err((GSQG_ERR_INVALID_INPUT, format!("unknown metric {m}"))),
        };
        Ok(())
    })
}

/// Simulation of `count` patches with the given strengths, exponent `alpha` and
/// mollification radius `epsilon`. The curves are copied.
///
/// # Safety
/// `curves` and `strengths` must point to `count` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_sim_new(
    curves: *const *const GsqgCurve,
    strengths: *const f64,
    count: usize,
    alpha: f64,
    epsilon: f64,
    out: *mut *mut GsqgSim,
) -> i32 {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if curves.is_null() || strengths.is_null() {
            return Err(null("curves or strengths"));
        }
        let cs = std::slice::from_raw_parts(curves, count)
            .iter()
            .map(|&p| curve_ref(p).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        let th = std::slice::from_raw_parts(strengths, count).to_vec();
        let fam = PatchFamily::new(cs, th).map_err(lib)?;
        let spec = KernelSpec { alpha, epsilon, ..KernelSpec::default() };
        *out = Box::into_raw(Box::new(GsqgSim(SimState::new(fam, spec).map_err(lib)?)));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsqg_sim_free(sim: *mut GsqgSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// One RK4 step of size `dt`. On failure the state is unchanged.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsqg_sim_step(sim: *mut GsqgSim, dt: f64) -> i32 {
    guard(|| {
        let s = out_ptr(sim, "sim")?;
        s.0 = step(&s.0, dt).map_err(lib)?;
        Ok(())
    })
}

/// Integrates to time `t_end` with CFL-limited steps. Returns
/// `GSQG_ERR_TOPOLOGY_BREACH` or `GSQG_ERR_CEILING_HIT` when the run stops early; the
/// state then holds the last accepted step.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsqg_sim_advance(sim: *mut GsqgSim, t_end: f64, cfl: f64) -> i32 {
    guard(|| {
        let s = out_ptr(sim, "sim")?;
        let opts = RunOptions { t_end, cfl, ..RunOptions::default() };
        let rep = run_state(s.0.clone(), &opts, |_, _| Ok(())).map_err(lib)?;
        s.0 = rep.final_state;
        match rep.status {
            RunStatus::Ok => Ok(()),
            RunStatus::TopologyBreach => {
                Err((GSQG_ERR_TOPOLOGY_BREACH, rep.breach.unwrap_or_else(|| "topology breach".into())))
            }
            RunStatus::CeilingHit => Err((GSQG_ERR_CEILING_HIT, "L exceeded its ceiling".into())),
        }
    })
}

/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_sim_diagnostics(sim: *const GsqgSim, out: *mut GsqgDiagnostics) -> i32 {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let out = out_ptr(out, "out")?;
        let d = functionals(&s.0).map_err(lib)?;
        *out = GsqgDiagnostics {
            t: s.0.t,
            q: d.q,
            w: d.w,
            l: d.l,
            u_inf: d.u_inf,
            min_pair_delta: d.min_pair_delta,
            min_self_delta: d.min_self_delta,
        };
        Ok(())
    })
}

/// Copy of the boundary of patch `index`.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_sim_curve(sim: *const GsqgSim, index: usize, out: *mut *mut GsqgCurve) -> i32 {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let out = out_ptr(out, "out")?;
        let c = s.0.family.curves.get(index).ok_or((GSQG_ERR_INVALID_INPUT, format!("no patch {index}")))?;
        *out = Box::into_raw(Box::new(GsqgCurve(c.clone())));
        Ok(())
    })
}

/// Runs the randomized inequality suite; `passed` receives 1 when every check holds.
///
/// # Safety
/// `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsqg_check_suite(seed: u64, trials: usize, passed: *mut i32) -> i32 {
    guard(|| {
        let out = out_ptr(passed, "passed")?;
        *out = gsqg::lab::check_suite(seed, trials).map_err(lib)?.all_passed() as i32;
        Ok(())
    })
}
