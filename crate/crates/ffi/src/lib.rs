//! C interface to the KGZ integrators.
//!
//! A simulation is an opaque handle created by [`kgz_simulation_new`] (or
//! [`kgz_simulation_new_from_samples`]) and released with
//! [`kgz_simulation_free`]. Every fallible call returns a [`KgzStatus`]; the
//! message of the most recent failure on the calling thread is available
//! from [`kgz_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use kgz::experiments::{fit_slope, Scheme};
use kgz::integrator_uaosc1::{step1, StepOperators1};
use kgz::integrator_uaosc2::{step2, StepOperators2};
use kgz::kgz_model::{benchmark_initial_data, initial_state, KgzState, ModelParams, PhysicalState};
use kgz::spectral_core::{SpectralField, TorusGrid};
use kgz::KgzError;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KgzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Divergence = 3,
    Panic = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: KgzStatus, msg: impl Into<String>) -> KgzStatus {
    set_error(msg);
    status
}

fn from_error(e: KgzError) -> KgzStatus {
    let status = match e {
        KgzError::Divergence { .. } => KgzStatus::Divergence,
        _ => KgzStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning a panic into [`KgzStatus::Panic`].
fn guard(f: impl FnOnce() -> KgzStatus) -> KgzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(KgzStatus::Panic, format!("panic: {msg}"))
        }
    }
}

enum Stepper {
    First(Box<StepOperators1>),
    Second(Box<StepOperators2>, SpectralField),
}

/// Opaque simulation handle.
pub struct KgzSimulation {
    params: ModelParams,
    state: KgzState,
    stepper: Stepper,
}

fn build(scheme: u32, tau: f64, data: &PhysicalState, params: ModelParams) -> kgz::Result<KgzSimulation> {
    let scheme = match scheme {
        1 => Scheme::Uaosc1,
        2 => Scheme::Uaosc2,
        s => return Err(KgzError::Parameter(format!("scheme must be 1 or 2, got {s}"))),
    };
    let state = initial_state(data, &params, tau, scheme.order())?;
    let stepper = match scheme {
        Scheme::Uaosc1 => Stepper::First(Box::new(StepOperators1::new(&params, tau)?)),
        Scheme::Uaosc2 => Stepper::Second(Box::new(StepOperators2::new(&params, tau)?), state.u.clone()),
    };
    Ok(KgzSimulation { params, state, stepper })
}

fn params_for(c: f64, num_points: usize) -> kgz::Result<ModelParams> {
    ModelParams::new(c, TorusGrid::with_points(num_points)?)
}

unsafe fn store(out: *mut *mut KgzSimulation, sim: KgzSimulation) {
    *out = Box::into_raw(Box::new(sim));
}

/// Creates a simulation of the benchmark data on `num_points` points of
/// `[0, 2pi)`. `scheme` is 1 or 2.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer. On
/// success the handle written there must be released with
/// [`kgz_simulation_free`].
#[no_mangle]
pub unsafe extern "C" fn kgz_simulation_new(
    scheme: u32,
    c: f64,
    tau: f64,
    num_points: usize,
    out: *mut *mut KgzSimulation,
) -> KgzStatus {
    guard(|| {
        if out.is_null() {
            return fail(KgzStatus::NullPointer, "output handle pointer is null");
        }
        let made = params_for(c, num_points).and_then(|params| {
            let data = benchmark_initial_data(params.grid, c);
            build(scheme, tau, &data, params)
        });
        match made {
            Ok(sim) => {
                store(out, sim);
                KgzStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Creates a simulation from physical samples of `z`, `dz/dt`, `n` and
/// `dn/dt` at the nodes `2 pi j / num_points`.
///
/// # Safety
/// Each of `z`, `zdot`, `n`, `ndot` must point to `num_points` readable
/// doubles, and `out` must be valid as for [`kgz_simulation_new`].
#[no_mangle]
pub unsafe extern "C" fn kgz_simulation_new_from_samples(
    scheme: u32,
    c: f64,
    tau: f64,
    num_points: usize,
    z: *const f64,
    zdot: *const f64,
    n: *const f64,
    ndot: *const f64,
    out: *mut *mut KgzSimulation,
) -> KgzStatus {
    guard(|| {
        if out.is_null() || z.is_null() || zdot.is_null() || n.is_null() || ndot.is_null() {
            return fail(KgzStatus::NullPointer, "null sample or output pointer");
        }
        let made = params_for(c, num_points).and_then(|params| {
            let s = |p: *const f64| std::slice::from_raw_parts(p, num_points);
            let data = PhysicalState::from_samples(params.grid, s(z), s(zdot), s(n), s(ndot))?;
            build(scheme, tau, &data, params)
        });
        match made {
            Ok(sim) => {
                store(out, sim);
                KgzStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Advances the simulation by `num_steps` steps.
///
/// # Safety
/// `sim` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn kgz_simulation_step(sim: *mut KgzSimulation, num_steps: usize) -> KgzStatus {
    guard(|| {
        let Some(sim) = sim.as_mut() else {
            return fail(KgzStatus::NullPointer, "simulation handle is null");
        };
        for _ in 0..num_steps {
            let next = match &sim.stepper {
                Stepper::First(ops) => step1(&sim.state, ops),
                Stepper::Second(ops, u0) => step2(&sim.state, u0, ops),
            };
            match next {
                Ok(s) => sim.state = s,
                Err(e) => return from_error(e),
            }
        }
        if !sim.state.is_finite() {
            let tau = match &sim.stepper {
                Stepper::First(o) => o.tau(),
                Stepper::Second(o, _) => o.tau(),
            };
            return from_error(KgzError::Divergence { c: sim.params.c, tau });
        }
        KgzStatus::Ok
    })
}

/// Writes the current time.
///
/// # Safety
/// `sim` must be a live handle and `time` a valid pointer to one double.
#[no_mangle]
pub unsafe extern "C" fn kgz_simulation_time(sim: *const KgzSimulation, time: *mut f64) -> KgzStatus {
    guard(|| match (sim.as_ref(), time.is_null()) {
        (Some(s), false) => {
            *time = s.state.time;
            KgzStatus::Ok
        }
        _ => fail(KgzStatus::NullPointer, "null handle or output pointer"),
    })
}

/// Number of grid points, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kgz_simulation_num_points(sim: *const KgzSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.params.grid.num_points())
}

/// Copies the grid nodes and the physical samples of `z`, `n` and `dn/dt`
/// into caller buffers of length `len`, which must equal the number of grid
/// points. Any of the four buffers may be null to skip it.
///
/// # Safety
/// `sim` must be a live handle; each non-null buffer must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kgz_simulation_fields(
    sim: *const KgzSimulation,
    x: *mut f64,
    z: *mut f64,
    n: *mut f64,
    ndot: *mut f64,
    len: usize,
) -> KgzStatus {
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(KgzStatus::NullPointer, "simulation handle is null");
        };
        let grid = sim.params.grid;
        if len != grid.num_points() {
            return fail(
                KgzStatus::InvalidArgument,
                format!("buffer length {len} differs from the {} grid points", grid.num_points()),
            );
        }
        let fields = [
            (x, grid.nodes()),
            (z, sim.state.z().real_samples()),
            (n, sim.state.n.real_samples()),
            (ndot, sim.state.ndot.real_samples()),
        ];
        for (ptr, values) in fields {
            if !ptr.is_null() {
                std::slice::from_raw_parts_mut(ptr, len).copy_from_slice(&values);
            }
        }
        KgzStatus::Ok
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn kgz_simulation_free(sim: *mut KgzSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Least-squares slope of `log y` against `log x` over `len` points.
///
/// # Safety
/// `x` and `y` must point to `len` readable doubles and `slope` to one
/// writable double.
#[no_mangle]
pub unsafe extern "C" fn kgz_fit_slope(x: *const f64, y: *const f64, len: usize, slope: *mut f64) -> KgzStatus {
    guard(|| {
        if x.is_null() || y.is_null() || slope.is_null() {
            return fail(KgzStatus::NullPointer, "null input or output pointer");
        }
        let xs = std::slice::from_raw_parts(x, len);
        let ys = std::slice::from_raw_parts(y, len);
        let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        match fit_slope(&pts) {
            Ok(s) => {
                *slope = s;
                KgzStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Copies the last error message of this thread, NUL-terminated and
/// truncated to `len` bytes, into `buf`. Returns the full message length
/// plus one, so a caller can size the buffer; `buf` may be null to query it.
///
/// # Safety
/// A non-null `buf` must hold `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn kgz_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            let out = std::slice::from_raw_parts_mut(buf as *mut u8, len);
            out[..n].copy_from_slice(&bytes[..n]);
            out[n] = 0;
        }
        bytes.len() + 1
    })
}
