//! C interface to the three-level measurement-dynamics simulator.
//!
//! The simulator handle is opaque; every entry point returns a status code
//! and writes results through out-pointers. On any non-OK status the
//! thread-local message from [`zeno_last_error_message`] describes the
//! failure. All probability buffers are caller-allocated with the same
//! length as the time grid, and grids are in recurrence-time units
//! (`tau = t / T_P`).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use zenosim::analysis::{detect_zeno_regime, Regime};
use zenosim::dynamics::RabiModel;
use zenosim::linalg::DensityMatrix;
use zenosim::master::{default_step, delta_train_rate, integrate_sampled};
use zenosim::measurement::{projector_set, survival_curve, DiscreteSchedule, ProjectorKind};
use zenosim::Error;

/// Result of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZenoStatus {
    /// The call succeeded and all out-pointers are filled.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was rejected; see `zeno_last_error_message`.
    InvalidArgument = 2,
    /// The computation lost numerical accuracy and was aborted.
    NumericalFailure = 3,
    /// An internal invariant failed; the handle is still safe to free.
    InternalPanic = 4,
}

/// Which complete projector family a measurement uses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZenoProjector {
    /// Two sectors: levels {0, 1} together, level 2 alone.
    Partial = 0,
    /// Every level measured separately.
    Full = 1,
}

/// Detected relation between a measured and a free survival curve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZenoRegime {
    /// No sustained deviation beyond the threshold.
    None = 0,
    /// Measured survival held above the free curve (QZE).
    Qze = 1,
    /// Measured survival pushed below the free curve (IZE).
    Ize = 2,
    /// Both kinds of interval are present.
    Mixed = 3,
}

/// Opaque simulator: a three-level atom under a resonant double drive.
pub struct ZenoSimulator {
    model: RabiModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(err: &Error) -> ZenoStatus {
    set_last_error(&err.to_string());
    if err.is_numerical() {
        ZenoStatus::NumericalFailure
    } else {
        ZenoStatus::InvalidArgument
    }
}

fn guarded(body: impl FnOnce() -> ZenoStatus) -> ZenoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            ZenoStatus::InternalPanic
        }
    }
}

/// `sim.as_ref()` checked against null.
///
/// # Safety
/// `sim` must be null or a pointer obtained from `zeno_sim_new`.
unsafe fn deref<'a>(sim: *const ZenoSimulator) -> Option<&'a ZenoSimulator> {
    sim.as_ref()
}

fn kind_of(projector: ZenoProjector) -> ProjectorKind {
    match projector {
        ZenoProjector::Partial => ProjectorKind::Partial,
        ZenoProjector::Full => ProjectorKind::Full,
    }
}

fn recurrence_time(sim: &ZenoSimulator) -> Result<f64, ZenoStatus> {
    sim.model.poincare_time().ok_or_else(|| {
        set_last_error("both drive amplitudes are zero; no recurrence time exists");
        ZenoStatus::InvalidArgument
    })
}

/// Message describing the most recent failure on this thread.
///
/// The pointer stays valid until the next failing call on the same thread.
/// Never returns null; the message is empty if nothing failed yet.
#[no_mangle]
pub extern "C" fn zeno_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Create a simulator for drive amplitudes `omega01`, `omega12` and drive
/// phases `phi01`, `phi12`. On success writes the new handle to `out`;
/// release it with `zeno_sim_free`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn zeno_sim_new(
    omega01: f64,
    omega12: f64,
    phi01: f64,
    phi12: f64,
    out: *mut *mut ZenoSimulator,
) -> ZenoStatus {
    guarded(|| {
        if out.is_null() {
            set_last_error("out pointer is null");
            return ZenoStatus::NullPointer;
        }
        match RabiModel::new(omega01, omega12, phi01, phi12) {
            Ok(model) => {
                let handle = Box::new(ZenoSimulator { model });
                unsafe { *out = Box::into_raw(handle) };
                ZenoStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Destroy a simulator created by `zeno_sim_new`. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from `zeno_sim_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zeno_sim_free(sim: *mut ZenoSimulator) {
    if !sim.is_null() {
        drop(unsafe { Box::from_raw(sim) });
    }
}

/// Write the recurrence time `T_P = 2π / sqrt(omega01² + omega12²)` to
/// `out`.
///
/// # Safety
/// `sim` must be null or a live handle from `zeno_sim_new`; `out` must be
/// null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn zeno_sim_poincare_time(
    sim: *const ZenoSimulator,
    out: *mut f64,
) -> ZenoStatus {
    guarded(|| {
        let Some(sim) = (unsafe { deref(sim) }) else {
            set_last_error("simulator pointer is null");
            return ZenoStatus::NullPointer;
        };
        if out.is_null() {
            set_last_error("out pointer is null");
            return ZenoStatus::NullPointer;
        }
        match recurrence_time(sim) {
            Ok(t_p) => {
                unsafe { *out = t_p };
                ZenoStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// # Safety
/// `tau`, `p0`, `p1`, `p2` must each be null or valid for `len` elements.
#[allow(clippy::too_many_arguments)]
unsafe fn curve_into(
    sim: &ZenoSimulator,
    kind: Option<(ProjectorKind, usize)>,
    tau: *const f64,
    len: usize,
    p0: *mut f64,
    p1: *mut f64,
    p2: *mut f64,
) -> ZenoStatus {
    if tau.is_null() || p0.is_null() || p1.is_null() || p2.is_null() {
        set_last_error("grid or output pointer is null");
        return ZenoStatus::NullPointer;
    }
    let grid = unsafe { std::slice::from_raw_parts(tau, len) };
    let rho0 = DensityMatrix::basis_state(3, 0);
    let result = match kind {
        None => survival_curve(&sim.model, None, None, grid, &rho0),
        Some((kind, n)) => {
            let t_p = match recurrence_time(sim) {
                Ok(t_p) => t_p,
                Err(status) => return status,
            };
            let set = match projector_set(kind, 3) {
                Ok(set) => set,
                Err(err) => return fail(&err),
            };
            let schedule = match DiscreteSchedule::new(n, t_p) {
                Ok(schedule) => schedule,
                Err(err) => return fail(&err),
            };
            survival_curve(&sim.model, Some(&set), Some(&schedule), grid, &rho0)
        }
    };
    match result {
        Ok(curve) => {
            let out0 = unsafe { std::slice::from_raw_parts_mut(p0, len) };
            let out1 = unsafe { std::slice::from_raw_parts_mut(p1, len) };
            let out2 = unsafe { std::slice::from_raw_parts_mut(p2, len) };
            out0.copy_from_slice(curve.p0());
            out1.copy_from_slice(curve.p1());
            out2.copy_from_slice(curve.p2());
            ZenoStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Populations of the three levels under the free double-drive evolution,
/// starting from level 0, sampled at `len` grid points `tau` (units of the
/// recurrence time). Writes `len` values to each of `p0`, `p1`, `p2`.
///
/// # Safety
/// `sim` must be null or a live handle from `zeno_sim_new`; `tau`, `p0`,
/// `p1`, `p2` must each be null or valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn zeno_sim_free_curve(
    sim: *const ZenoSimulator,
    tau: *const f64,
    len: usize,
    p0: *mut f64,
    p1: *mut f64,
    p2: *mut f64,
) -> ZenoStatus {
    guarded(|| {
        let Some(sim) = (unsafe { deref(sim) }) else {
            set_last_error("simulator pointer is null");
            return ZenoStatus::NullPointer;
        };
        unsafe { curve_into(sim, None, tau, len, p0, p1, p2) }
    })
}

/// Populations under `n + 1` ideal measurements equally spaced across one
/// recurrence time (the event at `t = 0` included). Grid semantics match
/// `zeno_sim_free_curve`.
///
/// # Safety
/// `sim` must be null or a live handle from `zeno_sim_new`; `tau`, `p0`,
/// `p1`, `p2` must each be null or valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn zeno_sim_measured_curve(
    sim: *const ZenoSimulator,
    projector: ZenoProjector,
    n: usize,
    tau: *const f64,
    len: usize,
    p0: *mut f64,
    p1: *mut f64,
    p2: *mut f64,
) -> ZenoStatus {
    guarded(|| {
        let Some(sim) = (unsafe { deref(sim) }) else {
            set_last_error("simulator pointer is null");
            return ZenoStatus::NullPointer;
        };
        unsafe { curve_into(sim, Some((kind_of(projector), n)), tau, len, p0, p1, p2) }
    })
}

/// Populations under the continuous-measurement master equation with a
/// train of `n + 1` rate bumps of integrated weight `weight` and standard
/// deviation `width_fraction` of the recurrence time, spread across the
/// grid window. The grid must be sorted ascending and end inside (0, 1].
///
/// # Safety
/// `sim` must be null or a live handle from `zeno_sim_new`; `tau`, `p0`,
/// `p1`, `p2` must each be null or valid for `len` elements.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn zeno_sim_lindblad_curve(
    sim: *const ZenoSimulator,
    projector: ZenoProjector,
    n: usize,
    weight: f64,
    width_fraction: f64,
    tau: *const f64,
    len: usize,
    p0: *mut f64,
    p1: *mut f64,
    p2: *mut f64,
) -> ZenoStatus {
    guarded(|| {
        let Some(sim) = (unsafe { deref(sim) }) else {
            set_last_error("simulator pointer is null");
            return ZenoStatus::NullPointer;
        };
        if tau.is_null() || p0.is_null() || p1.is_null() || p2.is_null() {
            set_last_error("grid or output pointer is null");
            return ZenoStatus::NullPointer;
        }
        let grid = unsafe { std::slice::from_raw_parts(tau, len) };
        let t_p = match recurrence_time(sim) {
            Ok(t_p) => t_p,
            Err(status) => return status,
        };
        let Some(&last) = grid.last() else {
            set_last_error("grid is empty");
            return ZenoStatus::InvalidArgument;
        };
        if !last.is_finite() || last <= 0.0 {
            set_last_error("grid must end at a positive tau");
            return ZenoStatus::InvalidArgument;
        }
        let window = last * t_p;
        let run = || -> Result<Vec<[f64; 3]>, Error> {
            let set = projector_set(kind_of(projector), 3)?;
            let schedule = DiscreteSchedule::new(n, window)?;
            let rate = delta_train_rate(schedule.times(), width_fraction * t_p, weight)?;
            let step = default_step(&sim.model, &rate)?;
            let samples: Vec<f64> = grid.iter().map(|&x| x * t_p).collect();
            let rho0 = DensityMatrix::basis_state(3, 0);
            let states = integrate_sampled(&rho0, &sim.model, &set, &rate, &samples, step)?;
            Ok(states
                .iter()
                .map(|s| {
                    [
                        s.state.population(0).max(0.0),
                        s.state.population(1).max(0.0),
                        s.state.population(2).max(0.0),
                    ]
                })
                .collect())
        };
        match run() {
            Ok(rows) => {
                let out0 = unsafe { std::slice::from_raw_parts_mut(p0, len) };
                let out1 = unsafe { std::slice::from_raw_parts_mut(p1, len) };
                let out2 = unsafe { std::slice::from_raw_parts_mut(p2, len) };
                for (k, row) in rows.iter().enumerate() {
                    out0[k] = row[0];
                    out1[k] = row[1];
                    out2[k] = row[2];
                }
                ZenoStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Classify the measured curve for `n` measurements against the free curve
/// on a uniform grid of `grid_points` samples over one recurrence time,
/// with significance threshold `epsilon`. Writes the regime to `regime`
/// and the largest supporting deviation to `margin`.
///
/// # Safety
/// `sim` must be null or a live handle from `zeno_sim_new`; `regime` and
/// `margin` must each be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn zeno_sim_detect_regime(
    sim: *const ZenoSimulator,
    projector: ZenoProjector,
    n: usize,
    grid_points: usize,
    epsilon: f64,
    regime: *mut ZenoRegime,
    margin: *mut f64,
) -> ZenoStatus {
    guarded(|| {
        let Some(sim) = (unsafe { deref(sim) }) else {
            set_last_error("simulator pointer is null");
            return ZenoStatus::NullPointer;
        };
        if regime.is_null() || margin.is_null() {
            set_last_error("out pointer is null");
            return ZenoStatus::NullPointer;
        }
        if grid_points < 2 {
            set_last_error("grid_points must be at least 2");
            return ZenoStatus::InvalidArgument;
        }
        let t_p = match recurrence_time(sim) {
            Ok(t_p) => t_p,
            Err(status) => return status,
        };
        let grid: Vec<f64> = (0..grid_points)
            .map(|k| k as f64 / (grid_points - 1) as f64)
            .collect();
        let run = || -> Result<(ZenoRegime, f64), Error> {
            let rho0 = DensityMatrix::basis_state(3, 0);
            let free = survival_curve(&sim.model, None, None, &grid, &rho0)?;
            let set = projector_set(kind_of(projector), 3)?;
            let schedule = DiscreteSchedule::new(n, t_p)?;
            let measured =
                survival_curve(&sim.model, Some(&set), Some(&schedule), &grid, &rho0)?;
            let verdict = detect_zeno_regime(&free, &measured, epsilon)?;
            let code = match verdict.regime {
                Regime::None => ZenoRegime::None,
                Regime::Qze => ZenoRegime::Qze,
                Regime::Ize => ZenoRegime::Ize,
                Regime::Mixed => ZenoRegime::Mixed,
            };
            Ok((code, verdict.margin))
        };
        match run() {
            Ok((code, m)) => {
                unsafe {
                    *regime = code;
                    *margin = m;
                }
                ZenoStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}
