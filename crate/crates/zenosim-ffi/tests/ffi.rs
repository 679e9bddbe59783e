use std::ffi::CStr;
use std::ptr;

use approx::assert_abs_diff_eq;

use zenosim_ffi::{
    zeno_last_error_message, zeno_sim_detect_regime, zeno_sim_free, zeno_sim_free_curve,
    zeno_sim_lindblad_curve, zeno_sim_measured_curve, zeno_sim_new, zeno_sim_poincare_time,
    ZenoProjector, ZenoRegime, ZenoSimulator, ZenoStatus,
};

fn new_sim() -> *mut ZenoSimulator {
    let mut sim = ptr::null_mut();
    let status = unsafe { zeno_sim_new(1.0, 15f64.sqrt(), 0.0, 0.0, &mut sim) };
    assert_eq!(status, ZenoStatus::Ok);
    assert!(!sim.is_null());
    sim
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(zeno_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn lifecycle_and_recurrence_time() {
    let sim = new_sim();
    let mut t_p = 0.0;
    assert_eq!(
        unsafe { zeno_sim_poincare_time(sim, &mut t_p) },
        ZenoStatus::Ok
    );
    assert_abs_diff_eq!(t_p, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    unsafe {
        zeno_sim_free(sim);
        zeno_sim_free(ptr::null_mut());
    }
}

#[test]
fn free_curve_hits_known_values() {
    let sim = new_sim();
    let tau = [0.0, 0.25, 0.5, 1.0];
    let mut p0 = [0.0; 4];
    let mut p1 = [0.0; 4];
    let mut p2 = [0.0; 4];
    let status = unsafe {
        zeno_sim_free_curve(
            sim,
            tau.as_ptr(),
            tau.len(),
            p0.as_mut_ptr(),
            p1.as_mut_ptr(),
            p2.as_mut_ptr(),
        )
    };
    assert_eq!(status, ZenoStatus::Ok);
    for (got, expected) in p0.iter().zip([1.0, 0.87890625, 0.765625, 1.0]) {
        assert_abs_diff_eq!(*got, expected, epsilon = 1e-12);
    }
    for k in 0..4 {
        assert_abs_diff_eq!(p0[k] + p1[k] + p2[k], 1.0, epsilon = 1e-12);
    }
    unsafe { zeno_sim_free(sim) };
}

#[test]
fn measured_curves_and_regime_detection() {
    let sim = new_sim();
    let tau = [0.0, 0.5, 1.0];
    let mut p0 = [0.0; 3];
    let mut p1 = [0.0; 3];
    let mut p2 = [0.0; 3];
    let status = unsafe {
        zeno_sim_measured_curve(
            sim,
            ZenoProjector::Partial,
            16,
            tau.as_ptr(),
            tau.len(),
            p0.as_mut_ptr(),
            p1.as_mut_ptr(),
            p2.as_mut_ptr(),
        )
    };
    assert_eq!(status, ZenoStatus::Ok);
    assert!(p0[1] < 0.765625, "measured survival {} not depressed", p0[1]);

    let mut regime = ZenoRegime::None;
    let mut margin = 0.0;
    let status = unsafe {
        zeno_sim_detect_regime(
            sim,
            ZenoProjector::Partial,
            16,
            401,
            0.01,
            &mut regime,
            &mut margin,
        )
    };
    assert_eq!(status, ZenoStatus::Ok);
    assert_eq!(regime, ZenoRegime::Ize);
    assert!(margin > 0.05);

    let status = unsafe {
        zeno_sim_detect_regime(
            sim,
            ZenoProjector::Full,
            64,
            401,
            0.01,
            &mut regime,
            &mut margin,
        )
    };
    assert_eq!(status, ZenoStatus::Ok);
    assert_eq!(regime, ZenoRegime::Mixed);
    assert!(margin > 0.2);
    unsafe { zeno_sim_free(sim) };
}

#[test]
fn lindblad_curve_tracks_the_measured_curve() {
    let sim = new_sim();
    let tau = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut expect0 = [0.0; 5];
    let mut scratch1 = [0.0; 5];
    let mut scratch2 = [0.0; 5];
    let status = unsafe {
        zeno_sim_measured_curve(
            sim,
            ZenoProjector::Partial,
            8,
            tau.as_ptr(),
            tau.len(),
            expect0.as_mut_ptr(),
            scratch1.as_mut_ptr(),
            scratch2.as_mut_ptr(),
        )
    };
    assert_eq!(status, ZenoStatus::Ok);

    let mut p0 = [0.0; 5];
    let status = unsafe {
        zeno_sim_lindblad_curve(
            sim,
            ZenoProjector::Partial,
            8,
            30.0,
            5e-4,
            tau.as_ptr(),
            tau.len(),
            p0.as_mut_ptr(),
            scratch1.as_mut_ptr(),
            scratch2.as_mut_ptr(),
        )
    };
    assert_eq!(status, ZenoStatus::Ok);
    for k in 0..5 {
        assert_abs_diff_eq!(p0[k], expect0[k], epsilon = 2e-2);
    }
    unsafe { zeno_sim_free(sim) };
}

#[test]
fn errors_carry_status_codes_and_messages() {
    let mut sim = ptr::null_mut();
    assert_eq!(
        unsafe { zeno_sim_new(-1.0, 1.0, 0.0, 0.0, &mut sim) },
        ZenoStatus::InvalidArgument
    );
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { zeno_sim_new(1.0, 1.0, 0.0, 0.0, ptr::null_mut()) },
        ZenoStatus::NullPointer
    );

    let mut t_p = 0.0;
    assert_eq!(
        unsafe { zeno_sim_poincare_time(ptr::null(), &mut t_p) },
        ZenoStatus::NullPointer
    );

    let sim = new_sim();
    let tau = [0.0, 0.5, 1.0];
    let mut p0 = [0.0; 3];
    let mut p1 = [0.0; 3];
    let mut p2 = [0.0; 3];
    assert_eq!(
        unsafe {
            zeno_sim_measured_curve(
                sim,
                ZenoProjector::Partial,
                0,
                tau.as_ptr(),
                tau.len(),
                p0.as_mut_ptr(),
                p1.as_mut_ptr(),
                p2.as_mut_ptr(),
            )
        },
        ZenoStatus::InvalidArgument
    );

    let unsorted = [0.5, 0.0, 1.0];
    assert_eq!(
        unsafe {
            zeno_sim_free_curve(
                sim,
                unsorted.as_ptr(),
                unsorted.len(),
                p0.as_mut_ptr(),
                p1.as_mut_ptr(),
                p2.as_mut_ptr(),
            )
        },
        ZenoStatus::InvalidArgument
    );
    assert!(last_error().contains("sorted") || !last_error().is_empty());

    assert_eq!(
        unsafe {
            zeno_sim_lindblad_curve(
                sim,
                ZenoProjector::Partial,
                4,
                -5.0,
                5e-4,
                tau.as_ptr(),
                tau.len(),
                p0.as_mut_ptr(),
                p1.as_mut_ptr(),
                p2.as_mut_ptr(),
            )
        },
        ZenoStatus::InvalidArgument
    );

    let mut regime = ZenoRegime::None;
    let mut margin = 0.0;
    assert_eq!(
        unsafe {
            zeno_sim_detect_regime(
                sim,
                ZenoProjector::Partial,
                16,
                401,
                0.0,
                &mut regime,
                &mut margin,
            )
        },
        ZenoStatus::InvalidArgument
    );
    assert_eq!(
        unsafe {
            zeno_sim_detect_regime(
                sim,
                ZenoProjector::Partial,
                16,
                1,
                0.01,
                &mut regime,
                &mut margin,
            )
        },
        ZenoStatus::InvalidArgument
    );
    unsafe { zeno_sim_free(sim) };
}

#[test]
fn generated_header_is_in_sync_with_the_exports() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/zenosim.h"
    ))
    .unwrap();
    for symbol in [
        "zeno_sim_new",
        "zeno_sim_free",
        "zeno_sim_poincare_time",
        "zeno_sim_free_curve",
        "zeno_sim_measured_curve",
        "zeno_sim_lindblad_curve",
        "zeno_sim_detect_regime",
        "zeno_last_error_message",
        "ZENO_STATUS_NUMERICAL_FAILURE",
        "ZENO_REGIME_MIXED",
    ] {
        assert!(header.contains(symbol), "{symbol} missing from header");
    }
}
