//! Continuous-measurement master equation.
//!
//! The density matrix obeys
//!
//! ```text
//!     dρ/dt = -i [M, ρ] - (1/2) D(t) Σᵢ [Pᵢ, [Pᵢ, ρ]]
//! ```
//!
//! where `D(t) ≥ 0` is the instantaneous measurement rate. A constant rate
//! dephases sectors continuously; a train of sharp bumps approximates ideal
//! instantaneous reductions, each bump of integrated weight `w` scaling the
//! cross-sector coherences by `e^{-w}`. The ideal reduction chain is the
//! `w → ∞` limit.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::{rwa_hamiltonian, RabiModel};
use crate::error::{Error, Result};
use crate::linalg::{
    hermiticity_defect, hermitize, min_eigenvalue, CMat, DensityMatrix, DensityTolerance,
    HERMITICITY_TOL,
};
use crate::measurement::ProjectorSet;

/// Hard ceiling on pre-correction trace and Hermiticity defects of an
/// integrated state. A run exceeding it fails instead of renormalizing
/// silently.
pub const ACCURACY_LIMIT: f64 = 1e-6;

/// Positivity floor for integrated states. Fixed-step integration may dip
/// an eigenvalue slightly below zero; below this floor the state is rejected.
pub const INTEGRATED_POSITIVITY_TOL: f64 = 1e-6;

/// Measurement rate `D(t)`.
#[derive(Clone)]
pub enum RateFunction {
    /// Time-independent rate.
    Constant(f64),
    /// Sharp Gaussian bumps of standard deviation `width` centered at
    /// `times`, each carrying integrated weight `weight`.
    DeltaTrain {
        times: Vec<f64>,
        width: f64,
        weight: f64,
    },
    /// Arbitrary user-supplied rate. Must be non-negative wherever sampled.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateFunction::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            RateFunction::DeltaTrain {
                times,
                width,
                weight,
            } => f
                .debug_struct("DeltaTrain")
                .field("times", times)
                .field("width", width)
                .field("weight", weight)
                .finish(),
            RateFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn gaussian_bump(x: f64, sigma: f64) -> f64 {
    let u = x / sigma;
    (-0.5 * u * u).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

impl RateFunction {
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::invalid_input(
                "rate",
                "must be finite and non-negative",
            ));
        }
        Ok(RateFunction::Constant(value))
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RateFunction::Custom(Arc::new(f))
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            RateFunction::Constant(v) => *v,
            RateFunction::DeltaTrain {
                times,
                width,
                weight,
            } => times
                .iter()
                .map(|&tk| weight * gaussian_bump(t - tk, *width))
                .sum(),
            RateFunction::Custom(f) => f(t),
        }
    }
}

/// A train of unit-area Gaussian bumps `Σ_k weight · g(t - t_k; width)`.
///
/// An event whose bump lies entirely inside the integration window
/// contributes exactly `weight` to the integrated rate; events on the window
/// boundary contribute half.
pub fn delta_train_rate(times: Vec<f64>, width: f64, weight: f64) -> Result<RateFunction> {
    if !width.is_finite() || width <= 0.0 {
        return Err(Error::invalid_input("width", "must be positive and finite"));
    }
    if !weight.is_finite() || weight <= 0.0 {
        return Err(Error::invalid_input(
            "weight",
            "must be positive and finite",
        ));
    }
    for (i, &t) in times.iter().enumerate() {
        if !t.is_finite() {
            return Err(Error::invalid_input(
                "times",
                format!("event {i} is not finite"),
            ));
        }
    }
    Ok(RateFunction::DeltaTrain {
        times,
        width,
        weight,
    })
}

/// Diagnostics for a rate function: bump pairs too close to resolve as
/// separate measurement events.
pub fn rate_warnings(rate: &RateFunction) -> Vec<String> {
    let mut warnings = Vec::new();
    if let RateFunction::DeltaTrain { times, width, .. } = rate {
        let mut sorted = times.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in sorted.windows(2) {
            let spacing = pair[1] - pair[0];
            if spacing < 6.0 * width {
                warnings.push(format!(
                    "measurement bumps at t = {:.6} and t = {:.6} overlap \
                     (spacing {:.3e} < 6 * width)",
                    pair[0], pair[1], spacing
                ));
            }
        }
    }
    warnings
}

/// Right-hand side of the master equation at instantaneous rate `rate`.
///
/// The output is Hermitian and traceless: both the commutator and the
/// double-commutator dissipator are trace-free.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    generator: &CMat,
    rate: f64,
    set: &ProjectorSet,
) -> Result<CMat> {
    let dim = rho.dim();
    if generator.nrows() != dim || generator.ncols() != dim || set.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: generator.nrows().max(set.dim()),
        });
    }
    let (defect, row, col) = hermiticity_defect(generator);
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { row, col, defect });
    }
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::invalid_input(
            "rate",
            "must be finite and non-negative",
        ));
    }
    Ok(rhs_raw(rho.matrix(), generator, rate, set))
}

/// Unchecked right-hand side for use inside the integrator, where
/// intermediate states are not valid density matrices.
fn rhs_raw(rho: &CMat, generator: &CMat, rate: f64, set: &ProjectorSet) -> CMat {
    let mut out = (generator * rho - rho * generator) * Complex64::new(0.0, -1.0);
    if rate != 0.0 {
        let dim = rho.nrows();
        let mut dissipator = CMat::zeros(dim, dim);
        for p in set.projectors() {
            let p_rho = p * rho;
            let rho_p = rho * p;
            dissipator += p * &p_rho - (&p_rho * p) * Complex64::new(2.0, 0.0) + &rho_p * p;
        }
        out -= dissipator * Complex64::new(0.5 * rate, 0.0);
    }
    out
}

/// One emitted integration sample: the corrected state plus the defects the
/// raw state carried before Hermitization and trace renormalization.
#[derive(Debug, Clone)]
pub struct Integrated {
    pub state: DensityMatrix,
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
}

/// Integrate the master equation from `t = 0` and emit the state at each of
/// the given sample times.
///
/// Classical fixed-step 4th-order stepping; each sample-to-sample interval
/// is subdivided evenly so every sample time is hit exactly. Every emitted
/// state is Hermitized and trace-renormalized, with the pre-correction
/// defects reported; defects above [`ACCURACY_LIMIT`] abort the run.
pub fn integrate_sampled(
    rho0: &DensityMatrix,
    model: &RabiModel,
    set: &ProjectorSet,
    rate: &RateFunction,
    samples: &[f64],
    step: f64,
) -> Result<Vec<Integrated>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::invalid_input("step", "must be positive and finite"));
    }
    if rho0.dim() != 3 || set.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho0.dim().max(set.dim()),
        });
    }
    for (i, &t) in samples.iter().enumerate() {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::invalid_input(
                "samples",
                format!("sample {i} must be finite and non-negative"),
            ));
        }
        if i > 0 && t <= samples[i - 1] {
            return Err(Error::UnsortedGrid { index: i });
        }
    }
    if let RateFunction::DeltaTrain { times, width, .. } = rate {
        if step > width / 10.0 * (1.0 + 1e-12) {
            return Err(Error::StepTooCoarse {
                step,
                width: *width,
            });
        }
        let t_end = samples.last().copied().unwrap_or(0.0);
        for &tk in times {
            if tk < -1e-9 || tk > t_end + 1e-9 {
                return Err(Error::invalid_input(
                    "times",
                    format!("event at t = {tk} lies outside the integration window"),
                ));
            }
        }
    }

    let generator = rwa_hamiltonian(model);
    let mut rho = rho0.matrix().clone();
    let mut t = 0.0_f64;
    let mut out = Vec::with_capacity(samples.len());

    for &target in samples {
        let delta = target - t;
        if delta > 0.0 {
            let substeps = (delta / step).ceil().max(1.0) as usize;
            let h = delta / substeps as f64;
            let half = h / 2.0;
            for i in 0..substeps {
                let t0 = t + i as f64 * h;
                let k1 = rhs_raw(&rho, &generator, rate.evaluate(t0), set);
                let mid_rate = rate.evaluate(t0 + half);
                let k2 = rhs_raw(
                    &(&rho + &k1 * Complex64::new(half, 0.0)),
                    &generator,
                    mid_rate,
                    set,
                );
                let k3 = rhs_raw(
                    &(&rho + &k2 * Complex64::new(half, 0.0)),
                    &generator,
                    mid_rate,
                    set,
                );
                let k4 = rhs_raw(
                    &(&rho + &k3 * Complex64::new(h, 0.0)),
                    &generator,
                    rate.evaluate(t0 + h),
                    set,
                );
                rho += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4)
                    * Complex64::new(h / 6.0, 0.0);
            }
            t = target;
        }
        out.push(correct_and_report(&rho)?);
    }
    Ok(out)
}

/// Integrate to a single end time. See [`integrate_sampled`].
pub fn integrate(
    rho0: &DensityMatrix,
    model: &RabiModel,
    set: &ProjectorSet,
    rate: &RateFunction,
    t_end: f64,
    step: f64,
) -> Result<Integrated> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::invalid_input("t_end", "must be positive and finite"));
    }
    let mut states = integrate_sampled(rho0, model, set, rate, &[t_end], step)?;
    Ok(states.pop().expect("one sample requested"))
}

fn correct_and_report(rho: &CMat) -> Result<Integrated> {
    let (herm, _, _) = hermiticity_defect(rho);
    let trace = rho.trace();
    let trace_defect = (trace - Complex64::new(1.0, 0.0)).norm();
    if trace_defect > ACCURACY_LIMIT {
        return Err(Error::AccuracyFailure {
            quantity: "trace defect",
            value: trace_defect,
            limit: ACCURACY_LIMIT,
        });
    }
    if herm > ACCURACY_LIMIT {
        return Err(Error::AccuracyFailure {
            quantity: "hermiticity defect",
            value: herm,
            limit: ACCURACY_LIMIT,
        });
    }
    let corrected = hermitize(rho) / Complex64::new(trace.re, 0.0);
    let min_ev = min_eigenvalue(&corrected);
    if min_ev < -INTEGRATED_POSITIVITY_TOL {
        return Err(Error::AccuracyFailure {
            quantity: "negative eigenvalue",
            value: min_ev.abs(),
            limit: INTEGRATED_POSITIVITY_TOL,
        });
    }
    let tol = DensityTolerance {
        positivity: INTEGRATED_POSITIVITY_TOL,
        ..DensityTolerance::default()
    };
    let state = DensityMatrix::with_tolerance(corrected, &tol)?;
    Ok(Integrated {
        state,
        trace_defect,
        hermiticity_defect: herm,
    })
}

/// Default integration step: fine enough for the free oscillation and, for
/// a delta train, fine enough to resolve each bump.
pub fn default_step(model: &RabiModel, rate: &RateFunction) -> Result<f64> {
    let t_p = model.poincare_time().ok_or(Error::UndefinedRecurrence)?;
    let base = t_p / 4096.0;
    Ok(match rate {
        RateFunction::DeltaTrain { width, .. } => base.min(width / 10.0),
        _ => base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::closed_form_propagator;
    use crate::linalg::{max_abs_diff, min_eigenvalue};
    use crate::measurement::{
        evolve_with_measurements, projector_set, DiscreteSchedule, ProjectorKind,
    };
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sqrt15_model() -> RabiModel {
        RabiModel::new(1.0, 15.0_f64.sqrt(), 0.0, 0.0).unwrap()
    }

    fn silent_model() -> RabiModel {
        RabiModel::new(0.0, 0.0, 0.0, 0.0).unwrap()
    }

    fn uniform_density() -> DensityMatrix {
        DensityMatrix::new(CMat::from_element(3, 3, c(1.0 / 3.0, 0.0))).unwrap()
    }

    #[test]
    fn zero_rate_rhs_is_the_pure_commutator() {
        let model = sqrt15_model();
        let generator = rwa_hamiltonian(&model);
        let rho = uniform_density();
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let rhs = lindblad_rhs(&rho, &generator, 0.0, &set).unwrap();
        let expected =
            (&generator * rho.matrix() - rho.matrix() * &generator) * c(0.0, -1.0);
        assert!(max_abs_diff(&rhs, &expected) < 1e-15);
    }

    #[test]
    fn zero_generator_rhs_decays_cross_sector_coherences() {
        let generator = CMat::zeros(3, 3);
        let rho = uniform_density();
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let rate = 2.0;
        let rhs = lindblad_rhs(&rho, &generator, rate, &set).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let cross = (i < 2) != (j < 2);
                let expected = if cross { -rate / 3.0 } else { 0.0 };
                assert_abs_diff_eq!(rhs[(i, j)].re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(rhs[(i, j)].im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        let model = sqrt15_model();
        let generator = rwa_hamiltonian(&model);
        let set = projector_set(ProjectorKind::Full, 3).unwrap();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..100 {
            let g = CMat::from_fn(3, 3, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let gram = &g * g.adjoint();
            let rho = DensityMatrix::new(&gram / c(gram.trace().re, 0.0)).unwrap();
            let rhs = lindblad_rhs(&rho, &generator, rng.gen_range(0.0..5.0), &set).unwrap();
            assert!(rhs.trace().norm() < 1e-13);
            let (defect, _, _) = hermiticity_defect(&rhs);
            assert!(defect < 1e-14);
        }
    }

    #[test]
    fn negative_rate_is_rejected() {
        let rho = uniform_density();
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        assert!(lindblad_rhs(&rho, &CMat::zeros(3, 3), -1.0, &set).is_err());
    }

    #[test]
    fn free_integration_recurs_at_the_poincare_time() {
        let model = sqrt15_model();
        let t_p = model.poincare_time().unwrap();
        let rho0 = DensityMatrix::basis_state(3, 0);
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let rate = RateFunction::constant(0.0).unwrap();
        let step = default_step(&model, &rate).unwrap();
        let out = integrate(&rho0, &model, &set, &rate, t_p, step).unwrap();
        assert!(max_abs_diff(out.state.matrix(), rho0.matrix()) < 1e-8);
        assert!(out.trace_defect < 1e-10);
    }

    #[test]
    fn free_integration_matches_closed_form_at_half_period() {
        let model = sqrt15_model();
        let t_p = model.poincare_time().unwrap();
        let rho0 = DensityMatrix::basis_state(3, 0);
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let rate = RateFunction::constant(0.0).unwrap();
        let step = default_step(&model, &rate).unwrap();
        let out = integrate(&rho0, &model, &set, &rate, t_p / 2.0, step).unwrap();
        assert_abs_diff_eq!(out.state.population(0), 0.765625, epsilon = 1e-8);

        let u = closed_form_propagator(&model, t_p / 2.0).unwrap();
        let exact = &u * rho0.matrix() * u.adjoint();
        assert!(max_abs_diff(out.state.matrix(), &exact) < 1e-8);
    }

    #[test]
    fn single_bump_scales_cross_coherences_by_exp_minus_weight() {
        let rho0 = uniform_density();
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let width = 1e-3;
        for weight in [5.0, 15.0, 30.0] {
            let rate = delta_train_rate(vec![0.5], width, weight).unwrap();
            let out = integrate(&rho0, &silent_model(), &set, &rate, 1.0, width / 40.0).unwrap();
            let m = out.state.matrix();
            let expected = (1.0 / 3.0) * (-weight).exp();
            for (i, j) in [(0, 2), (1, 2)] {
                let ratio = m[(i, j)].re / expected;
                assert!(
                    (ratio - 1.0).abs() < 1e-2,
                    "coherence ({i},{j}) off by factor {ratio} at weight {weight}"
                );
                assert_abs_diff_eq!(m[(i, j)].im, 0.0, epsilon = 1e-12);
            }
            // Diagonal and in-sector entries are untouched by partial dephasing.
            for (i, j) in [(0, 0), (1, 1), (2, 2), (0, 1)] {
                assert_abs_diff_eq!(m[(i, j)].re, 1.0 / 3.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn heavy_bump_is_an_effectively_exact_reduction() {
        let rho0 = uniform_density();
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let rate = delta_train_rate(vec![0.5], 1e-3, 50.0).unwrap();
        let out = integrate(&rho0, &silent_model(), &set, &rate, 1.0, 1e-4).unwrap();
        assert!(out.state.matrix()[(0, 2)].norm() < 1e-12);
        assert!(out.state.matrix()[(1, 2)].norm() < 1e-12);
    }

    #[test]
    fn zero_events_mean_zero_rate() {
        let rate = delta_train_rate(Vec::new(), 1e-3, 50.0).unwrap();
        for t in [0.0, 0.3, 0.9] {
            assert_eq!(rate.evaluate(t), 0.0);
        }
    }

    #[test]
    fn integrated_rate_equals_event_count_times_weight() {
        // Simpson quadrature of D(t) over the window; interior events keep
        // their full bump mass inside.
        let width = 1e-3;
        let weight = 7.0;
        let times = vec![0.2, 0.5, 0.8];
        let rate = delta_train_rate(times.clone(), width, weight).unwrap();

        let intervals = 200_000;
        let h = 1.0 / intervals as f64;
        let mut total = rate.evaluate(0.0) + rate.evaluate(1.0);
        for i in 1..intervals {
            let factor = if i % 2 == 1 { 4.0 } else { 2.0 };
            total += factor * rate.evaluate(i as f64 * h);
        }
        total *= h / 3.0;

        let expected = times.len() as f64 * weight;
        assert_abs_diff_eq!(total, expected, epsilon = 1e-6);
    }

    #[test]
    fn overlapping_bumps_are_flagged() {
        let rate = delta_train_rate(vec![0.100, 0.101], 5e-4, 10.0).unwrap();
        let warnings = rate_warnings(&rate);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("overlap"));

        let spaced = delta_train_rate(vec![0.1, 0.5, 0.9], 5e-4, 10.0).unwrap();
        assert!(rate_warnings(&spaced).is_empty());
    }

    #[test]
    fn coarse_step_is_rejected_for_delta_trains() {
        let rho0 = DensityMatrix::basis_state(3, 0);
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let rate = delta_train_rate(vec![0.5], 1e-3, 10.0).unwrap();
        let err =
            integrate(&rho0, &sqrt15_model(), &set, &rate, 1.0, 1e-3).unwrap_err();
        assert!(matches!(err, Error::StepTooCoarse { .. }));
    }

    #[test]
    fn event_outside_the_window_is_rejected() {
        let rho0 = DensityMatrix::basis_state(3, 0);
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let rate = delta_train_rate(vec![2.0], 1e-3, 10.0).unwrap();
        assert!(integrate(&rho0, &sqrt15_model(), &set, &rate, 1.0, 1e-4).is_err());
    }

    #[test]
    fn delta_train_error_splits_into_width_and_weight_terms() {
        // Distance from the instantaneous composition has two sources.
        // Residual coherence e^{-w} dominates for small weights; shrinking
        // it (w 5 -> 15) shrinks the distance. Past that the floor is the
        // transfer throttled while the bump is stronger than the drive, a
        // window proportional to the width: halving the width halves the
        // distance, while raising the weight further widens that window
        // and slightly raises the floor. At w = 30 the measured floor is
        // ~16 * width / T, so T/2000 sits near 8e-3 and T/8000 near 2e-3.
        let model = sqrt15_model();
        let t_p = model.poincare_time().unwrap();
        let rho0 = DensityMatrix::basis_state(3, 0);
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let schedule = DiscreteSchedule::new(8, t_p).unwrap();
        let exact = evolve_with_measurements(&model, &set, &schedule, &rho0).unwrap();

        let distance = |width: f64, weight: f64| {
            let rate = delta_train_rate(schedule.times(), width, weight).unwrap();
            let step = default_step(&model, &rate).unwrap();
            let out = integrate(&rho0, &model, &set, &rate, t_p, step).unwrap();
            max_abs_diff(out.state.matrix(), exact.matrix())
        };

        let coarse = distance(t_p / 1000.0, 30.0);
        let medium = distance(t_p / 2000.0, 30.0);
        let fine = distance(t_p / 4000.0, 30.0);
        assert!(medium < 1e-2, "distance {medium:.3e}");
        assert!(fine < 5e-3, "distance {fine:.3e}");
        let first = coarse / medium;
        let second = medium / fine;
        assert!((1.9..2.1).contains(&first), "width ratio {first:.3}");
        assert!((1.9..2.1).contains(&second), "width ratio {second:.3}");

        let barely = distance(t_p / 2000.0, 5.0);
        let collapsed = distance(t_p / 2000.0, 15.0);
        assert!(
            collapsed < barely,
            "w 15 distance {collapsed:.3e} vs w 5 {barely:.3e}"
        );
        assert!(
            medium > collapsed,
            "w 30 distance {medium:.3e} vs w 15 {collapsed:.3e}"
        );
    }

    #[test]
    fn narrower_bumps_track_the_composition_better() {
        let model = sqrt15_model();
        let t_p = model.poincare_time().unwrap();
        let rho0 = DensityMatrix::basis_state(3, 0);
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let schedule = DiscreteSchedule::new(4, t_p).unwrap();
        let exact = evolve_with_measurements(&model, &set, &schedule, &rho0).unwrap();

        let mut previous = f64::INFINITY;
        for width in [t_p / 250.0, t_p / 1000.0] {
            let rate = delta_train_rate(schedule.times(), width, 50.0).unwrap();
            let step = default_step(&model, &rate).unwrap();
            let out = integrate(&rho0, &model, &set, &rate, t_p, step).unwrap();
            let distance = max_abs_diff(out.state.matrix(), exact.matrix());
            assert!(
                distance < previous,
                "distance {distance:.3e} did not shrink below {previous:.3e}"
            );
            previous = distance;
        }
    }

    #[test]
    fn trace_and_positivity_stay_controlled_along_a_run() {
        let model = sqrt15_model();
        let t_p = model.poincare_time().unwrap();
        let rho0 = DensityMatrix::basis_state(3, 0);
        let set = projector_set(ProjectorKind::Partial, 3).unwrap();
        let schedule = DiscreteSchedule::new(8, t_p).unwrap();
        let rate = delta_train_rate(schedule.times(), t_p / 2000.0, 50.0).unwrap();
        let step = default_step(&model, &rate).unwrap();

        let samples: Vec<f64> = (1..=100).map(|k| t_p * k as f64 / 100.0).collect();
        let states = integrate_sampled(&rho0, &model, &set, &rate, &samples, step).unwrap();
        assert_eq!(states.len(), 100);
        for s in &states {
            assert!(s.trace_defect < 1e-8, "trace drift {:.3e}", s.trace_defect);
            assert!(s.hermiticity_defect < 1e-10);
            assert!(min_eigenvalue(s.state.matrix()) >= -1e-6);
        }
    }
}
