//! Projective measurements and measurement-interleaved evolution.
//!
//! A non-selective ideal measurement acts on the density matrix as the
//! reduction map `ρ → Σᵢ PᵢρPᵢ` over a complete set of orthogonal diagonal
//! projectors. Interleaving reductions with free propagation produces the
//! measured survival curves; the free curve is the same sampling with no
//! reductions at all.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{closed_form_propagator, RabiModel};
use crate::error::{Error, Result};
use crate::linalg::{check_density, CMat, DensityMatrix, StateVector};
use crate::master::RateFunction;

/// Which complete projector family to measure with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectorKind {
    /// Two sectors: levels {0, 1} against level {2}. Detects only whether
    /// the atom has reached the top level.
    Partial,
    /// Three singleton sectors, one per level. Kills every coherence.
    Full,
}

impl std::str::FromStr for ProjectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partial" => Ok(ProjectorKind::Partial),
            "full" => Ok(ProjectorKind::Full),
            other => Err(Error::invalid_input(
                "projector kind",
                format!("expected 'partial' or 'full', got '{other}'"),
            )),
        }
    }
}

impl std::fmt::Display for ProjectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProjectorKind::Partial => write!(f, "partial"),
            ProjectorKind::Full => write!(f, "full"),
        }
    }
}

/// A complete set of mutually orthogonal diagonal 0/1 projectors.
///
/// Only such sets are constructible, so every `ProjectorSet` commutes with
/// any diagonal free Hamiltonian and satisfies `Σ Pᵢ = I` exactly.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    projectors: Vec<CMat>,
    labels: Vec<String>,
}

impl ProjectorSet {
    /// Build projectors from a partition of the level indices into sectors.
    /// Every index in `0..dim` must appear in exactly one sector.
    pub fn from_partition(dim: usize, sectors: &[Vec<usize>]) -> Result<Self> {
        if dim == 0 || sectors.is_empty() {
            return Err(Error::invalid_input(
                "partition",
                "dimension and sector list must be non-empty",
            ));
        }
        let mut seen = vec![false; dim];
        for sector in sectors {
            for &k in sector {
                if k >= dim {
                    return Err(Error::invalid_input(
                        "partition",
                        format!("index {k} out of range for dimension {dim}"),
                    ));
                }
                if seen[k] {
                    return Err(Error::invalid_input(
                        "partition",
                        format!("index {k} appears in more than one sector"),
                    ));
                }
                seen[k] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::invalid_input(
                "partition",
                "every level index must belong to a sector",
            ));
        }

        let mut projectors = Vec::with_capacity(sectors.len());
        let mut labels = Vec::with_capacity(sectors.len());
        for sector in sectors {
            let mut p = CMat::zeros(dim, dim);
            let mut label = String::from("P");
            let mut sorted = sector.clone();
            sorted.sort_unstable();
            for &k in &sorted {
                p[(k, k)] = Complex64::new(1.0, 0.0);
                label.push_str(&k.to_string());
            }
            projectors.push(p);
            labels.push(label);
        }
        Ok(ProjectorSet { projectors, labels })
    }

    pub fn projectors(&self) -> &[CMat] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    /// The reduction map `Σᵢ PᵢρPᵢ`.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let dim = self.dim();
        let mut out = CMat::zeros(dim, dim);
        for p in &self.projectors {
            out += p * rho * p;
        }
        out
    }
}

/// The standard projector families on a `dim`-level system.
pub fn projector_set(kind: ProjectorKind, dim: usize) -> Result<ProjectorSet> {
    match kind {
        ProjectorKind::Partial => {
            if dim != 3 {
                return Err(Error::invalid_input(
                    "projector kind",
                    "the partial set {01 | 2} is defined for three levels",
                ));
            }
            ProjectorSet::from_partition(3, &[vec![0, 1], vec![2]])
        }
        ProjectorKind::Full => {
            let sectors: Vec<Vec<usize>> = (0..dim).map(|k| vec![k]).collect();
            ProjectorSet::from_partition(dim, &sectors)
        }
    }
}

/// Apply the reduction map to a validated density matrix.
///
/// The map preserves trace, Hermiticity, and positivity exactly, and leaves
/// every diagonal entry unchanged; only coherences between different sectors
/// are zeroed.
pub fn reduce(rho: &DensityMatrix, set: &ProjectorSet) -> Result<DensityMatrix> {
    if rho.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix::trusted(set.apply(rho.matrix())))
}

/// `n` equally spaced measurements over a window `T`: reduction events at
/// `t_k = k·T/n` for `k = 0..n`, which is `n + 1` reductions in total
/// (both endpoints included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteSchedule {
    count: usize,
    window: f64,
}

impl DiscreteSchedule {
    pub fn new(count: usize, window: f64) -> Result<Self> {
        if count < 1 {
            return Err(Error::invalid_input("schedule count", "must be at least 1"));
        }
        if !window.is_finite() || window <= 0.0 {
            return Err(Error::invalid_input(
                "schedule window",
                "must be positive and finite",
            ));
        }
        Ok(DiscreteSchedule { count, window })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    /// Spacing between consecutive reduction events.
    pub fn dt(&self) -> f64 {
        self.window / self.count as f64
    }

    /// All `count + 1` event times, endpoints included.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.count).map(|k| k as f64 * dt).collect()
    }
}

/// How measurements act during a run: a discrete event schedule (ideal
/// instantaneous reductions) or a continuous rate entering the master
/// equation.
#[derive(Debug, Clone)]
pub enum MeasurementSchedule {
    Discrete(DiscreteSchedule),
    Continuous(RateFunction),
}

/// Full measurement-interleaved evolution over the schedule window:
/// a reduction at `t = 0`, then for each interval a free propagation
/// followed by a reduction, ending with the reduction at `t = T`.
pub fn evolve_with_measurements(
    model: &RabiModel,
    set: &ProjectorSet,
    schedule: &DiscreteSchedule,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    if rho0.dim() != 3 || set.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho0.dim().max(set.dim()),
        });
    }
    let u = closed_form_propagator(model, schedule.dt())?;
    let u_dag = u.adjoint();
    let mut rho = set.apply(rho0.matrix());
    for _ in 0..schedule.count() {
        rho = set.apply(&(&u * rho * &u_dag));
    }
    Ok(DensityMatrix::trusted(rho))
}

/// Probability of finding the system in `psi0`, `⟨ψ₀|ρ|ψ₀⟩`.
///
/// The value of a valid density matrix is real up to rounding; an imaginary
/// part above 1e-12 indicates corrupted state and is reported as an error.
pub fn survival_probability(rho: &DensityMatrix, psi0: &StateVector) -> Result<f64> {
    if rho.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi0.dim(),
        });
    }
    let v = psi0.vector();
    let p = (v.adjoint() * rho.matrix() * v)[(0, 0)];
    if p.im.abs() > 1e-12 {
        return Err(Error::ComplexSurvival { imag: p.im });
    }
    // Validity of rho bounds the real part inside [-1e-10, 1 + 2e-10].
    Ok(p.re.clamp(0.0, 1.0))
}

/// Level populations sampled over a grid of dimensionless times `τ = t/T_P`.
#[derive(Debug, Clone, Serialize)]
pub struct SurvivalCurve {
    tau: Vec<f64>,
    p0: Vec<f64>,
    p1: Vec<f64>,
    p2: Vec<f64>,
}

impl SurvivalCurve {
    pub fn new(tau: Vec<f64>, p0: Vec<f64>, p1: Vec<f64>, p2: Vec<f64>) -> Result<Self> {
        let len = tau.len();
        if p0.len() != len || p1.len() != len || p2.len() != len {
            return Err(Error::invalid_input(
                "survival curve",
                "tau and population lists must have equal length",
            ));
        }
        validate_grid(&tau)?;
        for i in 0..len {
            for (name, v) in [("p0", p0[i]), ("p1", p1[i]), ("p2", p2[i])] {
                if !(-1e-10..=1.0 + 1e-10).contains(&v) {
                    return Err(Error::invalid_input(
                        "survival curve",
                        format!("{name}[{i}] = {v} outside [0, 1]"),
                    ));
                }
            }
            let sum = p0[i] + p1[i] + p2[i];
            if (sum - 1.0).abs() > 1e-10 {
                return Err(Error::invalid_input(
                    "survival curve",
                    format!("populations at index {i} sum to {sum}, expected 1"),
                ));
            }
        }
        Ok(SurvivalCurve { tau, p0, p1, p2 })
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn p0(&self) -> &[f64] {
        &self.p0
    }

    pub fn p1(&self) -> &[f64] {
        &self.p1
    }

    pub fn p2(&self) -> &[f64] {
        &self.p2
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }
}

/// Worst state-validity drift observed while sampling a curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveDefects {
    pub max_trace_defect: f64,
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl CurveDefects {
    fn none() -> Self {
        CurveDefects {
            max_trace_defect: 0.0,
            max_hermiticity_defect: 0.0,
            min_eigenvalue: f64::INFINITY,
        }
    }

    fn absorb(&mut self, rho: &CMat) {
        let report = check_density(rho);
        self.max_trace_defect = self.max_trace_defect.max(report.trace_defect);
        self.max_hermiticity_defect = self
            .max_hermiticity_defect
            .max(report.hermiticity_defect);
        self.min_eigenvalue = self.min_eigenvalue.min(report.min_eigenvalue);
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    for (i, &tau) in grid.iter().enumerate() {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::invalid_input(
                "grid",
                format!("tau[{i}] = {tau} must be finite and non-negative"),
            ));
        }
        if i > 0 && tau <= grid[i - 1] {
            return Err(Error::UnsortedGrid { index: i });
        }
    }
    Ok(())
}

/// Number of schedule events with `t_k ≤ t`, robust to the grid landing on
/// an event time up to rounding: `t/dt` within 1e-9 of an integer counts as
/// that integer.
fn events_up_to(t: f64, dt: f64, count: usize) -> usize {
    let x = t / dt;
    let nearest = x.round();
    let k = if (x - nearest).abs() <= 1e-9 {
        nearest as i64
    } else {
        x.floor() as i64
    };
    k.clamp(0, count as i64) as usize
}

/// Sample level populations over a τ grid.
///
/// With a projector set and schedule, each sample applies every scheduled
/// reduction at `t_k ≤ τ·T_P` (the event at `t = 0` included) and then
/// propagates freely up to `τ·T_P` with no trailing reduction; at `τ·T_P`
/// equal to the schedule window this reproduces the full interleaved
/// composition. With neither, the curve is the free evolution of `rho0`.
pub fn survival_curve(
    model: &RabiModel,
    set: Option<&ProjectorSet>,
    schedule: Option<&DiscreteSchedule>,
    grid: &[f64],
    rho0: &DensityMatrix,
) -> Result<SurvivalCurve> {
    survival_curve_detailed(model, set, schedule, grid, rho0).map(|(curve, _)| curve)
}

/// As [`survival_curve`], also reporting the worst validity drift seen
/// across all sampled states.
pub fn survival_curve_detailed(
    model: &RabiModel,
    set: Option<&ProjectorSet>,
    schedule: Option<&DiscreteSchedule>,
    grid: &[f64],
    rho0: &DensityMatrix,
) -> Result<(SurvivalCurve, CurveDefects)> {
    validate_grid(grid)?;
    if rho0.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho0.dim(),
        });
    }
    let t_p = match model.poincare_time() {
        Some(t) => t,
        None => return Err(Error::UndefinedRecurrence),
    };
    let (set, schedule) = match (set, schedule) {
        (Some(s), Some(sch)) => (Some(s), Some(sch)),
        (None, None) => (None, None),
        _ => {
            return Err(Error::invalid_input(
                "measured curve",
                "projector set and schedule must be supplied together",
            ))
        }
    };
    if let Some(sch) = schedule {
        if let Some(&last) = grid.last() {
            if last * t_p > sch.window() * (1.0 + 1e-12) + 1e-9 {
                return Err(Error::invalid_input(
                    "grid",
                    "grid extends beyond the schedule window",
                ));
            }
        }
    }

    let mut defects = CurveDefects::none();
    let mut tau_out = Vec::with_capacity(grid.len());
    let mut p0 = Vec::with_capacity(grid.len());
    let mut p1 = Vec::with_capacity(grid.len());
    let mut p2 = Vec::with_capacity(grid.len());

    let mut push_sample = |tau: f64, rho: &CMat, defects: &mut CurveDefects| {
        defects.absorb(rho);
        tau_out.push(tau);
        p0.push(rho[(0, 0)].re.clamp(0.0, 1.0));
        p1.push(rho[(1, 1)].re.clamp(0.0, 1.0));
        p2.push(rho[(2, 2)].re.clamp(0.0, 1.0));
    };

    match (set, schedule) {
        (Some(set), Some(schedule)) => {
            let dt = schedule.dt();
            let u_step = closed_form_propagator(model, dt)?;
            let u_step_dag = u_step.adjoint();
            // State after the reduction event with index `applied`.
            let mut state = set.apply(rho0.matrix());
            let mut applied = 0usize;
            for &tau in grid {
                let t = tau * t_p;
                let k = events_up_to(t, dt, schedule.count());
                while applied < k {
                    state = set.apply(&(&u_step * &state * &u_step_dag));
                    applied += 1;
                }
                let residual = (t - applied as f64 * dt).max(0.0);
                let u_res = closed_form_propagator(model, residual)?;
                let sample = &u_res * &state * u_res.adjoint();
                push_sample(tau, &sample, &mut defects);
            }
        }
        _ => {
            for &tau in grid {
                let u = closed_form_propagator(model, tau * t_p)?;
                let sample = &u * rho0.matrix() * u.adjoint();
                push_sample(tau, &sample, &mut defects);
            }
        }
    }

    let curve = SurvivalCurve::new(tau_out, p0, p1, p2)?;
    Ok((curve, defects))
}
