//! Recurrence time, limit reference curves, and the formal detector that
//! classifies a measured survival curve against the free one.
//!
//! Frequent measurements can push the survival probability above the free
//! curve (freezing, the Zeno regime) or below it (accelerated decay, the
//! inverse regime). A regime claim is only meaningful on an interval that
//! ends no later than the recurrence time, so the detector works on the
//! dimensionless grid `τ = t/T_P` with `τ ≤ 1`.

use serde::Serialize;

use crate::dynamics::{closed_form_propagator, RabiModel};
use crate::error::{Error, Result};
use crate::measurement::{validate_grid, SurvivalCurve};

/// Runs shorter than this many consecutive grid points are discarded as
/// grid noise rather than reported as intervals.
pub const MIN_RUN_POINTS: usize = 3;

/// Default margin by which a curve must clear the free one to count.
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Recurrence period `T_P = 2π/Ω` of the free evolution.
pub fn poincare_time(model: &RabiModel) -> Result<f64> {
    model.poincare_time().ok_or(Error::UndefinedRecurrence)
}

/// The limit curve reached under infinitely frequent partial measurements:
/// a slow two-level oscillation `cos²(Ω₀₁·T_P·τ)` of the bottom transition.
pub fn rabi_limit_at(model: &RabiModel, tau: f64) -> Result<f64> {
    let t_p = poincare_time(model)?;
    Ok((model.omega01() * t_p * tau).cos().powi(2))
}

/// Ground-state population of the free evolution at `τ = t/T_P`.
pub fn free_population_at(model: &RabiModel, tau: f64) -> Result<f64> {
    let t_p = poincare_time(model)?;
    let u = closed_form_propagator(model, tau * t_p)?;
    Ok(u[(0, 0)].norm_sqr())
}

/// The two reference curves sampled over a τ grid.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceCurves {
    pub tau: Vec<f64>,
    pub rabi_limit: Vec<f64>,
    pub free: Vec<f64>,
}

pub fn reference_curves(model: &RabiModel, grid: &[f64]) -> Result<ReferenceCurves> {
    validate_grid(grid)?;
    let mut rabi_limit = Vec::with_capacity(grid.len());
    let mut free = Vec::with_capacity(grid.len());
    for &tau in grid {
        rabi_limit.push(rabi_limit_at(model, tau)?);
        free.push(free_population_at(model, tau)?);
    }
    Ok(ReferenceCurves {
        tau: grid.to_vec(),
        rabi_limit,
        free,
    })
}

/// Classification of a measured curve against the free one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Measured survival above free: measurement-induced freezing.
    #[serde(rename = "QZE")]
    Qze,
    /// Measured survival below free: measurement-accelerated decay.
    #[serde(rename = "IZE")]
    Ize,
    /// No interval clears the margin in either direction.
    #[serde(rename = "none")]
    None,
    /// Intervals of both kinds exist.
    #[serde(rename = "mixed")]
    Mixed,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Qze => write!(f, "QZE"),
            Regime::Ize => write!(f, "IZE"),
            Regime::None => write!(f, "none"),
            Regime::Mixed => write!(f, "mixed"),
        }
    }
}

/// One maximal interval on which the measured curve clears the margin,
/// in τ units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenoInterval {
    pub t1: f64,
    pub t2: f64,
    pub regime: Regime,
}

/// Detector output: overall regime, the intervals supporting it, and the
/// largest deviation seen inside those intervals.
#[derive(Debug, Clone, Serialize)]
pub struct ZenoVerdict {
    pub regime: Regime,
    pub intervals: Vec<ZenoInterval>,
    pub margin: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PointClass {
    Above,
    Below,
    Neither,
}

/// Compare a measured survival curve to the free one on a shared τ grid.
///
/// Reports maximal runs of at least [`MIN_RUN_POINTS`] consecutive points
/// where `measured − free > ε` (freezing) or `< −ε` (acceleration). The
/// grid must end at `τ ≤ 1`: beyond the recurrence time the free curve
/// returns to 1 and the comparison stops being about decay.
pub fn detect_zeno_regime(
    free: &SurvivalCurve,
    measured: &SurvivalCurve,
    epsilon: f64,
) -> Result<ZenoVerdict> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::invalid_input(
            "epsilon",
            "must be positive and finite",
        ));
    }
    if free.len() != measured.len() || free.tau() != measured.tau() {
        return Err(Error::GridMismatch);
    }
    if let Some(&last) = free.tau().last() {
        if last > 1.0 + 1e-12 {
            return Err(Error::invalid_input(
                "grid",
                "regime detection requires the grid to end at tau <= 1",
            ));
        }
    }

    let diff: Vec<f64> = measured
        .p0()
        .iter()
        .zip(free.p0())
        .map(|(m, f)| m - f)
        .collect();
    let classes: Vec<PointClass> = diff
        .iter()
        .map(|&d| {
            if d > epsilon {
                PointClass::Above
            } else if d < -epsilon {
                PointClass::Below
            } else {
                PointClass::Neither
            }
        })
        .collect();

    let mut intervals = Vec::new();
    let mut margin = 0.0_f64;
    let mut start = 0usize;
    while start < classes.len() {
        let class = classes[start];
        let mut end = start;
        while end + 1 < classes.len() && classes[end + 1] == class {
            end += 1;
        }
        let run_len = end - start + 1;
        if class != PointClass::Neither && run_len >= MIN_RUN_POINTS {
            intervals.push(ZenoInterval {
                t1: free.tau()[start],
                t2: free.tau()[end],
                regime: match class {
                    PointClass::Above => Regime::Qze,
                    PointClass::Below => Regime::Ize,
                    PointClass::Neither => unreachable!(),
                },
            });
            for d in &diff[start..=end] {
                margin = margin.max(d.abs());
            }
        }
        start = end + 1;
    }

    let has_qze = intervals.iter().any(|i| i.regime == Regime::Qze);
    let has_ize = intervals.iter().any(|i| i.regime == Regime::Ize);
    let regime = match (has_qze, has_ize) {
        (true, true) => Regime::Mixed,
        (true, false) => Regime::Qze,
        (false, true) => Regime::Ize,
        (false, false) => Regime::None,
    };
    Ok(ZenoVerdict {
        regime,
        intervals,
        margin,
    })
}

/// Largest distance between a curve's ground population and the
/// infinite-measurement limit curve over the curve's own grid.
pub fn rabi_limit_deviation(model: &RabiModel, curve: &SurvivalCurve) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (i, &tau) in curve.tau().iter().enumerate() {
        worst = worst.max((curve.p0()[i] - rabi_limit_at(model, tau)?).abs());
    }
    Ok(worst)
}
