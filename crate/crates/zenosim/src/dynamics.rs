//! Rabi dynamics of a three-level ladder atom driven on both transitions.
//!
//! In the rotating-wave picture the amplitudes obey `da/dt = -i M a` with
//!
//! ```text
//!     M = [ 0            Ω01 e^{+iφ01}  0            ]
//!         [ Ω01 e^{-iφ01} 0             Ω12 e^{+iφ12} ]
//!         [ 0            Ω12 e^{-iφ12}  0            ]
//! ```
//!
//! `M` satisfies `M³ = Ω² M` with `Ω = √(Ω01² + Ω12²)`, so its spectrum is
//! `{0, ±Ω}` and the propagator has the closed form
//!
//! ```text
//!     U(t) = 1 - i (M/Ω) sin Ωt - (M/Ω)² (1 - cos Ωt)
//! ```
//!
//! which is periodic with period `2π/Ω`, the recurrence time of the system.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, StateVector};

/// Drive parameters of the two-transition ladder system.
///
/// Both Rabi frequencies are non-negative; a zero frequency switches the
/// corresponding transition off. Phases are unconstrained. Populations do
/// not depend on the phases, only coherences do.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiModel {
    omega01: f64,
    omega12: f64,
    phi01: f64,
    phi12: f64,
}

impl RabiModel {
    pub fn new(omega01: f64, omega12: f64, phi01: f64, phi12: f64) -> Result<Self> {
        for (name, v) in [
            ("omega01", omega01),
            ("omega12", omega12),
            ("phi01", phi01),
            ("phi12", phi12),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid_input(name, "must be finite"));
            }
        }
        if omega01 < 0.0 || omega12 < 0.0 {
            return Err(Error::invalid_input(
                "Rabi frequency",
                "must be non-negative",
            ));
        }
        Ok(RabiModel {
            omega01,
            omega12,
            phi01,
            phi12,
        })
    }

    pub fn omega01(&self) -> f64 {
        self.omega01
    }

    pub fn omega12(&self) -> f64 {
        self.omega12
    }

    pub fn phi01(&self) -> f64 {
        self.phi01
    }

    pub fn phi12(&self) -> f64 {
        self.phi12
    }

    /// Combined frequency `Ω = √(Ω01² + Ω12²)`.
    pub fn omega(&self) -> f64 {
        (self.omega01 * self.omega01 + self.omega12 * self.omega12).sqrt()
    }

    /// Recurrence period `2π/Ω`, or `None` when both drives are off.
    pub fn poincare_time(&self) -> Option<f64> {
        let omega = self.omega();
        if omega == 0.0 {
            None
        } else {
            Some(2.0 * std::f64::consts::PI / omega)
        }
    }
}

/// The interaction-picture generator `M` described in the module docs.
pub fn rwa_hamiltonian(model: &RabiModel) -> CMat {
    let e01 = Complex64::from_polar(model.omega01, model.phi01);
    let e12 = Complex64::from_polar(model.omega12, model.phi12);
    let z = Complex64::new(0.0, 0.0);
    CMat::from_row_slice(3, 3, &[z, e01, z, e01.conj(), z, e12, z, e12.conj(), z])
}

/// Propagator `U(t) = exp(-i M t)` in closed form.
///
/// Uses the identity `M³ = Ω² M`, so no diagonalization is involved. For
/// `Ω = 0` the generator vanishes and the propagator is the identity.
pub fn closed_form_propagator(model: &RabiModel, t: f64) -> Result<CMat> {
    if !t.is_finite() {
        return Err(Error::invalid_input("time", "must be finite"));
    }
    let omega = model.omega();
    if omega == 0.0 {
        return Ok(CMat::identity(3, 3));
    }
    let m = rwa_hamiltonian(model);
    let m_over = &m / Complex64::new(omega, 0.0);
    let m_over_sq = &m_over * &m_over;
    let alpha = omega * t;
    let sin_term = Complex64::new(0.0, -alpha.sin());
    let cos_term = Complex64::new(-(1.0 - alpha.cos()), 0.0);
    Ok(CMat::identity(3, 3) + &m_over * sin_term + m_over_sq * cos_term)
}

/// Evolve a pure state for time `t` under the model's generator.
pub fn pure_state_evolve(model: &RabiModel, state: &StateVector, t: f64) -> Result<StateVector> {
    if state.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: state.dim(),
        });
    }
    let u = closed_form_propagator(model, t)?;
    let evolved = &u * state.vector();
    StateVector::new(evolved)
}

/// Bare level energies of the atom, used to move between the lab frame and
/// the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomLevels {
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl AtomLevels {
    pub fn new(omega0: f64, omega1: f64, omega2: f64) -> Result<Self> {
        for (name, v) in [("omega0", omega0), ("omega1", omega1), ("omega2", omega2)] {
            if !v.is_finite() {
                return Err(Error::invalid_input(name, "must be finite"));
            }
        }
        Ok(AtomLevels {
            omega0,
            omega1,
            omega2,
        })
    }

    fn energies(&self) -> [f64; 3] {
        [self.omega0, self.omega1, self.omega2]
    }
}

/// Direction of the frame change in [`interaction_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformDirection {
    /// Lab frame to rotating frame: entry (i, j) gains `e^{+i(ωi-ωj)t}`.
    ToInteraction,
    /// Rotating frame back to the lab frame.
    FromInteraction,
}

/// Apply the entrywise phase rotation that moves a density matrix between
/// the lab frame and the frame rotating with the bare level energies.
///
/// Diagonal entries are untouched, so populations are frame-independent.
pub fn interaction_transform(
    rho: &CMat,
    levels: &AtomLevels,
    t: f64,
    direction: TransformDirection,
) -> Result<CMat> {
    if rho.nrows() != 3 || rho.ncols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho.nrows().max(rho.ncols()),
        });
    }
    if !t.is_finite() {
        return Err(Error::invalid_input("time", "must be finite"));
    }
    let sign = match direction {
        TransformDirection::ToInteraction => 1.0,
        TransformDirection::FromInteraction => -1.0,
    };
    let e = levels.energies();
    let mut out = rho.clone();
    for i in 0..3 {
        for j in 0..3 {
            let phase = Complex64::from_polar(1.0, sign * (e[i] - e[j]) * t);
            out[(i, j)] *= phase;
        }
    }
    Ok(out)
}

/// One frequency ratio checked by [`validate_rwa`].
#[derive(Debug, Clone)]
pub struct RwaRatio {
    /// Which comparison this is, e.g. `"|w1 - w0| / Omega_max"`.
    pub label: String,
    pub value: f64,
}

/// Outcome of the rotating-wave validity check.
#[derive(Debug, Clone)]
pub struct RwaReport {
    pub ratios: Vec<RwaRatio>,
    pub threshold: f64,
    pub passes: bool,
}

/// Check that the rotating-wave description is self-consistent: every
/// transition frequency, and every difference between transition
/// frequencies, must exceed `threshold` times the strongest drive.
///
/// Nine ratios are evaluated: three for the transition frequencies
/// `|ω1-ω0|`, `|ω2-ω0|`, `|ω2-ω1|` against `Ω_max`, and six for the sums and
/// differences of each pair of transition frequencies.
pub fn validate_rwa(levels: &AtomLevels, model: &RabiModel, threshold: f64) -> Result<RwaReport> {
    if threshold.is_nan() || threshold <= 1.0 {
        return Err(Error::invalid_input("threshold", "must exceed 1"));
    }
    let omega_max = model.omega01.max(model.omega12);
    if omega_max == 0.0 {
        return Err(Error::invalid_input(
            "model",
            "at least one Rabi frequency must be positive",
        ));
    }

    let w10 = levels.omega1 - levels.omega0;
    let w20 = levels.omega2 - levels.omega0;
    let w21 = levels.omega2 - levels.omega1;
    let transitions = [("w10", w10), ("w20", w20), ("w21", w21)];

    let mut ratios = Vec::with_capacity(9);
    for (name, w) in transitions {
        ratios.push(RwaRatio {
            label: format!("|{name}| / Omega_max"),
            value: w.abs() / omega_max,
        });
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let (na, wa) = transitions[i];
            let (nb, wb) = transitions[j];
            ratios.push(RwaRatio {
                label: format!("|{na} - {nb}| / Omega_max"),
                value: (wa - wb).abs() / omega_max,
            });
            ratios.push(RwaRatio {
                label: format!("|{na} + {nb}| / Omega_max"),
                value: (wa + wb).abs() / omega_max,
            });
        }
    }

    let passes = ratios.iter().all(|r| r.value > threshold);
    Ok(RwaReport {
        ratios,
        threshold,
        passes,
    })
}

/// Amplitude vector after free evolution from the ground state: column 0 of
/// the propagator.
pub fn ground_state_amplitudes(model: &RabiModel, t: f64) -> Result<CVec> {
    let u = closed_form_propagator(model, t)?;
    Ok(u.column(0).into_owned())
}
