//! Complex matrix helpers: Hermitian propagators, density-matrix checks,
//! and validated state types.
//!
//! Matrices are dense `nalgebra` matrices over `Complex64`. Everything here
//! works for any dimension; the three-level structure lives in [`crate::dynamics`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Hermiticity defect above this is treated as a non-Hermitian input.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Allowed deviation of a density-matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues above this (negative) floor count as non-negative.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Agreement required between independent computations of the same quantity.
pub const ORACLE_TOL: f64 = 1e-10;

/// Tolerances for density-matrix validation, overridable per experiment.
#[derive(Debug, Clone, Copy)]
pub struct DensityTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for DensityTolerance {
    fn default() -> Self {
        DensityTolerance {
            hermiticity: HERMITICITY_TOL,
            trace: TRACE_TOL,
            positivity: POSITIVITY_TOL,
        }
    }
}

/// Outcome of validating a candidate density matrix.
#[derive(Debug, Clone, Copy)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

/// Largest entrywise |M[i][j] - conj(M[j][i])| and its location.
pub fn hermiticity_defect(m: &CMat) -> (f64, usize, usize) {
    let mut worst = 0.0_f64;
    let (mut wr, mut wc) = (0, 0);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
                wr = i;
                wc = j;
            }
        }
    }
    (worst, wr, wc)
}

pub fn ensure_finite(m: &CMat) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of a Hermitian matrix. The input is symmetrized first
/// so rounding-level asymmetry does not perturb the spectrum.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    let h = hermitize(m);
    let eig = h.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// (M + M†) / 2.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Unitary propagator `exp(-i H t)` of a Hermitian generator, via
/// eigendecomposition: `H = V Λ V†` gives `exp(-iHt) = V exp(-iΛt) V†`.
///
/// Rejects non-square, non-finite, and non-Hermitian input. The generator is
/// symmetrized before decomposition, so defects below [`HERMITICITY_TOL`]
/// cannot leak into the result.
pub fn hermitian_propagator(generator: &CMat, t: f64) -> Result<CMat> {
    if generator.nrows() != generator.ncols() {
        return Err(Error::DimensionMismatch {
            expected: generator.nrows(),
            found: generator.ncols(),
        });
    }
    ensure_finite(generator)?;
    if !t.is_finite() {
        return Err(Error::invalid_input("time", "must be finite"));
    }
    let (defect, row, col) = hermiticity_defect(generator);
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { row, col, defect });
    }

    let h = hermitize(generator);
    let eig = h.symmetric_eigen();
    let n = generator.nrows();
    let phases = CMat::from_diagonal(&CVec::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&lam| {
            let angle = -lam * t;
            Complex64::new(angle.cos(), angle.sin())
        }),
    ));
    Ok(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())
}

/// Validate a candidate density matrix against explicit tolerances.
pub fn check_density_with(m: &CMat, tol: &DensityTolerance) -> DensityReport {
    let (herm, _, _) = hermiticity_defect(m);
    let trace_defect = (m.trace() - Complex64::new(1.0, 0.0)).norm();
    let min_ev = min_eigenvalue(m);
    DensityReport {
        hermiticity_defect: herm,
        trace_defect,
        min_eigenvalue: min_ev,
        passes: herm <= tol.hermiticity && trace_defect <= tol.trace && min_ev >= -tol.positivity,
    }
}

/// Validate with the default tolerances.
pub fn check_density(m: &CMat) -> DensityReport {
    check_density_with(m, &DensityTolerance::default())
}

/// A density matrix that passed validation at construction.
///
/// The wrapped matrix is Hermitian within tolerance, has unit trace, and is
/// positive semidefinite up to the positivity floor. Operations that evolve
/// a `DensityMatrix` re-check these invariants where drift is possible.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_tolerance(matrix, &DensityTolerance::default())
    }

    pub fn with_tolerance(matrix: CMat, tol: &DensityTolerance) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        ensure_finite(&matrix)?;
        let report = check_density_with(&matrix, tol);
        if !report.passes {
            return Err(Error::InvalidDensity {
                hermiticity: report.hermiticity_defect,
                trace: report.trace_defect,
                min_eigenvalue: report.min_eigenvalue,
            });
        }
        Ok(DensityMatrix { matrix })
    }

    /// |ψ⟩⟨ψ| for a validated state vector.
    pub fn pure(state: &StateVector) -> Self {
        let v = state.vector();
        DensityMatrix {
            matrix: v * v.adjoint(),
        }
    }

    /// |k⟩⟨k| in an `dim`-level system.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut m = CMat::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        DensityMatrix { matrix: m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim > 0);
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        DensityMatrix {
            matrix: CMat::from_diagonal(&CVec::from_element(dim, w)),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Real part of the k-th diagonal entry.
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    /// Wrap a matrix produced by a trusted internal step without re-validating.
    pub(crate) fn trusted(matrix: CMat) -> Self {
        DensityMatrix { matrix }
    }
}

/// A normalized complex state vector.
#[derive(Debug, Clone)]
pub struct StateVector {
    vector: CVec,
}

impl StateVector {
    pub fn new(vector: CVec) -> Result<Self> {
        for (i, z) in vector.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: 0 });
            }
        }
        let defect = (vector.norm() - 1.0).abs();
        if defect > 1e-12 {
            return Err(Error::NotNormalized { defect });
        }
        Ok(StateVector { vector })
    }

    /// |k⟩ in a `dim`-level system.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = CVec::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        StateVector { vector: v }
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}
