//! Validated value types: pure states, density operators, unitaries and
//! orthonormal bases. Public constructors check every invariant; the
//! crate-internal `new_unchecked` paths are used only where the invariant
//! holds by construction (e.g. outputs of trace-preserving maps).

use serde::{Deserialize, Serialize};

use crate::eigen::eigvalsh;
use crate::error::{Error, Result};
use crate::linalg::{inner, kron_vec, norm_sqr, Matrix, C64, ONE, ZERO};

/// Default algebraic tolerance.
pub const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::validity("state vector must have positive dimension"));
        }
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > TOL {
            return Err(Error::validity(format!(
                "state vector has squared norm {n}"
            )));
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if amplitudes.is_empty() || n < 1e-150 || !n.is_finite() {
            return Err(Error::validity("cannot normalise a zero vector"));
        }
        Ok(StateVector {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    pub(crate) fn new_unchecked(amplitudes: Vec<C64>) -> Self {
        debug_assert!((norm_sqr(&amplitudes) - 1.0).abs() < 1e-8);
        StateVector { amplitudes }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        StateVector { amplitudes }
    }

    /// `Σ_i |ii⟩ / √d`
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amplitudes = vec![ZERO; d * d];
        let w = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            amplitudes[i * d + i] = w;
        }
        StateVector { amplitudes }
    }

    /// Real qubit state `cos(t/2)|0⟩ + sin(t/2)|1⟩` (Bloch angle `t` in the x–z plane).
    pub fn qubit_xz(t: f64) -> Self {
        let (s, c) = (t / 2.0).sin_cos();
        StateVector {
            amplitudes: vec![C64::new(c, 0.0), C64::new(s, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// |⟨self|other⟩|²
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        Ok(StateVector {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes)?,
        })
    }

    pub fn conj(&self) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn apply(&self, u: &UnitaryOperator) -> Result<StateVector> {
        if u.dim() != self.dim() {
            return Err(Error::shape("unitary and state dimensions differ"));
        }
        Ok(StateVector {
            amplitudes: u.matrix().apply(&self.amplitudes),
        })
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator::new_unchecked(Matrix::outer(&self.amplitudes, &self.amplitudes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityOperator {
    matrix: Matrix,
}

impl DensityOperator {
    /// Checks Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::shape(
                "density operator must be a non-empty square matrix",
            ));
        }
        if !matrix.is_hermitian(TOL) {
            return Err(Error::validity("density operator is not Hermitian"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::validity(format!("density operator has trace {tr}")));
        }
        let min = eigvalsh(&matrix)?[0];
        if min < -TOL {
            return Err(Error::validity(format!(
                "density operator has eigenvalue {min}"
            )));
        }
        Ok(DensityOperator { matrix })
    }

    pub(crate) fn new_unchecked(matrix: Matrix) -> Self {
        debug_assert!(matrix.is_square());
        debug_assert!(
            (matrix.trace().re - 1.0).abs() < 1e-8,
            "trace {}",
            matrix.trace()
        );
        DensityOperator { matrix }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator {
            matrix: Matrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator {
            matrix: self.matrix.kron(&other.matrix)?,
        })
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
        let m = crate::linalg::partial_trace(&self.matrix, dims, keep)?;
        Ok(DensityOperator { matrix: m })
    }

    /// `U ρ U†`
    pub fn evolve(&self, u: &UnitaryOperator) -> Result<DensityOperator> {
        if u.dim() != self.dim() {
            return Err(Error::shape("unitary and state dimensions differ"));
        }
        Ok(DensityOperator {
            matrix: u.matrix().conjugate_by(&self.matrix),
        })
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> f64 {
        inner(psi.amplitudes(), &self.matrix.apply(psi.amplitudes())).re
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryOperator {
    matrix: Matrix,
}

impl UnitaryOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::shape("unitary must be a non-empty square matrix"));
        }
        if !matrix.is_unitary(TOL) {
            return Err(Error::validity("matrix is not unitary within 1e-10"));
        }
        Ok(UnitaryOperator { matrix })
    }

    pub(crate) fn new_unchecked(matrix: Matrix) -> Self {
        debug_assert!(matrix.is_unitary(1e-8));
        UnitaryOperator { matrix }
    }

    pub fn identity(d: usize) -> Self {
        UnitaryOperator {
            matrix: Matrix::identity(d),
        }
    }

    /// Pauli I, X, Y, Z for `k = 0..4`.
    pub fn pauli(k: usize) -> Self {
        UnitaryOperator {
            matrix: crate::linalg::pauli(k),
        }
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryOperator {
            matrix: Matrix::from_real(2, 2, &[h, h, h, -h]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn conj(&self) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.conj(),
        }
    }

    pub fn transpose(&self) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn compose(&self, after: &UnitaryOperator) -> Result<UnitaryOperator> {
        Ok(UnitaryOperator {
            matrix: after.matrix.matmul(&self.matrix)?,
        })
    }

    pub fn tensor(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        Ok(UnitaryOperator {
            matrix: self.matrix.kron(&other.matrix)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    vectors: Vec<StateVector>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::validity("basis must be non-empty"));
        }
        if vectors.iter().any(|v| v.dim() != d) {
            return Err(Error::shape(
                "basis must contain exactly dim vectors of length dim",
            ));
        }
        for j in 0..d {
            for k in 0..d {
                let expected = if j == k { ONE } else { ZERO };
                if (vectors[j].inner(&vectors[k]) - expected).norm() > TOL {
                    return Err(Error::validity(format!(
                        "basis vectors {j},{k} not orthonormal"
                    )));
                }
            }
        }
        Ok(OrthonormalBasis { vectors })
    }

    pub fn computational(d: usize) -> Self {
        OrthonormalBasis {
            vectors: (0..d).map(|k| StateVector::basis(d, k)).collect(),
        }
    }

    /// {|+⟩, |−⟩}
    pub fn hadamard() -> Self {
        Self::from_unitary_columns(&UnitaryOperator::hadamard())
    }

    pub fn from_unitary_columns(u: &UnitaryOperator) -> Self {
        let d = u.dim();
        OrthonormalBasis {
            vectors: (0..d)
                .map(|j| StateVector::new_unchecked(u.matrix().column(j)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> &StateVector {
        &self.vectors[j]
    }

    /// Basis of complex-conjugated vectors `{b_j*}`.
    pub fn conjugate(&self) -> OrthonormalBasis {
        OrthonormalBasis {
            vectors: self.vectors.iter().map(StateVector::conj).collect(),
        }
    }

    /// Unitary whose columns are the basis vectors.
    pub fn to_unitary(&self) -> UnitaryOperator {
        let cols: Vec<&[C64]> = self.vectors.iter().map(|v| v.amplitudes()).collect();
        UnitaryOperator::new_unchecked(Matrix::from_columns(&cols))
    }

    /// Born probabilities `|⟨b_j|ψ⟩|²`.
    pub fn probabilities(&self, psi: &StateVector) -> Vec<f64> {
        self.vectors.iter().map(|b| b.overlap(psi)).collect()
    }
}
