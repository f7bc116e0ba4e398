//! Choi states and the PPT test.

use super::kraus::KrausChannel;
use super::retro::RetroChannelSpec;
use crate::eigen::eigvalsh;
use crate::error::Result;
use crate::linalg::{partial_transpose, Matrix, C64};
use crate::states::DensityOperator;

/// A normalised Choi state `J = (id ⊗ N)(Φ)` with its factor dimensions.
#[derive(Clone, Debug)]
pub struct Choi {
    pub state: DensityOperator,
    pub input_dim: usize,
    pub output_dim: usize,
}

pub fn choi_of(channel: &KrausChannel) -> Result<Choi> {
    let din = channel.input_dim();
    let dout = channel.output_dim();
    let n = din * dout;
    let mut j = Matrix::zeros(n, n);
    let w = 1.0 / din as f64;
    for i in 0..din {
        for k in 0..din {
            let mut eik = Matrix::zeros(din, din);
            eik[(i, k)] = C64::new(1.0, 0.0);
            let block = channel.apply_matrix(&eik)?;
            for a in 0..dout {
                for b in 0..dout {
                    j[(i * dout + a, k * dout + b)] = block[(a, b)] * w;
                }
            }
        }
    }
    Ok(Choi {
        state: DensityOperator::new_unchecked(j.hermitian_part()),
        input_dim: din,
        output_dim: dout,
    })
}

/// Choi state of a finite-flag retrocorrectable channel, the flag register
/// being a block-diagonal part of the output. Haar ensembles are rejected.
pub fn choi_matrix(spec: &RetroChannelSpec) -> Result<Choi> {
    choi_of(&spec.flagged_channel()?)
}

impl Choi {
    /// Recovers `N(X) = d_in · tr_in[(Xᵀ ⊗ I) J]`.
    pub fn apply(&self, x: &Matrix) -> Matrix {
        let (din, dout) = (self.input_dim, self.output_dim);
        let j = self.state.matrix();
        Matrix::from_fn(dout, dout, |a, b| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..din {
                for k in 0..din {
                    // (Xᵀ)_{ki} = X_{ik}
                    acc += x[(i, k)] * j[(i * dout + a, k * dout + b)];
                }
            }
            acc * din as f64
        })
    }
}

/// Minimum eigenvalue of a Hermitian matrix, computed block by block over
/// the connected components of its sparsity pattern.
pub fn min_eigenvalue_blockwise(m: &Matrix) -> Result<f64> {
    let n = m.rows();
    let mut component = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        component[start] = id;
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for k in 0..n {
                if component[k] == usize::MAX && (m[(i, k)].norm() > 0.0 || m[(k, i)].norm() > 0.0)
                {
                    component[k] = id;
                    members.push(k);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    let mut min = f64::INFINITY;
    for members in comps {
        let block = Matrix::from_fn(members.len(), members.len(), |a, b| {
            m[(members[a], members[b])]
        });
        min = min.min(eigvalsh(&block)?[0]);
    }
    Ok(min)
}

/// PPT test across the input|output cut. Returns the verdict and the
/// smallest eigenvalue of the partial transpose.
pub fn is_ppt(choi: &Choi, tol: f64) -> Result<(bool, f64)> {
    let pt = partial_transpose(
        choi.state.matrix(),
        &[choi.input_dim, choi.output_dim],
        &[0],
    )?;
    let min = min_eigenvalue_blockwise(&pt)?;
    Ok((min >= -tol, min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::reference::{classical_bit, identity_qudit};
    use crate::channels::retro::Variant;
    use crate::error::Error;
    use crate::states::StateVector;

    #[test]
    fn identity_choi_is_bell_projector() {
        let choi = choi_of(&identity_qudit(2)).unwrap();
        let phi = StateVector::maximally_entangled(2).projector();
        assert!(choi.state.matrix().max_abs_diff(phi.matrix()) < 1e-15);
        let (ppt, min) = is_ppt(&choi, 1e-10).unwrap();
        assert!(!ppt);
        assert!((min + 0.5).abs() < 1e-12);
    }

    #[test]
    fn dephasing_choi_is_diagonal_and_ppt() {
        let choi = choi_of(&classical_bit()).unwrap();
        let expected = Matrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(choi.state.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(is_ppt(&choi, 1e-10).unwrap().0);
    }

    #[test]
    fn haar_spec_is_unsupported() {
        let spec = RetroChannelSpec::standard(2, 2).unwrap();
        assert!(matches!(
            choi_matrix(&spec),
            Err(Error::UnsupportedRepresentation(_))
        ));
    }

    #[test]
    fn dephased_discretization_reconstructs_channel_and_is_ppt() {
        let spec = RetroChannelSpec::pauli_discretization(Variant::Dephased);
        let chan = spec.flagged_channel().unwrap();
        let choi = choi_matrix(&spec).unwrap();
        assert_eq!((choi.input_dim, choi.output_dim), (4, 64));
        let tr = choi.state.matrix().trace();
        assert!((tr.re - 1.0).abs() < 1e-12);
        for i in 0..4 {
            for k in 0..4 {
                let mut x = Matrix::zeros(4, 4);
                x[(i, k)] = C64::new(1.0, 0.0);
                let direct = chan.apply_matrix(&x).unwrap();
                assert!(choi.apply(&x).max_abs_diff(&direct) < 1e-10);
            }
        }
        let (ppt, min) = is_ppt(&choi, 1e-10).unwrap();
        assert!(ppt && min >= -1e-10, "min eig {min}");
    }

    #[test]
    fn standard_discretization_is_not_ppt() {
        let spec = RetroChannelSpec::pauli_discretization(Variant::Standard);
        let (ppt, min) = is_ppt(&choi_matrix(&spec).unwrap(), 1e-10).unwrap();
        assert!(!ppt, "min eig {min}");
    }

    #[test]
    fn blockwise_min_matches_dense() {
        let mut rng = crate::random::RandomStream::new(9);
        let a = Matrix::from_fn(3, 3, |_, _| rng.complex_gaussian());
        let a = (&a + &a.adjoint()).scale_real(0.5);
        let b = Matrix::from_fn(2, 2, |_, _| rng.complex_gaussian());
        let b = (&b + &b.adjoint()).scale_real(0.5);
        // interleave the two blocks
        let idx_a = [0, 2, 4];
        let idx_b = [1, 3];
        let mut m = Matrix::zeros(5, 5);
        for (x, &i) in idx_a.iter().enumerate() {
            for (y, &k) in idx_a.iter().enumerate() {
                m[(i, k)] = a[(x, y)];
            }
        }
        for (x, &i) in idx_b.iter().enumerate() {
            for (y, &k) in idx_b.iter().enumerate() {
                m[(i, k)] = b[(x, y)];
            }
        }
        let dense = eigvalsh(&m).unwrap()[0];
        assert!((min_eigenvalue_blockwise(&m).unwrap() - dense).abs() < 1e-12);
    }
}
