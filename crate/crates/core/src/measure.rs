//! Projective measurement of one tensor factor in an orthonormal basis.

use crate::error::{Error, Result};
use crate::linalg::{apply_to_factor, embed, norm_sqr, partial_trace, Matrix};
use crate::random::RandomStream;
use crate::states::{DensityOperator, OrthonormalBasis, StateVector};

/// Total Born probability may deviate from one by at most this much.
pub const PROBABILITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Measurement<S> {
    pub outcome: usize,
    pub probability: f64,
    /// Renormalised post-measurement state with the measured factor removed.
    pub post_state: S,
    pub post_dims: Vec<usize>,
}

fn bra(basis: &OrthonormalBasis, j: usize) -> Matrix {
    let v = basis.vector(j).conj();
    Matrix::from_vec(1, basis.dim(), v.into_amplitudes())
}

fn check_factor(dims: &[usize], subsystem: usize, basis: &OrthonormalBasis) -> Result<()> {
    if subsystem >= dims.len() {
        return Err(Error::shape(format!("subsystem {subsystem} out of range")));
    }
    if dims[subsystem] != basis.dim() {
        return Err(Error::shape(format!(
            "basis dim {} does not match subsystem dim {}",
            basis.dim(),
            dims[subsystem]
        )));
    }
    Ok(())
}

fn removed(dims: &[usize], subsystem: usize) -> Vec<usize> {
    let mut d = dims.to_vec();
    d.remove(subsystem);
    if d.is_empty() {
        d.push(1);
    }
    d
}

/// Unnormalised branches `(⟨b_j| ⊗ I)|ψ⟩` for every outcome.
pub fn branches(
    state: &StateVector,
    dims: &[usize],
    subsystem: usize,
    basis: &OrthonormalBasis,
) -> Result<Vec<Vec<crate::linalg::C64>>> {
    check_factor(dims, subsystem, basis)?;
    (0..basis.dim())
        .map(|j| {
            apply_to_factor(state.amplitudes(), dims, subsystem, &bra(basis, j)).map(|(v, _)| v)
        })
        .collect()
}

pub fn born_probabilities(
    state: &StateVector,
    dims: &[usize],
    subsystem: usize,
    basis: &OrthonormalBasis,
) -> Result<Vec<f64>> {
    let probs: Vec<f64> = branches(state, dims, subsystem, basis)?
        .iter()
        .map(|b| norm_sqr(b))
        .collect();
    check_total(&probs)?;
    Ok(probs)
}

fn check_total(probs: &[f64]) -> Result<()> {
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::validity(format!(
            "Born probabilities sum to {total}"
        )));
    }
    Ok(())
}

/// Samples an outcome with Born probabilities and returns the collapsed,
/// renormalised remainder of the state.
pub fn born_measure(
    state: &StateVector,
    dims: &[usize],
    subsystem: usize,
    basis: &OrthonormalBasis,
    rng: &mut RandomStream,
) -> Result<Measurement<StateVector>> {
    let branch = branches(state, dims, subsystem, basis)?;
    let probs: Vec<f64> = branch.iter().map(|b| norm_sqr(b)).collect();
    check_total(&probs)?;
    let outcome = rng.categorical(&probs);
    let post_state = StateVector::normalized(branch[outcome].clone())?;
    Ok(Measurement {
        outcome,
        probability: probs[outcome],
        post_state,
        post_dims: removed(dims, subsystem),
    })
}

/// Measures a factor but keeps it, collapsed onto the observed basis vector.
/// Returns `(outcome, collapsed state)`.
pub fn measure_in_place(
    state: &StateVector,
    dims: &[usize],
    subsystem: usize,
    basis: &OrthonormalBasis,
    rng: &mut RandomStream,
) -> Result<(usize, StateVector)> {
    let probs = born_probabilities(state, dims, subsystem, basis)?;
    let outcome = rng.categorical(&probs);
    let projector = basis.vector(outcome).projector().into_matrix();
    let (amps, _) = apply_to_factor(state.amplitudes(), dims, subsystem, &projector)?;
    Ok((outcome, StateVector::normalized(amps)?))
}

/// Density-operator version of [`born_measure`].
pub fn born_measure_density(
    rho: &DensityOperator,
    dims: &[usize],
    subsystem: usize,
    basis: &OrthonormalBasis,
    rng: &mut RandomStream,
) -> Result<Measurement<DensityOperator>> {
    check_factor(dims, subsystem, basis)?;
    let projected: Vec<Matrix> = (0..basis.dim())
        .map(|j| {
            let p = basis.vector(j).projector().into_matrix();
            embed(&p, dims, subsystem).map(|full| full.conjugate_by(rho.matrix()))
        })
        .collect::<Result<_>>()?;
    let probs: Vec<f64> = projected.iter().map(|m| m.trace().re.max(0.0)).collect();
    check_total(&probs)?;
    let outcome = rng.categorical(&probs);
    let keep: Vec<usize> = (0..dims.len()).filter(|&k| k != subsystem).collect();
    let post = if keep.is_empty() {
        Matrix::identity(1)
    } else {
        partial_trace(&projected[outcome], dims, &keep)?.scale_real(1.0 / probs[outcome])
    };
    Ok(Measurement {
        outcome,
        probability: probs[outcome],
        post_state: DensityOperator::new_unchecked(post.hermitian_part()),
        post_dims: removed(dims, subsystem),
    })
}
