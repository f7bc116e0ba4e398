use serde::{Deserialize, Serialize};

use crate::eigen::eigvalsh;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, MAX_DIM};
use crate::states::DensityOperator;

/// Trace-preservation tolerance for `Σ K†K = I`.
pub const KRAUS_TOL: f64 = 1e-8;

/// A CPTP map in Kraus form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KrausChannel {
    label: String,
    input_dim: usize,
    output_dim: usize,
    operators: Vec<Matrix>,
}

impl KrausChannel {
    pub fn new(label: impl Into<String>, operators: Vec<Matrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::validity("Kraus channel needs at least one operator"))?;
        let (output_dim, input_dim) = (first.rows(), first.cols());
        if operators
            .iter()
            .any(|k| k.rows() != output_dim || k.cols() != input_dim)
        {
            return Err(Error::shape("Kraus operators have inconsistent shapes"));
        }
        if input_dim.max(output_dim) > MAX_DIM {
            return Err(Error::Size {
                dim: input_dim.max(output_dim),
                max: MAX_DIM,
            });
        }
        let mut sum = Matrix::zeros(input_dim, input_dim);
        for k in &operators {
            sum = &sum + &(&k.adjoint() * k);
        }
        let err = sum.max_abs_diff(&Matrix::identity(input_dim));
        if err > KRAUS_TOL {
            return Err(Error::validity(format!(
                "Kraus operators are not trace preserving (deviation {err:e})"
            )));
        }
        Ok(KrausChannel {
            label: label.into(),
            input_dim,
            output_dim,
            operators,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.operators
    }

    /// Applies the map to an arbitrary operator (not necessarily a state).
    pub fn apply_matrix(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.input_dim || x.cols() != self.input_dim {
            return Err(Error::shape(format!(
                "channel input dim {} but operator is {}x{}",
                self.input_dim,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = Matrix::zeros(self.output_dim, self.output_dim);
        for k in &self.operators {
            out = &out + &k.conjugate_by(x);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = self.apply_matrix(rho.matrix())?;
        Ok(DensityOperator::new_unchecked(out.hermitian_part()))
    }

    /// `(N ⊗ id)` or `(id ⊗ N)`: applies the channel to one factor of a
    /// bipartite-or-larger state.
    pub fn apply_to_factor(
        &self,
        rho: &DensityOperator,
        dims: &[usize],
        factor: usize,
    ) -> Result<(DensityOperator, Vec<usize>)> {
        if factor >= dims.len() || dims[factor] != self.input_dim {
            return Err(Error::shape(
                "channel input does not match the chosen factor",
            ));
        }
        let before: usize = dims[..factor].iter().product();
        let after: usize = dims[factor + 1..].iter().product();
        let total: usize = dims.iter().product();
        if total != rho.dim() {
            return Err(Error::shape("factor dims do not match state dimension"));
        }
        let left = Matrix::identity(before);
        let right = Matrix::identity(after);
        let out_dim = before * self.output_dim * after;
        let mut out = Matrix::zeros(out_dim, out_dim);
        for k in &self.operators {
            let full = left.kron(k)?.kron(&right)?;
            out = &out + &full.conjugate_by(rho.matrix());
        }
        let mut new_dims = dims.to_vec();
        new_dims[factor] = self.output_dim;
        Ok((
            DensityOperator::new_unchecked(out.hermitian_part()),
            new_dims,
        ))
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if self.output_dim != next.input_dim {
            return Err(Error::shape("channel output does not feed the next input"));
        }
        let mut ops = Vec::with_capacity(self.operators.len() * next.operators.len());
        for b in &next.operators {
            for a in &self.operators {
                ops.push(b * a);
            }
        }
        KrausChannel::new(format!("{} then {}", self.label, next.label), ops)
    }

    /// True when every Kraus operator has rank one, i.e. the map is
    /// measure-and-prepare and therefore entanglement breaking.
    pub fn is_measure_and_prepare(&self, tol: f64) -> Result<bool> {
        for k in &self.operators {
            let gram = &k.adjoint() * k;
            let values = eigvalsh(&gram)?;
            let top = values.last().copied().unwrap_or(0.0);
            let rank = values.iter().filter(|&&v| v > tol * top.max(1.0)).count();
            if rank > 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
