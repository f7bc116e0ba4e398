use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, RetroChannelSpec};
use crate::entropy::entropy_bits;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::states::{DensityOperator, StateVector};

/// Probabilities must sum to one within this tolerance.
pub const ENSEMBLE_TOL: f64 = 1e-10;

/// Finite input ensemble `{(pᵢ, ρᵢ)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    items: Vec<(f64, DensityOperator)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::domain("ensemble is empty"))?;
        let dim = first.1.dim();
        if items.iter().any(|(_, r)| r.dim() != dim) {
            return Err(Error::shape("ensemble states have different dimensions"));
        }
        if items.iter().any(|(p, _)| *p < 0.0 || p.is_nan()) {
            return Err(Error::validity("negative ensemble probability"));
        }
        let total: f64 = items.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > ENSEMBLE_TOL {
            return Err(Error::validity(format!(
                "ensemble probabilities sum to {total}"
            )));
        }
        Ok(Ensemble { items })
    }

    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    /// Uniform over the computational basis of `C^d`.
    pub fn computational(d: usize) -> Self {
        Self::uniform(
            (0..d)
                .map(|k| StateVector::basis(d, k).projector())
                .collect(),
        )
        .expect("computational basis ensemble is valid")
    }

    pub fn items(&self) -> &[(f64, DensityOperator)] {
        &self.items
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }

    pub fn average(&self) -> DensityOperator {
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (p, r) in &self.items {
            m = &m + &r.matrix().scale_real(*p);
        }
        DensityOperator::new_unchecked(m)
    }
}

/// `χ = S(Σ pᵢ N(ρᵢ)) − Σ pᵢ S(N(ρᵢ))`.
pub fn holevo_chi(channel: &KrausChannel, ensemble: &Ensemble) -> Result<f64> {
    if channel.input_dim() != ensemble.dim() {
        return Err(Error::shape(format!(
            "channel input dim {} but ensemble dim {}",
            channel.input_dim(),
            ensemble.dim()
        )));
    }
    let mut avg = Matrix::zeros(channel.output_dim(), channel.output_dim());
    let mut avg_entropy = 0.0;
    for (p, rho) in ensemble.items() {
        let out = channel.apply(rho)?;
        avg_entropy += p * entropy_bits(&out)?;
        avg = &avg + &out.matrix().scale_real(*p);
    }
    let chi = entropy_bits(&DensityOperator::new_unchecked(avg))? - avg_entropy;
    Ok(chi.clamp(0.0, (channel.output_dim() as f64).log2()))
}

/// Holevo quantity of a finite-flag retro channel with the control held at
/// `control` and the data drawn from `data`. The flag is a classical output
/// register of the channel.
pub fn holevo_chi_retro(
    spec: &RetroChannelSpec,
    control: &StateVector,
    data: &Ensemble,
) -> Result<f64> {
    if control.dim() != spec.c() {
        return Err(Error::shape("control state must have dimension c"));
    }
    let control = control.projector();
    let items = data
        .items()
        .iter()
        .map(|(p, rho)| Ok((*p, control.tensor(rho)?)))
        .collect::<Result<Vec<_>>>()?;
    holevo_chi(&spec.flagged_channel()?, &Ensemble::new(items)?)
}
