//! Monte Carlo over Haar flags for the standard and dephased retro channels.
//!
//! For a fixed flag θ = (B, {U}) the channel is the mixed-unitary map
//! `ρ ↦ Σ p_j U_j ρ U_j†` with `p_j = |⟨b_j|φ⟩|²` for the fixed control φ.
//! Its average output over any orthonormal data basis is I/d, so the
//! Holevo quantity per flag is `log₂d − S(Σ p_j U_j ψψ† U_j†)` and only the
//! second term is sampled.

use serde::{Deserialize, Serialize};

use super::montecarlo::{run_batched, Estimate, McRun};
use crate::channels::{sample_flag, BasisEnsemble, RetroChannelSpec, UnitaryEnsemble, Variant};
use crate::entropy::{hermitian_entropy, two_pure_entropy};
use crate::error::{Error, Result};
use crate::linalg::{inner, Matrix, C64, ZERO};
use crate::random::{haar_unitary, haar_vector, RandomStream};
use crate::states::{StateVector, UnitaryOperator};

pub const MIN_SAMPLES: usize = 1000;

/// How flags are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagSampler {
    /// Draws only what the estimator needs: for a Haar basis the outcome
    /// distribution of a fixed control is uniform on the simplex, and for
    /// Haar unitaries the images `U_j ψ` are independent Haar vectors.
    /// Equal in distribution to [`FlagSampler::Explicit`] and works for any c.
    #[default]
    Reduced,
    /// Draws the full flag with [`sample_flag`] (c, d ≤ 64).
    Explicit,
}

/// How the per-sample mixture entropy is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyPath {
    /// Closed form when c = 2, otherwise the smaller of the Gram and
    /// output-space matrices.
    #[default]
    Auto,
    ClosedForm,
    /// Always diagonalises the output-space mixture.
    Eigen,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetroMcOptions {
    pub sampler: FlagSampler,
    pub entropy: EntropyPath,
    /// `None`: global worker pool.
    pub workers: Option<usize>,
}

/// Outcome weights of the fixed control `|0⟩` and the corresponding unitaries.
fn draw_weights(spec: &RetroChannelSpec, rng: &mut RandomStream) -> Vec<f64> {
    match spec.bases() {
        BasisEnsemble::Haar => {
            let z: Vec<f64> = (0..spec.c())
                .map(|_| rng.complex_gaussian().norm_sqr())
                .collect();
            let total: f64 = z.iter().sum();
            z.into_iter().map(|x| x / total).collect()
        }
        BasisEnsemble::Finite(list) => {
            let b = &list[rng.index(list.len())];
            b.vectors()
                .iter()
                .map(|v| v.amplitudes()[0].norm_sqr())
                .collect()
        }
    }
}

fn draw_unitaries(spec: &RetroChannelSpec, rng: &mut RandomStream) -> Vec<UnitaryOperator> {
    match spec.unitaries() {
        UnitaryEnsemble::Haar => (0..spec.c()).map(|_| haar_unitary(spec.d(), rng)).collect(),
        UnitaryEnsemble::Finite(list) => list[rng.index(list.len())].clone(),
    }
}

/// `(p_j, U_j|0⟩)` for one flag.
fn draw_images(
    spec: &RetroChannelSpec,
    sampler: FlagSampler,
    rng: &mut RandomStream,
) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    match sampler {
        FlagSampler::Explicit => {
            let sample = sample_flag(spec, rng)?;
            let flag = sample.flag();
            let p = flag
                .basis
                .vectors()
                .iter()
                .map(|v| v.amplitudes()[0].norm_sqr())
                .collect();
            let v = flag
                .unitaries
                .iter()
                .map(|u| u.matrix().column(0))
                .collect();
            Ok((p, v))
        }
        FlagSampler::Reduced => {
            let p = draw_weights(spec, rng);
            let v = match spec.unitaries() {
                UnitaryEnsemble::Haar => (0..spec.c())
                    .map(|_| haar_vector(spec.d(), rng).into_amplitudes())
                    .collect(),
                UnitaryEnsemble::Finite(_) => draw_unitaries(spec, rng)
                    .iter()
                    .map(|u| u.matrix().column(0))
                    .collect(),
            };
            Ok((p, v))
        }
    }
}

fn gram_from(p: &[f64], overlap: impl Fn(usize, usize) -> C64) -> Matrix {
    let c = p.len();
    let mut g = Matrix::zeros(c, c);
    for j in 0..c {
        for k in j..c {
            let v = overlap(j, k).scale((p[j] * p[k]).sqrt());
            g[(j, k)] = v;
            g[(k, j)] = v.conj();
        }
    }
    g
}

/// Entropy of `Σ p_j |v_j⟩⟨v_j|` for unit vectors `v_j`.
pub fn weighted_pure_entropy(p: &[f64], vectors: &[Vec<C64>], path: EntropyPath) -> Result<f64> {
    if p.len() != vectors.len() || p.is_empty() {
        return Err(Error::shape("weights and vectors differ in length"));
    }
    let closed = match path {
        EntropyPath::ClosedForm if p.len() != 2 => {
            return Err(Error::domain("closed form needs exactly two states"));
        }
        EntropyPath::ClosedForm => true,
        EntropyPath::Auto => p.len() == 2,
        EntropyPath::Eigen => false,
    };
    if closed {
        let f = inner(&vectors[0], &vectors[1]).norm_sqr().min(1.0);
        return Ok(two_pure_entropy(p[0].clamp(0.0, 1.0), f));
    }
    let d = vectors[0].len();
    if path == EntropyPath::Auto && p.len() < d {
        return hermitian_entropy(&gram_from(p, |j, k| inner(&vectors[j], &vectors[k])));
    }
    let mut m = vec![ZERO; d * d];
    for (w, v) in p.iter().zip(vectors) {
        for r in 0..d {
            let a = v[r].scale(*w);
            for s in 0..d {
                m[r * d + s] += a * v[s].conj();
            }
        }
    }
    hermitian_entropy(&Matrix::from_vec(d, d, m))
}

/// One sample of `log₂d − S(Σ p_j U_j|0⟩⟨0|U_j†)`.
pub fn holevo_sample(
    spec: &RetroChannelSpec,
    opts: &RetroMcOptions,
    rng: &mut RandomStream,
) -> Result<f64> {
    let (p, v) = draw_images(spec, opts.sampler, rng)?;
    // the data input |0⟩ is left alone by computational-basis dephasing, so
    // both variants share this expression
    let s = weighted_pure_entropy(&p, &v, opts.entropy)?;
    Ok((spec.d() as f64).log2() - s)
}

/// One sample of `log₂d − S(Σ_j p_j (I⊗U_j)Φ(I⊗U_j)†)`.
pub fn coherent_sample(
    spec: &RetroChannelSpec,
    opts: &RetroMcOptions,
    rng: &mut RandomStream,
) -> Result<f64> {
    if spec.variant() != Variant::Standard {
        return Err(Error::domain(
            "coherent information estimator covers the standard variant",
        ));
    }
    let (p, u) = match opts.sampler {
        FlagSampler::Explicit => {
            let sample = sample_flag(spec, rng)?;
            let flag = sample.flag();
            let p: Vec<f64> = flag
                .basis
                .vectors()
                .iter()
                .map(|v| v.amplitudes()[0].norm_sqr())
                .collect();
            (p, flag.unitaries.clone())
        }
        FlagSampler::Reduced => {
            let p = draw_weights(spec, rng);
            (p, draw_unitaries(spec, rng))
        }
    };
    let d = spec.d();
    let log_d = (d as f64).log2();
    // ⟨Φ_j|Φ_k⟩ = tr(U_j†U_k)/d
    let overlap = |j: usize, k: usize| (u[j].adjoint().matrix() * u[k].matrix()).trace() / d as f64;
    let closed = match opts.entropy {
        EntropyPath::ClosedForm if p.len() != 2 => {
            return Err(Error::domain("closed form needs c = 2"));
        }
        EntropyPath::ClosedForm => true,
        EntropyPath::Auto => p.len() == 2,
        EntropyPath::Eigen => false,
    };
    let s = if closed {
        two_pure_entropy(p[0].clamp(0.0, 1.0), overlap(0, 1).norm_sqr().min(1.0))
    } else if opts.entropy == EntropyPath::Auto && p.len() <= d * d {
        hermitian_entropy(&gram_from(&p, overlap))?
    } else {
        let phi = StateVector::maximally_entangled(d);
        let vectors: Vec<Vec<C64>> = u
            .iter()
            .map(|uj| {
                let full = UnitaryOperator::identity(d).tensor(uj)?;
                Ok(phi.apply(&full)?.into_amplitudes())
            })
            .collect::<Result<_>>()?;
        weighted_pure_entropy(&p, &vectors, EntropyPath::Eigen)?
    };
    Ok(log_d - s)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    Ok(())
}

pub fn holevo_retro(
    spec: &RetroChannelSpec,
    samples: usize,
    seed: u64,
    opts: &RetroMcOptions,
) -> Result<McRun> {
    check_samples(samples)?;
    run_batched("C_H", samples, seed, opts.workers, |rng| {
        holevo_sample(spec, opts, rng)
    })
}

pub fn coherent_info_retro(
    spec: &RetroChannelSpec,
    samples: usize,
    seed: u64,
    opts: &RetroMcOptions,
) -> Result<McRun> {
    check_samples(samples)?;
    run_batched("I_c", samples, seed, opts.workers, |rng| {
        coherent_sample(spec, opts, rng)
    })
}

/// `C_H` of the standard Haar channel `R_{c,d}` with default options.
pub fn holevo_retro_mc(c: usize, d: usize, samples: usize, seed: u64) -> Result<Estimate> {
    let spec = RetroChannelSpec::standard(c, d)?;
    Ok(holevo_retro(&spec, samples, seed, &RetroMcOptions::default())?.estimate)
}

/// One-shot coherent information of the standard Haar channel `R_{c,d}`.
pub fn coherent_info_retro_mc(c: usize, d: usize, samples: usize, seed: u64) -> Result<Estimate> {
    let spec = RetroChannelSpec::standard(c, d)?;
    Ok(coherent_info_retro(&spec, samples, seed, &RetroMcOptions::default())?.estimate)
}
