//! Entanglement-assisted classical capacity via the quantum mutual
//! information `I(ρ) = S(ρ) + S(N(ρ)) − S((N ⊗ id)(ψ_ρ))`.

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::eigen::eig_hermitian;
use crate::entropy::entropy_bits;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64, ZERO};
use crate::random::RandomStream;
use crate::states::DensityOperator;

pub const MAX_EA_DIM: usize = 8;

pub fn ea_mutual_info(channel: &KrausChannel, rho: &DensityOperator) -> Result<f64> {
    let d = channel.input_dim();
    if rho.dim() != d {
        return Err(Error::shape("input state does not match channel input"));
    }
    let eig = eig_hermitian(rho.matrix())?;
    // |ψ⟩ = Σ √λ_i |e_i⟩ ⊗ |i⟩
    let mut psi = vec![ZERO; d * d];
    for i in 0..d {
        let w = eig.values[i].max(0.0).sqrt();
        for a in 0..d {
            psi[a * d + i] = eig.vectors[(a, i)] * w;
        }
    }
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let joint_in = Matrix::outer(&psi, &psi).scale_real(1.0 / total);
    let (joint_out, _) =
        channel.apply_to_factor(&DensityOperator::new_unchecked(joint_in), &[d, d], 0)?;
    let out = channel.apply(rho)?;
    let i = entropy_bits(rho)? + entropy_bits(&out)? - entropy_bits(&joint_out)?;
    Ok(i.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub initial_step: f64,
    /// Ascent stops once every coordinate step is below this.
    pub tolerance: f64,
    /// Cap on objective evaluations per start.
    pub max_evaluations: usize,
    /// Starts for channels wider than a qubit (seeded random plus I/d).
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            initial_step: 0.25,
            tolerance: 1e-6,
            max_evaluations: 20_000,
            random_starts: 19,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartTrace {
    pub start: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaResult {
    pub value: f64,
    pub argmax: DensityOperator,
    pub starts: Vec<StartTrace>,
    pub converged: bool,
    pub warning: Option<String>,
}

/// Qubit inputs by Bloch coordinates `(r, θ, φ)`.
fn bloch_state(x: &[f64]) -> DensityOperator {
    let r = x[0].clamp(0.0, 1.0);
    let (st, ct) = x[1].sin_cos();
    let (sp, cp) = x[2].sin_cos();
    let (bx, by, bz) = (r * st * cp, r * st * sp, r * ct);
    let m = Matrix::from_vec(
        2,
        2,
        vec![
            C64::new(0.5 * (1.0 + bz), 0.0),
            C64::new(0.5 * bx, -0.5 * by),
            C64::new(0.5 * bx, 0.5 * by),
            C64::new(0.5 * (1.0 - bz), 0.0),
        ],
    );
    DensityOperator::new_unchecked(m)
}

/// General inputs as `AA†/tr(AA†)`, `A` given by its real and imaginary parts.
fn gram_state(x: &[f64], d: usize) -> DensityOperator {
    let a = Matrix::from_fn(d, d, |i, j| {
        C64::new(x[2 * (i * d + j)], x[2 * (i * d + j) + 1])
    });
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    if tr <= 0.0 {
        return DensityOperator::maximally_mixed(d);
    }
    DensityOperator::new_unchecked(m.scale_real(1.0 / tr).hermitian_part())
}

fn ascend(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    start: Vec<f64>,
    cfg: &AscentConfig,
) -> Result<(Vec<f64>, f64, usize, bool)> {
    let mut x = start;
    let mut best = f(&x)?;
    let mut evals = 1;
    let mut step = vec![cfg.initial_step; x.len()];
    loop {
        if step.iter().all(|&s| s < cfg.tolerance) {
            return Ok((x, best, evals, true));
        }
        if evals >= cfg.max_evaluations {
            return Ok((x, best, evals, false));
        }
        for k in 0..x.len() {
            if step[k] < cfg.tolerance {
                continue;
            }
            let mut moved = false;
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += dir * step[k];
                let v = f(&y)?;
                evals += 1;
                if v > best {
                    best = v;
                    x = y;
                    moved = true;
                    break;
                }
            }
            if !moved {
                step[k] *= 0.5;
            }
        }
    }
}

/// Multi-start coordinate ascent of [`ea_mutual_info`]. Qubit channels use a
/// fixed 20-point Bloch grid; wider inputs (up to 8) use `I/d` plus seeded
/// random starts.
pub fn maximize_ea(channel: &KrausChannel, cfg: &AscentConfig) -> Result<EaResult> {
    let d = channel.input_dim();
    if d > MAX_EA_DIM || channel.output_dim() > MAX_EA_DIM {
        return Err(Error::Size {
            dim: d.max(channel.output_dim()),
            max: MAX_EA_DIM,
        });
    }
    let qubit = d == 2;
    let objective = |x: &[f64]| -> Result<f64> {
        let rho = if qubit {
            bloch_state(x)
        } else {
            gram_state(x, d)
        };
        ea_mutual_info(channel, &rho)
    };
    let starts: Vec<Vec<f64>> = if qubit {
        let dirs = [
            (0.0, 0.0),
            (std::f64::consts::PI, 0.0),
            (1.2, 0.3),
            (1.9, 2.4),
            (1.0, 4.4),
        ];
        [0.2, 0.5, 0.8, 1.0]
            .iter()
            .flat_map(|&r| dirs.iter().map(move |&(t, p)| vec![r, t, p]))
            .collect()
    } else {
        let mut rng = RandomStream::with_stream(cfg.seed, 0);
        let mut out = vec![Matrix::identity(d)
            .data()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect()];
        for _ in 0..cfg.random_starts {
            out.push((0..2 * d * d).map(|_| rng.gaussian()).collect());
        }
        out
    };
    let mut traces = Vec::with_capacity(starts.len());
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in starts {
        let (x, v, evaluations, converged) = ascend(&objective, s.clone(), cfg)?;
        traces.push(StartTrace {
            start: s,
            value: v,
            evaluations,
            converged,
        });
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, x));
        }
    }
    let (value, x) = best.expect("at least one start");
    let converged = traces.iter().all(|t| t.converged);
    let argmax = if qubit {
        bloch_state(&x)
    } else {
        gram_state(&x, d)
    };
    Ok(EaResult {
        value,
        argmax,
        warning: (!converged).then(|| {
            "coordinate ascent hit the evaluation cap; value is the best found".to_string()
        }),
        converged,
        starts: traces,
    })
}
