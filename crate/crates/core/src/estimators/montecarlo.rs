//! Batched, seeded Monte Carlo driver.
//!
//! Samples are split into batches of [`BATCH_SIZE`]; batch `k` draws from
//! sub-stream `k` of the seed. Batches may run on any number of workers and
//! are merged in batch order, so results are bit-identical regardless of the
//! worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::RandomStream;

pub const BATCH_SIZE: usize = 10_000;

/// Mean and standard error of a Monte Carlo quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub quantity: String,
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Estimate {
    /// Exact value presented in estimate form (zero error, no sampling).
    pub fn exact(quantity: impl Into<String>, value: f64) -> Self {
        Estimate {
            quantity: quantity.into(),
            mean: value,
            stderr: 0.0,
            samples: 0,
            seed: 0,
        }
    }

    /// `|a − b| / √(σa² + σb²)`; infinite when both errors vanish and the
    /// means differ.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let joint = self.joint_stderr(other);
        let diff = (self.mean - other.mean).abs();
        if joint == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / joint
        }
    }

    pub fn joint_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Streaming moments of one batch (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

/// Result of a Monte Carlo run: the estimate plus per-batch means as a
/// convergence trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRun {
    pub estimate: Estimate,
    pub batch_means: Vec<f64>,
}

/// Runs `samples` draws of `f`, each batch on its own sub-stream.
///
/// `workers = None` uses the global rayon pool; `Some(n)` a dedicated pool of
/// `n` threads.
pub fn run_batched<F>(
    quantity: &str,
    samples: usize,
    seed: u64,
    workers: Option<usize>,
    f: F,
) -> Result<McRun>
where
    F: Fn(&mut RandomStream) -> Result<f64> + Sync,
{
    if samples == 0 {
        return Err(Error::domain("Monte Carlo run needs at least one sample"));
    }
    let batches = samples.div_ceil(BATCH_SIZE);
    let run_batch = |k: usize| -> Result<Moments> {
        let mut rng = RandomStream::with_stream(seed, k as u64);
        let len = BATCH_SIZE.min(samples - k * BATCH_SIZE);
        let mut m = Moments::default();
        for _ in 0..len {
            let x = f(&mut rng)?;
            if !x.is_finite() {
                return Err(Error::Numerical(format!("non-finite sample in {quantity}")));
            }
            m.push(x);
        }
        Ok(m)
    };
    let per_batch: Vec<Moments> = match workers {
        Some(0) => return Err(Error::domain("worker count must be positive")),
        Some(1) => (0..batches).map(run_batch).collect::<Result<_>>()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Numerical(format!("worker pool: {e}")))?
            .install(|| {
                (0..batches)
                    .into_par_iter()
                    .map(run_batch)
                    .collect::<Result<_>>()
            })?,
        None => (0..batches)
            .into_par_iter()
            .map(run_batch)
            .collect::<Result<_>>()?,
    };
    let total = per_batch
        .iter()
        .fold(Moments::default(), |acc, m| acc.merge(*m));
    let stderr = if total.n > 1 {
        (total.m2 / (total.n - 1) as f64).sqrt() / (total.n as f64).sqrt()
    } else {
        0.0
    };
    Ok(McRun {
        estimate: Estimate {
            quantity: quantity.to_string(),
            mean: total.mean,
            stderr,
            samples,
            seed,
        },
        batch_means: per_batch.iter().map(|m| m.mean).collect(),
    })
}
