use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ledger::ResourceLedger;
use super::trace::ProtocolTrace;
use crate::error::{Error, Result};
use crate::random::RandomStream;

/// Per-trial entanglement fidelity must reach `1 − FIDELITY_TOL`.
pub const FIDELITY_TOL: f64 = 1e-9;

/// Stream ids at or above this are reserved for message randomness, so the
/// message of trial `t` never shares a stream with its protocol randomness.
pub(crate) const MESSAGE_STREAM: u64 = 1 << 63;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EchoBasis {
    /// Measure the retained reference in `B*`.
    #[default]
    Conjugate,
    /// Measure in `B` itself (negative control).
    Direct,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceCorrection {
    /// `conj(U_j)` on the data reference.
    #[default]
    Conjugate,
    /// `U_jᵀ` (negative control).
    Transpose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub workers: Option<usize>,
    /// How many leading traces to keep in the run summary.
    pub keep_traces: usize,
    pub echo_basis: EchoBasis,
    pub correction: ReferenceCorrection,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        ProtocolOptions {
            workers: None,
            keep_traces: 4,
            echo_basis: EchoBasis::Conjugate,
            correction: ReferenceCorrection::Conjugate,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub checked: u64,
    pub mismatches: u64,
}

impl AuditSummary {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl FidelityStats {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            n += 1;
        }
        FidelityStats {
            min,
            mean: if n > 0 { sum / n as f64 } else { f64::NAN },
            max,
        }
    }
}

/// What one trial hands back to the runner.
#[derive(Clone, Debug)]
pub(crate) struct TrialRecord<T> {
    pub trace: ProtocolTrace,
    pub echo: AuditSummary,
    pub value: T,
    /// Set when the trial violated an invariant.
    pub failure: Option<String>,
}

/// Runs trials `0..trials`, trial `t` on stream `t` of `seed`, in parallel,
/// and returns them in trial order. The first failing trial (by index)
/// becomes a protocol-failure error carrying its trace.
pub(crate) fn run_trials<T, F>(
    trials: usize,
    seed: u64,
    workers: Option<usize>,
    f: F,
) -> Result<Vec<TrialRecord<T>>>
where
    T: Send,
    F: Fn(usize, &mut RandomStream) -> Result<TrialRecord<T>> + Sync,
{
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let one = |t: usize| {
        let mut rng = RandomStream::with_stream(seed, t as u64);
        f(t, &mut rng)
    };
    let records: Vec<Result<TrialRecord<T>>> = match workers {
        Some(0) => return Err(Error::domain("worker count must be positive")),
        Some(1) => (0..trials).map(one).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Numerical(format!("worker pool: {e}")))?
            .install(|| (0..trials).into_par_iter().map(one).collect()),
        None => (0..trials).into_par_iter().map(one).collect(),
    };
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(bad) = records.iter().find(|r| r.failure.is_some()) {
        return Err(Error::ProtocolFailure {
            reason: format!(
                "trial {}: {}",
                bad.trace.trial,
                bad.failure.as_deref().unwrap_or("")
            ),
            trace: Box::new(bad.trace.clone()),
        });
    }
    Ok(records)
}

/// The common per-trial ledger; every trial of a protocol must agree.
pub(crate) fn common_ledger<T>(records: &[TrialRecord<T>]) -> Result<ResourceLedger> {
    let first = records[0].trace.ledger();
    if let Some(r) = records.iter().find(|r| r.trace.ledger() != first) {
        return Err(Error::ProtocolFailure {
            reason: "ledger differs between trials".into(),
            trace: Box::new(r.trace.clone()),
        });
    }
    Ok(first)
}

pub(crate) fn merged_audit<T>(records: &[TrialRecord<T>]) -> AuditSummary {
    records
        .iter()
        .fold(AuditSummary::default(), |acc, r| AuditSummary {
            checked: acc.checked + r.echo.checked,
            mismatches: acc.mismatches + r.echo.mismatches,
        })
}

pub(crate) fn kept_traces<T>(records: &[TrialRecord<T>], keep: usize) -> Vec<ProtocolTrace> {
    records.iter().take(keep).map(|r| r.trace.clone()).collect()
}
