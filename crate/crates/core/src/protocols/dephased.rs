//! One classical bit per use of the dephased retro channel with two-way
//! side communication.

use serde::{Deserialize, Serialize};

use super::ledger::ResourceLedger;
use super::registers::Registers;
use super::runner::{
    common_ledger, kept_traces, merged_audit, run_trials, AuditSummary, TrialRecord, MESSAGE_STREAM,
};
use super::trace::{
    same_side_conversation, Direction, Event, FigureOfMerit, FlagSummary, Party, Payload,
    ProtocolTrace,
};
use crate::channels::{sample_flag, Flag, RetroChannelSpec, Variant};
use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::random::RandomStream;
use crate::states::{OrthonormalBasis, StateVector, UnitaryOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DephasedOptions {
    pub workers: Option<usize>,
    pub keep_traces: usize,
    /// Skip the forward message; Bob then guesses with the Helstrom
    /// measurement for the two j-averaged output states.
    pub withhold_outcome: bool,
}

impl Default for DephasedOptions {
    fn default() -> Self {
        DephasedOptions {
            workers: None,
            keep_traces: 4,
            withhold_outcome: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasedRun {
    pub protocol: String,
    pub trials: usize,
    pub seed: u64,
    pub errors: u64,
    pub bit_error_rate: f64,
    pub withheld: bool,
    pub echo_audit: AuditSummary,
    /// Each trial re-run with the complementary bit on the same stream; a
    /// mismatch means the side conversation depended on the message.
    pub independence_audit: AuditSummary,
    pub ledger: ResourceLedger,
    pub traces: Vec<ProtocolTrace>,
}

/// Helstrom basis for `½Σ_j U_j|0⟩⟨0|U_j†` against the same with `|1⟩`;
/// outcome 0 means "guess 0".
fn helstrom_basis(unitaries: &[UnitaryOperator]) -> Result<OrthonormalBasis> {
    let mut diff = crate::linalg::Matrix::zeros(2, 2);
    for u in unitaries {
        for (x, sign) in [(0, 1.0), (1, -1.0)] {
            let v = StateVector::basis(2, x).apply(u)?;
            let p = v
                .projector()
                .into_matrix()
                .scale_real(sign / unitaries.len() as f64);
            diff = &diff + &p;
        }
    }
    let e = eig_hermitian(&diff)?;
    // eigenvalues ascending: the positive one is last
    let vectors = vec![
        StateVector::normalized(e.vectors.column(1))?,
        StateVector::normalized(e.vectors.column(0))?,
    ];
    OrthonormalBasis::new(vectors)
}

fn decoding_basis(flag: &Flag, j: Option<usize>) -> Result<OrthonormalBasis> {
    match j {
        Some(j) => Ok(OrthonormalBasis::from_unitary_columns(&flag.unitaries[j])),
        None => helstrom_basis(&flag.unitaries),
    }
}

struct Trial {
    trace: ProtocolTrace,
    echo: AuditSummary,
    decoded: usize,
}

fn one_trial(
    spec: &RetroChannelSpec,
    opts: &DephasedOptions,
    trial: usize,
    seed: u64,
    x: usize,
    mut rng: RandomStream,
) -> Result<Trial> {
    let mut trace = ProtocolTrace::new("dephased-c2", trial, seed);
    let mut regs = Registers::new();
    regs.push_pair("alice.control_ref", "control", 2)?;
    regs.push("data", &StateVector::basis(2, x))?;
    trace.push(Event::Prepare {
        party: Party::Alice,
        registers: vec!["alice.control_ref".into(), "control".into(), "data".into()],
        state: "Φ_2 ⊗ |x⟩".into(),
    });
    let sample = sample_flag(spec, &mut rng)?;
    let summary = FlagSummary::of(sample.flag());
    let sample = regs.feed_retro(spec, sample, "control", "data", &mut rng)?;
    trace.push(Event::ChannelUse {
        index: 0,
        control: "control".into(),
        data: "data".into(),
        flag: Some(summary),
    });
    trace.message(
        Direction::Backward,
        Payload::Basis {
            flag: FlagSummary::basis_only(sample.flag()),
        },
        spec.flag_bits().0.map(u64::from),
    );
    let j = regs.measure(
        "alice.control_ref",
        &sample.flag().basis.conjugate(),
        &mut rng,
    )?;
    trace.push(Event::Measurement {
        party: Party::Alice,
        register: "alice.control_ref".into(),
        basis: "B*".into(),
        outcome: j,
    });
    let hidden = sample
        .audit()
        .hidden_outcome()
        .ok_or_else(|| Error::Numerical("channel sample has no recorded outcome".into()))?;
    let echo = AuditSummary {
        checked: 1,
        mismatches: u64::from(j != hidden),
    };
    let told = if opts.withhold_outcome {
        None
    } else {
        trace.message(Direction::Forward, Payload::Outcome { j }, Some(1));
        Some(j)
    };
    let decoded = regs.measure("data", &decoding_basis(sample.flag(), told)?, &mut rng)?;
    trace.push(Event::Measurement {
        party: Party::Bob,
        register: "data".into(),
        basis: if told.is_some() {
            "U_j'|z⟩".into()
        } else {
            "Helstrom".into()
        },
        outcome: decoded,
    });
    trace.push(Event::Resources {
        ebits_consumed: 0,
        ebits_produced: 0,
        qubits_transmitted: 0,
        cbits_transmitted: 1,
    });
    trace.figure_of_merit = Some(FigureOfMerit::BitErrors {
        errors: u64::from(decoded != x),
        bits: 1,
    });
    Ok(Trial {
        trace,
        echo,
        decoded,
    })
}

pub fn run_dephased_c2_with(
    spec: &RetroChannelSpec,
    trials: usize,
    seed: u64,
    opts: &DephasedOptions,
) -> Result<DephasedRun> {
    if spec.variant() != Variant::Dephased || spec.c() != 2 || spec.d() != 2 {
        return Err(Error::domain(
            "the bit protocol runs on the dephased R_{2,2}",
        ));
    }
    let records = run_trials(trials, seed, opts.workers, |t, rng| {
        let x = usize::from(RandomStream::with_stream(seed, MESSAGE_STREAM | t as u64).bit());
        let sent = one_trial(spec, opts, t, seed, x, rng.clone())?;
        let flipped = one_trial(spec, opts, t, seed, 1 - x, rng.clone())?;
        let independent = same_side_conversation(&sent.trace, &flipped.trace);
        let mut failure = None;
        if !independent {
            failure = Some("side conversation changed with the message".to_string());
        } else if sent.echo.mismatches > 0 {
            failure = Some("echo audit failed".to_string());
        } else if !opts.withhold_outcome && sent.decoded != x {
            failure = Some(format!("sent {x}, decoded {}", sent.decoded));
        }
        Ok(TrialRecord {
            trace: sent.trace,
            echo: sent.echo,
            value: (u64::from(sent.decoded != x), independent),
            failure,
        })
    })?;
    let errors: u64 = records.iter().map(|r| r.value.0).sum();
    let mismatches = records.iter().filter(|r| !r.value.1).count() as u64;
    Ok(DephasedRun {
        protocol: "dephased-c2".into(),
        trials,
        seed,
        errors,
        bit_error_rate: errors as f64 / trials as f64,
        withheld: opts.withhold_outcome,
        echo_audit: merged_audit(&records),
        independence_audit: AuditSummary {
            checked: trials as u64,
            mismatches,
        },
        ledger: common_ledger(&records)?,
        traces: kept_traces(&records, opts.keep_traces),
    })
}

/// Random bits through the Haar dephased `R_{2,2}`.
pub fn run_dephased_c2(trials: usize, seed: u64) -> Result<DephasedRun> {
    run_dephased_c2_with(
        &RetroChannelSpec::dephased(2, 2)?,
        trials,
        seed,
        &DephasedOptions::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_arrive_without_errors() {
        let run = run_dephased_c2(2000, 1).unwrap();
        assert_eq!(run.errors, 0);
        assert!(run.independence_audit.passed());
        assert_eq!(run.independence_audit.checked, 2000);
        assert_eq!(run.echo_audit.checked, 2000);
        let l = run.ledger;
        assert_eq!(
            (l.channel_uses, l.forward_messages, l.backward_messages),
            (1, 1, 1)
        );
        assert_eq!(l.cbits_transmitted, 1);
    }

    #[test]
    fn identity_unitaries_decode_in_computational_basis() {
        let spec = RetroChannelSpec::dephased(2, 2)
            .unwrap()
            .with_identity_unitaries();
        let run = run_dephased_c2_with(&spec, 200, 2, &DephasedOptions::default()).unwrap();
        assert_eq!(run.errors, 0);
    }

    #[test]
    fn withholding_the_outcome_causes_errors() {
        let opts = DephasedOptions {
            withhold_outcome: true,
            ..Default::default()
        };
        let spec = RetroChannelSpec::dephased(2, 2).unwrap();
        let run = run_dephased_c2_with(&spec, 4000, 3, &opts).unwrap();
        assert!(run.errors > 0);
        assert!(run.bit_error_rate < 0.5);
        assert_eq!(run.ledger.forward_messages, 0);
    }

    #[test]
    fn standard_variant_is_rejected() {
        let spec = RetroChannelSpec::standard(2, 2).unwrap();
        assert!(run_dephased_c2_with(&spec, 10, 0, &DephasedOptions::default()).is_err());
    }

    #[test]
    fn helstrom_basis_is_optimal_for_one_unitary() {
        let b = helstrom_basis(&[UnitaryOperator::hadamard()]).unwrap();
        let zero = StateVector::basis(2, 0)
            .apply(&UnitaryOperator::hadamard())
            .unwrap();
        assert!((b.vector(0).overlap(&zero) - 1.0).abs() < 1e-12);
    }
}
