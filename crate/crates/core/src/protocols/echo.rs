//! Echo-assisted protocols on the standard retro channel and their
//! compositions.
//!
//! Register naming: `alice.*` and `bob.*` are held by the parties,
//! `verifier` is the external reference used to score transmission.

use serde::{Deserialize, Serialize};

use super::ledger::ResourceLedger;
use super::registers::Registers;
use super::runner::{
    common_ledger, kept_traces, merged_audit, run_trials, AuditSummary, EchoBasis, FidelityStats,
    ProtocolOptions, ReferenceCorrection, TrialRecord, FIDELITY_TOL,
};
use super::trace::{Direction, Event, FigureOfMerit, FlagSummary, Party, Payload, ProtocolTrace};
use crate::channels::{sample_flag, ChannelSample, Flag, RetroChannelSpec};
use crate::error::{Error, Result};
use crate::random::RandomStream;
use crate::states::{OrthonormalBasis, StateVector};

/// Summary of a batch of trials of a fidelity-scored protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub protocol: String,
    pub c: usize,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub fidelity: FidelityStats,
    pub echo_audit: AuditSummary,
    /// Resources of a single trial.
    pub ledger: ResourceLedger,
    pub traces: Vec<ProtocolTrace>,
}

fn bits_for(n: usize) -> u64 {
    (n as f64).log2().ceil() as u64
}

/// Back message announcing the basis; generated from the flag alone.
fn basis_message(spec: &RetroChannelSpec, flag: &Flag) -> (Payload, Option<u64>) {
    let bits = spec.flag_bits().0.map(u64::from);
    (
        Payload::Basis {
            flag: FlagSummary::basis_only(flag),
        },
        bits,
    )
}

fn echo_basis(flag: &Flag, rule: EchoBasis) -> OrthonormalBasis {
    match rule {
        EchoBasis::Conjugate => flag.basis.conjugate(),
        EchoBasis::Direct => flag.basis.clone(),
    }
}

struct EchoResult {
    echoed: usize,
    hidden: usize,
}

impl EchoResult {
    fn check(&self, audit: &mut AuditSummary, failure: &mut Option<String>) {
        audit.checked += 1;
        if self.echoed != self.hidden {
            audit.mismatches += 1;
            failure.get_or_insert_with(|| {
                format!(
                    "echo audit failed: measured j' = {} but hidden j = {}",
                    self.echoed, self.hidden
                )
            });
        }
    }
}

fn channel_use(
    regs: &mut Registers,
    spec: &RetroChannelSpec,
    trace: &mut ProtocolTrace,
    index: usize,
    control: &str,
    data: &str,
    rng: &mut RandomStream,
) -> Result<ChannelSample> {
    let sample = sample_flag(spec, rng)?;
    let summary = FlagSummary::of(sample.flag());
    let sample = regs.feed_retro(spec, sample, control, data, rng)?;
    trace.push(Event::ChannelUse {
        index,
        control: control.into(),
        data: data.into(),
        flag: Some(summary),
    });
    Ok(sample)
}

fn hidden(sample: &ChannelSample) -> Result<usize> {
    sample
        .audit()
        .hidden_outcome()
        .ok_or_else(|| Error::Numerical("channel sample has no recorded outcome".into()))
}

fn measure_echo(
    regs: &mut Registers,
    trace: &mut ProtocolTrace,
    party: Party,
    register: &str,
    flag: &Flag,
    rule: EchoBasis,
    rng: &mut RandomStream,
) -> Result<usize> {
    let basis = echo_basis(flag, rule);
    let j = regs.measure(register, &basis, rng)?;
    trace.push(Event::Measurement {
        party,
        register: register.into(),
        basis: match rule {
            EchoBasis::Conjugate => "B*".into(),
            EchoBasis::Direct => "B".into(),
        },
        outcome: j,
    });
    Ok(j)
}

/// One ebit-distribution round: produces a maximally entangled pair on
/// (`alice_ref`, `bob_data`) using one channel use and one back message.
#[allow(clippy::too_many_arguments)]
fn echo_ebit(
    regs: &mut Registers,
    spec: &RetroChannelSpec,
    trace: &mut ProtocolTrace,
    opts: &ProtocolOptions,
    index: usize,
    alice_ref: &str,
    bob_data: &str,
    rng: &mut RandomStream,
) -> Result<EchoResult> {
    let ctrl_ref = format!("alice.control_ref{index}");
    let ctrl = format!("control{index}");
    regs.push_pair(&ctrl_ref, &ctrl, spec.c())?;
    regs.push_pair(alice_ref, bob_data, spec.d())?;
    trace.push(Event::Prepare {
        party: Party::Alice,
        registers: vec![
            ctrl_ref.clone(),
            ctrl.clone(),
            alice_ref.into(),
            bob_data.into(),
        ],
        state: "Φ_c ⊗ Φ_d".into(),
    });
    let sample = channel_use(regs, spec, trace, index, &ctrl, bob_data, rng)?;
    let (payload, bits) = basis_message(spec, sample.flag());
    trace.message(Direction::Backward, payload, bits);
    let j = measure_echo(
        regs,
        trace,
        Party::Alice,
        &ctrl_ref,
        sample.flag(),
        opts.echo_basis,
        rng,
    )?;
    let u = &sample.flag().unitaries[j];
    let (op, label) = match opts.correction {
        ReferenceCorrection::Conjugate => (u.conj(), "conj(U_j')"),
        ReferenceCorrection::Transpose => (u.transpose(), "U_j'^T"),
    };
    regs.apply(alice_ref, op.matrix())?;
    trace.push(Event::Operation {
        party: Party::Alice,
        register: alice_ref.into(),
        operation: label.into(),
    });
    trace.push(Event::Resources {
        ebits_consumed: 0,
        ebits_produced: 1,
        qubits_transmitted: 0,
        cbits_transmitted: 0,
    });
    Ok(EchoResult {
        echoed: j,
        hidden: hidden(&sample)?,
    })
}

/// One teleport-free qubit round: Alice's half of a shared pair drives the control,
/// `data` is transmitted, Bob undoes `U_j` using his half. No side messages.
#[allow(clippy::too_many_arguments)]
fn echo_qubit(
    regs: &mut Registers,
    spec: &RetroChannelSpec,
    trace: &mut ProtocolTrace,
    opts: &ProtocolOptions,
    index: usize,
    alice_half: &str,
    bob_half: &str,
    data: &str,
    rng: &mut RandomStream,
) -> Result<EchoResult> {
    let sample = channel_use(regs, spec, trace, index, alice_half, data, rng)?;
    let j = measure_echo(
        regs,
        trace,
        Party::Bob,
        bob_half,
        sample.flag(),
        opts.echo_basis,
        rng,
    )?;
    regs.apply(data, sample.flag().unitaries[j].adjoint().matrix())?;
    trace.push(Event::Operation {
        party: Party::Bob,
        register: data.into(),
        operation: "U_j'†".into(),
    });
    trace.push(Event::Resources {
        ebits_consumed: 1,
        ebits_produced: 0,
        qubits_transmitted: 1,
        cbits_transmitted: 0,
    });
    Ok(EchoResult {
        echoed: j,
        hidden: hidden(&sample)?,
    })
}

fn fidelity_check(f: f64, failure: &mut Option<String>) {
    if f < 1.0 - FIDELITY_TOL {
        failure
            .get_or_insert_with(|| format!("entanglement fidelity {f} below 1 - {FIDELITY_TOL:e}"));
    }
}

fn finish(
    name: &str,
    spec: &RetroChannelSpec,
    trials: usize,
    seed: u64,
    opts: &ProtocolOptions,
    records: Vec<TrialRecord<f64>>,
) -> Result<ProtocolRun> {
    Ok(ProtocolRun {
        protocol: name.into(),
        c: spec.c(),
        d: spec.d(),
        trials,
        seed,
        fidelity: FidelityStats::of(records.iter().map(|r| r.value)),
        echo_audit: merged_audit(&records),
        ledger: common_ledger(&records)?,
        traces: kept_traces(&records, opts.keep_traces),
    })
}

fn scored(
    mut trace: ProtocolTrace,
    regs: &Registers,
    a: &str,
    b: &str,
    echo: AuditSummary,
    mut failure: Option<String>,
) -> Result<TrialRecord<f64>> {
    let f = regs.pair_fidelity(a, b)?;
    fidelity_check(f, &mut failure);
    trace.figure_of_merit = Some(FigureOfMerit::EntanglementFidelity { fidelity: f });
    Ok(TrialRecord {
        trace,
        echo,
        value: f,
        failure,
    })
}

fn fig2_trial(
    spec: &RetroChannelSpec,
    opts: &ProtocolOptions,
    trial: usize,
    seed: u64,
    rng: &mut RandomStream,
) -> Result<TrialRecord<f64>> {
    let mut trace = ProtocolTrace::new("fig2", trial, seed);
    let mut regs = Registers::new();
    regs.push_pair("alice.control_ref", "control", spec.c())?;
    regs.push_pair("verifier", "data", spec.d())?;
    trace.push(Event::Prepare {
        party: Party::Alice,
        registers: vec!["alice.control_ref".into(), "control".into()],
        state: "Φ_c".into(),
    });
    trace.push(Event::Prepare {
        party: Party::Verifier,
        registers: vec!["verifier".into(), "data".into()],
        state: "Φ_d".into(),
    });
    let sample = channel_use(&mut regs, spec, &mut trace, 0, "control", "data", rng)?;
    trace.push(Event::Resources {
        ebits_consumed: 0,
        ebits_produced: 0,
        qubits_transmitted: 1,
        cbits_transmitted: 0,
    });
    let (payload, bits) = basis_message(spec, sample.flag());
    trace.message(Direction::Backward, payload, bits);
    let j = measure_echo(
        &mut regs,
        &mut trace,
        Party::Alice,
        "alice.control_ref",
        sample.flag(),
        opts.echo_basis,
        rng,
    )?;
    trace.message(
        Direction::Forward,
        Payload::Outcome { j },
        Some(bits_for(spec.c())),
    );
    regs.apply("data", sample.flag().unitaries[j].adjoint().matrix())?;
    trace.push(Event::Operation {
        party: Party::Bob,
        register: "data".into(),
        operation: "U_j'†".into(),
    });
    let mut echo = AuditSummary::default();
    let mut failure = None;
    EchoResult {
        echoed: j,
        hidden: hidden(&sample)?,
    }
    .check(&mut echo, &mut failure);
    scored(trace, &regs, "verifier", "data", echo, failure)
}

fn fig3_trial(
    spec: &RetroChannelSpec,
    opts: &ProtocolOptions,
    trial: usize,
    seed: u64,
    rng: &mut RandomStream,
) -> Result<TrialRecord<f64>> {
    let mut trace = ProtocolTrace::new("fig3", trial, seed);
    let mut regs = Registers::new();
    let r = echo_ebit(
        &mut regs,
        spec,
        &mut trace,
        opts,
        0,
        "alice.data_ref",
        "bob.data",
        rng,
    )?;
    let mut echo = AuditSummary::default();
    let mut failure = None;
    r.check(&mut echo, &mut failure);
    scored(trace, &regs, "alice.data_ref", "bob.data", echo, failure)
}

fn fig4_trial(
    spec: &RetroChannelSpec,
    opts: &ProtocolOptions,
    trial: usize,
    seed: u64,
    rng: &mut RandomStream,
) -> Result<TrialRecord<f64>> {
    let mut trace = ProtocolTrace::new("fig4", trial, seed);
    let mut regs = Registers::new();
    regs.push_pair("alice.ebit", "bob.ebit", spec.c())?;
    regs.push_pair("verifier", "data", spec.d())?;
    trace.push(Event::Prepare {
        party: Party::Alice,
        registers: vec!["alice.ebit".into(), "bob.ebit".into()],
        state: "Φ_c (shared beforehand)".into(),
    });
    let r = echo_qubit(
        &mut regs,
        spec,
        &mut trace,
        opts,
        0,
        "alice.ebit",
        "bob.ebit",
        "data",
        rng,
    )?;
    let mut echo = AuditSummary::default();
    let mut failure = None;
    r.check(&mut echo, &mut failure);
    scored(trace, &regs, "verifier", "data", echo, failure)
}

fn qubit_2s_back_trial(
    spec: &RetroChannelSpec,
    opts: &ProtocolOptions,
    trial: usize,
    seed: u64,
    rng: &mut RandomStream,
) -> Result<TrialRecord<f64>> {
    let mut trace = ProtocolTrace::new("qubit-2s-back", trial, seed);
    let mut regs = Registers::new();
    let mut echo = AuditSummary::default();
    let mut failure = None;
    echo_ebit(
        &mut regs, spec, &mut trace, opts, 0, "alice.e", "bob.e", rng,
    )?
    .check(&mut echo, &mut failure);
    regs.push_pair("verifier", "data", spec.d())?;
    echo_qubit(
        &mut regs, spec, &mut trace, opts, 1, "alice.e", "bob.e", "data", rng,
    )?
    .check(&mut echo, &mut failure);
    scored(trace, &regs, "verifier", "data", echo, failure)
}

fn check_square(spec: &RetroChannelSpec) -> Result<()> {
    if spec.c() != spec.d() {
        return Err(Error::domain(
            "composition feeds a data-sized ebit into the control, so c must equal d",
        ));
    }
    Ok(())
}

pub fn run_fig2_with(
    spec: &RetroChannelSpec,
    trials: usize,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<ProtocolRun> {
    let records = run_trials(trials, seed, opts.workers, |t, rng| {
        fig2_trial(spec, opts, t, seed, rng)
    })?;
    finish("fig2", spec, trials, seed, opts, records)
}

pub fn run_fig3_with(
    spec: &RetroChannelSpec,
    trials: usize,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<ProtocolRun> {
    let records = run_trials(trials, seed, opts.workers, |t, rng| {
        fig3_trial(spec, opts, t, seed, rng)
    })?;
    finish("fig3", spec, trials, seed, opts, records)
}

pub fn run_fig4_with(
    spec: &RetroChannelSpec,
    trials: usize,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<ProtocolRun> {
    let records = run_trials(trials, seed, opts.workers, |t, rng| {
        fig4_trial(spec, opts, t, seed, rng)
    })?;
    finish("fig4", spec, trials, seed, opts, records)
}

pub fn compose_qubit_2s_back_with(
    spec: &RetroChannelSpec,
    trials: usize,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<ProtocolRun> {
    check_square(spec)?;
    let records = run_trials(trials, seed, opts.workers, |t, rng| {
        qubit_2s_back_trial(spec, opts, t, seed, rng)
    })?;
    finish("qubit-2s-back", spec, trials, seed, opts, records)
}

/// Qubit transmission over the standard `R_{d,d}`: one qubit per use with a back and a
/// forward message.
pub fn run_fig2(d: usize, trials: usize, seed: u64) -> Result<ProtocolRun> {
    run_fig2_with(
        &RetroChannelSpec::standard(d, d)?,
        trials,
        seed,
        &ProtocolOptions::default(),
    )
}

/// Ebit distribution: one ebit per use with a back message only.
pub fn run_fig3(d: usize, trials: usize, seed: u64) -> Result<ProtocolRun> {
    run_fig3_with(
        &RetroChannelSpec::standard(d, d)?,
        trials,
        seed,
        &ProtocolOptions::default(),
    )
}

/// Entanglement-assisted transmission: one qubit per use and per pre-shared ebit, no side messages.
pub fn run_fig4(d: usize, trials: usize, seed: u64) -> Result<ProtocolRun> {
    run_fig4_with(
        &RetroChannelSpec::standard(d, d)?,
        trials,
        seed,
        &ProtocolOptions::default(),
    )
}

/// Ebit distribution followed by assisted transmission consuming the ebit it produced.
pub fn compose_qubit_2s_back(d: usize, trials: usize, seed: u64) -> Result<ProtocolRun> {
    compose_qubit_2s_back_with(
        &RetroChannelSpec::standard(d, d)?,
        trials,
        seed,
        &ProtocolOptions::default(),
    )
}

/// Superdense coding over the composed qubit channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperdenseRun {
    pub protocol: String,
    pub trials_per_message: usize,
    pub seed: u64,
    /// Decoding errors for messages 00, 01, 10, 11.
    pub errors: [u64; 4],
    pub echo_audit: AuditSummary,
    pub ledger: ResourceLedger,
    pub traces: Vec<ProtocolTrace>,
}

impl SuperdenseRun {
    pub fn total_errors(&self) -> u64 {
        self.errors.iter().sum()
    }

    pub fn bit_error_rate(&self) -> f64 {
        // each wrong 2-bit symbol counts as at most 2 bit errors; report the
        // symbol error fraction as an upper bound on the bit error rate
        self.total_errors() as f64 / (4 * self.trials_per_message) as f64
    }
}

/// `(P_m ⊗ I)|Φ⟩` for `P_m ∈ {I, X, iY, Z}`.
fn bell_basis() -> OrthonormalBasis {
    let phi = StateVector::maximally_entangled(2);
    let vectors = (0..4)
        .map(|m| {
            let p = crate::states::UnitaryOperator::pauli(m)
                .tensor(&crate::states::UnitaryOperator::identity(2))?;
            phi.apply(&p)
        })
        .collect::<Result<Vec<_>>>()
        .expect("Bell states are valid");
    OrthonormalBasis::new(vectors).expect("Bell states are orthonormal")
}

fn superdense_trial(
    spec: &RetroChannelSpec,
    opts: &ProtocolOptions,
    trial: usize,
    message: usize,
    seed: u64,
    rng: &mut RandomStream,
) -> Result<TrialRecord<usize>> {
    let mut trace = ProtocolTrace::new("sd-3s-back", trial, seed);
    let mut regs = Registers::new();
    let mut echo = AuditSummary::default();
    let mut failure = None;
    echo_ebit(
        &mut regs, spec, &mut trace, opts, 0, "alice.e1", "bob.e1", rng,
    )?
    .check(&mut echo, &mut failure);
    echo_ebit(
        &mut regs, spec, &mut trace, opts, 1, "alice.e2", "bob.e2", rng,
    )?
    .check(&mut echo, &mut failure);
    regs.apply(
        "alice.e2",
        crate::states::UnitaryOperator::pauli(message).matrix(),
    )?;
    trace.push(Event::Operation {
        party: Party::Alice,
        register: "alice.e2".into(),
        operation: "encode P_m".into(),
    });
    trace.push(Event::Resources {
        ebits_consumed: 1,
        ebits_produced: 0,
        qubits_transmitted: 0,
        cbits_transmitted: 2,
    });
    echo_qubit(
        &mut regs, spec, &mut trace, opts, 2, "alice.e1", "bob.e1", "alice.e2", rng,
    )?
    .check(&mut echo, &mut failure);
    regs.rename("alice.e2", "bob.received")?;
    let decoded = regs.measure_joint("bob.received", "bob.e2", &bell_basis(), rng)?;
    trace.push(Event::Measurement {
        party: Party::Bob,
        register: "bob.received,bob.e2".into(),
        basis: "Bell".into(),
        outcome: decoded,
    });
    let errors = u64::from(decoded != message);
    if errors > 0 {
        failure.get_or_insert_with(|| format!("sent message {message}, decoded {decoded}"));
    }
    trace.figure_of_merit = Some(FigureOfMerit::BitErrors { errors, bits: 2 });
    Ok(TrialRecord {
        trace,
        echo,
        value: decoded,
        failure,
    })
}

pub fn compose_2cbits_3s_back_with(
    spec: &RetroChannelSpec,
    trials_per_message: usize,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<SuperdenseRun> {
    if spec.c() != 2 || spec.d() != 2 {
        return Err(Error::domain(
            "superdense composition is defined for c = d = 2",
        ));
    }
    let n = trials_per_message;
    let records = run_trials(4 * n, seed, opts.workers, |t, rng| {
        superdense_trial(spec, opts, t, t / n.max(1), seed, rng)
    })?;
    let mut errors = [0u64; 4];
    for (t, r) in records.iter().enumerate() {
        errors[t / n] += u64::from(r.value != t / n);
    }
    Ok(SuperdenseRun {
        protocol: "sd-3s-back".into(),
        trials_per_message: n,
        seed,
        errors,
        echo_audit: merged_audit(&records),
        ledger: common_ledger(&records)?,
        traces: kept_traces(&records, opts.keep_traces),
    })
}

/// Two classical bits per three uses with back communication only.
pub fn compose_2cbits_3s_back(trials_per_message: usize, seed: u64) -> Result<SuperdenseRun> {
    compose_2cbits_3s_back_with(
        &RetroChannelSpec::standard(2, 2)?,
        trials_per_message,
        seed,
        &ProtocolOptions::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_spec(d: usize) -> RetroChannelSpec {
        RetroChannelSpec::standard(d, d)
            .unwrap()
            .with_identity_unitaries()
    }

    #[test]
    fn fig2_qubit_and_ledger() {
        let run = run_fig2(2, 200, 1).unwrap();
        assert!(run.fidelity.min >= 1.0 - FIDELITY_TOL);
        assert_eq!(
            run.echo_audit,
            AuditSummary {
                checked: 200,
                mismatches: 0
            }
        );
        let l = run.ledger;
        assert_eq!(
            (l.channel_uses, l.backward_messages, l.forward_messages),
            (1, 1, 1)
        );
        assert_eq!(l.qubits_transmitted, 1);
        assert_eq!(l.forward_bits, Some(1));
        assert_eq!(l.backward_bits, None);
        assert_eq!(run.traces.len(), 4);
    }

    #[test]
    fn identity_ensemble_fidelity_one() {
        for run in [
            run_fig2_with(&identity_spec(3), 50, 2, &ProtocolOptions::default()).unwrap(),
            run_fig3_with(&identity_spec(3), 50, 2, &ProtocolOptions::default()).unwrap(),
            run_fig4_with(&identity_spec(3), 50, 2, &ProtocolOptions::default()).unwrap(),
        ] {
            assert!((run.fidelity.min - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fig3_produces_an_ebit() {
        let run = run_fig3(3, 200, 3).unwrap();
        assert!(run.fidelity.min >= 1.0 - FIDELITY_TOL);
        let l = run.ledger;
        assert_eq!(
            (l.channel_uses, l.backward_messages, l.forward_messages),
            (1, 1, 0)
        );
        assert_eq!(l.ebits_produced, 1);
    }

    #[test]
    fn fig4_has_no_side_messages() {
        let run = run_fig4(5, 100, 4).unwrap();
        assert!(run.fidelity.min >= 1.0 - FIDELITY_TOL);
        let l = run.ledger;
        assert_eq!(l.side_messages(), 0);
        assert_eq!((l.ebits_consumed, l.qubits_transmitted), (1, 1));
        assert!(run.traces[0].side_messages().is_empty());
    }

    #[test]
    fn transpose_correction_fails_for_qutrits() {
        let opts = ProtocolOptions {
            correction: ReferenceCorrection::Transpose,
            ..Default::default()
        };
        let spec = RetroChannelSpec::standard(3, 3).unwrap();
        match run_fig3_with(&spec, 50, 5, &opts) {
            Err(Error::ProtocolFailure { reason, trace }) => {
                assert!(reason.contains("fidelity"), "{reason}");
                assert!(matches!(
                    trace.figure_of_merit,
                    Some(FigureOfMerit::EntanglementFidelity { fidelity }) if fidelity < 0.999
                ));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn direct_basis_breaks_the_echo() {
        let opts = ProtocolOptions {
            echo_basis: EchoBasis::Direct,
            ..Default::default()
        };
        let spec = RetroChannelSpec::standard(2, 2).unwrap();
        match run_fig4_with(&spec, 200, 6, &opts) {
            Err(Error::ProtocolFailure { reason, .. }) => {
                assert!(reason.contains("echo audit"), "{reason}")
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn composed_ledger_is_sum_of_parts() {
        let composed = compose_qubit_2s_back(2, 100, 7).unwrap();
        assert!(composed.fidelity.min >= 1.0 - FIDELITY_TOL);
        let parts = run_fig3(2, 1, 0).unwrap().ledger + run_fig4(2, 1, 0).unwrap().ledger;
        assert_eq!(composed.ledger, parts);
        assert_eq!(composed.ledger.channel_uses, 2);
        assert_eq!(composed.ledger.forward_messages, 0);
        assert_eq!(composed.ledger.qubits_transmitted, 1);
        assert!(compose_qubit_2s_back_with(
            &RetroChannelSpec::standard(3, 2).unwrap(),
            1,
            0,
            &ProtocolOptions::default()
        )
        .is_err());
    }

    #[test]
    fn superdense_over_three_uses() {
        let run = compose_2cbits_3s_back(100, 8).unwrap();
        assert_eq!(run.errors, [0; 4]);
        assert_eq!(run.ledger.channel_uses, 3);
        assert_eq!(run.ledger.cbits_transmitted, 2);
        assert_eq!(run.ledger.backward_messages, 2);
        assert_eq!(run.ledger.forward_messages, 0);
        assert_eq!(run.echo_audit.checked, 1200);
        let fig3 = run_fig3(2, 1, 0).unwrap().ledger;
        let fig4 = run_fig4(2, 1, 0).unwrap().ledger;
        let coding = ResourceLedger {
            ebits_consumed: 1,
            cbits_transmitted: 2,
            ..ResourceLedger::zero()
        };
        assert_eq!(run.ledger, fig3 + fig3 + fig4 + coding);
    }

    #[test]
    fn superdense_identity_message_zero() {
        let run = compose_2cbits_3s_back_with(&identity_spec(2), 5, 9, &ProtocolOptions::default())
            .unwrap();
        assert_eq!(run.errors[0], 0);
    }

    #[test]
    fn worker_count_does_not_change_runs() {
        let spec = RetroChannelSpec::standard(2, 2).unwrap();
        let a = run_fig2_with(
            &spec,
            64,
            10,
            &ProtocolOptions {
                workers: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let b = run_fig2_with(
            &spec,
            64,
            10,
            &ProtocolOptions {
                workers: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
