//! Converting depolarizations of the simplified channel into flagged
//! erasures.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ledger::ResourceLedger;
use super::registers::Registers;
use super::runner::{
    common_ledger, kept_traces, merged_audit, run_trials, AuditSummary, ProtocolOptions,
    TrialRecord, FIDELITY_TOL,
};
use super::trace::{Direction, Event, FigureOfMerit, Party, Payload, ProtocolTrace};
use crate::channels::SimplifiedChannelSpec;
use crate::error::Result;
use crate::linalg::{inner, norm_sqr, C64};
use crate::random::RandomStream;
use crate::states::{OrthonormalBasis, StateVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErasureRun {
    pub protocol: String,
    pub trials: usize,
    pub seed: u64,
    pub erased: u64,
    pub misses: u64,
    pub erasure_fraction: f64,
    pub binomial_stderr: f64,
    /// `1 − erasure_fraction`, the erasure-channel rate.
    pub q2_lower_bound: f64,
    pub echo_audit: AuditSummary,
    pub ledger: ResourceLedger,
    pub traces: Vec<ProtocolTrace>,
}

struct Outcome {
    flagged: bool,
    missed: bool,
}

/// Shared trial body: `control_state` on (`alice.ref`, `control`), data half
/// of a pair with the verifier. Alice measures her reference in `decide(b)`;
/// outcome 0 means "keep", anything else flags an erasure.
#[allow(clippy::too_many_arguments)]
fn flagged_trial(
    spec: &SimplifiedChannelSpec,
    name: &str,
    control_state: &StateVector,
    decide: &dyn Fn(usize) -> Result<(OrthonormalBasis, &'static str)>,
    echo: bool,
    trial: usize,
    seed: u64,
    rng: &mut RandomStream,
) -> Result<TrialRecord<Outcome>> {
    let mut trace = ProtocolTrace::new(name, trial, seed);
    let mut regs = Registers::new();
    regs.push_joint(&["alice.ref", "control"], &[2, 2], control_state)?;
    regs.push_pair("verifier", "data", 2)?;
    trace.push(Event::Prepare {
        party: Party::Alice,
        registers: vec!["alice.ref".into(), "control".into()],
        state: "control pair".into(),
    });
    let out = regs.feed_simplified(spec, "control", "data", rng)?;
    trace.push(Event::ChannelUse {
        index: 0,
        control: "control".into(),
        data: "data".into(),
        flag: None,
    });
    trace.message(
        Direction::Backward,
        Payload::BasisBit { bit: out.basis_bit },
        Some(1),
    );
    let (basis, label) = decide(out.basis_bit)?;
    let k = regs.measure("alice.ref", &basis, rng)?;
    trace.push(Event::Measurement {
        party: Party::Alice,
        register: "alice.ref".into(),
        basis: label.into(),
        outcome: k,
    });
    let flagged = k != 0;
    let mut audit = AuditSummary::default();
    if echo {
        // the basis is ordered (safe, trigger), so k maps back to j'
        let echoed = if flagged {
            spec.trigger(out.basis_bit)
        } else {
            spec.safe_outcome(out.basis_bit)
        };
        audit = AuditSummary {
            checked: 1,
            mismatches: u64::from(echoed != out.hidden),
        };
    }
    trace.message(
        Direction::Forward,
        Payload::ErasureFlag { erased: flagged },
        Some(1),
    );
    let missed = out.depolarized && !flagged;
    let mut failure = None;
    if audit.mismatches > 0 {
        failure = Some("echo audit failed".to_string());
    } else if missed {
        failure = Some("depolarization was not flagged".to_string());
    } else if !flagged {
        let f = regs.pair_fidelity("verifier", "data")?;
        if f < 1.0 - FIDELITY_TOL {
            failure = Some(format!("kept use has fidelity {f}"));
        }
    }
    trace.figure_of_merit = Some(FigureOfMerit::Erasure {
        erased: flagged,
        missed,
    });
    Ok(TrialRecord {
        trace,
        echo: audit,
        value: Outcome { flagged, missed },
        failure,
    })
}

pub fn erasure_conversion_mes_with(
    spec: &SimplifiedChannelSpec,
    trials: usize,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<ErasureRun> {
    let phi = StateVector::maximally_entangled(2);
    // measuring the reference in B* reproduces the hidden outcome; order the
    // basis so that the safe outcome comes first
    let decide = |b: usize| {
        let conj = spec.basis(b).conjugate();
        let s = spec.safe_outcome(b);
        let basis =
            OrthonormalBasis::new(vec![conj.vector(s).clone(), conj.vector(1 - s).clone()])?;
        Ok((basis, "B_b*"))
    };
    let records = run_trials(trials, seed, opts.workers, |t, rng| {
        flagged_trial(spec, "erasure-mes", &phi, &decide, true, t, seed, rng)
    })?;
    let erased = records.iter().filter(|r| r.value.flagged).count() as u64;
    let misses = records.iter().filter(|r| r.value.missed).count() as u64;
    let p = erased as f64 / trials as f64;
    Ok(ErasureRun {
        protocol: "erasure-mes".into(),
        trials,
        seed,
        erased,
        misses,
        erasure_fraction: p,
        binomial_stderr: (0.25 / trials as f64).sqrt(),
        q2_lower_bound: 1.0 - p,
        echo_audit: merged_audit(&records),
        ledger: common_ledger(&records)?,
        traces: kept_traces(&records, opts.keep_traces),
    })
}

/// Maximally entangled control, erasure flag from the echoed outcome.
pub fn erasure_conversion_mes(trials: usize, seed: u64) -> Result<ErasureRun> {
    erasure_conversion_mes_with(
        &SimplifiedChannelSpec::default(),
        trials,
        seed,
        &ProtocolOptions::default(),
    )
}

/// `√a|0⟩|f₀⟩ + √(1−a)|1⟩|f₁⟩` with `f₀ = (cos α/2, sin α/2)` and
/// `f₁ = (−sin α/2, cos α/2)`; reference first.
pub fn schmidt_control(a: f64, alpha: f64) -> StateVector {
    let (s, c) = (alpha / 2.0).sin_cos();
    let (p, q) = (a.clamp(0.0, 1.0).sqrt(), (1.0 - a).clamp(0.0, 1.0).sqrt());
    let amps = [p * c, p * s, -q * s, q * c].map(|x| C64::new(x, 0.0));
    StateVector::new(amps.to_vec()).expect("unit norm by construction")
}

/// Unnormalized reference vector `(I ⊗ ⟨b_j|)ψ`.
fn reference_branch(psi: &StateVector, basis: &OrthonormalBasis, j: usize) -> [C64; 2] {
    let v = basis.vector(j).amplitudes();
    let a = psi.amplitudes();
    [
        v[0].conj() * a[0] + v[1].conj() * a[1],
        v[0].conj() * a[2] + v[1].conj() * a[3],
    ]
}

const BRANCH_EPS: f64 = 1e-14;

/// Keep/erase basis for basis bit `b`: first vector orthogonal to the
/// trigger branch.
fn zero_miss_basis(
    spec: &SimplifiedChannelSpec,
    psi: &StateVector,
    b: usize,
) -> Result<OrthonormalBasis> {
    let rt = reference_branch(psi, spec.basis(b), spec.trigger(b));
    if norm_sqr(&rt) < BRANCH_EPS {
        return Ok(OrthonormalBasis::computational(2));
    }
    let t = StateVector::normalized(rt.to_vec())?;
    let a = t.amplitudes();
    let perp = StateVector::new(vec![-a[1].conj(), a[0].conj()])?;
    OrthonormalBasis::new(vec![perp, t])
}

/// Probability that a use is kept, which equals the rate of the induced
/// erasure channel since kept uses are noiseless.
pub fn flagged_rate(spec: &SimplifiedChannelSpec, a: f64, alpha: f64) -> f64 {
    let psi = schmidt_control(a, alpha);
    let per_basis = |b: usize| {
        let rs = reference_branch(&psi, spec.basis(b), spec.safe_outcome(b));
        let rt = reference_branch(&psi, spec.basis(b), spec.trigger(b));
        let nt = norm_sqr(&rt);
        if nt < BRANCH_EPS {
            norm_sqr(&rs)
        } else {
            (norm_sqr(&rs) - inner(&rt, &rs).norm_sqr() / nt).max(0.0)
        }
    };
    0.5 * (per_basis(0) + per_basis(1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaggedSimulation {
    pub trials: usize,
    pub kept: u64,
    pub misses: u64,
    pub rate: f64,
    pub stderr: f64,
    pub closed_form: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaggedOptimum {
    pub a: f64,
    pub alpha: f64,
    pub rate: f64,
    pub grid_points: usize,
    pub grid_best: f64,
    pub simulation: FlaggedSimulation,
}

/// Runs the zero-miss protocol with a fixed control pair.
pub fn simulate_flagged(
    spec: &SimplifiedChannelSpec,
    a: f64,
    alpha: f64,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<FlaggedSimulation> {
    let psi = schmidt_control(a, alpha);
    let decide = |b: usize| Ok((zero_miss_basis(spec, &psi, b)?, "trigger-branch complement"));
    let records = run_trials(trials, seed, workers, |t, rng| {
        flagged_trial(spec, "flagged", &psi, &decide, false, t, seed, rng)
    })?;
    let kept = records.iter().filter(|r| !r.value.flagged).count() as u64;
    let misses = records.iter().filter(|r| r.value.missed).count() as u64;
    let rate = kept as f64 / trials as f64;
    let closed_form = flagged_rate(spec, a, alpha);
    let stderr = (closed_form * (1.0 - closed_form) / trials as f64).sqrt();
    Ok(FlaggedSimulation {
        trials,
        kept,
        misses,
        rate,
        stderr,
        closed_form,
        agrees: (rate - closed_form).abs() <= 3.0 * stderr + 1e-12,
    })
}

pub const MIN_GRID_POINTS: usize = 10_000;
pub const SIMULATION_TRIALS: usize = 20_000;

/// Brute-force grid over `(a, α) ∈ [0,1] × [0,π]` with `resolution` points per
/// axis, then a shrinking pattern search from the best grid point.
pub fn optimize_flagged_rate_with(
    spec: &SimplifiedChannelSpec,
    resolution: usize,
    sim_trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<FlaggedOptimum> {
    if resolution * resolution < MIN_GRID_POINTS {
        return Err(crate::error::Error::domain(format!(
            "grid needs at least {MIN_GRID_POINTS} points, resolution {resolution} gives {}",
            resolution * resolution
        )));
    }
    let step = |n: usize, hi: f64| hi / (resolution - 1) as f64 * n as f64;
    let (mut best, mut ba, mut bt) = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..resolution {
        for k in 0..resolution {
            let (a, t) = (step(i, 1.0), step(k, PI));
            let r = flagged_rate(spec, a, t);
            if r > best {
                (best, ba, bt) = (r, a, t);
            }
        }
    }
    let grid_best = best;
    let (mut ha, mut ht) = (1.0 / (resolution - 1) as f64, PI / (resolution - 1) as f64);
    while ha > 1e-13 || ht > 1e-13 {
        let mut moved = false;
        for (da, dt) in [(ha, 0.0), (-ha, 0.0), (0.0, ht), (0.0, -ht)] {
            let (a, t) = ((ba + da).clamp(0.0, 1.0), bt + dt);
            let r = flagged_rate(spec, a, t);
            if r > best {
                (best, ba, bt) = (r, a, t);
                moved = true;
            }
        }
        if !moved {
            ha /= 2.0;
            ht /= 2.0;
        }
    }
    let simulation = simulate_flagged(spec, ba, bt, sim_trials, seed, workers)?;
    Ok(FlaggedOptimum {
        a: ba,
        alpha: bt.rem_euclid(2.0 * PI),
        rate: best,
        grid_points: resolution * resolution,
        grid_best,
        simulation,
    })
}

pub fn optimize_flagged_rate(resolution: usize, seed: u64) -> Result<FlaggedOptimum> {
    optimize_flagged_rate_with(
        &SimplifiedChannelSpec::default(),
        resolution,
        SIMULATION_TRIALS,
        seed,
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn erasure_fraction_is_half() {
        let run = erasure_conversion_mes(20_000, 1).unwrap();
        assert_eq!(run.misses, 0);
        assert!((run.erasure_fraction - 0.5).abs() <= 3.0 * run.binomial_stderr);
        assert!((run.q2_lower_bound - (1.0 - run.erasure_fraction)).abs() < 1e-15);
        let l = run.ledger;
        assert_eq!(
            (l.channel_uses, l.backward_messages, l.forward_messages),
            (1, 1, 1)
        );
    }

    #[test]
    fn swapped_triggers_same_statistics() {
        let spec = SimplifiedChannelSpec::default()
            .with_triggers([0, 0])
            .unwrap();
        let a = erasure_conversion_mes_with(&spec, 5000, 2, &ProtocolOptions::default()).unwrap();
        let b = erasure_conversion_mes(5000, 2).unwrap();
        assert_eq!(a.misses, 0);
        let joint = (a.binomial_stderr.powi(2) + b.binomial_stderr.powi(2)).sqrt();
        assert!((a.erasure_fraction - b.erasure_fraction).abs() <= 3.0 * joint);
    }

    /// Density-matrix oracle: keep probability for basis `b` is the weight of
    /// the safe reference branch on the kernel of the trigger branch.
    fn kernel_keep(spec: &SimplifiedChannelSpec, psi: &StateVector, b: usize) -> f64 {
        let rho = psi.projector().into_matrix();
        let branch = |j: usize| {
            let p = spec.basis(b).vector(j).projector().into_matrix();
            let m = Matrix::identity(2).kron(&p).unwrap();
            let out = &(&m * &rho) * &m;
            crate::linalg::partial_trace(&out, &[2, 2], &[0]).unwrap()
        };
        let e = crate::eigen::eig_hermitian(&branch(spec.trigger(b))).unwrap();
        let safe = branch(spec.safe_outcome(b));
        (0..2)
            .filter(|&k| e.values[k] < 1e-12)
            .map(|k| {
                let v = e.vectors.column(k);
                inner(&v, &safe.apply(&v)).re
            })
            .sum()
    }

    #[test]
    fn closed_form_matches_kernel_oracle() {
        let spec = SimplifiedChannelSpec::default();
        for (a, alpha) in [
            (0.5, 0.3),
            (0.8, PI / 4.0),
            (1.0, 0.0),
            (0.3, 2.1),
            (0.7, 0.8),
        ] {
            let psi = schmidt_control(a, alpha);
            let oracle = 0.5 * (kernel_keep(&spec, &psi, 0) + kernel_keep(&spec, &psi, 1));
            assert!(
                (flagged_rate(&spec, a, alpha) - oracle).abs() < 1e-10,
                "{a} {alpha}"
            );
        }
    }

    #[test]
    fn maximal_entanglement_gives_one_half() {
        let spec = SimplifiedChannelSpec::default();
        for alpha in [0.0, 0.7, PI / 4.0, 2.0] {
            assert!((flagged_rate(&spec, 0.5, alpha) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn product_control_matches_simulation() {
        let spec = SimplifiedChannelSpec::default();
        let sim = simulate_flagged(&spec, 1.0, 0.4, 8000, 3, None).unwrap();
        assert_eq!(sim.misses, 0);
        assert!(sim.agrees, "{sim:?}");
    }

    #[test]
    fn optimum_is_two_minus_root_two() {
        let opt = optimize_flagged_rate_with(&SimplifiedChannelSpec::default(), 100, 8000, 4, None)
            .unwrap();
        assert!((opt.rate - (2.0 - 2f64.sqrt())).abs() < 1e-6, "{opt:?}");
        assert!(opt.rate >= opt.grid_best);
        assert_eq!(opt.simulation.misses, 0);
        assert!(opt.simulation.agrees);
        assert!(optimize_flagged_rate(50, 0).is_err());
    }
}
