//! Acceptance run: one pass/fail line per criterion, non-zero exit on any
//! failure.
//!
//! Run: cargo test -p retrocap-core --test acceptance

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use retrocap::channels::{choi_matrix, RetroChannelSpec, SimplifiedChannelSpec, Variant};
use retrocap::estimators::{
    coherent_info_retro, holevo_retro, simplified_chi_scan, trend_scan, RetroMcOptions,
};
use retrocap::ladder::{check_ladder, separation_sigmas, TolerancePolicy};
use retrocap::protocols::erasure::optimize_flagged_rate_with;
use retrocap::protocols::{
    compose_2cbits_3s_back, compose_qubit_2s_back, erasure_conversion_mes, run_dephased_c2,
    run_dephased_c2_with, run_fig2, run_fig3, run_fig4, DephasedOptions, ProtocolOptions,
    FIDELITY_TOL,
};
use retrocap::report::{
    classical_bit_report, identity_qubit_report, r22_report, CapacityKind, EntryTag, ReportConfig,
    PPT_TOL,
};

// tolerances and sizes
const MC_SAMPLES: usize = 1_000_000;
const MAX_STDERR: f64 = 5e-4;
const RUNTIME_LIMIT: Duration = Duration::from_secs(60);
const SIGMAS: f64 = 3.0;
const COHERENT_TARGET: f64 = 0.4262;
const PROTOCOL_TRIALS: usize = 1000;
const BITS: usize = 10_000;
const ERASURE_TRIALS: usize = 100_000;
const FLAGGED_TOL: f64 = 1e-6;
const GRID_RESOLUTION: usize = 100;
const LADDER_TOL: f64 = 1e-3;
const TREND_DIMS: [usize; 4] = [2, 4, 8, 16];
const TREND_SAMPLES: usize = 4000;

fn holevo_closed_form() -> f64 {
    1.0 + (PI * PI / 18.0 - 5.0 / 6.0) / LN_2
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

type Criterion = fn() -> retrocap::Result<Verdict>;

fn single_worker() -> RetroMcOptions {
    RetroMcOptions {
        workers: Some(1),
        ..Default::default()
    }
}

fn c1_holevo() -> retrocap::Result<Verdict> {
    let spec = RetroChannelSpec::standard(2, 2)?;
    let start = Instant::now();
    let e = holevo_retro(&spec, MC_SAMPLES, 42, &single_worker())?.estimate;
    let elapsed = start.elapsed();
    let target = holevo_closed_form();
    let z = (e.mean - target).abs() / e.stderr;
    Ok(verdict(
        z <= SIGMAS && e.stderr <= MAX_STDERR && elapsed < RUNTIME_LIMIT,
        format!(
            "C_H = {:.6} ± {:.6} vs {target:.7} (z = {z:.2}), {:.2}s single worker",
            e.mean,
            e.stderr,
            elapsed.as_secs_f64()
        ),
    ))
}

fn c2_coherent() -> retrocap::Result<Verdict> {
    let spec = RetroChannelSpec::standard(2, 2)?;
    let e = coherent_info_retro(&spec, MC_SAMPLES, 42, &RetroMcOptions::default())?.estimate;
    let z = (e.mean - COHERENT_TARGET).abs() / e.stderr;
    Ok(verdict(
        z <= SIGMAS,
        format!(
            "I_c = {:.6} ± {:.6} vs {COHERENT_TARGET} (z = {z:.2})",
            e.mean, e.stderr
        ),
    ))
}

fn c3_echo_protocols() -> retrocap::Result<Verdict> {
    let mut worst = f64::INFINITY;
    let mut mismatches = 0;
    let mut runs = 0;
    for d in [2, 3, 5] {
        for run in [
            run_fig2(d, PROTOCOL_TRIALS, 11)?,
            run_fig3(d, PROTOCOL_TRIALS, 12)?,
            run_fig4(d, PROTOCOL_TRIALS, 13)?,
        ] {
            worst = worst.min(run.fidelity.min);
            mismatches += run.echo_audit.mismatches;
            runs += (run.echo_audit.checked == PROTOCOL_TRIALS as u64) as usize;
        }
    }
    Ok(verdict(
        worst >= 1.0 - FIDELITY_TOL && mismatches == 0 && runs == 9,
        format!("9 runs x {PROTOCOL_TRIALS} trials, min fidelity {worst:.15}, echo mismatches {mismatches}"),
    ))
}

fn c4_compositions() -> retrocap::Result<Verdict> {
    let q = compose_qubit_2s_back(2, PROTOCOL_TRIALS, 21)?;
    let sd = compose_2cbits_3s_back(PROTOCOL_TRIALS, 22)?;
    let pass = q.fidelity.min >= 1.0 - FIDELITY_TOL
        && q.ledger.channel_uses == 2
        && q.ledger.forward_messages == 0
        && sd.errors == [0; 4]
        && sd.ledger.channel_uses == 3
        && sd.ledger.forward_messages == 0;
    Ok(verdict(
        pass,
        format!(
            "qubit-2s-back min fidelity {:.15} ({} uses); sd-3s-back errors {:?} over 4x{PROTOCOL_TRIALS} ({} uses)",
            q.fidelity.min, q.ledger.channel_uses, sd.errors, sd.ledger.channel_uses
        ),
    ))
}

fn c5_simplified() -> retrocap::Result<Verdict> {
    let target = 0.5 + 0.5 * (1.0 - h2(0.25));
    let scan = simplified_chi_scan(&SimplifiedChannelSpec::default(), 256, 200_000, 5, None)?;
    let eig = &scan.cross_checks[0];
    let exact =
        (scan.eigenstate_chi - target).abs() < 1e-12 && (eig.closed_form - target).abs() < 1e-12;
    let mc_ok = scan.cross_checks.iter().all(|c| c.agrees);
    let finding = scan.finding.as_ref();
    Ok(verdict(
        exact && mc_ok && finding.is_some() && scan.curve.len() == 256,
        format!(
            "eigenstate χ = {:.7} (target {target:.7}); MC {:.6} ± {:.6}; finding: {}",
            scan.eigenstate_chi,
            eig.monte_carlo.mean,
            eig.monte_carlo.stderr,
            finding.map_or("none".to_string(), |f| format!(
                "max {:.6} at t = {:.4}",
                f.max_chi, f.argmax_t
            ))
        ),
    ))
}

fn c6_dephased() -> retrocap::Result<Verdict> {
    let (ppt, min) = retrocap::channels::is_ppt(
        &choi_matrix(&RetroChannelSpec::pauli_discretization(Variant::Dephased))?,
        PPT_TOL,
    )?;
    let bits = run_dephased_c2(BITS, 31)?;
    let opts = RetroMcOptions::default();
    let deph = holevo_retro(&RetroChannelSpec::dephased(2, 2)?, MC_SAMPLES, 43, &opts)?.estimate;
    let std = holevo_retro(&RetroChannelSpec::standard(2, 2)?, MC_SAMPLES, 42, &opts)?.estimate;
    let z = deph.z_score(&std);
    Ok(verdict(
        ppt && min >= -PPT_TOL && bits.errors == 0 && bits.independence_audit.passed() && z <= SIGMAS,
        format!(
            "PPT {ppt} (min eig {min:.2e}); {BITS} bits, {} errors, independence {}/{}; C_H dephased {:.6} vs standard {:.6} (z = {z:.2})",
            bits.errors,
            bits.independence_audit.checked - bits.independence_audit.mismatches,
            bits.independence_audit.checked,
            deph.mean,
            std.mean
        ),
    ))
}

fn c7_erasure() -> retrocap::Result<Verdict> {
    let run = erasure_conversion_mes(ERASURE_TRIALS, 41)?;
    let opt = optimize_flagged_rate_with(
        &SimplifiedChannelSpec::default(),
        GRID_RESOLUTION,
        20_000,
        42,
        None,
    )?;
    let target = 2.0 - 2f64.sqrt();
    let pass = run.misses == 0
        && (run.erasure_fraction - 0.5).abs() <= SIGMAS * run.binomial_stderr
        && (run.q2_lower_bound - 0.5).abs() <= SIGMAS * run.binomial_stderr
        && opt.grid_points >= 10_000
        && (opt.rate - target).abs() <= FLAGGED_TOL
        && opt.simulation.misses == 0
        && opt.simulation.agrees;
    Ok(verdict(
        pass,
        format!(
            "{ERASURE_TRIALS} trials: fraction {:.5} ± {:.5}, misses {}, Q_2 >= {:.5}; flagged optimum {:.9} (2-√2 = {target:.9}) at a = {:.6} over {} grid points; reported Q_2 0.85355 recorded as unverified",
            run.erasure_fraction, run.binomial_stderr, run.misses, run.q2_lower_bound, opt.rate, opt.a, opt.grid_points
        ),
    ))
}

fn c8_trend() -> retrocap::Result<Verdict> {
    let rows = trend_scan(&TREND_DIMS, TREND_SAMPLES, 8, None)?;
    let gaps: Vec<f64> = rows
        .windows(2)
        .map(|w| w[0].estimate.mean - w[1].estimate.mean)
        .collect();
    let sigmas: Vec<f64> = rows
        .windows(2)
        .map(|w| {
            (w[0].estimate.mean - w[1].estimate.mean) / w[0].estimate.joint_stderr(&w[1].estimate)
        })
        .collect();
    let pass = sigmas.iter().all(|&s| s > SIGMAS);
    let series: Vec<String> = rows
        .iter()
        .map(|r| format!("d={} c={} {:.5}", r.d, r.c, r.estimate.mean))
        .collect();
    Ok(verdict(
        pass,
        format!(
            "{}; gaps in joint σ {:.1?} (abs {:.4?})",
            series.join(", "),
            sigmas,
            gaps
        ),
    ))
}

fn c9_ladder() -> retrocap::Result<Verdict> {
    let id = identity_qubit_report()?;
    let cbit = classical_bit_report()?;
    let r22 = r22_report(&ReportConfig {
        samples: MC_SAMPLES,
        trials: PROTOCOL_TRIALS,
        seed: 9,
        workers: None,
    })?;
    let value =
        |r: &retrocap::CapacityReport, k, t| r.get(k, t).map(|e| e.value).unwrap_or(f64::NAN);
    let ce = value(&id, CapacityKind::CE, EntryTag::Computed);
    let qe = value(&id, CapacityKind::QE, EntryTag::Computed);
    let id_ok = (ce - 2.0).abs() <= LADDER_TOL && (qe - ce / 2.0).abs() <= LADDER_TOL;
    let classical = [
        value(&cbit, CapacityKind::CH, EntryTag::Computed),
        value(&cbit, CapacityKind::C2, EntryTag::ProtocolLowerBound),
        value(&cbit, CapacityKind::CE, EntryTag::Computed),
    ];
    let quantum = [CapacityKind::Q, CapacityKind::QB, CapacityKind::Q2]
        .map(|k| value(&cbit, k, EntryTag::Computed));
    let cbit_ok = classical.iter().all(|v| (v - 1.0).abs() <= LADDER_TOL)
        && quantum.iter().all(|v| v.abs() <= LADDER_TOL);
    let sep = separation_sigmas(&r22, CapacityKind::Q2, CapacityKind::CH).unwrap_or(f64::NAN);
    let out = check_ladder(&[id, cbit, r22], &TolerancePolicy::default());
    Ok(verdict(
        id_ok && cbit_ok && sep > SIGMAS && out.violations.is_empty(),
        format!(
            "qubit C_E = {ce:.6}, Q_E = {qe:.6}; bit C_H/C_2/C_E = {classical:.6?}, Q/Q_B/Q_2 = {quantum:?}; \
             R22 Q_2 >= 1 exceeds C_H by {sep:.0}σ; {} ladder checks, {} violations",
            out.checks.len(),
            out.violations.len()
        ),
    ))
}

fn c10_determinism() -> retrocap::Result<Verdict> {
    let json = |v: &dyn erased::Ser| v.json();
    let spec = RetroChannelSpec::standard(2, 2)?;
    let mc = |w| {
        holevo_retro(
            &spec,
            50_000,
            3,
            &RetroMcOptions {
                workers: w,
                ..Default::default()
            },
        )
    };
    let popts = |w| ProtocolOptions {
        workers: w,
        ..Default::default()
    };
    let dopts = |w| DephasedOptions {
        workers: w,
        ..Default::default()
    };
    let small = |w| ReportConfig {
        samples: 20_000,
        trials: 200,
        seed: 3,
        workers: Some(w),
    };
    let mut checked = 0;
    let mut same = 0;
    for (a, b) in [
        (json(&mc(Some(1))?), json(&mc(Some(4))?)),
        (json(&mc(None)?), json(&mc(Some(2))?)),
        (json(&mc(None)?), json(&mc(None)?)),
        (json(&r22_report(&small(1))?), json(&r22_report(&small(4))?)),
        (
            json(&retrocap::protocols::run_fig2_with(
                &spec,
                300,
                3,
                &popts(Some(1)),
            )?),
            json(&retrocap::protocols::run_fig2_with(
                &spec,
                300,
                3,
                &popts(Some(3)),
            )?),
        ),
        (
            json(&run_dephased_c2_with(
                &RetroChannelSpec::dephased(2, 2)?,
                300,
                3,
                &dopts(Some(1)),
            )?),
            json(&run_dephased_c2_with(
                &RetroChannelSpec::dephased(2, 2)?,
                300,
                3,
                &dopts(Some(4)),
            )?),
        ),
        (
            json(&trend_scan(&[2, 4], 2000, 3, Some(1))?),
            json(&trend_scan(&[2, 4], 2000, 3, Some(4))?),
        ),
    ] {
        checked += 1;
        same += usize::from(a == b);
    }
    Ok(verdict(
        checked == same,
        format!("{same}/{checked} stochastic outputs byte-identical across worker counts"),
    ))
}

mod erased {
    pub trait Ser {
        fn json(&self) -> String;
    }

    impl<T: serde::Serialize> Ser for T {
        fn json(&self) -> String {
            serde_json::to_string(self).expect("serializable")
        }
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("C_H of R_{2,2}", c1_holevo),
        ("coherent information of R_{2,2}", c2_coherent),
        ("echo protocols d = 2, 3, 5", c3_echo_protocols),
        ("composed protocols", c4_compositions),
        ("simplified channel χ", c5_simplified),
        ("dephased variant", c6_dephased),
        ("erasure conversion", c7_erasure),
        ("trend scan", c8_trend),
        ("capacity ladder", c9_ladder),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let v = f().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        failed += usize::from(!v.pass);
        println!(
            "[{}] {:>2}. {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            k + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
