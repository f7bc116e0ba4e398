use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use retrocap::channels::{
    choi_matrix, choi_of, is_ppt, reference, BasisEnsemble, Choi, RetroChannelSpec,
    UnitaryEnsemble, Variant,
};
use retrocap::estimators::{
    coherent_info_retro, holevo_retro, simplified_chi_scan, trend_csv, trend_scan, McRun,
    RetroMcOptions,
};
use retrocap::ladder::{build_ladder, check_ladder, TolerancePolicy};
use retrocap::protocols::{self, DephasedOptions, ProtocolOptions};
use retrocap::report::{self, CapacityReport, ReportConfig, SCHEMA_VERSION};
use retrocap::{Error, SimplifiedChannelSpec};

#[derive(Parser)]
#[command(
    name = "retrocap",
    version,
    about = "Retrocorrectable channel capacities and protocols"
)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Add wall_time_ms to the output (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    /// Write to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Standard,
    Dephased,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Dephased => Variant::Dephased,
        }
    }
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// csv emits the convergence trace (batch_index, batch_mean).
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProtocolName {
    Fig2,
    Fig3,
    Fig4,
    #[value(name = "qubit-2s-back")]
    Qubit2sBack,
    #[value(name = "sd-3s-back")]
    Sd3sBack,
    #[value(name = "dephased-c2")]
    DephasedC2,
    #[value(name = "erasure-mes")]
    ErasureMes,
    #[value(name = "flagged-opt")]
    FlaggedOpt,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    #[arg(long, value_enum)]
    name: ProtocolName,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Trials; per message for sd-3s-back, simulation trials for flagged-opt.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Grid points per axis for flagged-opt.
    #[arg(long, default_value_t = 100)]
    resolution: usize,
    /// Leading trial traces to include.
    #[arg(long, default_value_t = 1)]
    keep_traces: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChoiChannel {
    #[value(name = "standard-retro")]
    StandardRetro,
    #[value(name = "dephased-retro")]
    DephasedRetro,
    #[value(name = "identity-qubit")]
    IdentityQubit,
    #[value(name = "classical-bit")]
    ClassicalBit,
    Depolarizing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BasesArg {
    #[value(name = "ZX")]
    Zx,
    Haar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UnitariesArg {
    Pauli,
    Haar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckArg {
    Ppt,
}

#[derive(Args, Debug)]
struct ChoiArgs {
    #[arg(long, value_enum)]
    channel: ChoiChannel,
    #[arg(long, value_enum, default_value = "ZX")]
    bases: BasesArg,
    #[arg(long, value_enum, default_value = "pauli")]
    unitaries: UnitariesArg,
    #[arg(long, value_enum, default_value = "ppt")]
    check: CheckArg,
    /// Depolarizing probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
}

#[derive(Args, Debug)]
struct TrendArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, default_value_t = 256)]
    resolution: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// csv emits the curve (t, chi).
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportChannel {
    R22,
    Dephased,
    Simplified,
    #[value(name = "identity-qubit")]
    IdentityQubit,
    #[value(name = "classical-bit")]
    ClassicalBit,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long, value_enum)]
    channel: ReportChannel,
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct LadderArgs {
    /// Capacity report files; none prints the ladder alone.
    #[arg(long, num_args = 0..)]
    reports: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo Holevo quantity of R_{c,d}.
    Holevo(EstimateArgs),
    /// Monte Carlo coherent information of R_{c,d}.
    Coherent(EstimateArgs),
    /// Run a two-party protocol.
    Protocol(ProtocolArgs),
    /// Choi state analysis.
    Choi(ChoiArgs),
    /// Holevo estimates along c = d·ceil(log2 d)^3, as CSV.
    Trend(TrendArgs),
    /// Holevo quantity of the simplified channel over control states.
    Scan(ScanArgs),
    /// Capacity report for one channel.
    Report(ReportArgs),
    /// Capacity ladder and checks against reports.
    Ladder(LadderArgs),
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::Shape(_)
            | Error::Size { .. }
            | Error::UnsupportedRepresentation(_) => Failure::Usage(e.to_string()),
            Error::ProtocolFailure { reason, trace } => Failure::Invariant(format!(
                "protocol failure: {reason}\n{}",
                serde_json::to_string_pretty(&trace).unwrap_or_default()
            )),
            e => Failure::Invariant(e.to_string()),
        }
    }
}

type Outcome = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
    /// Written, but the command found a violated invariant.
    Violation(Value),
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

fn header(quantity: &str, channel: &str, params: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("quantity".into(), json!(quantity));
    m.insert("channel".into(), json!(channel));
    m.insert("params".into(), params);
    m
}

fn convergence_csv(run: &McRun) -> String {
    let mut s = String::from("batch_index,batch_mean\n");
    for (k, m) in run.batch_means.iter().enumerate() {
        s.push_str(&format!("{k},{m}\n"));
    }
    s
}

fn estimate(args: &EstimateArgs, coherent: bool, workers: Option<usize>) -> Outcome {
    let spec = RetroChannelSpec::new(
        args.c,
        args.d,
        args.variant.into(),
        BasisEnsemble::Haar,
        UnitaryEnsemble::Haar,
    )?;
    let opts = RetroMcOptions {
        workers,
        ..Default::default()
    };
    let (quantity, run) = if coherent {
        (
            "I_c",
            coherent_info_retro(&spec, args.samples, args.seed, &opts)?,
        )
    } else {
        ("C_H", holevo_retro(&spec, args.samples, args.seed, &opts)?)
    };
    if let Format::Csv = args.format {
        return Ok(Output::Text(convergence_csv(&run)));
    }
    let variant = match args.variant {
        VariantArg::Standard => "standard",
        VariantArg::Dephased => "dephased",
    };
    let mut m = header(
        quantity,
        &format!("R_{{{},{}}}", args.c, args.d),
        json!({"c": args.c, "d": args.d, "variant": variant, "samples": args.samples, "seed": args.seed}),
    );
    m.insert("estimate".into(), json!(run.estimate.mean));
    m.insert("stderr".into(), json!(run.estimate.stderr));
    m.insert("samples".into(), json!(run.estimate.samples));
    m.insert("seed".into(), json!(run.estimate.seed));
    m.insert("batches".into(), json!(run.batch_means.len()));
    Ok(Output::Json(Value::Object(m)))
}

fn protocol(args: &ProtocolArgs, workers: Option<usize>) -> Outcome {
    let opts = ProtocolOptions {
        workers,
        keep_traces: args.keep_traces,
        ..Default::default()
    };
    let params = json!({
        "name": value_name(args.name),
        "d": args.d,
        "trials": args.trials,
        "seed": args.seed,
        "resolution": args.resolution,
        "keep_traces": args.keep_traces,
    });
    let standard = || RetroChannelSpec::standard(args.d, args.d);
    let mut m;
    let mut ok = true;
    match args.name {
        ProtocolName::Fig2
        | ProtocolName::Fig3
        | ProtocolName::Fig4
        | ProtocolName::Qubit2sBack => {
            let spec = standard()?;
            let run = match args.name {
                ProtocolName::Fig2 => {
                    protocols::run_fig2_with(&spec, args.trials, args.seed, &opts)?
                }
                ProtocolName::Fig3 => {
                    protocols::run_fig3_with(&spec, args.trials, args.seed, &opts)?
                }
                ProtocolName::Fig4 => {
                    protocols::run_fig4_with(&spec, args.trials, args.seed, &opts)?
                }
                _ => protocols::compose_qubit_2s_back_with(&spec, args.trials, args.seed, &opts)?,
            };
            m = header(&run.protocol, &format!("R_{{{},{}}}", run.c, run.d), params);
            m.insert("fidelity".into(), json!(run.fidelity));
            m.insert("trials".into(), json!(run.trials));
            m.insert("seed".into(), json!(run.seed));
            m.insert("ledger".into(), json!(run.ledger));
            m.insert("audit".into(), json!({"echo": run.echo_audit}));
            m.insert("traces".into(), json!(run.traces));
            ok &= run.echo_audit.passed();
        }
        ProtocolName::Sd3sBack => {
            let run = protocols::compose_2cbits_3s_back_with(
                &standard_2()?,
                args.trials,
                args.seed,
                &opts,
            )?;
            m = header(&run.protocol, "R_{2,2}", params);
            m.insert("errors".into(), json!(run.errors));
            m.insert("bit_error_rate".into(), json!(run.bit_error_rate()));
            m.insert("trials".into(), json!(4 * run.trials_per_message));
            m.insert("seed".into(), json!(run.seed));
            m.insert("ledger".into(), json!(run.ledger));
            m.insert("audit".into(), json!({"echo": run.echo_audit}));
            m.insert("traces".into(), json!(run.traces));
            ok &= run.total_errors() == 0 && run.echo_audit.passed();
        }
        ProtocolName::DephasedC2 => {
            let spec = RetroChannelSpec::dephased(2, 2)?;
            let dopts = DephasedOptions {
                workers,
                keep_traces: args.keep_traces,
                withhold_outcome: false,
            };
            let run = protocols::run_dephased_c2_with(&spec, args.trials, args.seed, &dopts)?;
            m = header(&run.protocol, "dephased R_{2,2}", params);
            m.insert("errors".into(), json!(run.errors));
            m.insert("bit_error_rate".into(), json!(run.bit_error_rate));
            m.insert("trials".into(), json!(run.trials));
            m.insert("seed".into(), json!(run.seed));
            m.insert("ledger".into(), json!(run.ledger));
            m.insert(
                "audit".into(),
                json!({"echo": run.echo_audit, "independence": run.independence_audit}),
            );
            m.insert("traces".into(), json!(run.traces));
            ok &= run.errors == 0 && run.independence_audit.passed();
        }
        ProtocolName::ErasureMes => {
            let spec = SimplifiedChannelSpec::default();
            let run = protocols::erasure_conversion_mes_with(&spec, args.trials, args.seed, &opts)?;
            m = header(&run.protocol, "simplified", params);
            m.insert("erasure_fraction".into(), json!(run.erasure_fraction));
            m.insert("stderr".into(), json!(run.binomial_stderr));
            m.insert("misses".into(), json!(run.misses));
            m.insert("rate".into(), json!(run.q2_lower_bound));
            m.insert("trials".into(), json!(run.trials));
            m.insert("seed".into(), json!(run.seed));
            m.insert("ledger".into(), json!(run.ledger));
            m.insert("audit".into(), json!({"echo": run.echo_audit}));
            m.insert("traces".into(), json!(run.traces));
            ok &= run.misses == 0;
        }
        ProtocolName::FlaggedOpt => {
            let spec = SimplifiedChannelSpec::default();
            let opt = protocols::erasure::optimize_flagged_rate_with(
                &spec,
                args.resolution,
                args.trials,
                args.seed,
                workers,
            )?;
            m = header("flagged-opt", "simplified", params);
            m.insert("rate".into(), json!(opt.rate));
            m.insert("a".into(), json!(opt.a));
            m.insert("alpha".into(), json!(opt.alpha));
            m.insert("grid_points".into(), json!(opt.grid_points));
            m.insert("grid_best".into(), json!(opt.grid_best));
            m.insert("simulation".into(), json!(opt.simulation));
            m.insert("trials".into(), json!(opt.simulation.trials));
            m.insert("seed".into(), json!(args.seed));
            ok &= opt.simulation.misses == 0 && opt.simulation.agrees;
        }
    }
    let v = Value::Object(m);
    Ok(if ok {
        Output::Json(v)
    } else {
        Output::Violation(v)
    })
}

fn standard_2() -> retrocap::Result<RetroChannelSpec> {
    RetroChannelSpec::standard(2, 2)
}

fn choi(args: &ChoiArgs) -> Outcome {
    let retro = |variant| -> Result<Choi, Failure> {
        if matches!(args.bases, BasesArg::Haar) || matches!(args.unitaries, UnitariesArg::Haar) {
            return Err(Failure::Usage(
                "Choi analysis needs finite ensembles: use --bases ZX --unitaries pauli".into(),
            ));
        }
        Ok(choi_matrix(&RetroChannelSpec::pauli_discretization(
            variant,
        ))?)
    };
    let (name, c) = match args.channel {
        ChoiChannel::StandardRetro => ("standard-retro", retro(Variant::Standard)?),
        ChoiChannel::DephasedRetro => ("dephased-retro", retro(Variant::Dephased)?),
        ChoiChannel::IdentityQubit => ("identity-qubit", choi_of(&reference::identity_qudit(2))?),
        ChoiChannel::ClassicalBit => ("classical-bit", choi_of(&reference::classical_bit())?),
        ChoiChannel::Depolarizing => ("depolarizing", choi_of(&reference::depolarizing(args.p)?)?),
    };
    let CheckArg::Ppt = args.check;
    let (ppt, min) = is_ppt(&c, report::PPT_TOL)?;
    let mut m = header(
        "choi",
        name,
        json!({
            "channel": name,
            "bases": value_name(args.bases),
            "unitaries": value_name(args.unitaries),
            "p": args.p,
        }),
    );
    m.insert("input_dim".into(), json!(c.input_dim));
    m.insert("output_dim".into(), json!(c.output_dim));
    m.insert("ppt".into(), json!(ppt));
    m.insert("min_eig".into(), json!(min));
    m.insert("tolerance".into(), json!(report::PPT_TOL));
    Ok(Output::Json(Value::Object(m)))
}

fn trend(args: &TrendArgs, workers: Option<usize>) -> Outcome {
    let rows = trend_scan(&args.dims, args.samples, args.seed, workers)?;
    Ok(Output::Text(trend_csv(&rows)))
}

fn scan(args: &ScanArgs, workers: Option<usize>) -> Outcome {
    let s = simplified_chi_scan(
        &SimplifiedChannelSpec::default(),
        args.resolution,
        args.samples,
        args.seed,
        workers,
    )?;
    if let Format::Csv = args.format {
        let mut out = String::from("t,chi\n");
        for p in &s.curve {
            out.push_str(&format!("{},{}\n", p.t, p.chi));
        }
        return Ok(Output::Text(out));
    }
    let mut m = header(
        "chi-scan",
        "simplified",
        json!({"resolution": args.resolution, "samples": args.samples, "seed": args.seed}),
    );
    m.insert("eigenstate_chi".into(), json!(s.eigenstate_chi));
    m.insert("max_chi".into(), json!(s.max_chi));
    m.insert("argmax_t".into(), json!(s.argmax_t));
    m.insert("cross_checks".into(), json!(s.cross_checks));
    m.insert("finding".into(), json!(s.finding));
    m.insert("curve".into(), json!(s.curve));
    let ok = s.cross_checks.iter().all(|c| c.agrees);
    let v = Value::Object(m);
    Ok(if ok {
        Output::Json(v)
    } else {
        Output::Violation(v)
    })
}

fn capacity_report(args: &ReportArgs, workers: Option<usize>) -> Outcome {
    let cfg = ReportConfig {
        samples: args.samples,
        trials: args.trials,
        seed: args.seed,
        workers,
    };
    let r = match args.channel {
        ReportChannel::R22 => report::r22_report(&cfg)?,
        ReportChannel::Dephased => report::dephased_report(&cfg)?,
        ReportChannel::Simplified => report::simplified_report(&cfg)?,
        ReportChannel::IdentityQubit => report::identity_qubit_report()?,
        ReportChannel::ClassicalBit => report::classical_bit_report()?,
    };
    let mut v = serde_json::to_value(&r).map_err(|e| Failure::Invariant(e.to_string()))?;
    v["params"] = json!({"samples": args.samples, "trials": args.trials, "seed": args.seed});
    Ok(Output::Json(v))
}

fn ladder(args: &LadderArgs) -> Outcome {
    let mut reports = Vec::new();
    for path in &args.reports {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let r: CapacityReport = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        if r.schema_version > SCHEMA_VERSION {
            return Err(Failure::Usage(format!(
                "{}: schema_version {} is newer than {SCHEMA_VERSION}",
                path.display(),
                r.schema_version
            )));
        }
        reports.push(r);
    }
    let out = check_ladder(&reports, &TolerancePolicy::default());
    let mut m = header(
        "ladder",
        "",
        json!({"reports": args.reports.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()}),
    );
    m.insert("ladder".into(), json!(build_ladder()));
    m.insert("checks".into(), json!(out.checks));
    m.insert("violations".into(), json!(out.violations));
    let v = Value::Object(m);
    Ok(if out.violations.is_empty() {
        Output::Json(v)
    } else {
        Output::Violation(v)
    })
}

fn run(cli: &Cli) -> Outcome {
    let w = cli.workers;
    if w == Some(0) {
        return Err(Failure::Usage("--workers must be positive".into()));
    }
    match &cli.command {
        Command::Holevo(a) => estimate(a, false, w),
        Command::Coherent(a) => estimate(a, true, w),
        Command::Protocol(a) => protocol(a, w),
        Command::Choi(a) => choi(a),
        Command::Trend(a) => trend(a, w),
        Command::Scan(a) => scan(a, w),
        Command::Report(a) => capacity_report(a, w),
        Command::Ladder(a) => ladder(a),
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let finish = |mut v: Value| {
        if cli.timing {
            if let Value::Object(m) = &mut v {
                m.insert("wall_time_ms".into(), json!(elapsed));
            }
        }
        serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n"
    };
    let (text, code) = match result {
        Ok(Output::Json(v)) => (finish(v), 0),
        Ok(Output::Violation(v)) => (finish(v), 2),
        Ok(Output::Text(t)) => (t, 0),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(Failure::Usage(msg) | Failure::Invariant(msg)) = emit(&text, cli.output.as_ref()) {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    if code == 2 {
        eprintln!("error: invariant violated, see output");
    }
    ExitCode::from(code)
}
