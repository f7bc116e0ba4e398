//! Per-channel capacity reports, the exchange format consumed by the ladder.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::{
    choi_matrix, choi_of, is_ppt, reference, RetroChannelSpec, SimplifiedChannelSpec,
};
use crate::error::Result;
use crate::estimators::{
    coherent_info_retro, holevo_chi, holevo_retro, maximize_ea, simplified_chi_scan, AscentConfig,
    Ensemble, Estimate, RetroMcOptions,
};
use crate::protocols::{
    compose_2cbits_3s_back, compose_qubit_2s_back_with, erasure_conversion_mes_with,
    optimize_flagged_rate, run_dephased_c2_with, run_fig2_with, run_fig4_with, DephasedOptions,
    ProtocolOptions,
};

pub const SCHEMA_VERSION: u32 = 1;

/// PPT tolerance used when a report certifies zero quantum capacity.
pub const PPT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CapacityKind {
    C,
    #[serde(rename = "C_H")]
    CH,
    #[serde(rename = "C_B")]
    CB,
    #[serde(rename = "C_2")]
    C2,
    #[serde(rename = "C_E")]
    CE,
    Q,
    #[serde(rename = "I_c")]
    Ic,
    #[serde(rename = "Q_B")]
    QB,
    #[serde(rename = "Q_2")]
    Q2,
    #[serde(rename = "Q_E")]
    QE,
}

impl CapacityKind {
    pub const LADDER: [CapacityKind; 8] = [
        CapacityKind::C,
        CapacityKind::CB,
        CapacityKind::C2,
        CapacityKind::CE,
        CapacityKind::Q,
        CapacityKind::QB,
        CapacityKind::Q2,
        CapacityKind::QE,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CapacityKind::C => "C",
            CapacityKind::CH => "C_H",
            CapacityKind::CB => "C_B",
            CapacityKind::C2 => "C_2",
            CapacityKind::CE => "C_E",
            CapacityKind::Q => "Q",
            CapacityKind::Ic => "I_c",
            CapacityKind::QB => "Q_B",
            CapacityKind::Q2 => "Q_2",
            CapacityKind::QE => "Q_E",
        }
    }

    /// The ladder capacity an entry of this kind speaks about. One-shot
    /// quantities bound their regularized capacity from below.
    pub fn ladder_kind(self) -> CapacityKind {
        match self {
            CapacityKind::CH => CapacityKind::C,
            CapacityKind::Ic => CapacityKind::Q,
            k => k,
        }
    }
}

impl fmt::Display for CapacityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryTag {
    Computed,
    ProtocolLowerBound,
    PaperReportedUnverified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub kind: CapacityKind,
    pub value: f64,
    /// Absent for exact values.
    pub stderr: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tag: EntryTag,
    pub note: String,
}

impl ReportEntry {
    pub fn exact(kind: CapacityKind, value: f64, tag: EntryTag, note: impl Into<String>) -> Self {
        ReportEntry {
            kind,
            value,
            stderr: None,
            samples: None,
            seed: None,
            tag,
            note: note.into(),
        }
    }

    pub fn estimate(kind: CapacityKind, e: &Estimate, note: impl Into<String>) -> Self {
        ReportEntry {
            kind,
            value: e.mean,
            stderr: Some(e.stderr),
            samples: Some(e.samples),
            seed: Some(e.seed),
            tag: EntryTag::Computed,
            note: note.into(),
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.stderr.is_some()
    }

    /// True when the value is the capacity itself rather than a bound.
    pub fn is_exact_capacity(&self) -> bool {
        self.tag == EntryTag::Computed && self.kind.ladder_kind() == self.kind
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub schema_version: u32,
    pub channel: String,
    pub entries: Vec<ReportEntry>,
}

impl CapacityReport {
    pub fn new(channel: impl Into<String>) -> Self {
        CapacityReport {
            schema_version: SCHEMA_VERSION,
            channel: channel.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, e: ReportEntry) {
        self.entries.push(e);
    }

    pub fn entries_of(&self, kind: CapacityKind) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(move |e| e.kind == kind)
    }

    pub fn get(&self, kind: CapacityKind, tag: EntryTag) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.kind == kind && e.tag == tag)
    }
}

/// Sizes used by the report builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub samples: usize,
    pub trials: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            samples: 200_000,
            trials: 1000,
            seed: 1,
            workers: None,
        }
    }
}

fn mc_opts(cfg: &ReportConfig) -> RetroMcOptions {
    RetroMcOptions {
        workers: cfg.workers,
        ..Default::default()
    }
}

fn proto_opts(cfg: &ReportConfig) -> ProtocolOptions {
    ProtocolOptions {
        workers: cfg.workers,
        keep_traces: 0,
        ..Default::default()
    }
}

/// Haar `R_{2,2}`: Monte Carlo one-shot quantities plus echo-protocol rates.
pub fn r22_report(cfg: &ReportConfig) -> Result<CapacityReport> {
    let spec = RetroChannelSpec::standard(2, 2)?;
    let mut r = CapacityReport::new("R_{2,2}");
    let ch = holevo_retro(&spec, cfg.samples, cfg.seed, &mc_opts(cfg))?.estimate;
    r.push(ReportEntry::estimate(
        CapacityKind::CH,
        &ch,
        "uniform ensemble over the data basis",
    ));
    let ic = coherent_info_retro(&spec, cfg.samples, cfg.seed, &mc_opts(cfg))?.estimate;
    r.push(ReportEntry::estimate(
        CapacityKind::Ic,
        &ic,
        "maximally mixed data input",
    ));

    let opts = proto_opts(cfg);
    let fig2 = run_fig2_with(&spec, cfg.trials, cfg.seed, &opts)?;
    r.push(ReportEntry::exact(
        CapacityKind::Q2,
        1.0,
        EntryTag::ProtocolLowerBound,
        format!(
            "fig2, {} trials, min fidelity {:.12}",
            cfg.trials, fig2.fidelity.min
        ),
    ));
    let fig4 = run_fig4_with(&spec, cfg.trials, cfg.seed, &opts)?;
    r.push(ReportEntry::exact(
        CapacityKind::QE,
        1.0,
        EntryTag::ProtocolLowerBound,
        format!(
            "fig4, {} trials, min fidelity {:.12}",
            cfg.trials, fig4.fidelity.min
        ),
    ));
    let composed = compose_qubit_2s_back_with(&spec, cfg.trials, cfg.seed, &opts)?;
    r.push(ReportEntry::exact(
        CapacityKind::QB,
        0.5,
        EntryTag::ProtocolLowerBound,
        format!(
            "qubit-2s-back, {} uses per qubit, back messages only",
            composed.ledger.channel_uses
        ),
    ));
    let sd = compose_2cbits_3s_back(cfg.trials, cfg.seed)?;
    r.push(ReportEntry::exact(
        CapacityKind::CB,
        2.0 / 3.0,
        EntryTag::ProtocolLowerBound,
        format!(
            "sd-3s-back, {} symbol errors over {} messages",
            sd.total_errors(),
            4 * cfg.trials
        ),
    ));
    Ok(r)
}

/// Dephased `R_{2,2}`: Holevo estimate and the one-bit two-way protocol.
pub fn dephased_report(cfg: &ReportConfig) -> Result<CapacityReport> {
    let spec = RetroChannelSpec::dephased(2, 2)?;
    let mut r = CapacityReport::new("dephased R_{2,2}");
    let ch = holevo_retro(&spec, cfg.samples, cfg.seed, &mc_opts(cfg))?.estimate;
    r.push(ReportEntry::estimate(
        CapacityKind::CH,
        &ch,
        "uniform ensemble over the data basis",
    ));
    let run = run_dephased_c2_with(
        &spec,
        cfg.trials,
        cfg.seed,
        &DephasedOptions {
            workers: cfg.workers,
            keep_traces: 0,
            withhold_outcome: false,
        },
    )?;
    r.push(ReportEntry::exact(
        CapacityKind::C2,
        1.0,
        EntryTag::ProtocolLowerBound,
        format!(
            "dephased-c2, {} bits, {} errors, independence audit {}/{}",
            cfg.trials,
            run.errors,
            run.independence_audit.checked - run.independence_audit.mismatches,
            run.independence_audit.checked
        ),
    ));
    if let Ok((true, min)) = choi_matrix(&RetroChannelSpec::pauli_discretization(
        crate::channels::Variant::Dephased,
    ))
    .and_then(|c| is_ppt(&c, PPT_TOL))
    {
        r.push(ReportEntry::exact(
            CapacityKind::Q2,
            0.0,
            EntryTag::Computed,
            format!("discretized Choi is PPT (min eigenvalue {min:.3e})"),
        ));
    }
    Ok(r)
}

/// Simplified channel: χ scan, erasure conversion, and the externally reported, unverified
/// two-way quantum capacity.
pub fn simplified_report(cfg: &ReportConfig) -> Result<CapacityReport> {
    let spec = SimplifiedChannelSpec::default();
    let mut r = CapacityReport::new("simplified");
    let scan = simplified_chi_scan(&spec, 256, cfg.samples.max(1000), cfg.seed, cfg.workers)?;
    r.push(ReportEntry::exact(
        CapacityKind::CH,
        scan.eigenstate_chi,
        EntryTag::Computed,
        "closed form at the basis eigenstate",
    ));
    r.push(ReportEntry::exact(
        CapacityKind::CH,
        scan.max_chi,
        EntryTag::Computed,
        format!("closed-form scan maximum at t = {:.6}", scan.argmax_t),
    ));
    let mes = erasure_conversion_mes_with(&spec, cfg.trials.max(1000), cfg.seed, &proto_opts(cfg))?;
    r.push(ReportEntry::exact(
        CapacityKind::Q2,
        mes.q2_lower_bound,
        EntryTag::ProtocolLowerBound,
        format!("erasure-mes, {} trials, {} misses", mes.trials, mes.misses),
    ));
    let opt = optimize_flagged_rate(100, cfg.seed)?;
    r.push(ReportEntry::exact(
        CapacityKind::Q2,
        opt.rate,
        EntryTag::ProtocolLowerBound,
        format!(
            "flagged-opt, a = {:.8}, alpha = {:.8}, zero-miss",
            opt.a, opt.alpha
        ),
    ));
    r.push(ReportEntry::exact(
        CapacityKind::Q2,
        (std::f64::consts::PI / 8.0).cos().powi(2),
        EntryTag::PaperReportedUnverified,
        "cos^2(pi/8); no protocol given",
    ));
    Ok(r)
}

fn ea_entries(r: &mut CapacityReport, channel: &crate::channels::KrausChannel) -> Result<()> {
    let ea = maximize_ea(channel, &AscentConfig::default())?;
    r.push(ReportEntry::exact(
        CapacityKind::CE,
        ea.value,
        EntryTag::Computed,
        "max input mutual information",
    ));
    r.push(ReportEntry::exact(
        CapacityKind::QE,
        ea.value / 2.0,
        EntryTag::Computed,
        "C_E / 2",
    ));
    Ok(())
}

/// Noiseless qubit.
pub fn identity_qubit_report() -> Result<CapacityReport> {
    let id = reference::identity_qudit(2);
    let mut r = CapacityReport::new("identity qubit");
    let chi = holevo_chi(&id, &Ensemble::computational(2))?;
    r.push(ReportEntry::exact(
        CapacityKind::CH,
        chi,
        EntryTag::Computed,
        "computational ensemble",
    ));
    r.push(ReportEntry::exact(
        CapacityKind::Q,
        1.0,
        EntryTag::Computed,
        "noiseless",
    ));
    ea_entries(&mut r, &id)?;
    Ok(r)
}

/// 100% dephasing qubit.
pub fn classical_bit_report() -> Result<CapacityReport> {
    let cbit = reference::classical_bit();
    let mut r = CapacityReport::new("classical bit");
    let chi = holevo_chi(&cbit, &Ensemble::computational(2))?;
    r.push(ReportEntry::exact(
        CapacityKind::CH,
        chi,
        EntryTag::Computed,
        "computational ensemble",
    ));
    r.push(ReportEntry::exact(
        CapacityKind::C2,
        1.0,
        EntryTag::ProtocolLowerBound,
        "send the bit",
    ));
    ea_entries(&mut r, &cbit)?;
    let (ppt, min) = is_ppt(&choi_of(&cbit)?, PPT_TOL)?;
    if ppt {
        for kind in [CapacityKind::Q, CapacityKind::QB, CapacityKind::Q2] {
            r.push(ReportEntry::exact(
                kind,
                0.0,
                EntryTag::Computed,
                format!("Choi is PPT (min eigenvalue {min:.3e})"),
            ));
        }
    }
    Ok(r)
}
