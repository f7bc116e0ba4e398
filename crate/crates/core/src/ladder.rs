//! The double hierarchy of assisted capacities as data, and numeric checks
//! of its inequalities against capacity reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::report::{CapacityKind, CapacityReport, EntryTag, ReportEntry};

use CapacityKind::{C, C2, CB, CE, Q, Q2, QB, QE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationStatus {
    /// `first ≤ second`, equal for some channels.
    SaturableInequality,
    /// `first < second` unless both vanish.
    StrictInequality,
    /// Either side may be larger.
    Incomparable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    VerifiedNumerically,
    ProtocolWitnessed,
    RecordedOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    /// For inequalities, `first` is the lower side.
    pub first: CapacityKind,
    pub second: CapacityKind,
    pub status: RelationStatus,
    pub note: char,
    /// Channels with `first = second`.
    pub equality: Vec<String>,
    /// Channels with `first < second`.
    pub first_smaller: Vec<String>,
    /// Channels with `first > second` (incomparabilities only).
    pub first_larger: Vec<String>,
    /// `second = factor · first` when a fixed law holds.
    pub factor: Option<f64>,
    pub check: CheckStatus,
    pub assumption: Option<String>,
}

impl Relation {
    fn new(first: CapacityKind, second: CapacityKind, status: RelationStatus, note: char) -> Self {
        Relation {
            first,
            second,
            status,
            note,
            equality: Vec::new(),
            first_smaller: Vec::new(),
            first_larger: Vec::new(),
            factor: None,
            check: CheckStatus::RecordedOnly,
            assumption: None,
        }
    }

    fn equal(mut self, w: &[&str]) -> Self {
        self.equality = w.iter().map(|s| s.to_string()).collect();
        self
    }

    fn smaller(mut self, w: &[&str]) -> Self {
        self.first_smaller = w.iter().map(|s| s.to_string()).collect();
        self
    }

    fn larger(mut self, w: &[&str]) -> Self {
        self.first_larger = w.iter().map(|s| s.to_string()).collect();
        self
    }

    fn check(mut self, c: CheckStatus) -> Self {
        self.check = c;
        self
    }

    fn assuming(mut self, a: &str) -> Self {
        self.assumption = Some(a.to_string());
        self
    }

    pub fn is_inequality(&self) -> bool {
        self.status != RelationStatus::Incomparable
    }

    pub fn witness_count(&self) -> usize {
        self.equality.len() + self.first_smaller.len() + self.first_larger.len()
    }
}

pub const CBIT: &str = "classical bit";
pub const QUBIT: &str = "identity qubit";
pub const R22: &str = "R_{2,2}";
pub const DEPHASED: &str = "dephased R_{2,2}";

const ADDITIVITY: &str = "additivity of C_H (C = C_H)";

/// Every relation drawn in the diagram, notes a through l.
pub fn build_ladder() -> Vec<Relation> {
    use CheckStatus::*;
    use RelationStatus::*;
    vec![
        Relation::new(C2, CE, SaturableInequality, 'a')
            .equal(&[CBIT])
            .smaller(&[QUBIT])
            .check(VerifiedNumerically),
        Relation::new(CB, C2, SaturableInequality, 'b')
            .equal(&[CBIT])
            .smaller(&[DEPHASED])
            .check(ProtocolWitnessed),
        Relation::new(C, CB, SaturableInequality, 'c')
            .equal(&[CBIT])
            .smaller(&[R22])
            .check(ProtocolWitnessed)
            .assuming(ADDITIVITY),
        Relation::new(Q, QB, SaturableInequality, 'd')
            .equal(&[QUBIT])
            .smaller(&["high-dimensional retrocorrectable"])
            .check(RecordedOnly)
            .assuming(ADDITIVITY),
        Relation::new(QB, Q2, SaturableInequality, 'e')
            .equal(&[QUBIT])
            .smaller(&[R22])
            .check(RecordedOnly)
            .assuming("separation conjectured; would follow from note k"),
        Relation::new(Q2, QE, SaturableInequality, 'f')
            .equal(&[QUBIT])
            .smaller(&["strongly depolarizing"])
            .check(RecordedOnly)
            .assuming("Q_2 = 0 for the strongly depolarizing channel is not checked"),
        Relation {
            factor: Some(2.0),
            ..Relation::new(QE, CE, StrictInequality, 'g')
                .equal(&["zero-capacity channels"])
                .smaller(&[QUBIT, CBIT])
                .check(VerifiedNumerically)
        },
        Relation::new(Q, C, SaturableInequality, 'h')
            .equal(&[QUBIT])
            .smaller(&[CBIT])
            .check(VerifiedNumerically),
        Relation::new(QB, CB, SaturableInequality, 'h')
            .equal(&[QUBIT])
            .smaller(&[CBIT])
            .check(VerifiedNumerically),
        Relation::new(Q2, C2, SaturableInequality, 'h')
            .equal(&[QUBIT])
            .smaller(&[CBIT])
            .check(VerifiedNumerically),
        Relation::new(C2, QE, Incomparable, 'i')
            .smaller(&["2/3 depolarizing"])
            .larger(&[CBIT])
            .check(RecordedOnly)
            .assuming("C_2 = C_H for the 2/3 depolarizing channel"),
        Relation::new(C, QE, Incomparable, 'j')
            .smaller(&[R22])
            .larger(&[CBIT])
            .check(ProtocolWitnessed)
            .assuming(ADDITIVITY),
        Relation::new(CB, Q2, Incomparable, 'k')
            .smaller(&[R22])
            .larger(&[CBIT])
            .check(RecordedOnly)
            .assuming("C_B < Q_2 for R_{2,2} is conjectured; no upper bound on C_B"),
        Relation::new(C, QB, Incomparable, 'l')
            .smaller(&["high-dimensional retrocorrectable"])
            .larger(&[CBIT])
            .check(RecordedOnly)
            .assuming(ADDITIVITY),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Slack in joint standard errors when either side is Monte Carlo.
    pub sigmas: f64,
    /// Absolute slack between exact values.
    pub exact: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            sigmas: 3.0,
            exact: 1e-9,
        }
    }
}

/// What a report says about one ladder capacity.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Bound {
    value: f64,
    stderr: f64,
}

#[derive(Default)]
struct Knowledge {
    exact: BTreeMap<CapacityKind, Bound>,
    /// Best lower bound, possibly inherited from a lower rung.
    lower: BTreeMap<CapacityKind, Bound>,
}

fn bound_of(e: &ReportEntry) -> Bound {
    Bound {
        value: e.value,
        stderr: e.stderr.unwrap_or(0.0),
    }
}

fn knowledge(report: &CapacityReport) -> Knowledge {
    let mut k = Knowledge::default();
    for e in &report.entries {
        let kind = e.kind.ladder_kind();
        let b = bound_of(e);
        match e.tag {
            EntryTag::PaperReportedUnverified => continue,
            EntryTag::Computed if e.is_exact_capacity() => {
                k.exact.insert(kind, b);
            }
            _ => {}
        }
        let slot = k.lower.entry(kind).or_insert(b);
        if b.value > slot.value {
            *slot = b;
        }
    }
    // propagate lower bounds up the inequalities until stable
    let ladder = build_ladder();
    loop {
        let mut changed = false;
        for r in ladder.iter().filter(|r| r.is_inequality()) {
            if let Some(&b) = k.lower.get(&r.first) {
                let slot = k.lower.entry(r.second).or_insert(Bound {
                    value: f64::NEG_INFINITY,
                    stderr: 0.0,
                });
                if b.value > slot.value {
                    *slot = b;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    k
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderCheck {
    pub channel: String,
    pub note: char,
    pub first: CapacityKind,
    pub second: CapacityKind,
    pub description: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LadderOutcome {
    pub checks: Vec<LadderCheck>,
    pub violations: Vec<LadderCheck>,
}

fn slack(a: Bound, b: Bound, policy: &TolerancePolicy) -> f64 {
    if a.stderr > 0.0 || b.stderr > 0.0 {
        policy.sigmas * a.stderr.hypot(b.stderr)
    } else {
        policy.exact
    }
}

/// Checks every inequality that a report pins down: a lower bound on the
/// smaller side against an exact value of the larger side, and the factor
/// law when both sides are exact. Reports are checked independently.
pub fn check_ladder(reports: &[CapacityReport], policy: &TolerancePolicy) -> LadderOutcome {
    let ladder = build_ladder();
    let mut checks = Vec::new();
    for report in reports {
        let k = knowledge(report);
        for r in ladder.iter().filter(|r| r.is_inequality()) {
            let Some(&upper) = k.exact.get(&r.second) else {
                continue;
            };
            if let Some(&lower) = k.lower.get(&r.first) {
                let s = slack(lower, upper, policy);
                checks.push(LadderCheck {
                    channel: report.channel.clone(),
                    note: r.note,
                    first: r.first,
                    second: r.second,
                    description: format!("{} <= {}", r.first, r.second),
                    lhs: lower.value,
                    rhs: upper.value,
                    slack: s,
                    passed: lower.value <= upper.value + s,
                });
            }
            if let (Some(factor), Some(&first)) = (r.factor, k.exact.get(&r.first)) {
                let s = slack(first, upper, policy);
                checks.push(LadderCheck {
                    channel: report.channel.clone(),
                    note: r.note,
                    first: r.first,
                    second: r.second,
                    description: format!("{} = {} * {}", r.second, factor, r.first),
                    lhs: factor * first.value,
                    rhs: upper.value,
                    slack: s,
                    passed: (factor * first.value - upper.value).abs() <= s,
                });
            }
        }
    }
    let violations = checks.iter().filter(|c| !c.passed).cloned().collect();
    LadderOutcome { checks, violations }
}

/// Margin in joint standard errors by which a lower bound on `high` exceeds
/// an estimate of `low` within one report; `None` when either is missing.
pub fn separation_sigmas(
    report: &CapacityReport,
    high: CapacityKind,
    low: CapacityKind,
) -> Option<f64> {
    let h = report
        .entries_of(high)
        .filter(|e| e.tag != EntryTag::PaperReportedUnverified)
        .max_by(|a, b| a.value.total_cmp(&b.value))?;
    let l = report
        .entries_of(low)
        .find(|e| e.tag == EntryTag::Computed)?;
    let joint = h.stderr.unwrap_or(0.0).hypot(l.stderr.unwrap_or(0.0));
    let diff = h.value - l.value;
    Some(if joint == 0.0 {
        if diff > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        diff / joint
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn every_relation_has_a_witness() {
        let ladder = build_ladder();
        assert_eq!(ladder.len(), 14);
        for r in &ladder {
            assert!(r.witness_count() > 0, "{r:?}");
            if r.status == RelationStatus::StrictInequality {
                assert_eq!(r.equality, ["zero-capacity channels"]);
            }
            if !r.is_inequality() {
                assert!(!r.first_smaller.is_empty() && !r.first_larger.is_empty());
            }
        }
        let notes: std::collections::BTreeSet<char> = ladder.iter().map(|r| r.note).collect();
        assert_eq!(notes.into_iter().collect::<String>(), "abcdefghijkl");
    }

    #[test]
    fn named_relations() {
        let ladder = build_ladder();
        let find = |a, b| {
            ladder
                .iter()
                .find(|r| r.first == a && r.second == b)
                .unwrap()
        };
        let g = find(QE, CE);
        assert_eq!(
            (g.status, g.note, g.factor),
            (RelationStatus::StrictInequality, 'g', Some(2.0))
        );
        assert_eq!(find(CB, C2).first_smaller, [DEPHASED]);
        let k = find(CB, Q2);
        assert_eq!(k.status, RelationStatus::Incomparable);
        assert_eq!(k.first_larger, [CBIT]);
        assert_eq!(k.check, CheckStatus::RecordedOnly);
    }

    #[test]
    fn ladder_round_trips() {
        let ladder = build_ladder();
        let json = serde_json::to_string(&ladder).unwrap();
        assert_eq!(
            serde_json::from_str::<Vec<Relation>>(&json).unwrap(),
            ladder
        );
    }

    fn entry(kind: CapacityKind, value: f64, tag: EntryTag) -> ReportEntry {
        ReportEntry::exact(kind, value, tag, "")
    }

    #[test]
    fn detects_a_violation() {
        let mut r = CapacityReport::new("bad");
        r.push(entry(C2, 1.5, EntryTag::ProtocolLowerBound));
        r.push(entry(CE, 1.0, EntryTag::Computed));
        let out = check_ladder(&[r], &TolerancePolicy::default());
        assert_eq!(out.violations.len(), 1);
        assert_eq!(out.violations[0].note, 'a');
    }

    #[test]
    fn lower_bounds_propagate_upwards() {
        let mut r = CapacityReport::new("x");
        r.push(entry(Q, 1.2, EntryTag::ProtocolLowerBound));
        r.push(entry(CE, 1.0, EntryTag::Computed));
        // Q ≤ C ≤ C_B ≤ C_2 ≤ C_E
        let out = check_ladder(&[r], &TolerancePolicy::default());
        assert!(out.violations.iter().any(|c| c.second == CE));
    }

    #[test]
    fn unverified_entries_are_ignored() {
        let mut r = CapacityReport::new("x");
        r.push(entry(Q2, 5.0, EntryTag::PaperReportedUnverified));
        r.push(entry(QE, 1.0, EntryTag::Computed));
        assert!(check_ladder(&[r], &TolerancePolicy::default())
            .checks
            .is_empty());
    }

    #[test]
    fn factor_law() {
        let mut r = CapacityReport::new("x");
        r.push(entry(CE, 2.0, EntryTag::Computed));
        r.push(entry(QE, 1.0, EntryTag::Computed));
        let out = check_ladder(&[r.clone()], &TolerancePolicy::default());
        assert!(out
            .checks
            .iter()
            .any(|c| c.description.contains('*') && c.passed));
        r.entries[1].value = 0.9;
        assert!(!check_ladder(&[r], &TolerancePolicy::default())
            .violations
            .is_empty());
    }

    fn arb_report() -> impl Strategy<Value = CapacityReport> {
        let kinds = prop::sample::select(CapacityKind::LADDER.to_vec());
        let tags = prop::sample::select(vec![EntryTag::Computed, EntryTag::ProtocolLowerBound]);
        prop::collection::vec(
            (kinds, 0.0..3.0f64, tags, prop::option::of(0.0..0.1f64)),
            0..8,
        )
        .prop_map(|es| {
            let mut r = CapacityReport::new("random");
            for (k, v, t, s) in es {
                let mut e = entry(k, v, t);
                e.stderr = s;
                r.push(e);
            }
            r
        })
    }

    proptest! {
        #[test]
        fn adding_reports_keeps_verdicts(a in prop::collection::vec(arb_report(), 0..4), b in arb_report()) {
            let policy = TolerancePolicy::default();
            let before = check_ladder(&a, &policy);
            let mut more = a.clone();
            more.push(b);
            let after = check_ladder(&more, &policy);
            prop_assert!(after.checks.len() >= before.checks.len());
            prop_assert_eq!(&after.checks[..before.checks.len()], &before.checks[..]);
        }
    }
}
