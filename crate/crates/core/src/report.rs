//! Text and JSON renderings of verdicts.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::analysis::{Answer, Evidence, Verdict};
use crate::formula::Formula;
use crate::problem::QueryKind;
use crate::tableau::{BoxedLiteral, CheatVerdict};

fn set_text(set: &BTreeSet<BoxedLiteral>) -> String {
    let items: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn boxed(f: &Formula, m: &crate::formula::ModalityId) -> String {
    Formula::boxed(m.clone(), f.clone()).pretty().to_string()
}

/// One-line description of the question.
pub fn query_text(v: &Verdict) -> String {
    let kind = &v.query.kind;
    let arg = match kind {
        QueryKind::MustCheck {
            obligation,
            modality,
        } => format!(" {}", boxed(obligation, modality)),
        QueryKind::FindModel { goal: Some(g) } | QueryKind::Entails { goal: g } => {
            format!(" {}", g.pretty())
        }
        _ => String::new(),
    };
    format!("{}{arg} [engine={}]", kind.keyword(), v.engine)
}

fn headline(v: &Verdict) -> String {
    match (&v.query.kind, v.answer) {
        (_, Answer::Inconsistent) => "the problem is inconsistent".into(),
        (QueryKind::Consistency, Answer::Yes) => "consistent".into(),
        (QueryKind::Consistency, Answer::No) => "inconsistent".into(),
        (QueryKind::MustCheck { obligation, modality }, Answer::Yes) => format!(
            "must check: adding ¬{} makes the problem unsatisfiable",
            boxed(obligation, modality)
        ),
        (QueryKind::MustCheck { obligation, modality }, Answer::No) => format!(
            "no check needed: {} is not entailed",
            boxed(obligation, modality)
        ),
        (QueryKind::Obligations, _) => match v.cheat_report().map(|r| &r.verdict) {
            Some(CheatVerdict::MustCheck(common)) if common.is_empty() => {
                "must check: choose one set to verify".into()
            }
            Some(CheatVerdict::MustCheck(common)) => format!("must check: {}", set_text(common)),
            _ => "no check needed".into(),
        },
        (QueryKind::FindModel { .. }, Answer::Yes) => "model found".into(),
        (QueryKind::FindModel { .. }, Answer::No) => "no model".into(),
        (QueryKind::Entails { .. }, Answer::Yes) => "entailed".into(),
        (QueryKind::Entails { .. }, Answer::No) => "not entailed".into(),
    }
}

/// Human-readable report; ends with a newline.
pub fn render_text(v: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "query: {}", query_text(v));
    let _ = writeln!(out, "answer: {} ({})", v.answer, headline(v));
    for e in &v.evidence {
        match e {
            Evidence::Cheat { report } => {
                if matches!(v.query.kind, QueryKind::Obligations) {
                    for (i, b) in report.branches.iter().enumerate() {
                        let _ = writeln!(out, "branch B{}: {b}", i + 1);
                    }
                    for s in &report.minimal_sets {
                        let _ = writeln!(out, "minimal set: {}", set_text(s));
                    }
                    if report.non_serial > 0 {
                        let _ = writeln!(out, "non-serial open branches dropped: {}", report.non_serial);
                    }
                    if !report.permitted.is_empty() {
                        let p: Vec<String> = report.permitted.iter().map(|b| format!("◇{}", b.literal)).collect();
                        let _ = writeln!(out, "permissions (not used for the verdict): {}", p.join(", "));
                    }
                } else {
                    let _ = writeln!(
                        out,
                        "tableau: {} open serial branch(es), {} minimal set(s)",
                        report.branches.len(),
                        report.minimal_sets.len()
                    );
                }
            }
            Evidence::Refutation { refutation, stats } => {
                let _ = writeln!(
                    out,
                    "refutation: {} closed branch(es), {} step(s), {} branch node(s)",
                    refutation.closed,
                    refutation.steps.len(),
                    stats.branch_nodes
                );
                for s in &refutation.steps {
                    let _ = writeln!(out, "  {s}");
                }
            }
            Evidence::Model { report, .. } => {
                let atoms: Vec<&str> = report.observed.iter().map(|a| a.as_str()).collect();
                let _ = writeln!(out, "observed world: {{{}}}", atoms.join(", "));
                if !report.obligations.is_empty() {
                    let _ = writeln!(out, "obligations: {}", set_text(&report.obligations));
                }
                let _ = writeln!(out, "model:");
                for line in report.model.to_string().lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
            Evidence::Branch { branch } => {
                let _ = writeln!(out, "open branch: {branch}");
            }
            Evidence::ClosedTableau { .. } => {
                let _ = writeln!(out, "tableau: no open serial branch");
            }
        }
    }
    if !v.unverifiable.is_empty() {
        let _ = writeln!(out, "unverifiable: {}", set_text(&v.unverifiable));
    }
    out
}

fn strings(set: &BTreeSet<BoxedLiteral>) -> Vec<String> {
    set.iter().map(ToString::to_string).collect()
}

/// Structured report with the stable fields `answer`, `minimal_sets`,
/// `model` and `unverifiable`.
pub fn to_json(v: &Verdict) -> Value {
    let model = v.model_report();
    let common = match v.cheat_report().map(|r| &r.verdict) {
        Some(CheatVerdict::MustCheck(c)) => Some(strings(c)),
        _ => None,
    };
    json!({
        "query": query_text(v),
        "engine": v.engine,
        "answer": v.answer,
        "must_check": common,
        "minimal_sets": v.minimal_sets().iter().map(strings).collect::<Vec<_>>(),
        "model": model.map(|m| &m.model),
        "observed": model.map(|m| m.observed.iter().map(|a| a.as_str()).collect::<Vec<_>>()),
        "obligations": model.map(|m| strings(&m.obligations)),
        "unverifiable": strings(&v.unverifiable),
        "refutation": v.refutation().map(|r| r.steps.iter().map(ToString::to_string).collect::<Vec<_>>()),
    })
}

pub fn render_json(v: &Verdict) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(v)).expect("plain data");
    s.push('\n');
    s
}
