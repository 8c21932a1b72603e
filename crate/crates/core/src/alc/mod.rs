//! Translation of modal formulae into ALC concepts, TBox assembly, and
//! structural clausification into DL-clauses.

mod clausify;
mod concept;

use std::fmt::Write as _;

use serde::Serialize;

use crate::formula::{Formula, ModalityId};
use crate::problem::{Origin, Problem};

pub use clausify::{clausify, BodyAtom, ClausalKB, DLClause, HeadAtom, Term};
pub use concept::{phi, Concept, Role};

/// `left ⊑ right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TBoxAxiom {
    pub left: Concept,
    pub right: Concept,
}

impl TBoxAxiom {
    pub fn seriality(m: &ModalityId) -> Self {
        TBoxAxiom {
            left: Concept::Top,
            right: Concept::exists(Role::of(m), Concept::Top),
        }
    }
}

impl std::fmt::Display for TBoxAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ⊑ {}", self.left, self.right)
    }
}

fn seriality_source(m: &ModalityId) -> String {
    let b = Formula::boxed(m.clone(), Formula::atom("Φ"));
    let d = Formula::diamond(m.clone(), Formula::atom("Φ"));
    format!("{} → {}", b.pretty(), d.pretty())
}

/// One seriality axiom per modality, then the partition axioms when they
/// are kept in the TBox.
pub fn build_tbox(p: &Problem) -> Vec<TBoxAxiom> {
    tbox_rows(p).into_iter().map(|(_, ax)| ax).collect()
}

fn tbox_rows(p: &Problem) -> Vec<(String, TBoxAxiom)> {
    let mut rows: Vec<(String, TBoxAxiom)> = p
        .modalities
        .iter()
        .map(|m| (seriality_source(m), TBoxAxiom::seriality(m)))
        .collect();
    if p.options.tbox_constraints {
        for part in &p.partitions {
            for ax in part.axioms() {
                rows.push((
                    ax.pretty().to_string(),
                    TBoxAxiom {
                        left: Concept::Top,
                        right: phi(&ax),
                    },
                ));
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Observation,
    Background,
    /// A partition axiom required at every successor world.
    Successor,
    Norm,
    /// Added by a query, e.g. a negated obligation.
    Query,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub source: String,
    pub concept: Concept,
    pub kind: RowKind,
}

/// The concepts asserted at the observed world together with the TBox.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Translation {
    pub rows: Vec<Row>,
    pub tbox: Vec<(String, TBoxAxiom)>,
}

impl Translation {
    pub fn concepts(&self) -> Vec<Concept> {
        self.rows.iter().map(|r| r.concept.clone()).collect()
    }

    pub fn tbox_axioms(&self) -> Vec<TBoxAxiom> {
        self.tbox.iter().map(|(_, a)| a.clone()).collect()
    }

    pub fn clausify(&self) -> ClausalKB {
        clausify(&self.concepts(), &self.tbox_axioms())
    }

    /// Two columns, deontic source and ALC, one line per row.
    pub fn listing(&self) -> String {
        let lines: Vec<(String, String)> = self
            .rows
            .iter()
            .map(|r| (r.source.clone(), r.concept.to_string()))
            .chain(self.tbox.iter().map(|(s, a)| (s.clone(), a.to_string())))
            .collect();
        let width = lines.iter().map(|(s, _)| s.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (s, c) in lines {
            let pad = width - s.chars().count();
            let _ = writeln!(out, "{s}{:pad$}  |  {c}", "");
        }
        out
    }
}

/// φ of the observations, the other background formulae, the partition
/// axioms under every modality (unless they live in the TBox), the norms,
/// and then `extra`, in that order.
pub fn translate_problem(p: &Problem, extra: &[Formula]) -> Translation {
    let mut rows = Vec::new();
    let tbox_constraints = p.options.tbox_constraints;
    let row = |f: &Formula, kind| Row {
        source: f.pretty().to_string(),
        concept: phi(f),
        kind,
    };
    for b in p.background.iter().filter(|b| b.origin == Origin::Observation) {
        rows.push(row(&b.formula, RowKind::Observation));
    }
    for b in p.background.iter().filter(|b| b.origin != Origin::Observation) {
        if tbox_constraints && b.origin == Origin::Partition {
            continue;
        }
        rows.push(row(&b.formula, RowKind::Background));
    }
    if !tbox_constraints {
        for m in &p.modalities {
            for part in &p.partitions {
                for ax in part.axioms() {
                    rows.push(Row {
                        source: Formula::boxed(m.clone(), ax.clone()).pretty().to_string(),
                        concept: Concept::forall(Role::of(m), phi(&ax)),
                        kind: RowKind::Successor,
                    });
                }
            }
        }
    }
    for n in &p.norms {
        rows.push(row(&n.formula, RowKind::Norm));
    }
    for f in extra {
        rows.push(row(f, RowKind::Query));
    }
    Translation {
        rows,
        tbox: tbox_rows(p),
    }
}
