//! Task-level questions over a [`Problem`]: consistency, must-check (turn
//! the card), obligation reports, model finding and entailment.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::alc::translate_problem;
use crate::formula::{nnf, AtomId, Formula, ModalityId};
use crate::hypertableau::{model_check, solve, Config, Outcome, Refutation, ResourceLimit, Solution, Stats};
use crate::kripke::{oracle_eval, KripkeModel};
use crate::problem::{Engine, Problem, Query, QueryKind};
use crate::tableau::{
    build_tableau, cheat_detect_under, check_fragment, literals_satisfiable, Branch, BoxedLiteral,
    CheatReport, CheatVerdict, SignedLiteral, TableauError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Inconsistent,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Inconsistent => "inconsistent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub model: KripkeModel,
    /// Valuation of the observed world.
    pub observed: BTreeSet<AtomId>,
    /// Boxed literals of the problem that hold at the observed world.
    pub obligations: BTreeSet<BoxedLiteral>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Cheat { report: CheatReport },
    Refutation { refutation: Refutation, stats: Stats },
    Model { report: ModelReport, stats: Stats },
    /// An open serial branch of the tableau.
    Branch { branch: Branch },
    /// The tableau has no open serial branch.
    ClosedTableau { branches: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub query: Query,
    pub engine: Engine,
    pub answer: Answer,
    pub evidence: Vec<Evidence>,
    pub unverifiable: BTreeSet<BoxedLiteral>,
}

impl Verdict {
    fn new(query: Query, engine: Engine, answer: Answer) -> Self {
        Verdict {
            query,
            engine,
            answer,
            evidence: Vec::new(),
            unverifiable: BTreeSet::new(),
        }
    }

    pub fn cheat_report(&self) -> Option<&CheatReport> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Cheat { report } => Some(report),
            _ => None,
        })
    }

    pub fn model_report(&self) -> Option<&ModelReport> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Model { report, .. } => Some(report),
            _ => None,
        })
    }

    pub fn refutation(&self) -> Option<&Refutation> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Refutation { refutation, .. } => Some(refutation),
            _ => None,
        })
    }

    pub fn minimal_sets(&self) -> &[BTreeSet<BoxedLiteral>] {
        self.cheat_report().map_or(&[], |r| r.minimal_sets.as_slice())
    }

    /// Every hypertableau run behind this verdict respected the blocking
    /// bound.
    pub fn within_bound(&self) -> bool {
        self.evidence.iter().all(|e| match e {
            Evidence::Refutation { stats, .. } | Evidence::Model { stats, .. } => stats.within_bound(),
            _ => true,
        })
    }

    /// Peak individuals over every hypertableau run behind this verdict.
    pub fn peak_individuals(&self) -> usize {
        self.evidence
            .iter()
            .filter_map(|e| match e {
                Evidence::Refutation { stats, .. } | Evidence::Model { stats, .. } => {
                    Some(stats.peak_individuals)
                }
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(#[from] ResourceLimit),
    #[error("outside the tableau fragment: {0}")]
    Fragment(#[from] TableauError),
    #[error("obligation must be a literal or a disjunction of literals: {0}")]
    ObligationShape(String),
    #[error("engines disagree: tableau says {tableau}, hypertableau says {hypertableau}")]
    Disagreement { tableau: Answer, hypertableau: Answer },
    #[error("extracted model fails the model check: {0}")]
    ModelCheck(String),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

struct HyperRun {
    solution: Solution,
}

impl HyperRun {
    fn is_sat(&self) -> bool {
        self.solution.is_sat()
    }

    fn evidence(self, p: &Problem, extra: &[Formula]) -> Evidence {
        let stats = self.solution.stats;
        match self.solution.outcome {
            Outcome::Sat { model } => Evidence::Model {
                report: model_report(p, extra, model),
                stats,
            },
            Outcome::Unsat { refutation } => Evidence::Refutation { refutation, stats },
        }
    }
}

fn hyper(p: &Problem, extra: &[Formula], cfg: &Config) -> Result<HyperRun> {
    let kb = translate_problem(p, extra).clausify();
    let solution = solve(&kb, cfg)?;
    if let Some(model) = solution.model() {
        model_check(&kb, model).map_err(AnalysisError::ModelCheck)?;
    }
    Ok(HyperRun { solution })
}

/// Cheat report of `B ∪ N ∪ extra`, successors constrained by the
/// partition axioms.
fn tableau_report(p: &Problem, extra: &[Formula]) -> Result<CheatReport> {
    let mut input = p.all_formulas();
    for f in extra {
        check_fragment(f)?;
        input.push(f.clone());
    }
    let t = build_tableau(&input)?;
    Ok(cheat_detect_under(&t.branches, &p.partition_axioms()))
}

fn tableau_consistent(r: &CheatReport) -> bool {
    r.verdict != CheatVerdict::Inconsistent
}

fn boxed_literals(f: &Formula, out: &mut BTreeSet<BoxedLiteral>) {
    match f {
        Formula::Box(m, body) => {
            if let Some(l) = SignedLiteral::from_formula(body) {
                out.insert(BoxedLiteral::new(m.clone(), l));
            } else {
                boxed_literals(body, out);
            }
        }
        Formula::Diamond(_, a) | Formula::Not(a) => boxed_literals(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            boxed_literals(a, out);
            boxed_literals(b, out);
        }
        Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
    }
}

fn model_report(p: &Problem, extra: &[Formula], model: KripkeModel) -> ModelReport {
    let mut candidates = BTreeSet::new();
    for f in p.all_formulas().iter().chain(extra) {
        boxed_literals(f, &mut candidates);
    }
    let obligations = candidates
        .into_iter()
        .filter(|b| oracle_eval(&model, 0, &b.to_formula()))
        .collect();
    ModelReport {
        observed: model.worlds[0].atoms.clone(),
        obligations,
        model,
    }
}

fn agree(tableau: Answer, hypertableau: Answer) -> Result<()> {
    if tableau == hypertableau {
        Ok(())
    } else {
        Err(AnalysisError::Disagreement {
            tableau,
            hypertableau,
        })
    }
}

/// Yes iff `B ∪ N` has a KD model.
pub fn check_consistency(p: &Problem, engine: Engine, cfg: &Config) -> Result<Verdict> {
    let query = Query {
        kind: QueryKind::Consistency,
        engine: Some(engine),
    };
    let mut evidence = Vec::new();
    let mut answer = None;
    if engine.uses_hypertableau() {
        let run = hyper(p, &[], cfg)?;
        answer = Some(if run.is_sat() { Answer::Yes } else { Answer::No });
        evidence.push(run.evidence(p, &[]));
    }
    if engine.uses_tableau() {
        let report = tableau_report(p, &[])?;
        let a = if tableau_consistent(&report) { Answer::Yes } else { Answer::No };
        if let Some(h) = answer {
            agree(a, h)?;
        }
        answer = Some(a);
        evidence.push(match report.branches.first() {
            Some(b) => Evidence::Branch { branch: b.clone() },
            None => Evidence::ClosedTableau {
                branches: report.non_serial,
            },
        });
    }
    let mut v = Verdict::new(query, engine, answer.expect("some engine ran"));
    v.evidence = evidence;
    Ok(v)
}

fn clause_literals(obligation: &Formula) -> Result<Vec<SignedLiteral>> {
    fn walk(f: &Formula, out: &mut Vec<SignedLiteral>) -> bool {
        match f {
            Formula::Or(a, b) => walk(a, out) && walk(b, out),
            other => match SignedLiteral::from_formula(other) {
                Some(l) => {
                    out.push(l);
                    true
                }
                None => false,
            },
        }
    }
    let mut out = Vec::new();
    if walk(obligation, &mut out) {
        Ok(out)
    } else {
        Err(AnalysisError::ObligationShape(obligation.pretty().to_string()))
    }
}

/// Whether the obligation set `boxed` forces `clause` at every successor.
fn forces(boxed: &BTreeSet<BoxedLiteral>, m: &ModalityId, clause: &[SignedLiteral], axioms: &[Formula]) -> bool {
    let mut lits: Vec<SignedLiteral> = boxed
        .iter()
        .filter(|b| b.modality == *m)
        .map(|b| b.literal.clone())
        .collect();
    lits.extend(clause.iter().map(SignedLiteral::complement));
    !literals_satisfiable(&lits, axioms)
}

/// Yes iff `B ∪ N` is consistent and entails `□_m obligation`.
pub fn must_check(
    p: &Problem,
    obligation: &Formula,
    m: &ModalityId,
    engine: Engine,
    cfg: &Config,
) -> Result<Verdict> {
    let clause = clause_literals(obligation)?;
    let query = Query {
        kind: QueryKind::MustCheck {
            obligation: obligation.clone(),
            modality: m.clone(),
        },
        engine: Some(engine),
    };
    let mut evidence = Vec::new();
    let mut answer = None;
    if engine.uses_hypertableau() {
        let base = hyper(p, &[], cfg)?;
        if !base.is_sat() {
            answer = Some(Answer::Inconsistent);
            evidence.push(base.evidence(p, &[]));
        } else {
            let negated = [Formula::not(Formula::boxed(m.clone(), obligation.clone()))];
            let run = hyper(p, &negated, cfg)?;
            answer = Some(if run.is_sat() { Answer::No } else { Answer::Yes });
            evidence.push(run.evidence(p, &negated));
        }
    }
    if engine.uses_tableau() {
        let report = tableau_report(p, &[])?;
        let axioms = p.partition_axioms();
        let a = if !tableau_consistent(&report) {
            Answer::Inconsistent
        } else if report.minimal_sets.iter().all(|s| forces(s, m, &clause, &axioms)) {
            Answer::Yes
        } else {
            Answer::No
        };
        if let Some(h) = answer {
            agree(a, h)?;
        }
        answer = Some(a);
        evidence.push(Evidence::Cheat { report });
    }
    let mut v = Verdict::new(query, engine, answer.expect("some engine ran"));
    v.evidence = evidence;
    Ok(v)
}

/// Tableau cheat detection; Yes when something has to be checked. With
/// [`Engine::Both`] the inconsistency answer is confirmed by the
/// hypertableau.
pub fn obligations(p: &Problem, engine: Engine, cfg: &Config) -> Result<Verdict> {
    let query = Query {
        kind: QueryKind::Obligations,
        engine: Some(engine),
    };
    let report = tableau_report(p, &[])?;
    let answer = match report.verdict {
        CheatVerdict::NoCheckNeeded => Answer::No,
        CheatVerdict::MustCheck(_) => Answer::Yes,
        CheatVerdict::Inconsistent => Answer::Inconsistent,
    };
    let mut v = Verdict::new(query, engine, answer);
    if engine == Engine::Both {
        let run = hyper(p, &[], cfg)?;
        let t = if answer == Answer::Inconsistent { Answer::No } else { Answer::Yes };
        agree(t, if run.is_sat() { Answer::Yes } else { Answer::No })?;
        v.evidence.push(run.evidence(p, &[]));
    }
    v.evidence.insert(0, Evidence::Cheat { report });
    Ok(v)
}

/// The background alone entails neither `L` nor its complement.
fn undecided(background: &Problem, b: &BoxedLiteral, cfg: &Config) -> Result<bool> {
    for l in [b.literal.clone(), b.literal.complement()] {
        let negated = [l.complement().to_formula()];
        if !hyper(background, &negated, cfg)?.is_sat() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A model of `B ∪ N ∪ {goal}` reported at the observed world, with the
/// obligations the background cannot decide.
pub fn find_model(p: &Problem, goal: Option<&Formula>, engine: Engine, cfg: &Config) -> Result<Verdict> {
    let query = Query {
        kind: QueryKind::FindModel {
            goal: goal.cloned(),
        },
        engine: Some(engine),
    };
    let extra: Vec<Formula> = goal.into_iter().cloned().collect();
    let mut evidence = Vec::new();
    let mut answer = None;
    let mut unverifiable = BTreeSet::new();
    if engine.uses_hypertableau() {
        let run = hyper(p, &extra, cfg)?;
        answer = Some(if run.is_sat() { Answer::Yes } else { Answer::No });
        let ev = run.evidence(p, &extra);
        if let Evidence::Model { report, .. } = &ev {
            let background = p.background_only();
            for b in &report.obligations {
                if undecided(&background, b, cfg)? {
                    unverifiable.insert(b.clone());
                }
            }
        }
        evidence.push(ev);
    }
    if engine.uses_tableau() {
        let report = tableau_report(p, &extra)?;
        let a = if tableau_consistent(&report) { Answer::Yes } else { Answer::No };
        if let Some(h) = answer {
            agree(a, h)?;
        }
        answer = Some(a);
        evidence.push(Evidence::Cheat { report });
    }
    let mut v = Verdict::new(query, engine, answer.expect("some engine ran"));
    v.evidence = evidence;
    v.unverifiable = unverifiable;
    Ok(v)
}

/// Yes iff `B ∪ N` is consistent and entails `goal` at the observed world.
pub fn entails(p: &Problem, goal: &Formula, engine: Engine, cfg: &Config) -> Result<Verdict> {
    let query = Query {
        kind: QueryKind::Entails { goal: goal.clone() },
        engine: Some(engine),
    };
    let negated = [nnf(&Formula::not(goal.clone()))];
    let mut evidence = Vec::new();
    let mut answer = None;
    if engine.uses_hypertableau() {
        let base = hyper(p, &[], cfg)?;
        if !base.is_sat() {
            answer = Some(Answer::Inconsistent);
            evidence.push(base.evidence(p, &[]));
        } else {
            let run = hyper(p, &negated, cfg)?;
            answer = Some(if run.is_sat() { Answer::No } else { Answer::Yes });
            evidence.push(run.evidence(p, &negated));
        }
    }
    if engine.uses_tableau() {
        let base = tableau_report(p, &[])?;
        let a = if !tableau_consistent(&base) {
            Answer::Inconsistent
        } else if tableau_consistent(&tableau_report(p, &negated)?) {
            Answer::No
        } else {
            Answer::Yes
        };
        if let Some(h) = answer {
            agree(a, h)?;
        }
        answer = Some(a);
        evidence.push(Evidence::Cheat { report: base });
    }
    let mut v = Verdict::new(query, engine, answer.expect("some engine ran"));
    v.evidence = evidence;
    Ok(v)
}

/// Runs `q`, with `engine` overriding the query's own engine.
pub fn run_query(p: &Problem, q: &Query, engine: Option<Engine>, cfg: &Config) -> Result<Verdict> {
    let engine = engine.unwrap_or_else(|| q.engine());
    match &q.kind {
        QueryKind::Consistency => check_consistency(p, engine, cfg),
        QueryKind::MustCheck {
            obligation,
            modality,
        } => must_check(p, obligation, modality, engine, cfg),
        QueryKind::Obligations => obligations(p, engine, cfg),
        QueryKind::FindModel { goal } => find_model(p, goal.as_ref(), engine, cfg),
        QueryKind::Entails { goal } => entails(p, goal, engine, cfg),
    }
}
