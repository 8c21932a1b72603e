//! Hypertableau decision procedure for [`ClausalKB`]s.
//!
//! A clause fires on an individual `x` once its whole body matches; a
//! disjunctive head opens one branch per atom. Branches are explored depth
//! first. Existential heads first try `x` itself as the successor and then
//! a fresh individual. Fresh individuals whose label is included in the
//! label of an earlier unblocked individual are blocked and expand no
//! further; the extracted model redirects edges into them to the blocker.

mod check;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::alc::{BodyAtom, ClausalKB, HeadAtom, Role, Term};
use crate::formula::{AtomId, ModalityId};
use crate::kripke::{KripkeModel, World, WorldOrigin};

pub use check::{eval_concept, model_check};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub max_individuals: usize,
    pub max_branches: usize,
    /// Keep the clause firings of every explored branch.
    pub record_trace: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_individuals: 10_000,
            max_branches: 100_000,
            record_trace: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceLimit {
    #[error("more than {0} individuals")]
    Individuals(usize),
    #[error("more than {0} branch nodes")]
    Branches(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub branch_nodes: usize,
    /// Largest number of individuals on any branch.
    pub peak_individuals: usize,
    /// `2^n · |roles| + 1`, see [`individual_bound`].
    pub individual_bound: u64,
}

impl Stats {
    pub fn within_bound(&self) -> bool {
        self.peak_individuals as u64 <= self.individual_bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// Number of choices above this step.
    pub depth: usize,
    pub clause: usize,
    /// Ground body atoms the clause matched.
    pub facts: Vec<String>,
    /// The head atom added, or `⊥`.
    pub result: String,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let indent = "  ".repeat(self.depth);
        if self.facts.is_empty() {
            write!(f, "{indent}[{}] => {}", self.clause, self.result)
        } else {
            write!(f, "{indent}[{}] {} => {}", self.clause, self.facts.join(", "), self.result)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub steps: Vec<TraceStep>,
    /// Closed branches.
    pub closed: usize,
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        write!(f, "{} branch(es), all closed", self.closed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Outcome {
    Sat { model: KripkeModel },
    Unsat { refutation: Refutation },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub outcome: Outcome,
    pub stats: Stats,
}

impl Solution {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat { .. })
    }

    pub fn model(&self) -> Option<&KripkeModel> {
        match &self.outcome {
            Outcome::Sat { model } => Some(model),
            Outcome::Unsat { .. } => None,
        }
    }
}

/// Fixed-width bit set over concept ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Label(Vec<u64>);

impl Label {
    fn new(width: usize) -> Self {
        Label(vec![0; width.div_ceil(64).max(1)])
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) -> bool {
        let fresh = !self.contains(i);
        self.0[i / 64] |= 1 << (i % 64);
        fresh
    }

    fn is_subset(&self, other: &Label) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&i| self.contains(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Head {
    /// Concept at `x` (`None`) or at `y_i` (index into the role list).
    Concept(usize, Option<usize>),
    Exists(usize, Option<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Deterministic,
    Disjunctive,
    Existential,
    /// Only `∃r.⊤` heads; handled last.
    Serial,
}

struct Compiled {
    body: Vec<usize>,
    roles: Vec<usize>,
    head: Vec<Head>,
    kind: Kind,
}

#[derive(Debug, Clone)]
struct Individual {
    label: Label,
    /// succ[role] in creation order.
    succ: Vec<Vec<usize>>,
    parent: Option<usize>,
}

#[derive(Debug, Clone)]
struct Branch {
    inds: Vec<Individual>,
    depth: usize,
    /// The alternative that created this branch, logged when it is popped.
    note: Option<(usize, String)>,
}

enum Choice {
    Concept(usize, usize),
    SelfLoop(usize, usize, Option<usize>),
    Fresh(usize, usize, Option<usize>),
}

enum Saturation {
    Clash,
    Open(Vec<Option<usize>>),
    Branch(Vec<Choice>, String, usize, Vec<String>),
}

struct Solver<'a> {
    kb: &'a ClausalKB,
    cfg: Config,
    names: Vec<String>,
    roles: Vec<Role>,
    clauses: Vec<Compiled>,
    steps: Vec<TraceStep>,
    stats: Stats,
}

impl<'a> Solver<'a> {
    fn new(kb: &'a ClausalKB, cfg: Config) -> Self {
        let names: Vec<String> = kb.concept_names().into_iter().collect();
        let name_id: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let roles: Vec<Role> = kb.roles().into_iter().collect();
        let role_id = |r: &Role| roles.iter().position(|x| x == r).expect("role collected");
        let clauses = kb
            .clauses
            .iter()
            .map(|c| {
                let mut body = Vec::new();
                let mut crole = Vec::new();
                for a in &c.body {
                    match a {
                        BodyAtom::Concept(n) => body.push(name_id[n.as_str()]),
                        BodyAtom::Role(r, _) => crole.push(role_id(r)),
                    }
                }
                let head: Vec<Head> = c
                    .head
                    .iter()
                    .map(|h| match h {
                        HeadAtom::Concept(n, Term::X) => Head::Concept(name_id[n.as_str()], None),
                        HeadAtom::Concept(n, Term::Y(i)) => {
                            Head::Concept(name_id[n.as_str()], Some(i - 1))
                        }
                        HeadAtom::Exists(r, n) => {
                            Head::Exists(role_id(r), n.as_ref().map(|n| name_id[n.as_str()]))
                        }
                    })
                    .collect();
                let kind = if !head.is_empty() && head.iter().all(|h| matches!(h, Head::Exists(_, None))) {
                    Kind::Serial
                } else if head.iter().any(|h| matches!(h, Head::Exists(..))) {
                    Kind::Existential
                } else if head.len() <= 1 {
                    Kind::Deterministic
                } else {
                    Kind::Disjunctive
                };
                Compiled {
                    body,
                    roles: crole,
                    head,
                    kind,
                }
            })
            .collect();
        Solver {
            kb,
            cfg,
            names,
            roles,
            clauses,
            steps: Vec::new(),
            stats: Stats::default(),
        }
    }

    fn individual(&self, i: usize) -> String {
        if i == 0 {
            "a0".into()
        } else {
            format!("n{i}")
        }
    }

    fn record(&mut self, depth: usize, clause: usize, facts: Vec<String>, result: String) {
        if self.cfg.record_trace {
            self.steps.push(TraceStep {
                depth,
                clause,
                facts,
                result,
            });
        }
    }

    fn facts(&self, clause: usize, x: usize, ys: &[usize]) -> Vec<String> {
        let c = &self.clauses[clause];
        let mut out: Vec<String> = c
            .body
            .iter()
            .map(|&n| format!("{}({})", self.names[n], self.individual(x)))
            .collect();
        for (k, &r) in c.roles.iter().enumerate() {
            out.push(format!(
                "{}({},{})",
                self.roles[r],
                self.individual(x),
                self.individual(ys[k])
            ));
        }
        out
    }

    fn head_text(&self, h: Head, x: usize, ys: &[usize]) -> String {
        match h {
            Head::Concept(n, None) => format!("{}({})", self.names[n], self.individual(x)),
            Head::Concept(n, Some(k)) => format!("{}({})", self.names[n], self.individual(ys[k])),
            Head::Exists(r, n) => format!(
                "∃{}.{}({})",
                self.roles[r],
                n.map_or("⊤", |n| self.names[n].as_str()),
                self.individual(x)
            ),
        }
    }

    fn blocking(&self, b: &Branch) -> Vec<Option<usize>> {
        let mut blocked: Vec<Option<usize>> = vec![None; b.inds.len()];
        for w in 1..b.inds.len() {
            blocked[w] = (0..w)
                .find(|&v| blocked[v].is_none() && b.inds[w].label.is_subset(&b.inds[v].label));
        }
        blocked
    }

    fn head_holds(b: &Branch, h: Head, x: usize, ys: &[usize]) -> bool {
        match h {
            Head::Concept(n, None) => b.inds[x].label.contains(n),
            Head::Concept(n, Some(k)) => b.inds[ys[k]].label.contains(n),
            Head::Exists(r, n) => b.inds[x].succ[r]
                .iter()
                .any(|&y| n.is_none_or(|n| b.inds[y].label.contains(n))),
        }
    }

    /// First instance of `clause` at `x` whose head is false.
    fn violated(&self, b: &Branch, clause: usize, x: usize) -> Option<Vec<usize>> {
        let c = &self.clauses[clause];
        if !c.body.iter().all(|&n| b.inds[x].label.contains(n)) {
            return None;
        }
        let lists: Vec<&Vec<usize>> = c.roles.iter().map(|&r| &b.inds[x].succ[r]).collect();
        if lists.iter().any(|l| l.is_empty()) {
            return None;
        }
        let mut idx = vec![0usize; lists.len()];
        loop {
            let ys: Vec<usize> = idx.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
            if !c.head.iter().any(|&h| Self::head_holds(b, h, x, &ys)) {
                return Some(ys);
            }
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < lists[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn saturate(&mut self, b: &mut Branch) -> Saturation {
        // Deterministic clauses everywhere, to a fixpoint.
        let mut changed = true;
        while changed {
            changed = false;
            for ci in 0..self.clauses.len() {
                if self.clauses[ci].kind != Kind::Deterministic {
                    continue;
                }
                for x in 0..b.inds.len() {
                    while let Some(ys) = self.violated(b, ci, x) {
                        let facts = self.facts(ci, x, &ys);
                        match self.clauses[ci].head.first().copied() {
                            None => {
                                self.record(b.depth, ci, facts, "⊥".into());
                                return Saturation::Clash;
                            }
                            Some(h) => {
                                let text = self.head_text(h, x, &ys);
                                self.record(b.depth, ci, facts, text);
                                let (n, target) = match h {
                                    Head::Concept(n, None) => (n, x),
                                    Head::Concept(n, Some(k)) => (n, ys[k]),
                                    Head::Exists(..) => unreachable!(),
                                };
                                b.inds[target].label.insert(n);
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        let blocked = self.blocking(b);
        for kind in [Kind::Disjunctive, Kind::Existential, Kind::Serial] {
            for ci in 0..self.clauses.len() {
                if self.clauses[ci].kind != kind {
                    continue;
                }
                for (x, blocker) in blocked.iter().enumerate() {
                    if blocker.is_some() {
                        continue;
                    }
                    if let Some(ys) = self.violated(b, ci, x) {
                        let mut choices = Vec::new();
                        for &h in &self.clauses[ci].head {
                            match h {
                                Head::Concept(n, None) => choices.push(Choice::Concept(x, n)),
                                Head::Concept(n, Some(k)) => {
                                    choices.push(Choice::Concept(ys[k], n))
                                }
                                Head::Exists(r, n) => {
                                    choices.push(Choice::SelfLoop(x, r, n));
                                    choices.push(Choice::Fresh(x, r, n));
                                }
                            }
                        }
                        let facts = self.facts(ci, x, &ys);
                        let text: Vec<String> = self.clauses[ci]
                            .head
                            .iter()
                            .map(|&h| self.head_text(h, x, &ys))
                            .collect();
                        return Saturation::Branch(choices, text.join(" | "), ci, facts);
                    }
                }
            }
        }
        Saturation::Open(blocked)
    }

    fn apply(&self, b: &mut Branch, choice: &Choice) -> Result<String, ResourceLimit> {
        Ok(match *choice {
            Choice::Concept(i, n) => {
                b.inds[i].label.insert(n);
                format!("{}({})", self.names[n], self.individual(i))
            }
            Choice::SelfLoop(x, r, n) => {
                if !b.inds[x].succ[r].contains(&x) {
                    b.inds[x].succ[r].push(x);
                }
                if let Some(n) = n {
                    b.inds[x].label.insert(n);
                }
                format!("{}({},{}) [self loop]", self.roles[r], self.individual(x), self.individual(x))
            }
            Choice::Fresh(x, r, n) => {
                if b.inds.len() >= self.cfg.max_individuals {
                    return Err(ResourceLimit::Individuals(self.cfg.max_individuals));
                }
                let id = b.inds.len();
                let mut label = Label::new(self.names.len());
                if let Some(n) = n {
                    label.insert(n);
                }
                b.inds.push(Individual {
                    label,
                    succ: vec![Vec::new(); self.roles.len()],
                    parent: Some(x),
                });
                b.inds[x].succ[r].push(id);
                format!("{}({},{}) [fresh]", self.roles[r], self.individual(x), self.individual(id))
            }
        })
    }

    fn run(&mut self) -> Result<Outcome, ResourceLimit> {
        let mut root = Individual {
            label: Label::new(self.names.len()),
            succ: vec![Vec::new(); self.roles.len()],
            parent: None,
        };
        for a in &self.kb.assertions {
            let id = self.names.iter().position(|n| n == a).expect("asserted name known");
            root.label.insert(id);
        }
        let mut stack = vec![Branch {
            inds: vec![root],
            depth: 0,
            note: None,
        }];
        let mut closed = 0;
        while let Some(mut b) = stack.pop() {
            self.stats.branch_nodes += 1;
            if self.stats.branch_nodes > self.cfg.max_branches {
                return Err(ResourceLimit::Branches(self.cfg.max_branches));
            }
            if let Some((ci, text)) = b.note.take() {
                self.record(b.depth - 1, ci, Vec::new(), format!("choose {text}"));
            }
            let outcome = self.saturate(&mut b);
            self.stats.peak_individuals = self.stats.peak_individuals.max(b.inds.len());
            match outcome {
                Saturation::Clash => closed += 1,
                Saturation::Open(blocked) => return Ok(Outcome::Sat {
                    model: self.extract(&b, &blocked),
                }),
                Saturation::Branch(choices, head, ci, facts) => {
                    self.record(b.depth, ci, facts, head);
                    let mut children = Vec::with_capacity(choices.len());
                    for ch in &choices {
                        let mut child = b.clone();
                        child.depth += 1;
                        let text = self.apply(&mut child, ch)?;
                        child.note = Some((ci, text));
                        children.push(child);
                    }
                    // Reversed so the first alternative is explored first.
                    stack.extend(children.into_iter().rev());
                }
            }
        }
        Ok(Outcome::Unsat {
            refutation: Refutation {
                steps: std::mem::take(&mut self.steps),
                closed,
            },
        })
    }

    fn extract(&self, b: &Branch, blocked: &[Option<usize>]) -> KripkeModel {
        let kept: Vec<usize> = (0..b.inds.len()).filter(|&i| blocked[i].is_none()).collect();
        let index: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(n, &i)| (i, n)).collect();
        let worlds = kept
            .iter()
            .map(|&i| World {
                id: index[&i],
                atoms: b.inds[i]
                    .label
                    .iter()
                    .filter(|&n| self.kb.source_names.contains(&self.names[n]))
                    .map(|n| AtomId::new(self.names[n].clone()))
                    .collect(),
                origin: match b.inds[i].parent {
                    None => WorldOrigin::Named,
                    Some(p) => match index.get(&p) {
                        Some(&p) => WorldOrigin::Fresh { parent: p },
                        None => WorldOrigin::Fresh {
                            parent: index[&blocked[p].expect("dropped parent is blocked")],
                        },
                    },
                },
            })
            .collect();
        let mut relations: BTreeMap<ModalityId, BTreeSet<(usize, usize)>> = BTreeMap::new();
        for r in &self.roles {
            relations.entry(r.modality().clone()).or_default();
        }
        for &i in &kept {
            for (r, succ) in b.inds[i].succ.iter().enumerate() {
                for &y in succ {
                    let target = blocked[y].unwrap_or(y);
                    relations
                        .entry(self.roles[r].modality().clone())
                        .or_default()
                        .insert((index[&i], index[&target]));
                }
            }
        }
        KripkeModel { worlds, relations }
    }
}

/// Decides `kb`; a satisfiable answer carries a finite model.
pub fn solve(kb: &ClausalKB, cfg: &Config) -> Result<Solution, ResourceLimit> {
    let mut solver = Solver::new(kb, *cfg);
    solver.stats.individual_bound = individual_bound(kb);
    let outcome = solver.run()?;
    Ok(Solution {
        outcome,
        stats: solver.stats,
    })
}

/// `2^n · |roles| + 1` for the `n` concept names of `kb`, saturating.
pub fn individual_bound(kb: &ClausalKB) -> u64 {
    let n = kb.concept_names().len() as u32;
    let roles = kb.roles().len().max(1) as u64;
    1u64.checked_shl(n)
        .filter(|_| n < 64)
        .and_then(|p| p.checked_mul(roles))
        .and_then(|p| p.checked_add(1))
        .unwrap_or(u64::MAX)
}
