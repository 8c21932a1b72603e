//! Literal-style tableau for depth-one KD formulae.
//!
//! Classical connectives are expanded as usual while `□L` and `◇L` stay on
//! the branch as opaque entries. Conjunctions of literals implying `⊥` are
//! kept as constraints that close a branch once all their conjuncts appear.

mod render;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formula::{AtomId, Formula, ModalityId};

pub use render::{render_dot, render_text};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("nested modality in `{0}`")]
    NestedModality(String),
    #[error("non-literal under a modal operator in `{0}`")]
    NonLiteralUnderBox(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedLiteral {
    pub atom: AtomId,
    pub positive: bool,
}

impl SignedLiteral {
    pub fn new(atom: AtomId, positive: bool) -> Self {
        SignedLiteral { atom, positive }
    }

    pub fn from_formula(f: &Formula) -> Option<Self> {
        f.as_literal()
            .map(|(positive, atom)| SignedLiteral::new(atom.clone(), positive))
    }

    pub fn complement(&self) -> Self {
        SignedLiteral::new(self.atom.clone(), !self.positive)
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::Atom(self.atom.clone());
        if self.positive {
            a
        } else {
            Formula::not(a)
        }
    }
}

impl fmt::Display for SignedLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        f.write_str(self.atom.as_str())
    }
}

impl Serialize for SignedLiteral {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `□_m L`, ordered by modality and then by literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxedLiteral {
    pub modality: ModalityId,
    pub literal: SignedLiteral,
}

impl BoxedLiteral {
    pub fn new(modality: ModalityId, literal: SignedLiteral) -> Self {
        BoxedLiteral { modality, literal }
    }

    pub fn to_formula(&self) -> Formula {
        Formula::boxed(self.modality.clone(), self.literal.to_formula())
    }
}

impl fmt::Display for BoxedLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula().pretty())
    }
}

impl Serialize for BoxedLiteral {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One item on a branch.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Entry {
    Literal(SignedLiteral),
    Boxed(BoxedLiteral),
    /// `◇_m L`; kept apart from the boxed literals.
    Permitted(BoxedLiteral),
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Literal(l) => write!(f, "{l}"),
            Entry::Boxed(b) => write!(f, "{b}"),
            Entry::Permitted(b) => write!(
                f,
                "{}",
                Formula::diamond(b.modality.clone(), b.literal.to_formula()).pretty()
            ),
        }
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchStatus {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    /// Entries in the order they were added.
    pub entries: Vec<Entry>,
    /// Pending `L1 ∧ … ∧ Ln → ⊥` constraints.
    #[serde(skip)]
    pub constraints: Vec<Vec<SignedLiteral>>,
    pub status: BranchStatus,
    pub trace: Vec<String>,
    /// Tree node where the branch ends.
    #[serde(skip)]
    pub leaf: usize,
}

impl Branch {
    fn empty() -> Self {
        Branch {
            entries: Vec::new(),
            constraints: Vec::new(),
            status: BranchStatus::Open,
            trace: Vec::new(),
            leaf: 0,
        }
    }

    pub fn is_open(&self) -> bool {
        self.status == BranchStatus::Open
    }

    pub fn literals(&self) -> BTreeSet<SignedLiteral> {
        self.entries
            .iter()
            .filter_map(|e| match e {
                Entry::Literal(l) => Some(l.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn boxed(&self) -> BTreeSet<BoxedLiteral> {
        self.entries
            .iter()
            .filter_map(|e| match e {
                Entry::Boxed(b) => Some(b.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn permitted(&self) -> BTreeSet<BoxedLiteral> {
        self.entries
            .iter()
            .filter_map(|e| match e {
                Entry::Permitted(b) => Some(b.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn has_literal(&self, l: &SignedLiteral) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e, Entry::Literal(x) if x == l))
    }

    /// Every entry as a formula, e.g. `{c(l,A), □c(n,4), c(n,4)}`.
    pub fn entry_set(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.to_string()).collect()
    }

    pub fn modalities(&self) -> BTreeSet<ModalityId> {
        self.boxed()
            .into_iter()
            .chain(self.permitted())
            .map(|b| b.modality)
            .collect()
    }

    /// Whether every modality can get a successor: its box bodies are
    /// jointly consistent with `world_axioms`, and so is each `◇L`
    /// together with them.
    pub fn is_serial(&self, world_axioms: &[Formula]) -> bool {
        let boxed = self.boxed();
        let permitted = self.permitted();
        self.modalities().into_iter().all(|m| {
            let bodies: Vec<SignedLiteral> = boxed
                .iter()
                .filter(|b| b.modality == m)
                .map(|b| b.literal.clone())
                .collect();
            if !literals_satisfiable(&bodies, world_axioms) {
                return false;
            }
            permitted.iter().filter(|p| p.modality == m).all(|p| {
                let mut with = bodies.clone();
                with.push(p.literal.clone());
                literals_satisfiable(&with, world_axioms)
            })
        })
    }

    fn closing_constraint(&self) -> Option<&Vec<SignedLiteral>> {
        self.constraints
            .iter()
            .find(|c| c.iter().all(|l| self.has_literal(l)))
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// True iff the literals and the propositional `axioms` have a common model.
pub fn literals_satisfiable(literals: &[SignedLiteral], axioms: &[Formula]) -> bool {
    let mut input: Vec<Formula> = literals.iter().map(SignedLiteral::to_formula).collect();
    input.extend(axioms.iter().cloned());
    match build_tableau(&input) {
        Ok(t) => t.branches.iter().any(Branch::is_open),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub label: String,
    pub children: Vec<usize>,
    /// Why the branch through this node closed, if it ends here.
    pub closed: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tableau {
    pub input: Vec<Formula>,
    pub nodes: Vec<TreeNode>,
    pub branches: Vec<Branch>,
}

impl Tableau {
    pub fn open_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.is_open())
    }
}

/// Accepts formulae whose modal operators all sit directly on literals.
pub fn check_fragment(f: &Formula) -> Result<(), TableauError> {
    match f {
        Formula::Box(_, body) | Formula::Diamond(_, body) => {
            if body.is_literal() {
                Ok(())
            } else if body.modalities().is_empty() {
                Err(TableauError::NonLiteralUnderBox(f.pretty().to_string()))
            } else {
                Err(TableauError::NestedModality(f.pretty().to_string()))
            }
        }
        Formula::Not(a) => check_fragment(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_fragment(a)?;
            check_fragment(b)
        }
        Formula::Top | Formula::Bottom | Formula::Atom(_) => Ok(()),
    }
}

enum Step {
    Skip,
    Close,
    Add(Entry),
    Alpha(Vec<Formula>),
    Fork(Vec<Formula>),
    Constraint(Vec<SignedLiteral>),
}

fn literal_of(f: &Formula) -> SignedLiteral {
    SignedLiteral::from_formula(f).expect("fragment check guarantees literal bodies")
}

/// The formula placed on the left of an implication fork.
fn antecedent_complement(a: &Formula) -> Formula {
    if let Some(c) = a.complement_literal() {
        return c;
    }
    match a {
        Formula::Box(m, l) => Formula::diamond(m.clone(), literal_of(l).complement().to_formula()),
        Formula::Diamond(m, l) => Formula::boxed(m.clone(), literal_of(l).complement().to_formula()),
        other => Formula::not(other.clone()),
    }
}

fn conjunct_literals(f: &Formula, out: &mut Vec<SignedLiteral>) -> bool {
    match f {
        Formula::And(a, b) => conjunct_literals(a, out) && conjunct_literals(b, out),
        other => match SignedLiteral::from_formula(other) {
            Some(l) => {
                out.push(l);
                true
            }
            None => false,
        },
    }
}

fn classify(f: &Formula) -> Step {
    use Formula::*;
    match f {
        Top => Step::Skip,
        Bottom => Step::Close,
        Atom(a) => Step::Add(Entry::Literal(SignedLiteral::new(a.clone(), true))),
        And(a, b) => Step::Alpha(vec![(**a).clone(), (**b).clone()]),
        Or(a, b) => Step::Fork(vec![(**a).clone(), (**b).clone()]),
        Box(m, l) => Step::Add(Entry::Boxed(BoxedLiteral::new(m.clone(), literal_of(l)))),
        Diamond(m, l) => Step::Add(Entry::Permitted(BoxedLiteral::new(m.clone(), literal_of(l)))),
        Implies(a, b) => {
            if **a == Top {
                return Step::Alpha(vec![(**b).clone()]);
            }
            if **b == Bottom && matches!(**a, And(..)) {
                let mut lits = Vec::new();
                if conjunct_literals(a, &mut lits) {
                    return Step::Constraint(lits);
                }
            }
            Step::Fork(vec![antecedent_complement(a), (**b).clone()])
        }
        Not(g) => match &**g {
            Top => Step::Close,
            Bottom => Step::Skip,
            Atom(a) => Step::Add(Entry::Literal(SignedLiteral::new(a.clone(), false))),
            Not(h) => Step::Alpha(vec![(**h).clone()]),
            And(a, b) => Step::Fork(vec![Formula::not((**a).clone()), Formula::not((**b).clone())]),
            Or(a, b) => Step::Alpha(vec![Formula::not((**a).clone()), Formula::not((**b).clone())]),
            Implies(a, b) => Step::Alpha(vec![(**a).clone(), Formula::not((**b).clone())]),
            Box(m, l) => Step::Add(Entry::Permitted(BoxedLiteral::new(
                m.clone(),
                literal_of(l).complement(),
            ))),
            Diamond(m, l) => Step::Add(Entry::Boxed(BoxedLiteral::new(
                m.clone(),
                literal_of(l).complement(),
            ))),
        },
    }
}

#[derive(Clone)]
struct State {
    branch: Branch,
    queue: VecDeque<Formula>,
}

struct Builder {
    nodes: Vec<TreeNode>,
    branches: Vec<Branch>,
}

impl Builder {
    fn add_node(&mut self, parent: usize, label: String) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            label,
            children: Vec::new(),
            closed: None,
        });
        self.nodes[parent].children.push(id);
        id
    }

    fn close(&mut self, mut st: State, reason: String) {
        st.branch.trace.push(format!("close: {reason}"));
        st.branch.status = BranchStatus::Closed;
        self.nodes[st.branch.leaf].closed = Some(reason);
        self.branches.push(st.branch);
    }

    fn fork(&mut self, st: State, rule: &str, alternatives: Vec<Formula>) {
        for alt in alternatives {
            let mut child = st.clone();
            child.branch.leaf = self.add_node(st.branch.leaf, alt.pretty().to_string());
            child.branch.trace.push(format!("{rule}: {}", alt.pretty()));
            child.queue.push_front(alt);
            self.run(child);
        }
    }

    fn run(&mut self, mut st: State) {
        while let Some(f) = st.queue.pop_front() {
            match classify(&f) {
                Step::Skip => {}
                Step::Close => return self.close(st, f.pretty().to_string()),
                Step::Alpha(parts) => {
                    for p in parts.into_iter().rev() {
                        st.queue.push_front(p);
                    }
                }
                Step::Add(entry) => {
                    if st.branch.entries.contains(&entry) {
                        continue;
                    }
                    if let Entry::Literal(l) = &entry {
                        if st.branch.has_literal(&l.complement()) {
                            let reason = format!("{}, {}", l.complement(), l);
                            st.branch.entries.push(entry);
                            return self.close(st, reason);
                        }
                    }
                    st.branch.entries.push(entry);
                    if let Some(c) = st.branch.closing_constraint() {
                        let reason = constraint_text(c);
                        return self.close(st, reason);
                    }
                }
                Step::Constraint(lits) => {
                    st.branch.constraints.push(lits);
                    if let Some(c) = st.branch.closing_constraint() {
                        let reason = constraint_text(c);
                        return self.close(st, reason);
                    }
                }
                Step::Fork(alts) => {
                    let rule = format!("β {}", f.pretty());
                    return self.fork(st, &rule, alts);
                }
            }
        }
        self.saturate(st)
    }

    /// Pending constraints are met by falsifying their undecided conjuncts;
    /// when two constraints disagree on an atom, fork on the first one.
    fn saturate(&mut self, st: State) {
        let b = &st.branch;
        let pending: Vec<Vec<SignedLiteral>> = b
            .constraints
            .iter()
            .filter(|c| !c.iter().any(|l| b.has_literal(&l.complement())))
            .map(|c| c.iter().filter(|l| !b.has_literal(l)).cloned().collect())
            .collect();
        let needed: BTreeSet<SignedLiteral> = pending
            .iter()
            .flatten()
            .map(SignedLiteral::complement)
            .collect();
        let conflict = pending
            .iter()
            .find(|c| c.iter().any(|l| needed.contains(l)));
        match conflict {
            None => self.branches.push(st.branch),
            Some(c) => {
                let rule = format!("constraint {}", constraint_text(c));
                let alts = c.iter().map(|l| l.complement().to_formula()).collect();
                self.fork(st, &rule, alts)
            }
        }
    }
}

fn constraint_text(c: &[SignedLiteral]) -> String {
    let body: Vec<String> = c.iter().map(|l| l.to_string()).collect();
    format!("{} → ⊥", body.join(" ∧ "))
}

/// Expands `formulas` in order, forking left to right.
pub fn build_tableau(formulas: &[Formula]) -> Result<Tableau, TableauError> {
    for f in formulas {
        check_fragment(f)?;
    }
    let label: Vec<String> = formulas.iter().map(|f| f.pretty().to_string()).collect();
    let mut builder = Builder {
        nodes: vec![TreeNode {
            label: label.join("; "),
            children: Vec::new(),
            closed: None,
        }],
        branches: Vec::new(),
    };
    builder.run(State {
        branch: Branch::empty(),
        queue: formulas.iter().cloned().collect(),
    });
    Ok(Tableau {
        input: formulas.to_vec(),
        nodes: builder.nodes,
        branches: builder.branches,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "check", rename_all = "snake_case")]
pub enum CheatVerdict {
    NoCheckNeeded,
    /// Boxed literals shared by every minimal set; empty when the minimal
    /// sets are disjoint and one of them has to be chosen.
    MustCheck(BTreeSet<BoxedLiteral>),
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheatReport {
    pub verdict: CheatVerdict,
    pub minimal_sets: Vec<BTreeSet<BoxedLiteral>>,
    /// Open branches that admit serial successors.
    pub branches: Vec<Branch>,
    /// Open branches dropped because some obligation set was unsatisfiable.
    pub non_serial: usize,
    /// `◇` literals seen on the retained branches; not used for the verdict.
    pub permitted: BTreeSet<BoxedLiteral>,
}

/// Minimal boxed-literal sets over the open branches.
pub fn cheat_detect(branches: &[Branch]) -> CheatReport {
    cheat_detect_under(branches, &[])
}

/// As [`cheat_detect`], requiring successors to satisfy `world_axioms` too.
pub fn cheat_detect_under(branches: &[Branch], world_axioms: &[Formula]) -> CheatReport {
    let open: Vec<&Branch> = branches.iter().filter(|b| b.is_open()).collect();
    let serial: Vec<Branch> = open
        .iter()
        .filter(|b| b.is_serial(world_axioms))
        .map(|b| (*b).clone())
        .collect();
    let non_serial = open.len() - serial.len();
    let permitted = serial.iter().flat_map(Branch::permitted).collect();

    if serial.is_empty() {
        return CheatReport {
            verdict: CheatVerdict::Inconsistent,
            minimal_sets: Vec::new(),
            branches: serial,
            non_serial,
            permitted,
        };
    }

    let sets: BTreeSet<BTreeSet<BoxedLiteral>> = serial.iter().map(Branch::boxed).collect();
    let minimal_sets: Vec<BTreeSet<BoxedLiteral>> = sets
        .iter()
        .filter(|s| !sets.iter().any(|t| t != *s && t.is_subset(s)))
        .cloned()
        .collect();

    let verdict = if minimal_sets.iter().any(BTreeSet::is_empty) {
        CheatVerdict::NoCheckNeeded
    } else {
        let mut common = minimal_sets[0].clone();
        for s in &minimal_sets[1..] {
            common.retain(|b| s.contains(b));
        }
        CheatVerdict::MustCheck(common)
    };
    CheatReport {
        verdict,
        minimal_sets,
        branches: serial,
        non_serial,
        permitted,
    }
}

/// Whether the world of `branch` can be its own successor: adding the body
/// of every boxed literal keeps the branch free of clashes.
pub fn self_loop_check(branch: &Branch) -> bool {
    let mut lits = branch.literals();
    for b in branch.boxed() {
        lits.insert(b.literal);
    }
    if lits.iter().any(|l| lits.contains(&l.complement())) {
        return false;
    }
    !branch
        .constraints
        .iter()
        .any(|c| c.iter().all(|l| lits.contains(l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_problem;

    fn tableau_of(src: &str) -> Tableau {
        let p = parse_problem(src).unwrap();
        build_tableau(&p.all_formulas()).unwrap()
    }

    fn open_sets(t: &Tableau) -> Vec<BTreeSet<String>> {
        t.open_branches().map(Branch::entry_set).collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    const CARDS: &str = "partition l: A|K\npartition n: 4|7\n";

    #[test]
    fn naive_observed_letter() {
        let t = tableau_of(&format!("{CARDS}observe c(l,A)\nnorm c(l,A) => O c(n,4)\n"));
        assert_eq!(
            open_sets(&t),
            vec![
                set(&["c(l,A)", "□c(n,4)", "c(n,4)"]),
                set(&["c(l,A)", "□c(n,4)", "c(n,7)"]),
            ]
        );
        let r = cheat_detect(&t.branches);
        let expected: BTreeSet<String> = set(&["□c(n,4)"]);
        match &r.verdict {
            CheatVerdict::MustCheck(s) => {
                assert_eq!(s.iter().map(|b| b.to_string()).collect::<BTreeSet<_>>(), expected)
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn self_loop_only_from_compliant_branch() {
        let t = tableau_of(&format!("{CARDS}observe c(l,A)\nnorm c(l,A) => O c(n,4)\n"));
        let open: Vec<&Branch> = t.open_branches().collect();
        assert!(self_loop_check(open[0]));
        assert!(!self_loop_check(open[1]));
        assert!(self_loop_check(&Branch::empty()));
    }

    #[test]
    fn naive_observed_seven_never_boxes_letter() {
        let t = tableau_of(&format!("{CARDS}observe c(n,7)\nnorm c(l,A) => O c(n,4)\n"));
        let sets = open_sets(&t);
        assert_eq!(sets.len(), 3);
        assert!(sets.iter().all(|s| !s.contains("□c(l,K)")));
    }

    #[test]
    fn contraposed_observed_seven_boxes_letter_everywhere() {
        let t = tableau_of(&format!(
            "{CARDS}observe c(n,7)\nnorm c(l,A) => O c(n,4)\noption contrapose\n"
        ));
        let sets = open_sets(&t);
        assert_eq!(sets.len(), 3);
        assert!(sets.iter().all(|s| s.contains("□c(l,K)")));
    }

    #[test]
    fn empty_branch_list_is_inconsistent() {
        assert_eq!(cheat_detect(&[]).verdict, CheatVerdict::Inconsistent);
    }

    #[test]
    fn conflicting_obligations_are_not_serial() {
        let t = tableau_of("atom p, q\nobserve p\nnorm p -> O q\nnorm p -> O ~q\n");
        assert_eq!(t.open_branches().count(), 1);
        let r = cheat_detect(&t.branches);
        assert_eq!(r.verdict, CheatVerdict::Inconsistent);
        assert_eq!(r.non_serial, 1);
    }

    #[test]
    fn permission_clashing_with_obligation() {
        let t = tableau_of("atom p\nnorm O p\nnorm P ~p\n");
        assert_eq!(cheat_detect(&t.branches).verdict, CheatVerdict::Inconsistent);
    }

    #[test]
    fn disagreeing_constraints_fork() {
        // p ∧ q → ⊥ and ¬p ∧ r → ⊥ with q and r present force a fork on p.
        let t = build_tableau(&[
            Formula::atom("q"),
            Formula::atom("r"),
            Formula::implies(Formula::and(Formula::atom("p"), Formula::atom("q")), Formula::Bottom),
            Formula::implies(
                Formula::and(Formula::not(Formula::atom("p")), Formula::atom("r")),
                Formula::Bottom,
            ),
        ])
        .unwrap();
        assert_eq!(t.open_branches().count(), 0);
    }

    #[test]
    fn fragment_errors() {
        let nested = Formula::ought(Formula::ought(Formula::atom("p")));
        assert!(matches!(build_tableau(&[nested]), Err(TableauError::NestedModality(_))));
        let wide = Formula::ought(Formula::or(Formula::atom("p"), Formula::atom("q")));
        assert!(matches!(build_tableau(&[wide]), Err(TableauError::NonLiteralUnderBox(_))));
    }

    #[test]
    fn minimal_sets_form_an_antichain() {
        let t = tableau_of("atom u, d\nnorm u -> O ~d\nnorm d -> O ~u\n");
        let r = cheat_detect(&t.branches);
        for a in &r.minimal_sets {
            for b in &r.minimal_sets {
                assert!(a == b || !a.is_subset(b));
            }
        }
        assert_eq!(r.verdict, CheatVerdict::NoCheckNeeded);
    }
}
