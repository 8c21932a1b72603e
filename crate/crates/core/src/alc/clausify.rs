use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use super::concept::{Concept, Role};
use super::TBoxAxiom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Term {
    X,
    /// The i-th successor variable `y_i`, counted from 1.
    Y(usize),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::X => f.write_str("x"),
            Term::Y(i) => write!(f, "y{i}"),
        }
    }
}

/// Body atoms are concept atoms over `x` and role atoms `r(x, y_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BodyAtom {
    Concept(String),
    Role(Role, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HeadAtom {
    Concept(String, Term),
    /// `∃r.C` at `x`; `None` stands for `⊤`.
    Exists(Role, Option<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DLClause {
    pub body: Vec<BodyAtom>,
    pub head: Vec<HeadAtom>,
}

impl DLClause {
    /// Number of successor variables.
    pub fn arity(&self) -> usize {
        self.body
            .iter()
            .filter(|a| matches!(a, BodyAtom::Role(..)))
            .count()
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &str> {
        let body = self.body.iter().filter_map(|a| match a {
            BodyAtom::Concept(n) => Some(n.as_str()),
            BodyAtom::Role(..) => None,
        });
        let head = self.head.iter().filter_map(|a| match a {
            HeadAtom::Concept(n, _) => Some(n.as_str()),
            HeadAtom::Exists(_, n) => n.as_deref(),
        });
        body.chain(head)
    }
}

impl fmt::Display for DLClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .body
            .iter()
            .map(|a| match a {
                BodyAtom::Concept(n) => format!("{n}(x)"),
                BodyAtom::Role(r, i) => format!("{r}(x,y{i})"),
            })
            .collect();
        let head: Vec<String> = self
            .head
            .iter()
            .map(|a| match a {
                HeadAtom::Concept(n, t) => format!("{n}({t})"),
                HeadAtom::Exists(r, Some(n)) => format!("exists {r}.{n} [x]"),
                HeadAtom::Exists(r, None) => format!("exists {r}.top [x]"),
            })
            .collect();
        if !body.is_empty() {
            write!(f, "{} ", body.join(", "))?;
        }
        f.write_str("->")?;
        if head.is_empty() {
            f.write_str(" false")
        } else {
            write!(f, " {}", head.join(" | "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClausalKB {
    pub clauses: Vec<DLClause>,
    /// Concept names asserted for the observed individual `a0`.
    pub assertions: Vec<String>,
    /// Auxiliary name to the sub-concept it abbreviates.
    pub name_table: IndexMap<String, Concept>,
    /// Roles with a seriality axiom.
    pub serial_roles: Vec<Role>,
    /// Atomic concepts of the input.
    pub source_names: BTreeSet<String>,
}

impl ClausalKB {
    pub fn roles(&self) -> BTreeSet<Role> {
        let mut out: BTreeSet<Role> = self.serial_roles.iter().cloned().collect();
        for c in &self.clauses {
            for a in &c.body {
                if let BodyAtom::Role(r, _) = a {
                    out.insert(r.clone());
                }
            }
            for a in &c.head {
                if let HeadAtom::Exists(r, _) = a {
                    out.insert(r.clone());
                }
            }
        }
        out
    }

    /// Every concept name, source and auxiliary.
    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = self.source_names.clone();
        out.extend(self.name_table.keys().cloned());
        out
    }
}

impl fmt::Display for ClausalKB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.assertions {
            writeln!(f, "{a}(a0)")?;
        }
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        for (name, c) in &self.name_table {
            writeln!(f, "# {name} = {c}")?;
        }
        Ok(())
    }
}

fn collect_names(c: &Concept, out: &mut BTreeSet<String>) {
    match c {
        Concept::Atomic(n) => {
            out.insert(n.clone());
        }
        Concept::Not(a) | Concept::ForAll(_, a) | Concept::Exists(_, a) => collect_names(a, out),
        Concept::And(a, b) | Concept::Or(a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
        Concept::Top | Concept::Bottom => {}
    }
}

/// Removes `⊤` and `⊥` below the root of a concept in negation normal form.
fn simplify(c: &Concept) -> Concept {
    match c {
        Concept::And(a, b) => match (simplify(a), simplify(b)) {
            (Concept::Bottom, _) | (_, Concept::Bottom) => Concept::Bottom,
            (Concept::Top, x) | (x, Concept::Top) => x,
            (x, y) => Concept::and(x, y),
        },
        Concept::Or(a, b) => match (simplify(a), simplify(b)) {
            (Concept::Top, _) | (_, Concept::Top) => Concept::Top,
            (Concept::Bottom, x) | (x, Concept::Bottom) => x,
            (x, y) => Concept::or(x, y),
        },
        Concept::ForAll(r, a) => match simplify(a) {
            Concept::Top => Concept::Top,
            x => Concept::forall(r.clone(), x),
        },
        Concept::Exists(r, a) => match simplify(a) {
            Concept::Bottom => Concept::Bottom,
            x => Concept::exists(r.clone(), x),
        },
        other => other.clone(),
    }
}

fn disjuncts<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
    match c {
        Concept::Or(a, b) => {
            disjuncts(a, out);
            disjuncts(b, out);
        }
        other => out.push(other),
    }
}

struct Clausifier {
    clauses: Vec<DLClause>,
    names: IndexMap<Concept, String>,
    pending: VecDeque<(String, Concept)>,
    reserved: BTreeSet<String>,
    next: usize,
}

impl Clausifier {
    /// Auxiliary name for `c`; its definition `Q ⊑ c` is queued.
    fn name(&mut self, c: &Concept) -> String {
        if let Some(n) = self.names.get(c) {
            return n.clone();
        }
        let name = loop {
            let candidate = format!("Q{}", self.next);
            self.next += 1;
            if !self.reserved.contains(&candidate) {
                break candidate;
            }
        };
        self.names.insert(c.clone(), name.clone());
        self.pending.push_back((name.clone(), c.clone()));
        name
    }

    /// Clauses for `guard(x) → c(x)`.
    fn encode(&mut self, guard: &[String], c: &Concept) {
        match c {
            Concept::Top => {}
            Concept::And(a, b) => {
                self.encode(guard, a);
                self.encode(guard, b);
            }
            _ => {
                let mut ds = Vec::new();
                disjuncts(c, &mut ds);
                let mut body: Vec<BodyAtom> =
                    guard.iter().map(|g| BodyAtom::Concept(g.clone())).collect();
                let mut head: Vec<HeadAtom> = Vec::new();
                let mut ys = 0;
                for d in ds {
                    match d {
                        Concept::Top => return,
                        Concept::Bottom => {}
                        Concept::Atomic(a) => head.push(HeadAtom::Concept(a.clone(), Term::X)),
                        Concept::Not(inner) => match &**inner {
                            Concept::Atomic(a) => body.push(BodyAtom::Concept(a.clone())),
                            other => unreachable!("not in negation normal form: ¬{other}"),
                        },
                        Concept::Exists(r, filler) => {
                            let n = match &**filler {
                                Concept::Top => None,
                                Concept::Atomic(a) => Some(a.clone()),
                                other => Some(self.name(other)),
                            };
                            head.push(HeadAtom::Exists(r.clone(), n));
                        }
                        Concept::ForAll(r, filler) => {
                            ys += 1;
                            body.push(BodyAtom::Role(r.clone(), ys));
                            match &**filler {
                                Concept::Bottom => {}
                                Concept::Atomic(a) => {
                                    head.push(HeadAtom::Concept(a.clone(), Term::Y(ys)))
                                }
                                other => {
                                    let n = self.name(other);
                                    head.push(HeadAtom::Concept(n, Term::Y(ys)));
                                }
                            }
                        }
                        Concept::And(..) => {
                            let n = self.name(d);
                            head.push(HeadAtom::Concept(n, Term::X));
                        }
                        Concept::Or(..) => unreachable!("flattened"),
                    }
                }
                let mut seen = BTreeSet::new();
                body.retain(|a| seen.insert(a.clone()));
                let mut seen = BTreeSet::new();
                head.retain(|a| seen.insert(a.clone()));
                let tautology = head.iter().any(|h| match h {
                    HeadAtom::Concept(n, Term::X) => body.contains(&BodyAtom::Concept(n.clone())),
                    _ => false,
                });
                if !tautology {
                    self.clauses.push(DLClause { body, head });
                }
            }
        }
    }

    fn drain(&mut self) {
        while let Some((name, c)) = self.pending.pop_front() {
            self.encode(&[name], &c);
        }
    }
}

/// Structural transformation of `concepts` (asserted at `a0`) and `tbox`.
/// Each non-atomic concept below `∀`, `∃` or inside a disjunction gets a
/// fresh name `Qi` defined only in the direction `Qi ⊑ C`.
pub fn clausify(concepts: &[Concept], tbox: &[TBoxAxiom]) -> ClausalKB {
    let mut source_names = BTreeSet::new();
    for c in concepts {
        collect_names(c, &mut source_names);
    }
    for ax in tbox {
        collect_names(&ax.left, &mut source_names);
        collect_names(&ax.right, &mut source_names);
    }
    let mut cl = Clausifier {
        clauses: Vec::new(),
        names: IndexMap::new(),
        pending: VecDeque::new(),
        reserved: source_names.clone(),
        next: 0,
    };
    let mut serial_roles = Vec::new();
    for ax in tbox {
        if ax.left == Concept::Top {
            if let Concept::Exists(r, filler) = &ax.right {
                if **filler == Concept::Top && !serial_roles.contains(r) {
                    serial_roles.push(r.clone());
                }
            }
        }
        let c = simplify(&Concept::or(Concept::not(ax.left.clone()), ax.right.clone()).nnf());
        cl.encode(&[], &c);
        cl.drain();
    }
    let mut assertions = Vec::new();
    for c in concepts {
        let c = simplify(&c.nnf());
        let name = match &c {
            Concept::Top => continue,
            Concept::Atomic(a) => a.clone(),
            other => cl.name(other),
        };
        if !assertions.contains(&name) {
            assertions.push(name);
        }
        cl.drain();
    }
    let name_table = cl
        .names
        .iter()
        .map(|(c, n)| (n.clone(), c.clone()))
        .collect();
    ClausalKB {
        clauses: cl.clauses,
        assertions,
        name_table,
        serial_roles,
        source_names,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::ModalityId;

    fn r() -> Role {
        Role::of(&ModalityId::ought())
    }

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    #[test]
    fn single_assertion() {
        let kb = clausify(&[a("p")], &[]);
        assert_eq!(kb.assertions, ["p"]);
        assert!(kb.clauses.is_empty());
        assert!(kb.name_table.is_empty());
    }

    #[test]
    fn chisholm_clauses() {
        let concepts = [
            Concept::forall(r(), Concept::not(a("S"))),
            a("S"),
            Concept::or(Concept::not(a("S")), Concept::forall(r(), a("P"))),
            Concept::forall(r(), Concept::or(a("S"), Concept::not(a("P")))),
        ];
        let tbox = [TBoxAxiom::seriality(&ModalityId::ought())];
        let kb = clausify(&concepts, &tbox);
        let text: Vec<String> = kb.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            text,
            [
                "-> exists r.top [x]",
                "Q0(x), r(x,y1) -> Q1(y1)",
                "Q1(x), S(x) -> false",
                "Q2(x), S(x), r(x,y1) -> P(y1)",
                "Q3(x), r(x,y1) -> Q4(y1)",
                "Q4(x), P(x) -> S(x)",
            ]
        );
        assert_eq!(kb.assertions, ["Q0", "S", "Q2", "Q3"]);
        assert_eq!(kb.serial_roles, [r()]);
        for name in kb.name_table.keys() {
            assert!(kb.clauses.iter().any(|c| c.concept_names().any(|n| n == name)));
        }
    }

    #[test]
    fn conjunction_under_disjunction_is_named() {
        let c = Concept::or(a("p"), Concept::and(a("q"), Concept::exists(r(), a("s"))));
        let kb = clausify(&[c], &[]);
        let text: Vec<String> = kb.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            text,
            [
                "Q0(x) -> p(x) | Q1(x)",
                "Q1(x) -> q(x)",
                "Q1(x) -> exists r.s [x]",
            ]
        );
    }

    #[test]
    fn fresh_names_avoid_source_names() {
        let c = Concept::or(a("Q0"), Concept::not(a("p")));
        let kb = clausify(&[c], &[]);
        assert_eq!(kb.assertions, ["Q1"]);
    }
}
