use std::fmt;

use serde::{Serialize, Serializer};

use crate::formula::{nnf, Formula, ModalityId};

/// The role of one modality: `r` for `ought`, `r_<label>` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role(ModalityId);

impl Role {
    pub fn of(m: &ModalityId) -> Self {
        Role(m.clone())
    }

    pub fn modality(&self) -> &ModalityId {
        &self.0
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_ought() {
            f.write_str("r")
        } else {
            write!(f, "r_{}", self.0)
        }
    }
}

impl Serialize for Role {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Atomic(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    ForAll(Role, Box<Concept>),
    Exists(Role, Box<Concept>),
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::Or(Box::new(a), Box::new(b))
    }

    pub fn forall(r: Role, c: Concept) -> Self {
        Concept::ForAll(r, Box::new(c))
    }

    pub fn exists(r: Role, c: Concept) -> Self {
        Concept::Exists(r, Box::new(c))
    }

    pub fn size(&self) -> usize {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) => 1,
            Concept::Not(a) | Concept::ForAll(_, a) | Concept::Exists(_, a) => 1 + a.size(),
            Concept::And(a, b) | Concept::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn is_simple(&self) -> bool {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) => true,
            Concept::Not(a) => matches!(**a, Concept::Atomic(_) | Concept::Top | Concept::Bottom),
            _ => false,
        }
    }

    /// Negation normal form: `¬` only on atomic concepts.
    pub fn nnf(&self) -> Concept {
        match self {
            Concept::Not(a) => a.negated_nnf(),
            Concept::And(a, b) => Concept::and(a.nnf(), b.nnf()),
            Concept::Or(a, b) => Concept::or(a.nnf(), b.nnf()),
            Concept::ForAll(r, a) => Concept::forall(r.clone(), a.nnf()),
            Concept::Exists(r, a) => Concept::exists(r.clone(), a.nnf()),
            other => other.clone(),
        }
    }

    fn negated_nnf(&self) -> Concept {
        match self {
            Concept::Top => Concept::Bottom,
            Concept::Bottom => Concept::Top,
            Concept::Atomic(_) => Concept::not(self.clone()),
            Concept::Not(a) => a.nnf(),
            Concept::And(a, b) => Concept::or(a.negated_nnf(), b.negated_nnf()),
            Concept::Or(a, b) => Concept::and(a.negated_nnf(), b.negated_nnf()),
            Concept::ForAll(r, a) => Concept::exists(r.clone(), a.negated_nnf()),
            Concept::Exists(r, a) => Concept::forall(r.clone(), a.negated_nnf()),
        }
    }

    /// Back to modal syntax: the inverse of [`phi`] on implication-free input.
    pub fn to_formula(&self) -> Formula {
        match self {
            Concept::Top => Formula::Top,
            Concept::Bottom => Formula::Bottom,
            Concept::Atomic(n) => Formula::atom(n.clone()),
            Concept::Not(a) => Formula::not(a.to_formula()),
            Concept::And(a, b) => Formula::and(a.to_formula(), b.to_formula()),
            Concept::Or(a, b) => Formula::or(a.to_formula(), b.to_formula()),
            Concept::ForAll(r, a) => Formula::boxed(r.modality().clone(), a.to_formula()),
            Concept::Exists(r, a) => Formula::diamond(r.modality().clone(), a.to_formula()),
        }
    }
}

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

fn precedence(c: &Concept) -> u8 {
    match c {
        Concept::Or(..) => PREC_OR,
        Concept::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_concept(out: &mut fmt::Formatter<'_>, c: &Concept, min_prec: u8) -> fmt::Result {
    let paren = precedence(c) < min_prec;
    if paren {
        out.write_str("(")?;
    }
    match c {
        Concept::Top => out.write_str("⊤")?,
        Concept::Bottom => out.write_str("⊥")?,
        Concept::Atomic(n) => out.write_str(n)?,
        Concept::Not(a) => {
            out.write_str("¬")?;
            write_concept(out, a, PREC_UNARY)?;
        }
        Concept::And(a, b) => {
            write_concept(out, a, PREC_AND)?;
            out.write_str(" ⊓ ")?;
            write_concept(out, b, PREC_UNARY)?;
        }
        Concept::Or(a, b) => {
            write_concept(out, a, PREC_OR)?;
            out.write_str(" ⊔ ")?;
            write_concept(out, b, PREC_AND)?;
        }
        Concept::ForAll(r, a) | Concept::Exists(r, a) => {
            let q = if matches!(c, Concept::ForAll(..)) { "∀" } else { "∃" };
            write!(out, "{q}{r}.")?;
            if a.is_simple() {
                write_concept(out, a, PREC_UNARY)?;
            } else {
                out.write_str("(")?;
                write_concept(out, a, 0)?;
                out.write_str(")")?;
            }
        }
    }
    if paren {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_concept(f, self, 0)
    }
}

impl Serialize for Concept {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Implications are rewritten first (`⊤ → b` to `b`, `a → ⊥` to the
/// negation normal form of `¬a`, otherwise `nnf(¬a) ∨ b`); the remaining
/// connectives map one to one onto concept constructors.
pub fn phi(f: &Formula) -> Concept {
    match f {
        Formula::Top => Concept::Top,
        Formula::Bottom => Concept::Bottom,
        Formula::Atom(a) => Concept::atomic(a.as_str()),
        Formula::Not(a) => Concept::not(phi(a)),
        Formula::And(a, b) => Concept::and(phi(a), phi(b)),
        Formula::Or(a, b) => Concept::or(phi(a), phi(b)),
        Formula::Box(m, a) => Concept::forall(Role::of(m), phi(a)),
        Formula::Diamond(m, a) => Concept::exists(Role::of(m), phi(a)),
        Formula::Implies(a, b) => {
            if **a == Formula::Top {
                phi(b)
            } else if **b == Formula::Bottom {
                phi(&nnf(&Formula::not((**a).clone())))
            } else {
                Concept::or(phi(&nnf(&Formula::not((**a).clone()))), phi(b))
            }
        }
    }
}
