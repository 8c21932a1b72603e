//! Modal formulae over opaque propositional atoms and labelled modalities.
//!
//! Atom names such as `c(l,A)` carry no term structure; they are compared
//! byte for byte. Every modal operator carries a [`ModalityId`], with the
//! unlabelled operators of the input language mapped to [`ModalityId::ought`].

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::problem::Partition;

/// A propositional variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AtomId(String);

impl AtomId {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "atom names are non-empty");
        AtomId(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Label of one obligation/permission operator pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ModalityId(String);

impl ModalityId {
    pub const OUGHT: &'static str = "ought";

    pub fn new(label: impl Into<String>) -> Self {
        ModalityId(label.into())
    }

    /// The modality of unlabelled `O`/`P`.
    pub fn ought() -> Self {
        ModalityId(Self::OUGHT.to_string())
    }

    pub fn is_ought(&self) -> bool {
        self.0 == Self::OUGHT
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for ModalityId {
    fn default() -> Self {
        Self::ought()
    }
}

impl fmt::Display for ModalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Formula {
    Top,
    Bottom,
    Atom(AtomId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Obligation: `□_m φ`.
    Box(ModalityId, Box<Formula>),
    /// Permission: `◇_m φ`.
    Diamond(ModalityId, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(AtomId::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(m: ModalityId, f: Formula) -> Self {
        Formula::Box(m, Box::new(f))
    }

    pub fn diamond(m: ModalityId, f: Formula) -> Self {
        Formula::Diamond(m, Box::new(f))
    }

    /// `□ φ` for the default modality.
    pub fn ought(f: Formula) -> Self {
        Formula::boxed(ModalityId::ought(), f)
    }

    /// `◇ φ` for the default modality.
    pub fn permitted(f: Formula) -> Self {
        Formula::diamond(ModalityId::ought(), f)
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `⊥` when empty.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// `Some((positive, atom))` for `a` and `¬a`.
    pub fn as_literal(&self) -> Option<(bool, &AtomId)> {
        match self {
            Formula::Atom(a) => Some((true, a)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some((false, a)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        self.as_literal().is_some()
    }

    /// The literal of opposite polarity; `None` for non-literals.
    pub fn complement_literal(&self) -> Option<Formula> {
        self.as_literal().map(|(pos, a)| {
            if pos {
                Formula::not(Formula::Atom(a.clone()))
            } else {
                Formula::Atom(a.clone())
            }
        })
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 1,
            Formula::Not(a) | Formula::Box(_, a) | Formula::Diamond(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(a) | Formula::Box(_, a) | Formula::Diamond(_, a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn modalities(&self) -> BTreeSet<ModalityId> {
        let mut out = BTreeSet::new();
        self.collect_modalities(&mut out);
        out
    }

    pub(crate) fn collect_modalities(&self, out: &mut BTreeSet<ModalityId>) {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
            Formula::Not(a) => a.collect_modalities(out),
            Formula::Box(m, a) | Formula::Diamond(m, a) => {
                out.insert(m.clone());
                a.collect_modalities(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_modalities(out);
                b.collect_modalities(out);
            }
        }
    }

    /// Pretty printer using the logical symbols (`¬ ∧ ∨ → □ ◇ ⊤ ⊥`).
    pub fn pretty(&self) -> Pretty<'_> {
        Pretty(self)
    }
}

/// Negation normal form: negation only directly above atoms, no implications.
pub fn nnf(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(inner) => negate(inner),
        Formula::And(a, b) => Formula::and(nnf(a), nnf(b)),
        Formula::Or(a, b) => Formula::or(nnf(a), nnf(b)),
        Formula::Implies(a, b) => Formula::or(negate(a), nnf(b)),
        Formula::Box(m, a) => Formula::boxed(m.clone(), nnf(a)),
        Formula::Diamond(m, a) => Formula::diamond(m.clone(), nnf(a)),
    }
}

/// `nnf(¬f)`.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Atom(_) => Formula::not(f.clone()),
        Formula::Not(inner) => nnf(inner),
        Formula::And(a, b) => Formula::or(negate(a), negate(b)),
        Formula::Or(a, b) => Formula::and(negate(a), negate(b)),
        Formula::Implies(a, b) => Formula::and(nnf(a), negate(b)),
        Formula::Box(m, a) => Formula::diamond(m.clone(), negate(a)),
        Formula::Diamond(m, a) => Formula::boxed(m.clone(), negate(a)),
    }
}

pub fn modal_depth(f: &Formula) -> usize {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
        Formula::Not(a) => modal_depth(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            modal_depth(a).max(modal_depth(b))
        }
        Formula::Box(_, a) | Formula::Diamond(_, a) => 1 + modal_depth(a),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{formula}` is not a conditional obligation between literals (expected L1 -> O[m] L2)")]
pub struct ShapeError {
    pub formula: String,
}

/// Complement of a literal, preferring the other value of a two-element
/// partition over a negative literal.
fn partition_complement(lit: &Formula, partitions: &[Partition]) -> Formula {
    match lit.as_literal() {
        Some((true, atom)) => partitions
            .iter()
            .find_map(|p| p.binary_complement(atom))
            .map(Formula::Atom)
            .unwrap_or_else(|| Formula::not(Formula::Atom(atom.clone()))),
        Some((false, atom)) => Formula::Atom(atom.clone()),
        None => unreachable!("caller checked literal shape"),
    }
}

/// For `L1 → □_m L2` returns `¬L2 → □_m ¬L1`, with negated atoms of
/// two-element partitions replaced by the other partition value.
pub fn derive_pseudo_contrapositive(
    norm: &Formula,
    partitions: &[Partition],
) -> Result<Formula, ShapeError> {
    let shape_error = || ShapeError {
        formula: norm.to_string(),
    };
    let Formula::Implies(antecedent, consequent) = norm else {
        return Err(shape_error());
    };
    let Formula::Box(modality, obliged) = consequent.as_ref() else {
        return Err(shape_error());
    };
    if !antecedent.is_literal() || !obliged.is_literal() {
        return Err(shape_error());
    }
    Ok(Formula::implies(
        partition_complement(obliged, partitions),
        Formula::boxed(
            modality.clone(),
            partition_complement(antecedent, partitions),
        ),
    ))
}

/// True for `L1 → □_m L2` with literal `L1`, `L2`.
pub fn is_literal_norm(f: &Formula) -> bool {
    match f {
        Formula::Implies(a, c) => match c.as_ref() {
            Formula::Box(_, l) => a.is_literal() && l.is_literal(),
            _ => false,
        },
        _ => false,
    }
}

// Binding strength used by both printers.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

struct Symbols {
    ascii: bool,
    top: &'static str,
    bottom: &'static str,
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
}

const ASCII: Symbols = Symbols {
    ascii: true,
    top: "true",
    bottom: "false",
    not: "~",
    and: " & ",
    or: " | ",
    implies: " -> ",
};

const UNICODE: Symbols = Symbols {
    ascii: false,
    top: "⊤",
    bottom: "⊥",
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
    implies: " → ",
};

fn write_modal(
    out: &mut fmt::Formatter<'_>,
    sym: &Symbols,
    obligation: bool,
    m: &ModalityId,
    body: &Formula,
) -> fmt::Result {
    if sym.ascii {
        let op = if obligation { "O" } else { "P" };
        if m.is_ought() {
            write!(out, "{op} ")
        } else {
            write!(out, "{op}[{m}] ")
        }
    } else {
        let op = if obligation { "□" } else { "◇" };
        if m.is_ought() {
            write!(out, "{op}")
        } else {
            write!(out, "{op}_{m}")?;
            // `□_sc p`, not `□_scp`.
            if matches!(body, Formula::Atom(_) | Formula::Top | Formula::Bottom) {
                out.write_str(" ")?;
            }
            Ok(())
        }
    }
}

fn write_formula(
    out: &mut fmt::Formatter<'_>,
    f: &Formula,
    sym: &Symbols,
    min_prec: u8,
) -> fmt::Result {
    let paren = precedence(f) < min_prec;
    if paren {
        out.write_str("(")?;
    }
    match f {
        Formula::Top => out.write_str(sym.top)?,
        Formula::Bottom => out.write_str(sym.bottom)?,
        Formula::Atom(a) => out.write_str(a.as_str())?,
        Formula::Not(a) => {
            out.write_str(sym.not)?;
            write_formula(out, a, sym, PREC_UNARY)?;
        }
        Formula::And(a, b) => {
            write_formula(out, a, sym, PREC_AND)?;
            out.write_str(sym.and)?;
            write_formula(out, b, sym, PREC_UNARY)?;
        }
        Formula::Or(a, b) => {
            write_formula(out, a, sym, PREC_OR)?;
            out.write_str(sym.or)?;
            write_formula(out, b, sym, PREC_AND)?;
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, sym, PREC_OR)?;
            out.write_str(sym.implies)?;
            write_formula(out, b, sym, PREC_IMPLIES)?;
        }
        Formula::Box(m, a) => {
            write_modal(out, sym, true, m, a)?;
            write_formula(out, a, sym, PREC_UNARY)?;
        }
        Formula::Diamond(m, a) => {
            write_modal(out, sym, false, m, a)?;
            write_formula(out, a, sym, PREC_UNARY)?;
        }
    }
    if paren {
        out.write_str(")")?;
    }
    Ok(())
}

/// Source syntax of the `.norm` format.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, &ASCII, 0)
    }
}

pub struct Pretty<'a>(&'a Formula);

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.0, &UNICODE, 0)
    }
}
