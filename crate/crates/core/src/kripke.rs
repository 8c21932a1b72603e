//! Finite Kripke structures and the standard satisfaction relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::alc::Role;
use crate::formula::{AtomId, Formula, ModalityId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldOrigin {
    /// The observed world `a0`.
    Named,
    /// Created as a successor of `parent`.
    Fresh { parent: usize },
    /// Produced by enumeration.
    Enumerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct World {
    pub id: usize,
    pub atoms: BTreeSet<AtomId>,
    pub origin: WorldOrigin,
}

/// Worlds `0..n`, world 0 being the designated one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KripkeModel {
    pub worlds: Vec<World>,
    pub relations: BTreeMap<ModalityId, BTreeSet<(usize, usize)>>,
}

impl KripkeModel {
    pub fn successors<'a>(&'a self, w: usize, m: &ModalityId) -> impl Iterator<Item = usize> + 'a {
        self.relations
            .get(m)
            .into_iter()
            .flat_map(move |r| r.range((w, 0)..=(w, usize::MAX)).map(|&(_, v)| v))
    }

    pub fn holds(&self, w: usize, atom: &AtomId) -> bool {
        self.worlds[w].atoms.contains(atom)
    }

    /// Every world has a successor for each of `modalities`.
    pub fn is_serial<'a>(&self, modalities: impl IntoIterator<Item = &'a ModalityId>) -> bool {
        let ms: Vec<&ModalityId> = modalities.into_iter().collect();
        (0..self.worlds.len()).all(|w| ms.iter().all(|m| self.successors(w, m).next().is_some()))
    }

    /// World `w` is among its own successors.
    pub fn has_self_loop(&self, w: usize, m: &ModalityId) -> bool {
        self.successors(w, m).any(|v| v == w)
    }
}

impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.worlds {
            let atoms: Vec<&str> = w.atoms.iter().map(AtomId::as_str).collect();
            writeln!(f, "world {}: {{{}}}", w.id, atoms.join(", "))?;
        }
        for (m, edges) in &self.relations {
            let role = Role::of(m);
            for (a, b) in edges {
                writeln!(f, "{role}: {a} -> {b}")?;
            }
        }
        Ok(())
    }
}

/// `w ⊨ □φ` iff every successor satisfies `φ`.
pub fn oracle_eval(model: &KripkeModel, world: usize, f: &Formula) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(a) => model.holds(world, a),
        Formula::Not(a) => !oracle_eval(model, world, a),
        Formula::And(a, b) => oracle_eval(model, world, a) && oracle_eval(model, world, b),
        Formula::Or(a, b) => oracle_eval(model, world, a) || oracle_eval(model, world, b),
        Formula::Implies(a, b) => !oracle_eval(model, world, a) || oracle_eval(model, world, b),
        Formula::Box(m, a) => model.successors(world, m).all(|v| oracle_eval(model, v, a)),
        Formula::Diamond(m, a) => model.successors(world, m).any(|v| oracle_eval(model, v, a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(valuations: &[&[&str]], edges: &[(usize, usize)]) -> KripkeModel {
        KripkeModel {
            worlds: valuations
                .iter()
                .enumerate()
                .map(|(id, atoms)| World {
                    id,
                    atoms: atoms.iter().map(|a| AtomId::new(*a)).collect(),
                    origin: WorldOrigin::Enumerated,
                })
                .collect(),
            relations: BTreeMap::from([(ModalityId::ought(), edges.iter().copied().collect())]),
        }
    }

    #[test]
    fn box_over_single_successor() {
        let m = model(&[&[], &["p"]], &[(0, 1), (1, 1)]);
        assert!(oracle_eval(&m, 0, &Formula::ought(Formula::atom("p"))));
        assert!(!oracle_eval(&m, 0, &Formula::atom("p")));
    }

    #[test]
    fn box_vacuous_without_successors() {
        let m = model(&[&[]], &[]);
        assert!(oracle_eval(&m, 0, &Formula::ought(Formula::atom("p"))));
        assert!(!m.is_serial([&ModalityId::ought()]));
    }

    #[test]
    fn suppression_model() {
        let m = model(
            &[&["essay_to_write", "study_late"], &["library_open", "study_late"]],
            &[(0, 1), (1, 1)],
        );
        assert!(oracle_eval(&m, 0, &Formula::atom("study_late")));
        assert!(oracle_eval(&m, 0, &Formula::ought(Formula::atom("library_open"))));
    }

    #[test]
    fn text_format() {
        let m = model(&[&["p"]], &[(0, 0)]);
        assert_eq!(m.to_string(), "world 0: {p}\nr: 0 -> 0\n");
    }
}
