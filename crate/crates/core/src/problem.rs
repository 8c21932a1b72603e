//! In-memory scenario model: partitions, background knowledge, norms, queries.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::formula::{derive_pseudo_contrapositive, is_literal_norm, AtomId, Formula, ModalityId};

/// A finite set of mutually exclusive, jointly exhaustive values for one site
/// (e.g. the letter side `l` of a card with values `A`, `K`). Each value `v`
/// generates the atom `c(site,v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub site: String,
    pub values: Vec<String>,
}

impl Partition {
    pub fn new<S: Into<String>>(site: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        Partition {
            site: site.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn atom(&self, value: &str) -> AtomId {
        AtomId::new(format!("c({},{})", self.site, value))
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.values.iter().map(|v| self.atom(v))
    }

    /// For a two-element partition, the atom of the other value.
    pub fn binary_complement(&self, atom: &AtomId) -> Option<AtomId> {
        if self.values.len() != 2 {
            return None;
        }
        let (a, b) = (self.atom(&self.values[0]), self.atom(&self.values[1]));
        if *atom == a {
            Some(b)
        } else if *atom == b {
            Some(a)
        } else {
            None
        }
    }

    /// `⊤ → c(s,v1) ∨ … ∨ c(s,vn)`.
    pub fn exhaustiveness(&self) -> Formula {
        Formula::implies(
            Formula::Top,
            Formula::disjunction(self.atoms().map(Formula::Atom)),
        )
    }

    /// `c(s,vi) ∧ c(s,vj) → ⊥` for every `i < j`.
    pub fn exclusivity(&self) -> Vec<Formula> {
        let atoms: Vec<AtomId> = self.atoms().collect();
        let mut out = Vec::new();
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                out.push(Formula::implies(
                    Formula::and(Formula::Atom(atoms[i].clone()), Formula::Atom(atoms[j].clone())),
                    Formula::Bottom,
                ));
            }
        }
        out
    }

    /// Exhaustiveness followed by the exclusivity axioms.
    pub fn axioms(&self) -> Vec<Formula> {
        let mut out = vec![self.exhaustiveness()];
        out.extend(self.exclusivity());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Generated from a partition declaration.
    Partition,
    Fact,
    /// The observed situation.
    Observation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BackgroundItem {
    pub formula: Formula,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Norm {
    pub formula: Formula,
    /// Added by `option contrapose`; not written back by the renderer.
    pub derived: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Tableau,
    Hypertableau,
    Both,
}

impl Engine {
    pub fn uses_tableau(self) -> bool {
        matches!(self, Engine::Tableau | Engine::Both)
    }

    pub fn uses_hypertableau(self) -> bool {
        matches!(self, Engine::Hypertableau | Engine::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            Engine::Tableau => "tableau",
            Engine::Hypertableau => "hypertableau",
            Engine::Both => "both",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "tableau" => Some(Engine::Tableau),
            "hypertableau" => Some(Engine::Hypertableau),
            "both" => Some(Engine::Both),
            _ => None,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryKind {
    Consistency,
    MustCheck {
        obligation: Formula,
        modality: ModalityId,
    },
    Obligations,
    FindModel {
        goal: Option<Formula>,
    },
    Entails {
        goal: Formula,
    },
}

impl QueryKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            QueryKind::Consistency => "consistency",
            QueryKind::MustCheck { .. } => "turn",
            QueryKind::Obligations => "obligations",
            QueryKind::FindModel { .. } => "model",
            QueryKind::Entails { .. } => "entails",
        }
    }

    /// Engine used when the query does not name one.
    pub fn default_engine(&self) -> Engine {
        match self {
            QueryKind::Obligations => Engine::Tableau,
            _ => Engine::Hypertableau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Query {
    pub kind: QueryKind,
    pub engine: Option<Engine>,
}

impl Query {
    pub fn new(kind: QueryKind) -> Self {
        Query { kind, engine: None }
    }

    pub fn engine(&self) -> Engine {
        self.engine.unwrap_or_else(|| self.kind.default_engine())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Options {
    /// Add the pseudo-contrapositive of every literal norm.
    pub contrapose: bool,
    /// Put partition axioms into the TBox instead of asserting them at the
    /// observed world and under every obligation.
    pub tbox_constraints: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Problem {
    pub atoms: BTreeSet<AtomId>,
    pub partitions: Vec<Partition>,
    pub modalities: BTreeSet<ModalityId>,
    pub background: Vec<BackgroundItem>,
    pub norms: Vec<Norm>,
    pub queries: Vec<Query>,
    pub options: Options,
}

impl Problem {
    /// Empty problem over the default modality.
    pub fn new() -> Self {
        Problem {
            modalities: BTreeSet::from([ModalityId::ought()]),
            ..Default::default()
        }
    }

    /// Declares a partition and appends its axioms to the background.
    pub fn add_partition(&mut self, partition: Partition) {
        self.atoms.extend(partition.atoms());
        for formula in partition.axioms() {
            self.background.push(BackgroundItem {
                formula,
                origin: Origin::Partition,
            });
        }
        self.partitions.push(partition);
    }

    pub fn add_fact(&mut self, formula: Formula) {
        self.background.push(BackgroundItem {
            formula,
            origin: Origin::Fact,
        });
    }

    pub fn observe(&mut self, formula: Formula) {
        self.background.push(BackgroundItem {
            formula,
            origin: Origin::Observation,
        });
    }

    pub fn add_norm(&mut self, formula: Formula) {
        self.norms.push(Norm {
            formula,
            derived: false,
        });
    }

    pub fn observations(&self) -> impl Iterator<Item = &Formula> {
        self.background
            .iter()
            .filter(|b| b.origin == Origin::Observation)
            .map(|b| &b.formula)
    }

    /// Background with observations hoisted to the front; this is the order
    /// used by the tableau and by the concept listing.
    pub fn background_formulas(&self) -> Vec<Formula> {
        let obs = self.background.iter().filter(|b| b.origin == Origin::Observation);
        let rest = self.background.iter().filter(|b| b.origin != Origin::Observation);
        obs.chain(rest).map(|b| b.formula.clone()).collect()
    }

    pub fn norm_formulas(&self) -> Vec<Formula> {
        self.norms.iter().map(|n| n.formula.clone()).collect()
    }

    /// `B ∪ N` in tableau order.
    pub fn all_formulas(&self) -> Vec<Formula> {
        let mut out = self.background_formulas();
        out.extend(self.norm_formulas());
        out
    }

    /// Every partition axiom, flat.
    pub fn partition_axioms(&self) -> Vec<Formula> {
        self.partitions.iter().flat_map(Partition::axioms).collect()
    }

    /// `B ∪ N` plus `□_m α` for every partition axiom `α` and modality `m`:
    /// the formula set whose KD models are the models of the problem.
    pub fn kd_formulas(&self) -> Vec<Formula> {
        let mut out = self.all_formulas();
        let axioms = self.partition_axioms();
        for m in &self.modalities {
            for ax in &axioms {
                out.push(Formula::boxed(m.clone(), ax.clone()));
            }
        }
        out
    }

    /// Same problem without norms.
    pub fn background_only(&self) -> Problem {
        Problem {
            norms: Vec::new(),
            queries: Vec::new(),
            ..self.clone()
        }
    }

    /// Appends the pseudo-contrapositive of each literal norm right after it,
    /// skipping ones already present.
    pub fn apply_contrapose(&mut self) {
        let sources: Vec<Norm> = self.norms.drain(..).filter(|n| !n.derived).collect();
        let mut result: Vec<Norm> = Vec::with_capacity(sources.len() * 2);
        for norm in &sources {
            result.push(norm.clone());
            if !is_literal_norm(&norm.formula) {
                continue;
            }
            let Ok(derived) = derive_pseudo_contrapositive(&norm.formula, &self.partitions) else {
                continue;
            };
            let present = sources.iter().chain(result.iter()).any(|n| n.formula == derived);
            if !present {
                result.push(Norm {
                    formula: derived,
                    derived: true,
                });
            }
        }
        self.norms = result;
        self.options.contrapose = true;
    }

    /// Every atom mentioned by a formula of the problem.
    pub fn referenced_atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        for f in self.background.iter().map(|b| &b.formula).chain(self.norms.iter().map(|n| &n.formula)) {
            f.collect_atoms(&mut out);
        }
        out
    }
}
