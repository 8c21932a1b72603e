//! Brute-force KD satisfiability over small Kripke structures.
//!
//! Structures are enumerated by world count, then by successor relation
//! (one adjacency bitmask per modality, ascending, last modality fastest),
//! then by valuation read as a binary counter over `world * |atoms| + atom`.
//! The first structure whose world 0 satisfies every formula is returned.
//! Valuations are evaluated 64 at a time, one bit per valuation.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::{AtomId, Formula, ModalityId};
use crate::kripke::{KripkeModel, World, WorldOrigin};
use crate::problem::Problem;

pub const MAX_ATOMS: usize = 6;
pub const MAX_WORLDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_worlds: usize,
    pub atoms: Vec<AtomId>,
    pub modalities: Vec<ModalityId>,
}

impl OracleConfig {
    /// Atoms and modalities of `formulas`, at least `ought`, three worlds.
    pub fn for_formulas(formulas: &[Formula]) -> Self {
        let mut atoms = BTreeSet::new();
        let mut modalities = BTreeSet::from([ModalityId::ought()]);
        for f in formulas {
            atoms.extend(f.atoms());
            modalities.extend(f.modalities());
        }
        OracleConfig {
            max_worlds: 3,
            atoms: atoms.into_iter().collect(),
            modalities: modalities.into_iter().collect(),
        }
    }

    pub fn with_worlds(mut self, max_worlds: usize) -> Self {
        self.max_worlds = max_worlds;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardExceeded {
    #[error("{0} atoms exceed the oracle limit of {MAX_ATOMS}")]
    Atoms(usize),
    #[error("world bound {0} outside 1..={MAX_WORLDS}")]
    Worlds(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Sat(KripkeModel),
    Unsat,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat(_))
    }
}

#[derive(Clone, Copy)]
enum Node {
    Top,
    Bottom,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Box(usize, usize),
    Diamond(usize, usize),
}

struct Compiled {
    nodes: Vec<Node>,
    roots: Vec<usize>,
}

fn compile(formulas: &[Formula], atoms: &[AtomId], modalities: &[ModalityId]) -> Compiled {
    fn go(f: &Formula, atoms: &[AtomId], mods: &[ModalityId], nodes: &mut Vec<Node>) -> usize {
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Bottom => Node::Bottom,
            Formula::Atom(a) => Node::Atom(atoms.iter().position(|x| x == a).expect("atom in config")),
            Formula::Not(a) => Node::Not(go(a, atoms, mods, nodes)),
            Formula::And(a, b) => {
                let (x, y) = (go(a, atoms, mods, nodes), go(b, atoms, mods, nodes));
                Node::And(x, y)
            }
            Formula::Or(a, b) => {
                let (x, y) = (go(a, atoms, mods, nodes), go(b, atoms, mods, nodes));
                Node::Or(x, y)
            }
            Formula::Implies(a, b) => {
                let x = go(a, atoms, mods, nodes);
                nodes.push(Node::Not(x));
                let nx = nodes.len() - 1;
                let y = go(b, atoms, mods, nodes);
                Node::Or(nx, y)
            }
            Formula::Box(m, a) => {
                let mi = mods.iter().position(|x| x == m).expect("modality in config");
                Node::Box(mi, go(a, atoms, mods, nodes))
            }
            Formula::Diamond(m, a) => {
                let mi = mods.iter().position(|x| x == m).expect("modality in config");
                Node::Diamond(mi, go(a, atoms, mods, nodes))
            }
        };
        nodes.push(node);
        nodes.len() - 1
    }
    let mut nodes = Vec::new();
    let roots = formulas
        .iter()
        .map(|f| go(f, atoms, modalities, &mut nodes))
        .collect();
    Compiled { nodes, roots }
}

/// Bit `v` of `PATTERNS[b]` is bit `b` of `v`.
const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn serial_masks(n: usize) -> Vec<u32> {
    let row = (1u32 << n) - 1;
    (0u32..1 << (n * n))
        .filter(|mask| (0..n).all(|i| (mask >> (i * n)) & row != 0))
        .collect()
}

fn all_reachable(n: usize, masks: &[u32]) -> bool {
    let union = masks.iter().fold(0u32, |a, m| a | m);
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0u32;
        for i in 0..n {
            if frontier >> i & 1 == 1 {
                next |= (union >> (i * n)) & ((1 << n) - 1);
            }
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == (1 << n) - 1
}

struct Evaluator<'a> {
    compiled: &'a Compiled,
    n: usize,
    k: usize,
    /// succ[m][w] lists the successors of w.
    succ: Vec<Vec<Vec<usize>>>,
    values: Vec<[u64; MAX_WORLDS]>,
}

impl Evaluator<'_> {
    /// Mask over the 64 valuations of `chunk` for which world 0 satisfies
    /// every root formula.
    fn run(&mut self, chunk: u64) -> u64 {
        let (n, k) = (self.n, self.k);
        for (i, node) in self.compiled.nodes.iter().enumerate() {
            let mut out = [0u64; MAX_WORLDS];
            for (w, slot) in out.iter_mut().enumerate().take(n) {
                *slot = match *node {
                    Node::Top => !0,
                    Node::Bottom => 0,
                    Node::Atom(j) => {
                        let b = w * k + j;
                        if b < 6 {
                            PATTERNS[b]
                        } else if chunk >> (b - 6) & 1 == 1 {
                            !0
                        } else {
                            0
                        }
                    }
                    Node::Not(a) => !self.values[a][w],
                    Node::And(a, b) => self.values[a][w] & self.values[b][w],
                    Node::Or(a, b) => self.values[a][w] | self.values[b][w],
                    Node::Box(m, a) => self.succ[m][w]
                        .iter()
                        .fold(!0, |acc, &v| acc & self.values[a][v]),
                    Node::Diamond(m, a) => self.succ[m][w]
                        .iter()
                        .fold(0, |acc, &v| acc | self.values[a][v]),
                };
            }
            self.values[i] = out;
        }
        self.compiled
            .roots
            .iter()
            .fold(!0, |acc, &r| acc & self.values[r][0])
    }
}

/// First model in canonical order whose world 0 satisfies all `formulas`.
pub fn oracle_sat(formulas: &[Formula], cfg: &OracleConfig) -> Result<OracleVerdict, GuardExceeded> {
    let mut atoms: BTreeSet<AtomId> = cfg.atoms.iter().cloned().collect();
    let mut modalities: BTreeSet<ModalityId> = cfg.modalities.iter().cloned().collect();
    for f in formulas {
        atoms.extend(f.atoms());
        modalities.extend(f.modalities());
    }
    let atoms: Vec<AtomId> = atoms.into_iter().collect();
    let modalities: Vec<ModalityId> = modalities.into_iter().collect();
    if atoms.len() > MAX_ATOMS {
        return Err(GuardExceeded::Atoms(atoms.len()));
    }
    if cfg.max_worlds == 0 || cfg.max_worlds > MAX_WORLDS {
        return Err(GuardExceeded::Worlds(cfg.max_worlds));
    }
    let compiled = compile(formulas, &atoms, &modalities);
    let k = atoms.len();

    for n in 1..=cfg.max_worlds {
        let masks = serial_masks(n);
        let bits = n * k;
        let (chunks, valid) = if bits >= 6 {
            (1u64 << (bits - 6), !0u64)
        } else {
            (1, (1u64 << (1 << bits)) - 1)
        };
        let mut choice = vec![0usize; modalities.len()];
        loop {
            let current: Vec<u32> = choice.iter().map(|&c| masks[c]).collect();
            if all_reachable(n, &current) {
                let succ = current
                    .iter()
                    .map(|&mask| {
                        (0..n)
                            .map(|i| (0..n).filter(|&j| mask >> (i * n + j) & 1 == 1).collect())
                            .collect()
                    })
                    .collect();
                let mut ev = Evaluator {
                    compiled: &compiled,
                    n,
                    k,
                    succ,
                    values: vec![[0; MAX_WORLDS]; compiled.nodes.len()],
                };
                for chunk in 0..chunks {
                    let hits = ev.run(chunk) & valid;
                    if hits != 0 {
                        let v = chunk * 64 + u64::from(hits.trailing_zeros());
                        return Ok(OracleVerdict::Sat(build_model(
                            n, &atoms, &modalities, &current, v,
                        )));
                    }
                }
            }
            // Odometer over relation choices, last modality fastest.
            let mut done = true;
            for i in (0..choice.len()).rev() {
                choice[i] += 1;
                if choice[i] < masks.len() {
                    done = false;
                    break;
                }
                choice[i] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(OracleVerdict::Unsat)
}

fn build_model(
    n: usize,
    atoms: &[AtomId],
    modalities: &[ModalityId],
    masks: &[u32],
    valuation: u64,
) -> KripkeModel {
    let k = atoms.len();
    let worlds = (0..n)
        .map(|w| World {
            id: w,
            atoms: (0..k)
                .filter(|j| valuation >> (w * k + j) & 1 == 1)
                .map(|j| atoms[j].clone())
                .collect(),
            origin: if w == 0 {
                WorldOrigin::Named
            } else {
                WorldOrigin::Enumerated
            },
        })
        .collect();
    let relations: BTreeMap<ModalityId, BTreeSet<(usize, usize)>> = modalities
        .iter()
        .zip(masks)
        .map(|(m, &mask)| {
            let edges = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| mask >> (i * n + j) & 1 == 1)
                .collect();
            (m.clone(), edges)
        })
        .collect();
    KripkeModel { worlds, relations }
}

/// [`oracle_sat`] of the KD reading of `p`.
pub fn oracle_problem(p: &Problem, max_worlds: usize) -> Result<OracleVerdict, GuardExceeded> {
    let formulas = p.kd_formulas();
    let mut cfg = OracleConfig::for_formulas(&formulas).with_worlds(max_worlds);
    cfg.modalities = p.modalities.iter().cloned().collect();
    oracle_sat(&formulas, &cfg)
}
