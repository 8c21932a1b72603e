//! Shared fixtures: the scenario corpus, golden rendering and random
//! instance generators.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use deontic_core::alc::{translate_problem, Concept, Role};
use deontic_core::analysis::{self, Evidence, Verdict};
use deontic_core::hypertableau::{model_check, Config};
use deontic_core::kripke::oracle_eval;
use deontic_core::report::render_text;
use deontic_core::tableau::{build_tableau, render_text as render_tree};
use deontic_core::{
    parse_problem, AtomId, Engine, Formula, ModalityId, Partition, Problem, Query, QueryKind,
};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn scenario_dir() -> PathBuf {
    workspace_root().join("scenarios")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn scenario_source(name: &str) -> String {
    let path = scenario_dir().join(format!("{name}.norm"));
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn scenario(name: &str) -> Problem {
    parse_problem(&scenario_source(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Scenario names, sorted.
pub fn scenario_names() -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(scenario_dir())
        .expect("scenario directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            (path.extension()? == "norm").then(|| path.file_stem()?.to_str().map(String::from))?
        })
        .collect();
    names.sort();
    names
}

/// What `deontic translate` prints.
pub fn translate_output(p: &Problem) -> String {
    let t = translate_problem(p, &[]);
    format!("{}\n{}", t.listing(), t.clausify())
}

/// What `deontic tableau` prints, when the problem is in the fragment.
pub fn tableau_output(p: &Problem) -> Option<String> {
    build_tableau(&p.all_formulas()).ok().map(|t| render_tree(&t))
}

pub fn run_queries(p: &Problem) -> Vec<Verdict> {
    p.queries
        .iter()
        .map(|q| analysis::run_query(p, q, None, &Config::default()).expect("scenario query runs"))
        .collect()
}

/// What `deontic queries` prints, text and JSON.
pub fn queries_output(p: &Problem) -> (String, String) {
    let verdicts = run_queries(p);
    let text: Vec<String> = verdicts.iter().map(render_text).collect();
    let json: Vec<serde_json::Value> = verdicts.iter().map(deontic_core::report::to_json).collect();
    let mut json_text = serde_json::to_string_pretty(&serde_json::Value::Array(json)).unwrap();
    json_text.push('\n');
    (text.join("\n"), json_text)
}

/// Golden files of every scenario, as (file name, contents), sorted.
pub fn golden_outputs() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for name in scenario_names() {
        let p = scenario(&name);
        out.push((format!("{name}.translate.txt"), translate_output(&p)));
        if let Some(t) = tableau_output(&p) {
            out.push((format!("{name}.tableau.txt"), t));
        }
        if !p.queries.is_empty() {
            let (text, json) = queries_output(&p);
            out.push((format!("{name}.queries.txt"), text));
            out.push((format!("{name}.queries.json"), json));
        }
    }
    out
}

pub fn update_requested() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some_and(|v| v != "0")
}

pub fn write_goldens(files: &[(String, String)]) {
    let dir = golden_dir();
    fs::create_dir_all(&dir).unwrap();
    for (name, body) in files {
        fs::write(dir.join(name), body).unwrap();
    }
}

/// Names of golden files that are missing or differ.
pub fn golden_mismatches(files: &[(String, String)]) -> Vec<String> {
    let dir = golden_dir();
    let mut bad: Vec<String> = files
        .iter()
        .filter(|(name, body)| fs::read_to_string(dir.join(name)).ok().as_deref() != Some(body))
        .map(|(name, _)| name.clone())
        .collect();
    let expected: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    if let Ok(entries) = fs::read_dir(&dir) {
        for e in entries.flatten() {
            let n = e.file_name().to_string_lossy().into_owned();
            if !expected.contains(&n.as_str()) {
                bad.push(format!("{n} (stale)"));
            }
        }
    }
    bad
}

/// Formulae a model of the verdict's evidence has to satisfy at world 0.
pub fn evidence_formulas(p: &Problem, v: &Verdict) -> Vec<Formula> {
    let mut fs = p.kd_formulas();
    fs.extend(query_extra(v));
    fs
}

/// The formula the query adds to the problem when a countermodel or a
/// model with a goal is reported.
pub fn query_extra(v: &Verdict) -> Vec<Formula> {
    let refuting = v.answer != deontic_core::Answer::Inconsistent;
    match &v.query.kind {
        QueryKind::MustCheck {
            obligation,
            modality,
        } if refuting => vec![Formula::not(Formula::boxed(modality.clone(), obligation.clone()))],
        QueryKind::Entails { goal } if refuting => {
            vec![deontic_core::formula::nnf(&Formula::not(goal.clone()))]
        }
        QueryKind::FindModel { goal: Some(g) } => vec![g.clone()],
        _ => Vec::new(),
    }
}

/// Independent check of every model in the verdict: DL-clauses, the KD
/// formulae at world 0, and seriality of every modality.
pub fn check_models(p: &Problem, v: &Verdict) -> Result<usize, String> {
    let mut n = 0;
    for e in &v.evidence {
        if let Evidence::Model { report, .. } = e {
            let extra = query_extra(v);
            let kb = translate_problem(p, &extra).clausify();
            model_check(&kb, &report.model)?;
            for f in evidence_formulas(p, v) {
                if !oracle_eval(&report.model, 0, &f) {
                    return Err(format!("{f} fails at world 0"));
                }
            }
            if !report.model.is_serial(&p.modalities) {
                return Err("model is not serial".into());
            }
            n += 1;
        }
    }
    Ok(n)
}

// ---------------------------------------------------------------------
// Random generators

pub fn literal(atoms: &[AtomId], rng: &mut impl Rng) -> Formula {
    let a = Formula::Atom(atoms.choose(rng).unwrap().clone());
    if rng.gen_bool(0.5) {
        Formula::not(a)
    } else {
        a
    }
}

/// Formula of modal depth at most `depth` over `atoms` and `modalities`.
pub fn formula(atoms: &[AtomId], modalities: &[ModalityId], depth: usize, size: usize, rng: &mut impl Rng) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..12) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => literal(atoms, rng),
        };
    }
    let max = if depth > 0 { 6 } else { 4 };
    match rng.gen_range(0..max) {
        0 => Formula::not(formula(atoms, modalities, depth, size - 1, rng)),
        1..=3 => {
            let left = rng.gen_range(1..size);
            let a = formula(atoms, modalities, depth, left, rng);
            let b = formula(atoms, modalities, depth, size - left, rng);
            match rng.gen_range(0..3) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                _ => Formula::implies(a, b),
            }
        }
        k => {
            let m = modalities.choose(rng).unwrap().clone();
            let body = formula(atoms, modalities, depth - 1, size - 1, rng);
            if k == 4 {
                Formula::boxed(m, body)
            } else {
                Formula::diamond(m, body)
            }
        }
    }
}

/// Formula in the literal-tableau fragment: boolean combinations of
/// literals, `□L` and `◇L`.
pub fn fragment_formula(atoms: &[AtomId], modalities: &[ModalityId], size: usize, rng: &mut impl Rng) -> Formula {
    if size <= 1 {
        let l = literal(atoms, rng);
        let m = modalities.choose(rng).unwrap().clone();
        return match rng.gen_range(0..6) {
            0 | 1 => Formula::boxed(m, l),
            2 => Formula::diamond(m, l),
            _ => l,
        };
    }
    match rng.gen_range(0..4) {
        0 => Formula::not(fragment_formula(atoms, modalities, size - 1, rng)),
        _ => {
            let left = rng.gen_range(1..size);
            let a = fragment_formula(atoms, modalities, left, rng);
            let b = fragment_formula(atoms, modalities, size - left, rng);
            match rng.gen_range(0..3) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                _ => Formula::implies(a, b),
            }
        }
    }
}

/// Clause of one or two literals.
pub fn clause(atoms: &[AtomId], rng: &mut impl Rng) -> Formula {
    let l = literal(atoms, rng);
    if rng.gen_bool(0.3) {
        Formula::or(l, literal(atoms, rng))
    } else {
        l
    }
}

/// Norm in one of the shapes used by normative systems: `L1 → □L2`,
/// `L1 ∧ L2 → □L3`, `□L`, `◇L`, `L1 → □(L2 ∨ L3)` is left out since it
/// leaves the fragment.
pub fn norm(atoms: &[AtomId], modalities: &[ModalityId], rng: &mut impl Rng) -> Formula {
    let m = modalities.choose(rng).unwrap().clone();
    match rng.gen_range(0..6) {
        0 | 1 => Formula::implies(literal(atoms, rng), Formula::boxed(m, literal(atoms, rng))),
        2 => Formula::implies(
            Formula::and(literal(atoms, rng), literal(atoms, rng)),
            Formula::boxed(m, literal(atoms, rng)),
        ),
        3 => Formula::boxed(m, literal(atoms, rng)),
        4 => Formula::diamond(m, literal(atoms, rng)),
        _ => fragment_formula(atoms, modalities, 3, rng),
    }
}

/// A problem over at most four atoms: an optional binary or ternary
/// partition, facts, an observation, up to three norms, one or two
/// modalities.
pub fn rich_problem(rng: &mut impl Rng) -> Problem {
    let mut p = Problem::new();
    if rng.gen_bool(0.3) {
        p.modalities.insert(ModalityId::new("pr"));
    }
    let partition_values: usize = match rng.gen_range(0..3) {
        0 => 0,
        1 => 2,
        _ => 3,
    };
    if partition_values > 0 {
        let values = ["x", "y", "z"];
        p.add_partition(Partition::new("s", values[..partition_values].iter().copied()));
    }
    let free = 4 - partition_values;
    let free = rng.gen_range(1.max(free.saturating_sub(1))..=free);
    for i in 0..free {
        p.atoms.insert(AtomId::new(format!("a{i}")));
    }
    let atoms: Vec<AtomId> = p.atoms.iter().cloned().collect();
    let modalities: Vec<ModalityId> = p.modalities.iter().cloned().collect();
    for _ in 0..rng.gen_range(0..2) {
        p.add_fact(clause(&atoms, rng));
    }
    if rng.gen_bool(0.7) {
        p.observe(literal(&atoms, rng));
    }
    for _ in 0..rng.gen_range(1..=3) {
        p.add_norm(norm(&atoms, &modalities, rng));
    }
    p
}

/// A random problem exercising every statement of the format, for
/// round-tripping.
pub fn any_problem<R: Rng>(rng: &mut R) -> Problem {
    let mut p = Problem::new();
    for label in ["pr", "sc"] {
        if rng.gen_bool(0.3) {
            p.modalities.insert(ModalityId::new(label));
        }
    }
    for (i, site) in ["s", "t"].iter().enumerate() {
        if rng.gen_bool(0.4) {
            let n = rng.gen_range(2..=3);
            let values: Vec<String> = (0..n).map(|v| format!("v{i}{v}")).collect();
            p.add_partition(Partition::new(*site, values));
        }
    }
    let plain = ["a", "b", "under_21", "c(x,1)", "p_q"];
    for a in plain.iter().take(rng.gen_range(1..=plain.len())) {
        p.atoms.insert(AtomId::new(*a));
    }
    let atoms: Vec<AtomId> = p.atoms.iter().cloned().collect();
    let modalities: Vec<ModalityId> = p.modalities.iter().cloned().collect();
    let in_fragment = rng.gen_bool(0.5);
    let any = |rng: &mut R| {
        if in_fragment {
            fragment_formula(&atoms, &modalities, rng.gen_range(1..5), rng)
        } else {
            formula(&atoms, &modalities, 2, rng.gen_range(1..7), rng)
        }
    };
    for _ in 0..rng.gen_range(0..3) {
        let f = any(rng);
        p.add_fact(f);
    }
    for _ in 0..rng.gen_range(0..2) {
        p.observe(literal(&atoms, rng));
    }
    for _ in 0..rng.gen_range(0..4) {
        let f = if rng.gen_bool(0.5) { norm(&atoms, &modalities, rng) } else { any(rng) };
        p.add_norm(f);
    }
    if rng.gen_bool(0.3) {
        p.options.tbox_constraints = true;
    }
    if rng.gen_bool(0.3) {
        p.apply_contrapose();
    }
    let engines = [None, Some(Engine::Hypertableau)];
    let fragment_engines = [None, Some(Engine::Tableau), Some(Engine::Hypertableau), Some(Engine::Both)];
    for _ in 0..rng.gen_range(0..4) {
        let kind = match rng.gen_range(0..5) {
            0 => QueryKind::Consistency,
            1 => QueryKind::MustCheck {
                obligation: clause(&atoms, rng),
                modality: modalities.choose(rng).unwrap().clone(),
            },
            2 if in_fragment => QueryKind::Obligations,
            3 => QueryKind::FindModel {
                goal: rng.gen_bool(0.5).then(|| literal(&atoms, rng)),
            },
            _ => QueryKind::Entails {
                goal: literal(&atoms, rng),
            },
        };
        let engine = if in_fragment {
            *fragment_engines.choose(rng).unwrap()
        } else {
            *engines.choose(rng).unwrap()
        };
        let engine = if matches!(kind, QueryKind::Obligations) { engine.or(Some(Engine::Tableau)) } else { engine };
        p.queries.push(Query { kind, engine });
    }
    p
}

/// Concept of role depth at most `depth` over atomic names `names` and
/// roles `r` and `r_pr`.
pub fn concept(names: &[&str], depth: usize, size: usize, rng: &mut impl Rng) -> Concept {
    if size <= 1 {
        return match rng.gen_range(0..10) {
            0 => Concept::Top,
            1 => Concept::Bottom,
            _ => Concept::atomic(*names.choose(rng).unwrap()),
        };
    }
    let max = if depth > 0 { 6 } else { 4 };
    match rng.gen_range(0..max) {
        0 => Concept::not(concept(names, depth, size - 1, rng)),
        1..=3 => {
            let left = rng.gen_range(1..size);
            let a = concept(names, depth, left, rng);
            let b = concept(names, depth, size - left, rng);
            if rng.gen_bool(0.5) {
                Concept::and(a, b)
            } else {
                Concept::or(a, b)
            }
        }
        k => {
            let role = if rng.gen_bool(0.7) {
                Role::of(&ModalityId::ought())
            } else {
                Role::of(&ModalityId::new("pr"))
            };
            let body = concept(names, depth - 1, size - 1, rng);
            if k == 4 {
                Concept::forall(role, body)
            } else {
                Concept::exists(role, body)
            }
        }
    }
}
