use indexmap::IndexMap;

use crate::alc::{BodyAtom, ClausalKB, Concept, DLClause, HeadAtom, Role, Term};
use crate::formula::AtomId;
use crate::kripke::KripkeModel;

/// Truth of `c` at world `w`; auxiliary names are read through `names`.
pub fn eval_concept(
    model: &KripkeModel,
    w: usize,
    c: &Concept,
    names: &IndexMap<String, Concept>,
) -> bool {
    match c {
        Concept::Top => true,
        Concept::Bottom => false,
        Concept::Atomic(n) => match names.get(n) {
            Some(def) => eval_concept(model, w, def, names),
            None => model.holds(w, &AtomId::new(n.clone())),
        },
        Concept::Not(a) => !eval_concept(model, w, a, names),
        Concept::And(a, b) => eval_concept(model, w, a, names) && eval_concept(model, w, b, names),
        Concept::Or(a, b) => eval_concept(model, w, a, names) || eval_concept(model, w, b, names),
        Concept::ForAll(r, a) => model
            .successors(w, r.modality())
            .all(|v| eval_concept(model, v, a, names)),
        Concept::Exists(r, a) => model
            .successors(w, r.modality())
            .any(|v| eval_concept(model, v, a, names)),
    }
}

fn name_holds(model: &KripkeModel, w: usize, n: &str, names: &IndexMap<String, Concept>) -> bool {
    eval_concept(model, w, &Concept::atomic(n), names)
}

fn clause_holds_at(
    model: &KripkeModel,
    kb: &ClausalKB,
    clause: &DLClause,
    x: usize,
) -> Result<(), String> {
    let names = &kb.name_table;
    for a in &clause.body {
        if let BodyAtom::Concept(n) = a {
            if !name_holds(model, x, n, names) {
                return Ok(());
            }
        }
    }
    let roles: Vec<&Role> = clause
        .body
        .iter()
        .filter_map(|a| match a {
            BodyAtom::Role(r, _) => Some(r),
            BodyAtom::Concept(_) => None,
        })
        .collect();
    let lists: Vec<Vec<usize>> = roles
        .iter()
        .map(|r| model.successors(x, r.modality()).collect())
        .collect();
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let ys: Vec<usize> = idx.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
        let sat = clause.head.iter().any(|h| match h {
            HeadAtom::Concept(n, Term::X) => name_holds(model, x, n, names),
            HeadAtom::Concept(n, Term::Y(i)) => name_holds(model, ys[i - 1], n, names),
            HeadAtom::Exists(r, n) => model
                .successors(x, r.modality())
                .any(|v| n.as_ref().is_none_or(|n| name_holds(model, v, n, names))),
        });
        if !sat {
            return Err(format!("clause `{clause}` fails at world {x} with successors {ys:?}"));
        }
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(());
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

/// Every assertion at world 0, every clause at every world, and seriality
/// of the serial roles.
pub fn model_check(kb: &ClausalKB, model: &KripkeModel) -> Result<(), String> {
    if model.worlds.is_empty() {
        return Err("model has no worlds".into());
    }
    for a in &kb.assertions {
        if !name_holds(model, 0, a, &kb.name_table) {
            return Err(format!("assertion {a}(a0) fails"));
        }
    }
    for w in 0..model.worlds.len() {
        for c in &kb.clauses {
            clause_holds_at(model, kb, c, w)?;
        }
        for r in &kb.serial_roles {
            if model.successors(w, r.modality()).next().is_none() {
                return Err(format!("world {w} has no {r}-successor"));
            }
        }
    }
    Ok(())
}
