//! The `.norm` scenario format.
//!
//! Line-oriented statements, each ending at `;` or a newline (newlines
//! inside parentheses do not count); `#` starts a comment:
//!
//! ```text
//! modality sc                      # declare a modality (default: ought)
//! partition l: A|K                 # atoms c(l,A), c(l,K) + card axioms
//! atom under_21, drink_beer
//! fact ~a | b
//! observe c(l,A)
//! norm c(l,A) => O c(n,4)          # sugar for c(l,A) -> O c(n,4)
//! query turn[modality=sc, engine=both] ~drink_beer
//! option contrapose
//! ```
//!
//! Formula syntax, loosest first: `->` (right associative), `|`, `&`, and
//! the prefix operators `~`, `O[m]`, `P[m]`; constants `true`, `false`.
//! `O` and `P` without a label use the `ought` modality. `O`, `P`, `true`
//! and `false` are reserved and cannot name atoms.

mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{modal_depth, AtomId, Formula, ModalityId};
use crate::problem::{Engine, Origin, Problem, QueryKind};
use crate::tableau::{check_fragment, TableauError};

use parser::{Located, Parser, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: syntax error: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationErrorKind {
    #[error("undeclared atom `{0}`")]
    UndeclaredAtom(String),
    #[error("undeclared modality `{0}`")]
    UndeclaredModality(String),
    #[error("partition site `{0}` declared twice")]
    DuplicatePartition(String),
    #[error("partition `{0}` needs at least two distinct values")]
    DegeneratePartition(String),
    #[error("unknown option `{0}` (expected `contrapose` or `tbox-constraints`)")]
    UnknownOption(String),
    #[error("nested obligation `{0}` is outside the tableau fragment (use engine=hypertableau)")]
    NestedObligation(String),
    #[error("`{0}` puts a non-literal under a modal operator, which the tableau cannot keep as a boxed literal")]
    NonLiteralUnderBox(String),
    #[error("obligation `{0}` must be a literal or a disjunction of literals")]
    ObligationShape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ValidationError {
    pub line: usize,
    pub column: usize,
    pub kind: ValidationErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("{0}")]
    Validation(#[from] ValidationError),
}

/// True for a literal or a disjunction of literals.
pub fn is_clause(f: &Formula) -> bool {
    match f {
        Formula::Or(a, b) => is_clause(a) && is_clause(b),
        other => other.is_literal(),
    }
}

/// Rejects formulas the literal tableau cannot process, with the
/// dedicated nesting diagnostic.
pub fn tableau_diagnostic(f: &Formula) -> Option<ValidationErrorKind> {
    if modal_depth(f) > 1 {
        return Some(ValidationErrorKind::NestedObligation(f.to_string()));
    }
    match check_fragment(f) {
        Ok(()) => None,
        Err(TableauError::NestedModality(_)) => {
            Some(ValidationErrorKind::NestedObligation(f.to_string()))
        }
        Err(TableauError::NonLiteralUnderBox(_)) => {
            Some(ValidationErrorKind::NonLiteralUnderBox(f.to_string()))
        }
    }
}

pub fn parse_problem(source: &str) -> Result<Problem, ParseError> {
    let toks = lexer::tokenize(source).map_err(|e| SyntaxError {
        line: e.line,
        column: e.column,
        expected: vec!["a token".into()],
        found: format!("`{}`", e.found),
    })?;
    let statements = Parser::new(toks).statements()?;
    build(statements)
}

/// Parses a standalone formula in `.norm` syntax.
pub fn parse_formula(source: &str) -> Result<Formula, SyntaxError> {
    let toks = lexer::tokenize(source).map_err(|e| SyntaxError {
        line: e.line,
        column: e.column,
        expected: vec!["a token".into()],
        found: format!("`{}`", e.found),
    })?;
    let mut p = Parser::new(toks);
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

fn build(statements: Vec<Located<Statement>>) -> Result<Problem, ParseError> {
    let err = |s: &Located<Statement>, kind| ValidationError {
        line: s.line,
        column: s.column,
        kind,
    };

    let mut problem = Problem::default();
    let mut declared_modalities = BTreeSet::new();
    let mut contrapose = false;

    for s in &statements {
        match &s.value {
            Statement::Modality(m) => {
                declared_modalities.insert(m.clone());
            }
            Statement::Partition(p) => {
                if problem.partitions.iter().any(|q| q.site == p.site) {
                    return Err(err(s, ValidationErrorKind::DuplicatePartition(p.site.clone())).into());
                }
                let distinct: BTreeSet<&String> = p.values.iter().collect();
                if distinct.len() < 2 || distinct.len() != p.values.len() {
                    return Err(err(s, ValidationErrorKind::DegeneratePartition(p.site.clone())).into());
                }
                problem.add_partition(p.clone());
            }
            Statement::Atoms(names) => {
                problem.atoms.extend(names.iter().map(AtomId::new));
            }
            Statement::Fact(f) => problem.add_fact(f.clone()),
            Statement::Observe(f) => problem.observe(f.clone()),
            Statement::Norm(f) => problem.add_norm(f.clone()),
            Statement::Query(q) => problem.queries.push(q.clone()),
            Statement::Option(name) => match name.as_str() {
                "contrapose" => contrapose = true,
                "tbox-constraints" | "tbox_constraints" => problem.options.tbox_constraints = true,
                _ => return Err(err(s, ValidationErrorKind::UnknownOption(name.clone())).into()),
            },
        }
    }
    problem.modalities = if declared_modalities.is_empty() {
        BTreeSet::from([ModalityId::ought()])
    } else {
        declared_modalities
    };

    // Atom and modality references, checked once every declaration is known.
    let mut tableau_requested = false;
    for s in &statements {
        let formulas: Vec<&Formula> = match &s.value {
            Statement::Fact(f) | Statement::Observe(f) | Statement::Norm(f) => vec![f],
            Statement::Query(q) => {
                if q.engine().uses_tableau() {
                    tableau_requested = true;
                }
                match &q.kind {
                    QueryKind::MustCheck {
                        obligation,
                        modality,
                    } => {
                        if !problem.modalities.contains(modality) {
                            return Err(err(
                                s,
                                ValidationErrorKind::UndeclaredModality(modality.to_string()),
                            )
                            .into());
                        }
                        if !is_clause(obligation) {
                            return Err(err(
                                s,
                                ValidationErrorKind::ObligationShape(obligation.to_string()),
                            )
                            .into());
                        }
                        vec![obligation]
                    }
                    QueryKind::FindModel { goal: Some(g) } | QueryKind::Entails { goal: g } => {
                        vec![g]
                    }
                    _ => vec![],
                }
            }
            _ => vec![],
        };
        for f in formulas {
            if let Some(a) = f.atoms().into_iter().find(|a| !problem.atoms.contains(a)) {
                return Err(err(s, ValidationErrorKind::UndeclaredAtom(a.to_string())).into());
            }
            if let Some(m) = f
                .modalities()
                .into_iter()
                .find(|m| !problem.modalities.contains(m))
            {
                return Err(err(s, ValidationErrorKind::UndeclaredModality(m.to_string())).into());
            }
        }
    }

    if tableau_requested {
        for s in &statements {
            if let Statement::Fact(f) | Statement::Observe(f) | Statement::Norm(f) = &s.value {
                if let Some(kind) = tableau_diagnostic(f) {
                    return Err(err(s, kind).into());
                }
            }
        }
    }

    if contrapose {
        problem.apply_contrapose();
    }
    Ok(problem)
}

/// Fails with the first formula of `problem` outside the tableau fragment.
pub fn validate_for_engine(problem: &Problem, engine: Engine) -> Result<(), ValidationErrorKind> {
    if !engine.uses_tableau() {
        return Ok(());
    }
    for f in problem.all_formulas() {
        if let Some(kind) = tableau_diagnostic(&f) {
            return Err(kind);
        }
    }
    Ok(())
}

/// Writes `problem` back in `.norm` syntax such that parsing the text
/// yields a structurally equal problem.
pub fn render_problem(problem: &Problem) -> String {
    let mut out = String::new();
    for m in &problem.modalities {
        let _ = writeln!(out, "modality {m}");
    }
    let generated: BTreeSet<AtomId> = problem.partitions.iter().flat_map(|p| p.atoms()).collect();
    let plain: Vec<&AtomId> = problem.atoms.iter().filter(|a| !generated.contains(a)).collect();
    if !plain.is_empty() {
        let names: Vec<&str> = plain.iter().map(|a| a.as_str()).collect();
        let _ = writeln!(out, "atom {}", names.join(", "));
    }
    let mut partitions = problem.partitions.iter();
    let mut skip = 0usize;
    for item in &problem.background {
        match item.origin {
            Origin::Partition => {
                if skip > 0 {
                    skip -= 1;
                    continue;
                }
                let p = partitions
                    .next()
                    .expect("partition axioms come from declared partitions");
                let _ = writeln!(out, "partition {}: {}", p.site, p.values.join("|"));
                skip = p.axioms().len() - 1;
            }
            Origin::Fact => {
                let _ = writeln!(out, "fact {}", item.formula);
            }
            Origin::Observation => {
                let _ = writeln!(out, "observe {}", item.formula);
            }
        }
    }
    for norm in problem.norms.iter().filter(|n| !n.derived) {
        let _ = writeln!(out, "norm {}", norm.formula);
    }
    if problem.options.contrapose {
        out.push_str("option contrapose\n");
    }
    if problem.options.tbox_constraints {
        out.push_str("option tbox-constraints\n");
    }
    for q in &problem.queries {
        let mut opts = Vec::new();
        if let QueryKind::MustCheck { modality, .. } = &q.kind {
            if !modality.is_ought() {
                opts.push(format!("modality={modality}"));
            }
        }
        if let Some(e) = q.engine {
            opts.push(format!("engine={e}"));
        }
        let _ = write!(out, "query {}", q.kind.keyword());
        if !opts.is_empty() {
            let _ = write!(out, "[{}]", opts.join(", "));
        }
        match &q.kind {
            QueryKind::MustCheck { obligation: f, .. }
            | QueryKind::Entails { goal: f }
            | QueryKind::FindModel { goal: Some(f) } => {
                let _ = write!(out, " {f}");
            }
            _ => {}
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Partition, Query};

    const WST: &str = "\
partition l: A|K
partition n: 4|7
observe c(l,A)
norm c(l,A) => O c(n,4)
";

    #[test]
    fn wst_background_is_card_axioms_plus_observation() {
        let p = parse_problem(WST).unwrap();
        let bg: Vec<String> = p.background.iter().map(|b| b.formula.pretty().to_string()).collect();
        assert_eq!(
            bg,
            [
                "⊤ → c(l,A) ∨ c(l,K)",
                "c(l,A) ∧ c(l,K) → ⊥",
                "⊤ → c(n,4) ∨ c(n,7)",
                "c(n,4) ∧ c(n,7) → ⊥",
                "c(l,A)",
            ]
        );
        assert_eq!(p.norms.len(), 1);
        assert_eq!(p.norms[0].formula.pretty().to_string(), "c(l,A) → □c(n,4)");
        assert_eq!(p.modalities, BTreeSet::from([ModalityId::ought()]));
    }

    #[test]
    fn empty_body() {
        let p = parse_problem("atom p\n# nothing else\n").unwrap();
        assert!(p.norms.is_empty());
        assert!(p.queries.is_empty());
        assert!(p.background.is_empty());
    }

    #[test]
    fn chisholm_has_four_lines() {
        let p = parse_problem("atom s, p\nnorm O ~s\nfact s\nnorm s -> O p\nnorm O(~s -> ~p)\n").unwrap();
        assert_eq!(p.norms.len() + p.background.len(), 4);
    }

    #[test]
    fn syntax_error_reports_position_and_expectation() {
        let e = parse_problem("atom p\nfact p &\n").unwrap_err();
        let ParseError::Syntax(s) = e else { panic!("{e:?}") };
        assert_eq!((s.line, s.column), (2, 9));
        assert!(s.expected.iter().any(|x| x == "`(`"));
    }

    #[test]
    fn undeclared_atom_and_modality() {
        let e = parse_problem("atom p\nfact q\n").unwrap_err();
        assert!(matches!(
            e,
            ParseError::Validation(ValidationError { line: 2, kind: ValidationErrorKind::UndeclaredAtom(_), .. })
        ));
        let e = parse_problem("modality sc\natom p\nnorm O p\n").unwrap_err();
        assert!(matches!(
            e,
            ParseError::Validation(ValidationError { kind: ValidationErrorKind::UndeclaredModality(_), .. })
        ));
    }

    #[test]
    fn duplicate_partition_site() {
        let e = parse_problem("partition l: A|K\npartition l: B|C\n").unwrap_err();
        assert!(matches!(
            e,
            ParseError::Validation(ValidationError { line: 2, kind: ValidationErrorKind::DuplicatePartition(_), .. })
        ));
    }

    #[test]
    fn nested_obligation_rejected_only_for_tableau() {
        let src = "modality m1\nmodality m2\natom p\nnorm O[m1] O[m2] p\n";
        let tab = format!("{src}query obligations\n");
        let e = parse_problem(&tab).unwrap_err();
        assert!(matches!(
            e,
            ParseError::Validation(ValidationError { kind: ValidationErrorKind::NestedObligation(_), .. })
        ));
        let hyp = format!("{src}query consistency\n");
        assert!(parse_problem(&hyp).is_ok());
    }

    #[test]
    fn contrapose_option_derives_card_norm() {
        let p = parse_problem(&format!("{WST}option contrapose\n")).unwrap();
        assert_eq!(p.norms.len(), 2);
        assert_eq!(p.norms[1].formula.pretty().to_string(), "c(n,7) → □c(l,K)");
        assert!(p.norms[1].derived);
    }

    #[test]
    fn queries_with_options() {
        let p = parse_problem(
            "modality sc\natom u, d\nquery turn[modality=sc, engine=both] ~d\nquery model\nquery entails u | d\n",
        )
        .unwrap();
        assert_eq!(
            p.queries[0],
            Query {
                kind: QueryKind::MustCheck {
                    obligation: Formula::not(Formula::atom("d")),
                    modality: ModalityId::new("sc"),
                },
                engine: Some(Engine::Both),
            }
        );
        assert_eq!(p.queries[1].kind, QueryKind::FindModel { goal: None });
        let e = parse_problem("atom u\nquery turn u & u\n").unwrap_err();
        assert!(matches!(
            e,
            ParseError::Validation(ValidationError { kind: ValidationErrorKind::ObligationShape(_), .. })
        ));
    }

    #[test]
    fn render_round_trips_wst_and_chisholm() {
        for src in [
            format!("{WST}option contrapose\nquery turn c(l,K)\n"),
            "atom s, p\nnorm O ~s\nfact s\nnorm s -> O p\nnorm O(~s -> ~p)\nquery consistency\n".to_string(),
        ] {
            let p = parse_problem(&src).unwrap();
            let text = render_problem(&p);
            assert_eq!(parse_problem(&text).unwrap(), p, "{text}");
        }
    }

    #[test]
    fn partition_rendering_keeps_position() {
        let mut p = Problem::new();
        p.atoms.insert(AtomId::new("x"));
        p.add_fact(Formula::atom("x"));
        p.add_partition(Partition::new("s", ["a", "b", "c"]));
        p.observe(Formula::atom("c(s,a)"));
        let text = render_problem(&p);
        assert_eq!(parse_problem(&text).unwrap(), p);
    }
}
