//! `deontic`: run analyses over `.norm` scenario files.
//!
//! Exit codes: 0 yes / sat / consistent, 1 no / unsat / inconsistent,
//! 2 usage or parse error, 3 resource limit, 4 engine disagreement.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use deontic_core::alc::translate_problem;
use deontic_core::analysis::{self, AnalysisError, Answer, Verdict};
use deontic_core::hypertableau::Config;
use deontic_core::oracle::{oracle_problem, OracleVerdict};
use deontic_core::report::{render_json, render_text};
use deontic_core::tableau::{build_tableau, render_dot, render_text as render_tree};
use deontic_core::{parse_formula, parse_problem, Engine, Formula, ModalityId, Problem};

#[derive(Parser)]
#[command(name = "deontic", version, about = "Deontic (modal KD) reasoning over .norm files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Tableau,
    Hypertableau,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Tableau => Engine::Tableau,
            EngineArg::Hypertableau => Engine::Hypertableau,
            EngineArg::Both => Engine::Both,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Add the pseudo-contrapositive of every literal norm.
    #[arg(long)]
    contrapose: bool,
    /// Keep partition axioms in the TBox.
    #[arg(long)]
    tbox_constraints: bool,
}

#[derive(Args)]
struct Limits {
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    #[arg(long, default_value_t = 10_000)]
    max_individuals: usize,
    #[arg(long, default_value_t = 100_000)]
    max_branches: usize,
}

impl Limits {
    fn config(&self) -> Config {
        Config {
            max_individuals: self.max_individuals,
            max_branches: self.max_branches,
            record_trace: true,
        }
    }

    fn engine(&self) -> Option<Engine> {
        self.engine.map(Into::into)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Consistency of the background and the norms.
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        limits: Limits,
    },
    /// Whether the obligation has to be verified (turn the card).
    Turn {
        #[command(flatten)]
        common: Common,
        /// A literal or a disjunction of literals.
        obligation: String,
        #[arg(long, default_value = "ought")]
        modality: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Cheat detection: minimal boxed-literal sets of the open branches.
    Obligations {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        limits: Limits,
    },
    /// A model of the problem, optionally containing a goal.
    Model {
        #[command(flatten)]
        common: Common,
        goal: Option<String>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Entailment of a formula at the observed world.
    Entails {
        #[command(flatten)]
        common: Common,
        goal: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// The tableau tree.
    Tableau {
        #[command(flatten)]
        common: Common,
        /// Graphviz output.
        #[arg(long)]
        dot: bool,
    },
    /// ALC concepts, TBox and DL-clauses.
    Translate {
        #[command(flatten)]
        common: Common,
    },
    /// Brute-force satisfiability over small Kripke structures.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
    },
    /// Every query declared in the file.
    Queries {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        limits: Limits,
    },
}

struct Failure {
    code: u8,
    message: String,
}

type Outcome = Result<u8, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn load(common: &Common) -> Result<Problem, Failure> {
    let text = fs::read_to_string(&common.file)
        .map_err(|e| usage(format!("{}: {e}", common.file.display())))?;
    let mut p = parse_problem(&text).map_err(|e| usage(format!("{}:{e}", common.file.display())))?;
    if common.contrapose {
        p.apply_contrapose();
    }
    if common.tbox_constraints {
        p.options.tbox_constraints = true;
    }
    Ok(p)
}

fn formula_arg(p: &Problem, src: &str) -> Result<Formula, Failure> {
    let f = parse_formula(src).map_err(|e| usage(format!("argument {src:?}: {e}")))?;
    if let Some(a) = f.atoms().into_iter().find(|a| !p.atoms.contains(a)) {
        return Err(usage(format!("argument {src:?}: undeclared atom {a}")));
    }
    if let Some(m) = f.modalities().into_iter().find(|m| !p.modalities.contains(m)) {
        return Err(usage(format!("argument {src:?}: undeclared modality {m}")));
    }
    Ok(f)
}

fn analysis_failure(e: AnalysisError) -> Failure {
    let code = match e {
        AnalysisError::ResourceLimit(_) => 3,
        AnalysisError::Disagreement { .. } => 4,
        AnalysisError::ModelCheck(_) => 4,
        AnalysisError::Fragment(_) | AnalysisError::ObligationShape(_) => 2,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn answer_code(a: Answer) -> u8 {
    match a {
        Answer::Yes => 0,
        Answer::No | Answer::Inconsistent => 1,
    }
}

fn emit(v: &Verdict, format: Format) -> u8 {
    match format {
        Format::Text => print!("{}", render_text(v)),
        Format::Json => print!("{}", render_json(v)),
    }
    answer_code(v.answer)
}

fn verdict(
    p: &Problem,
    format: Format,
    limits: &Limits,
    default: Engine,
    run: impl FnOnce(&Problem, Engine, &Config) -> analysis::Result<Verdict>,
) -> Outcome {
    let engine = limits.engine().unwrap_or(default);
    let v = run(p, engine, &limits.config()).map_err(analysis_failure)?;
    Ok(emit(&v, format))
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("plain data"));
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { common, limits } => verdict(
            &load(&common)?,
            common.format,
            &limits,
            Engine::Hypertableau,
            analysis::check_consistency,
        ),
        Command::Turn {
            common,
            obligation,
            modality,
            limits,
        } => {
            let p = load(&common)?;
            let o = formula_arg(&p, &obligation)?;
            let m = ModalityId::new(modality);
            if !p.modalities.contains(&m) {
                return Err(usage(format!("undeclared modality {m}")));
            }
            verdict(&p, common.format, &limits, Engine::Hypertableau, |p, e, c| {
                analysis::must_check(p, &o, &m, e, c)
            })
        }
        Command::Obligations { common, limits } => verdict(
            &load(&common)?,
            common.format,
            &limits,
            Engine::Tableau,
            analysis::obligations,
        ),
        Command::Model {
            common,
            goal,
            limits,
        } => {
            let p = load(&common)?;
            let goal = goal.map(|g| formula_arg(&p, &g)).transpose()?;
            verdict(&p, common.format, &limits, Engine::Hypertableau, |p, e, c| {
                analysis::find_model(p, goal.as_ref(), e, c)
            })
        }
        Command::Entails {
            common,
            goal,
            limits,
        } => {
            let p = load(&common)?;
            let goal = formula_arg(&p, &goal)?;
            verdict(&p, common.format, &limits, Engine::Hypertableau, |p, e, c| {
                analysis::entails(p, &goal, e, c)
            })
        }
        Command::Tableau { common, dot } => {
            let p = load(&common)?;
            let t = build_tableau(&p.all_formulas()).map_err(|e| usage(e.to_string()))?;
            if dot {
                print!("{}", render_dot(&t));
            } else if common.format == Format::Json {
                print_json(&serde_json::to_value(&t).expect("plain data"));
            } else {
                print!("{}", render_tree(&t));
            }
            Ok(0)
        }
        Command::Translate { common } => {
            let p = load(&common)?;
            let t = translate_problem(&p, &[]);
            let kb = t.clausify();
            if common.format == Format::Json {
                print_json(&json!({
                    "rows": t.rows,
                    "tbox": t.tbox.iter().map(|(s, a)| json!({"source": s, "axiom": a.to_string()})).collect::<Vec<_>>(),
                    "assertions": kb.assertions,
                    "clauses": kb.clauses.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "name_table": kb.name_table.iter().map(|(n, c)| (n.clone(), json!(c.to_string()))).collect::<serde_json::Map<_, _>>(),
                }));
            } else {
                print!("{}\n{kb}", t.listing());
            }
            Ok(0)
        }
        Command::Oracle { common, max_worlds } => {
            let p = load(&common)?;
            let v = oracle_problem(&p, max_worlds).map_err(|e| Failure {
                code: 3,
                message: e.to_string(),
            })?;
            match (&v, common.format) {
                (OracleVerdict::Sat(m), Format::Text) => print!("sat\n{m}"),
                (OracleVerdict::Unsat, Format::Text) => {
                    println!("unsat within {max_worlds} world(s)")
                }
                (OracleVerdict::Sat(m), Format::Json) => print_json(&json!({"verdict": "sat", "model": m})),
                (OracleVerdict::Unsat, Format::Json) => {
                    print_json(&json!({"verdict": "unsat", "max_worlds": max_worlds}))
                }
            }
            Ok(if v.is_sat() { 0 } else { 1 })
        }
        Command::Queries { common, limits } => {
            let p = load(&common)?;
            let cfg = limits.config();
            let mut code = 0;
            let mut reports = Vec::new();
            for (i, q) in p.queries.iter().enumerate() {
                let v = analysis::run_query(&p, q, limits.engine(), &cfg).map_err(analysis_failure)?;
                code = code.max(answer_code(v.answer));
                match common.format {
                    Format::Text => {
                        if i > 0 {
                            println!();
                        }
                        print!("{}", render_text(&v));
                    }
                    Format::Json => reports.push(deontic_core::report::to_json(&v)),
                }
            }
            if common.format == Format::Json {
                print_json(&serde_json::Value::Array(reports));
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("deontic: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
