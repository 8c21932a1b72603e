//! Deontic (modal KD) reasoning: a literal-style tableau for cheat
//! detection, a translation to ALC clauses decided by a hypertableau, and
//! a brute-force Kripke oracle for checking both.

pub mod alc;
pub mod analysis;
pub mod dsl;
pub mod formula;
pub mod hypertableau;
pub mod kripke;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod tableau;

pub use analysis::{Answer, Verdict};
pub use dsl::{parse_formula, parse_problem, render_problem, ParseError};
pub use formula::{AtomId, Formula, ModalityId};
pub use problem::{Engine, Partition, Problem, Query, QueryKind};
