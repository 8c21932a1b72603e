use crate::formula::{Formula, ModalityId};
use crate::problem::{Engine, Partition, Query, QueryKind};

use super::lexer::{Spanned, Tok};
use super::SyntaxError;

/// One parsed statement with the position of its keyword.
#[derive(Debug, Clone)]
pub(crate) struct Located<T> {
    pub value: T,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum Statement {
    Modality(ModalityId),
    Partition(Partition),
    Atoms(Vec<String>),
    Fact(Formula),
    Norm(Formula),
    Observe(Formula),
    Query(Query),
    Option(String),
}

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    pub fn new(toks: Vec<Spanned>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_tok(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let t = self.peek();
        SyntaxError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Spanned> {
        if *self.peek_tok() == tok {
            Ok(self.bump())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek_tok().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn at_statement_end(&self) -> bool {
        matches!(self.peek_tok(), Tok::Semi | Tok::Newline | Tok::Eof)
    }

    pub fn statements(&mut self) -> PResult<Vec<Located<Statement>>> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek_tok(), Tok::Semi | Tok::Newline) {
                self.bump();
            }
            if *self.peek_tok() == Tok::Eof {
                return Ok(out);
            }
            let start = self.peek().clone();
            let value = self.statement()?;
            if !self.at_statement_end() {
                return Err(self.error(&["`;`", "end of line"]));
            }
            out.push(Located {
                value,
                line: start.line,
                column: start.column,
            });
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        const KEYWORDS: [&str; 8] = [
            "`modality`",
            "`partition`",
            "`atom`",
            "`fact`",
            "`norm`",
            "`observe`",
            "`query`",
            "`option`",
        ];
        let Tok::Ident(word) = self.peek_tok().clone() else {
            return Err(self.error(&KEYWORDS));
        };
        match word.as_str() {
            "modality" => {
                self.bump();
                Ok(Statement::Modality(ModalityId::new(self.ident("modality label")?)))
            }
            "partition" => {
                self.bump();
                let site = self.ident("partition site")?;
                self.expect(Tok::Colon, "`:`")?;
                let mut values = vec![self.ident("partition value")?];
                while *self.peek_tok() == Tok::Pipe {
                    self.bump();
                    values.push(self.ident("partition value")?);
                }
                Ok(Statement::Partition(Partition { site, values }))
            }
            "atom" => {
                self.bump();
                let mut names = vec![self.ident("atom name")?];
                while *self.peek_tok() == Tok::Comma {
                    self.bump();
                    names.push(self.ident("atom name")?);
                }
                Ok(Statement::Atoms(names))
            }
            "fact" => {
                self.bump();
                Ok(Statement::Fact(self.formula()?))
            }
            "observe" => {
                self.bump();
                Ok(Statement::Observe(self.formula()?))
            }
            "norm" => {
                self.bump();
                let f = self.formula()?;
                if *self.peek_tok() == Tok::FatArrow {
                    self.bump();
                    let consequent = self.formula()?;
                    Ok(Statement::Norm(Formula::implies(f, consequent)))
                } else {
                    Ok(Statement::Norm(f))
                }
            }
            "query" => {
                self.bump();
                Ok(Statement::Query(self.query()?))
            }
            "option" => {
                self.bump();
                Ok(Statement::Option(self.ident("option name")?))
            }
            _ => Err(self.error(&KEYWORDS)),
        }
    }

    fn query(&mut self) -> PResult<Query> {
        const KINDS: [&str; 5] = [
            "`consistency`",
            "`turn`",
            "`obligations`",
            "`model`",
            "`entails`",
        ];
        let Tok::Ident(kind) = self.peek_tok().clone() else {
            return Err(self.error(&KINDS));
        };
        if !["consistency", "turn", "obligations", "model", "entails"].contains(&kind.as_str()) {
            return Err(self.error(&KINDS));
        }
        self.bump();
        let mut engine = None;
        let mut modality = None;
        if *self.peek_tok() == Tok::LBracket {
            self.bump();
            loop {
                let key_tok = self.peek().clone();
                let key = self.ident("`engine` or `modality`")?;
                self.expect(Tok::Eq, "`=`")?;
                match key.as_str() {
                    "engine" => {
                        let value_tok = self.peek().clone();
                        let v = self.ident("engine name")?;
                        engine = Some(Engine::from_name(&v).ok_or_else(|| SyntaxError {
                            line: value_tok.line,
                            column: value_tok.column,
                            expected: vec![
                                "`tableau`".into(),
                                "`hypertableau`".into(),
                                "`both`".into(),
                            ],
                            found: format!("`{v}`"),
                        })?);
                    }
                    "modality" => modality = Some(ModalityId::new(self.ident("modality label")?)),
                    _ => {
                        return Err(SyntaxError {
                            line: key_tok.line,
                            column: key_tok.column,
                            expected: vec!["`engine`".into(), "`modality`".into()],
                            found: format!("`{key}`"),
                        })
                    }
                }
                match self.peek_tok() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RBracket => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error(&["`,`", "`]`"])),
                }
            }
        }
        let kind = match kind.as_str() {
            "consistency" => QueryKind::Consistency,
            "obligations" => QueryKind::Obligations,
            "turn" => QueryKind::MustCheck {
                obligation: self.formula()?,
                modality: modality.take().unwrap_or_default(),
            },
            "model" => QueryKind::FindModel {
                goal: if self.at_statement_end() {
                    None
                } else {
                    Some(self.formula()?)
                },
            },
            "entails" => QueryKind::Entails {
                goal: self.formula()?,
            },
            _ => unreachable!(),
        };
        if modality.is_some() {
            // Only `turn` takes a modality.
            return Err(self.error(&["query without `modality=` option"]));
        }
        Ok(Query { kind, engine })
    }

    pub fn expect_end(&mut self) -> PResult<()> {
        while *self.peek_tok() == Tok::Newline {
            self.bump();
        }
        if *self.peek_tok() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    pub fn formula(&mut self) -> PResult<Formula> {
        self.implication()
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek_tok() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while *self.peek_tok() == Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while *self.peek_tok() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek_tok().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(w) if w == "O" || w == "P" => {
                self.bump();
                let label = if *self.peek_tok() == Tok::LBracket {
                    self.bump();
                    let l = self.ident("modality label")?;
                    self.expect(Tok::RBracket, "`]`")?;
                    ModalityId::new(l)
                } else {
                    ModalityId::ought()
                };
                let body = self.unary()?;
                Ok(if w == "O" {
                    Formula::boxed(label, body)
                } else {
                    Formula::diamond(label, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Formula> {
        const START: [&str; 7] = ["atom", "`true`", "`false`", "`~`", "`O`", "`P`", "`(`"];
        match self.peek_tok().clone() {
            Tok::Ident(w) => {
                self.bump();
                Ok(match w.as_str() {
                    "true" => Formula::Top,
                    "false" => Formula::Bottom,
                    _ => Formula::atom(w),
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.error(&START)),
        }
    }
}
