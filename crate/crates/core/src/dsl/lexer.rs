use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    FatArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Comma,
    Eq,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// Words that never lex as atom names with an argument list.
const OPERATOR_WORDS: [&str; 4] = ["O", "P", "true", "false"];

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub found: char,
}

/// Splits `.norm` source into tokens. Newlines inside parentheses or
/// brackets are insignificant; elsewhere they end a statement.
pub fn tokenize(src: &str) -> Result<Vec<Spanned>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut depth = 0usize;

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |tok: Tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            })
        };
        match c {
            '\n' => {
                if depth == 0 {
                    push(Tok::Newline, &mut out);
                }
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::Arrow, &mut out);
                i += 2;
                col += 2;
                continue;
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::FatArrow, &mut out);
                i += 2;
                col += 2;
                continue;
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len()
                    && (is_ident_char(chars[i])
                        || (chars[i] == '-' && chars.get(i + 1) != Some(&'>') && i > start))
                {
                    i += 1;
                }
                let mut word: String = chars[start..i].iter().collect();
                if chars.get(i) == Some(&'(') && !OPERATOR_WORDS.contains(&word.as_str()) {
                    if let Some(end) = argument_list_end(&chars, i) {
                        word.extend(&chars[i..end]);
                        i = end;
                    }
                }
                col += i - start;
                push(Tok::Ident(word), &mut out);
                continue;
            }
            _ => {}
        }
        let tok = match c {
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '(' => {
                depth += 1;
                Tok::LParen
            }
            ')' => {
                depth = depth.saturating_sub(1);
                Tok::RParen
            }
            '[' => {
                depth += 1;
                Tok::LBracket
            }
            ']' => {
                depth = depth.saturating_sub(1);
                Tok::RBracket
            }
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            other => {
                return Err(LexError {
                    line,
                    column: col,
                    found: other,
                })
            }
        };
        push(tok, &mut out);
        i += 1;
        col += 1;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// End (exclusive) of a balanced `(...)` made only of identifier
/// characters and commas, starting at `open`.
fn argument_list_end(chars: &[char], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = open;
    while i < chars.len() {
        match chars[i] {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return (i > open + 1).then_some(i + 1);
                }
            }
            ',' => {}
            c if is_ident_char(c) => {}
            _ => return None,
        }
        i += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src)
            .ok()
            .expect("lexes")
            .into_iter()
            .map(|s| s.tok)
            .collect()
    }

    #[test]
    fn structured_atom_names_are_single_tokens() {
        assert_eq!(
            toks("c(l,A) -> O c(n,4)"),
            vec![
                Tok::Ident("c(l,A)".into()),
                Tok::Arrow,
                Tok::Ident("O".into()),
                Tok::Ident("c(n,4)".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn operator_words_keep_their_parentheses() {
        assert_eq!(
            toks("O(~s)"),
            vec![
                Tok::Ident("O".into()),
                Tok::LParen,
                Tok::Tilde,
                Tok::Ident("s".into()),
                Tok::RParen,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn newlines_inside_parentheses_are_dropped() {
        let t = toks("fact (a &\n b)\nfact c");
        assert_eq!(t.iter().filter(|t| **t == Tok::Newline).count(), 1);
    }

    #[test]
    fn hyphenated_words() {
        assert_eq!(
            toks("option tbox-constraints"),
            vec![
                Tok::Ident("option".into()),
                Tok::Ident("tbox-constraints".into()),
                Tok::Eof
            ]
        );
        assert_eq!(
            toks("a->b"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::Eof
            ]
        );
    }
}
