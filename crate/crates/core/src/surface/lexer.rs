use std::fmt;

use crate::Error;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn error(self, message: impl Into<String>) -> Error {
        Error::Script {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(usize),
    Str(String),
    /// `\` or `λ`
    Lambda,
    /// `#`
    Hash,
    Dot,
    Comma,
    Colon,
    Eq,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Hash => f.write_str("`#`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits a script into tokens. `--` starts a comment running to the end
/// of the line.
pub fn lex(text: &str) -> crate::Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, col: 1 };
    let advance = |c: char, pos: &mut Pos| {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c.is_whitespace() {
            chars.next();
            advance(c, &mut pos);
            continue;
        }
        if c == '-' {
            chars.next();
            advance(c, &mut pos);
            if chars.peek() != Some(&'-') {
                return Err(start.error("unexpected `-` (comments start with `--`)"));
            }
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance(c, &mut pos);
            }
            continue;
        }
        let tok = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| is_ident_char(**c)) {
                s.push(c);
                chars.next();
                advance(c, &mut pos);
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                chars.next();
                advance(c, &mut pos);
            }
            Tok::Nat(
                s.parse()
                    .map_err(|_| start.error(format!("number `{s}` is too large")))?,
            )
        } else if c == '"' {
            chars.next();
            advance(c, &mut pos);
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some('"') => {
                        advance('"', &mut pos);
                        break;
                    }
                    Some('\n') | None => return Err(start.error("unterminated string")),
                    Some(c) => {
                        advance(c, &mut pos);
                        s.push(c);
                    }
                }
            }
            Tok::Str(s)
        } else {
            chars.next();
            advance(c, &mut pos);
            match c {
                '\\' | 'λ' => Tok::Lambda,
                '#' => Tok::Hash,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                other => return Err(start.error(format!("unexpected character `{other}`"))),
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = lex("term x -- note\n  : {2}").unwrap();
        let kinds: Vec<&Tok> = toks.iter().map(|(t, _)| t).collect();
        assert_eq!(kinds[0], &Tok::Ident("term".into()));
        assert_eq!(toks[2].1, Pos { line: 2, col: 3 });
        assert_eq!(toks[3].0, Tok::LBrace);
        assert!(matches!(
            lex("a ? b"),
            Err(Error::Script {
                line: 1,
                col: 3,
                ..
            })
        ));
        assert!(matches!(lex("\"open"), Err(Error::Script { .. })));
    }
}
