//! Text form of polynomials.
//!
//! Grammar (whitespace free between tokens):
//!
//! ```text
//! expr   := ['+'|'-'] term { ('+'|'-') term }
//! term   := factor { '*' factor }
//! factor := atom [ '^' integer ]
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Variables are `x1..xn`; for maps in at most two variables `x` and `y`
//! are accepted as aliases for `x1` and `x2`. The printer in
//! [`super::Polynomial`]'s `Display` impl emits this grammar, so
//! parse(print(f)) == f.

use crate::error::{Error, Result};
use crate::poly::{Polynomial, DEFAULT_COEFF_LIMIT};

/// Parses `text` into a canonical polynomial in `num_vars` variables.
pub fn parse(text: &str, num_vars: usize) -> Result<Polynomial> {
    parse_with_limit(text, num_vars, DEFAULT_COEFF_LIMIT)
}

/// [`parse`] with an explicit coefficient bound, applied to literals and to
/// every intermediate result while expanding products and powers.
pub fn parse_with_limit(text: &str, num_vars: usize, limit: i64) -> Result<Polynomial> {
    let tokens = tokenize(text, num_vars, limit)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        num_vars,
        limit,
        end: text.len(),
    };
    let poly = p.expr()?;
    match p.peek() {
        None => Ok(poly),
        Some(t) => Err(Error::Syntax {
            position: t.position,
            message: format!("unexpected {}", t.kind.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Int(i64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Int(v) => format!("integer {v}"),
            TokenKind::Var(i) => format!("variable x{}", i + 1),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Minus => "'-'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Caret => "'^'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    position: usize,
}

fn tokenize(text: &str, num_vars: usize, limit: i64) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let position = i;
        let c = bytes[i];
        match c {
            b' ' | b'\t' => {
                i += 1;
            }
            b'+' => {
                tokens.push(Token { kind: TokenKind::Plus, position });
                i += 1;
            }
            b'-' => {
                tokens.push(Token { kind: TokenKind::Minus, position });
                i += 1;
            }
            b'*' => {
                tokens.push(Token { kind: TokenKind::Star, position });
                i += 1;
            }
            b'^' => {
                tokens.push(Token { kind: TokenKind::Caret, position });
                i += 1;
            }
            b'(' => {
                tokens.push(Token { kind: TokenKind::LParen, position });
                i += 1;
            }
            b')' => {
                tokens.push(Token { kind: TokenKind::RParen, position });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit = &text[start..i];
                let value: i64 = lit.parse().map_err(|_| Error::CoefficientOverflow { limit })?;
                if value > limit {
                    return Err(Error::CoefficientOverflow { limit });
                }
                tokens.push(Token { kind: TokenKind::Int(value), position });
            }
            b'x' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let index = if i == start + 1 {
                    1 // bare `x` means x1
                } else {
                    text[start + 1..i].parse::<usize>().map_err(|_| Error::Syntax {
                        position,
                        message: "variable index out of range".into(),
                    })?
                };
                if index == 0 || index > num_vars {
                    return Err(Error::VariableOutOfRange { index, num_vars });
                }
                tokens.push(Token { kind: TokenKind::Var(index - 1), position });
            }
            b'y' => {
                if num_vars < 2 {
                    return Err(Error::VariableOutOfRange { index: 2, num_vars });
                }
                if num_vars > 2 {
                    return Err(Error::Syntax {
                        position,
                        message: "use x1..xn names for maps in more than two variables".into(),
                    });
                }
                tokens.push(Token { kind: TokenKind::Var(1), position });
                i += 1;
            }
            other => {
                return Err(Error::Syntax {
                    position,
                    message: format!("unexpected character '{}'", other as char),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    num_vars: usize,
    limit: i64,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected_end(&self, expecting: &str) -> Error {
        Error::Syntax {
            position: self.end,
            message: format!("expected {expecting}, found end of input"),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut negate = false;
        if self.eat(&TokenKind::Minus) {
            negate = true;
        } else {
            self.eat(&TokenKind::Plus);
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.checked_neg(self.limit)?;
        }
        loop {
            if self.eat(&TokenKind::Plus) {
                let rhs = self.term()?;
                acc = acc.checked_add(&rhs, self.limit)?;
            } else if self.eat(&TokenKind::Minus) {
                let rhs = self.term()?.checked_neg(self.limit)?;
                acc = acc.checked_add(&rhs, self.limit)?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.eat(&TokenKind::Star) {
            let rhs = self.factor()?;
            acc = acc.checked_mul(&rhs, self.limit)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.eat(&TokenKind::Caret) {
            let (e, position) = match self.bump() {
                Some(Token { kind: TokenKind::Int(v), position }) => (v, position),
                Some(t) => {
                    return Err(Error::Syntax {
                        position: t.position,
                        message: format!("expected exponent, found {}", t.kind.describe()),
                    })
                }
                None => return Err(self.unexpected_end("exponent")),
            };
            let e = u32::try_from(e).map_err(|_| Error::Syntax {
                position,
                message: "exponent out of range".into(),
            })?;
            return base.checked_pow(e, self.limit);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.bump() {
            Some(Token { kind: TokenKind::Int(v), .. }) => {
                Polynomial::new_with_limit(self.num_vars, [(vec![0; self.num_vars], v)], self.limit)
            }
            Some(Token { kind: TokenKind::Var(i), .. }) => {
                let mut exps = vec![0u32; self.num_vars];
                exps[i] = 1;
                Polynomial::new_with_limit(self.num_vars, [(exps, 1)], self.limit)
            }
            Some(Token { kind: TokenKind::LParen, .. }) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token { kind: TokenKind::RParen, .. }) => Ok(inner),
                    Some(t) => Err(Error::Syntax {
                        position: t.position,
                        message: format!("expected ')', found {}", t.kind.describe()),
                    }),
                    None => Err(self.unexpected_end("')'")),
                }
            }
            Some(t) => Err(Error::Syntax {
                position: t.position,
                message: format!("expected a term, found {}", t.kind.describe()),
            }),
            None => Err(self.unexpected_end("a term")),
        }
    }
}
