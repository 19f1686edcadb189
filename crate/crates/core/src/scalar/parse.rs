//! Recursive-descent parser for exact field expressions.
//!
//! Grammar (whitespace insignificant, byte offsets reported on error):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-'] integer)?
//! atom   := integer | 'i' | identifier | '(' expr ')'
//! ```
//!
//! Precedence is `^` > unary `-` > `*` `/` > `+` `-`, all left
//! associative. Negative exponents are only accepted when the base is a
//! single identifier or a parenthesised subexpression.

use super::field::Scalar;
use super::gaussian::GaussianRational;
use super::poly::VarSet;
use crate::error::EngineError;
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    ImUnit,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>, EngineError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while lx.pos < lx.src.len() {
            let start = lx.pos;
            let c = lx.src[lx.pos];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    lx.pos += 1;
                }
                b'+' => {
                    lx.pos += 1;
                    out.push((Tok::Plus, start));
                }
                b'-' => {
                    lx.pos += 1;
                    out.push((Tok::Minus, start));
                }
                b'*' => {
                    lx.pos += 1;
                    out.push((Tok::Star, start));
                }
                b'/' => {
                    lx.pos += 1;
                    out.push((Tok::Slash, start));
                }
                b'^' => {
                    lx.pos += 1;
                    out.push((Tok::Caret, start));
                }
                b'(' => {
                    lx.pos += 1;
                    out.push((Tok::LParen, start));
                }
                b')' => {
                    lx.pos += 1;
                    out.push((Tok::RParen, start));
                }
                b'0'..=b'9' => {
                    let mut end = lx.pos;
                    while end < lx.src.len() && lx.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let digits = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                    out.push((Tok::Int(digits.parse::<BigInt>().unwrap()), start));
                    lx.pos = end;
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut end = lx.pos;
                    while end < lx.src.len()
                        && (lx.src[end].is_ascii_alphanumeric() || lx.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let name = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap().to_string();
                    if name == "i" {
                        out.push((Tok::ImUnit, start));
                    } else {
                        out.push((Tok::Ident(name), start));
                    }
                    lx.pos = end;
                }
                _ => {
                    return Err(EngineError::Parse {
                        offset: start,
                        message: format!("unexpected byte '{}'", c as char),
                    })
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    vars: &'a VarSet,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        self.idx += 1;
        t
    }

    fn err(&self, message: &str) -> EngineError {
        EngineError::Parse {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Scalar, EngineError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, EngineError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let off = self.offset();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs).map_err(|_| EngineError::Parse {
                        offset: off,
                        message: "division by zero".to_string(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, EngineError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, EngineError> {
        let (base, neg_ok) = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let mut negative = false;
            if let Some(Tok::Minus) = self.peek() {
                self.bump();
                negative = true;
            }
            let off = self.offset();
            let n = match self.bump() {
                Some(Tok::Int(n)) => n,
                _ => {
                    return Err(EngineError::Parse {
                        offset: off,
                        message: "expected integer exponent after '^'".to_string(),
                    })
                }
            };
            if negative && !neg_ok {
                return Err(EngineError::Parse {
                    offset: off,
                    message: "negative exponent requires an identifier or parenthesised base"
                        .to_string(),
                });
            }
            let e: i64 = (&n).try_into().map_err(|_| EngineError::Parse {
                offset: off,
                message: "exponent out of range".to_string(),
            })?;
            let e = if negative { -e } else { e };
            return base.pow(e).map_err(|_| EngineError::Parse {
                offset: off,
                message: "zero base raised to a negative exponent".to_string(),
            });
        }
        Ok(base)
    }

    /// Returns the value and whether a negative exponent may follow.
    fn atom(&mut self) -> Result<(Scalar, bool), EngineError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Int(n)) => Ok((
                Scalar::constant(
                    self.vars.clone(),
                    GaussianRational::new(BigRational::from(n), BigRational::from(BigInt::from(0))),
                ),
                false,
            )),
            Some(Tok::ImUnit) => Ok((Scalar::i(self.vars.clone()), true)),
            Some(Tok::Ident(name)) => match self.vars.index_of(&name) {
                Some(v) => Ok((Scalar::var(self.vars.clone(), v), true)),
                None => Err(EngineError::UnknownIdentifier { name, offset: off }),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok((inner, true)),
                    _ => Err(EngineError::Parse {
                        offset: self.end.min(self.offset()),
                        message: "expected ')'".to_string(),
                    }),
                }
            }
            _ => Err(EngineError::Parse {
                offset: off,
                message: "expected a value".to_string(),
            }),
        }
    }
}

/// Parses `text` into an exact field element over the given parameters.
pub fn parse_scalar(text: &str, vars: &VarSet) -> Result<Scalar, EngineError> {
    let toks = Lexer::tokenize(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        vars,
        end: text.len(),
    };
    let v = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}
