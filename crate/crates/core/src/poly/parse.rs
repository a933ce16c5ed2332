//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar: integer literals, the variable `x`/`X`, operators `+ - * ^`,
//! and parentheses. Exponents are nonnegative integer literals up to
//! 2^16. Implicit multiplication is not accepted (`2x` is a syntax
//! error, `2*x` is fine). Alternatively an ascending coefficient list
//! `coeffs:c0,c1,...` is accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::IntPoly;
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'x' | b'X' => {
                    lx.pos += 1;
                    Tok::Var
                }
                b'0'..=b'9' => {
                    let mut end = lx.pos;
                    while end < lx.src.len() && lx.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                    lx.pos = end;
                    Tok::Int(text.parse::<BigInt>().unwrap())
                }
                other => {
                    return Err(Error::Parse {
                        pos: start,
                        msg: format!("unexpected character {:?}", other as char),
                    })
                }
            };
            out.push((tok, start));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end_pos: usize,
    guard: u64,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks
            .get(self.idx)
            .map(|(_, p)| *p)
            .unwrap_or(self.end_pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        self.idx += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn check_predicted(&self, degree: u128) -> Result<()> {
        if degree > self.guard as u128 {
            return Err(Error::DegreeGuard {
                required: degree,
                guard: self.guard,
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<IntPoly> {
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

    fn term(&mut self) -> Result<IntPoly> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            let rhs = self.factor()?;
            self.check_predicted(acc.deg0() as u128 + rhs.deg0() as u128)?;
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<IntPoly> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let at = self.pos();
            match self.bump() {
                Some(Tok::Int(e)) => {
                    let e32 = e.to_u32().filter(|&e| e <= MAX_EXPONENT);
                    let e32 = match e32 {
                        Some(v) => v,
                        None => {
                            return Err(Error::Parse {
                                pos: at,
                                msg: format!("exponent {} exceeds 2^16", e),
                            })
                        }
                    };
                    self.check_predicted(base.deg0() as u128 * e32 as u128)?;
                    return Ok(base.pow(e32));
                }
                _ => {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "expected a nonnegative integer exponent after '^'".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<IntPoly> {
        match self.bump() {
            Some(Tok::Int(v)) => Ok(IntPoly::constant(v)),
            Some(Tok::Var) => Ok(IntPoly::x()),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.idx -= 1;
                        self.err("expected ')'")
                    }
                }
            }
            _ => {
                self.idx = self.idx.saturating_sub(1);
                self.err("expected an integer, 'x', or '('")
            }
        }
    }
}

/// Parses a polynomial expression or a `coeffs:` list into an [`IntPoly`].
///
/// `guard` caps the degree of any intermediate product or power.
pub fn parse_poly(text: &str, guard: u64) -> Result<IntPoly> {
    let trimmed = text.trim_start();
    if let Some(rest) = trimmed.strip_prefix("coeffs:") {
        let base = text.len() - rest.len();
        let mut coeffs = Vec::new();
        for (i, part) in rest.split(',').enumerate() {
            let t = part.trim();
            match t.parse::<BigInt>() {
                Ok(v) => coeffs.push(v),
                Err(_) => {
                    return Err(Error::Parse {
                        pos: base,
                        msg: format!("bad coefficient #{}: {:?}", i, t),
                    })
                }
            }
        }
        let p = IntPoly::new(coeffs);
        if p.deg0() as u64 > guard {
            return Err(Error::DegreeGuard {
                required: p.deg0() as u128,
                guard,
            });
        }
        return Ok(p);
    }

    let toks = Lexer::tokens(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        end_pos: text.len(),
        guard,
    };
    let out = parser.expr()?;
    if parser.idx < parser.toks.len() {
        return parser.err("trailing input after expression");
    }
    Ok(out)
}

/// Parses a rational number of the form `a` or `a/b` (b > 0 after reduction).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let mk_err = |msg: &str| Error::Parse {
        pos: 0,
        msg: msg.to_string(),
    };
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| mk_err("bad numerator"))?;
        let den: BigInt = d.trim().parse().map_err(|_| mk_err("bad denominator"))?;
        if den.is_zero() {
            return Err(mk_err("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    } else {
        let num: BigInt = t.parse().map_err(|_| mk_err("bad integer"))?;
        Ok(BigRational::from(num))
    }
}

#[cfg(test)]
mod tests {
    use super::super::DEFAULT_DEGREE_GUARD as G;
    use super::*;

    fn p(text: &str) -> IntPoly {
        parse_poly(text, G).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(p("x^2+1"), IntPoly::from_i64s(&[1, 0, 1]));
        assert_eq!(p("(x-2)^2+2"), IntPoly::from_i64s(&[6, -4, 1]));
        assert_eq!(p("coeffs:0,0,1"), IntPoly::from_i64s(&[0, 0, 1]));
    }

    #[test]
    fn unary_minus_and_whitespace() {
        assert_eq!(p("-x^2 + 3"), IntPoly::from_i64s(&[3, 0, -1]));
        assert_eq!(p(" ( x + 2 ) ^ 3 - 2 "), IntPoly::from_i64s(&[6, 12, 6, 1]));
        assert_eq!(p("-5"), IntPoly::from_i64s(&[-5]));
        assert_eq!(p("2*-3"), IntPoly::from_i64s(&[-6]));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let e = parse_poly("2x", G).unwrap_err();
        match e {
            Error::Parse { pos, .. } => assert_eq!(pos, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_positions() {
        match parse_poly("x^2 + %", G).unwrap_err() {
            Error::Parse { pos, .. } => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_poly("(x+1", G).is_err());
        assert!(parse_poly("x^", G).is_err());
        assert!(parse_poly("", G).is_err());
        assert!(parse_poly("x^-2", G).is_err());
    }

    #[test]
    fn exponent_cap() {
        assert!(parse_poly("x^65537", G).is_err());
        assert!(parse_poly("x^65536", G).is_ok());
    }

    #[test]
    fn degree_guard_inside_expressions() {
        assert!(matches!(
            parse_poly("(x^65536)^65536", G),
            Err(Error::DegreeGuard { .. })
        ));
        assert!(matches!(
            parse_poly("x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536 * x^65536", G),
            Err(Error::DegreeGuard { .. })
        ));
    }

    #[test]
    fn coeffs_list_errors() {
        assert!(parse_poly("coeffs:1,a,3", G).is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/4").unwrap().to_string(), "-3/4");
        assert_eq!(parse_rational("6/4").unwrap().to_string(), "3/2");
        assert_eq!(parse_rational("5").unwrap().to_string(), "5");
        assert!(parse_rational("1/0").is_err());
    }
}
