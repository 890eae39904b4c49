//! Text grammar for defining functions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("-" | "+") unary | power
//! power  := atom ("^" integer)?
//! atom   := number | "i" | var | func "(" expr ")" | "(" expr ")"
//! func   := "conj" | "re" | "im"
//! var    := ("x" | "y" | "z" | "zbar") "_"? index        (index >= 1)
//! number := digits ("." digits)? | digits "/" digits  (via the "/" operator)
//! ```
//!
//! `x_j` and `y_j` expand to `(z_j + conj z_j)/2` and `(z_j - conj z_j)/(2i)`.
//! Division is only allowed by constants. All arithmetic is exact over the
//! Gaussian rationals until the final conversion to floating coefficients.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{ExactCoeff, ExactPolynomial};
use super::PolyError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'/' => out.push((start, Tok::Slash)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let text = &src[start..i];
                out.push((start, Tok::Num(parse_decimal(text, start)?)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(PolyError::Syntax {
                    offset: start,
                    message: format!("unexpected character {:?}", ch as char),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

fn parse_decimal(text: &str, offset: usize) -> Result<BigRational, PolyError> {
    let bad = || PolyError::Syntax {
        offset,
        message: format!("malformed number {text:?}"),
    };
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = num_traits::pow(BigInt::from(10u32), frac.len());
    Ok(BigRational::new(num, den))
}

#[derive(Clone, Debug)]
enum Ast {
    Const(ExactCoeff),
    Z(usize),
    Zbar(usize),
    X(usize),
    Y(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, usize),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
    Conj(Box<Ast>),
    Re(Box<Ast>),
    Im(Box<Ast>),
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), PolyError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn expr(&mut self) -> Result<Ast, PolyError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, PolyError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), at);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(n)) if n.is_integer() => {
                    let e: u32 = n
                        .to_integer()
                        .try_into()
                        .or_else(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    Ok(Ast::Pow(Box::new(base), e))
                }
                _ => self.err("expected non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Ast, PolyError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Ast::Const(Complex::new(n, BigRational::zero())))
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.pos += 1;
                let lower = name.to_ascii_lowercase();
                match lower.as_str() {
                    "i" => Ok(Ast::Const(Complex::new(BigRational::zero(), BigRational::one()))),
                    "conj" | "re" | "im" => {
                        self.expect(Tok::LParen)?;
                        let e = Box::new(self.expr()?);
                        self.expect(Tok::RParen)?;
                        Ok(match lower.as_str() {
                            "conj" => Ast::Conj(e),
                            "re" => Ast::Re(e),
                            _ => Ast::Im(e),
                        })
                    }
                    _ => variable(&name, at),
                }
            }
            _ => self.err(format!("unexpected token {tok:?}")),
        }
    }
}

fn variable(name: &str, at: usize) -> Result<Ast, PolyError> {
    let (kind, rest) = if let Some(r) = name.strip_prefix("zbar") {
        ("zbar", r)
    } else if let Some(r) = name.strip_prefix(['x', 'y', 'z']) {
        (&name[..1], r)
    } else {
        return Err(PolyError::Syntax {
            offset: at,
            message: format!("unknown identifier {name:?}"),
        });
    };
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    let idx: usize = match rest.parse() {
        Ok(k) if k >= 1 => k,
        _ => {
            return Err(PolyError::Syntax {
                offset: at,
                message: format!("variable {name:?} needs an index >= 1"),
            })
        }
    };
    let j = idx - 1;
    Ok(match kind {
        "x" => Ast::X(j),
        "y" => Ast::Y(j),
        "z" => Ast::Z(j),
        _ => Ast::Zbar(j),
    })
}

fn max_var(ast: &Ast) -> Option<usize> {
    match ast {
        Ast::Const(_) => None,
        Ast::Z(j) | Ast::Zbar(j) | Ast::X(j) | Ast::Y(j) => Some(*j),
        Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b, _) => {
            max_var(a).max(max_var(b))
        }
        Ast::Neg(a) | Ast::Pow(a, _) | Ast::Conj(a) | Ast::Re(a) | Ast::Im(a) => max_var(a),
    }
}

fn half() -> ExactCoeff {
    Complex::new(BigRational::new(1.into(), 2.into()), BigRational::zero())
}

fn lower(ast: &Ast, n: usize) -> Result<ExactPolynomial, PolyError> {
    Ok(match ast {
        Ast::Const(c) => ExactPolynomial::constant(n, c.clone()),
        Ast::Z(j) => ExactPolynomial::z(n, *j),
        Ast::Zbar(j) => ExactPolynomial::zbar(n, *j),
        Ast::X(j) => (&ExactPolynomial::z(n, *j) + &ExactPolynomial::zbar(n, *j)).scale(&half()),
        Ast::Y(j) => {
            // (z - zbar) / (2i) = -i/2 (z - zbar)
            let c = Complex::new(BigRational::zero(), BigRational::new((-1).into(), 2.into()));
            (&ExactPolynomial::z(n, *j) - &ExactPolynomial::zbar(n, *j)).scale(&c)
        }
        Ast::Add(a, b) => &lower(a, n)? + &lower(b, n)?,
        Ast::Sub(a, b) => &lower(a, n)? - &lower(b, n)?,
        Ast::Mul(a, b) => &lower(a, n)? * &lower(b, n)?,
        Ast::Div(a, b, at) => {
            let den = lower(b, n)?;
            let c = match den.degree() {
                Some(0) => den.terms().next().map(|(_, c)| c.clone()).unwrap(),
                None => {
                    return Err(PolyError::Syntax {
                        offset: *at,
                        message: "division by zero".into(),
                    })
                }
                Some(_) => {
                    return Err(PolyError::Syntax {
                        offset: *at,
                        message: "division by a non-constant expression".into(),
                    })
                }
            };
            let norm = c.norm_sqr();
            let inv = Complex::new(c.re.clone() / norm.clone(), -c.im.clone() / norm);
            lower(a, n)?.scale(&inv)
        }
        Ast::Neg(a) => -&lower(a, n)?,
        Ast::Pow(a, e) => lower(a, n)?.pow(*e),
        Ast::Conj(a) => lower(a, n)?.conj(),
        Ast::Re(a) => {
            let p = lower(a, n)?;
            (&p + &p.conj()).scale(&half())
        }
        Ast::Im(a) => {
            let p = lower(a, n)?;
            let c = Complex::new(BigRational::zero(), BigRational::new((-1).into(), 2.into()));
            (&p - &p.conj()).scale(&c)
        }
    })
}

/// Parses into an exact polynomial. `nvars` defaults to the largest variable
/// index that appears (at least 1).
pub fn parse_exact(src: &str, nvars: Option<usize>) -> Result<ExactPolynomial, PolyError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: src.len(),
    };
    let ast = p.expr()?;
    if p.pos != toks.len() {
        return p.err("trailing input");
    }
    let needed = max_var(&ast).map_or(0, |j| j + 1);
    let n = match nvars {
        Some(n) if n < needed => {
            return Err(PolyError::DimensionMismatch {
                expected: n,
                got: needed,
            })
        }
        Some(n) => n,
        None => needed.max(1),
    };
    lower(&ast, n)
}

/// Exact Hermitian-symmetry check; returns the first violating monomial pair.
pub fn check_hermitian_exact(p: &ExactPolynomial) -> Result<(), PolyError> {
    for (m, c) in p.terms() {
        let mirror = p.coeff(&m.conj());
        let ok = match mirror {
            Some(d) => d.re == c.re && d.im == -c.im.clone(),
            None => false,
        };
        if !ok {
            return Err(PolyError::NotReal {
                monomial: m.to_string(),
                mirror: m.conj().to_string(),
            });
        }
    }
    Ok(())
}
