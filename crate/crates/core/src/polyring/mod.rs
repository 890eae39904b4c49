//! Polynomials in `z` and `conj(z)` with complex coefficients.

mod monomial;
mod parse;
mod poly;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use monomial::Monomial;
pub use parse::{check_hermitian_exact, parse_exact};
pub use poly::{Coeff, CxPolynomial, ExactCoeff, ExactPolynomial, Polynomial, Wirtinger};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PolyError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("expression is not real-valued: coefficient of {monomial} is not the conjugate of {mirror}")]
    NotReal { monomial: String, mirror: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {var} out of range for {nvars} variables")]
    VarOutOfRange { var: usize, nvars: usize },
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
}

/// A real-valued polynomial: the coefficient at `(alpha, beta)` is the
/// conjugate of the one at `(beta, alpha)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPolynomial {
    inner: CxPolynomial,
}

impl HermitianPolynomial {
    /// Accepts `p` if it is Hermitian up to `tol` (absolute, per coefficient),
    /// then symmetrizes it exactly.
    pub fn from_cx(p: CxPolynomial, tol: f64) -> Result<Self, PolyError> {
        for (m, c) in p.terms() {
            let mirror = p.coeff(&m.conj()).copied().unwrap_or_default();
            if (mirror - c.conj()).norm() > tol {
                return Err(PolyError::NotReal {
                    monomial: m.to_string(),
                    mirror: m.conj().to_string(),
                });
            }
        }
        let sym = (&p + &p.conj()).scale(&Complex64::new(0.5, 0.0));
        Ok(HermitianPolynomial { inner: sym })
    }

    pub fn as_cx(&self) -> &CxPolynomial {
        &self.inner
    }

    pub fn into_cx(self) -> CxPolynomial {
        self.inner
    }

    pub fn nvars(&self) -> usize {
        self.inner.nvars()
    }

    pub fn degree(&self) -> Option<u32> {
        self.inner.degree()
    }

    /// Real value at `z`; the (rounding-level) imaginary part is dropped.
    pub fn eval_real(&self, z: &[Complex64]) -> Result<f64, PolyError> {
        self.inner.eval(z).map(|v| v.re)
    }
}

/// Parses a real defining function, e.g. `"y1 + x2^4 + x3^6 + y3^10"`.
pub fn parse_defining(expr: &str) -> Result<HermitianPolynomial, PolyError> {
    parse_defining_n(expr, None)
}

/// As [`parse_defining`] with an explicit number of variables.
pub fn parse_defining_n(expr: &str, nvars: Option<usize>) -> Result<HermitianPolynomial, PolyError> {
    let exact = parse_exact(expr, nvars)?;
    check_hermitian_exact(&exact)?;
    Ok(HermitianPolynomial {
        inner: exact.to_float(),
    })
}

/// Parses a (possibly complex-valued) polynomial expression.
pub fn parse_complex(expr: &str, nvars: Option<usize>) -> Result<CxPolynomial, PolyError> {
    Ok(parse_exact(expr, nvars)?.to_float())
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    beta: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    nvars: usize,
    terms: Vec<TermJson>,
}

impl Serialize for CxPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            nvars: self.nvars(),
            terms: self
                .terms()
                .map(|(m, c)| TermJson {
                    alpha: m.alpha.clone(),
                    beta: m.beta.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CxPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        let mut p = CxPolynomial::zero(raw.nvars);
        for t in raw.terms {
            if t.alpha.len() != raw.nvars || t.beta.len() != raw.nvars {
                return Err(serde::de::Error::custom("term arity does not match nvars"));
            }
            p.add_term(Monomial::new(t.alpha, t.beta), Complex64::new(t.re, t.im));
        }
        Ok(p)
    }
}

impl Serialize for HermitianPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.inner.serialize(s)
    }
}
