use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::monomial::Monomial;
use super::PolyError;

/// Coefficient ring for [`Polynomial`]: a commutative ring with conjugation.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conj(&self) -> Self;
    fn from_u64(n: u64) -> Self;
}

impl Coeff for Complex64 {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_u64(n: u64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

/// Gaussian rationals, used by the parser so that expansion is exact.
pub type ExactCoeff = Complex<BigRational>;

impl Coeff for ExactCoeff {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn from_u64(n: u64) -> Self {
        Complex::new(BigRational::from_integer(n.into()), BigRational::zero())
    }
}

/// Which Wirtinger derivative to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wirtinger {
    /// d/dz_j
    Holomorphic,
    /// d/d(conj z_j)
    Antiholomorphic,
}

/// Sparse polynomial in `z_1..z_n` and their conjugates.
///
/// No zero coefficient is ever stored.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Floating complex coefficients; the working type everywhere outside the parser.
pub type CxPolynomial = Polynomial<Complex64>;
pub type ExactPolynomial = Polynomial<ExactCoeff>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The coordinate function `z_var`.
    pub fn z(nvars: usize, var: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::holo(nvars, var, 1), C::one());
        p
    }

    /// The coordinate function `conj(z_var)`.
    pub fn zbar(nvars: usize, var: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::anti(nvars, var, 1), C::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    /// Accumulates `c * m`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn check_degree_cap(&self, cap: u32) -> Result<(), PolyError> {
        match self.degree() {
            Some(d) if d > cap => Err(PolyError::DegreeCap { degree: d, cap }),
            _ => Ok(()),
        }
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(Monomial::is_holomorphic)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())),
        )
    }

    /// Complex conjugate: swaps `alpha`/`beta` and conjugates every coefficient.
    pub fn conj(&self) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, a)| (m.conj(), a.conj())))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Terms of total degree exactly `j`.
    pub fn homogeneous_part(&self, j: u32) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() == j)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Formal Wirtinger derivative with respect to `z_var` or `conj(z_var)`.
    pub fn wirtinger(&self, var: usize, kind: Wirtinger) -> Result<Self, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VarOutOfRange {
                var,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = match kind {
                Wirtinger::Holomorphic => &mut m2.alpha[var],
                Wirtinger::Antiholomorphic => &mut m2.beta[var],
            };
            if *e == 0 {
                continue;
            }
            let k = *e as u64;
            *e -= 1;
            out.add_term(m2, c.clone() * C::from_u64(k));
        }
        Ok(out)
    }

    /// Substitutes `z = b + M w` (and `conj z = conj(b) + conj(M) conj(w)`),
    /// giving a polynomial in the `k = M.ncols` variables `w`.
    ///
    /// `m` is row-major with `nvars` rows.
    pub fn compose_affine(&self, b: &[C], m: &[Vec<C>]) -> Result<Self, PolyError> {
        if b.len() != self.nvars || m.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: if b.len() != self.nvars { b.len() } else { m.len() },
            });
        }
        let k = m.first().map_or(0, Vec::len);
        if m.iter().any(|row| row.len() != k) {
            return Err(PolyError::DimensionMismatch {
                expected: k,
                got: m.iter().map(Vec::len).find(|&l| l != k).unwrap_or(k),
            });
        }
        let lin: Vec<Self> = (0..self.nvars)
            .map(|j| {
                let mut l = Self::constant(k, b[j].clone());
                for (col, a) in m[j].iter().enumerate() {
                    l.add_term(Monomial::holo(k, col, 1), a.clone());
                }
                l
            })
            .collect();
        let lin_bar: Vec<Self> = lin.iter().map(Self::conj).collect();

        let mut cache: HashMap<(usize, bool, u32), Self> = HashMap::new();
        let mut power = |j: usize, bar: bool, e: u32| -> Self {
            cache
                .entry((j, bar, e))
                .or_insert_with(|| if bar { lin_bar[j].pow(e) } else { lin[j].pow(e) })
                .clone()
        };

        let mut out = Self::zero(k);
        for (mono, c) in &self.terms {
            let mut acc = Self::constant(k, c.clone());
            for j in 0..self.nvars {
                if mono.alpha[j] > 0 {
                    acc = &acc * &power(j, false, mono.alpha[j]);
                }
                if mono.beta[j] > 0 {
                    acc = &acc * &power(j, true, mono.beta[j]);
                }
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl CxPolynomial {
    /// Evaluates at `z`, using per-variable power tables.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        if z.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: z.len(),
            });
        }
        let deg = self.degree().unwrap_or(0) as usize;
        let table: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zj| {
                let mut p = Vec::with_capacity(deg + 1);
                p.push(Complex64::new(1.0, 0.0));
                for i in 1..=deg {
                    p.push(p[i - 1] * zj);
                }
                p
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = *c;
            for j in 0..self.nvars {
                let a = m.alpha[j] as usize;
                let b = m.beta[j] as usize;
                if a > 0 {
                    t *= table[j][a];
                }
                if b > 0 {
                    t *= table[j][b].conj();
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Sum of absolute values of all coefficients.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(m, c)| (m.clone(), *c)),
        )
    }

    /// Largest coefficient modulus, 0 for the zero polynomial.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl ExactPolynomial {
    pub fn to_float(&self) -> CxPolynomial {
        self.map_coeffs(|c| {
            Complex64::new(
                c.re.to_f64().unwrap_or(f64::NAN),
                c.im.to_f64().unwrap_or(f64::NAN),
            )
        })
    }
}

impl<'a, C: Coeff> Add<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, C: Coeff> Sub<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, C: Coeff> Mul<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coeff> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polynomial")
            .field("nvars", &self.nvars)
            .field("terms", &self.terms)
            .finish()
    }
}

/// Prints in the parser's input grammar so that output can be read back.
impl fmt::Display for CxPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let coef = match (c.re == 0.0, c.im == 0.0) {
                (_, true) => format!("({})", c.re),
                (true, false) => format!("({}*i)", c.im),
                (false, false) => format!("({} + {}*i)", c.re, c.im),
            };
            f.write_str(&coef)?;
            if m.degree() > 0 {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn add_cancels_to_empty() {
        let p = CxPolynomial::z(2, 0);
        let q = &p - &p;
        assert!(q.is_zero());
        assert_eq!(q.len(), 0);
    }

    #[test]
    fn zbar_derivative_of_holomorphic_is_zero() {
        let p = CxPolynomial::z(1, 0).pow(5);
        let d = p.wirtinger(0, Wirtinger::Antiholomorphic).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn mixed_derivative_of_abs_z_fourth() {
        // d/dz d/dzbar (z^2 zbar^2) = 4 z zbar
        let p = &CxPolynomial::z(1, 0).pow(2) * &CxPolynomial::zbar(1, 0).pow(2);
        let d = p
            .wirtinger(0, Wirtinger::Holomorphic)
            .unwrap()
            .wirtinger(0, Wirtinger::Antiholomorphic)
            .unwrap();
        let expect = CxPolynomial::from_terms(1, [(Monomial::new(vec![1], vec![1]), c(4.0, 0.0))]);
        assert_eq!(d, expect);
    }

    #[test]
    fn derivative_var_out_of_range() {
        let p = CxPolynomial::z(2, 0);
        assert!(matches!(
            p.wirtinger(2, Wirtinger::Holomorphic),
            Err(PolyError::VarOutOfRange { .. })
        ));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let p = CxPolynomial::z(2, 0);
        assert!(p.eval(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn identity_compose_is_noop() {
        let p = &(&CxPolynomial::z(2, 0) * &CxPolynomial::zbar(2, 1)) + &CxPolynomial::constant(2, c(3.0, 1.0));
        let b = vec![c(0.0, 0.0); 2];
        let m = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert_eq!(p.compose_affine(&b, &m).unwrap(), p);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let p = CxPolynomial::z(2, 0);
        let m = vec![vec![c(1.0, 0.0)]];
        assert!(p.compose_affine(&[c(0.0, 0.0)], &m).is_err());
    }

    #[test]
    fn norm_of_two_abs_sq() {
        let p = (&CxPolynomial::z(1, 0) * &CxPolynomial::zbar(1, 0)).scale(&c(2.0, 0.0));
        assert_eq!(p.norm(), 2.0);
        assert_eq!(CxPolynomial::zero(3).norm(), 0.0);
    }

    #[test]
    fn degree_cap_error() {
        let p = CxPolynomial::z(1, 0).pow(7);
        assert!(p.check_degree_cap(6).is_err());
        assert!(p.check_degree_cap(7).is_ok());
    }
}
