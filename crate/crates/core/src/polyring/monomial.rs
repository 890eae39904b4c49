use std::cmp::Ordering;
use std::fmt;

/// Exponent pair `(alpha, beta)` for the monomial `z^alpha * conj(z)^beta`.
///
/// Ordered graded-lexicographically: total degree first, then `alpha`,
/// then `beta`, both compared lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            alpha: vec![0; nvars],
            beta: vec![0; nvars],
        }
    }

    pub fn new(alpha: Vec<u32>, beta: Vec<u32>) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha/beta length mismatch");
        Monomial { alpha, beta }
    }

    pub fn holo(nvars: usize, var: usize, exp: u32) -> Self {
        let mut m = Self::one(nvars);
        m.alpha[var] = exp;
        m
    }

    pub fn anti(nvars: usize, var: usize, exp: u32) -> Self {
        let mut m = Self::one(nvars);
        m.beta[var] = exp;
        m
    }

    pub fn nvars(&self) -> usize {
        self.alpha.len()
    }

    pub fn degree(&self) -> u32 {
        self.holo_degree() + self.anti_degree()
    }

    pub fn holo_degree(&self) -> u32 {
        self.alpha.iter().sum()
    }

    pub fn anti_degree(&self) -> u32 {
        self.beta.iter().sum()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.beta.iter().all(|&b| b == 0)
    }

    /// The monomial with `alpha` and `beta` swapped (the conjugate monomial).
    pub fn conj(&self) -> Self {
        Monomial {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            alpha: self.alpha.iter().zip(&other.alpha).map(|(a, b)| a + b).collect(),
            beta: self.beta.iter().zip(&other.beta).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.alpha.cmp(&other.alpha))
            .then_with(|| self.beta.cmp(&other.beta))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?})", self.alpha, self.beta)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut emit = |f: &mut fmt::Formatter<'_>, s: String| -> fmt::Result {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&s)
        };
        for (j, &a) in self.alpha.iter().enumerate() {
            match a {
                0 => {}
                1 => emit(f, format!("z{}", j + 1))?,
                _ => emit(f, format!("z{}^{}", j + 1, a))?,
            }
        }
        for (j, &b) in self.beta.iter().enumerate() {
            match b {
                0 => {}
                1 => emit(f, format!("conj(z{})", j + 1))?,
                _ => emit(f, format!("conj(z{})^{}", j + 1, b))?,
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order() {
        let a = Monomial::new(vec![2, 0], vec![0, 0]);
        let b = Monomial::new(vec![0, 1], vec![0, 0]);
        assert!(b < a);
        let c = Monomial::new(vec![1, 0], vec![0, 1]);
        assert!(c < a);
    }

    #[test]
    fn display() {
        let m = Monomial::new(vec![2, 0], vec![0, 1]);
        assert_eq!(m.to_string(), "z1^2*conj(z2)");
        assert_eq!(Monomial::one(2).to_string(), "1");
    }
}
