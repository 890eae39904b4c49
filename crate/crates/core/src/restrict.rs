//! Restrictions of the defining function to complex lines `lambda -> zeta + lambda*gamma`.

use num_complex::Complex64;

use crate::cvec;
use crate::domain::Domain;
use crate::polyring::CxPolynomial;

/// Taylor expansion of `rho(zeta + h) - rho(zeta)` in `(h, conj h)`.
#[derive(Clone, Debug)]
pub struct LocalExpansion {
    nvars: usize,
    degree: usize,
    terms: Vec<(Vec<u32>, Vec<u32>, Complex64)>,
}

impl LocalExpansion {
    pub fn new(d: &Domain, zeta: &[Complex64]) -> Self {
        let n = d.nvars();
        let ident: Vec<Vec<Complex64>> = (0..n).map(|k| cvec::unit(n, k)).collect();
        let shifted = d
            .defining()
            .as_cx()
            .compose_affine(zeta, &ident)
            .expect("dimensions match");
        Self::from_polynomial(&shifted)
    }

    /// Uses `p` as the expansion directly, dropping its constant term.
    pub fn from_polynomial(p: &CxPolynomial) -> Self {
        let terms: Vec<_> = p
            .terms()
            .filter(|(m, _)| m.degree() > 0)
            .map(|(m, c)| (m.alpha.clone(), m.beta.clone(), *c))
            .collect();
        LocalExpansion {
            nvars: p.nvars(),
            degree: p.degree().unwrap_or(0) as usize,
            terms,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients of `lambda^a conj(lambda)^b` in `rho(zeta + lambda*gamma) - rho(zeta)`.
    pub fn restrict(&self, gamma: &[Complex64]) -> LineRestriction {
        let deg = self.degree;
        let mut pw = vec![vec![Complex64::new(1.0, 0.0); deg + 1]; self.nvars];
        for (j, g) in gamma.iter().enumerate() {
            for e in 1..=deg {
                pw[j][e] = pw[j][e - 1] * g;
            }
        }
        let mut c = vec![vec![Complex64::new(0.0, 0.0); deg + 1]; deg + 1];
        for (alpha, beta, coef) in &self.terms {
            let mut t = *coef;
            let mut a = 0usize;
            let mut b = 0usize;
            for j in 0..self.nvars {
                let (aj, bj) = (alpha[j] as usize, beta[j] as usize);
                if aj > 0 {
                    t *= pw[j][aj];
                }
                if bj > 0 {
                    t *= pw[j][bj].conj();
                }
                a += aj;
                b += bj;
            }
            c[a][b] += t;
        }
        LineRestriction { degree: deg, c }
    }
}

/// Dense bivariate polynomial `sum c[a][b] lambda^a conj(lambda)^b`, `a + b <= degree`.
#[derive(Clone, Debug)]
pub struct LineRestriction {
    degree: usize,
    c: Vec<Vec<Complex64>>,
}

impl LineRestriction {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        self.c[a][b]
    }

    /// Norm (sum of moduli) of the homogeneous part of degree `j`.
    pub fn degree_norm(&self, j: usize) -> f64 {
        if j > self.degree {
            return 0.0;
        }
        (0..=j).map(|a| self.c[a][j - a].norm()).sum()
    }

    /// Scale against which coefficients are judged to vanish.
    pub fn zero_tol(&self) -> f64 {
        let mut mx: f64 = 0.0;
        for row in &self.c {
            for v in row {
                mx = mx.max(v.norm());
            }
        }
        1e-12 * (1.0 + mx)
    }

    /// Lowest degree `j >= 1` with a non-negligible homogeneous part.
    pub fn lowest_order(&self) -> Option<u32> {
        let tol = self.zero_tol();
        (1..=self.degree)
            .find(|&j| self.degree_norm(j) > tol)
            .map(|j| j as u32)
    }

    /// Coefficient of `s^j` in `R(s e^{i theta})` for real `s`.
    pub fn real_line_coeff(&self, j: usize, theta: f64) -> f64 {
        if j > self.degree {
            return 0.0;
        }
        (0..=j)
            .map(|a| {
                let b = j - a;
                let ph = Complex64::from_polar(1.0, (a as f64 - b as f64) * theta);
                (self.c[a][b] * ph).re
            })
            .sum()
    }

    /// Lowest degree with non-negligible coefficient along the real line of angle `theta`.
    pub fn lowest_real_order(&self, theta: f64) -> Option<u32> {
        let tol = self.zero_tol();
        (1..=self.degree)
            .find(|&j| self.real_line_coeff(j, theta).abs() > tol)
            .map(|j| j as u32)
    }

    pub fn eval(&self, lambda: Complex64) -> f64 {
        let mut acc = 0.0;
        let mut la = Complex64::new(1.0, 0.0);
        for a in 0..=self.degree {
            let mut lb = Complex64::new(1.0, 0.0);
            for b in 0..=(self.degree - a) {
                acc += (self.c[a][b] * la * lb.conj()).re;
                lb *= lambda;
            }
            la *= lambda;
        }
        acc
    }

    /// Upper bound `sum_j N_j c^j >= max_{|lambda|=c} |R|` with `N_j` the degree norms.
    pub fn norm_bound(&self, c: f64) -> f64 {
        let mut acc = 0.0;
        let mut cj = 1.0;
        for j in 1..=self.degree {
            cj *= c;
            acc += self.degree_norm(j) * cj;
        }
        acc
    }

    /// Real trigonometric profiles `g_j(phi)` with `R(c e^{i phi}) = sum_j c^j g_j(phi)`,
    /// tabulated on `nphase` equally spaced phases.
    pub fn circle_table(&self, nphase: usize) -> CircleTable {
        let deg = self.degree;
        let mut g = vec![vec![0.0; deg + 1]; nphase];
        // e^{i k phi} for k = 0..=deg
        for (p, row) in g.iter_mut().enumerate() {
            let phi = std::f64::consts::TAU * p as f64 / nphase as f64;
            let base = Complex64::from_polar(1.0, phi);
            let mut pows = Vec::with_capacity(deg + 1);
            pows.push(Complex64::new(1.0, 0.0));
            for k in 1..=deg {
                pows.push(pows[k - 1] * base);
            }
            for j in 1..=deg {
                let mut s = 0.0;
                for a in 0..=j {
                    let b = j - a;
                    let v = self.c[a][b];
                    if v.re == 0.0 && v.im == 0.0 {
                        continue;
                    }
                    let ph = if a >= b { pows[a - b] } else { pows[b - a].conj() };
                    s += (v * ph).re;
                }
                row[j] = s;
            }
        }
        CircleTable { nphase, g }
    }
}

/// See [`LineRestriction::circle_table`].
#[derive(Clone, Debug)]
pub struct CircleTable {
    nphase: usize,
    g: Vec<Vec<f64>>,
}

impl CircleTable {
    fn value_at(&self, p: usize, c: f64) -> f64 {
        let row = &self.g[p];
        let mut acc = 0.0;
        for j in (1..row.len()).rev() {
            acc = (acc + row[j]) * c;
        }
        acc
    }

    /// Grid maximum of `|R|` on the circle of radius `c`, with its phase index.
    pub fn grid_max(&self, c: f64) -> (f64, usize) {
        let mut best = (0.0, 0);
        for p in 0..self.nphase {
            let v = self.value_at(p, c).abs();
            if v > best.0 {
                best = (v, p);
            }
        }
        best
    }

    pub fn nphase(&self) -> usize {
        self.nphase
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_defining_n;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn restriction_matches_direct_evaluation() {
        let d = Domain::new(parse_defining_n("y1 + x2^4 + x3^6 + y3^10 + x1*x2^2", Some(3)).unwrap(), 5).unwrap();
        let zeta = vec![c(0.1, -0.05), c(0.2, 0.1), c(-0.3, 0.05)];
        let gamma = cvec::normalize(&[c(0.3, 0.1), c(-0.5, 0.7), c(0.2, -0.4)]).unwrap();
        let le = LocalExpansion::new(&d, &zeta);
        let r = le.restrict(&gamma);
        let tab = r.circle_table(16);
        for &lam in &[c(0.1, 0.0), c(-0.2, 0.3), c(0.05, -0.4)] {
            let direct = d.rho(&cvec::axpy(&zeta, lam, &gamma)) - d.rho(&zeta);
            assert!((r.eval(lam) - direct).abs() < 1e-13, "{} vs {}", r.eval(lam), direct);
        }
        let rad = 0.25;
        for p in 0..16 {
            let phi = std::f64::consts::TAU * p as f64 / 16.0;
            let lam = Complex64::from_polar(rad, phi);
            assert!((tab.value_at(p, rad) - r.eval(lam)).abs() < 1e-13);
        }
    }
}
