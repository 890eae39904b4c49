//! Two-dimensional slices `w -> zeta - i w1 n + w2 t` and their Taylor data.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::cvec::{self, Point};
use crate::domain::{BoundaryFrame, Domain};
use crate::polyring::{CxPolynomial, HermitianPolynomial, Monomial};
use crate::Error;

/// Restriction of the defining function to a slice.
#[derive(Clone, Debug)]
pub struct Slice {
    pub frame: BoundaryFrame,
    pub t: Point,
    /// `r(z(w)) - r(zeta)` as a polynomial in `(w1, w2)`.
    pub r_slice: HermitianPolynomial,
    degree_cap: u32,
}

/// Homogeneous `w2`-parts of the slice function at the origin.
#[derive(Clone, Debug, Serialize)]
pub struct SliceTaylor {
    /// `p[j]` is the degree-`j` part, a polynomial in one variable `w2`;
    /// indices 0 and 1 are kept so that `p[1]` is the tangential linear term.
    pub p: Vec<CxPolynomial>,
    pub norms: Vec<f64>,
}

impl SliceTaylor {
    pub fn part(&self, j: usize) -> &CxPolynomial {
        &self.p[j]
    }

    pub fn norm(&self, j: usize) -> f64 {
        self.norms.get(j).copied().unwrap_or(0.0)
    }

    /// Degree of the highest Taylor part (`2m`).
    pub fn top(&self) -> usize {
        self.p.len() - 1
    }
}

/// Builds the slice through `zeta` (a point of `W0`) in the tangent direction `t`.
pub fn make_slice(d: &Domain, zeta: &[Complex64], t: &[Complex64]) -> Result<Slice, Error> {
    d.check_dim(zeta)?;
    d.check_dim(t)?;
    let r0 = d.rho(zeta);
    if r0.abs() >= d.w0_radius {
        return Err(Error::OutsideNeighborhood(zeta.to_vec()));
    }
    let frame = d.level_frame(zeta)?;
    let t = cvec::normalize(t).ok_or(Error::ZeroDirection)?;
    let ip = cvec::inner(&t, &frame.normal).norm();
    if ip > 1e-8 {
        return Err(Error::NotTangent(ip));
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let m: Vec<Vec<Complex64>> = (0..d.nvars())
        .map(|j| vec![minus_i * frame.normal[j], t[j]])
        .collect();
    let composed = d.defining().as_cx().compose_affine(zeta, &m)?;
    let mut terms = CxPolynomial::zero(2);
    for (mono, c) in composed.terms() {
        if mono.degree() > 0 {
            terms.add_term(mono.clone(), *c);
        }
    }
    let tol = 1e-9 * (1.0 + terms.max_coeff());
    let r_slice = HermitianPolynomial::from_cx(terms, tol)?;
    Ok(Slice {
        frame,
        t,
        r_slice,
        degree_cap: 2 * d.m(),
    })
}

impl Slice {
    pub fn eval(&self, w1: Complex64, w2: Complex64) -> f64 {
        self.r_slice.eval_real(&[w1, w2]).unwrap()
    }

    /// The point `z(w)` of C^n.
    pub fn point(&self, w1: Complex64, w2: Complex64) -> Point {
        let p = cvec::axpy(&self.frame.zeta, Complex64::new(0.0, -1.0) * w1, &self.frame.normal);
        cvec::axpy(&p, w2, &self.t)
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }
}

/// Extracts the Taylor parts `P^j`, `j = 0..=2m`, by reading off the
/// `w1`-free terms of the slice polynomial.
pub fn slice_taylor(s: &Slice) -> SliceTaylor {
    let top = s.degree_cap as usize;
    let mut p: Vec<CxPolynomial> = vec![CxPolynomial::zero(1); top + 1];
    for (mono, c) in s.r_slice.as_cx().terms() {
        if mono.alpha[0] != 0 || mono.beta[0] != 0 {
            continue;
        }
        let j = mono.degree() as usize;
        if j > top {
            continue;
        }
        p[j].add_term(Monomial::new(vec![mono.alpha[1]], vec![mono.beta[1]]), *c);
    }
    let norms = p.iter().map(CxPolynomial::norm).collect();
    SliceTaylor { p, norms }
}

/// Coefficients of `P^j` keyed by `(k, l)` for `w2^k conj(w2)^l`.
pub fn taylor_coefficients(tay: &SliceTaylor, j: usize) -> BTreeMap<(u32, u32), Complex64> {
    tay.p[j]
        .terms()
        .map(|(m, c)| ((m.alpha[0], m.beta[0]), *c))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub j: usize,
    pub npoints: usize,
    /// `max_i |c(i+1) - c(i)| / |step_i|` over the path.
    pub max_divided_difference: f64,
    /// `max_i |c(i+1) - c(i)|`.
    pub max_jump: f64,
}

/// Finite-difference modulus of continuity of the coefficients of `P^j`
/// along a sampled path of `(zeta, t)`.
pub fn smoothness_probe(
    d: &Domain,
    zeta_path: &[Point],
    t_path: &[Point],
    j: usize,
) -> Result<SmoothnessReport, Error> {
    if zeta_path.len() != t_path.len() || zeta_path.is_empty() {
        return Err(Error::InvalidInput("paths must be non-empty and of equal length".into()));
    }
    let coeffs: Vec<BTreeMap<(u32, u32), Complex64>> = zeta_path
        .iter()
        .zip(t_path)
        .map(|(z, t)| make_slice(d, z, t).map(|s| taylor_coefficients(&slice_taylor(&s), j)))
        .collect::<Result<_, _>>()?;
    let mut max_dd: f64 = 0.0;
    let mut max_jump: f64 = 0.0;
    for i in 1..coeffs.len() {
        let step = (cvec::dist(&zeta_path[i], &zeta_path[i - 1]).powi(2)
            + cvec::dist(&t_path[i], &t_path[i - 1]).powi(2))
        .sqrt();
        let mut keys: Vec<_> = coeffs[i].keys().chain(coeffs[i - 1].keys()).collect();
        keys.sort();
        keys.dedup();
        let diff = keys
            .iter()
            .map(|k| {
                let a = coeffs[i].get(k).copied().unwrap_or_default();
                let b = coeffs[i - 1].get(k).copied().unwrap_or_default();
                (a - b).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        max_jump = max_jump.max(diff);
        if step > 0.0 {
            max_dd = max_dd.max(diff / step);
        }
    }
    Ok(SmoothnessReport {
        j,
        npoints: coeffs.len(),
        max_divided_difference: max_dd,
        max_jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_complex, parse_defining_n};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model() -> Domain {
        Domain::new(parse_defining_n("y1 + x2^4 + x3^6 + y3^10", Some(3)).unwrap(), 5).unwrap()
    }

    #[test]
    fn half_space_slice_is_linear() {
        let d = Domain::new(parse_defining_n("y1", Some(3)).unwrap(), 1).unwrap();
        let s = make_slice(&d, &[c(0.0, 0.0); 3], &cvec::unit(3, 1)).unwrap();
        // z1 = -i w1 (i) = w1, so r_slice = Im w1
        let expect = parse_complex("y1", Some(2)).unwrap();
        assert_eq!(s.r_slice.as_cx(), &expect);
        assert!(s.eval(c(0.0, -1.0), c(0.0, 0.0)) < 0.0);
    }

    #[test]
    fn model_slices() {
        let d = model();
        let s2 = make_slice(&d, &[c(0.0, 0.0); 3], &cvec::unit(3, 1)).unwrap();
        let expect = parse_complex("y1 + x2^4", Some(2)).unwrap();
        assert!((&(s2.r_slice.as_cx().clone()) - &expect).prune(1e-15).is_zero());
        let s3 = make_slice(&d, &[c(0.0, 0.0); 3], &cvec::unit(3, 2)).unwrap();
        let expect = parse_complex("y1 + x2^6 + y2^10", Some(2)).unwrap();
        assert!((&(s3.r_slice.as_cx().clone()) - &expect).prune(1e-15).is_zero());
    }

    #[test]
    fn non_tangent_rejected() {
        let d = model();
        assert!(matches!(
            make_slice(&d, &[c(0.0, 0.0); 3], &cvec::unit(3, 0)),
            Err(Error::NotTangent(_))
        ));
    }

    #[test]
    fn taylor_parts_model() {
        let d = model();
        let tay = slice_taylor(&make_slice(&d, &[c(0.0, 0.0); 3], &cvec::unit(3, 1)).unwrap());
        assert_eq!(tay.top(), 10);
        for j in 0..=10 {
            let expect = if j == 4 { 1.0 } else { 0.0 };
            assert!((tay.norm(j) - expect).abs() < 1e-15, "j={j}");
        }
        let tay = slice_taylor(&make_slice(&d, &[c(0.0, 0.0); 3], &cvec::unit(3, 2)).unwrap());
        assert!((tay.norm(6) - 1.0).abs() < 1e-15);
        assert!((tay.norm(10) - 1.0).abs() < 1e-15);
        let x6 = parse_complex("x1^6", None).unwrap();
        assert!((&tay.p[6] - &x6).prune(1e-16).is_zero());
    }

    #[test]
    fn taylor_parts_ball() {
        let d = Domain::new(parse_defining_n("x1^2+y1^2+x2^2+y2^2+x3^2+y3^2-1", Some(3)).unwrap(), 1).unwrap();
        let z = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let t = cvec::normalize(&[c(0.0, 0.0), c(0.6, 0.1), c(0.2, -0.7)]).unwrap();
        let tay = slice_taylor(&make_slice(&d, &z, &t).unwrap());
        assert!((tay.norm(2) - 1.0).abs() < 1e-12);
        let abs2 = parse_complex("z1*conj(z1)", None).unwrap();
        assert!((&tay.p[2] - &abs2).prune(1e-12).is_zero());
    }

    #[test]
    fn constant_path_has_no_variation() {
        let d = model();
        let z = vec![vec![c(0.0, 0.0); 3]; 5];
        let t = vec![cvec::unit(3, 1); 5];
        let r = smoothness_probe(&d, &z, &t, 4).unwrap();
        assert_eq!(r.max_jump, 0.0);
    }

    fn transported_path(h: f64) -> (Vec<Point>, Vec<Point>) {
        let d = model();
        let steps = (0.4 / h).round() as usize;
        let mut zs = Vec::new();
        let mut ts = Vec::new();
        for i in 0..=steps {
            let s = -0.2 + i as f64 * h;
            let z = vec![c(0.0, -s.powi(4)), c(s, 0.0), c(0.0, 0.0)];
            let n = d.level_frame(&z).unwrap().normal;
            let t = cvec::orthogonalize(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)], &[n]);
            zs.push(z);
            ts.push(cvec::normalize(&t).unwrap());
        }
        (zs, ts)
    }

    #[test]
    fn divided_differences_converge() {
        let d = model();
        let dd: Vec<f64> = [0.02, 0.01, 0.005, 0.0025]
            .iter()
            .map(|&h| {
                let (z, t) = transported_path(h);
                smoothness_probe(&d, &z, &t, 4).unwrap().max_divided_difference
            })
            .collect();
        assert!(dd.iter().all(|v| v.is_finite() && *v < 100.0), "{dd:?}");
        for w in dd.windows(3) {
            assert!((w[2] - w[1]).abs() < 0.75 * (w[1] - w[0]).abs(), "{dd:?}");
        }
    }

    #[test]
    fn reconstruction_and_reality() {
        use rand::{Rng, SeedableRng};
        let d = model();
        let z = vec![c(0.0, -0.0016), c(0.2, 0.0), c(0.0, 0.0)];
        let n = d.level_frame(&z).unwrap().normal;
        let t = cvec::normalize(&cvec::orthogonalize(&[c(0.3, 0.0), c(0.5, 0.2), c(-0.4, 0.7)], &[n])).unwrap();
        let s = make_slice(&d, &z, &t).unwrap();
        let tay = slice_taylor(&s);
        let mut sum = CxPolynomial::zero(1);
        for p in &tay.p {
            sum = &sum + p;
        }
        let mut w2_part = CxPolynomial::zero(1);
        for (m, v) in s.r_slice.as_cx().terms() {
            if m.alpha[0] == 0 && m.beta[0] == 0 {
                w2_part.add_term(Monomial::new(vec![m.alpha[1]], vec![m.beta[1]]), *v);
            }
        }
        assert!((&w2_part - &sum).prune(0.0).is_zero());
        assert!(tay.p[0].is_zero());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let w = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for p in &tay.p[2..] {
                assert!(p.eval(&[w]).unwrap().im.abs() < 1e-12);
            }
        }
    }
}
