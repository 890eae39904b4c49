//! Small helpers for vectors in C^n stored as `Vec<Complex64>`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Point = Vec<Complex64>;

/// Hermitian inner product `sum a_j conj(b_j)`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Complex64], c: Complex64) -> Point {
    a.iter().map(|x| x * c).collect()
}

/// `a + c * b`
pub fn axpy(a: &[Complex64], c: Complex64, b: &[Complex64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn normalize(a: &[Complex64]) -> Option<Point> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, Complex64::new(1.0 / n, 0.0)))
}

pub fn unit(n: usize, k: usize) -> Point {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Gram-Schmidt: removes the components of `v` along the orthonormal `basis`.
pub fn orthogonalize(v: &[Complex64], basis: &[Point]) -> Point {
    let mut out = v.to_vec();
    // two passes for stability
    for _ in 0..2 {
        for b in basis {
            let c = inner(&out, b);
            out = axpy(&out, -c, b);
        }
    }
    out
}

/// Completes the orthonormal set `basis` to an orthonormal basis of C^n
/// using the standard basis vectors in index order.
pub fn complete_basis(basis: &[Point], n: usize) -> Vec<Point> {
    let mut out: Vec<Point> = basis.to_vec();
    for k in 0..n {
        if out.len() == n {
            break;
        }
        let r = orthogonalize(&unit(n, k), &out);
        if norm(&r) > 1e-8 {
            out.push(normalize(&r).unwrap());
        }
    }
    out
}

/// Multiplies by a unit phase so that the first entry with modulus above
/// `1e-12` is real and positive. Used to make directions comparable.
pub fn canonical_phase(v: &[Complex64]) -> Point {
    match v.iter().find(|x| x.norm() > 1e-12) {
        Some(x) => scale(v, x.conj() / x.norm()),
        None => v.to_vec(),
    }
}

/// Uniform random unit vector in the span of `basis` (orthonormal).
pub fn random_unit_in<R: Rng + ?Sized>(rng: &mut R, basis: &[Point]) -> Point {
    let n = basis[0].len();
    loop {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for b in basis {
            let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            v = axpy(&v, c, b);
        }
        if let Some(u) = normalize(&v) {
            return u;
        }
    }
}

/// Uniform random point in the complex unit ball of dimension `basis.len()`,
/// expressed in `basis` and scaled by `radius`.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, basis: &[Point], radius: f64) -> Point {
    let u = random_unit_in(rng, basis);
    let dim = 2.0 * basis.len() as f64;
    let r = radius * rng.gen::<f64>().powf(1.0 / dim);
    scale(&u, Complex64::new(r, 0.0))
}

/// Sample from a uniform point on the complex disc of radius `r`.
pub fn random_in_disc<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex64 {
    let rho = r * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rho, rng.gen::<f64>() * std::f64::consts::TAU)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_is_orthonormal() {
        let v = normalize(&[Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(0.5, 0.0)]).unwrap();
        let b = complete_basis(&[v], 3);
        assert_eq!(b.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let ip = inner(&b[i], &b[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}
