//! Orders of contact of complex and real lines with the boundary.
//!
//! The order of a line through a boundary point is the vanishing order of the
//! defining function restricted to it. For a polynomial of degree `<= 2m` an
//! order above `2m` means the restriction vanishes identically.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::cvec::{self, Point};
use crate::domain::{Domain, BOUNDARY_TOL};
use crate::optim;
use crate::restrict::{LineRestriction, LocalExpansion};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContactOrder {
    Finite(u32),
    Infinite,
}

impl ContactOrder {
    fn from_lowest(o: Option<u32>) -> Self {
        o.map_or(ContactOrder::Infinite, ContactOrder::Finite)
    }

    /// Integer encoding with `Infinite` mapped to `2m + 1`.
    pub fn sentinel(self, m: u32) -> u32 {
        match self {
            ContactOrder::Finite(k) => k,
            ContactOrder::Infinite => 2 * m + 1,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ContactOrder::Infinite)
    }
}

impl PartialOrd for ContactOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ContactOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        use ContactOrder::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ContactOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContactOrder::Finite(k) => write!(f, "{k}"),
            ContactOrder::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ContactOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ContactOrder::Finite(k) => s.serialize_u32(*k),
            ContactOrder::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalLine {
    /// Angle in `[0, pi)`; the real line is `s -> zeta + s e^{i theta} gamma`.
    pub theta: f64,
    pub real_order: ContactOrder,
    pub complex_order: ContactOrder,
}

fn restriction(d: &Domain, zeta: &[Complex64], gamma: &[Complex64]) -> Result<LineRestriction, Error> {
    d.check_dim(zeta)?;
    d.check_dim(gamma)?;
    let r = d.rho(zeta);
    let scale = cvec::norm(&d.real_gradient(zeta)).max(1.0);
    if r.abs() > BOUNDARY_TOL * scale {
        return Err(Error::NotOnBoundary { rho: r });
    }
    let g = cvec::normalize(gamma).ok_or(Error::ZeroDirection)?;
    Ok(LocalExpansion::new(d, zeta).restrict(&g))
}

/// Vanishing order of `lambda -> rho(zeta + lambda gamma)` at 0.
pub fn complex_line_order(d: &Domain, zeta: &[Complex64], gamma: &[Complex64]) -> Result<ContactOrder, Error> {
    Ok(ContactOrder::from_lowest(restriction(d, zeta, gamma)?.lowest_order()))
}

/// Vanishing order of `s -> rho(zeta + s e^{i theta} gamma)`, `s` real.
pub fn real_line_order(
    d: &Domain,
    zeta: &[Complex64],
    gamma: &[Complex64],
    theta: f64,
) -> Result<ContactOrder, Error> {
    Ok(ContactOrder::from_lowest(
        restriction(d, zeta, gamma)?.lowest_real_order(theta),
    ))
}

/// Real lines inside the complex line through `gamma` whose order exceeds
/// the complex order.
///
/// The candidates are the zeros of the leading form
/// `g(theta) = sum_{a+b=k} c_ab e^{i(a-b)theta}` (with `k` the complex order),
/// located by a grid scan of `|g|` over `[0, pi)` and golden-section
/// refinement; each is then confirmed by recomputing the real order.
/// `d^j/dtheta^j` of the leading real-line coefficient of order `k`.
fn leading_derivative(r: &LineRestriction, k: usize, j: u32, theta: f64) -> f64 {
    (0..=k)
        .map(|a| {
            let m = a as f64 - (k - a) as f64;
            let ph = Complex64::from_polar(1.0, m * theta) * Complex64::new(0.0, m).powu(j);
            (r.coeff(a, k - a) * ph).re
        })
        .sum()
}

/// Number of leading derivatives of the order-`k` line coefficient that
/// vanish at `theta`, each judged against its own coefficient scale.
fn vanishing_derivatives(r: &LineRestriction, k: usize, theta: f64) -> u32 {
    let scale = |j: u32| -> f64 {
        (0..=k)
            .map(|a| r.coeff(a, k - a).norm() * (a as f64 - (k - a) as f64).abs().powi(j as i32))
            .sum()
    };
    (0..=(k as u32 + 1))
        .take_while(|&j| leading_derivative(r, k, j, theta).abs() <= 1e-9 * (1.0 + scale(j)))
        .count() as u32
}

/// A root of multiplicity `mu` is a simple root of the `(mu - 1)`-th
/// derivative. Newton is run on each derivative from `t0`; the candidate at
/// which the most derivatives vanish wins. This recovers multiple roots to
/// full precision, where direct minimization only reaches `tol^(1/mu)`.
fn polish_root(r: &LineRestriction, k: usize, t0: f64, h: f64) -> f64 {
    let mut best = (vanishing_derivatives(r, k, t0), t0);
    for j in 0..=(k as u32) {
        let mut t = t0;
        for _ in 0..60 {
            let d1 = leading_derivative(r, k, j + 1, t);
            if d1 == 0.0 {
                break;
            }
            let step = leading_derivative(r, k, j, t) / d1;
            t -= step;
            if (t - t0).abs() > h || step.abs() < 1e-17 {
                break;
            }
        }
        let v = vanishing_derivatives(r, k, t);
        if (t - t0).abs() <= h && v > best.0 {
            best = (v, t);
        }
    }
    best.1
}

pub fn exceptional_real_lines(
    d: &Domain,
    zeta: &[Complex64],
    gamma: &[Complex64],
    steps: usize,
) -> Result<Vec<ExceptionalLine>, Error> {
    let r = restriction(d, zeta, gamma)?;
    let Some(k) = r.lowest_order() else {
        return Ok(vec![]);
    };
    let complex_order = ContactOrder::Finite(k);
    let k = k as usize;
    let steps = steps.max(8);
    let h = PI / steps as f64;
    let g = |t: f64| r.real_line_coeff(k, t).abs();
    let vals: Vec<f64> = (0..steps).map(|i| g(i as f64 * h)).collect();
    let gmax = vals.iter().cloned().fold(0.0, f64::max);
    let tol = r.zero_tol().max(1e-12 * gmax);

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..steps {
        let prev = vals[(i + steps - 1) % steps];
        let next = vals[(i + 1) % steps];
        if vals[i] > prev || vals[i] > next {
            continue;
        }
        let center = i as f64 * h;
        let (t, gt) = optim::golden_min(g, center - h, center + h, 1e-15, 200);
        if gt <= tol {
            let t = polish_root(&r, k, t, h).rem_euclid(PI);
            let dup = roots.iter().any(|&s| {
                let diff = (s - t).abs();
                diff.min(PI - diff) < 1e-6
            });
            if !dup {
                roots.push(t);
            }
        }
    }
    roots.sort_by(f64::total_cmp);

    let mut out = Vec::new();
    for theta in roots {
        let real_order = ContactOrder::from_lowest(r.lowest_real_order(theta));
        if real_order > complex_order {
            out.push(ExceptionalLine {
                theta,
                real_order,
                complex_order,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearTypeResult {
    pub order: ContactOrder,
    pub direction: Point,
}

fn lex_less(a: &[Complex64], b: &[Complex64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > 1e-12 {
                return p < q;
            }
        }
    }
    false
}

/// Maximal order of contact of complex tangent lines at `zeta`.
///
/// Candidates: the tangent frame, projected coordinate axes and
/// `n_multistart` random tangent directions. For each target order `j` above
/// the best found, the homogenized sum `sum_{i<j} ||H_i(gamma)||^{1/i}` of the
/// lower homogeneous parts is minimized by Nelder-Mead in an affine chart of
/// the projectivized tangent space; the minimizer's order is then recomputed.
pub fn linear_type(d: &Domain, zeta: &[Complex64], n_multistart: usize, seed: u64) -> Result<LinearTypeResult, Error> {
    let frame = d.frame_at(zeta)?;
    let tb = frame.tangent_basis.clone();
    if tb.is_empty() {
        return Err(Error::InvalidInput("no complex tangent directions in dimension 1".into()));
    }
    let le = LocalExpansion::new(d, zeta);
    let order_of = |g: &Point| ContactOrder::from_lowest(le.restrict(g).lowest_order());

    let n = d.nvars();
    let mut candidates: Vec<Point> = tb.clone();
    for k in 0..n {
        let p = cvec::orthogonalize(&cvec::unit(n, k), std::slice::from_ref(&frame.normal));
        if let Some(u) = cvec::normalize(&p) {
            if cvec::norm(&p) > 1e-8 {
                candidates.push(u);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_multistart {
        candidates.push(cvec::random_unit_in(&mut rng, &tb));
    }
    let candidates: Vec<Point> = candidates.iter().map(|c| cvec::canonical_phase(c)).collect();

    let mut best_order = ContactOrder::Finite(0);
    let mut best_dir = candidates[0].clone();
    let consider = |g: Point, o: ContactOrder, best_order: &mut ContactOrder, best_dir: &mut Point| {
        if o > *best_order || (o == *best_order && lex_less(&g, best_dir)) {
            *best_order = o;
            *best_dir = g;
        }
    };
    for c in &candidates {
        let o = order_of(c);
        consider(c.clone(), o, &mut best_order, &mut best_dir);
    }

    let top = d.infinite_order();
    let p = tb.len();
    while let ContactOrder::Finite(cur) = best_order {
        let target = cur + 1;
        if target >= top || p == 1 {
            break;
        }
        let objective = |g: &Point| -> f64 {
            let r = le.restrict(g);
            (1..target as usize)
                .map(|i| r.degree_norm(i).powf(1.0 / i as f64))
                .sum()
        };
        // seeds: candidates with smallest objective
        let mut scored: Vec<(f64, &Point)> = candidates.iter().map(|c| (objective(c), c)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut improved = false;
        for (_, start) in scored.iter().take(4) {
            let coords: Vec<Complex64> = tb.iter().map(|t| cvec::inner(start, t)).collect();
            let pivot = (0..p)
                .max_by(|&a, &b| coords[a].norm().total_cmp(&coords[b].norm()))
                .unwrap();
            let to_dir = |x: &[f64]| -> Point {
                let mut v = tb[pivot].clone();
                let mut idx = 0;
                for (i, t) in tb.iter().enumerate() {
                    if i == pivot {
                        continue;
                    }
                    v = cvec::axpy(&v, Complex64::new(x[idx], x[idx + 1]), t);
                    idx += 2;
                }
                cvec::normalize(&v).unwrap()
            };
            let x0: Vec<f64> = (0..p)
                .filter(|&i| i != pivot)
                .flat_map(|i| {
                    let c = coords[i] / coords[pivot];
                    [c.re, c.im]
                })
                .collect();
            let res = optim::nelder_mead(|x| objective(&to_dir(x)), &x0, 0.25, 2000, 1e-14);
            let g = cvec::canonical_phase(&to_dir(&res.x));
            let o = order_of(&g);
            if o >= ContactOrder::Finite(target) {
                consider(g, o, &mut best_order, &mut best_dir);
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(LinearTypeResult {
        order: best_order,
        direction: best_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_defining_n;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model() -> Domain {
        Domain::new(parse_defining_n("y1 + x2^4 + x3^6 + y3^10", Some(3)).unwrap(), 5).unwrap()
    }

    fn origin() -> Point {
        vec![c(0.0, 0.0); 3]
    }

    #[test]
    fn model_complex_orders() {
        let d = model();
        let z = origin();
        assert_eq!(complex_line_order(&d, &z, &cvec::unit(3, 1)).unwrap(), ContactOrder::Finite(4));
        assert_eq!(complex_line_order(&d, &z, &cvec::unit(3, 2)).unwrap(), ContactOrder::Finite(6));
        assert_eq!(complex_line_order(&d, &z, &cvec::unit(3, 0)).unwrap(), ContactOrder::Finite(1));
    }

    #[test]
    fn model_real_orders() {
        let d = model();
        let z = origin();
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert_eq!(real_line_order(&d, &z, &cvec::unit(3, 1), half_pi).unwrap(), ContactOrder::Infinite);
        assert_eq!(real_line_order(&d, &z, &cvec::unit(3, 2), half_pi).unwrap(), ContactOrder::Finite(10));
        assert_eq!(real_line_order(&d, &z, &cvec::unit(3, 1), 0.0).unwrap(), ContactOrder::Finite(4));
    }

    #[test]
    fn zero_direction_rejected() {
        let d = model();
        assert_eq!(complex_line_order(&d, &origin(), &origin()), Err(Error::ZeroDirection));
    }

    #[test]
    fn off_boundary_rejected() {
        let d = model();
        let z = vec![c(0.0, -0.1), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            complex_line_order(&d, &z, &cvec::unit(3, 1)),
            Err(Error::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn sentinel_and_order() {
        assert_eq!(ContactOrder::Infinite.sentinel(5), 11);
        assert!(ContactOrder::Infinite > ContactOrder::Finite(100));
    }

    #[test]
    fn exceptional_lines_model() {
        let d = model();
        let z = origin();
        let e2 = exceptional_real_lines(&d, &z, &cvec::unit(3, 1), 720).unwrap();
        assert_eq!(e2.len(), 1, "{e2:?}");
        assert!(e2[0].theta.cos().abs() < 1e-3);
        assert_eq!(e2[0].real_order, ContactOrder::Infinite);
        assert_eq!(e2[0].complex_order, ContactOrder::Finite(4));
        let e3 = exceptional_real_lines(&d, &z, &cvec::unit(3, 2), 720).unwrap();
        assert_eq!(e3.len(), 1, "{e3:?}");
        assert!(e3[0].theta.cos().abs() < 1e-3);
        assert_eq!(e3[0].real_order, ContactOrder::Finite(10));
    }

    #[test]
    fn ball_has_no_exceptional_lines() {
        let d = Domain::new(parse_defining_n("x1^2+y1^2+x2^2+y2^2+x3^2+y3^2-1", Some(3)).unwrap(), 1).unwrap();
        let z = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let g = cvec::normalize(&[c(0.0, 0.0), c(1.0, 0.5), c(-0.3, 0.2)]).unwrap();
        assert!(exceptional_real_lines(&d, &z, &g, 720).unwrap().is_empty());
    }

    #[test]
    fn linear_types() {
        let d = model();
        let r = linear_type(&d, &origin(), 16, 1).unwrap();
        assert_eq!(r.order, ContactOrder::Finite(6));
        assert!(r.direction[2].norm() > 0.999);

        let ball = Domain::new(parse_defining_n("x1^2+y1^2+x2^2+y2^2+x3^2+y3^2-1", Some(3)).unwrap(), 1).unwrap();
        let r = linear_type(&ball, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 16, 1).unwrap();
        assert_eq!(r.order, ContactOrder::Finite(2));

        let hs = Domain::new(parse_defining_n("y1", Some(3)).unwrap(), 1).unwrap();
        assert_eq!(linear_type(&hs, &origin(), 4, 1).unwrap().order, ContactOrder::Infinite);
    }

    #[test]
    fn linear_type_finds_hidden_direction() {
        // order 6 only along the non-coordinate direction e2 + e3
        let d = Domain::new(
            parse_defining_n("y1 + (x2 - x3)^4 + (y2 - y3)^4 + x2^6 + x3^6", Some(3)).unwrap(),
            3,
        )
        .unwrap();
        let r = linear_type(&d, &origin(), 8, 3).unwrap();
        assert_eq!(r.order, ContactOrder::Finite(6), "{r:?}");
    }
}
