//! Nonisotropic radii, extremal bases, distinguished polydiscs and the
//! pseudodistance built from them.

mod props;
mod table;

pub use props::{
    check_property_i, check_property_ii, check_property_iii, check_property_iv, check_property_v,
    run_properties, PropertyId, PropertyOptions, PropertyReport, PropertyRun,
};
pub use table::{DistanceTable, TableOptions};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::cvec::{self, Point};
use crate::domain::Domain;
use crate::optim;
use crate::restrict::{LineRestriction, LocalExpansion};
use crate::Error;

/// Resolution of a radius computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauOptions {
    /// Phases sampled on each circle `|lambda| = c`.
    pub nphase: usize,
    /// Relative width of the final bisection bracket.
    pub rel_tol: f64,
    /// Golden-section polish of the best phase.
    pub refine: bool,
}

impl TauOptions {
    pub const ACCURATE: TauOptions = TauOptions {
        nphase: 256,
        rel_tol: 1e-6,
        refine: true,
    };
    /// Cheap variant used as an objective inside optimizers.
    pub const SEARCH: TauOptions = TauOptions {
        nphase: 64,
        rel_tol: 1e-3,
        refine: false,
    };
}

impl Default for TauOptions {
    fn default() -> Self {
        Self::ACCURATE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tau {
    pub value: f64,
    /// The restriction stays below `eps` up to `rmax`.
    pub capped: bool,
}

impl Tau {
    /// `1/tau`, with capped radii treated as infinite.
    pub fn recip(&self) -> f64 {
        if self.capped {
            0.0
        } else {
            1.0 / self.value
        }
    }
}

const SCAN_STEP: f64 = 1.189_207_115_002_721; // 2^{1/4}

/// Largest `c <= rmax` with `|R(lambda)| < eps` for all `|lambda| < c`.
pub fn tau_restricted(r: &LineRestriction, eps: f64, rmax: f64, opts: TauOptions) -> Tau {
    let capped = Tau {
        value: rmax,
        capped: true,
    };
    if r.lowest_order().is_none() {
        return capped;
    }
    // sum_j N_j c^j bounds the circle maximum from above
    if r.norm_bound(rmax) < eps {
        return capped;
    }
    let (mut lo, mut hi) = (0.0, rmax);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r.norm_bound(mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    let table = r.circle_table(opts.nphase);
    let h = TAU / opts.nphase as f64;
    let reaches = |c: f64| -> bool {
        let (v, p) = table.grid_max(c);
        if v >= eps || !opts.refine {
            return v >= eps;
        }
        let phi0 = p as f64 * h;
        let (_, fv) = optim::golden_max(
            |phi| r.eval(Complex64::from_polar(c, phi)).abs(),
            phi0 - h,
            phi0 + h,
            1e-9,
            60,
        );
        fv >= eps
    };
    if reaches(lo) {
        return Tau {
            value: lo,
            capped: false,
        };
    }
    let mut prev = lo;
    let upper = loop {
        let c = (prev * SCAN_STEP).min(rmax);
        if reaches(c) {
            break c;
        }
        if c >= rmax {
            return capped;
        }
        prev = c;
    };
    let (lo, _) = optim::bisect_transition(reaches, prev, upper, opts.rel_tol, 200);
    Tau {
        value: lo,
        capped: false,
    }
}

/// `tau(zeta, gamma, eps)` with `gamma` normalized first.
pub fn tau(d: &Domain, zeta: &[Complex64], gamma: &[Complex64], eps: f64) -> Result<Tau, Error> {
    tau_with(d, zeta, gamma, eps, TauOptions::ACCURATE)
}

pub fn tau_with(
    d: &Domain,
    zeta: &[Complex64],
    gamma: &[Complex64],
    eps: f64,
    opts: TauOptions,
) -> Result<Tau, Error> {
    d.check_dim(zeta)?;
    d.check_dim(gamma)?;
    check_eps(eps)?;
    let g = cvec::normalize(gamma).ok_or(Error::ZeroDirection)?;
    let le = LocalExpansion::new(d, zeta);
    Ok(tau_restricted(&le.restrict(&g), eps, d.rmax, opts))
}

fn check_eps(eps: f64) -> Result<(), Error> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("eps must be positive, got {eps}")))
    }
}

/// Search effort for [`extremal_basis_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisOptions {
    pub n_multistart: usize,
    pub seed: u64,
    /// Number of best starts refined by Nelder-Mead.
    pub refine_starts: usize,
    /// Evaluation budget per refinement.
    pub max_evals: usize,
    /// Final refinement with the accurate radius.
    pub polish: bool,
}

impl BasisOptions {
    pub fn accurate(n_multistart: usize, seed: u64) -> Self {
        BasisOptions {
            n_multistart,
            seed,
            refine_starts: 3,
            max_evals: 240,
            polish: true,
        }
    }

    /// Reduced effort for sample-heavy callers.
    pub fn fast(seed: u64) -> Self {
        BasisOptions {
            n_multistart: 12,
            seed,
            refine_starts: 1,
            max_evals: 80,
            polish: false,
        }
    }
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self::accurate(64, 0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalBasis {
    pub zeta: Point,
    pub eps: f64,
    /// Orthonormal; `v[0]` is the unit normal.
    pub v: Vec<Point>,
    pub tau: Vec<f64>,
    pub capped: Vec<bool>,
    /// Some refinement ran out of budget before converging.
    pub stagnated: bool,
}

impl ExtremalBasis {
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Extremal coordinates `lambda_k = <z - zeta, v_k>`.
    pub fn coordinates(&self, z: &[Complex64]) -> Point {
        let dz = cvec::sub(z, &self.zeta);
        self.v.iter().map(|vk| cvec::inner(&dz, vk)).collect()
    }

    /// `zeta + sum_k lambda_k v_k`.
    pub fn point(&self, lambda: &[Complex64]) -> Point {
        let mut p = self.zeta.clone();
        for (l, vk) in lambda.iter().zip(&self.v) {
            p = cvec::axpy(&p, *l, vk);
        }
        p
    }

    /// The unitary matrix with rows `conj(v_k)`.
    pub fn phi(&self) -> Vec<Vec<Complex64>> {
        self.v
            .iter()
            .map(|vk| vk.iter().map(|c| c.conj()).collect())
            .collect()
    }

    pub fn tau_info(&self, k: usize) -> Tau {
        Tau {
            value: self.tau[k],
            capped: self.capped[k],
        }
    }

    /// `max_k |lambda_k| / tau_k`; `z` lies in `A P_eps(zeta)` iff this is `<= A`.
    pub fn gauge(&self, z: &[Complex64]) -> f64 {
        self.coordinates(z)
            .iter()
            .zip(&self.tau)
            .map(|(l, t)| l.norm() / t)
            .fold(0.0, f64::max)
    }
}

/// Orthonormal basis of the span of `h` whose first vector is `u0` (a unit
/// vector in that span).
fn chart_basis(u0: &Point, h: &[Point]) -> Vec<Point> {
    let mut out = vec![u0.clone()];
    for v in h {
        if out.len() == h.len() {
            break;
        }
        let r = cvec::orthogonalize(v, &out);
        if cvec::norm(&r) > 1e-8 {
            out.push(cvec::normalize(&r).unwrap());
        }
    }
    out
}

fn chart_point(b: &[Point], x: &[f64]) -> Point {
    let mut u = b[0].clone();
    for (i, bi) in b[1..].iter().enumerate() {
        u = cvec::axpy(&u, Complex64::new(x[2 * i], x[2 * i + 1]), bi);
    }
    cvec::normalize(&u).unwrap_or_else(|| b[0].clone())
}

/// Maximizes `tau(zeta, ., eps)` over unit vectors of the span of the
/// orthonormal set `h`. Returns the maximizer and whether the refinement
/// converged.
fn maximize_tau(
    le: &LocalExpansion,
    h: &[Point],
    eps: f64,
    rmax: f64,
    opts: &BasisOptions,
    stream: u64,
) -> (Point, bool) {
    let n = h[0].len();
    let score = |g: &Point, o: TauOptions| -> f64 {
        -tau_restricted(&le.restrict(g), eps, rmax, o).value.ln()
    };
    let mut starts: Vec<Point> = h.to_vec();
    // coordinate axes projected onto span(h)
    for k in 0..n {
        let e = cvec::unit(n, k);
        let p = h.iter().fold(vec![Complex64::new(0.0, 0.0); n], |acc, hv| {
            cvec::axpy(&acc, cvec::inner(&e, hv), hv)
        });
        if cvec::norm(&p) > 1e-8 {
            starts.push(cvec::normalize(&p).unwrap());
        }
    }
    let mut rng = Domain::rng_for(opts.seed, stream);
    for _ in 0..opts.n_multistart {
        starts.push(cvec::random_unit_in(&mut rng, h));
    }
    let mut scored: Vec<(f64, Point)> = starts
        .into_iter()
        .map(|g| (score(&g, TauOptions::SEARCH), g))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = scored[0].clone();
    let mut converged = true;
    for (_, u0) in scored.iter().take(opts.refine_starts.max(1)) {
        let b = chart_basis(u0, h);
        let x0 = vec![0.0; 2 * (b.len() - 1)];
        let res = optim::nelder_mead(
            |x| score(&chart_point(&b, x), TauOptions::SEARCH),
            &x0,
            0.25,
            opts.max_evals,
            1e-4,
        );
        if res.fx < best.0 {
            best = (res.fx, chart_point(&b, &res.x));
            converged = res.converged;
        }
    }
    if opts.polish {
        let b = chart_basis(&best.1, h);
        let x0 = vec![0.0; 2 * (b.len() - 1)];
        let f0 = score(&best.1, TauOptions::ACCURATE);
        let res = optim::nelder_mead(
            |x| score(&chart_point(&b, x), TauOptions::ACCURATE),
            &x0,
            0.02,
            60,
            1e-7,
        );
        if res.fx < f0 {
            best.1 = chart_point(&b, &res.x);
        }
    }
    (best.1, converged)
}

/// Greedy extremal basis at `zeta` for scale `eps`.
pub fn extremal_basis(
    d: &Domain,
    zeta: &[Complex64],
    eps: f64,
    n_multistart: usize,
    seed: u64,
) -> Result<ExtremalBasis, Error> {
    extremal_basis_with(d, zeta, eps, &BasisOptions::accurate(n_multistart, seed))
}

pub fn extremal_basis_with(
    d: &Domain,
    zeta: &[Complex64],
    eps: f64,
    opts: &BasisOptions,
) -> Result<ExtremalBasis, Error> {
    d.check_dim(zeta)?;
    check_eps(eps)?;
    let le = LocalExpansion::new(d, zeta);
    basis_from_expansion(d, &le, zeta, eps, opts)
}

pub(crate) fn basis_from_expansion(
    d: &Domain,
    le: &LocalExpansion,
    zeta: &[Complex64],
    eps: f64,
    opts: &BasisOptions,
) -> Result<ExtremalBasis, Error> {
    let n = d.nvars();
    let frame = d.level_frame(zeta)?;
    let mut v = vec![frame.normal];
    let mut stagnated = false;
    while v.len() < n {
        let h = cvec::complete_basis(&v, n)[v.len()..].to_vec();
        if h.len() == 1 {
            v.push(h[0].clone());
            break;
        }
        let (u, ok) = maximize_tau(le, &h, eps, d.rmax, opts, v.len() as u64);
        stagnated |= !ok;
        let u = cvec::normalize(&cvec::orthogonalize(&u, &v)).ok_or(Error::DegenerateBasis(v.len() + 1))?;
        v.push(u);
    }
    let mut taus: Vec<Tau> = v
        .iter()
        .map(|g| tau_restricted(&le.restrict(g), eps, d.rmax, TauOptions::ACCURATE))
        .collect();
    // restore tau_2 >= ... >= tau_n if the optimizer fell short
    let mut idx: Vec<usize> = (1..n).collect();
    idx.sort_by(|&a, &b| taus[b].value.total_cmp(&taus[a].value));
    let mut order = vec![0];
    order.extend(idx);
    let v: Vec<Point> = order
        .iter()
        .map(|&k| if k == 0 { v[0].clone() } else { cvec::canonical_phase(&v[k]) })
        .collect();
    taus = order.iter().map(|&k| taus[k]).collect();
    if let Some(k) = taus.iter().position(|t| !(t.value > 0.0)) {
        return Err(Error::DegenerateBasis(k + 1));
    }
    Ok(ExtremalBasis {
        zeta: zeta.to_vec(),
        eps,
        v,
        tau: taus.iter().map(|t| t.value).collect(),
        capped: taus.iter().map(|t| t.capped).collect(),
        stagnated,
    })
}

/// The polydisc `A P_eps(zeta)` of a basis.
#[derive(Clone, Debug, Serialize)]
pub struct Polydisc {
    pub basis: ExtremalBasis,
    pub scale: f64,
}

impl Polydisc {
    pub fn new(basis: ExtremalBasis, scale: f64) -> Self {
        Polydisc { basis, scale }
    }

    /// Membership in the closed polydisc, with the extremal coordinates.
    pub fn contains(&self, z: &[Complex64]) -> (bool, Point) {
        let lambda = self.basis.coordinates(z);
        let inside = lambda
            .iter()
            .zip(&self.basis.tau)
            .all(|(l, t)| l.norm() <= self.scale * t * (1.0 + 1e-12));
        (inside, lambda)
    }
}

pub fn polydisc_contains(p: &Polydisc, z: &[Complex64]) -> (bool, Point) {
    p.contains(z)
}

/// Value of `d(zeta, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pseudodistance {
    /// `z = zeta`.
    Coincident,
    /// Contained at every scale down to `eps`, the smallest tested.
    BelowGrid { eps: f64 },
    Finite { eps: f64 },
    /// Not contained up to `eps = 1`.
    Far { last_eps: f64 },
}

impl Pseudodistance {
    pub fn value(&self) -> f64 {
        match *self {
            Pseudodistance::Coincident | Pseudodistance::BelowGrid { .. } => 0.0,
            Pseudodistance::Finite { eps } => eps,
            Pseudodistance::Far { .. } => f64::INFINITY,
        }
    }

    pub fn is_far(&self) -> bool {
        matches!(self, Pseudodistance::Far { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceOptions {
    pub basis: BasisOptions,
    /// Relative accuracy of the transition scale.
    pub rel_tol: f64,
    pub min_eps: f64,
    pub max_eps: f64,
}

impl DistanceOptions {
    pub fn fast(seed: u64) -> Self {
        DistanceOptions {
            basis: BasisOptions::fast(seed),
            rel_tol: 1e-4,
            min_eps: 1e-30,
            max_eps: 1.0,
        }
    }
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self::fast(0)
    }
}

/// `d(zeta, z) = inf { eps : z in P_eps(zeta) }`.
pub fn pseudodistance(d: &Domain, zeta: &[Complex64], z: &[Complex64]) -> Result<Pseudodistance, Error> {
    pseudodistance_with(d, zeta, z, &DistanceOptions::default())
}

/// Membership is only quasi-monotone in `eps`, so the transition is first
/// bracketed on the grid `eps* 2^k` around the one-direction estimate `eps*`
/// (downward search stops after two consecutive misses), then refined by a
/// safeguarded Illinois iteration on `log eps -> log gauge`.
pub fn pseudodistance_with(
    d: &Domain,
    zeta: &[Complex64],
    z: &[Complex64],
    opts: &DistanceOptions,
) -> Result<Pseudodistance, Error> {
    d.check_dim(zeta)?;
    d.check_dim(z)?;
    let r = cvec::dist(zeta, z);
    if r <= 1e-14 {
        return Ok(Pseudodistance::Coincident);
    }
    let le = LocalExpansion::new(d, zeta);
    let u = cvec::normalize(&cvec::sub(z, zeta)).unwrap();
    let est = le.restrict(&u).circle_table(256).grid_max(r).0;
    let gauge = |eps: f64| -> Result<f64, Error> {
        Ok(basis_from_expansion(d, &le, zeta, eps, &opts.basis)?.gauge(z))
    };

    let start = est.clamp(opts.min_eps, opts.max_eps);
    let g0 = gauge(start)?;
    let (mut lo, mut glo, mut hi, mut ghi);
    if g0 <= 1.0 {
        hi = start;
        ghi = g0;
        lo = start;
        glo = g0;
        let mut misses = 0;
        let mut e = start;
        loop {
            e *= 0.5;
            if e < opts.min_eps {
                return Ok(Pseudodistance::BelowGrid { eps: hi });
            }
            let g = gauge(e)?;
            if g <= 1.0 {
                hi = e;
                ghi = g;
                misses = 0;
            } else {
                if misses == 0 {
                    lo = e;
                    glo = g;
                }
                misses += 1;
                if misses == 2 {
                    break;
                }
            }
        }
    } else {
        lo = start;
        glo = g0;
        let mut e = start;
        loop {
            if e >= opts.max_eps {
                return Ok(Pseudodistance::Far { last_eps: e });
            }
            e = (2.0 * e).min(opts.max_eps);
            let g = gauge(e)?;
            if g <= 1.0 {
                hi = e;
                ghi = g;
                break;
            }
            lo = e;
            glo = g;
        }
    }

    // f(s) = ln gauge(e^s): f(lo) > 0 >= f(hi)
    let (mut slo, mut shi) = (lo.ln(), hi.ln());
    let (mut flo, mut fhi) = (glo.ln(), ghi.ln());
    let mut side = 0i8;
    for _ in 0..60 {
        if shi - slo <= opts.rel_tol || fhi > -1e-9 {
            break;
        }
        let w = shi - slo;
        let mut s = shi - fhi * (shi - slo) / (fhi - flo);
        if !s.is_finite() || s <= slo + 0.01 * w || s >= shi - 0.01 * w {
            s = 0.5 * (slo + shi);
        }
        let f = gauge(s.exp())?.ln();
        if f > 0.0 {
            slo = s;
            flo = f;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            shi = s;
            fhi = f;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(Pseudodistance::Finite { eps: shi.exp() })
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

    fn half_space() -> Domain {
        Domain::new(parse_defining_n("y1", Some(3)).unwrap(), 1).unwrap()
    }

    fn origin() -> Point {
        vec![c(0.0, 0.0); 3]
    }

    #[test]
    fn half_space_radii() {
        let d = half_space();
        for eps in [1e-6, 1e-3, 0.5] {
            let t = tau(&d, &origin(), &cvec::unit(3, 0), eps).unwrap();
            assert!(!t.capped);
            assert!((t.value / eps - 1.0).abs() < 1e-6, "{t:?}");
        }
        let t = tau(&d, &origin(), &cvec::unit(3, 1), 1e-3).unwrap();
        assert!(t.capped && t.value == d.rmax);
    }

    #[test]
    fn model_fourth_root() {
        let d = model();
        for eps in [1e-8, 1e-4, 1e-2] {
            let t = tau(&d, &origin(), &cvec::unit(3, 1), eps).unwrap();
            let exact: f64 = eps.powf(0.25);
            assert!((t.value / exact - 1.0).abs() < 1e-5, "{} vs {}", t.value, exact);
        }
    }

    #[test]
    fn tau_monotone_in_eps() {
        let d = model();
        let g = cvec::normalize(&[c(0.1, 0.2), c(0.5, -0.3), c(0.4, 0.6)]).unwrap();
        let z = vec![c(0.01, -0.02), c(0.05, 0.0), c(-0.02, 0.01)];
        let mut prev = 0.0;
        for k in 0..30 {
            let eps = 1e-9 * 2f64.powi(k);
            let t = tau(&d, &z, &g, eps).unwrap().value;
            assert!(t >= prev * (1.0 - 1e-6), "eps {eps}: {t} < {prev}");
            prev = t;
        }
    }

    #[test]
    fn half_space_basis() {
        let d = half_space();
        let b = extremal_basis(&d, &origin(), 1e-3, 16, 1).unwrap();
        assert!((b.v[0][0] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((b.tau[0] / 1e-3 - 1.0).abs() < 1e-6);
        assert!(b.capped[1] && b.capped[2]);
    }

    #[test]
    fn ball_tangential_radii_agree() {
        let d = Domain::new(parse_defining_n("x1^2+y1^2+x2^2+y2^2+x3^2+y3^2-1", Some(3)).unwrap(), 1)
            .unwrap()
            .with_reference(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let z = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let b = extremal_basis(&d, &z, 1e-4, 16, 3).unwrap();
        assert!((b.v[0][0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((b.tau[1] / b.tau[2] - 1.0).abs() < 1e-3, "{:?}", b.tau);
    }

    #[test]
    fn model_basis_order() {
        let d = model();
        let eps = 1e-6;
        let b = extremal_basis(&d, &origin(), eps, 64, 7).unwrap();
        // the maximizer tilts towards i*e2 by about eps^{1/12} and beats e3 itself
        assert!(cvec::inner(&b.v[1], &cvec::unit(3, 2)).norm() > 0.95, "{:?}", b.v);
        assert!(cvec::inner(&b.v[2], &cvec::unit(3, 1)).norm() > 0.95, "{:?}", b.v);
        let t3 = tau(&d, &origin(), &cvec::unit(3, 2), eps).unwrap().value;
        assert!(b.tau[1] > 1.04 * t3);
        assert!((b.tau[1] / b.tau[2] / eps.powf(-1.0 / 12.0) - 1.0).abs() < 1e-3);
        for i in 0..3 {
            for j in 0..3 {
                let ip = cvec::inner(&b.v[i], &b.v[j]).norm();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-12);
            }
        }
        assert!(b.tau[1] >= b.tau[2]);
        assert!(b.tau[0] <= b.tau[2]);
    }

    #[test]
    fn basis_is_greedy_maximal() {
        let d = model();
        let zeta = vec![c(0.0, -0.0081), c(0.3, 0.0), c(0.0, 0.0)];
        let eps = 1e-4;
        let b = extremal_basis(&d, &zeta, eps, 64, 11).unwrap();
        let mut rng = Domain::rng_for(99, 0);
        let h: Vec<Point> = b.v[1..].to_vec();
        for _ in 0..50 {
            let u = cvec::random_unit_in(&mut rng, &h);
            let t = tau(&d, &zeta, &u, eps).unwrap().value;
            assert!(b.tau[1] >= t - 1e-3 * b.tau[1], "{} < {}", b.tau[1], t);
        }
    }

    #[test]
    fn polydisc_membership() {
        let d = model();
        let b = extremal_basis(&d, &origin(), 1e-6, 16, 5).unwrap();
        let p = Polydisc::new(b.clone(), 0.5);
        assert!(p.contains(&origin()).0);
        let edge = cvec::axpy(&origin(), c(0.5 * b.tau[1], 0.0), &b.v[1]);
        assert!(p.contains(&edge).0);
        let out = cvec::axpy(&origin(), c(0.51 * b.tau[1], 0.0), &b.v[1]);
        assert!(!p.contains(&out).0);
        let lambda = p.contains(&edge).1;
        assert!((lambda[1] - c(0.5 * b.tau[1], 0.0)).norm() < 1e-15);
    }

    #[test]
    fn membership_along_e2() {
        let d = model();
        let z = vec![c(0.0, 0.0), c(1e-3, 0.0), c(0.0, 0.0)];
        let opts = BasisOptions::accurate(16, 2);
        let inside = |eps: f64| {
            let b = extremal_basis_with(&d, &origin(), eps, &opts).unwrap();
            Polydisc::new(b, 1.0).contains(&z).0
        };
        assert!(inside(2e-12));
        assert!(!inside(0.5e-12));
    }

    #[test]
    fn half_space_distance() {
        let d = half_space();
        assert_eq!(pseudodistance(&d, &origin(), &origin()).unwrap(), Pseudodistance::Coincident);
        for delta in [1e-5, 1e-3, 0.1] {
            let z = vec![c(0.0, -delta), c(0.0, 0.0), c(0.0, 0.0)];
            let v = pseudodistance(&d, &origin(), &z).unwrap().value();
            assert!((v / delta - 1.0).abs() < 2e-4, "{v} vs {delta}");
        }
        let flat = vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)];
        assert_eq!(pseudodistance(&d, &origin(), &flat).unwrap().value(), 0.0);
        let far = vec![c(0.0, 0.0), c(50.0, 0.0), c(0.0, 0.0)];
        assert!(pseudodistance(&d, &origin(), &far).unwrap().is_far());
    }

    #[test]
    fn model_distance_power_law() {
        let d = model();
        for delta in [1e-1, 1e-2, 1e-3] {
            let z = vec![c(0.0, 0.0), c(delta, 0.0), c(0.0, 0.0)];
            let v = pseudodistance(&d, &origin(), &z).unwrap().value();
            let ratio = v / delta.powi(4);
            assert!((0.25..=4.0).contains(&ratio), "delta {delta}: ratio {ratio}");
        }
    }
}
