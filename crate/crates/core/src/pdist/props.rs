//! Sampling checks of the five structural properties of the polydiscs and
//! the pseudodistance.
//!
//! Every sample draws from its own stream `(seed, index)`, so a run with `2n`
//! samples contains the run with `n` as a prefix and results do not depend on
//! the thread count.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{
    basis_from_expansion, pseudodistance_with, tau_restricted, BasisOptions, DistanceOptions, ExtremalBasis,
    Pseudodistance, TauOptions,
};
use crate::cvec::{self, Point};
use crate::domain::Domain;
use crate::optim;
use crate::restrict::LocalExpansion;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyId {
    I,
    Ii,
    Iii,
    Iv,
    V,
}

impl PropertyId {
    pub const ALL: [PropertyId; 5] = [PropertyId::I, PropertyId::Ii, PropertyId::Iii, PropertyId::Iv, PropertyId::V];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::I => "i",
            PropertyId::Ii => "ii",
            PropertyId::Iii => "iii",
            PropertyId::Iv => "iv",
            PropertyId::V => "v",
        }
    }

    fn stream_salt(self) -> u64 {
        0x9e37_79b9_7f4a_7c15u64.wrapping_mul(self as u64 + 1)
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for PropertyId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOptions {
    pub nsamples: usize,
    pub seed: u64,
    /// Scale factors for the engulfing check.
    pub k_values: Vec<f64>,
    /// Log-uniform range of the depth of interior base points.
    pub depth_range: (f64, f64),
    /// Log-uniform range of the scale `eps`.
    pub eps_range: (f64, f64),
    /// Points of the polydisc boundary tested per base point.
    pub polydisc_points: usize,
    /// One triple per this many samples.
    pub samples_per_triple: usize,
    pub basis: BasisOptions,
}

impl PropertyOptions {
    pub fn new(nsamples: usize, seed: u64) -> Self {
        PropertyOptions {
            nsamples,
            seed,
            k_values: vec![1.0, 2.0, 4.0],
            depth_range: (1e-6, 1e-3),
            eps_range: (1e-6, 1e-3),
            polydisc_points: 200,
            samples_per_triple: 5,
            basis: BasisOptions::fast(seed),
        }
    }

    fn ntriples(&self, nsamples: usize) -> usize {
        (nsamples / self.samples_per_triple.max(1)).max(1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub constants: BTreeMap<String, f64>,
    /// The same constants on the first half of the samples.
    pub constants_half: BTreeMap<String, f64>,
    /// Raw per-scale values behind normalized constants.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    pub nsamples: usize,
    pub seed: u64,
    pub pass: bool,
}

impl PropertyReport {
    pub fn constant(&self, name: &str) -> f64 {
        self.constants.get(name).copied().unwrap_or(f64::NAN)
    }
}

/// Per-sample outcomes of a property run.
#[derive(Clone, Debug)]
pub struct PropertyRun {
    pub options: PropertyOptions,
    c_i: Option<Vec<f64>>,
    k_ii: Option<Vec<f64>>,
    /// Per sample, per scale factor: `(min_j, max_j)` of the realigned ratios.
    iii: Option<Vec<Vec<(f64, f64)>>>,
    k_iv: Option<Vec<f64>>,
    /// Per triple: `(K_sym, K_tri)`.
    v: Option<Vec<(f64, f64)>>,
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, (a, b): (f64, f64)) -> f64 {
    (a.ln() + rng.gen::<f64>() * (b.ln() - a.ln())).exp()
}

fn interior_point<R: Rng + ?Sized>(d: &Domain, rng: &mut R, opts: &PropertyOptions) -> Result<Point, Error> {
    let zeta = d.sample_boundary_point(rng, d.sample_radius)?;
    let depth = log_uniform(rng, opts.depth_range);
    d.push_inside(&zeta, depth)
}

fn sym_ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else if a == 0.0 || b == 0.0 {
        f64::INFINITY
    } else {
        (a / b).max(b / a)
    }
}

/// Largest `c` in `[0, 4]` with `zeta + c sum_k u_k tau_k v_k` in the closure
/// of the domain for all sampled shapes `u` (axis points and random points of
/// the polydisc boundary).
fn inner_polydisc_constant<R: Rng + ?Sized>(d: &Domain, b: &ExtremalBasis, rng: &mut R, npoints: usize) -> f64 {
    let n = b.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut shapes: Vec<Point> = Vec::with_capacity(npoints.max(4 * n));
    for k in 0..n {
        for u in [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::i(), -Complex64::i()] {
            let mut s = vec![zero; n];
            s[k] = u;
            shapes.push(s);
        }
    }
    while shapes.len() < npoints {
        let face = shapes.len().is_multiple_of(2);
        let k = rng.gen_range(0..n);
        let s: Point = (0..n)
            .map(|j| {
                if face && j != k {
                    cvec::random_in_disc(rng, 1.0)
                } else {
                    Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
                }
            })
            .collect();
        shapes.push(s);
    }
    let lam: Vec<Point> = shapes
        .iter()
        .map(|s| s.iter().zip(&b.tau).map(|(u, t)| u * t).collect())
        .collect();
    let inside = |c: f64| {
        lam.iter().all(|l| {
            let scaled: Point = l.iter().map(|x| x * c).collect();
            d.rho(&b.point(&scaled)) <= 0.0
        })
    };
    const C_MAX: f64 = 4.0;
    if inside(C_MAX) {
        return C_MAX;
    }
    optim::bisect_transition(|c| !inside(c), 0.0, C_MAX, 1e-6, 200).0
}

struct PointOutcome {
    c_i: Option<f64>,
    k_ii: Option<f64>,
    iii: Option<Vec<(f64, f64)>>,
    k_iv: Option<f64>,
}

fn point_sample(d: &Domain, opts: &PropertyOptions, want: &[PropertyId], idx: usize) -> Result<PointOutcome, Error> {
    let mut rng = Domain::rng_for(opts.seed, idx as u64);
    let zeta = interior_point(d, &mut rng, opts)?;
    let eps = log_uniform(&mut rng, opts.eps_range);
    let le = LocalExpansion::new(d, &zeta);
    let stream = |p: PropertyId| Domain::rng_for(opts.seed ^ p.stream_salt(), idx as u64);
    let mut basis_opts = opts.basis;
    basis_opts.seed = opts.seed.wrapping_add(idx as u64);
    let has = |p: PropertyId| want.contains(&p);

    let c_i = if has(PropertyId::I) {
        let e = d.rho(&zeta).abs();
        let b = basis_from_expansion(d, &le, &zeta, e, &basis_opts)?;
        Some(inner_polydisc_constant(d, &b, &mut stream(PropertyId::I), opts.polydisc_points))
    } else {
        None
    };

    let basis = if has(PropertyId::Ii) || has(PropertyId::Iii) || has(PropertyId::Iv) {
        Some(basis_from_expansion(d, &le, &zeta, eps, &basis_opts)?)
    } else {
        None
    };
    let tau_at = |le: &LocalExpansion, g: &Point, e: f64| tau_restricted(&le.restrict(g), e, d.rmax, TauOptions::ACCURATE);

    let k_ii = match (&basis, has(PropertyId::Ii)) {
        (Some(b), true) => {
            let gamma = d.random_unit(&mut stream(PropertyId::Ii));
            let lhs = tau_at(&le, &gamma, eps).recip();
            let rhs: f64 = (0..b.dim())
                .map(|j| cvec::inner(&gamma, &b.v[j]).norm() * b.tau_info(j).recip())
                .sum();
            Some(sym_ratio(lhs, rhs))
        }
        _ => None,
    };

    let iii = match (&basis, has(PropertyId::Iii)) {
        (Some(b), true) => Some(
            opts.k_values
                .iter()
                .map(|&k| {
                    let ratios: Vec<f64> = (0..b.dim())
                        .map(|j| {
                            let t = tau_at(&le, &b.v[j], k * eps);
                            if t.capped && b.capped[j] {
                                1.0
                            } else {
                                t.value / b.tau[j]
                            }
                        })
                        .collect();
                    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = ratios.iter().cloned().fold(0.0, f64::max);
                    (lo, hi)
                })
                .collect(),
        ),
        _ => None,
    };

    let k_iv = match (&basis, has(PropertyId::Iv)) {
        (Some(b), true) => {
            let mut r = stream(PropertyId::Iv);
            let lambda: Point = b.tau.iter().map(|t| cvec::random_in_disc(&mut r, *t)).collect();
            let z = b.point(&lambda);
            let gamma = d.random_unit(&mut r);
            let lz = LocalExpansion::new(d, &z);
            Some(sym_ratio(tau_at(&le, &gamma, eps).value, tau_at(&lz, &gamma, eps).value))
        }
        _ => None,
    };

    Ok(PointOutcome { c_i, k_ii, iii, k_iv })
}

fn triple_sample(d: &Domain, opts: &PropertyOptions, idx: usize) -> Result<(f64, f64), Error> {
    let mut rng = Domain::rng_for(opts.seed ^ PropertyId::V.stream_salt(), idx as u64);
    let zeta = interior_point(d, &mut rng, opts)?;
    let eps0 = log_uniform(&mut rng, opts.eps_range);
    let mut basis_opts = opts.basis;
    basis_opts.seed = opts.seed.wrapping_add(idx as u64);
    let b = super::extremal_basis_with(d, &zeta, eps0, &basis_opts)?;
    let mut pick = || -> Point {
        let lambda: Point = b.tau.iter().map(|t| cvec::random_in_disc(&mut rng, 0.25 * t)).collect();
        b.point(&lambda)
    };
    let z = pick();
    let w = pick();
    let dopts = DistanceOptions {
        basis: basis_opts,
        ..DistanceOptions::fast(basis_opts.seed)
    };
    let dist = |a: &Point, c: &Point| pseudodistance_with(d, a, c, &dopts).map(|p: Pseudodistance| p.value());
    let d_zz = dist(&z, &zeta)?;
    let d_sym = dist(&zeta, &z)?;
    let d_zw = dist(&z, &w)?;
    let d_wz = dist(&w, &zeta)?;
    let k_sym = sym_ratio(d_zz, d_sym);
    let den = d_zw + d_wz;
    let k_tri = if d_zz == 0.0 { 0.0 } else { d_zz / den };
    Ok((k_sym, k_tri))
}

/// Runs the requested property checks on `opts.nsamples` base points (and
/// `nsamples / samples_per_triple` triples for the pseudodistance check).
pub fn run_properties(d: &Domain, opts: &PropertyOptions, want: &[PropertyId]) -> Result<PropertyRun, Error> {
    let has = |p: PropertyId| want.contains(&p);
    let need_points = has(PropertyId::I) || has(PropertyId::Ii) || has(PropertyId::Iii) || has(PropertyId::Iv);
    let points: Vec<PointOutcome> = if need_points {
        (0..opts.nsamples)
            .into_par_iter()
            .map(|i| point_sample(d, opts, want, i))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let v = if has(PropertyId::V) {
        Some(
            (0..opts.ntriples(opts.nsamples))
                .into_par_iter()
                .map(|i| triple_sample(d, opts, i))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let collect = |f: &dyn Fn(&PointOutcome) -> Option<f64>| -> Option<Vec<f64>> {
        points.iter().map(f).collect::<Option<Vec<f64>>>().filter(|v| !v.is_empty())
    };
    Ok(PropertyRun {
        options: opts.clone(),
        c_i: collect(&|p| p.c_i),
        k_ii: collect(&|p| p.k_ii),
        iii: points
            .iter()
            .map(|p| p.iii.clone())
            .collect::<Option<Vec<_>>>()
            .filter(|v| !v.is_empty()),
        k_iv: collect(&|p| p.k_iv),
        v,
    })
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `full` grows with the sample; stable if it at most doubles against `half`.
fn stable_growth(full: f64, half: f64) -> bool {
    full.is_finite() && half.is_finite() && full <= 2.0 * half
}

const BOUND_TOL: f64 = 1e-3;

impl PropertyRun {
    pub fn nsamples(&self) -> usize {
        self.options.nsamples
    }

    /// Reports for every computed property on the first `n` samples.
    pub fn report_prefix(&self, n: usize) -> Vec<PropertyReport> {
        PropertyId::ALL.iter().filter_map(|&p| self.report(p, n)).collect()
    }

    pub fn reports(&self) -> Vec<PropertyReport> {
        self.report_prefix(self.nsamples())
    }

    pub fn report(&self, id: PropertyId, n: usize) -> Option<PropertyReport> {
        let n = n.min(self.nsamples());
        let half = (n / 2).max(1);
        let opts = &self.options;
        let mut details = BTreeMap::new();
        let (constants, constants_half, pass) = match id {
            PropertyId::I => {
                let c = self.c_i.as_ref()?;
                let (full, h) = (min_of(&c[..n]), min_of(&c[..half]));
                let pass = full >= 0.01 && h <= 2.0 * full;
                (one("c", full), one("c", h), pass)
            }
            PropertyId::Ii => {
                let k = self.k_ii.as_ref()?;
                let (full, h) = (max_of(&k[..n]), max_of(&k[..half]));
                (one("K", full), one("K", h), stable_growth(full, h))
            }
            PropertyId::Iii => {
                let s = self.iii.as_ref()?;
                let consts = |m: usize, raw: &mut BTreeMap<String, f64>| -> BTreeMap<String, f64> {
                    let mut out = BTreeMap::new();
                    let mut inv_c: f64 = 0.0;
                    let mut c_over_k: f64 = 0.0;
                    for (ki, &k) in opts.k_values.iter().enumerate() {
                        let lo = s[..m].iter().map(|r| r[ki].0).fold(f64::INFINITY, f64::min);
                        let hi = s[..m].iter().map(|r| r[ki].1).fold(0.0, f64::max);
                        raw.insert(format!("c({k})"), lo);
                        raw.insert(format!("C({k})"), hi);
                        inv_c = inv_c.max(1.0 / lo);
                        c_over_k = c_over_k.max(hi / k);
                    }
                    out.insert("max_inv_c".into(), inv_c);
                    out.insert("max_C_over_k".into(), c_over_k);
                    out
                };
                let full = consts(n, &mut details);
                let pass = full["max_inv_c"] <= 1.0 + BOUND_TOL && full["max_C_over_k"] <= 1.0 + BOUND_TOL;
                (full, consts(half, &mut BTreeMap::new()), pass)
            }
            PropertyId::Iv => {
                let k = self.k_iv.as_ref()?;
                let (full, h) = (max_of(&k[..n]), max_of(&k[..half]));
                (one("K", full), one("K", h), full <= 16.0 && stable_growth(full, h))
            }
            PropertyId::V => {
                let t = self.v.as_ref()?;
                let nt = opts.ntriples(n).min(t.len());
                let ht = opts.ntriples(half).min(t.len());
                let consts = |m: usize| {
                    let mut out = BTreeMap::new();
                    out.insert("K_sym".to_string(), t[..m].iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max));
                    out.insert("K_tri".to_string(), t[..m].iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max));
                    out
                };
                let (full, h) = (consts(nt), consts(ht));
                let pass = stable_growth(full["K_sym"], h["K_sym"]) && stable_growth(full["K_tri"], h["K_tri"].max(1.0));
                (full, h, pass)
            }
        };
        Some(PropertyReport {
            property: id,
            constants,
            constants_half,
            details,
            nsamples: if id == PropertyId::V { opts.ntriples(n) } else { n },
            seed: opts.seed,
            pass,
        })
    }
}

fn one(name: &str, v: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([(name.to_string(), v)])
}

fn single(d: &Domain, id: PropertyId, opts: PropertyOptions) -> Result<PropertyReport, Error> {
    let n = opts.nsamples;
    Ok(run_properties(d, &opts, &[id])?.report(id, n).expect("property was computed"))
}

/// `c P_{|rho(zeta)|}(zeta)` lies in the domain for a uniform `c > 0`.
pub fn check_property_i(d: &Domain, samples: usize, seed: u64) -> Result<PropertyReport, Error> {
    single(d, PropertyId::I, PropertyOptions::new(samples, seed))
}

/// `1/tau(gamma)` is comparable to `sum_j |a_j| / tau_j` in extremal coordinates.
pub fn check_property_ii(d: &Domain, samples: usize, seed: u64) -> Result<PropertyReport, Error> {
    single(d, PropertyId::Ii, PropertyOptions::new(samples, seed))
}

/// Engulfing, measured by `tau(zeta, v_j(eps), k eps) / tau_j(eps)`.
pub fn check_property_iii(d: &Domain, samples: usize, k_values: &[f64], seed: u64) -> Result<PropertyReport, Error> {
    let mut opts = PropertyOptions::new(samples, seed);
    opts.k_values = k_values.to_vec();
    single(d, PropertyId::Iii, opts)
}

/// Radii at `zeta` and at points of `P_eps(zeta)` are comparable.
pub fn check_property_iv(d: &Domain, samples: usize, seed: u64) -> Result<PropertyReport, Error> {
    single(d, PropertyId::Iv, PropertyOptions::new(samples, seed))
}

/// Quasi-symmetry and quasi-triangle inequality of the pseudodistance.
pub fn check_property_v(d: &Domain, samples: usize, seed: u64) -> Result<PropertyReport, Error> {
    single(d, PropertyId::V, PropertyOptions::new(samples, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_defining_n;

    fn half_space() -> Domain {
        Domain::new(parse_defining_n("y1", Some(3)).unwrap(), 1).unwrap()
    }

    #[test]
    fn half_space_constants_are_one() {
        let d = half_space();
        let run = run_properties(&d, &PropertyOptions::new(20, 3), &PropertyId::ALL).unwrap();
        for r in run.reports() {
            assert!(r.pass, "{r:?}");
            for (name, v) in &r.constants {
                assert!(*v <= 1.0 + 1e-3, "{} {name} = {v}", r.property);
            }
        }
        let c = run.report(PropertyId::I, 20).unwrap().constant("c");
        assert!((c - 1.0).abs() < 1e-3, "c = {c}");
    }

    #[test]
    fn prefix_matches_smaller_run() {
        let d = half_space();
        let big = run_properties(&d, &PropertyOptions::new(10, 8), &[PropertyId::Ii]).unwrap();
        let small = run_properties(&d, &PropertyOptions::new(5, 8), &[PropertyId::Ii]).unwrap();
        assert_eq!(big.k_ii.unwrap()[..5], small.k_ii.unwrap()[..]);
    }

    #[test]
    fn basis_vectors_have_unit_ratio() {
        let d = Domain::new(parse_defining_n("y1 + x2^4 + x3^6 + y3^10", Some(3)).unwrap(), 5).unwrap();
        let zeta = vec![Complex64::new(0.0, -1e-4), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let le = LocalExpansion::new(&d, &zeta);
        let b = basis_from_expansion(&d, &le, &zeta, 1e-5, &BasisOptions::fast(1)).unwrap();
        for k in 0..3 {
            let lhs = tau_restricted(&le.restrict(&b.v[k]), 1e-5, d.rmax, TauOptions::ACCURATE).recip();
            let rhs: f64 = (0..3).map(|j| cvec::inner(&b.v[k], &b.v[j]).norm() / b.tau[j]).sum();
            assert!((sym_ratio(lhs, rhs) - 1.0).abs() < 1e-9);
        }
    }
}
