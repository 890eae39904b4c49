//! Sampled lower bounds for the nonisotropic Hölder norm
//! `sup |h(z0) - h(z1)| / max{d(z0, z1)^mu, |z0 - z1|^(1 - eps_h)}`.
//!
//! The supremum runs over sampled interior pairs only, so every estimate is
//! a lower bound of the true norm.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cvec::{self, Point};
use crate::domain::Domain;
use crate::pdist::{DistanceTable, Pseudodistance, TableOptions};
use crate::Error;

const ANCHOR_SALT: u64 = 0x4f1d_0000_0000;
const PAIR_SALT: u64 = 0x4f1d_0001_0000_0000;

#[derive(Clone, Debug, PartialEq)]
pub struct HolderOptions {
    pub npairs: usize,
    pub seed: u64,
    /// Base points `z0`; each carries one distance table.
    pub anchors: usize,
    /// Euclidean depth range of sampled points, log-uniform.
    pub depth_range: (f64, f64),
    /// Separation range of close pairs, log-uniform.
    pub close_range: (f64, f64),
    /// Direction of close pairs (random complex phase); random when `None`.
    pub direction: Option<Point>,
    /// Points closer than this to the boundary are rejected.
    pub min_depth: f64,
    pub table: TableOptions,
}

impl HolderOptions {
    pub fn new(npairs: usize, seed: u64) -> Self {
        HolderOptions {
            npairs,
            seed,
            anchors: 16,
            depth_range: (1e-6, 1e-3),
            close_range: (1e-5, 1e-1),
            direction: None,
            min_depth: 1e-6,
            table: TableOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `d^mu` is the larger term.
    Pseudodistance,
    /// `|z0 - z1|^(1 - eps_h)` is the larger term.
    Euclidean,
}

#[derive(Clone, Debug)]
pub struct SampledPair {
    pub z0: Point,
    pub z1: Point,
    pub close: bool,
    pub d: Pseudodistance,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRatio {
    pub index: usize,
    pub close: bool,
    pub euclidean: f64,
    pub pseudodistance: f64,
    pub dh: f64,
    pub ratio: f64,
    pub branch: Branch,
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderEstimate {
    pub mu: f64,
    pub eps_h: f64,
    /// Lower bound of the norm: the largest sampled ratio.
    pub c_h: f64,
    pub argmax_pair: Option<(Point, Point)>,
    pub npairs: usize,
    pub seed: u64,
    /// Fractions of evaluated pairs whose denominator came from each branch.
    pub pseudodistance_fraction: f64,
    pub euclidean_fraction: f64,
    /// `max |dh| / d^mu`, the norm with the euclidean term dropped.
    pub c_pseudodistance_only: f64,
    /// Pairs left out: no interior partner found, or `d` beyond the table.
    pub excluded: usize,
    pub lower_bound: bool,
}

/// Sampled pairs with their pseudodistances, reusable across functions and
/// exponents. Pair `i` depends only on `(seed, i)` and the anchors, so a
/// larger sample extends a smaller one.
#[derive(Clone, Debug)]
pub struct HolderSampler {
    pub pairs: Vec<Option<SampledPair>>,
    pub seed: u64,
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi / lo).ln()).exp()
}

fn depth(d: &Domain, z: &[Complex64]) -> f64 {
    -d.rho(z) / cvec::norm(&d.real_gradient(z)).max(1e-300)
}

fn interior_point<R: Rng + ?Sized>(d: &Domain, rng: &mut R, opts: &HolderOptions) -> Result<Point, Error> {
    for _ in 0..32 {
        let p = d.sample_boundary_point(rng, d.sample_radius)?;
        let z = d.push_inside(&p, log_uniform(rng, opts.depth_range))?;
        if depth(d, &z) >= opts.min_depth {
            return Ok(z);
        }
    }
    Err(Error::EmptySample("no interior point at the requested depth".into()))
}

impl HolderSampler {
    pub fn new(d: &Domain, opts: &HolderOptions) -> Result<Self, Error> {
        if opts.anchors == 0 {
            return Err(Error::InvalidInput("at least one anchor is needed".into()));
        }
        let (lo, hi) = opts.close_range;
        if !(lo > 0.0 && hi >= lo) || !(opts.depth_range.0 > 0.0 && opts.depth_range.1 >= opts.depth_range.0) {
            return Err(Error::InvalidInput("sampling ranges must be positive and ordered".into()));
        }
        let dir = match &opts.direction {
            Some(v) => {
                d.check_dim(v)?;
                Some(cvec::normalize(v).ok_or(Error::ZeroDirection)?)
            }
            None => None,
        };
        let anchors: Vec<Point> = (0..opts.anchors)
            .map(|k| interior_point(d, &mut Domain::rng_for(opts.seed, ANCHOR_SALT + k as u64), opts))
            .collect::<Result<_, _>>()?;
        let tables: Vec<DistanceTable> = anchors
            .iter()
            .map(|a| DistanceTable::new(d, a, &opts.table))
            .collect::<Result<_, _>>()?;
        let pairs = (0..opts.npairs)
            .into_par_iter()
            .map(|i| -> Result<Option<SampledPair>, Error> {
                let mut rng = Domain::rng_for(opts.seed, PAIR_SALT + i as u64);
                let a = rng.gen_range(0..anchors.len());
                let z0 = &anchors[a];
                let close = i % 2 == 0;
                let z1 = if close {
                    let mut found = None;
                    for _ in 0..32 {
                        let u = match &dir {
                            Some(v) => cvec::scale(v, Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))),
                            None => d.random_unit(&mut rng),
                        };
                        let delta = log_uniform(&mut rng, opts.close_range);
                        let cand = [delta, -delta]
                            .into_iter()
                            .map(|s| cvec::axpy(z0, Complex64::new(s, 0.0), &u))
                            .find(|z| depth(d, z) >= opts.min_depth);
                        if cand.is_some() {
                            found = cand;
                            break;
                        }
                    }
                    found
                } else {
                    Some(interior_point(d, &mut rng, opts)?)
                };
                Ok(z1.map(|z1| SampledPair {
                    d: tables[a].distance(&z1),
                    z0: z0.clone(),
                    z1,
                    close,
                }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HolderSampler { pairs, seed: opts.seed })
    }

    /// The first `n` pairs, identical to a fresh sample of size `n`.
    pub fn prefix(&self, n: usize) -> HolderSampler {
        HolderSampler {
            pairs: self.pairs[..n.min(self.pairs.len())].to_vec(),
            seed: self.seed,
        }
    }

    /// Ratio of every usable pair.
    pub fn ratios<F>(&self, h: F, mu: f64, eps_h: f64) -> Result<Vec<PairRatio>, Error>
    where
        F: Fn(&[Complex64]) -> Result<Complex64, Error> + Sync,
    {
        if !(mu > 0.0) || !(eps_h > 0.0 && eps_h < 1.0) {
            return Err(Error::InvalidInput(format!("need mu > 0 and 0 < eps_h < 1, got {mu}, {eps_h}")));
        }
        let out: Vec<Option<PairRatio>> = self
            .pairs
            .par_iter()
            .enumerate()
            .map(|(index, p)| -> Result<Option<PairRatio>, Error> {
                let Some(p) = p else { return Ok(None) };
                let dv = match p.d {
                    Pseudodistance::Far { .. } => return Ok(None),
                    ref other => other.value(),
                };
                let dh = (h(&p.z0)? - h(&p.z1)?).norm();
                let e = cvec::dist(&p.z0, &p.z1);
                let (a, b) = (dv.powf(mu), e.powf(1.0 - eps_h));
                let (den, branch) = if a >= b {
                    (a, Branch::Pseudodistance)
                } else {
                    (b, Branch::Euclidean)
                };
                let ratio = if dh == 0.0 { 0.0 } else { dh / den };
                Ok(Some(PairRatio {
                    index,
                    close: p.close,
                    euclidean: e,
                    pseudodistance: dv,
                    dh,
                    ratio,
                    branch,
                }))
            })
            .collect::<Result<_, _>>()?;
        Ok(out.into_iter().flatten().collect())
    }

    pub fn estimate<F>(&self, h: F, mu: f64, eps_h: f64) -> Result<HolderEstimate, Error>
    where
        F: Fn(&[Complex64]) -> Result<Complex64, Error> + Sync,
    {
        let r = self.ratios(h, mu, eps_h)?;
        let mut best: Option<&PairRatio> = None;
        for x in &r {
            if best.is_none_or(|b| x.ratio > b.ratio) {
                best = Some(x);
            }
        }
        let npd = r.iter().filter(|x| x.branch == Branch::Pseudodistance).count();
        let total = r.len().max(1) as f64;
        let c_pd = r
            .iter()
            .map(|x| if x.dh == 0.0 { 0.0 } else { x.dh / x.pseudodistance.powf(mu) })
            .fold(0.0, f64::max);
        Ok(HolderEstimate {
            mu,
            eps_h,
            c_h: best.map_or(0.0, |b| b.ratio),
            argmax_pair: best
                .filter(|b| b.ratio > 0.0)
                .map(|b| {
                    let p = self.pairs[b.index].as_ref().expect("ratio comes from a sampled pair");
                    (p.z0.clone(), p.z1.clone())
                }),
            npairs: self.pairs.len(),
            seed: self.seed,
            pseudodistance_fraction: npd as f64 / total,
            euclidean_fraction: (r.len() - npd) as f64 / total,
            c_pseudodistance_only: c_pd,
            excluded: self.pairs.len() - r.len(),
            lower_bound: true,
        })
    }
}

/// One-shot estimate; see [`HolderSampler`] to reuse the sampled pairs.
pub fn holder_norm<F>(d: &Domain, h: F, mu: f64, eps_h: f64, opts: &HolderOptions) -> Result<HolderEstimate, Error>
where
    F: Fn(&[Complex64]) -> Result<Complex64, Error> + Sync,
{
    HolderSampler::new(d, opts)?.estimate(h, mu, eps_h)
}

/// Adapts a polynomial to the function argument of [`holder_norm`].
pub fn polynomial_function(p: &crate::CxPolynomial) -> impl Fn(&[Complex64]) -> Result<Complex64, Error> + Sync + '_ {
    move |z: &[Complex64]| {
        p.eval(z).map_err(|e| Error::Evaluation {
            point: z.to_vec(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::polyring::parse_complex;

    fn small(n: usize, seed: u64) -> HolderOptions {
        let mut o = HolderOptions::new(n, seed);
        o.anchors = 3;
        o.table.min_eps = 1e-16;
        o.table.max_eps = 1e2;
        o
    }

    #[test]
    fn constant_function_has_zero_norm() {
        let d = builtin("half-space").unwrap();
        let e = holder_norm(&d, |_: &[Complex64]| Ok(Complex64::new(2.0, 1.0)), 1.0, 0.1, &small(200, 1)).unwrap();
        assert_eq!(e.c_h, 0.0);
        assert!(e.argmax_pair.is_none());
        assert!(e.lower_bound);
    }

    #[test]
    fn half_space_normal_coordinate() {
        let d = builtin("half-space").unwrap();
        let p = parse_complex("y1", Some(3)).unwrap();
        let s = HolderSampler::new(&d, &small(400, 2)).unwrap();
        // |dy1| <= d and |dy1| <= |dz|
        let e = s.estimate(polynomial_function(&p), 1.0, 0.1).unwrap();
        assert!(e.c_h > 0.0 && e.c_h <= 1.0 + 1e-9, "{e:?}");
        assert!(e.c_pseudodistance_only <= 1.0 + 1e-9, "{e:?}");
        assert_eq!(e.excluded, 0);
        let e = s.estimate(polynomial_function(&p), 0.5, 0.1).unwrap();
        assert!(e.pseudodistance_fraction > 0.0 && e.euclidean_fraction > 0.0, "{e:?}");
    }

    #[test]
    fn homogeneous_and_monotone() {
        let d = builtin("model").unwrap();
        let s = HolderSampler::new(&d, &small(300, 3)).unwrap();
        let p = parse_complex("x2", Some(3)).unwrap();
        let f = polynomial_function(&p);
        let base = s.estimate(&f, 0.25, 0.1).unwrap();
        let scaled = s.estimate(|z: &[Complex64]| Ok(f(z)? * -2.0), 0.25, 0.1).unwrap();
        assert_eq!(scaled.c_h, 2.0 * base.c_h);
        let tripled = s.estimate(|z: &[Complex64]| Ok(f(z)? * 3.0), 0.25, 0.1).unwrap();
        assert!((tripled.c_h / base.c_h - 3.0).abs() < 1e-12);

        let s2 = HolderSampler::new(&d, &small(600, 3)).unwrap();
        let more = s2.estimate(&f, 0.25, 0.1).unwrap();
        assert!(more.c_h >= base.c_h);
        let again = s2.prefix(300).estimate(&f, 0.25, 0.1).unwrap();
        assert_eq!(again.c_h, base.c_h);
        assert_eq!(again.argmax_pair, base.argmax_pair);
    }

    #[test]
    fn evaluation_errors_carry_the_point() {
        let d = builtin("half-space").unwrap();
        let r = holder_norm(
            &d,
            |z: &[Complex64]| Err(Error::Evaluation { point: z.to_vec(), message: "nope".into() }),
            1.0,
            0.1,
            &small(10, 4),
        );
        assert!(matches!(r, Err(Error::Evaluation { .. })));
    }

    #[test]
    fn rejects_bad_exponents() {
        let d = builtin("half-space").unwrap();
        let s = HolderSampler::new(&d, &small(4, 5)).unwrap();
        assert!(s.estimate(|_: &[Complex64]| Ok(Complex64::new(0.0, 0.0)), 0.0, 0.1).is_err());
        assert!(s.estimate(|_: &[Complex64]| Ok(Complex64::new(0.0, 0.0)), 1.0, 1.0).is_err());
    }
}
