//! Pseudodistance from a fixed base point through a precomputed table of
//! extremal bases on a geometric grid of scales.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{basis_from_expansion, check_eps, BasisOptions, ExtremalBasis, Pseudodistance};
use crate::cvec::{self, Point};
use crate::domain::Domain;
use crate::restrict::LocalExpansion;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableOptions {
    pub min_eps: f64,
    pub max_eps: f64,
    /// Ratio of consecutive grid scales, `> 1`.
    pub ratio: f64,
    pub basis: BasisOptions,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            min_eps: 1e-24,
            max_eps: 1e3,
            ratio: 2.0,
            basis: BasisOptions::fast(0),
        }
    }
}

/// Bases `P_eps(zeta)` for `eps = min_eps * ratio^i` up to `max_eps`.
///
/// Between grid scales the gauge is interpolated linearly in
/// `(ln eps, ln gauge)`, which is exact where one coordinate dominates and
/// its radius follows a power law.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    zeta: Point,
    eps: Vec<f64>,
    bases: Vec<ExtremalBasis>,
}

impl DistanceTable {
    pub fn new(d: &Domain, zeta: &[Complex64], opts: &TableOptions) -> Result<Self, Error> {
        d.check_dim(zeta)?;
        check_eps(opts.min_eps)?;
        if !(opts.max_eps > opts.min_eps && opts.ratio > 1.0) {
            return Err(Error::InvalidInput("distance table needs min_eps < max_eps and ratio > 1".into()));
        }
        let steps = ((opts.max_eps / opts.min_eps).ln() / opts.ratio.ln()).ceil() as usize;
        let eps: Vec<f64> = (0..=steps).map(|i| opts.min_eps * opts.ratio.powi(i as i32)).collect();
        let le = LocalExpansion::new(d, zeta);
        let bases = eps
            .par_iter()
            .map(|&e| basis_from_expansion(d, &le, zeta, e, &opts.basis))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DistanceTable {
            zeta: zeta.to_vec(),
            eps,
            bases,
        })
    }

    pub fn zeta(&self) -> &Point {
        &self.zeta
    }

    pub fn scales(&self) -> &[f64] {
        &self.eps
    }

    pub fn bases(&self) -> &[ExtremalBasis] {
        &self.bases
    }

    /// Gauge of `z` at every grid scale.
    pub fn gauge_profile(&self, z: &[Complex64]) -> Vec<f64> {
        self.bases.iter().map(|b| b.gauge(z)).collect()
    }

    /// `d(zeta, z)`: the last upward crossing of `gauge = 1` on the grid,
    /// refined by interpolation.
    pub fn distance(&self, z: &[Complex64]) -> Pseudodistance {
        if cvec::dist(&self.zeta, z) <= 1e-14 {
            return Pseudodistance::Coincident;
        }
        let g = self.gauge_profile(z);
        let last = g.len() - 1;
        if g[last] > 1.0 {
            return Pseudodistance::Far { last_eps: self.eps[last] };
        }
        // largest i with g[i] > 1; every larger scale is inside
        let Some(i) = (0..last).rev().find(|&i| g[i] > 1.0) else {
            return Pseudodistance::BelowGrid { eps: self.eps[0] };
        };
        let (s0, s1) = (self.eps[i].ln(), self.eps[i + 1].ln());
        let (f0, f1) = (g[i].ln(), g[i + 1].ln());
        let s = if f0 - f1 > 0.0 { s0 + f0 * (s1 - s0) / (f0 - f1) } else { s1 };
        Pseudodistance::Finite { eps: s.clamp(s0, s1).exp() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdist::{pseudodistance_with, DistanceOptions};
    use crate::polyring::{parse_defining, parse_defining_n};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn half_space_normal_distance() {
        let d = Domain::new(parse_defining_n("y1", Some(3)).unwrap(), 1).unwrap();
        let z0 = vec![c(0.0, 0.0); 3];
        let t = DistanceTable::new(&d, &z0, &TableOptions::default()).unwrap();
        for delta in [1e-6, 3e-4, 0.2] {
            let z = vec![c(0.0, -delta), c(0.0, 0.0), c(0.0, 0.0)];
            let v = t.distance(&z).value();
            assert!((v / delta - 1.0).abs() < 1e-6, "{delta} {v}");
        }
        assert!(matches!(t.distance(&z0), Pseudodistance::Coincident));
    }

    #[test]
    fn model_matches_direct_search() {
        let d = Domain::new(parse_defining("y1 + x2^4 + x3^6 + y3^10").unwrap(), 5).unwrap();
        let z0 = vec![c(0.0, -1e-4), c(0.01, 0.0), c(0.0, 0.0)];
        let t = DistanceTable::new(&d, &z0, &TableOptions::default()).unwrap();
        for dz in [
            [c(0.0, 0.0), c(3e-3, 0.0), c(0.0, 0.0)],
            [c(1e-5, 0.0), c(0.0, 0.0), c(0.0, 2e-2)],
            [c(0.0, 0.0), c(0.0, 1e-2), c(1e-3, 0.0)],
        ] {
            let z = cvec::add(&z0, &dz);
            let a = t.distance(&z).value();
            let b = pseudodistance_with(&d, &z0, &z, &DistanceOptions::fast(0)).unwrap().value();
            assert!((a / b).ln().abs() < 0.35f64.ln_1p(), "{a} {b}");
        }
    }
}
