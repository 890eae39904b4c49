//! Domains `{rho < 0}` with boundary frames, projection and convexity probes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cvec::{self, Point};
use crate::polyring::{parse_defining_n, CxPolynomial, HermitianPolynomial, Wirtinger};
use crate::Error;

/// Tolerance on `|rho|` for a point to count as a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Serializable domain description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DomainConfig {
    pub defining: String,
    #[serde(default)]
    pub nvars: Option<usize>,
    pub m: u32,
    #[serde(default = "default_w0")]
    pub w0: f64,
    #[serde(default = "default_rmax")]
    pub rmax: f64,
    /// Half-width of the sampling cube around `reference`.
    #[serde(default)]
    pub bbox: Option<f64>,
    /// Boundary point around which samples are drawn; `[re, im]` pairs.
    #[serde(default)]
    pub reference: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub sample_radius: Option<f64>,
}

fn default_w0() -> f64 {
    0.5
}

fn default_rmax() -> f64 {
    10.0
}

/// A polynomial domain `D = {rho < 0}` of type at most `m`.
#[derive(Clone, Debug)]
pub struct Domain {
    rho: HermitianPolynomial,
    m: u32,
    pub w0_radius: f64,
    pub rmax: f64,
    pub bbox: Option<f64>,
    reference: Point,
    pub sample_radius: f64,
    /// d rho / d z_j
    grad: Vec<CxPolynomial>,
    /// d^2 rho / dz_j dz_k
    hess_zz: Vec<Vec<CxPolynomial>>,
    /// d^2 rho / dz_j dzbar_k
    hess_zzbar: Vec<Vec<CxPolynomial>>,
}

/// Unit normal and an orthonormal basis of the complex tangent space.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryFrame {
    pub zeta: Point,
    pub normal: Point,
    pub tangent_basis: Vec<Point>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub min_rho: f64,
    pub argmin: Point,
    pub nsamples: usize,
    pub locally_lineally_convex: bool,
}

impl Domain {
    pub fn new(rho: HermitianPolynomial, m: u32) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::InvalidInput("type bound m must be positive".into()));
        }
        rho.as_cx().check_degree_cap(2 * m)?;
        let n = rho.nvars();
        let cx = rho.as_cx();
        let grad: Vec<CxPolynomial> = (0..n)
            .map(|j| cx.wirtinger(j, Wirtinger::Holomorphic))
            .collect::<Result<_, _>>()?;
        let mut hess_zz = Vec::with_capacity(n);
        let mut hess_zzbar = Vec::with_capacity(n);
        for g in &grad {
            hess_zz.push(
                (0..n)
                    .map(|k| g.wirtinger(k, Wirtinger::Holomorphic))
                    .collect::<Result<Vec<_>, _>>()?,
            );
            hess_zzbar.push(
                (0..n)
                    .map(|k| g.wirtinger(k, Wirtinger::Antiholomorphic))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(Domain {
            rho,
            m,
            w0_radius: default_w0(),
            rmax: default_rmax(),
            bbox: None,
            reference: vec![Complex64::new(0.0, 0.0); n],
            sample_radius: 0.3,
            grad,
            hess_zz,
            hess_zzbar,
        })
    }

    pub fn from_config(cfg: &DomainConfig) -> Result<Self, Error> {
        let rho = parse_defining_n(&cfg.defining, cfg.nvars)?;
        let mut d = Domain::new(rho, cfg.m)?;
        if !(cfg.w0 > 0.0 && cfg.rmax > 0.0) {
            return Err(Error::InvalidInput("w0 and rmax must be positive".into()));
        }
        d.w0_radius = cfg.w0;
        d.rmax = cfg.rmax;
        d.bbox = cfg.bbox;
        if let Some(r) = &cfg.reference {
            if r.len() != d.nvars() {
                return Err(Error::InvalidInput(format!(
                    "reference has {} coordinates, domain has {}",
                    r.len(),
                    d.nvars()
                )));
            }
            d.reference = r.iter().map(|[a, b]| Complex64::new(*a, *b)).collect();
        }
        if let Some(s) = cfg.sample_radius {
            d.sample_radius = s;
        }
        let rho_ref = d.rho(&d.reference);
        if rho_ref.abs() > BOUNDARY_TOL {
            return Err(Error::InvalidInput(format!(
                "reference point is not on the boundary (rho = {rho_ref:e})"
            )));
        }
        Ok(d)
    }

    pub fn with_reference(mut self, reference: Point) -> Self {
        self.reference = reference;
        self
    }

    pub fn with_sample_radius(mut self, r: f64) -> Self {
        self.sample_radius = r;
        self
    }

    pub fn with_rmax(mut self, r: f64) -> Self {
        self.rmax = r;
        self
    }

    pub fn defining(&self) -> &HermitianPolynomial {
        &self.rho
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn nvars(&self) -> usize {
        self.rho.nvars()
    }

    pub fn reference(&self) -> &Point {
        &self.reference
    }

    /// Order assigned to lines along which `rho` vanishes identically.
    pub fn infinite_order(&self) -> u32 {
        2 * self.m + 1
    }

    pub fn rho(&self, z: &[Complex64]) -> f64 {
        self.rho.eval_real(z).expect("point dimension checked by caller")
    }

    pub fn check_dim(&self, z: &[Complex64]) -> Result<(), Error> {
        if z.len() != self.nvars() {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, domain has {}",
                z.len(),
                self.nvars()
            )));
        }
        Ok(())
    }

    /// `(d rho / d z_j)_j`.
    pub fn dz(&self, z: &[Complex64]) -> Point {
        self.grad.iter().map(|g| g.eval(z).unwrap()).collect()
    }

    /// Real gradient read as a complex vector: `rho_x + i rho_y = 2 conj(d rho/dz)`.
    pub fn real_gradient(&self, z: &[Complex64]) -> Point {
        self.dz(z).iter().map(|d| 2.0 * d.conj()).collect()
    }

    /// Real Hessian in the coordinates `(x_1..x_n, y_1..y_n)`.
    pub fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let n = self.nvars();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let a = self.hess_zz[j][k].eval(z).unwrap();
                let b = self.hess_zzbar[j][k].eval(z).unwrap();
                h[(j, k)] = 2.0 * (a.re + b.re);
                h[(n + j, n + k)] = -2.0 * a.re + 2.0 * b.re;
                h[(j, n + k)] = -2.0 * a.im + 2.0 * b.im;
                h[(n + k, j)] = h[(j, n + k)];
            }
        }
        h
    }

    /// Frame at a point of `W0` using the level set through it.
    pub fn level_frame(&self, zeta: &[Complex64]) -> Result<BoundaryFrame, Error> {
        self.check_dim(zeta)?;
        let g = self.real_gradient(zeta);
        let gn = cvec::norm(&g);
        if gn < 1e-12 {
            return Err(Error::DegenerateBoundary(zeta.to_vec()));
        }
        let normal = cvec::normalize(&g).unwrap();
        let full = cvec::complete_basis(std::slice::from_ref(&normal), self.nvars());
        Ok(BoundaryFrame {
            zeta: zeta.to_vec(),
            normal,
            tangent_basis: full[1..].to_vec(),
        })
    }

    /// Frame at a boundary point.
    pub fn frame_at(&self, zeta: &[Complex64]) -> Result<BoundaryFrame, Error> {
        self.check_dim(zeta)?;
        let scale = cvec::norm(&self.real_gradient(zeta)).max(1.0);
        let r = self.rho(zeta);
        if r.abs() > BOUNDARY_TOL * scale {
            return Err(Error::NotOnBoundary { rho: r });
        }
        self.level_frame(zeta)
    }

    /// Orthogonal (foot-point) projection onto `{rho = 0}`.
    ///
    /// Solves `p + s grad rho(p) = z, rho(p) = 0` by Newton's method in real
    /// coordinates, starting from a few steps of gradient-Newton on `rho`.
    pub fn project_to_boundary(&self, z: &[Complex64]) -> Result<Point, Error> {
        self.check_dim(z)?;
        let n = self.nvars();
        let to_real = |p: &[Complex64]| -> DVector<f64> {
            DVector::from_iterator(2 * n, p.iter().map(|c| c.re).chain(p.iter().map(|c| c.im)))
        };
        let to_cx = |v: &DVector<f64>| -> Point {
            (0..n).map(|j| Complex64::new(v[j], v[n + j])).collect()
        };
        let target = to_real(z);

        let mut p = z.to_vec();
        for _ in 0..8 {
            let r = self.rho(&p);
            let g = self.real_gradient(&p);
            let g2 = cvec::norm(&g).powi(2);
            if g2 < 1e-24 {
                return Err(Error::DegenerateBoundary(p));
            }
            p = cvec::axpy(&p, Complex64::new(-r / g2, 0.0), &g);
        }
        let mut x = to_real(&p);
        let g0 = to_real(&self.real_gradient(&p));
        let mut s = (&target - &x).dot(&g0) / g0.norm_squared();

        for _ in 0..100 {
            let pc = to_cx(&x);
            let g = to_real(&self.real_gradient(&pc));
            let h = self.real_hessian(&pc);
            let r = self.rho(&pc);
            let mut f = DVector::zeros(2 * n + 1);
            f.rows_mut(0, 2 * n).copy_from(&(&x + &g * s - &target));
            f[2 * n] = r;
            let step_scale = 1.0 + target.norm();
            if r.abs() < 1e-13 && f.rows(0, 2 * n).norm() < 1e-13 * step_scale {
                break;
            }
            let mut jac = DMatrix::zeros(2 * n + 1, 2 * n + 1);
            let top = DMatrix::identity(2 * n, 2 * n) + &h * s;
            jac.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&top);
            for i in 0..2 * n {
                jac[(i, 2 * n)] = g[i];
                jac[(2 * n, i)] = g[i];
            }
            let Some(delta) = jac.lu().solve(&(-f)) else {
                return Err(Error::NoConvergence("singular projection system".into()));
            };
            x += delta.rows(0, 2 * n);
            s += delta[2 * n];
        }
        let out = to_cx(&x);
        let r = self.rho(&out);
        if r.abs() >= 1e-12 || !r.is_finite() {
            return Err(Error::NoConvergence(format!(
                "projection residual {r:e} after 100 iterations"
            )));
        }
        if cvec::dist(&out, z) > self.w0_radius {
            return Err(Error::OutsideNeighborhood(z.to_vec()));
        }
        Ok(out)
    }

    /// Minimum of `rho` over samples of the complex tangent plane at `zeta`.
    pub fn lineal_convexity_probe(
        &self,
        zeta: &[Complex64],
        nsamples: usize,
    ) -> Result<ConvexityReport, Error> {
        let frame = self.frame_at(zeta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x11ea1);
        let mut min_rho = self.rho(zeta);
        let mut argmin = zeta.to_vec();
        for _ in 0..nsamples {
            let off = cvec::random_in_ball(&mut rng, &frame.tangent_basis, self.w0_radius);
            let p = cvec::add(zeta, &off);
            let r = self.rho(&p);
            if r < min_rho {
                min_rho = r;
                argmin = p;
            }
        }
        Ok(ConvexityReport {
            min_rho,
            argmin,
            nsamples,
            locally_lineally_convex: min_rho >= -1e-10,
        })
    }

    /// Boundary point found by shooting a ray from an interior anchor below
    /// `reference` through a random tangential offset of size `<= radius`.
    pub fn sample_boundary_point<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        radius: f64,
    ) -> Result<Point, Error> {
        let frame = self.level_frame(&self.reference)?;
        let depth = 0.5 * self.w0_radius;
        let anchor = cvec::axpy(&self.reference, Complex64::new(-depth, 0.0), &frame.normal);
        if self.rho(&anchor) >= 0.0 {
            return Err(Error::InvalidInput("interior anchor is not inside the domain".into()));
        }
        let off = cvec::random_in_ball(rng, &frame.tangent_basis, radius);
        let target = cvec::add(&self.reference, &off);
        let dir = cvec::sub(&target, &anchor);
        let at = |t: f64| cvec::axpy(&anchor, Complex64::new(t, 0.0), &dir);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut tries = 0;
        while self.rho(&at(hi)) <= 0.0 {
            lo = hi;
            hi *= 2.0;
            tries += 1;
            if tries > 40 {
                return Err(Error::NoConvergence("ray never leaves the domain".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.rho(&at(mid)) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * hi {
                break;
            }
        }
        // Newton polish along the ray
        let mut t = 0.5 * (lo + hi);
        for _ in 0..5 {
            let p = at(t);
            let r = self.rho(&p);
            if r.abs() < 1e-15 {
                break;
            }
            let g = self.real_gradient(&p);
            let slope = cvec::inner(&dir, &g).re;
            if slope.abs() < 1e-300 {
                break;
            }
            let next = t - r / slope;
            if next.is_finite() && next >= lo - 1e-12 && next <= hi + 1e-12 {
                t = next;
            }
        }
        Ok(at(t))
    }

    /// Interior point at euclidean depth `delta` below a boundary point, along
    /// the inward normal.
    pub fn push_inside(&self, zeta: &[Complex64], delta: f64) -> Result<Point, Error> {
        let frame = self.level_frame(zeta)?;
        Ok(cvec::axpy(zeta, Complex64::new(-delta, 0.0), &frame.normal))
    }

    pub fn in_bbox(&self, z: &[Complex64]) -> bool {
        match self.bbox {
            None => true,
            Some(h) => z
                .iter()
                .zip(&self.reference)
                .all(|(a, b)| (a.re - b.re).abs() <= h && (a.im - b.im).abs() <= h),
        }
    }

    pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    }

    #[doc(hidden)]
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let n = self.nvars();
        let basis: Vec<Point> = (0..n).map(|k| cvec::unit(n, k)).collect();
        cvec::random_unit_in(rng, &basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_defining_n;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dom(expr: &str, n: usize, m: u32) -> Domain {
        Domain::new(parse_defining_n(expr, Some(n)).unwrap(), m).unwrap()
    }

    #[test]
    fn half_space_frame() {
        let d = dom("y1", 3, 1);
        let f = d.frame_at(&[c(0.0, 0.0); 3]).unwrap();
        assert!((f.normal[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(f.tangent_basis.len(), 2);
        assert!((f.tangent_basis[0][1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((f.tangent_basis[1][2] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ball_frame() {
        let d = dom("x1^2+y1^2+x2^2+y2^2+x3^2+y3^2-1", 3, 1);
        let f = d.frame_at(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((f.normal[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn frame_requires_boundary_point() {
        let d = dom("y1", 2, 1);
        assert!(matches!(
            d.frame_at(&[c(0.0, -1.0), c(0.0, 0.0)]),
            Err(Error::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn degenerate_gradient() {
        let d = dom("x1^2 + y1^2", 1, 1);
        assert!(matches!(d.frame_at(&[c(0.0, 0.0)]), Err(Error::DegenerateBoundary(_))));
    }

    #[test]
    fn degree_cap_enforced() {
        let rho = parse_defining_n("y1 + x2^6", Some(2)).unwrap();
        assert!(Domain::new(rho, 2).is_err());
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let d = dom("y1 + x2^4 + x3^6 + y3^10 + x1*y2^2", 3, 5);
        let z = vec![c(0.1, -0.2), c(0.3, 0.25), c(-0.4, 0.35)];
        let h = d.real_hessian(&z);
        let n = 3;
        let step = 1e-5;
        for i in 0..2 * n {
            let mut zp = z.clone();
            let mut zm = z.clone();
            if i < n {
                zp[i] += c(step, 0.0);
                zm[i] -= c(step, 0.0);
            } else {
                zp[i - n] += c(0.0, step);
                zm[i - n] -= c(0.0, step);
            }
            let gp = d.real_gradient(&zp);
            let gm = d.real_gradient(&zm);
            for j in 0..2 * n {
                let comp = |g: &Point| if j < n { g[j].re } else { g[j - n].im };
                let fd = (comp(&gp) - comp(&gm)) / (2.0 * step);
                assert!((fd - h[(j, i)]).abs() < 1e-6, "H[{j},{i}] = {} vs {fd}", h[(j, i)]);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let hs = dom("y1", 3, 1);
        let p = hs.project_to_boundary(&[c(0.0, -0.01), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(cvec::norm(&p) < 1e-15);

        let ball = dom("x1^2+y1^2+x2^2+y2^2+x3^2+y3^2-1", 3, 1);
        let p = ball.project_to_boundary(&[c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(cvec::dist(&p, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]) < 1e-12);

        let model = dom("y1 + x2^4 + x3^6 + y3^10", 3, 5);
        let z = vec![c(0.0, -0.01), c(0.1, 0.0), c(0.0, 0.0)];
        let p = model.project_to_boundary(&z).unwrap();
        assert!(model.rho(&p).abs() < 1e-12);
        let disp = cvec::sub(&z, &p);
        let g = model.real_gradient(&p);
        // parallel: |<disp, g>| = |disp||g| up to angle 1e-6
        let cosang = cvec::inner(&disp, &g).norm() / (cvec::norm(&disp) * cvec::norm(&g));
        assert!((1.0 - cosang) < 1e-12, "cos = {cosang}");
        // real-parallel, not just complex-parallel
        assert!(cvec::inner(&disp, &g).im.abs() < 1e-10 * cvec::norm(&disp) * cvec::norm(&g));
    }

    #[test]
    fn projection_is_idempotent() {
        let model = dom("y1 + x2^4 + x3^6 + y3^10", 3, 5);
        let p = model.project_to_boundary(&[c(0.05, -0.02), c(0.2, 0.1), c(-0.1, 0.2)]).unwrap();
        let q = model.project_to_boundary(&p).unwrap();
        assert!(cvec::dist(&p, &q) < 1e-10);
    }

    #[test]
    fn convexity_probes() {
        let hs = dom("y1", 3, 1);
        let r = hs.lineal_convexity_probe(&[c(0.0, 0.0); 3], 200).unwrap();
        assert_eq!(r.min_rho, 0.0);
        let ball = dom("x1^2+y1^2+x2^2+y2^2+x3^2+y3^2-1", 3, 1);
        let r = ball
            .lineal_convexity_probe(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 200)
            .unwrap();
        assert!(r.min_rho >= 0.0 && r.locally_lineally_convex);
        let model = dom("y1 + x2^4 + x3^6 + y3^10", 3, 5);
        let r = model.lineal_convexity_probe(&[c(0.0, 0.0); 3], 500).unwrap();
        assert!(r.min_rho >= 0.0);
    }

    #[test]
    fn boundary_sampling_lands_on_boundary() {
        let model = dom("y1 + x2^4 + x3^6 + y3^10", 3, 5);
        let mut rng = Domain::rng_for(7, 0);
        for _ in 0..50 {
            let p = model.sample_boundary_point(&mut rng, 0.3).unwrap();
            assert!(model.rho(&p).abs() < 1e-12);
        }
    }
}
