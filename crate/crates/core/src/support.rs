//! Holomorphic support functions: construction for rigid model domains,
//! the slice estimate, Leray decomposition and the sampling checks of the
//! two support-function lemmas.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::contact::{complex_line_order, ContactOrder};
use crate::cvec::{self, Point};
use crate::domain::Domain;
use crate::pdist::{extremal_basis_with, BasisOptions, ExtremalBasis};
use crate::polyring::{parse_complex, CxPolynomial, Monomial, Wirtinger};
use crate::slices::{make_slice, slice_taylor};
use crate::Error;

/// A holomorphic support polynomial `S` at `zeta` and, once decomposed, its
/// Leray coefficients `Q` with `S = sum_j Q_j (z_j - zeta_j)`.
#[derive(Clone, Debug, Serialize)]
pub struct SupportData {
    pub zeta: Point,
    pub s: CxPolynomial,
    pub q: Vec<CxPolynomial>,
    pub eps_corr: f64,
    /// Sign of each correction term, indexed by variable (0 where absent).
    pub signs: Vec<i8>,
}

impl SupportData {
    /// Wraps an externally supplied support polynomial.
    pub fn from_polynomial(zeta: Point, s: CxPolynomial, eps_corr: f64) -> Result<Self, Error> {
        if s.nvars() != zeta.len() {
            return Err(Error::InvalidInput("support polynomial and base point differ in dimension".into()));
        }
        if !s.is_holomorphic() {
            return Err(Error::InvalidInput("support polynomial contains conj(z) terms".into()));
        }
        let v = s.eval(&zeta)?;
        if v.norm() > 1e-12 * (1.0 + s.max_coeff()) {
            return Err(Error::InvalidInput(format!("support polynomial does not vanish at the base point ({v})")));
        }
        let n = zeta.len();
        Ok(SupportData {
            zeta,
            s,
            q: Vec::new(),
            eps_corr,
            signs: vec![0; n],
        })
    }

    /// `S(z, zeta') := S(z - zeta' + zeta)`, the support at a nearby base
    /// point obtained by translation.
    pub fn translated_value(&self, z: &[Complex64], zeta: &[Complex64]) -> Complex64 {
        let arg: Point = z.iter().zip(zeta).zip(&self.zeta).map(|((a, b), c)| a - b + c).collect();
        self.s.eval(&arg).expect("dimension checked at construction")
    }
}

/// Sign pattern of the correction terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignChoice {
    /// `-` on the first correction, `+` on the others.
    Standard,
    /// The negation of `Standard`.
    Opposite,
    /// One sign per variable `z_2, ..., z_n`.
    Explicit(Vec<i8>),
}

impl SignChoice {
    fn sign(&self, corr_index: usize, var: usize) -> i8 {
        match self {
            SignChoice::Standard => {
                if corr_index == 0 {
                    -1
                } else {
                    1
                }
            }
            SignChoice::Opposite => -SignChoice::Standard.sign(corr_index, var),
            SignChoice::Explicit(v) => v.get(var - 1).copied().unwrap_or(1),
        }
    }
}

/// Terms `c x_k^j` and `c' y_k^j` of a rigid model, one entry per variable.
#[derive(Clone, Debug, PartialEq)]
struct RigidPart {
    var: usize,
    /// `(j, c_x, c_y)` per degree present.
    powers: Vec<(u32, f64, f64)>,
}

fn real_power(nvars: usize, var: usize, j: u32, imaginary: bool) -> CxPolynomial {
    let name = if imaginary { "y" } else { "x" };
    parse_complex(&format!("{name}{}^{j}", var + 1), Some(nvars)).expect("well-formed")
}

/// Splits `rho - y1` into positive pure powers of `x_k`, `y_k`, `k >= 2`.
fn rigid_parts(d: &Domain) -> Result<Vec<RigidPart>, Error> {
    let n = d.nvars();
    let rho = d.defining().as_cx();
    let y1 = real_power(n, 0, 1, true);
    let rest = rho - &y1;
    let tol = 1e-12 * (1.0 + rho.max_coeff());
    let mut groups: Vec<CxPolynomial> = vec![CxPolynomial::zero(n); n];
    for (m, c) in rest.terms() {
        if c.norm() <= tol {
            continue;
        }
        let vars: Vec<usize> = (0..n).filter(|&j| m.alpha[j] + m.beta[j] > 0).collect();
        match vars.as_slice() {
            [k] if *k > 0 => groups[*k].add_term(m.clone(), *c),
            _ => return Err(Error::NotRigidModel(format!("term {m} is not a pure power of some z_k, k >= 2"))),
        }
    }
    let mut parts = Vec::new();
    for (k, g) in groups.iter().enumerate().skip(1) {
        let Some(top) = g.degree() else { continue };
        let mut powers = Vec::new();
        for j in 1..=top {
            let h = g.homogeneous_part(j);
            if h.is_zero() {
                continue;
            }
            if j < 2 {
                return Err(Error::NotRigidModel(format!("linear term in z{}", k + 1)));
            }
            let xp = real_power(n, k, j, false);
            let yp = real_power(n, k, j, true);
            let a = Monomial::holo(n, k, j);
            let mut b = Monomial::holo(n, k, j - 1);
            b.beta[k] = 1;
            let get = |p: &CxPolynomial, m: &Monomial| p.coeff(m).copied().unwrap_or_default();
            // [xa ya; xb yb] [cx; cy] = [ha; hb]
            let (xa, ya, xb, yb) = (get(&xp, &a), get(&yp, &a), get(&xp, &b), get(&yp, &b));
            let (ha, hb) = (get(&h, &a), get(&h, &b));
            let det = xa * yb - ya * xb;
            let cx = (ha * yb - ya * hb) / det;
            let cy = (xa * hb - ha * xb) / det;
            let resid = &(&h - &xp.scale(&Complex64::new(cx.re, 0.0))) - &yp.scale(&Complex64::new(cy.re, 0.0));
            let bad = cx.im.abs() > tol
                || cy.im.abs() > tol
                || cx.re < -tol
                || cy.re < -tol
                || resid.max_coeff() > tol;
            if bad {
                return Err(Error::NotRigidModel(format!(
                    "degree-{j} part in z{} is not a positive combination of x^{j} and y^{j}",
                    k + 1
                )));
            }
            powers.push((j, cx.re, cy.re));
        }
        parts.push(RigidPart { var: k, powers });
    }
    Ok(parts)
}

/// `S(z) = -i z1 + eps_corr sum_k sigma_k z_k^{d_k}` for a rigid model at the
/// origin, `d_k` being the order of contact of the `z_k`-axis.
pub fn pluriharmonic_support(
    d: &Domain,
    zeta: &[Complex64],
    eps_corr: f64,
    signs: &SignChoice,
) -> Result<SupportData, Error> {
    d.check_dim(zeta)?;
    if cvec::norm(zeta) > 1e-14 {
        return Err(Error::InvalidInput("support functions are constructed at the origin only".into()));
    }
    let n = d.nvars();
    let parts = rigid_parts(d)?;
    let mut s = CxPolynomial::zero(n);
    s.add_term(Monomial::holo(n, 0, 1), Complex64::new(0.0, -1.0));
    let mut sign_vec = vec![0i8; n];
    for (idx, part) in parts.iter().enumerate() {
        let ContactOrder::Finite(dk) = complex_line_order(d, zeta, &cvec::unit(n, part.var))? else {
            continue;
        };
        let sigma = signs.sign(idx, part.var);
        sign_vec[part.var] = sigma;
        s.add_term(Monomial::holo(n, part.var, dk), Complex64::new(eps_corr * sigma as f64, 0.0));
    }
    Ok(SupportData {
        zeta: zeta.to_vec(),
        s,
        q: Vec::new(),
        eps_corr,
        signs: sign_vec,
    })
}

/// `2 sum_j d rho/dz_j (zeta) (z_j - zeta_j)`, whose real part is the
/// first-order Taylor polynomial of `rho` at a boundary point.
pub fn linear_support(d: &Domain, zeta: &[Complex64]) -> Result<SupportData, Error> {
    d.check_dim(zeta)?;
    let n = d.nvars();
    let g = d.dz(zeta);
    let mut s = CxPolynomial::zero(n);
    let mut c0 = Complex64::new(0.0, 0.0);
    for j in 0..n {
        s.add_term(Monomial::holo(n, j, 1), 2.0 * g[j]);
        c0 -= 2.0 * g[j] * zeta[j];
    }
    s.add_term(Monomial::one(n), c0);
    SupportData::from_polynomial(zeta.to_vec(), s, 0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub op: String,
    pub min_margin: f64,
    pub worst_point: Option<Point>,
    pub fitted_constants: BTreeMap<String, f64>,
    pub nsamples: usize,
    pub seed: u64,
    pub pass: bool,
}

impl EstimateReport {
    pub fn constant(&self, name: &str) -> f64 {
        self.fitted_constants.get(name).copied().unwrap_or(f64::NAN)
    }
}

/// Samples of the slice estimate `Re S <= r - eps' sum_j ||P^j|| |w2|^j`.
///
/// The margin is evaluated for `eps' = 2^-i`, `i = 0..=20`; the report holds
/// the largest `eps'` with `min margin >= -1e-12` (`eps_prime`, absent when
/// none works). Never fails on a violated estimate; see [`verify_est1`].
pub fn est1_report(
    sd: &SupportData,
    d: &Domain,
    t: &[Complex64],
    radius: f64,
    nsamples: usize,
    seed: u64,
) -> Result<EstimateReport, Error> {
    let slice = make_slice(d, &sd.zeta, t)?;
    let tay = slice_taylor(&slice);
    let n = d.nvars();
    let minus_i = Complex64::new(0.0, -1.0);
    let m: Vec<Vec<Complex64>> = (0..n)
        .map(|j| vec![minus_i * slice.frame.normal[j], slice.t[j]])
        .collect();
    let s_slice = sd.s.compose_affine(&sd.zeta, &m)?;
    let r_slice = slice.r_slice.as_cx();

    let mut rng = Domain::rng_for(seed, 0);
    let ws: Vec<[Complex64; 2]> = (0..nsamples)
        .map(|_| [cvec::random_in_disc(&mut rng, radius), cvec::random_in_disc(&mut rng, radius)])
        .collect();
    let samples: Vec<(f64, f64)> = ws
        .par_iter()
        .map(|w| {
            let base = r_slice.eval(w).unwrap().re - s_slice.eval(w).unwrap().re;
            let a = w[1].norm();
            let weight: f64 = (2..tay.p.len()).map(|j| tay.norm(j) * a.powi(j as i32)).sum();
            (base, weight)
        })
        .collect();
    let min_margin = |ep: f64| -> (f64, usize) {
        samples
            .iter()
            .enumerate()
            .map(|(i, (b, w))| (b - ep * w, i))
            .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc })
    };
    let mut found = None;
    for i in 0..=20 {
        let ep = 2f64.powi(-i);
        let (mm, idx) = min_margin(ep);
        if mm >= -1e-12 {
            found = Some((ep, mm, idx));
            break;
        }
    }
    let mut constants = BTreeMap::new();
    let (mm, idx) = match found {
        Some((ep, mm, idx)) => {
            constants.insert("eps_prime".to_string(), ep);
            (mm, idx)
        }
        None => min_margin(2f64.powi(-20)),
    };
    let worst = (!ws.is_empty()).then(|| ws[idx].to_vec());
    Ok(EstimateReport {
        op: "est1".into(),
        min_margin: mm,
        worst_point: worst,
        fitted_constants: constants,
        nsamples,
        seed,
        pass: found.is_some(),
    })
}

/// [`est1_report`], failing when no `eps' >= 2^-20` works.
pub fn verify_est1(
    sd: &SupportData,
    d: &Domain,
    t: &[Complex64],
    radius: f64,
    nsamples: usize,
    seed: u64,
) -> Result<EstimateReport, Error> {
    let r = est1_report(sd, d, t, radius, nsamples, seed)?;
    if r.pass {
        Ok(r)
    } else {
        Err(Error::SupportFailure(format!(
            "no eps' down to 2^-20 keeps the margin nonnegative (min margin {:e})",
            r.min_margin
        )))
    }
}

/// Replaces the variables `0..upto` by the matching entries of `zeta`.
fn freeze_leading(p: &CxPolynomial, zeta: &[Complex64], upto: usize) -> Result<CxPolynomial, Error> {
    let n = p.nvars();
    let b: Point = (0..n).map(|j| if j < upto { zeta[j] } else { Complex64::new(0.0, 0.0) }).collect();
    let m: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            if j < upto {
                vec![Complex64::new(0.0, 0.0); n]
            } else {
                cvec::unit(n, j)
            }
        })
        .collect();
    Ok(p.compose_affine(&b, &m)?)
}

fn shift_var(p: &CxPolynomial, var: usize, by: Complex64) -> Result<CxPolynomial, Error> {
    let n = p.nvars();
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    b[var] = by;
    let m: Vec<Vec<Complex64>> = (0..n).map(|j| cvec::unit(n, j)).collect();
    Ok(p.compose_affine(&b, &m)?)
}

/// Leray coefficients by telescoping division:
/// `Q_j = [S(zeta_1..zeta_{j-1}, z_j..z_n) - S(zeta_1..zeta_j, z_{j+1}..z_n)] / (z_j - zeta_j)`.
pub fn leray_decompose(sd: &SupportData) -> Result<SupportData, Error> {
    let n = sd.s.nvars();
    if !sd.s.is_holomorphic() {
        return Err(Error::InvalidInput("support polynomial contains conj(z) terms".into()));
    }
    let tol = 1e-12 * (1.0 + sd.s.max_coeff());
    let mut q = Vec::with_capacity(n);
    let mut prev = sd.s.clone();
    for j in 0..n {
        let next = freeze_leading(&sd.s, &sd.zeta, j + 1)?;
        let num = &prev - &next;
        // in u = z_j - zeta_j the numerator must be divisible by u
        let shifted = shift_var(&num, j, sd.zeta[j])?;
        let mut quot = CxPolynomial::zero(n);
        let mut rem: f64 = 0.0;
        for (m, c) in shifted.terms() {
            if m.alpha[j] == 0 {
                rem += c.norm();
            } else {
                let mut m2 = m.clone();
                m2.alpha[j] -= 1;
                quot.add_term(m2, *c);
            }
        }
        if rem > tol {
            return Err(Error::DivisionRemainder(rem));
        }
        q.push(shift_var(&quot, j, -sd.zeta[j])?);
        prev = next;
    }
    // what remains is the constant S(zeta)
    let rem = prev.max_coeff();
    if rem > tol {
        return Err(Error::DivisionRemainder(rem));
    }
    Ok(SupportData { q, ..sd.clone() })
}

/// `sum_j Q_j (z_j - zeta_j) - S`, zero for a valid decomposition.
pub fn reconstruction_residual(sd: &SupportData) -> CxPolynomial {
    let n = sd.s.nvars();
    let mut acc = -&sd.s;
    for (j, qj) in sd.q.iter().enumerate() {
        let mut lin = CxPolynomial::z(n, j);
        lin.add_term(Monomial::one(n), -sd.zeta[j]);
        acc = &acc + &(qj * &lin);
    }
    acc
}

/// `i (d/dz_j)(d/dconj z_k) Re S` for all pairs, which vanish iff `Re S` is
/// pluriharmonic.
pub fn levi_form_of_real_part(sd: &SupportData) -> Result<Vec<CxPolynomial>, Error> {
    let n = sd.s.nvars();
    let re = (&sd.s + &sd.s.conj()).scale(&Complex64::new(0.5, 0.0));
    let mut out = Vec::new();
    for j in 0..n {
        let dj = re.wirtinger(j, Wirtinger::Holomorphic)?;
        for k in 0..n {
            out.push(dj.wirtinger(k, Wirtinger::Antiholomorphic)?);
        }
    }
    Ok(out)
}

/// Options shared by the two lemma checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaOptions {
    /// Outer scale `C` of the shell `C P_eps \ (1/2) P_eps`.
    pub shell_scale: f64,
    /// Accepted shell samples per `(z, eps)`.
    pub shell_samples: usize,
    pub max_tries: usize,
    pub seed: u64,
    pub basis: BasisOptions,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions {
            shell_scale: 1.0,
            shell_samples: 40,
            max_tries: 4000,
            seed: 0,
            basis: BasisOptions::fast(0),
        }
    }
}

/// Gauge of `lambda` over the non-capped coordinates only; capped radii are
/// treated as infinite.
fn finite_gauge(b: &ExtremalBasis, lambda: &[Complex64]) -> f64 {
    lambda
        .iter()
        .enumerate()
        .filter(|(k, _)| !b.capped[*k])
        .map(|(k, l)| l.norm() / b.tau[k])
        .fold(0.0, f64::max)
}

/// Boundary points `zeta` with extremal coordinates around `b.zeta` in the
/// range `lo < gauge <= hi`: tangential coordinates and the imaginary part of
/// the normal one are drawn uniformly, the real normal part is solved for.
fn sample_boundary_shell<R: Rng + ?Sized>(
    d: &Domain,
    b: &ExtremalBasis,
    lo: f64,
    hi: f64,
    count: usize,
    max_tries: usize,
    rng: &mut R,
) -> Vec<Point> {
    let n = b.dim();
    let mut out = Vec::new();
    for _ in 0..max_tries {
        if out.len() >= count {
            break;
        }
        let mut lambda: Point = (0..n).map(|k| cvec::random_in_disc(rng, hi * b.tau[k])).collect();
        lambda[0] = Complex64::new(0.0, rng.gen_range(-hi..=hi) * b.tau[0]);
        let mut p = b.point(&lambda);
        let mut ok = false;
        for _ in 0..50 {
            let r = d.rho(&p);
            if r.abs() <= 1e-15 {
                ok = true;
                break;
            }
            let slope = cvec::inner(&b.v[0], &d.real_gradient(&p)).re;
            if slope.abs() < 1e-300 {
                break;
            }
            p = cvec::axpy(&p, Complex64::new(-r / slope, 0.0), &b.v[0]);
        }
        if !ok {
            continue;
        }
        let g = finite_gauge(b, &b.coordinates(&p));
        if g > lo && g <= hi {
            out.push(p);
        }
    }
    out
}

/// Lower bounds `c1 = min |S(z, zeta)| / eps` over boundary points `zeta` in
/// the shell `C P_eps(pi(z)) \ (1/2) P_eps(pi(z))`, and
/// `c2 = min |S(z, zeta)| / |rho(z)|` over `zeta` in `P_{|rho(z)|}(pi(z))`.
///
/// The support at `zeta` is the translate of `sd`. For `c2` at grid value
/// `eps` each `z` is moved along the normal to depth `|rho| = eps`, so both
/// constants are reported per grid value (`c1@eps`, `c2@eps`).
pub fn verify_lemma_es(
    sd: &SupportData,
    d: &Domain,
    z_samples: &[Point],
    eps_grid: &[f64],
    opts: &LemmaOptions,
) -> Result<EstimateReport, Error> {
    if z_samples.is_empty() || eps_grid.is_empty() {
        return Err(Error::EmptySample("no z samples or empty grid".into()));
    }
    let foot: Vec<Point> = z_samples
        .iter()
        .map(|z| d.project_to_boundary(z))
        .collect::<Result<_, _>>()?;
    let mut constants = BTreeMap::new();
    let mut c1s = Vec::new();
    let mut c2s = Vec::new();
    let mut worst: (f64, Option<Point>) = (f64::INFINITY, None);
    for (gi, &eps) in eps_grid.iter().enumerate() {
        let per_z: Vec<(f64, f64, Point)> = z_samples
            .par_iter()
            .zip(&foot)
            .enumerate()
            .map(|(zi, (z, pz))| -> Result<(f64, f64, Point), Error> {
                let mut rng = Domain::rng_for(opts.seed, (gi * z_samples.len() + zi) as u64);
                let mut bo = opts.basis;
                bo.seed = opts.seed.wrapping_add(zi as u64);
                let b = extremal_basis_with(d, pz, eps, &bo)?;
                let shell = sample_boundary_shell(d, &b, 0.5, opts.shell_scale, opts.shell_samples, opts.max_tries, &mut rng);
                if shell.is_empty() {
                    return Err(Error::EmptySample(format!("no boundary points in the shell at eps = {eps:e}")));
                }
                let (c1, arg) = shell
                    .iter()
                    .map(|zeta| (sd.translated_value(z, zeta).norm() / eps, zeta))
                    .fold((f64::INFINITY, &shell[0]), |a, x| if x.0 < a.0 { x } else { a });

                let normal = d.level_frame(pz)?.normal;
                let slope = cvec::norm(&d.real_gradient(pz));
                let zd = cvec::axpy(pz, Complex64::new(-eps / slope, 0.0), &normal);
                let depth = d.rho(&zd).abs();
                let b2 = extremal_basis_with(d, pz, depth, &bo)?;
                let near = sample_boundary_shell(d, &b2, -1.0, 1.0, opts.shell_samples, opts.max_tries, &mut rng);
                if near.is_empty() {
                    return Err(Error::EmptySample(format!("no boundary points near pi(z) at depth {depth:e}")));
                }
                let c2 = near
                    .iter()
                    .map(|zeta| sd.translated_value(&zd, zeta).norm() / depth)
                    .fold(f64::INFINITY, f64::min);
                Ok((c1, c2, arg.clone()))
            })
            .collect::<Result<_, _>>()?;
        let (mut c1, mut c2) = (f64::INFINITY, f64::INFINITY);
        for (a, b, p) in per_z {
            if a < worst.0 {
                worst = (a, Some(p));
            }
            c1 = c1.min(a);
            c2 = c2.min(b);
        }
        constants.insert(format!("c1@{eps:e}"), c1);
        constants.insert(format!("c2@{eps:e}"), c2);
        c1s.push(c1);
        c2s.push(c2);
    }
    let spread = |v: &[f64]| max_of(v) / min_of(v);
    let median = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s[s.len() / 2]
    };
    constants.insert("c1".into(), min_of(&c1s));
    constants.insert("c2".into(), min_of(&c2s));
    constants.insert("c1_spread".into(), spread(&c1s));
    constants.insert("c2_spread".into(), spread(&c2s));
    let pass = min_of(&c1s) >= 0.01 * median(&c1s) && min_of(&c2s) >= 0.01 * median(&c2s) && min_of(&c1s) > 0.0;
    Ok(EstimateReport {
        op: "lemma_es".into(),
        min_margin: worst.0,
        worst_point: worst.1,
        fitted_constants: constants,
        nsamples: z_samples.len() * eps_grid.len(),
        seed: opts.seed,
        pass,
    })
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Leray coefficients in extremal coordinates: `Q*_k(w, eta)` as polynomials
/// in the `2n` variables `(w, eta)`, where `z = zeta0 + Phi^* w` and
/// `zeta = zeta0 + Phi^* eta`, for the translated support family.
pub fn leray_in_extremal_coordinates(sd: &SupportData, b: &ExtremalBasis) -> Result<Vec<CxPolynomial>, Error> {
    if sd.q.is_empty() {
        return Err(Error::InvalidInput("support data has no Leray coefficients".into()));
    }
    let n = b.dim();
    // z - zeta + sd.zeta = sd.zeta + sum_k (w_k - eta_k) v_k
    let m: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut row: Vec<Complex64> = (0..n).map(|k| b.v[k][j]).collect();
            row.extend((0..n).map(|k| -b.v[k][j]));
            row
        })
        .collect();
    let q_wz: Vec<CxPolynomial> = sd
        .q
        .iter()
        .map(|q| q.compose_affine(&sd.zeta, &m))
        .collect::<Result<_, _>>()?;
    Ok((0..n)
        .map(|k| {
            let mut acc = CxPolynomial::zero(2 * n);
            for (j, qj) in q_wz.iter().enumerate() {
                acc = &acc + &qj.scale(&b.v[k][j]);
            }
            acc.prune(0.0)
        })
        .collect())
}

/// Fits `K_k = max |Q*_k| tau_k / eps`, `K_ik = max |d_{w_i} Q*_k| tau_k tau_i / eps`,
/// `K_jk` (same with `d_{eta_j}`) and `K_ijk` (mixed `d_{w_i} d_{eta_j}`, one
/// more factor `tau_j`) over samples `|w_k|, |eta_k| <= tau_k`. Reports the
/// maxima over indices as `K`, `K_w`, `K_eta`, `K_w_eta`, and the largest
/// relative gap between exact first derivatives and central differences as
/// `fd_rel_err`.
pub fn verify_lemma_eq(
    sd: &SupportData,
    d: &Domain,
    zeta0: &[Complex64],
    eps: f64,
    nsamples: usize,
    opts: &LemmaOptions,
) -> Result<EstimateReport, Error> {
    let b = extremal_basis_with(d, zeta0, eps, &opts.basis)?;
    if let Some(k) = b.tau.iter().position(|t| !(*t > 0.0)) {
        return Err(Error::DegenerateBasis(k + 1));
    }
    let n = b.dim();
    let qs = leray_in_extremal_coordinates(sd, &b)?;
    let dw: Vec<Vec<CxPolynomial>> = qs
        .iter()
        .map(|q| (0..n).map(|i| q.wirtinger(i, Wirtinger::Holomorphic)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let deta: Vec<Vec<CxPolynomial>> = qs
        .iter()
        .map(|q| (0..n).map(|j| q.wirtinger(n + j, Wirtinger::Holomorphic)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let dwe: Vec<Vec<Vec<CxPolynomial>>> = dw
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| (0..n).map(|j| p.wirtinger(n + j, Wirtinger::Holomorphic)).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut rng = Domain::rng_for(opts.seed, 0x0e9);
    let pts: Vec<Point> = (0..nsamples)
        .map(|_| {
            let mut p: Point = b.tau.iter().map(|t| cvec::random_in_disc(&mut rng, *t)).collect();
            p.extend(b.tau.iter().map(|t| cvec::random_in_disc(&mut rng, *t)));
            p
        })
        .collect();
    let tau = &b.tau;
    let mut kk = vec![0.0f64; n];
    let mut kw = vec![vec![0.0f64; n]; n];
    let mut ke = vec![vec![0.0f64; n]; n];
    let mut kwe = vec![vec![vec![0.0f64; n]; n]; n];
    let mut exact_scale = vec![vec![0.0f64; n]; n];
    let mut fd_gap = vec![vec![0.0f64; n]; n];
    let ev = |p: &CxPolynomial, x: &Point| p.eval(x).expect("dimension").norm();
    for (si, x) in pts.iter().enumerate() {
        for k in 0..n {
            kk[k] = kk[k].max(ev(&qs[k], x) * tau[k] / eps);
            for i in 0..n {
                let exact = dw[k][i].eval(x).unwrap();
                kw[k][i] = kw[k][i].max(exact.norm() * tau[k] * tau[i] / eps);
                ke[k][i] = ke[k][i].max(ev(&deta[k][i], x) * tau[k] * tau[i] / eps);
                for j in 0..n {
                    kwe[k][i][j] = kwe[k][i][j].max(ev(&dwe[k][i][j], x) * tau[k] * tau[i] * tau[j] / eps);
                }
                if si < 100 {
                    let h = 1e-4 * tau[i];
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (qs[k].eval(&xp).unwrap() - qs[k].eval(&xm).unwrap()) / (2.0 * h);
                    exact_scale[k][i] = exact_scale[k][i].max(exact.norm());
                    fd_gap[k][i] = fd_gap[k][i].max((fd - exact).norm());
                }
            }
        }
    }
    let mut constants = BTreeMap::new();
    let mut fd_rel: f64 = 0.0;
    for k in 0..n {
        constants.insert(format!("K_{}", k + 1), kk[k]);
        for i in 0..n {
            constants.insert(format!("K_w{}_{}", i + 1, k + 1), kw[k][i]);
            constants.insert(format!("K_eta{}_{}", i + 1, k + 1), ke[k][i]);
            if exact_scale[k][i] > 0.0 {
                fd_rel = fd_rel.max(fd_gap[k][i] / exact_scale[k][i]);
            } else {
                fd_rel = fd_rel.max(fd_gap[k][i]);
            }
        }
    }
    let flat_max = |v: &[Vec<f64>]| v.iter().flatten().cloned().fold(0.0, f64::max);
    constants.insert("K".into(), kk.iter().cloned().fold(0.0, f64::max));
    constants.insert("K_w".into(), flat_max(&kw));
    constants.insert("K_eta".into(), flat_max(&ke));
    constants.insert(
        "K_w_eta".into(),
        kwe.iter().flat_map(|a| a.iter().flatten()).cloned().fold(0.0, f64::max),
    );
    constants.insert("fd_rel_err".into(), fd_rel);
    let finite = constants.values().all(|v| v.is_finite());
    Ok(EstimateReport {
        op: "lemma_eq".into(),
        min_margin: 0.0,
        worst_point: None,
        fitted_constants: constants,
        nsamples,
        seed: opts.seed,
        pass: finite && fd_rel <= 1e-6,
    })
}
