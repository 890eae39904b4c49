//! Execution of each experiment kind.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Result};
use lineal_core::contact::{complex_line_order, exceptional_real_lines, linear_type, ContactOrder};
use lineal_core::cvec;
use lineal_core::holder::{polynomial_function, HolderOptions, HolderSampler};
use lineal_core::pdist::{
    extremal_basis, pseudodistance, run_properties, tau, PropertyId, PropertyOptions,
};
use lineal_core::polyring::parse_complex;
use lineal_core::slices::{make_slice, slice_taylor};
use lineal_core::support::{
    est1_report, leray_decompose, pluriharmonic_support, reconstruction_residual, verify_lemma_eq,
    verify_lemma_es, LemmaOptions, SignChoice,
};
use lineal_core::{Domain, Point};
use serde_json::{json, Value};

use crate::scenario::*;

/// Result of one experiment before it is wrapped into a report.
pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub csv: Option<String>,
}

fn base_point(d: &Domain, zeta: &Option<PointSpec>) -> Point {
    zeta.as_ref().map(to_point).unwrap_or_else(|| d.reference().clone())
}

fn axis_directions(n: usize) -> Vec<(String, Point)> {
    (1..n).map(|k| (format!("e{}", k + 1), cvec::unit(n, k))).collect()
}

fn named_directions(n: usize, given: &Option<Vec<PointSpec>>) -> Vec<(String, Point)> {
    match given {
        None => axis_directions(n),
        Some(v) => v.iter().enumerate().map(|(i, p)| (format!("d{}", i + 1), to_point(p))).collect(),
    }
}

fn order_value(o: ContactOrder) -> Value {
    serde_json::to_value(o).expect("orders serialize")
}

pub fn run(s: &Scenario) -> Result<Outcome> {
    let d = s.domain()?;
    match &s.params {
        Params::Contact(p) => contact(&d, p, s.seed),
        Params::Slice(p) => slice(&d, p),
        Params::SupportVerify(p) => support(&d, p, s.seed),
        Params::TauScan(p) => tau_scan(&d, p),
        Params::Basis(p) => basis(&d, p, s.seed),
        Params::Dist(p) => dist(&d, p),
        Params::Props(p) => props(&d, p, s.seed),
        Params::Holder(p) => holder(&d, p, s.seed),
    }
}

fn contact(d: &Domain, p: &ContactParams, seed: u64) -> Result<Outcome> {
    let zeta = base_point(d, &p.zeta);
    let mut orders = BTreeMap::new();
    let mut exceptional = BTreeMap::new();
    let mut lines = BTreeMap::new();
    for (name, g) in named_directions(d.nvars(), &p.directions) {
        let o = complex_line_order(d, &zeta, &g)?;
        let ex = exceptional_real_lines(d, &zeta, &g, p.exceptional_steps)?;
        if let Some(top) = ex.iter().map(|e| e.real_order).max() {
            exceptional.insert(name.clone(), order_value(top));
        }
        orders.insert(name.clone(), order_value(o));
        lines.insert(name, serde_json::to_value(&ex)?);
    }
    let mut result = json!({
        "zeta": from_point(&zeta),
        "orders": orders,
        "exceptional": exceptional,
        "exceptional_lines": lines,
    });
    if p.linear_type {
        let lt = linear_type(d, &zeta, p.multistart, seed)?;
        result["linear_type"] = json!({
            "order": order_value(lt.order),
            "direction": from_point(&lt.direction),
        });
    }
    Ok(Outcome { pass: true, result, csv: None })
}

fn slice(d: &Domain, p: &SliceParams) -> Result<Outcome> {
    let zeta = base_point(d, &p.zeta);
    let s = make_slice(d, &zeta, &to_point(&p.t))?;
    let tay = slice_taylor(&s);
    let parts: BTreeMap<String, Value> = (1..tay.p.len())
        .filter(|&j| !tay.part(j).is_zero())
        .map(|j| {
            (
                j.to_string(),
                json!({ "polynomial": tay.part(j).to_string(), "norm": tay.norm(j) }),
            )
        })
        .collect();
    Ok(Outcome {
        pass: true,
        result: json!({
            "zeta": from_point(&zeta),
            "t": from_point(&s.t),
            "r_slice": s.r_slice.as_cx().to_string(),
            "degree_cap": s.degree_cap(),
            "taylor": parts,
            "top": tay.top(),
        }),
        csv: None,
    })
}

fn sign_choice(s: &SignSpec) -> Result<SignChoice> {
    match s {
        SignSpec::Named(n) if n == "standard" => Ok(SignChoice::Standard),
        SignSpec::Named(n) if n == "opposite" => Ok(SignChoice::Opposite),
        SignSpec::Named(n) => bail!("unknown sign choice '{n}'"),
        SignSpec::Explicit(v) => Ok(SignChoice::Explicit(v.clone())),
    }
}

fn support(d: &Domain, p: &SupportParams, seed: u64) -> Result<Outcome> {
    let zeta = base_point(d, &p.zeta);
    let n = d.nvars();
    let tangents = match &p.tangents {
        None => axis_directions(n),
        Some(v) => v.iter().enumerate().map(|(i, t)| (format!("t{}", i + 1), to_point(t))).collect(),
    };
    let mut per_sign = Vec::new();
    let mut passing: Option<Value> = None;
    for spec in &p.signs {
        let choice = sign_choice(spec)?;
        let sd = leray_decompose(&pluriharmonic_support(d, &zeta, p.eps_corr, &choice)?)?;
        let residual_zero = reconstruction_residual(&sd).is_zero();
        let mut slices = BTreeMap::new();
        let mut all = residual_zero;
        for (name, t) in &tangents {
            let r = est1_report(&sd, d, t, p.radius, p.nsamples, seed)?;
            all &= r.pass;
            slices.insert(name.clone(), serde_json::to_value(&r)?);
        }
        let mut entry = json!({
            "sign": spec,
            "signs": sd.signs,
            "support": sd.s.to_string(),
            "leray": sd.q.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "reconstruction_exact": residual_zero,
            "est1": slices,
            "pass": all,
        });
        if !p.lemma_eps.is_empty() {
            let opts = LemmaOptions { seed, ..LemmaOptions::default() };
            let mut rng = Domain::rng_for(seed, 0x1e);
            let zs: Vec<Point> = (0..p.lemma_points)
                .map(|_| {
                    let b = d.sample_boundary_point(&mut rng, 0.05)?;
                    d.push_inside(&b, 1e-9)
                })
                .collect::<Result<_, _>>()?;
            let es = verify_lemma_es(&sd, d, &zs, &p.lemma_eps, &opts)?;
            let eq: Vec<Value> = p
                .lemma_eps
                .iter()
                .map(|&e| verify_lemma_eq(&sd, d, &zeta, e, 1000, &opts).map(|r| serde_json::to_value(r).unwrap()))
                .collect::<Result<_, _>>()?;
            entry["lemma_es"] = serde_json::to_value(es)?;
            entry["lemma_eq"] = Value::Array(eq);
        }
        if all && passing.is_none() {
            passing = Some(json!(spec));
        }
        per_sign.push(entry);
    }
    Ok(Outcome {
        pass: passing.is_some(),
        result: json!({
            "zeta": from_point(&zeta),
            "eps_corr": p.eps_corr,
            "radius": p.radius,
            "nsamples": p.nsamples,
            "passing_sign": passing,
            "choices": per_sign,
        }),
        csv: None,
    })
}

fn tau_scan(d: &Domain, p: &TauScanParams) -> Result<Outcome> {
    if !(p.eps_min > 0.0 && p.eps_max > p.eps_min && p.points >= 2) {
        bail!("tau-scan needs 0 < eps_min < eps_max and at least two points");
    }
    let zeta = base_point(d, &p.zeta);
    let g = to_point(&p.gamma);
    let (a, b) = (p.eps_min.ln(), p.eps_max.ln());
    let mut rows = Vec::with_capacity(p.points);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["eps", "tau", "capped"])?;
    for i in 0..p.points {
        let eps = (a + (b - a) * i as f64 / (p.points - 1) as f64).exp();
        let t = tau(d, &zeta, &g, eps)?;
        w.write_record([format!("{eps:e}"), format!("{:e}", t.value), t.capped.to_string()])?;
        rows.push((eps, t));
    }
    let free: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, t)| !t.capped)
        .map(|(e, t)| (e.ln(), t.value.ln()))
        .collect();
    let slope = (free.len() >= 2).then(|| {
        let k = free.len() as f64;
        let mx = free.iter().map(|p| p.0).sum::<f64>() / k;
        let my = free.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = free.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = free.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let csv = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    Ok(Outcome {
        pass: true,
        result: json!({
            "zeta": from_point(&zeta),
            "gamma": p.gamma,
            "rows": rows.iter().map(|(e, t)| json!({"eps": e, "tau": t.value, "capped": t.capped})).collect::<Vec<_>>(),
            "loglog_slope": slope,
        }),
        csv: Some(csv),
    })
}

fn basis(d: &Domain, p: &BasisParams, seed: u64) -> Result<Outcome> {
    let zeta = base_point(d, &p.zeta);
    let b = extremal_basis(d, &zeta, p.eps, p.multistart, seed)?;
    Ok(Outcome {
        pass: !b.stagnated,
        result: json!({
            "zeta": from_point(&zeta),
            "eps": p.eps,
            "vectors": b.v.iter().map(|v| from_point(v)).collect::<Vec<_>>(),
            "tau": b.tau,
            "capped": b.capped,
            "stagnated": b.stagnated,
        }),
        csv: None,
    })
}

fn dist(d: &Domain, p: &DistParams) -> Result<Outcome> {
    let zeta = base_point(d, &p.zeta);
    let rows: Vec<Value> = p
        .points
        .iter()
        .map(|z| -> Result<Value> {
            let r = pseudodistance(d, &zeta, &to_point(z))?;
            Ok(json!({ "z": z, "distance": r, "value": r.value() }))
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        pass: true,
        result: json!({ "zeta": from_point(&zeta), "distances": rows }),
        csv: None,
    })
}

fn props(d: &Domain, p: &PropsParams, seed: u64) -> Result<Outcome> {
    let want: Vec<PropertyId> = match &p.properties {
        None => PropertyId::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| {
                PropertyId::ALL
                    .into_iter()
                    .find(|id| id.name() == n)
                    .ok_or_else(|| anyhow!("unknown property '{n}'"))
            })
            .collect::<Result<_>>()?,
    };
    let run = run_properties(d, &PropertyOptions::new(p.nsamples, seed), &want)?;
    let reports = run.reports();
    let pass = reports.iter().all(|r| r.pass);
    let blocks: BTreeMap<String, Value> = reports
        .iter()
        .map(|r| (r.property.name().to_string(), serde_json::to_value(r).unwrap()))
        .collect();
    Ok(Outcome {
        pass,
        result: json!({ "nsamples": p.nsamples, "properties": blocks }),
        csv: None,
    })
}

fn holder(d: &Domain, p: &HolderParams, seed: u64) -> Result<Outcome> {
    let f = parse_complex(&p.function, Some(d.nvars()))?;
    let mut opts = HolderOptions::new(p.npairs, seed);
    opts.anchors = p.anchors;
    opts.direction = p.direction.as_ref().map(to_point);
    let sampler = HolderSampler::new(d, &opts)?;
    let est = sampler.estimate(polynomial_function(&f), p.mu, p.eps_h)?;
    let csv = if p.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in sampler.ratios(polynomial_function(&f), p.mu, p.eps_h)? {
            w.serialize(r)?;
        }
        Some(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
    } else {
        None
    };
    Ok(Outcome {
        pass: est.c_h.is_finite(),
        result: json!({
            "function": p.function,
            "estimate": est,
            "note": "lower bound: supremum over sampled pairs only",
        }),
        csv,
    })
}
