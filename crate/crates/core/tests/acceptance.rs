//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! print.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use lineal_core::catalog::builtin;
use lineal_core::contact::{complex_line_order, exceptional_real_lines, real_line_order, ContactOrder};
use lineal_core::cvec;
use lineal_core::holder::{polynomial_function, HolderOptions, HolderSampler};
use lineal_core::pdist::{
    extremal_basis, pseudodistance, run_properties, tau, PropertyId, PropertyOptions, PropertyReport,
};
use lineal_core::polyring::{parse_complex, parse_defining_n};
use lineal_core::support::{
    est1_report, leray_decompose, pluriharmonic_support, reconstruction_residual, verify_lemma_eq,
    verify_lemma_es, EstimateReport, LemmaOptions, SignChoice,
};
use lineal_core::{Domain, Point};
use num_complex::Complex64;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn origin(n: usize) -> Point {
    vec![Complex64::new(0.0, 0.0); n]
}

fn model() -> Domain {
    builtin("model").unwrap()
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi == 0.0 && lo == 0.0 {
        1.0
    } else {
        hi / lo
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn contact_orders() -> Verdict {
    let t0 = Instant::now();
    let d = model();
    let z = origin(3);
    let (e2, e3) = (cvec::unit(3, 1), cvec::unit(3, 2));
    let c2 = complex_line_order(&d, &z, &e2).unwrap();
    let c3 = complex_line_order(&d, &z, &e3).unwrap();
    let r2 = real_line_order(&d, &z, &e2, FRAC_PI_2).unwrap();
    let r3 = real_line_order(&d, &z, &e3, FRAC_PI_2).unwrap();
    let x2 = exceptional_real_lines(&d, &z, &e2, 720).unwrap();
    let x3 = exceptional_real_lines(&d, &z, &e3, 720).unwrap();
    // the only exceptional real line in each axis is {x_k = 0}
    let only_imaginary = |v: &[lineal_core::contact::ExceptionalLine]| {
        v.len() == 1 && (v[0].theta - FRAC_PI_2).abs() < 1e-9
    };
    let secs = t0.elapsed().as_secs_f64();
    let pass = c2 == ContactOrder::Finite(4)
        && c3 == ContactOrder::Finite(6)
        && r2 == ContactOrder::Infinite
        && r3 == ContactOrder::Finite(10)
        && only_imaginary(&x2)
        && only_imaginary(&x3)
        && x2[0].real_order == ContactOrder::Infinite
        && x3[0].real_order == ContactOrder::Finite(10)
        && secs < 1.0;
    verdict(
        pass,
        format!(
            "complex e2={c2} e3={c3}, real i*e2={r2} i*e3={r3}, exceptional lines {}+{}, {secs:.2}s",
            x2.len(),
            x3.len()
        ),
    )
}

fn tau_slopes() -> Verdict {
    let t0 = Instant::now();
    let d = model();
    let z = origin(3);
    let grid: Vec<f64> = (0..13).map(|i| 10f64.powf(-8.0 + 0.5 * i as f64)).collect();
    let mut out = Vec::new();
    let mut pass = true;
    for (k, target) in [(0usize, 1.0), (1, 0.25), (2, 1.0 / 6.0)] {
        let g = cvec::unit(3, k);
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .map(|&e| (e.ln(), tau(&d, &z, &g, e).unwrap().value.ln()))
            .collect();
        let s = slope(&pts);
        pass &= (s - target).abs() <= 0.02;
        out.push(format!("e{}: {s:.4} (want {target:.4})", k + 1));
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    verdict(pass, format!("{}, {secs:.2}s", out.join(", ")))
}

fn basis_ordering() -> Verdict {
    let d = model();
    let eps = 1e-6;
    let b = extremal_basis(&d, &origin(3), eps, 64, 1).unwrap();
    let a2 = cvec::inner(&b.v[1], &cvec::unit(3, 2)).norm();
    let a3 = cvec::inner(&b.v[2], &cvec::unit(3, 1)).norm();
    let ratio = b.tau[1] / b.tau[2];
    let want = eps.powf(1.0 / 6.0 - 0.25);
    let ratio_ok = ratio / want <= 2.0 && want / ratio <= 2.0;
    verdict(
        a2 > 0.99 && a3 > 0.99 && ratio_ok,
        format!("|<v2,e3>| = {a2:.4}, |<v3,e2>| = {a3:.4} (need > 0.99), tau2/tau3 = {ratio:.4} vs {want:.4}"),
    )
}

fn distance_power_law() -> Verdict {
    let t0 = Instant::now();
    let d = model();
    let mut pass = true;
    let mut out = Vec::new();
    for delta in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3] {
        let z = vec![Complex64::new(0.0, 0.0), Complex64::new(delta, 0.0), Complex64::new(0.0, 0.0)];
        let r = pseudodistance(&d, &origin(3), &z).unwrap().value() / delta.powi(4);
        pass &= (0.25..=4.0).contains(&r);
        out.push(format!("{r:.3}"));
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs < 30.0;
    verdict(pass, format!("d/delta^4 = [{}], {secs:.2}s", out.join(", ")))
}

fn stable_within_two(r: &PropertyReport) -> bool {
    r.constants.iter().all(|(k, &full)| {
        let half = r.constants_half[k];
        full.is_finite() && half.is_finite() && spread(&[full, half]) <= 2.0
    })
}

fn property_suite() -> Verdict {
    let t0 = Instant::now();
    let opts = PropertyOptions::new(1000, 42);
    let mut pass = true;
    let mut out = Vec::new();

    let hs = run_properties(&builtin("half-space").unwrap(), &opts, &PropertyId::ALL).unwrap();
    let worst = hs
        .reports()
        .iter()
        .flat_map(|r| r.constants.values().cloned().collect::<Vec<_>>())
        .fold(0.0, f64::max);
    pass &= worst <= 1.0 + 1e-3;
    out.push(format!("half-space max constant {worst:.5}"));

    for name in ["ball", "model"] {
        let run = run_properties(&builtin(name).unwrap(), &opts, &PropertyId::ALL).unwrap();
        let reports = run.reports();
        let bad: Vec<String> = reports
            .iter()
            .filter(|r| !(r.pass && stable_within_two(r)))
            .map(|r| r.property.to_string())
            .collect();
        pass &= bad.is_empty();
        let v = reports.iter().find(|r| r.property == PropertyId::V).unwrap();
        let (ks, kt) = (v.constant("K_sym"), v.constant("K_tri"));
        if name == "model" {
            pass &= ks.is_finite() && kt.is_finite() && ks <= 64.0 && kt <= 64.0;
        }
        out.push(format!(
            "{name}: {} failing, K_sym {ks:.3}, K_tri {kt:.3}",
            if bad.is_empty() { "none".to_string() } else { bad.join("/") }
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs < 300.0;
    verdict(pass, format!("{}, {secs:.1}s", out.join("; ")))
}

fn engulfing_powers() -> Verdict {
    let mut worst: f64 = 0.0;
    for deg in [2u32, 4, 6, 10] {
        let d = Domain::new(parse_defining_n(&format!("y1 + x2^{deg}"), Some(2)).unwrap(), deg / 2).unwrap();
        let e2 = cvec::unit(2, 1);
        for eps in [1e-6, 1e-3] {
            let base = tau(&d, &origin(2), &e2, eps).unwrap().value;
            for k in [2.0, 4.0] {
                let r = tau(&d, &origin(2), &e2, k * eps).unwrap().value / base;
                let want = k.powf(1.0 / deg as f64);
                worst = worst.max((r / want - 1.0).abs());
            }
        }
    }
    verdict(worst <= 1e-3, format!("max relative error {worst:.2e}"))
}

fn support_verification() -> Verdict {
    let d = model();
    let z = origin(3);
    let mut passing = Vec::new();
    let mut out = Vec::new();
    let mut exact = true;
    for (label, sign) in [("standard", SignChoice::Standard), ("opposite", SignChoice::Opposite)] {
        let sd = leray_decompose(&pluriharmonic_support(&d, &z, 0.1, &sign).unwrap()).unwrap();
        exact &= reconstruction_residual(&sd).is_zero();
        let mut ok = true;
        let mut parts = Vec::new();
        for k in [1usize, 2] {
            let r = est1_report(&sd, &d, &cvec::unit(3, k), 0.3, 10_000, 7).unwrap();
            let ep = r.constant("eps_prime");
            ok &= r.pass && ep >= 2f64.powi(-8) && r.min_margin >= -1e-12;
            parts.push(if r.pass {
                format!("e{}: eps'=2^{}", k + 1, ep.log2().round())
            } else {
                format!("e{}: none (min margin {:.2e})", k + 1, r.min_margin)
            });
        }
        if ok {
            passing.push(label);
        }
        out.push(format!("{label} [{}]", parts.join(", ")));
    }
    verdict(
        !passing.is_empty() && exact,
        format!(
            "{}; passing sign: {}; Leray reconstruction exact: {exact}",
            out.join("; "),
            if passing.is_empty() { "none".to_string() } else { passing.join(",") }
        ),
    )
}

fn lemma_stability() -> Verdict {
    let d = model();
    let z = origin(3);
    // the standard sign is the one whose slice estimate holds along e2
    let sd = leray_decompose(&pluriharmonic_support(&d, &z, 0.1, &SignChoice::Standard).unwrap()).unwrap();
    let grid = [1e-3, 1e-4, 1e-5];
    let opts = LemmaOptions { seed: 5, ..LemmaOptions::default() };
    let mut rng = Domain::rng_for(5, 0);
    let zs: Vec<Point> = (0..8)
        .map(|_| {
            let p = d.sample_boundary_point(&mut rng, 0.05).unwrap();
            d.push_inside(&p, 1e-9).unwrap()
        })
        .collect();
    let es = verify_lemma_es(&sd, &d, &zs, &grid, &opts).unwrap();
    let per = |r: &EstimateReport, c: &str| -> Vec<f64> { grid.iter().map(|e| r.constant(&format!("{c}@{e:e}"))).collect() };
    let (c1, c2) = (spread(&per(&es, "c1")), spread(&per(&es, "c2")));

    let eq: Vec<EstimateReport> = grid.iter().map(|&e| verify_lemma_eq(&sd, &d, &z, e, 1000, &opts).unwrap()).collect();
    let mut names: Vec<String> = vec!["K".into(), "K_w".into(), "K_eta".into(), "K_w_eta".into()];
    names.extend((1..=3).map(|k| format!("K_{k}")));
    let eq_spread = names
        .iter()
        .map(|n| spread(&eq.iter().map(|r| r.constant(n)).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let fd = eq.iter().map(|r| r.constant("fd_rel_err")).fold(0.0, f64::max);
    verdict(
        c1 < 4.0 && c2 < 4.0 && eq_spread < 4.0 && fd <= 1e-6 && es.pass,
        format!("ES spread c1 {c1:.2}, c2 {c2:.2}; EQ max spread {eq_spread:.2}; fd rel err {fd:.1e}"),
    )
}

fn holder_sanity() -> Verdict {
    let t0 = Instant::now();
    let d = model();
    let h = parse_complex("x2", Some(3)).unwrap();
    let mut opts = HolderOptions::new(40_000, 42);
    opts.direction = Some(cvec::unit(3, 1));
    let full = HolderSampler::new(&d, &opts).unwrap();
    let small = full.prefix(10_000);
    let est = |s: &HolderSampler, mu: f64| s.estimate(polynomial_function(&h), mu, 0.1).unwrap();
    let (q_small, q_full) = (est(&small, 0.25), est(&full, 0.25));
    let (h_small, h_full) = (est(&small, 0.5), est(&full, 0.5));
    let change = |a: f64, b: f64| (b - a).abs() / a;
    let quarter_stable = change(q_small.c_h, q_full.c_h) < 0.2;
    let half_grows = change(h_small.c_h, h_full.c_h) >= 0.2;
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        quarter_stable && half_grows,
        format!(
            "mu=1/4: {:.4} -> {:.4}; mu=1/2: {:.4} -> {:.4} (needs >= 20% growth); \
             without the euclidean term: mu=1/4 {:.3} -> {:.3}, mu=1/2 {:.3} -> {:.3}; {secs:.1}s",
            q_small.c_h,
            q_full.c_h,
            h_small.c_h,
            h_full.c_h,
            q_small.c_pseudodistance_only,
            q_full.c_pseudodistance_only,
            h_small.c_pseudodistance_only,
            h_full.c_pseudodistance_only,
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("contact orders", contact_orders),
        ("tau scaling exponents", tau_slopes),
        ("extremal basis ordering", basis_ordering),
        ("pseudodistance power law", distance_power_law),
        ("property suite", property_suite),
        ("engulfing on power directions", engulfing_powers),
        ("support verification", support_verification),
        ("support lemma stability", lemma_stability),
        ("Hölder estimator", holder_sanity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!("{} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
