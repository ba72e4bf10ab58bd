//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. The process exits non-zero when the set
//! of failing criteria differs from `EXPECTED_FAILURES`, so an unexpected
//! regression and an unexpected fix both show up.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64 as C;
use qhorn::identities::{derivative_target, find_record, registry, sample_points, check_reading, SamplerConfig};
use qhorn::qcore::*;
use qhorn::series::*;
use rand::Rng;
use serde_json::Value;

/// Criteria that cannot pass because the formulas themselves are wrong:
/// the origin clause of 5 meets identities that are false as printed.
const EXPECTED_FAILURES: &[u32] = &[5];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn one() -> C {
    C::new(1.0, 0.0)
}

fn ctx(q: C) -> QContext {
    QContext::with_q(q).unwrap()
}

fn pochhammer_suite() -> Outcome {
    let mut g = rng(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let eta = polar(&mut g, 0.0, 3.0);
        let q = polar(&mut g, 0.05, 0.95);
        let m = g.gen_range(1..=20usize);
        let k = g.gen_range(0..=20usize);
        let c = ctx(q);
        let p = |e: C, n: usize| q_pochhammer(e, &c, n).unwrap();
        let mut check = |a: C, b: C| worst = worst.max(if a == b { 0.0 } else { rel(a, b) });

        let full = p(eta, m);
        check(full, (one() - eta) * p(eta * q, m - 1));
        check(full, (one() - eta * q.powi(m as i32 - 1)) * p(eta, m - 1));
        if (one() - eta).norm() > DEFAULT_POLE_MARGIN {
            check(p(eta * q, m), (one() - eta * q.powi(m as i32)) / (one() - eta) * full);
        }
        let last = one() - eta * q.powi(m as i32 - 1);
        if last.norm() > DEFAULT_POLE_MARGIN {
            check(p(eta / q, m), (one() - eta / q) / last * full);
        }
        let joint = p(eta, m + k);
        check(joint, full * p(eta * q.powi(m as i32), k));
        check(joint, p(eta, k) * p(eta * q.powi(k as i32), m));
        check(q_factorial(m, &c).unwrap() * (one() - q).powi(m as i32), p(q, m));
    }
    outcome(worst <= 1e-12, format!("1000 tuples, worst rel error {worst:.2e} (limit 1e-12)"))
}

fn brute_force() -> Outcome {
    let mut g = rng(1002);
    let pol = EvalPolicy::default();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let q = polar(&mut g, 0.2, 0.8);
        let (a, b, gm) = (polar(&mut g, 0.1, 2.0), polar(&mut g, 0.1, 0.9), polar(&mut g, 0.1, 0.9));
        let (x, y) = (disk(&mut g, 0.3), disk(&mut g, 0.3));
        let c = ctx(q);
        let hp = HornPoint::new(a, b, gm, x, y).unwrap();
        let lq = q.ln();
        let e = ExpHornPoint::new(a.ln() / lq, b.ln() / lq, gm.ln() / lq, x, y);
        let back = e.to_horn(q).unwrap();
        let pairs = [
            (eval_h6(&hp, &c, &pol).unwrap().value, table_sum(false, a, b, gm, q, x, y, 60)),
            (eval_h7(&hp, &c, &pol).unwrap().value, table_sum(true, a, b, gm, q, x, y, 60)),
            (eval_h6_exp(&e, &c, &pol).unwrap().value, table_sum(false, back.alpha, back.beta, back.gamma, q, x, y, 60)),
            (eval_h7_exp(&e, &c, &pol).unwrap().value, table_sum(true, back.alpha, back.beta, back.gamma, q, x, y, 60)),
        ];
        for (got, want) in pairs {
            worst = worst.max(rel(got, want));
        }
    }
    outcome(worst <= 1e-12, format!("100 points x 4 series, worst rel error {worst:.2e} (limit 1e-12)"))
}

fn terminating() -> Outcome {
    let mut g = rng(1003);
    let pol = EvalPolicy::default();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let q = polar(&mut g, 0.2, 0.8);
        let (b, gm) = (polar(&mut g, 0.1, 0.9), polar(&mut g, 0.1, 0.9));
        let (x, y) = (disk(&mut g, 0.3), disk(&mut g, 0.3));
        for n in 1..=3 {
            let a = q.powi(-n);
            let hp = HornPoint::new(a, b, gm, x, y).unwrap();
            let c = ctx(q);
            worst = worst.max(rel(eval_h6(&hp, &c, &pol).unwrap().value, naive_finite_sum(false, a, b, gm, q, x, y, n as usize)));
            worst = worst.max(rel(eval_h7(&hp, &c, &pol).unwrap().value, naive_finite_sum(true, a, b, gm, q, x, y, n as usize)));
        }
    }
    let c = QContext::real(0.5).unwrap();
    let mut worked: f64 = 0.0;
    for i in 0..50 {
        let x = if i == 0 { C::new(0.0, 0.0) } else { disk(&mut g, 0.999) };
        let hp = HornPoint::new(C::new(2.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), x, C::new(0.25, 0.0)).unwrap();
        worked = worked.max(rel(eval_h6(&hp, &c, &pol).unwrap().value, C::new(0.5, 0.0)));
    }
    outcome(
        worst <= 1e-13 && worked <= 1e-13,
        format!("N=1..3 worst rel {worst:.2e}; H6(2;0;0.5,x,0.25)=0.5 over 50 x, worst rel {worked:.2e} (limit 1e-13)"),
    )
}

fn derivative_forms() -> Outcome {
    let mut g = rng(1004);
    let pol = EvalPolicy::default();
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    for _ in 0..100 {
        let q = polar(&mut g, 0.2, 0.8);
        let (a, b, gm) = (polar(&mut g, 0.1, 0.9), polar(&mut g, 0.1, 0.9), polar(&mut g, 0.1, 0.9));
        let (x, y) = (polar(&mut g, 0.1, 0.3), polar(&mut g, 0.1, 0.3));
        let c = ctx(q);
        let hp = HornPoint::new(a, b, gm, x, y).unwrap();
        for id in ["E2.9", "E2.10", "E2.11", "E2.12"] {
            let (kind, axis) = derivative_target(id).unwrap();
            let h7 = kind == SeriesKind::H7;
            let z = if axis == Axis::X { x } else { y };
            let samples: Vec<C> = (0..=3)
                .map(|j| {
                    let w = z * q.powi(j);
                    let (xx, yy) = if axis == Axis::X { (w, y) } else { (x, w) };
                    table_sum(h7, a, b, gm, q, xx, yy, 40)
                })
                .collect();
            for order in 1..=3u32 {
                let want = iterated_quotient(&samples[..=order as usize], q, z);
                let got = q_partial(kind, axis, &hp, &c, &pol, order).unwrap().value;
                let r = rel(got, want);
                if r > worst {
                    worst = r;
                    worst_at = format!("{id} order {order}");
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("100 points x 4 formulas x orders 1-3, worst rel {worst:.2e} at {worst_at} (limit 1e-8)"))
}

struct Audit {
    report: Value,
    bytes: Vec<u8>,
    elapsed: Duration,
}

fn run_audit(path: &std::path::Path) -> Audit {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qhorn"))
        .args(["audit", "--seed", "42", "--output", path.to_str().unwrap()])
        .output()
        .expect("qhorn binary runs");
    let elapsed = start.elapsed();
    assert!(matches!(out.status.code(), Some(0 | 1)), "audit crashed: {}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(path).unwrap();
    Audit { report: serde_json::from_slice(&bytes).unwrap(), bytes, elapsed }
}

fn entry<'a>(rep: &'a Value, id: &str) -> &'a Value {
    rep["identities"].as_array().unwrap().iter().find(|e| e["id"] == id).unwrap()
}

/// Registered ids `E2.lo` ..= `E2.hi`; some numbers in a range label no identity.
fn ids_in(lo: u32, hi: u32) -> Vec<String> {
    registry().iter().filter(|r| (lo..=hi).contains(&r.sort_key().1)).map(|r| r.id.clone()).collect()
}

fn spot_suite(rep: &Value) -> Outcome {
    let ids: Vec<String> = ids_in(21, 31).into_iter().chain(ids_in(50, 52)).collect();
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for id in &ids {
        let e = entry(rep, id);
        let m = e["max_rel_residual"].as_f64().unwrap_or(f64::INFINITY);
        worst = worst.max(m);
        if e["classification"] != "VERIFIED" || m >= 1e-9 || e["n_points"] != 25 {
            bad.push(id.clone());
        }
    }

    let q = QContext::real(0.5).unwrap();
    let mut origin_bad = Vec::new();
    let mut defined = 0;
    for rec in registry() {
        let e = entry(rep, &rec.id);
        let reading = e["readings"].as_array().unwrap().iter().position(|r| r["variant"] == e["variant"]).unwrap();
        let pts = sample_points(&SamplerConfig::default().with_n_points(3), rec, &q).unwrap();
        let mut worst_here: Option<f64> = None;
        for p in pts.points {
            let mut p = p;
            p.scalars.x = C::new(0.0, 0.0);
            p.scalars.y = C::new(0.0, 0.0);
            if let Ok(v) = check_reading(rec, reading, &p, &q, &EvalPolicy::default()) {
                worst_here = Some(worst_here.unwrap_or(0.0).max(v.abs_residual));
            }
        }
        if let Some(w) = worst_here {
            defined += 1;
            if w > 1e-14 {
                origin_bad.push(format!("{}={w:.2}", rec.id));
            }
        }
    }
    let ok = bad.is_empty() && origin_bad.is_empty();
    outcome(
        ok,
        format!(
            "spot suite {}/{} VERIFIED, worst rel {worst:.2e} (limit 1e-9){}; origin residual <= 1e-14 in {}/{} defined identities{}",
            ids.len() - bad.len(),
            ids.len(),
            if bad.is_empty() { String::new() } else { format!(" [failing: {}]", bad.join(" ")) },
            defined - origin_bad.len(),
            defined,
            if origin_bad.is_empty() { String::new() } else { format!(" [false at the origin as printed: {}]", origin_bad.join(" ")) },
        ),
    )
}

fn classical_limit() -> Outcome {
    let pol = EvalPolicy::default();
    let qs = [0.9, 0.99, 0.999, 0.9999];
    let mut parts = Vec::new();
    let mut ok = true;
    let cases = [(SeriesKind::H6, 1.0, 2.0, 0.0), (SeriesKind::H7, 1.0, 2.0, 3.0)];
    for (kind, a, b, gm) in cases {
        let h7 = kind == SeriesKind::H7;
        let (x, y) = (C::new(0.1, 0.0), C::new(0.2, 0.0));
        let target = classical_sum(h7, C::new(a, 0.0), C::new(b, 0.0), C::new(gm, 0.0), x, y, 60);
        let mut errs = Vec::new();
        for q in qs {
            // the q-series carries an extra (1-q)^-s, so y is scaled down to match
            let c = QContext::real(q).unwrap().with_pole_margin(DEFAULT_POLE_MARGIN * (1.0 - q)).unwrap();
            let e = ExpHornPoint::new(C::new(a, 0.0), C::new(b, 0.0), C::new(gm, 0.0), x, y * (1.0 - q));
            let v = eval_series(kind, &e.to_horn(c.q()).unwrap(), &c, &pol).unwrap().value;
            errs.push((v - target).norm());
        }
        let lib = classical_limit_check(kind, &ExpHornPoint::new(C::new(a, 0.0), C::new(b, 0.0), C::new(gm, 0.0), x, y), &qs, &pol)
            .unwrap();
        let agrees = lib.iter().zip(&errs).all(|(s, e)| (s.error - e).abs() <= 1e-12 + 1e-6 * e);
        let monotone = errs.windows(2).all(|w| w[1] <= 1.1 * w[0]);
        let last = *errs.last().unwrap();
        ok &= monotone && last < 1e-3 && agrees;
        parts.push(format!(
            "{kind:?} errors [{}]{}",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", "),
            if agrees { "" } else { " (library check disagrees)" }
        ));
    }
    outcome(ok, format!("{} (each <= 1.1x previous, last < 1e-3)", parts.join("; ")))
}

fn audit_completeness(a: &Audit, b: &Audit) -> Outcome {
    let ids = a.report["identities"].as_array().unwrap();
    let identical = a.bytes == b.bytes;
    let fast = a.elapsed.max(b.elapsed) < Duration::from_secs(60);
    let classified = ids.len() == 74 && ids.iter().all(|e| e["classification"].is_string());
    let mut missing = Vec::new();
    let mut failed_literal = 0;
    for e in ids {
        let readings = e["readings"].as_array().unwrap();
        if readings[0]["classification"] != "FAILED" {
            continue;
        }
        failed_literal += 1;
        let registered = find_record(e["id"].as_str().unwrap()).unwrap().n_readings();
        let w = &readings[0]["witness"];
        let complete = w["point"].is_object()
            && w["abs_residual"].is_number()
            && w["rel_residual"].is_number()
            && readings.len() == registered
            && readings.iter().all(|r| r["classification"].is_string() && r["witness"].is_object());
        if !complete {
            missing.push(e["id"].as_str().unwrap().to_string());
        }
    }
    outcome(
        identical && fast && classified && missing.is_empty(),
        format!(
            "{} identities classified, repeat run byte-identical: {identical}, slowest run {:.1}s (limit 60s), {failed_literal} failed literal readings all with witness and variant verdicts{}",
            ids.len(),
            a.elapsed.max(b.elapsed).as_secs_f64(),
            if missing.is_empty() { String::new() } else { format!(" [incomplete: {}]", missing.join(" ")) }
        ),
    )
}

fn bracket_operators(a: &Audit, b: &Audit) -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for id in ids_in(67, 71) {
        let e = entry(&a.report, &id);
        let m = e["max_rel_residual"].as_f64().unwrap_or(f64::INFINITY);
        worst = worst.max(m);
        if e["classification"] != "VERIFIED" || m >= 1e-9 {
            bad.push(id);
        }
    }
    let mut per_reading = Vec::new();
    let mut recorded = true;
    for id in ids_in(76, 88) {
        let (ea, eb) = (entry(&a.report, &id), entry(&b.report, &id));
        let readings = ea["readings"].as_array().unwrap();
        let squared = find_record(&id).unwrap().variants.iter().any(|v| v.rationale.contains("[r^2]_q"));
        recorded &= ea["readings"] == eb["readings"]
            && readings.iter().all(|r| r["n_points"] == 25 && r["classification"].is_string())
            && (!squared || readings.len() >= 2);
        let tags: Vec<&str> = readings.iter().map(|r| short(r["classification"].as_str().unwrap())).collect();
        per_reading.push(format!("{}:{}", &id[3..], tags.join("/")));
    }
    outcome(
        bad.is_empty() && recorded,
        format!(
            "E2.67-71 worst rel {worst:.2e} (limit 1e-9){}; E2.76-88 recorded per reading and stable across runs: {recorded} [{}]",
            if bad.is_empty() { String::new() } else { format!(" [not verified: {}]", bad.join(" ")) },
            per_reading.join(" ")
        ),
    )
}

fn short(c: &str) -> &str {
    match c {
        "VERIFIED" => "V",
        "FAILED" => "F",
        "INCONCLUSIVE" => "I",
        _ => "D",
    }
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_audit(&dir.path().join("first.json"));
    let second = run_audit(&dir.path().join("second.json"));

    let results = [
        (1, "q-Pochhammer identity suite", pochhammer_suite()),
        (2, "series brute-force equivalence", brute_force()),
        (3, "terminating exactness", terminating()),
        (4, "derivative closed forms", derivative_forms()),
        (5, "contiguous-relation spot suite", spot_suite(&first.report)),
        (6, "classical limit", classical_limit()),
        (7, "full audit determinism and completeness", audit_completeness(&first, &second)),
        (8, "bracket-operator identities", bracket_operators(&first, &second)),
    ];
    let mut failing = BTreeSet::new();
    for (n, label, o) in &results {
        verdict(o.ok, &format!("criterion {n} ({label})"), &o.detail);
        if !o.ok {
            failing.insert(*n);
        }
    }
    let expected: BTreeSet<u32> = EXPECTED_FAILURES.iter().copied().collect();
    let passed = results.len() - failing.len();
    println!("{passed}/{} criteria pass", results.len());
    if failing != expected {
        eprintln!("failing criteria {failing:?} differ from the expected set {expected:?}");
        std::process::exit(1);
    }
}
