//! JSON, CSV and text rendering of verdicts and audit reports.

use serde_json::{json, Value};

use crate::identities::{AuditReport, IdentityEntry, ReadingSummary, SampledPoint, Verdict};
use crate::qcore::ComplexValue;
use crate::series::{EvalPolicy, EvalResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub const CSV_HEADER: &str = "id,eq,family,variant,n_points,max_rel_residual,classification";

pub fn complex_json(c: ComplexValue) -> Value {
    json!({ "re": c.re, "im": c.im })
}

fn opt_f64(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

pub fn point_json(p: &SampledPoint) -> Value {
    let sc = &p.scalars;
    let mut v = json!({
        "q": complex_json(sc.q),
        "alpha": complex_json(sc.alpha),
        "beta": complex_json(sc.beta),
        "gamma": complex_json(sc.gamma),
        "p": complex_json(sc.stray),
        "x": complex_json(sc.x),
        "y": complex_json(sc.y),
    });
    if let Some([a, b, c]) = p.exponents {
        v["exponents"] = json!({ "a": complex_json(a), "b": complex_json(b), "c": complex_json(c) });
    }
    v
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "id": v.id,
        "variant": v.variant,
        "point": point_json(&v.point),
        "lhs_value": complex_json(v.lhs_value),
        "rhs_value": complex_json(v.rhs_value),
        "abs_residual": v.abs_residual,
        "rel_residual": v.rel_residual,
        "cond": v.cond,
        "all_clean": v.all_clean,
        "classification": v.classification.as_str(),
    })
}

pub fn eval_result_json(r: &EvalResult) -> Value {
    json!({
        "value": complex_json(r.value),
        "terms_used": r.terms_used,
        "tail_estimate": r.tail_estimate,
        "truncated_cleanly": r.truncated_cleanly,
    })
}

pub fn policy_json(p: &EvalPolicy) -> Value {
    json!({ "max_r": p.max_r, "max_s": p.max_s, "rel_tol": p.rel_tol, "tail_block": p.tail_block })
}

fn reading_json(r: &ReadingSummary) -> Value {
    json!({
        "variant": r.variant,
        "rationale": r.rationale,
        "n_points": r.n_points,
        "max_rel_residual": opt_f64(r.max_rel_residual),
        "classification": r.classification.as_str(),
        "counts": { "verified": r.verified, "failed": r.failed, "inconclusive": r.inconclusive },
        "errors": r.errors,
        "witness": r.witness.as_ref().map_or(Value::Null, verdict_json),
    })
}

fn entry_json(e: &IdentityEntry) -> Value {
    let h = e.headline_reading();
    json!({
        "id": e.id,
        "eq": e.eq,
        "family": e.family.as_str(),
        "variant": h.variant,
        "n_points": h.n_points,
        "max_rel_residual": opt_f64(h.max_rel_residual),
        "classification": e.classification.as_str(),
        "witness": h.witness.as_ref().map_or(Value::Null, verdict_json),
        "rejected": e.rejected,
        "readings": e.readings.iter().map(reading_json).collect::<Vec<_>>(),
    })
}

pub fn report_json(r: &AuditReport) -> Value {
    let s = &r.sampler;
    json!({
        "seed": r.seed,
        "q": complex_json(r.q),
        "policy": policy_json(&r.policy),
        "sampler": {
            "n_points": s.n_points,
            "x_y_radius": s.x_y_radius,
            "param_annulus": [s.param_annulus.0, s.param_annulus.1],
            "q_range": s.q_range.map_or(Value::Null, |(a, b)| json!([a, b])),
            "q_complex_phase": s.q_complex_phase,
            "margin": s.margin,
            "terminating": s.terminating,
        },
        "identities": r.identities.iter().map(entry_json).collect::<Vec<_>>(),
    })
}

fn sci(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:e}"))
}

fn csv(r: &AuditReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in &r.identities {
        let h = e.headline_reading();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.id,
            e.eq,
            e.family,
            h.variant,
            h.n_points,
            sci(h.max_rel_residual),
            e.classification
        ));
    }
    out
}

fn text(r: &AuditReport) -> String {
    let mut rows: Vec<[String; 6]> = vec![[
        "ID".into(),
        "FAMILY".into(),
        "READING".into(),
        "POINTS".into(),
        "MAX_REL".into(),
        "CLASSIFICATION".into(),
    ]];
    for e in &r.identities {
        for (i, rd) in e.readings.iter().enumerate() {
            let (id, class) = if i == 0 {
                (e.id.clone(), e.classification.to_string())
            } else {
                (String::new(), format!("({})", rd.classification))
            };
            let fam = if i == 0 { e.family.to_string() } else { String::new() };
            let max = rd.max_rel_residual.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"));
            rows.push([id, fam, rd.variant.clone(), rd.n_points.to_string(), max, class]);
        }
    }
    let mut widths = [0usize; 6];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let q = r.q;
    let mut out = format!("audit seed={} q={}{:+}i rel_tol={:e}\n", r.seed, q.re, q.im, r.policy.rel_tol);
    for row in &rows {
        let line: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Renders an audit report. JSON keys come out sorted.
pub fn render_report(r: &AuditReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report_json(r)).expect("report values are always serializable");
            s.push('\n');
            s
        }
        Format::Csv => csv(r),
        Format::Text => text(r),
    }
}
