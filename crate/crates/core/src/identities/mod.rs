//! Registry of contiguous relations, q-derivative formulas and q-difference
//! equations for H6/H7, with a pole-avoiding sampler and an audit engine.
//!
//! Each identity is stored as two lists of [`TransformedSeries`]; its
//! residual at a point is `sum(lhs) - sum(rhs)`. Records keep the formula as
//! printed (the *literal* reading) next to any amended readings, and the
//! audit reports both.

mod audit;
mod registry;
mod sampler;

pub use audit::{audit_all, audit_records, AuditReport, IdentityEntry, ReadingSummary};
pub use registry::{find_record, registry};
pub use sampler::{sample_points, SampleSet, SampledPoint, SamplerConfig};

use std::fmt;

use crate::error::{QError, Result};
use crate::qcore::{ComplexValue, QContext};
use crate::series::{
    blackbox_q_partial, eval_series, eval_transformed, q_partial, termwise_q_partial, Axis, EvalPolicy, HornPoint,
    Scalars, SeriesKind, TransformedSeries,
};

/// Residuals at or above this relative size are a genuine failure.
pub const FAIL_THRESHOLD: f64 = 1e-3;

/// Which function an identity is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    H6,
    H7,
    /// Parameters given as exponents of q.
    H6Exp,
    H7Exp,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::H6 => "H6",
            Family::H7 => "H7",
            Family::H6Exp => "H6exp",
            Family::H7Exp => "H7exp",
        }
    }

    pub fn is_exp(&self) -> bool {
        matches!(self, Family::H6Exp | Family::H7Exp)
    }

    pub fn kind(&self) -> SeriesKind {
        match self {
            Family::H6 | Family::H6Exp => SeriesKind::H6,
            Family::H7 | Family::H7Exp => SeriesKind::H7,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A pole exclusion such as "beta != q": holds when `|expr| > margin`.
#[derive(Debug, Clone, Copy)]
pub struct Constraint {
    pub label: &'static str,
    pub expr: fn(&Scalars) -> ComplexValue,
}

impl Constraint {
    pub fn holds(&self, sc: &Scalars, margin: f64) -> bool {
        let v = (self.expr)(sc);
        v.re.is_finite() && v.im.is_finite() && v.norm() > margin
    }
}

/// An amended reading of a record, kept beside the literal one.
#[derive(Debug, Clone)]
pub struct Variant {
    pub rationale: &'static str,
    pub lhs: Vec<TransformedSeries>,
    pub rhs: Vec<TransformedSeries>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct IdentityRecord {
    pub id: String,
    pub eq_label: &'static str,
    pub family: Family,
    pub lhs: Vec<TransformedSeries>,
    pub rhs: Vec<TransformedSeries>,
    pub constraints: Vec<Constraint>,
    pub variants: Vec<Variant>,
}

/// Borrowed view of one reading (index 0 is the literal one).
#[derive(Debug, Clone, Copy)]
pub struct ReadingRef<'a> {
    pub index: usize,
    pub rationale: &'a str,
    pub lhs: &'a [TransformedSeries],
    pub rhs: &'a [TransformedSeries],
    pub constraints: &'a [Constraint],
}

impl ReadingRef<'_> {
    pub fn name(&self) -> String {
        reading_name(self.index)
    }

    pub fn series(&self) -> impl Iterator<Item = &TransformedSeries> {
        self.lhs.iter().chain(self.rhs.iter())
    }
}

pub fn reading_name(index: usize) -> String {
    if index == 0 {
        "literal".to_string()
    } else {
        format!("amended-{index}")
    }
}

impl IdentityRecord {
    pub fn n_readings(&self) -> usize {
        1 + self.variants.len()
    }

    pub fn reading(&self, index: usize) -> Option<ReadingRef<'_>> {
        if index == 0 {
            return Some(ReadingRef {
                index,
                rationale: "as printed",
                lhs: &self.lhs,
                rhs: &self.rhs,
                constraints: &self.constraints,
            });
        }
        self.variants.get(index - 1).map(|v| ReadingRef {
            index,
            rationale: v.rationale,
            lhs: &v.lhs,
            rhs: &v.rhs,
            constraints: &v.constraints,
        })
    }

    pub fn readings(&self) -> impl Iterator<Item = ReadingRef<'_>> {
        (0..self.n_readings()).filter_map(|i| self.reading(i))
    }

    /// Numeric sort key: "2.13" sorts after "2.9".
    pub fn sort_key(&self) -> (u32, u32) {
        eq_sort_key(self.eq_label)
    }
}

pub(crate) fn eq_sort_key(label: &str) -> (u32, u32) {
    let mut it = label.split('.').map(|p| p.parse::<u32>().unwrap_or(u32::MAX));
    (it.next().unwrap_or(u32::MAX), it.next().unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Verified,
    Failed,
    Inconclusive,
    /// The literal reading fails while an amended one verifies.
    DiscrepantLiteral,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Verified => "VERIFIED",
            Classification::Failed => "FAILED",
            Classification::Inconclusive => "INCONCLUSIVE",
            Classification::DiscrepantLiteral => "DISCREPANT-LITERAL",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one identity reading at one point.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: String,
    pub variant: String,
    pub point: SampledPoint,
    pub lhs_value: ComplexValue,
    pub rhs_value: ComplexValue,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// Cancellation guard: total magnitude of the summed pieces over the result.
    pub cond: f64,
    pub all_clean: bool,
    pub classification: Classification,
}

/// Deterministic point classification from residual, conditioning and truncation flags.
pub fn classify_point(rel_residual: f64, cond: f64, all_clean: bool, rel_tol: f64) -> Classification {
    if !all_clean || !rel_residual.is_finite() {
        Classification::Inconclusive
    } else if rel_residual <= 10.0 * rel_tol * cond {
        Classification::Verified
    } else if rel_residual >= FAIL_THRESHOLD {
        Classification::Failed
    } else {
        Classification::Inconclusive
    }
}

fn context_for(point: &SampledPoint, ctx: &QContext) -> Result<QContext> {
    if point.scalars.q == ctx.q() {
        Ok(*ctx)
    } else {
        ctx.rebase(point.scalars.q)
    }
}

/// Checks the literal reading of identity `id` at `point`.
pub fn check_identity(id: &str, point: &SampledPoint, ctx: &QContext, policy: &EvalPolicy) -> Result<Verdict> {
    check_reading(find_record(id)?, 0, point, ctx, policy)
}

/// Checks one reading of a record at `point`; constraint violations are domain errors.
pub fn check_reading(
    record: &IdentityRecord,
    index: usize,
    point: &SampledPoint,
    ctx: &QContext,
    policy: &EvalPolicy,
) -> Result<Verdict> {
    let reading = record
        .reading(index)
        .ok_or_else(|| QError::config(format!("{} has no reading {index}", record.id)))?;
    let ctx = context_for(point, ctx)?;
    let sc = &point.scalars;
    if let Some(c) = reading.constraints.iter().find(|c| !c.holds(sc, ctx.pole_margin)) {
        return Err(QError::domain(format!("{}: constraint {} violated at this point", record.id, c.label)));
    }
    let mut all_clean = true;
    let mut magnitude = 0.0;
    let mut side = |list: &[TransformedSeries]| -> Result<ComplexValue> {
        let mut acc = ComplexValue::new(0.0, 0.0);
        for ts in list {
            let r = eval_transformed(ts, sc, &ctx, policy)?;
            all_clean &= r.truncated_cleanly;
            magnitude += r.value.norm();
            acc += r.value;
        }
        Ok(acc)
    };
    let lhs = side(reading.lhs)?;
    let rhs = side(reading.rhs)?;
    Ok(build_verdict(record.id.clone(), reading.name(), *point, lhs, rhs, magnitude, all_clean, &ctx, policy))
}

#[allow(clippy::too_many_arguments)]
fn build_verdict(
    id: String,
    variant: String,
    point: SampledPoint,
    lhs: ComplexValue,
    rhs: ComplexValue,
    magnitude: f64,
    all_clean: bool,
    ctx: &QContext,
    policy: &EvalPolicy,
) -> Verdict {
    let abs_residual = (lhs - rhs).norm();
    let scale = lhs.norm().max(rhs.norm()).max(ctx.abs_tol);
    let rel_residual = abs_residual / scale;
    let cond = (magnitude / scale).max(1.0);
    Verdict {
        id,
        variant,
        point,
        lhs_value: lhs,
        rhs_value: rhs,
        abs_residual,
        rel_residual,
        cond,
        all_clean,
        classification: classify_point(rel_residual, cond, all_clean, policy.rel_tol),
    }
}

/// Kind and axis of the derivative formulas `E2.9`..`E2.12`.
pub fn derivative_target(id: &str) -> Result<(SeriesKind, Axis)> {
    match id {
        "E2.9" => Ok((SeriesKind::H7, Axis::X)),
        "E2.10" => Ok((SeriesKind::H7, Axis::Y)),
        "E2.11" => Ok((SeriesKind::H6, Axis::X)),
        "E2.12" => Ok((SeriesKind::H6, Axis::Y)),
        other => Err(QError::UnknownIdentity(format!("{other} is not one of the derivative formulas E2.9..E2.12"))),
    }
}

/// Compares a closed-form derivative of any order against iterated Jackson
/// quotients of the plain evaluator (termwise differentiation when the
/// differentiated argument is zero).
pub fn check_derivative_identity(
    id: &str,
    point: &HornPoint,
    ctx: &QContext,
    policy: &EvalPolicy,
    order: u32,
) -> Result<Verdict> {
    let (kind, axis) = derivative_target(id)?;
    point.validate()?;
    let closed = q_partial(kind, axis, point, ctx, policy, order)?;
    let z = match axis {
        Axis::X => point.x,
        Axis::Y => point.y,
    };
    let (oracle, cond, clean) = if z == ComplexValue::new(0.0, 0.0) {
        let t = termwise_q_partial(kind, axis, point, ctx, policy, order)?;
        (t.value, 1.0, t.truncated_cleanly)
    } else {
        let v = blackbox_q_partial(kind, axis, point, ctx, policy, order)?;
        let base = eval_series(kind, point, ctx, policy)?;
        let step = ((1.0 - ctx.q()) * z).norm();
        let scale = v.norm().max(closed.value.norm()).max(ctx.abs_tol);
        (v, (2.0 / step).powi(order as i32) * base.value.norm() / scale, base.truncated_cleanly)
    };
    let sampled = SampledPoint { scalars: Scalars::new(point, ctx.q(), ComplexValue::new(0.0, 0.0)), exponents: None };
    let mut v = build_verdict(
        id.to_string(),
        format!("order-{order}"),
        sampled,
        oracle,
        closed.value,
        closed.value.norm(),
        clean && closed.truncated_cleanly,
        ctx,
        policy,
    );
    v.cond = v.cond.max(cond);
    v.classification = classify_point(v.rel_residual, v.cond, v.all_clean, policy.rel_tol);
    Ok(v)
}
