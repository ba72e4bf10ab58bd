//! Classical (q = 1) Horn series and the q -> 1 limit check.

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::qcore::{ComplexValue, QContext, DEFAULT_POLE_MARGIN};

use super::{eval_series, EvalPolicy, ExpHornPoint, SeriesKind};

const ONE: ComplexValue = ComplexValue::new(1.0, 0.0);
const ZERO: ComplexValue = ComplexValue::new(0.0, 0.0);

/// Hard cap on anti-diagonals for the classical sum.
const CLASSICAL_MAX_DIAG: usize = 4000;

fn rising_factor(eta: ComplexValue, n: usize, name: &str) -> Result<ComplexValue> {
    let f = eta + n as f64;
    if f.norm() < 1e-12 {
        return Err(QError::domain(format!("{name} is a non-positive integer: the classical series has a pole")));
    }
    Ok(f)
}

/// `sum (a)_{2r+s} / [(b)_{r+s} r! s!] x^r y^s` (H6) or with `(b)_r (c)_s` (H7).
///
/// Requires `|x| < 1/4` and `|y| < 1`.
pub fn classical_horn_oracle(
    kind: SeriesKind,
    alpha: ComplexValue,
    beta: ComplexValue,
    gamma: ComplexValue,
    x: ComplexValue,
    y: ComplexValue,
    policy: &EvalPolicy,
) -> Result<ComplexValue> {
    policy.validate()?;
    if x.norm() >= 0.25 || y.norm() >= 1.0 {
        return Err(QError::domain("classical Horn series needs |x| < 1/4 and |y| < 1"));
    }
    let mut prev2: Vec<ComplexValue> = Vec::new();
    let mut prev1: Vec<ComplexValue> = Vec::new();
    let mut partial = ZERO;
    let mut run = 0usize;
    for d in 0..=CLASSICAL_MAX_DIAG {
        let mut cur = vec![ZERO; d / 2 + 1];
        let mut env = 0.0;
        for r in 0..=d / 2 {
            let s = d - 2 * r;
            let c = if s > 0 {
                let sp = s - 1;
                let den = match kind {
                    SeriesKind::H6 => rising_factor(beta, r + sp, "beta")?,
                    SeriesKind::H7 => rising_factor(gamma, sp, "gamma")?,
                };
                prev1[r] * (alpha + (2 * r + sp) as f64) * y / (den * (sp + 1) as f64)
            } else if r == 0 {
                ONE
            } else {
                let rp = r - 1;
                let den = rising_factor(beta, rp, "beta")?;
                prev2[rp] * (alpha + (2 * rp) as f64) * (alpha + (2 * rp + 1) as f64) * x / (den * (rp + 1) as f64)
            };
            cur[r] = c;
            env += c.norm();
            partial += c;
        }
        if !(partial.re.is_finite() && partial.im.is_finite()) {
            return Err(QError::overflow("classical Horn partial sum"));
        }
        prev2 = std::mem::replace(&mut prev1, cur);
        if env <= policy.rel_tol * partial.norm().max(f64::MIN_POSITIVE) {
            run += 1;
            if run >= policy.tail_block && d >= 8 {
                return Ok(partial);
            }
        } else {
            run = 0;
        }
    }
    log::warn!("classical Horn series did not settle within {CLASSICAL_MAX_DIAG} anti-diagonals");
    Ok(partial)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub q: f64,
    pub error: f64,
}

/// Distance between the exponent form at real `q` and the classical series.
///
/// The q-series carries an extra `(1-q)^{-s}` against the classical one, so
/// the exponent form is evaluated at `(x, (1-q) y)`. The pole margin shrinks
/// with `1-q` because `1 - q^b` itself does.
pub fn classical_limit_check(
    kind: SeriesKind,
    pt: &ExpHornPoint,
    q_sequence: &[f64],
    policy: &EvalPolicy,
) -> Result<Vec<LimitSample>> {
    if q_sequence.is_empty() {
        return Err(QError::config("q sequence is empty"));
    }
    for w in q_sequence.windows(2) {
        if w[1] <= w[0] {
            return Err(QError::config("q sequence must be strictly increasing"));
        }
    }
    if let Some(bad) = q_sequence.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
        return Err(QError::config(format!("q = {bad} is outside (0, 1)")));
    }
    let target = classical_horn_oracle(kind, pt.a_exp, pt.b_exp, pt.c_exp, pt.x, pt.y, policy)?;
    q_sequence
        .iter()
        .map(|&q| {
            let ctx = QContext::real(q)?.with_pole_margin(DEFAULT_POLE_MARGIN * (1.0 - q))?;
            let horn = pt.to_horn(ctx.q())?;
            let horn = horn.with_xy(horn.x, horn.y * (1.0 - q));
            let v = eval_series(kind, &horn, &ctx, policy)?.value;
            Ok(LimitSample { q, error: (v - target).norm() })
        })
        .collect()
}
