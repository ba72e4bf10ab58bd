//! Partial q-derivatives of H6 and H7.
//!
//! Three routes to the same quantity:
//! - [`q_partial`]: the closed form, a Pochhammer ratio times a parameter-shifted series
//! - [`termwise_q_partial`]: each term `x^m` replaced by `[m][m-1]..[m-k+1] x^(m-k)`;
//!   defined at `x = 0` as well
//! - [`blackbox_q_partial`]: iterated Jackson quotients of the plain evaluator

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::qcore::{ensure_finite, try_q_derivative_n, ComplexValue, QContext};

use super::kernel::{sum_series, Summand};
use super::{eval_series, BracketArg, EvalPolicy, EvalResult, HornPoint, ParamPower, SeriesKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

const ONE: ComplexValue = ComplexValue::new(1.0, 0.0);

fn summand<'a>(kind: SeriesKind, p: &HornPoint, shifts: [i32; 3], bracket: &'a [BracketArg], deriv: [u32; 2]) -> Summand<'a> {
    Summand {
        kind,
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        shifts,
        x: p.x,
        y: p.y,
        bracket,
        bases: [ONE; 5],
        deriv,
    }
}

fn check_order(order: u32) -> Result<i32> {
    if order == 0 || order > 64 {
        return Err(QError::config(format!("derivative order must lie in 1..=64, got {order}")));
    }
    Ok(order as i32)
}

/// Order-`order` partial q-derivative in closed form.
///
/// - x, H6 and H7: `(a;q)_{2k} / [(b;q)_k (1-q)^k] * H(a q^{2k}; b q^k, c)`
/// - y, H7: `(a;q)_k / [(c;q)_k (1-q)^k] * H7(a q^k; b, c q^k)`
/// - y, H6: `(a;q)_k / [(b;q)_k (1-q)^k] * H6(a q^k; b q^k)`
pub fn q_partial(
    kind: SeriesKind,
    axis: Axis,
    point: &HornPoint,
    ctx: &QContext,
    policy: &EvalPolicy,
    order: u32,
) -> Result<EvalResult> {
    let k = check_order(order)?;
    point.validate()?;
    policy.validate()?;
    let q = ctx.q();
    let (num_len, den_param, den_name, shifts) = match (axis, kind) {
        (Axis::X, _) => (2 * k, point.beta, "beta", [2 * k, k, 0]),
        (Axis::Y, SeriesKind::H7) => (k, point.gamma, "gamma", [k, 0, k]),
        (Axis::Y, SeriesKind::H6) => (k, point.beta, "beta", [k, k, 0]),
    };
    let mut pref = ONE;
    let mut qi = ONE;
    for i in 0..num_len {
        pref *= ONE - point.alpha * qi;
        if i < k {
            let f = ONE - den_param * qi;
            if f.norm() <= ctx.pole_margin {
                return Err(QError::domain(format!("{den_name} q^{i} is within pole_margin of 1")));
            }
            pref /= f * (ONE - q);
        }
        qi *= q;
    }
    let pref = ensure_finite(pref, "derivative prefactor")?;
    let res = sum_series(&summand(kind, point, shifts, &[], [0, 0]), ctx, policy)?;
    Ok(EvalResult {
        value: ensure_finite(pref * res.value, "q-partial derivative")?,
        terms_used: res.terms_used,
        tail_estimate: pref.norm() * res.tail_estimate,
        truncated_cleanly: res.truncated_cleanly,
    })
}

pub fn q_partial_x(kind: SeriesKind, point: &HornPoint, ctx: &QContext, policy: &EvalPolicy, order: u32) -> Result<EvalResult> {
    q_partial(kind, Axis::X, point, ctx, policy, order)
}

pub fn q_partial_y(kind: SeriesKind, point: &HornPoint, ctx: &QContext, policy: &EvalPolicy, order: u32) -> Result<EvalResult> {
    q_partial(kind, Axis::Y, point, ctx, policy, order)
}

/// Differentiates the series term by term; valid at `x = 0` / `y = 0`.
pub fn termwise_q_partial(
    kind: SeriesKind,
    axis: Axis,
    point: &HornPoint,
    ctx: &QContext,
    policy: &EvalPolicy,
    order: u32,
) -> Result<EvalResult> {
    let k = check_order(order)?;
    point.validate()?;
    policy.validate()?;
    let falling: Vec<BracketArg> = (0..k)
        .map(|j| match axis {
            Axis::X => BracketArg::linear(1, 0, -j, ParamPower::One),
            Axis::Y => BracketArg::linear(0, 1, -j, ParamPower::One),
        })
        .collect();
    let deriv = match axis {
        Axis::X => [order, 0],
        Axis::Y => [0, order],
    };
    sum_series(&summand(kind, point, [0, 0, 0], &falling, deriv), ctx, policy)
}

/// Iterated Jackson quotient of the plain evaluator along one argument.
/// Undefined when that argument is zero.
pub fn blackbox_q_partial(
    kind: SeriesKind,
    axis: Axis,
    point: &HornPoint,
    ctx: &QContext,
    policy: &EvalPolicy,
    order: u32,
) -> Result<ComplexValue> {
    check_order(order)?;
    let f = |z: ComplexValue| -> Result<ComplexValue> {
        let p = match axis {
            Axis::X => point.with_xy(z, point.y),
            Axis::Y => point.with_xy(point.x, z),
        };
        Ok(eval_series(kind, &p, ctx, policy)?.value)
    };
    let z = match axis {
        Axis::X => point.x,
        Axis::Y => point.y,
    };
    try_q_derivative_n(&f, z, order, ctx)
}
