//! Truncated evaluation of the basic Horn double series.
//!
//! ```text
//! H6(a; b; q, x, y)    = sum_{r,s} (a;q)_{2r+s} / [(b;q)_{r+s} (q;q)_r (q;q)_s] x^r y^s
//! H7(a; b, c; q, x, y) = sum_{r,s} (a;q)_{2r+s} / [(b;q)_r (c;q)_s (q;q)_r (q;q)_s] x^r y^s
//! ```
//!
//! The exponent forms `HH6(q^a; q^b)` / `HH7(q^a; q^b, q^c)` are the same
//! series with parameters given as exponents; [`ExpHornPoint::to_horn`] maps
//! them onto a plain [`HornPoint`] and evaluation delegates.
//!
//! Every evaluator sums by anti-diagonals `d = 2r + s` and builds each
//! coefficient from a neighbour with a single-factor Pochhammer step, so a
//! terminating numerator `(q^-N; q)_{2r+s}` cuts the sum exactly at `d = N`.
//! [`TransformedSeries`] adds integer q-power parameter shifts, argument
//! scalings `x q^j`, `y q^k`, a scalar prefactor and a per-term bracket
//! multiplier; it is the building block for every identity in the registry.

mod classical;
mod derivative;
mod kernel;

pub use classical::{classical_horn_oracle, classical_limit_check, LimitSample};
pub use derivative::{blackbox_q_partial, q_partial, q_partial_x, q_partial_y, termwise_q_partial, Axis};

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::qcore::{ensure_finite, q_pow, ComplexValue, QContext};
use kernel::{sum_series, Summand};

/// Which double series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    H6,
    H7,
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeriesKind::H6 => f.write_str("H6"),
            SeriesKind::H7 => f.write_str("H7"),
        }
    }
}

/// Parameters and arguments of one evaluation. `gamma` is ignored by H6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HornPoint {
    pub alpha: ComplexValue,
    pub beta: ComplexValue,
    pub gamma: ComplexValue,
    pub x: ComplexValue,
    pub y: ComplexValue,
}

impl HornPoint {
    /// Builds a point inside the validity domain `|x| < 1`, `|y| < 1`.
    pub fn new(
        alpha: ComplexValue,
        beta: ComplexValue,
        gamma: ComplexValue,
        x: ComplexValue,
        y: ComplexValue,
    ) -> Result<Self> {
        let p = Self { alpha, beta, gamma, x, y };
        p.validate()?;
        Ok(p)
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, x: f64, y: f64) -> Result<Self> {
        let c = |v| ComplexValue::new(v, 0.0);
        Self::new(c(alpha), c(beta), c(gamma), c(x), c(y))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("x", self.x),
            ("y", self.y),
        ] {
            ensure_finite(v, name).map_err(|_| QError::domain(format!("{name} is not finite")))?;
        }
        check_argument("x", self.x)?;
        check_argument("y", self.y)
    }

    pub fn with_xy(mut self, x: ComplexValue, y: ComplexValue) -> Self {
        self.x = x;
        self.y = y;
        self
    }
}

fn check_argument(name: &str, v: ComplexValue) -> Result<()> {
    if v.norm() < 1.0 {
        Ok(())
    } else {
        Err(QError::domain(format!("|{name}| = {} lies outside the validity domain |{name}| < 1", v.norm())))
    }
}

/// A point for the exponent forms: the series parameters are `q^a_exp`, `q^b_exp`, `q^c_exp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpHornPoint {
    pub a_exp: ComplexValue,
    pub b_exp: ComplexValue,
    pub c_exp: ComplexValue,
    pub x: ComplexValue,
    pub y: ComplexValue,
}

impl ExpHornPoint {
    pub fn new(
        a_exp: ComplexValue,
        b_exp: ComplexValue,
        c_exp: ComplexValue,
        x: ComplexValue,
        y: ComplexValue,
    ) -> Self {
        Self { a_exp, b_exp, c_exp, x, y }
    }

    /// Exponentiates on the principal branch.
    pub fn to_horn(&self, q: ComplexValue) -> Result<HornPoint> {
        HornPoint::new(q_pow(q, self.a_exp), q_pow(q, self.b_exp), q_pow(q, self.c_exp), self.x, self.y)
    }
}

/// Truncation controls for the anti-diagonal summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPolicy {
    pub max_r: usize,
    pub max_s: usize,
    pub rel_tol: f64,
    /// Consecutive negligible anti-diagonals required before stopping.
    pub tail_block: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self { max_r: 200, max_s: 200, rel_tol: 1e-12, tail_block: 3 }
    }
}

impl EvalPolicy {
    pub fn new(max_r: usize, max_s: usize, rel_tol: f64, tail_block: usize) -> Result<Self> {
        let p = Self { max_r, max_s, rel_tol, tail_block };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_r < 1 || self.max_s < 1 {
            return Err(QError::config("max_r and max_s must be at least 1"));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(QError::config(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.tail_block < 1 {
            return Err(QError::config("tail_block must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one truncated summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: ComplexValue,
    pub terms_used: usize,
    /// Geometric estimate of the neglected tail, in the same units as `value`.
    pub tail_estimate: f64,
    pub truncated_cleanly: bool,
}

/// Evaluation scalars visible to prefactors and bracket multipliers.
///
/// `alpha`, `beta`, `gamma` are parameter *values* (for the exponent forms
/// these are `q^a`, `q^b`, `q^c`). `stray` is the value given to symbols that
/// a printed formula uses without defining.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalars {
    pub q: ComplexValue,
    pub alpha: ComplexValue,
    pub beta: ComplexValue,
    pub gamma: ComplexValue,
    pub stray: ComplexValue,
    pub x: ComplexValue,
    pub y: ComplexValue,
}

impl Scalars {
    pub fn new(point: &HornPoint, q: ComplexValue, stray: ComplexValue) -> Self {
        Self {
            q,
            alpha: point.alpha,
            beta: point.beta,
            gamma: point.gamma,
            stray,
            x: point.x,
            y: point.y,
        }
    }

    pub fn point(&self) -> HornPoint {
        HornPoint { alpha: self.alpha, beta: self.beta, gamma: self.gamma, x: self.x, y: self.y }
    }
}

/// Scalar prefactor of a transformed series.
pub type Prefactor = fn(&Scalars) -> ComplexValue;

/// The `C` in a bracket `[i r + j s + offset + C]_q`, given through `q^C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamPower {
    /// `C = 0`
    One,
    /// `q^C` is the alpha value.
    Alpha,
    Beta,
    Gamma,
    Stray,
}

/// One factor of a per-term multiplier `mu(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BracketArg {
    /// `[r_coef r + s_coef s + offset + C]_q`
    Linear { r_coef: i32, s_coef: i32, offset: i32, base: ParamPower },
    /// `[r^2]_q`
    RSquared,
    /// `[s^2]_q`
    SSquared,
}

impl BracketArg {
    pub const R: BracketArg = BracketArg::Linear { r_coef: 1, s_coef: 0, offset: 0, base: ParamPower::One };
    pub const S: BracketArg = BracketArg::Linear { r_coef: 0, s_coef: 1, offset: 0, base: ParamPower::One };

    pub fn linear(r_coef: i32, s_coef: i32, offset: i32, base: ParamPower) -> Self {
        BracketArg::Linear { r_coef, s_coef, offset, base }
    }

    /// Exactly zero for this `(r, s)` whatever the parameters (`[0]_q`).
    pub(crate) fn structurally_zero(&self, r: i64, s: i64) -> bool {
        match *self {
            BracketArg::Linear { r_coef, s_coef, offset, base: ParamPower::One } => {
                r_coef as i64 * r + s_coef as i64 * s + offset as i64 == 0
            }
            BracketArg::Linear { .. } => false,
            BracketArg::RSquared => r == 0,
            BracketArg::SSquared => s == 0,
        }
    }
}

/// Which value fills the beta slot of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamSlot {
    Beta,
    /// The point's stray scalar (a printed symbol with no definition).
    Stray,
}

/// One summand of an identity side:
/// `coeff * prefactor(scalars) * sum mu(r,s) t_{r,s}(alpha q^a, beta q^b, gamma q^c) (x q^j)^r (y q^k)^s`.
#[derive(Debug, Clone)]
pub struct TransformedSeries {
    pub kind: SeriesKind,
    pub alpha_shift: i32,
    pub beta_shift: i32,
    pub gamma_shift: i32,
    pub beta_slot: ParamSlot,
    pub x_scale_pow: i32,
    pub y_scale_pow: i32,
    pub coeff: ComplexValue,
    pub prefactor: Option<Prefactor>,
    pub bracket: Vec<BracketArg>,
}

impl TransformedSeries {
    pub fn plain(kind: SeriesKind) -> Self {
        Self {
            kind,
            alpha_shift: 0,
            beta_shift: 0,
            gamma_shift: 0,
            beta_slot: ParamSlot::Beta,
            x_scale_pow: 0,
            y_scale_pow: 0,
            coeff: ComplexValue::new(1.0, 0.0),
            prefactor: None,
            bracket: Vec::new(),
        }
    }

    pub fn h6() -> Self {
        Self::plain(SeriesKind::H6)
    }

    pub fn h7() -> Self {
        Self::plain(SeriesKind::H7)
    }

    /// Parameter shifts `alpha -> alpha q^a`, `beta -> beta q^b`, `gamma -> gamma q^c`.
    pub fn shift(mut self, a: i32, b: i32, c: i32) -> Self {
        self.alpha_shift = a;
        self.beta_shift = b;
        self.gamma_shift = c;
        self
    }

    /// Argument scalings `x -> x q^j`, `y -> y q^k`.
    pub fn args(mut self, j: i32, k: i32) -> Self {
        self.x_scale_pow = j;
        self.y_scale_pow = k;
        self
    }

    pub fn pre(mut self, f: Prefactor) -> Self {
        self.prefactor = Some(f);
        self
    }

    pub fn times(mut self, factors: &[BracketArg]) -> Self {
        self.bracket.extend_from_slice(factors);
        self
    }

    pub fn scaled(mut self, c: ComplexValue) -> Self {
        self.coeff *= c;
        self
    }

    pub fn beta_from(mut self, slot: ParamSlot) -> Self {
        self.beta_slot = slot;
        self
    }

    pub fn max_abs_offset(&self) -> i32 {
        [self.alpha_shift, self.beta_shift, self.gamma_shift, self.x_scale_pow, self.y_scale_pow]
            .into_iter()
            .map(i32::abs)
            .max()
            .unwrap_or(0)
    }

    /// Denominator parameter values (after shifts) that must avoid `{1, q^-1, q^-2, ...}`.
    pub fn denominator_params(&self, sc: &Scalars) -> Vec<ComplexValue> {
        let beta = match self.beta_slot {
            ParamSlot::Beta => sc.beta,
            ParamSlot::Stray => sc.stray,
        };
        let b = beta * crate::qcore::q_pow_int(sc.q, self.beta_shift as i64);
        match self.kind {
            SeriesKind::H6 => vec![b],
            SeriesKind::H7 => vec![b, sc.gamma * crate::qcore::q_pow_int(sc.q, self.gamma_shift as i64)],
        }
    }

    pub fn prefactor_value(&self, sc: &Scalars) -> Result<ComplexValue> {
        let p = self.coeff * self.prefactor.map_or(ComplexValue::new(1.0, 0.0), |f| f(sc));
        ensure_finite(p, "series prefactor").map_err(|_| QError::domain("series prefactor is not finite"))
    }
}

fn bracket_bases(sc: &Scalars) -> [ComplexValue; 5] {
    [ComplexValue::new(1.0, 0.0), sc.alpha, sc.beta, sc.gamma, sc.stray]
}

fn plain_summand(kind: SeriesKind, p: &HornPoint) -> Summand<'static> {
    Summand {
        kind,
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        shifts: [0, 0, 0],
        x: p.x,
        y: p.y,
        bracket: &[],
        bases: [ComplexValue::new(1.0, 0.0); 5],
        deriv: [0, 0],
    }
}

/// Evaluates H6 or H7 at `point`.
pub fn eval_series(kind: SeriesKind, point: &HornPoint, ctx: &QContext, policy: &EvalPolicy) -> Result<EvalResult> {
    point.validate()?;
    policy.validate()?;
    sum_series(&plain_summand(kind, point), ctx, policy)
}

pub fn eval_h6(point: &HornPoint, ctx: &QContext, policy: &EvalPolicy) -> Result<EvalResult> {
    eval_series(SeriesKind::H6, point, ctx, policy)
}

pub fn eval_h7(point: &HornPoint, ctx: &QContext, policy: &EvalPolicy) -> Result<EvalResult> {
    eval_series(SeriesKind::H7, point, ctx, policy)
}

pub fn eval_h6_exp(pt: &ExpHornPoint, ctx: &QContext, policy: &EvalPolicy) -> Result<EvalResult> {
    eval_h6(&pt.to_horn(ctx.q())?, ctx, policy)
}

pub fn eval_h7_exp(pt: &ExpHornPoint, ctx: &QContext, policy: &EvalPolicy) -> Result<EvalResult> {
    eval_h7(&pt.to_horn(ctx.q())?, ctx, policy)
}

/// Evaluates one transformed series at the given scalars.
pub fn eval_transformed(
    ts: &TransformedSeries,
    sc: &Scalars,
    ctx: &QContext,
    policy: &EvalPolicy,
) -> Result<EvalResult> {
    policy.validate()?;
    if sc.q != ctx.q() {
        return Err(QError::config("scalars were bound to a different base q than the context"));
    }
    sc.point().validate()?;
    let pref = ts.prefactor_value(sc)?;
    let beta = match ts.beta_slot {
        ParamSlot::Beta => sc.beta,
        ParamSlot::Stray => sc.stray,
    };
    let q = ctx.q();
    let summand = Summand {
        kind: ts.kind,
        alpha: sc.alpha,
        beta,
        gamma: sc.gamma,
        shifts: [ts.alpha_shift, ts.beta_shift, ts.gamma_shift],
        x: sc.x * crate::qcore::q_pow_int(q, ts.x_scale_pow as i64),
        y: sc.y * crate::qcore::q_pow_int(q, ts.y_scale_pow as i64),
        bracket: &ts.bracket,
        bases: bracket_bases(sc),
        deriv: [0, 0],
    };
    check_argument("x q^j", summand.x)?;
    check_argument("y q^k", summand.y)?;
    let res = sum_series(&summand, ctx, policy)?;
    Ok(EvalResult {
        value: ensure_finite(pref * res.value, "transformed series")?,
        terms_used: res.terms_used,
        tail_estimate: pref.norm() * res.tail_estimate,
        truncated_cleanly: res.truncated_cleanly,
    })
}

/// Single term `t_{r,s}` of H6 or H7, built by the same neighbour recurrences as the evaluator.
pub fn term(kind: SeriesKind, point: &HornPoint, ctx: &QContext, r: usize, s: usize) -> Result<ComplexValue> {
    kernel::single_term(&plain_summand(kind, point), ctx, r, s)
}

pub fn term_h6(point: &HornPoint, ctx: &QContext, r: usize, s: usize) -> Result<ComplexValue> {
    term(SeriesKind::H6, point, ctx, r, s)
}

pub fn term_h7(point: &HornPoint, ctx: &QContext, r: usize, s: usize) -> Result<ComplexValue> {
    term(SeriesKind::H7, point, ctx, r, s)
}
