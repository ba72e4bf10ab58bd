//! Scalar q-calculus primitives.
//!
//! Everything here works on [`ComplexValue`] (a `Complex64`) relative to a
//! base `q` carried by [`QContext`]:
//!
//! - [`q_pochhammer`]: the q-shifted factorial `(eta; q)_n`
//! - [`q_number`]: the q-bracket `[eta]_q = (1 - q^eta) / (1 - q)`
//! - [`q_factorial`]: `[m]_q! = [1]_q [2]_q ... [m]_q`
//! - [`q_derivative`] / [`theta`]: the Jackson difference operator and `z D_z`
//!
//! For non-integer exponents `q^eta` is taken on the principal branch,
//! `exp(eta * Log q)`. Integer exponents go through repeated squaring so the
//! integer case matches the plain product exactly up to rounding.

use num_complex::Complex64;
use crate::error::{QError, Result};

pub type ComplexValue = Complex64;

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-14;
pub const DEFAULT_POLE_MARGIN: f64 = 1e-3;

/// The base `q` together with the tolerances every numeric check uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: ComplexValue,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Minimum allowed modulus of any denominator factor `1 - eta q^k`.
    pub pole_margin: f64,
}

impl QContext {
    pub fn new(q: ComplexValue, rel_tol: f64, abs_tol: f64, pole_margin: f64) -> Result<Self> {
        let modulus = q.norm();
        if !modulus.is_finite() || modulus <= 0.0 || modulus >= 1.0 {
            return Err(QError::config(format!(
                "base q must satisfy 0 < |q| < 1, got |q| = {modulus}"
            )));
        }
        for (name, v) in [("rel_tol", rel_tol), ("abs_tol", abs_tol), ("pole_margin", pole_margin)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QError::config(format!("{name} must be a positive finite number, got {v}")));
            }
        }
        Ok(Self { q, rel_tol, abs_tol, pole_margin })
    }

    /// Context with default tolerances.
    pub fn with_q(q: ComplexValue) -> Result<Self> {
        Self::new(q, DEFAULT_REL_TOL, DEFAULT_ABS_TOL, DEFAULT_POLE_MARGIN)
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::with_q(ComplexValue::new(q, 0.0))
    }

    pub fn q(&self) -> ComplexValue {
        self.q
    }

    /// Same tolerances, different base.
    pub fn rebase(&self, q: ComplexValue) -> Result<Self> {
        Self::new(q, self.rel_tol, self.abs_tol, self.pole_margin)
    }

    pub fn with_pole_margin(mut self, margin: f64) -> Result<Self> {
        if !(margin.is_finite() && margin > 0.0) {
            return Err(QError::config(format!("pole_margin must be positive, got {margin}")));
        }
        self.pole_margin = margin;
        Ok(self)
    }
}

pub(crate) fn ensure_finite(v: ComplexValue, what: &str) -> Result<ComplexValue> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(QError::overflow(format!("{what} is not finite")))
    }
}

/// `q^n` for an integer exponent.
pub fn q_pow_int(q: ComplexValue, n: i64) -> ComplexValue {
    match i32::try_from(n) {
        Ok(k) => q.powi(k),
        Err(_) => (q.ln() * n as f64).exp(),
    }
}

/// `q^eta` on the principal branch; integral real exponents use [`q_pow_int`].
pub fn q_pow(q: ComplexValue, eta: ComplexValue) -> ComplexValue {
    if eta.im == 0.0 && eta.re.fract() == 0.0 && eta.re.abs() < i32::MAX as f64 {
        q.powi(eta.re as i32)
    } else {
        (eta * q.ln()).exp()
    }
}

/// `(eta; q)_n`, accumulated factor by factor in index order.
pub fn q_pochhammer(eta: ComplexValue, ctx: &QContext, n: usize) -> Result<ComplexValue> {
    let q = ctx.q();
    let mut acc = ComplexValue::new(1.0, 0.0);
    let mut qk = ComplexValue::new(1.0, 0.0);
    for _ in 0..n {
        acc *= ComplexValue::new(1.0, 0.0) - eta * qk;
        qk *= q;
        ensure_finite(acc, "q-Pochhammer product")?;
    }
    Ok(acc)
}

/// `[eta]_q = (1 - q^eta) / (1 - q)`.
pub fn q_number(eta: ComplexValue, ctx: &QContext) -> ComplexValue {
    let q = ctx.q();
    (ComplexValue::new(1.0, 0.0) - q_pow(q, eta)) / (ComplexValue::new(1.0, 0.0) - q)
}

/// `[m]_q!`.
pub fn q_factorial(m: usize, ctx: &QContext) -> Result<ComplexValue> {
    let mut acc = ComplexValue::new(1.0, 0.0);
    for r in 1..=m {
        acc *= q_number(ComplexValue::new(r as f64, 0.0), ctx);
        ensure_finite(acc, "q-factorial")?;
    }
    Ok(acc)
}

/// Jackson q-derivative of a fallible black-box function at `z != 0`.
pub fn try_q_derivative<F>(f: F, z: ComplexValue, ctx: &QContext) -> Result<ComplexValue>
where
    F: Fn(ComplexValue) -> Result<ComplexValue>,
{
    if z == ComplexValue::new(0.0, 0.0) {
        return Err(QError::domain(
            "black-box q-derivative is undefined at z = 0; use the series-aware derivative",
        ));
    }
    let q = ctx.q();
    let num = f(z)? - f(q * z)?;
    ensure_finite(num / ((ComplexValue::new(1.0, 0.0) - q) * z), "q-derivative")
}

/// `D_{z,q} f(z) = (f(z) - f(qz)) / ((1 - q) z)` for `z != 0`.
pub fn q_derivative<F>(f: F, z: ComplexValue, ctx: &QContext) -> Result<ComplexValue>
where
    F: Fn(ComplexValue) -> ComplexValue,
{
    try_q_derivative(|w| Ok(f(w)), z, ctx)
}

/// Iterated black-box q-derivative `D^order f(z)`.
pub fn try_q_derivative_n<F>(f: &F, z: ComplexValue, order: u32, ctx: &QContext) -> Result<ComplexValue>
where
    F: Fn(ComplexValue) -> Result<ComplexValue>,
{
    match order {
        0 => f(z),
        _ => try_q_derivative(|w| try_q_derivative_n(f, w, order - 1, ctx), z, ctx),
    }
}

/// `theta_{z,q} f(z) = z D_{z,q} f(z) = (f(z) - f(qz)) / (1 - q)`; zero at the origin.
pub fn theta<F>(f: F, z: ComplexValue, ctx: &QContext) -> ComplexValue
where
    F: Fn(ComplexValue) -> ComplexValue,
{
    if z == ComplexValue::new(0.0, 0.0) {
        return ComplexValue::new(0.0, 0.0);
    }
    let q = ctx.q();
    (f(z) - f(q * z)) / (ComplexValue::new(1.0, 0.0) - q)
}
