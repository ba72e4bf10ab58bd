//! Anti-diagonal summation engine shared by every evaluator.

use crate::error::{QError, Result};
use crate::qcore::{q_pow_int, ComplexValue, QContext};

use super::{BracketArg, EvalPolicy, EvalResult, ParamPower, SeriesKind};

const ONE: ComplexValue = ComplexValue::new(1.0, 0.0);
const ZERO: ComplexValue = ComplexValue::new(0.0, 0.0);

/// How far `first_live_diagonal` looks for a non-vanishing bracket.
const LIVE_SCAN: i64 = 8;

/// Fully bound summand: base parameter values, integer shifts, scaled arguments.
pub(crate) struct Summand<'a> {
    pub kind: SeriesKind,
    pub alpha: ComplexValue,
    pub beta: ComplexValue,
    pub gamma: ComplexValue,
    /// `[a, b, c]`: parameters are `alpha q^a`, `beta q^b`, `gamma q^c`.
    pub shifts: [i32; 3],
    pub x: ComplexValue,
    pub y: ComplexValue,
    pub bracket: &'a [BracketArg],
    /// Values of `q^C` for `ParamPower::{One, Alpha, Beta, Gamma, Stray}`.
    pub bases: [ComplexValue; 5],
    /// Powers of `x` and `y` removed from each term (termwise derivatives).
    pub deriv: [u32; 2],
}

struct QPowers {
    q: ComplexValue,
    lo: i64,
    vals: Vec<ComplexValue>,
}

impl QPowers {
    fn new(q: ComplexValue, lo: i64, hi: i64) -> Self {
        let vals = (lo..=hi).map(|m| q_pow_int(q, m)).collect();
        Self { q, lo, vals }
    }

    fn get(&self, m: i64) -> ComplexValue {
        let i = m - self.lo;
        if i >= 0 && (i as usize) < self.vals.len() {
            self.vals[i as usize]
        } else {
            q_pow_int(self.q, m)
        }
    }
}

struct Stepper<'a> {
    sm: &'a Summand<'a>,
    qp: QPowers,
    margin: f64,
}

impl Stepper<'_> {
    fn param_factor(&self, eta: ComplexValue, k: i64, name: &str) -> Result<ComplexValue> {
        let f = ONE - eta * self.qp.get(k);
        if f.norm() <= self.margin {
            return Err(QError::domain(format!(
                "{name} q^{k} is within {} of 1: the series has a pole here",
                self.margin
            )));
        }
        Ok(f)
    }

    fn alpha_factor(&self, k: i64) -> ComplexValue {
        ONE - self.sm.alpha * self.qp.get(self.sm.shifts[0] as i64 + k)
    }

    /// `c_{r,s+1} / c_{r,s}`
    fn step_s(&self, r: i64, s: i64) -> Result<ComplexValue> {
        let num = self.alpha_factor(2 * r + s);
        let den = match self.sm.kind {
            SeriesKind::H6 => self.param_factor(self.sm.beta, self.sm.shifts[1] as i64 + r + s, "beta")?,
            SeriesKind::H7 => self.param_factor(self.sm.gamma, self.sm.shifts[2] as i64 + s, "gamma")?,
        };
        Ok(num / (den * (ONE - self.qp.get(s + 1))))
    }

    /// `c_{r+1,0} / c_{r,0}`
    fn step_r(&self, r: i64) -> Result<ComplexValue> {
        let num = self.alpha_factor(2 * r) * self.alpha_factor(2 * r + 1);
        let den = self.param_factor(self.sm.beta, self.sm.shifts[1] as i64 + r, "beta")?;
        Ok(num / (den * (ONE - self.qp.get(r + 1))))
    }

    fn bracket(&self, r: i64, s: i64) -> ComplexValue {
        let inv = ONE / (ONE - self.qp.q);
        let mut mu = ONE;
        for b in self.sm.bracket {
            let v = match *b {
                BracketArg::Linear { r_coef, s_coef, offset, base } => {
                    let e = r_coef as i64 * r + s_coef as i64 * s + offset as i64;
                    if base == ParamPower::One && e == 0 {
                        ZERO
                    } else {
                        (ONE - self.sm.bases[base_index(base)] * self.qp.get(e)) * inv
                    }
                }
                BracketArg::RSquared => (ONE - q_pow_int(self.qp.q, r * r)) * inv,
                BracketArg::SSquared => (ONE - q_pow_int(self.qp.q, s * s)) * inv,
            };
            mu *= v;
        }
        mu
    }
}

fn base_index(p: ParamPower) -> usize {
    match p {
        ParamPower::One => 0,
        ParamPower::Alpha => 1,
        ParamPower::Beta => 2,
        ParamPower::Gamma => 3,
        ParamPower::Stray => 4,
    }
}

/// First anti-diagonal on which the multiplier is not identically zero.
fn first_live_diagonal(sm: &Summand) -> usize {
    let (kx, ky) = (sm.deriv[0] as i64, sm.deriv[1] as i64);
    let mut best: Option<i64> = None;
    for r in kx..=kx + LIVE_SCAN {
        for s in ky..=ky + LIVE_SCAN {
            if sm.bracket.iter().all(|b| !b.structurally_zero(r, s)) {
                let d = 2 * r + s;
                best = Some(best.map_or(d, |b: i64| b.min(d)));
            }
        }
    }
    best.unwrap_or(0) as usize
}

fn grow_powers(p: &mut Vec<ComplexValue>, z: ComplexValue, n: usize) {
    while p.len() <= n {
        let next = p.last().map_or(ONE, |v| v * z);
        p.push(next);
    }
}

fn stepper<'a>(sm: &'a Summand<'a>, ctx: &QContext, d_limit: usize) -> Stepper<'a> {
    let lo = sm.shifts.iter().chain(sm.bracket_offsets().iter()).copied().min().unwrap_or(0).min(0) as i64 - 4;
    let hi = 2 * d_limit as i64 + 4 + sm.shifts.iter().copied().max().unwrap_or(0).max(0) as i64;
    Stepper { sm, qp: QPowers::new(ctx.q(), lo, hi), margin: ctx.pole_margin }
}

impl Summand<'_> {
    fn bracket_offsets(&self) -> Vec<i32> {
        self.bracket
            .iter()
            .filter_map(|b| match b {
                BracketArg::Linear { offset, .. } => Some(*offset),
                _ => None,
            })
            .collect()
    }
}

fn window_tail(env: &[f64], w: usize) -> (f64, bool) {
    let n = env.len();
    if n < 2 * w {
        return (env.last().copied().unwrap_or(0.0), false);
    }
    let last: f64 = env[n - w..].iter().sum();
    let prev: f64 = env[n - 2 * w..n - w].iter().sum();
    if last == 0.0 {
        return (0.0, true);
    }
    let rho = last / prev;
    if !rho.is_finite() || rho >= 1.0 {
        return (last, false);
    }
    (last * rho / (1.0 - rho), true)
}

/// Sums the bound series by anti-diagonals `d = 2r + s`.
///
/// Stops after `tail_block` consecutive diagonals whose absolute contribution
/// is below `rel_tol * max(|partial|, abs_tol)`, once at least `2W` live
/// diagonals (`W = 2 tail_block`) have been summed and the geometric tail
/// estimate is itself below tolerance. Diagonals before the first one on which
/// the multiplier can be non-zero are summed but neither count nor reset.
pub(crate) fn sum_series(sm: &Summand, ctx: &QContext, policy: &EvalPolicy) -> Result<EvalResult> {
    let d_limit = policy.max_s.min(2 * policy.max_r);
    let st = stepper(sm, ctx, d_limit);
    let d0 = first_live_diagonal(sm);
    let w = 2 * policy.tail_block;
    let (kx, ky) = (sm.deriv[0] as usize, sm.deriv[1] as usize);

    let mut xp = vec![ONE];
    let mut yp = vec![ONE];
    let mut prev2: Vec<ComplexValue> = Vec::new();
    let mut prev1: Vec<ComplexValue> = Vec::new();
    let mut live_env: Vec<f64> = Vec::new();
    let mut partial = ZERO;
    let mut terms_used = 0usize;
    let mut run = 0usize;

    for d in 0..=d_limit {
        let mut cur = vec![ZERO; d / 2 + 1];
        let mut env = 0.0;
        let mut dsum = ZERO;
        for r in 0..=d / 2 {
            let s = d - 2 * r;
            let c = if s > 0 {
                let prev = prev1[r];
                if prev == ZERO {
                    ZERO
                } else {
                    prev * st.step_s(r as i64, s as i64 - 1)?
                }
            } else if r == 0 {
                ONE
            } else {
                let prev = prev2[r - 1];
                if prev == ZERO {
                    ZERO
                } else {
                    prev * st.step_r(r as i64 - 1)?
                }
            };
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(QError::overflow(format!("series coefficient at (r, s) = ({r}, {s})")));
            }
            cur[r] = c;
            if r < kx || s < ky {
                continue;
            }
            terms_used += 1;
            if c == ZERO {
                continue;
            }
            grow_powers(&mut xp, sm.x, r - kx);
            grow_powers(&mut yp, sm.y, s - ky);
            let mu = if sm.bracket.is_empty() { ONE } else { st.bracket(r as i64, s as i64) };
            let t = mu * c * xp[r - kx] * yp[s - ky];
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(QError::overflow(format!("series term at (r, s) = ({r}, {s})")));
            }
            env += t.norm();
            dsum += t;
        }
        partial += dsum;
        prev2 = std::mem::replace(&mut prev1, cur);

        if d < d0 {
            continue;
        }
        live_env.push(env);
        let scale = partial.norm().max(ctx.abs_tol);
        if env <= policy.rel_tol * scale {
            run += 1;
        } else {
            run = 0;
        }
        if run >= policy.tail_block && live_env.len() >= 2 * w {
            let (tail, ok) = window_tail(&live_env, w);
            if ok && tail <= policy.rel_tol * scale {
                return Ok(EvalResult { value: partial, terms_used, tail_estimate: tail, truncated_cleanly: true });
            }
        }
    }

    let (tail, _) = window_tail(&live_env, w);
    log::warn!(
        "series truncated at anti-diagonal {d_limit} without meeting rel_tol {} (tail estimate {tail:e})",
        policy.rel_tol
    );
    Ok(EvalResult { value: partial, terms_used, tail_estimate: tail, truncated_cleanly: false })
}

/// `t_{r,s}` for the plain (unbracketed, unshifted-argument) summand.
pub(crate) fn single_term(sm: &Summand, ctx: &QContext, r: usize, s: usize) -> Result<ComplexValue> {
    let st = stepper(sm, ctx, r + s);
    let mut c = ONE;
    for i in 0..r {
        if c == ZERO {
            break;
        }
        c *= st.step_r(i as i64)?;
    }
    for j in 0..s {
        if c == ZERO {
            break;
        }
        c *= st.step_s(r as i64, j as i64)?;
    }
    let t = c * sm.x.powu(r as u32) * sm.y.powu(s as u32);
    if t.re.is_finite() && t.im.is_finite() {
        Ok(t)
    } else {
        Err(QError::overflow(format!("series term at (r, s) = ({r}, {s})")))
    }
}
