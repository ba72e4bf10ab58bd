//! The 74 identity records.
//!
//! Notation inside this file: `a`, `b`, `c` in `shift(a, b, c)` are q-power
//! offsets of alpha, beta, gamma; `args(j, k)` rescales `x -> x q^j`,
//! `y -> y q^k`; `times(..)` attaches a per-term bracket multiplier
//! (`R` = `[r]_q`, `S` = `[s]_q`). For the exponent families the scalars
//! `alpha`, `beta`, `gamma` hold `q^alpha`, `q^beta`, `q^gamma`.

use std::sync::OnceLock;

use crate::error::{QError, Result};
use crate::qcore::ComplexValue;
use crate::series::{BracketArg, ParamPower, ParamSlot, Scalars, SeriesKind, TransformedSeries};

use super::{Constraint, Family, IdentityRecord, Variant};

type C = ComplexValue;
type Ts = TransformedSeries;

const H6: SeriesKind = SeriesKind::H6;
const H7: SeriesKind = SeriesKind::H7;
const R: BracketArg = BracketArg::R;
const S: BracketArg = BracketArg::S;
/// `[2r + s]_q`
const L21: BracketArg = BracketArg::Linear { r_coef: 2, s_coef: 1, offset: 0, base: ParamPower::One };
/// `[r + s]_q`
const L11: BracketArg = BracketArg::Linear { r_coef: 1, s_coef: 1, offset: 0, base: ParamPower::One };

fn h(kind: SeriesKind) -> Ts {
    Ts::plain(kind)
}

fn ne(label: &'static str, expr: fn(&Scalars) -> C) -> Constraint {
    Constraint { label, expr }
}

fn beta_ne_1() -> Constraint {
    ne("beta != 1", |s| 1.0 - s.beta)
}

fn gamma_ne_1() -> Constraint {
    ne("gamma != 1", |s| 1.0 - s.gamma)
}

fn beta_q_ne_1() -> Constraint {
    ne("beta q != 1", |s| 1.0 - s.beta * s.q)
}

fn gamma_q_ne_1() -> Constraint {
    ne("gamma q != 1", |s| 1.0 - s.gamma * s.q)
}

fn beta_ne_q() -> Constraint {
    ne("beta != q", |s| s.beta - s.q)
}

fn gamma_ne_q() -> Constraint {
    ne("gamma != q", |s| s.gamma - s.q)
}

/// `[alpha]_q` for the exponent families.
fn qa(s: &Scalars) -> C {
    (1.0 - s.alpha) / (1.0 - s.q)
}

fn rec(eq: &'static str, family: Family, lhs: Vec<Ts>, rhs: Vec<Ts>, constraints: Vec<Constraint>) -> IdentityRecord {
    IdentityRecord { id: format!("E{eq}"), eq_label: eq, family, lhs, rhs, constraints, variants: Vec::new() }
}

impl IdentityRecord {
    fn variant(mut self, rationale: &'static str, lhs: Vec<Ts>, rhs: Vec<Ts>, constraints: Vec<Constraint>) -> Self {
        self.variants.push(Variant { rationale, lhs, rhs, constraints });
        self
    }
}

/// How the second-order token `[theta^2]_q` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Square {
    /// `([r]_q)^2`
    Outer,
    /// `[r^2]_q`
    Inner,
}

fn sq_r(sq: Square) -> &'static [BracketArg] {
    match sq {
        Square::Outer => &[R, R],
        Square::Inner => &[BracketArg::RSquared],
    }
}

fn sq_s(sq: Square) -> &'static [BracketArg] {
    match sq {
        Square::Outer => &[S, S],
        Square::Inner => &[BracketArg::SSquared],
    }
}

const INNER_SQUARE: &str = "[theta^2]_q read as [r^2]_q instead of ([r]_q)^2";

/// All records, ordered by equation number.
pub fn registry() -> &'static [IdentityRecord] {
    static REG: OnceLock<Vec<IdentityRecord>> = OnceLock::new();
    REG.get_or_init(build)
}

pub fn find_record(id: &str) -> Result<&'static IdentityRecord> {
    let key = id.trim();
    registry()
        .iter()
        .find(|r| r.id == key || r.eq_label == key)
        .ok_or_else(|| QError::UnknownIdentity(id.to_string()))
}

fn build() -> Vec<IdentityRecord> {
    let mut v = Vec::with_capacity(74);
    v.extend(numerator_alpha());
    v.extend(derivatives());
    v.extend(theta_alpha());
    v.extend(denominator_down());
    v.extend(denominator_down_split());
    v.extend(theta_denominator());
    v.extend(joint_shift_h6());
    v.extend(joint_shift_h7());
    v.extend(denominator_up());
    v.extend(alpha_difference());
    v.extend(parameter_difference());
    v.extend(exp_derivatives());
    v.extend(exp_brackets());
    v.extend(exp_alpha_shift());
    v.extend(exp_second_order());
    v.extend(exp_pde());
    v.sort_by_key(|r| r.sort_key());
    v
}

fn numerator_alpha() -> Vec<IdentityRecord> {
    let e2_1 = || {
        vec![
            h(H6),
            h(H6).shift(2, 1, 0).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
            h(H6).shift(2, 1, 0).args(1, 0).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
            h(H6).shift(1, 1, 0).args(2, 0).pre(|s| s.alpha * s.y / (1.0 - s.beta)),
        ]
    };
    let e2_6 = |slot: ParamSlot| {
        vec![
            h(H7),
            h(H7).shift(1, 0, 1).beta_from(slot).pre(|s| s.alpha * s.y / (1.0 - s.gamma)),
            h(H7).shift(2, 1, 0).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
            h(H7).shift(2, 1, 0).args(0, 1).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
        ]
    };
    vec![
        rec("2.1", Family::H6, vec![h(H6).shift(1, 0, 0)], e2_1(), vec![beta_ne_1()]).variant(
            "missing 'q,' separator restored in the last term; the series is unchanged",
            vec![h(H6).shift(1, 0, 0)],
            e2_1(),
            vec![beta_ne_1()],
        ),
        rec(
            "2.2",
            Family::H6,
            vec![h(H6).shift(1, 0, 0)],
            vec![
                h(H6),
                h(H6).shift(1, 1, 0).pre(|s| s.alpha * s.y / (1.0 - s.beta)),
                h(H6).shift(2, 1, 0).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
                h(H6).shift(2, 1, 0).args(0, 1).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
            ],
            vec![beta_ne_1()],
        ),
        rec(
            "2.5",
            Family::H7,
            vec![h(H7).shift(1, 0, 0)],
            vec![
                h(H7),
                h(H7).shift(2, 1, 0).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
                h(H7).shift(1, 0, 1).args(2, 0).pre(|s| s.alpha * s.y / (1.0 - s.gamma)),
                h(H7).shift(2, 1, 0).args(1, 0).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
            ],
            vec![beta_ne_1(), gamma_ne_1()],
        ),
        rec("2.6", Family::H7, vec![h(H7).shift(1, 0, 0)], e2_6(ParamSlot::Stray), vec![beta_ne_1(), gamma_ne_1()])
            .variant(
                "undefined 'b' in the second term read as beta",
                vec![h(H7).shift(1, 0, 0)],
                e2_6(ParamSlot::Beta),
                vec![beta_ne_1(), gamma_ne_1()],
            ),
    ]
}

/// Order-one derivative formulas, multiplied through by x (or y): `theta H = x D H`.
fn derivatives() -> Vec<IdentityRecord> {
    vec![
        rec(
            "2.9",
            Family::H7,
            vec![h(H7).times(&[R])],
            vec![h(H7)
                .shift(2, 1, 0)
                .pre(|s| s.x * (1.0 - s.alpha) * (1.0 - s.alpha * s.q) / ((1.0 - s.beta) * (1.0 - s.q)))],
            vec![beta_ne_1()],
        ),
        rec(
            "2.10",
            Family::H7,
            vec![h(H7).times(&[S])],
            vec![h(H7).shift(1, 0, 1).pre(|s| s.y * (1.0 - s.alpha) / ((1.0 - s.gamma) * (1.0 - s.q)))],
            vec![gamma_ne_1()],
        ),
        rec(
            "2.11",
            Family::H6,
            vec![h(H6).times(&[R])],
            vec![h(H6)
                .shift(2, 1, 0)
                .pre(|s| s.x * (1.0 - s.alpha) * (1.0 - s.alpha * s.q) / ((1.0 - s.beta) * (1.0 - s.q)))],
            vec![beta_ne_1()],
        ),
        rec(
            "2.12",
            Family::H6,
            vec![h(H6).times(&[S])],
            vec![h(H6).shift(1, 1, 0).pre(|s| s.y * (1.0 - s.alpha) / ((1.0 - s.beta) * (1.0 - s.q)))],
            vec![beta_ne_1()],
        ),
    ]
}

fn theta_alpha() -> Vec<IdentityRecord> {
    let a = |s: &Scalars| s.alpha;
    let c0 = |s: &Scalars| (1.0 - s.alpha) / (1.0 - s.q);
    let aq = |s: &Scalars| s.alpha / s.q;
    let cq = |s: &Scalars| (1.0 - s.alpha / s.q) / (1.0 - s.q);
    // theta_x H + const H + theta_x H(xq) + theta_y H(xq^2) = const H(alpha q)
    let x_first = |k: SeriesKind| {
        vec![h(k).times(&[R]).pre(a), h(k).pre(c0), h(k).args(1, 0).times(&[R]).pre(a), h(k).args(2, 0).times(&[S]).pre(a)]
    };
    let y_first = |k: SeriesKind| {
        vec![h(k).times(&[S]).pre(a), h(k).pre(c0), h(k).args(0, 1).times(&[R]).pre(a), h(k).args(1, 1).times(&[R]).pre(a)]
    };
    let up = |k: SeriesKind| vec![h(k).shift(1, 0, 0).pre(c0)];
    let down = |k: SeriesKind| vec![h(k).pre(cq)];
    let dn = |k: SeriesKind| h(k).shift(-1, 0, 0);
    let e2_15_lit = || {
        vec![
            dn(H6).times(&[R]).pre(aq),
            dn(H6).pre(cq),
            dn(H6).args(1, 1).times(&[S]).pre(aq),
            dn(H6).args(1, 0).times(&[S]).pre(aq),
        ]
    };
    let e2_15_mirror = || {
        vec![
            dn(H6).times(&[R]).pre(aq),
            dn(H6).pre(cq),
            dn(H6).args(1, 0).times(&[R]).pre(aq),
            dn(H6).args(2, 0).times(&[S]).pre(aq),
        ]
    };
    let y_first_down = |k: SeriesKind| {
        vec![
            dn(k).times(&[S]).pre(aq),
            dn(k).pre(cq),
            dn(k).args(1, 1).times(&[R]).pre(aq),
            dn(k).args(0, 1).times(&[R]).pre(aq),
        ]
    };
    vec![
        rec("2.13", Family::H6, x_first(H6), up(H6), vec![]),
        rec("2.14", Family::H6, y_first(H6), up(H6), vec![]),
        rec("2.15", Family::H6, e2_15_lit(), down(H6), vec![]).variant(
            "second and third terms read as the alpha -> alpha/q image of the x-first relation",
            e2_15_mirror(),
            down(H6),
            vec![],
        ),
        rec("2.16", Family::H6, y_first_down(H6), down(H6), vec![]),
        rec("2.17", Family::H7, x_first(H7), up(H7), vec![]),
        rec("2.18", Family::H7, y_first(H7), up(H7), vec![]),
        rec(
            "2.19",
            Family::H7,
            vec![
                dn(H7).times(&[R]).pre(aq),
                dn(H7).pre(cq),
                dn(H7).args(1, 0).times(&[S]).pre(aq),
                dn(H7).args(1, 1).times(&[S]).pre(aq),
            ],
            down(H7),
            vec![],
        ),
        rec(
            "2.20",
            Family::H7,
            vec![
                dn(H7).times(&[S]).pre(aq),
                dn(H7).pre(cq),
                dn(H7).args(0, 1).times(&[R]).pre(aq),
                dn(H7).args(1, 1).times(&[R]).pre(aq),
            ],
            down(H7),
            vec![],
        ),
    ]
}

fn denominator_down() -> Vec<IdentityRecord> {
    let bx = |s: &Scalars| s.beta * s.x * (1.0 - s.alpha) * (1.0 - s.alpha * s.q) / ((s.q - s.beta) * (1.0 - s.beta));
    let by = |s: &Scalars| s.beta * s.y * (1.0 - s.alpha) / ((s.q - s.beta) * (1.0 - s.beta));
    let bcons = || vec![beta_ne_1(), beta_ne_q()];
    vec![
        rec(
            "2.21",
            Family::H6,
            vec![h(H6).shift(0, -1, 0)],
            vec![h(H6), h(H6).shift(2, 1, 0).pre(bx), h(H6).shift(1, 1, 0).args(1, 0).pre(by)],
            bcons(),
        ),
        rec(
            "2.22",
            Family::H6,
            vec![h(H6).shift(0, -1, 0)],
            vec![h(H6), h(H6).shift(1, 1, 0).pre(by), h(H6).shift(2, 1, 0).args(0, 1).pre(bx)],
            bcons(),
        ),
        rec("2.25", Family::H7, vec![h(H7).shift(0, -1, 0)], vec![h(H7), h(H7).shift(2, 1, 0).pre(bx)], bcons()),
        rec(
            "2.26",
            Family::H7,
            vec![h(H7).shift(0, 0, -1)],
            vec![
                h(H7),
                h(H7).shift(1, 0, 1).pre(|s| s.gamma * s.y * (1.0 - s.alpha) / ((s.q - s.gamma) * (1.0 - s.gamma))),
            ],
            vec![gamma_ne_1(), gamma_ne_q()],
        ),
    ]
}

fn denominator_down_split() -> Vec<IdentityRecord> {
    let bp = |s: &Scalars| s.beta / (s.beta - s.q);
    let qp = |s: &Scalars| -s.q / (s.beta - s.q);
    let beta_ne_p = || ne("beta != p", |s| s.beta - s.stray);
    let e2_29 = || vec![h(H6).args(1, 1).pre(bp), h(H6).pre(qp)];
    let e2_30 = || vec![h(H7).args(1, 0).pre(bp), h(H7).pre(qp)];
    const P_AS_Q: &str = "undefined 'p' in the side condition read as q";
    vec![
        rec("2.29", Family::H6, vec![h(H6).shift(0, -1, 0)], e2_29(), vec![beta_ne_p(), beta_ne_q()]).variant(
            P_AS_Q,
            vec![h(H6).shift(0, -1, 0)],
            e2_29(),
            vec![beta_ne_q()],
        ),
        rec("2.30", Family::H7, vec![h(H7).shift(0, -1, 0)], e2_30(), vec![beta_ne_p(), beta_ne_q()]).variant(
            P_AS_Q,
            vec![h(H7).shift(0, -1, 0)],
            e2_30(),
            vec![beta_ne_q()],
        ),
        rec(
            "2.31",
            Family::H7,
            vec![h(H7).shift(0, 0, -1)],
            vec![h(H7).args(0, 1).pre(|s| s.gamma / (s.gamma - s.q)), h(H7).pre(|s| -s.q / (s.gamma - s.q))],
            vec![gamma_ne_q()],
        ),
    ]
}

fn theta_denominator() -> Vec<IdentityRecord> {
    let bq = |s: &Scalars| s.beta / s.q;
    let cb = |s: &Scalars| (1.0 - s.beta / s.q) / (1.0 - s.q);
    let gq = |s: &Scalars| s.gamma / s.q;
    let cg = |s: &Scalars| (1.0 - s.gamma / s.q) / (1.0 - s.q);
    vec![
        rec(
            "2.35",
            Family::H6,
            vec![h(H6).times(&[R]).pre(bq), h(H6).pre(cb), h(H6).args(1, 0).times(&[S]).pre(bq)],
            vec![h(H6).shift(0, -1, 0).pre(cb)],
            vec![beta_ne_q()],
        ),
        rec(
            "2.36",
            Family::H6,
            vec![h(H6).times(&[S]).pre(bq), h(H6).pre(cb), h(H6).args(0, 1).times(&[R]).pre(bq)],
            vec![h(H6).shift(0, -1, 0).pre(cb)],
            vec![beta_ne_q()],
        ),
        rec(
            "2.37",
            Family::H7,
            vec![h(H7).times(&[R]).pre(bq), h(H7).pre(cb)],
            vec![h(H7).shift(0, -1, 0).pre(cb)],
            vec![beta_ne_q()],
        ),
        rec(
            "2.38",
            Family::H7,
            vec![h(H7).times(&[S]).pre(gq), h(H7).pre(cg)],
            vec![h(H7).shift(0, 0, -1).pre(cg)],
            vec![gamma_ne_q()],
        ),
    ]
}

/// `(1 - beta)(1 - beta q)`
fn dbb(s: &Scalars) -> C {
    (1.0 - s.beta) * (1.0 - s.beta * s.q)
}

fn joint_shift_h6() -> Vec<IdentityRecord> {
    let lhs = || vec![h(H6).shift(1, 1, 0)];
    let cons = || vec![beta_ne_1(), beta_q_ne_1()];
    let tail = |s: &Scalars| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta * s.q);
    vec![
        rec(
            "2.39",
            Family::H6,
            lhs(),
            vec![
                h(H6),
                h(H6).shift(2, 2, 0).pre(|s| (s.alpha - s.beta) * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H6).shift(1, 2, 0).args(1, 0).pre(|s| (s.alpha - s.beta) * s.y / dbb(s)),
                h(H6).shift(2, 2, 0).args(1, 1).pre(tail),
            ],
            cons(),
        ),
        rec(
            "2.40",
            Family::H6,
            lhs(),
            vec![
                h(H6),
                h(H6).shift(1, 2, 0).pre(|s| s.alpha * s.y / dbb(s)),
                h(H6).shift(2, 2, 0).args(1, 1).pre(tail),
                h(H6).shift(2, 2, 0).args(0, 1).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H6).shift(2, 2, 0).pre(|s| -s.beta * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H6).shift(1, 2, 0).args(1, 0).pre(|s| -s.beta * s.y / dbb(s)),
            ],
            cons(),
        ),
        rec(
            "2.41",
            Family::H6,
            lhs(),
            vec![
                h(H6),
                h(H6).shift(2, 2, 0).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H6).shift(1, 2, 0).args(1, 0).pre(|s| s.alpha * s.y / dbb(s)),
                h(H6).shift(2, 2, 0).args(1, 1).pre(tail),
                h(H6).shift(1, 2, 0).pre(|s| -s.beta * s.y / dbb(s)),
                h(H6).shift(2, 2, 0).args(0, 1).pre(|s| -s.beta * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
            ],
            cons(),
        ),
        rec(
            "2.42",
            Family::H6,
            lhs(),
            vec![
                h(H6),
                h(H6).shift(1, 2, 0).pre(|s| (s.alpha - s.beta) * s.y / dbb(s)),
                h(H6).shift(2, 2, 0).args(0, 1).pre(|s| (s.alpha - s.beta) * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H6).shift(2, 2, 0).args(1, 1).pre(tail),
            ],
            cons(),
        ),
    ]
}

fn joint_shift_h7() -> Vec<IdentityRecord> {
    let lhs_b = || vec![h(H7).shift(1, 1, 0)];
    let e2_45 = || {
        vec![
            h(H7),
            h(H7).shift(1, 1, 1).pre(|s| s.alpha * s.y / ((1.0 - s.beta) * (1.0 - s.gamma))),
            h(H7).shift(2, 2, 0).args(0, 1).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
            h(H7).shift(2, 2, 0).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / dbb(s)),
            h(H7).shift(2, 2, 0).pre(|s| -s.beta * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
            h(H7).shift(2, 2, 0).args(1, 0).pre(|s| -s.alpha * s.beta * s.x * s.q * (1.0 - s.alpha * s.q) / dbb(s)),
            h(H7).shift(1, 1, 1).args(2, 0).pre(|s| -s.alpha * s.beta * s.y / ((1.0 - s.beta) * (1.0 - s.gamma))),
        ]
    };
    vec![
        rec(
            "2.43",
            Family::H7,
            lhs_b(),
            vec![
                h(H7),
                h(H7).shift(2, 2, 0).pre(|s| (s.alpha - s.beta) * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H7).shift(1, 1, 1).args(1, 0).pre(|s| s.alpha * s.y / ((1.0 - s.beta) * (1.0 - s.gamma))),
                h(H7).shift(2, 2, 0).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H7).shift(2, 2, 0).args(1, 0).pre(|s| -s.alpha * s.beta * s.x * s.q * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H7).shift(1, 1, 1).args(2, 0).pre(|s| -s.alpha * s.beta / ((1.0 - s.beta) * (1.0 - s.gamma))),
            ],
            vec![beta_ne_1(), gamma_ne_1(), beta_q_ne_1()],
        ),
        rec(
            "2.44",
            Family::H7,
            lhs_b(),
            vec![
                h(H7),
                h(H7).shift(2, 2, 0).pre(|s| (s.alpha - s.beta) * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H7).shift(1, 1, 1).args(1, 0).pre(|s| s.alpha * s.y / (1.0 - s.gamma)),
                h(H7).shift(2, 2, 0).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta * s.q)),
            ],
            vec![beta_ne_1(), gamma_ne_1(), beta_q_ne_1()],
        ),
        rec("2.45", Family::H7, lhs_b(), e2_45(), vec![beta_ne_1(), gamma_ne_1(), gamma_q_ne_1(), beta_q_ne_1()]),
        rec(
            "2.46",
            Family::H7,
            lhs_b(),
            vec![
                h(H7),
                h(H7).shift(1, 1, 1).pre(|s| s.alpha * s.y / ((1.0 - s.beta) * (1.0 - s.gamma))),
                h(H7).shift(2, 2, 0).args(0, 1).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H7).shift(2, 2, 0).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta * s.q)),
                h(H7).shift(2, 2, 0).pre(|s| -s.beta * s.x * (1.0 - s.alpha * s.q) / dbb(s)),
                h(H7).shift(1, 1, 1).args(1, 0).pre(|s| -s.alpha * s.beta * s.y / ((1.0 - s.beta) * (1.0 - s.gamma))),
            ],
            vec![beta_ne_1(), gamma_ne_1(), gamma_q_ne_1(), beta_q_ne_1()],
        ),
        rec("2.47", Family::H7, lhs_b(), e2_45(), vec![beta_ne_1(), gamma_ne_1(), beta_q_ne_1()]),
        rec(
            "2.48",
            Family::H7,
            vec![h(H7).shift(1, 0, 1)],
            vec![
                h(H7),
                h(H7).shift(2, 1, 1).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / ((1.0 - s.beta) * (1.0 - s.gamma))),
                h(H7).shift(1, 0, 2).args(1, 0).pre(|s| s.alpha * s.y / ((1.0 - s.gamma) * (1.0 - s.gamma * s.q))),
                h(H7).shift(2, 1, 1).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
                h(H7).shift(1, 0, 2).pre(|s| -s.beta * s.y / ((1.0 - s.gamma) * (1.0 - s.gamma * s.q))),
                h(H7).shift(2, 1, 1).args(0, 1).pre(|s| {
                    -s.alpha * s.gamma * s.x * (1.0 - s.alpha * s.q) / ((1.0 - s.beta) * (1.0 - s.gamma))
                }),
            ],
            vec![beta_ne_1(), gamma_ne_1(), gamma_q_ne_1()],
        ),
        rec(
            "2.49",
            Family::H7,
            vec![h(H7).shift(1, 0, 1)],
            vec![
                h(H7),
                h(H7).shift(1, 0, 2).pre(|s| (s.alpha - s.gamma) * s.y / ((1.0 - s.gamma) * (1.0 - s.gamma * s.q))),
                h(H7).shift(2, 1, 1).args(0, 1).pre(|s| s.alpha * s.x * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
                h(H7).shift(2, 1, 1).args(1, 1).pre(|s| s.alpha * s.x * s.q * (1.0 - s.alpha * s.q) / (1.0 - s.beta)),
            ],
            vec![beta_ne_1(), gamma_ne_1(), gamma_q_ne_1()],
        ),
    ]
}

fn denominator_up() -> Vec<IdentityRecord> {
    let b = |s: &Scalars| s.beta / (1.0 - s.beta);
    let nb = |s: &Scalars| -s.beta / (1.0 - s.beta);
    let g = |s: &Scalars| s.gamma / (1.0 - s.gamma);
    let ng = |s: &Scalars| -s.gamma / (1.0 - s.gamma);
    vec![
        rec(
            "2.50",
            Family::H6,
            vec![h(H6).shift(0, 1, 0)],
            vec![h(H6), h(H6).shift(0, 1, 0).args(1, 1).pre(b), h(H6).shift(0, 1, 0).pre(nb)],
            vec![beta_ne_1()],
        ),
        rec(
            "2.51",
            Family::H7,
            vec![h(H7).shift(0, 1, 0)],
            vec![h(H7), h(H7).shift(0, 1, 0).args(1, 0).pre(b), h(H7).shift(0, 1, 0).pre(nb)],
            vec![beta_ne_1()],
        ),
        rec(
            "2.52",
            Family::H7,
            vec![h(H7).shift(0, 0, 1)],
            vec![h(H7), h(H7).shift(0, 0, 1).args(0, 1).pre(g), h(H7).shift(0, 0, 1).pre(ng)],
            vec![gamma_ne_1()],
        ),
    ]
}

/// `D_alpha H = (H(alpha) - H(alpha q)) / ((1 - q) alpha)`
fn d_alpha(k: SeriesKind) -> Vec<Ts> {
    vec![
        h(k).pre(|s| 1.0 / ((1.0 - s.q) * s.alpha)),
        h(k).shift(1, 0, 0).pre(|s| -1.0 / ((1.0 - s.q) * s.alpha)),
    ]
}

fn alpha_difference() -> Vec<IdentityRecord> {
    let m = |s: &Scalars| -1.0 / (1.0 - s.alpha);
    let mq = |s: &Scalars| -s.q / (1.0 - s.alpha);
    let cons = || vec![ne("alpha != 0", |s| s.alpha), ne("alpha != 1", |s| 1.0 - s.alpha)];
    let x_first = |k: SeriesKind| {
        vec![h(k).times(&[R]).pre(m), h(k).args(1, 0).times(&[R]).pre(mq), h(k).args(2, 0).times(&[S]).pre(m)]
    };
    let y_first = |k: SeriesKind, last: SeriesKind| {
        vec![h(k).times(&[S]).pre(m), h(k).args(0, 1).times(&[R]).pre(m), h(last).args(1, 1).times(&[R]).pre(mq)]
    };
    vec![
        rec("2.53", Family::H6, d_alpha(H6), x_first(H6), cons()),
        rec("2.54", Family::H6, d_alpha(H6), y_first(H6, H6), cons()),
        rec("2.55", Family::H7, d_alpha(H7), x_first(H7), cons()),
        rec("2.56", Family::H7, d_alpha(H7), y_first(H7, H6), cons()).variant(
            "last term's H6 token read as H7",
            d_alpha(H7),
            y_first(H7, H7),
            cons(),
        ),
    ]
}

fn parameter_difference() -> Vec<IdentityRecord> {
    let d_beta = |k: SeriesKind| {
        vec![
            h(k).pre(|s| 1.0 / ((1.0 - s.q) * s.beta)),
            h(k).shift(0, 1, 0).pre(|s| -1.0 / ((1.0 - s.q) * s.beta)),
        ]
    };
    let ib = |s: &Scalars| 1.0 / (1.0 - s.beta);
    let bcons = || vec![beta_ne_1(), ne("beta != 0", |s| s.beta)];
    vec![
        rec(
            "2.57",
            Family::H6,
            d_beta(H6),
            vec![h(H6).shift(0, 1, 0).times(&[R]).pre(ib), h(H6).shift(0, 1, 0).args(1, 0).times(&[S]).pre(ib)],
            bcons(),
        ),
        rec(
            "2.58",
            Family::H6,
            d_beta(H6),
            vec![h(H6).shift(0, 1, 0).times(&[S]).pre(ib), h(H6).shift(0, 1, 0).args(0, 1).times(&[R]).pre(ib)],
            bcons(),
        ),
        rec("2.59", Family::H7, d_beta(H7), vec![h(H7).shift(0, 1, 0).times(&[R]).pre(ib)], bcons()),
        rec(
            "2.60",
            Family::H7,
            vec![
                h(H7).pre(|s| 1.0 / ((1.0 - s.q) * s.gamma)),
                h(H7).shift(0, 0, 1).pre(|s| -1.0 / ((1.0 - s.q) * s.gamma)),
            ],
            vec![h(H7).shift(0, 0, 1).times(&[R]).pre(|s| 1.0 / (1.0 - s.gamma))],
            vec![gamma_ne_1(), ne("gamma != 0", |s| s.gamma)],
        ),
    ]
}

fn qb_ne_1() -> Constraint {
    ne("q^beta != 1", |s| 1.0 - s.beta)
}

fn qg_ne_1() -> Constraint {
    ne("q^gamma != 1", |s| 1.0 - s.gamma)
}

fn qa_ne_1() -> Constraint {
    ne("q^alpha != 1", |s| 1.0 - s.alpha)
}

fn exp_derivatives() -> Vec<IdentityRecord> {
    let xp = |s: &Scalars| (1.0 - s.alpha) * (1.0 - s.alpha * s.q) / ((1.0 - s.beta) * (1.0 - s.q)) * s.x;
    vec![
        rec("2.63", Family::H6Exp, vec![h(H6).times(&[R])], vec![h(H6).shift(2, 1, 0).pre(xp)], vec![qb_ne_1()]),
        rec(
            "2.64",
            Family::H6Exp,
            vec![h(H6).times(&[S])],
            vec![h(H6).shift(1, 1, 0).pre(|s| (1.0 - s.alpha) / ((1.0 - s.beta) * (1.0 - s.q)) * s.y)],
            vec![qb_ne_1()],
        ),
        rec("2.65", Family::H7Exp, vec![h(H7).times(&[R])], vec![h(H7).shift(2, 1, 0).pre(xp)], vec![qb_ne_1()]),
        rec(
            "2.66",
            Family::H7Exp,
            vec![h(H7).times(&[S])],
            vec![h(H7).shift(1, 0, 1).pre(|s| (1.0 - s.alpha) / ((1.0 - s.gamma) * (1.0 - s.q)) * s.y)],
            vec![qg_ne_1()],
        ),
    ]
}

fn exp_brackets() -> Vec<IdentityRecord> {
    let l_alpha = BracketArg::linear(2, 1, 0, ParamPower::Alpha);
    let qbm1 = |s: &Scalars| (1.0 - s.beta / s.q) / (1.0 - s.q);
    let qgm1 = |s: &Scalars| (1.0 - s.gamma / s.q) / (1.0 - s.q);
    let qb_ne_q = || ne("q^(beta-1) != 1", |s| s.beta - s.q);
    vec![
        rec("2.67", Family::H6Exp, vec![h(H6).times(&[l_alpha])], vec![h(H6).shift(1, 0, 0).pre(qa)], vec![]),
        rec(
            "2.68",
            Family::H6Exp,
            vec![h(H6).times(&[BracketArg::linear(1, 1, -1, ParamPower::Beta)])],
            vec![h(H6).shift(0, -1, 0).pre(qbm1)],
            vec![qb_ne_q()],
        ),
        rec("2.69", Family::H7Exp, vec![h(H7).times(&[l_alpha])], vec![h(H7).shift(1, 0, 0).pre(qa)], vec![]),
        rec(
            "2.70",
            Family::H7Exp,
            vec![h(H7).times(&[BracketArg::linear(1, 0, -1, ParamPower::Beta)])],
            vec![h(H7).shift(0, -1, 0).pre(qbm1)],
            vec![qb_ne_q()],
        ),
        rec(
            "2.71",
            Family::H7Exp,
            vec![h(H7).times(&[BracketArg::linear(0, 1, -1, ParamPower::Gamma)])],
            vec![h(H7).shift(0, 0, -1).pre(qgm1)],
            vec![ne("q^(gamma-1) != 1", |s| s.gamma - s.q)],
        ),
    ]
}

fn exp_alpha_shift() -> Vec<IdentityRecord> {
    let k = |s: &Scalars| (1.0 - s.q) * s.alpha / (1.0 - s.alpha);
    let y_first = |t: SeriesKind| {
        vec![h(t), h(t).times(&[S]).pre(k), h(t).args(0, 1).times(&[R]).pre(k), h(t).args(1, 1).times(&[R]).pre(k)]
    };
    let x_first = |t: SeriesKind| {
        vec![h(t), h(t).times(&[R]).pre(k), h(t).args(1, 0).times(&[R]).pre(k), h(t).args(2, 0).times(&[S]).pre(k)]
    };
    vec![
        rec("2.72", Family::H7Exp, vec![h(H7).shift(1, 0, 0)], y_first(H7), vec![qa_ne_1()]),
        rec("2.73", Family::H7Exp, vec![h(H7).shift(1, 0, 0)], x_first(H7), vec![qa_ne_1()]),
        rec("2.74", Family::H6Exp, vec![h(H6).shift(1, 0, 0)], y_first(H6), vec![qa_ne_1()]),
        rec("2.75", Family::H6Exp, vec![h(H6).shift(1, 0, 0)], x_first(H6), vec![qa_ne_1()]),
    ]
}

/// `q x [alpha]^2`
fn qx_a2(s: &Scalars) -> C {
    s.q * s.x * qa(s) * qa(s)
}

/// `2 q^(alpha+1) x [alpha]`
fn two_aqx_a(s: &Scalars) -> C {
    2.0 * s.alpha * s.q * s.x * qa(s)
}

/// `2 q^(2 alpha+1) x`
fn two_a2qx(s: &Scalars) -> C {
    2.0 * s.alpha * s.alpha * s.q * s.x
}

/// `q^(2 alpha+1) x`
fn a2qx(s: &Scalars) -> C {
    s.alpha * s.alpha * s.q * s.x
}

/// Right side shared by the y-first second-order relations, minus the `H(q^(alpha+1))` and `[alpha]^2` terms.
fn second_order_y_tail(t: SeriesKind, sq: Square) -> Vec<Ts> {
    vec![
        h(t).args(0, 1).times(&[R]).pre(two_aqx_a),
        h(t).args(1, 1).times(&[R]).pre(two_aqx_a),
        h(t).args(0, 1).times(&[R, S]).pre(two_a2qx),
        h(t).args(1, 1).times(&[R, S]).pre(two_a2qx),
        h(t).args(1, 2).times(sq_r(sq)).pre(two_a2qx),
        h(t).args(0, 2).times(sq_r(sq)).pre(a2qx),
        h(t).args(2, 2).times(sq_r(sq)).pre(a2qx),
    ]
}

/// Right side shared by the x-first second-order relations; `tok` is the
/// series printed in the `q^3 x` term.
fn second_order_x_tail(t: SeriesKind, tok: SeriesKind, sq: Square) -> Vec<Ts> {
    vec![
        h(t).args(1, 0).times(&[R]).pre(two_aqx_a),
        h(t).args(2, 0).times(&[S]).pre(two_aqx_a),
        h(t).args(1, 0).times(sq_r(sq)).pre(two_a2qx),
        h(t).args(2, 0).times(&[R, S]).pre(two_a2qx),
        h(tok).args(3, 0).times(&[R, S]).pre(two_a2qx),
        h(t).args(2, 0).times(sq_r(sq)).pre(a2qx),
        h(t).args(4, 0).times(sq_s(sq)).pre(a2qx),
    ]
}

fn second_order_lhs(t: SeriesKind) -> Vec<Ts> {
    vec![h(t).shift(2, 0, 0).pre(|s| (1.0 - s.alpha * s.q) / (1.0 - s.q))]
}

fn second_order_y(t: SeriesKind, sq: Square) -> Vec<Ts> {
    let mut v = vec![
        h(t).shift(1, 0, 0),
        h(t).pre(qx_a2),
        h(t).times(&[S]).pre(two_aqx_a),
    ];
    v.extend(second_order_y_tail(t, sq));
    v.push(h(t).times(sq_s(sq)).pre(a2qx));
    v
}

fn second_order_x(t: SeriesKind, tok: SeriesKind, sq: Square) -> Vec<Ts> {
    let mut v = vec![
        h(t).shift(1, 0, 0),
        h(t).pre(qx_a2),
        h(t).times(&[R]).pre(two_aqx_a),
    ];
    v.extend(second_order_x_tail(t, tok, sq));
    v.push(h(t).times(sq_r(sq)).pre(a2qx));
    v
}

fn exp_second_order() -> Vec<IdentityRecord> {
    let y = |eq, fam: Family| {
        let t = fam.kind();
        rec(eq, fam, second_order_lhs(t), second_order_y(t, Square::Outer), vec![]).variant(
            INNER_SQUARE,
            second_order_lhs(t),
            second_order_y(t, Square::Inner),
            vec![],
        )
    };
    let x = |eq, fam: Family, tok: SeriesKind| {
        let t = fam.kind();
        let r = rec(eq, fam, second_order_lhs(t), second_order_x(t, tok, Square::Outer), vec![]).variant(
            INNER_SQUARE,
            second_order_lhs(t),
            second_order_x(t, tok, Square::Inner),
            vec![],
        );
        if tok == t {
            return r;
        }
        r.variant(
            "q^3 x term's HH7 token read as HH6",
            second_order_lhs(t),
            second_order_x(t, t, Square::Outer),
            vec![],
        )
        .variant(
            "q^3 x term read as HH6 and [theta^2]_q as [r^2]_q",
            second_order_lhs(t),
            second_order_x(t, t, Square::Inner),
            vec![],
        )
    };
    vec![
        y("2.76", Family::H7Exp),
        x("2.77", Family::H7Exp, H7),
        y("2.78", Family::H6Exp),
        x("2.79", Family::H6Exp, H7),
    ]
}

fn aqy(s: &Scalars) -> C {
    s.alpha * s.q * s.y / (1.0 - s.q)
}

fn exp_pde() -> Vec<IdentityRecord> {
    let gq = |s: &Scalars| s.gamma / s.q;
    let ngq = |s: &Scalars| -s.gamma / s.q;
    let bq = |s: &Scalars| s.beta / s.q;
    let nbq = |s: &Scalars| -s.beta / s.q;
    let qg = |s: &Scalars| (1.0 - s.gamma) / (1.0 - s.q);
    let qc = |s: &Scalars| (1.0 - s.stray) / (1.0 - s.q);
    let qb = |s: &Scalars| (1.0 - s.beta) / (1.0 - s.q);
    let m_aqy = |s: &Scalars| -aqy(s);

    let y_lhs = |t: SeriesKind, lead: &'static [BracketArg], lp: fn(&Scalars) -> C, lm: fn(&Scalars) -> C, third: fn(&Scalars) -> C, fourth: BracketArg| {
        vec![
            h(t).times(lead).pre(lp),
            h(t).times(&[S]).pre(lm),
            h(t).times(&[S]).pre(third),
            h(t).times(&[fourth]).pre(m_aqy),
            h(t).times(&[L21]).pre(|s| -s.y * s.alpha),
            h(t).pre(|s| -s.y * qa(s) / (1.0 - s.q)),
        ]
    };
    let y_rhs_a = |t: SeriesKind| vec![h(t).args(0, 1).times(&[R]).pre(aqy), h(t).args(1, 1).times(&[R]).pre(aqy)];
    let y_rhs_b = |t: SeriesKind| vec![h(t).args(1, 0).times(&[R]).pre(aqy), h(t).args(2, 0).times(&[S]).pre(aqy)];

    // x-type: lead [theta_x] times `lead2`, then the printed lower-order terms.
    let x_lhs = |t: SeriesKind, lead2: BracketArg, y_first: bool, sq: Square| {
        let (sq_term, mid): (&'static [BracketArg], BracketArg) = if y_first { (sq_s(sq), S) } else { (sq_r(sq), R) };
        vec![
            h(t).times(&[R, lead2]).pre(bq),
            h(t).times(&[R]).pre(nbq),
            h(t).times(&[S]).pre(qb),
            h(t).times(sq_term).pre(|s| -a2qx(s)),
            h(t).times(&[mid]).pre(|s| -two_aqx_a(s)),
            h(t).times(&[L21]).pre(|s| -s.x * s.alpha),
            h(t).pre(|s| -qx_a2(s)),
            h(t).pre(|s| -s.x * qa(s)),
        ]
    };
    let x_rec_y = |eq, fam: Family, lead2: BracketArg| {
        let t = fam.kind();
        rec(eq, fam, x_lhs(t, lead2, true, Square::Outer), second_order_y_tail(t, Square::Outer), vec![]).variant(
            INNER_SQUARE,
            x_lhs(t, lead2, true, Square::Inner),
            second_order_y_tail(t, Square::Inner),
            vec![],
        )
    };
    let x_rec_x = |eq, fam: Family, lead2: BracketArg, tok: SeriesKind| {
        let t = fam.kind();
        let r = rec(eq, fam, x_lhs(t, lead2, false, Square::Outer), second_order_x_tail(t, tok, Square::Outer), vec![])
            .variant(INNER_SQUARE, x_lhs(t, lead2, false, Square::Inner), second_order_x_tail(t, tok, Square::Inner), vec![]);
        if tok == t {
            return r;
        }
        r.variant(
            "q^3 x term's HH7 token read as HH6",
            x_lhs(t, lead2, false, Square::Outer),
            second_order_x_tail(t, t, Square::Outer),
            vec![],
        )
        .variant(
            "q^3 x term read as HH6 and [theta^2]_q as [r^2]_q",
            x_lhs(t, lead2, false, Square::Inner),
            second_order_x_tail(t, t, Square::Inner),
            vec![],
        )
    };

    vec![
        rec("2.81", Family::H7Exp, y_lhs(H7, &[S, S], gq, ngq, qg, S), y_rhs_a(H7), vec![]),
        rec("2.82", Family::H7Exp, y_lhs(H7, &[S, S], gq, ngq, qc, R), y_rhs_b(H7), vec![]).variant(
            "undefined [c]_q read as [gamma]_q",
            y_lhs(H7, &[S, S], gq, ngq, qg, R),
            y_rhs_b(H7),
            vec![],
        ),
        x_rec_y("2.83", Family::H7Exp, R),
        x_rec_x("2.84", Family::H7Exp, R, H7),
        rec("2.85", Family::H6Exp, y_lhs(H6, &[S, L11], bq, nbq, qb, S), y_rhs_a(H6), vec![]),
        rec("2.86", Family::H6Exp, y_lhs(H6, &[S, L11], bq, nbq, qb, R), y_rhs_b(H6), vec![]),
        x_rec_y("2.87", Family::H6Exp, L11),
        x_rec_x("2.88", Family::H6Exp, L11, H7),
    ]
}
