//! Independent oracles for the integration and acceptance suites.
//!
//! Nothing here calls the library's summation code: every series value is a
//! naive double loop with fresh Pochhammer products per term.
#![allow(dead_code, clippy::too_many_arguments)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn poch(eta: C, q: C, n: usize) -> C {
    let mut acc = C::new(1.0, 0.0);
    for k in 0..n {
        acc *= C::new(1.0, 0.0) - eta * q.powi(k as i32);
    }
    acc
}

/// Naive term of H6 (`h7 = false`) or H7.
pub fn naive_term(h7: bool, a: C, b: C, g: C, q: C, x: C, y: C, r: usize, s: usize) -> C {
    let num = poch(a, q, 2 * r + s);
    let den = if h7 {
        poch(b, q, r) * poch(g, q, s)
    } else {
        poch(b, q, r + s)
    } * poch(q, q, r)
        * poch(q, q, s);
    num / den * x.powi(r as i32) * y.powi(s as i32)
}

/// Square brute-force sum over `r, s <= n`.
pub fn naive_sum(h7: bool, a: C, b: C, g: C, q: C, x: C, y: C, n: usize) -> C {
    let mut acc = C::new(0.0, 0.0);
    for r in 0..=n {
        for s in 0..=n {
            acc += naive_term(h7, a, b, g, q, x, y, r, s);
        }
    }
    acc
}

/// Finite sum over `2r + s <= n` (exact for terminating `a = q^-n`).
pub fn naive_finite_sum(h7: bool, a: C, b: C, g: C, q: C, x: C, y: C, n: usize) -> C {
    let mut acc = C::new(0.0, 0.0);
    for r in 0..=n / 2 {
        for s in 0..=(n - 2 * r) {
            acc += naive_term(h7, a, b, g, q, x, y, r, s);
        }
    }
    acc
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C {
    let m = rng.gen_range(lo..hi);
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    C::from_polar(m, t)
}

pub fn disk(rng: &mut ChaCha8Rng, radius: f64) -> C {
    polar(rng, 0.0, radius)
}

/// Relative distance with an absolute floor.
pub fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

pub fn verdict(ok: bool, label: &str, detail: &str) {
    println!("{} {label}: {detail}", if ok { "PASS" } else { "FAIL" });
}

/// Same double sum as [`naive_sum`], with each Pochhammer product built once
/// per length instead of once per term.
pub fn table_sum(h7: bool, a: C, b: C, g: C, q: C, x: C, y: C, n: usize) -> C {
    let pa: Vec<C> = (0..=3 * n).map(|k| poch(a, q, k)).collect();
    let pb: Vec<C> = (0..=2 * n).map(|k| poch(b, q, k)).collect();
    let pg: Vec<C> = (0..=n).map(|k| poch(g, q, k)).collect();
    let pq: Vec<C> = (0..=n).map(|k| poch(q, q, k)).collect();
    let mut acc = C::new(0.0, 0.0);
    for r in 0..=n {
        for s in 0..=n {
            let den = if h7 { pb[r] * pg[s] } else { pb[r + s] } * pq[r] * pq[s];
            acc += pa[2 * r + s] / den * x.powi(r as i32) * y.powi(s as i32);
        }
    }
    acc
}

/// Classical Horn double sum over `r, s <= n` with rising factorials,
/// numerator and denominator factors interleaved so nothing overflows.
pub fn classical_sum(h7: bool, a: C, b: C, g: C, x: C, y: C, n: usize) -> C {
    let mut acc = C::new(0.0, 0.0);
    for r in 0..=n {
        for s in 0..=n {
            let mut num: Vec<C> = (0..2 * r + s).map(|k| a + k as f64).collect();
            let mut den: Vec<C> = if h7 {
                (0..r).map(|k| b + k as f64).chain((0..s).map(|k| g + k as f64)).collect()
            } else {
                (0..r + s).map(|k| b + k as f64).collect()
            };
            den.extend((1..=r).map(|k| C::new(k as f64, 0.0)));
            den.extend((1..=s).map(|k| C::new(k as f64, 0.0)));
            num.resize(num.len().max(den.len()), C::new(1.0, 0.0));
            den.resize(num.len(), C::new(1.0, 0.0));
            let mut t = x.powi(r as i32) * y.powi(s as i32);
            for (u, v) in num.iter().zip(&den) {
                t *= u / v;
            }
            acc += t;
        }
    }
    acc
}

/// `D^k f(z)` from the samples `v[j] = f(q^j z)`, `j = 0..=k`, by repeated
/// Jackson quotients.
pub fn iterated_quotient(v: &[C], q: C, z: C) -> C {
    let mut g = v.to_vec();
    while g.len() > 1 {
        g = (0..g.len() - 1).map(|j| (g[j] - g[j + 1]) / ((1.0 - q) * q.powi(j as i32) * z)).collect();
    }
    g[0]
}
