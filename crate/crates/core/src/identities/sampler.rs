//! Seeded, pole-avoiding point sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QError, Result};
use crate::qcore::{q_pow, q_pow_int, ComplexValue, QContext, DEFAULT_POLE_MARGIN};
use crate::series::{HornPoint, Scalars};

use super::IdentityRecord;

/// Powers of q scanned when keeping denominator parameters away from `q^-k`.
const POLE_SCAN: i64 = 64;
/// Attempts allowed per requested point before giving up.
const ATTEMPTS_PER_POINT: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub n_points: usize,
    pub x_y_radius: f64,
    /// Moduli range for alpha, beta, gamma (parameter values, not exponents).
    pub param_annulus: (f64, f64),
    /// `|q|` range; `None` keeps the context's base.
    pub q_range: Option<(f64, f64)>,
    /// Draw a random argument for q as well (only with `q_range`).
    pub q_complex_phase: bool,
    pub margin: f64,
    /// Fix `alpha = q^-N` so every series terminates.
    pub terminating: Option<u32>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_points: 25,
            x_y_radius: 0.25,
            param_annulus: (0.1, 0.9),
            q_range: None,
            q_complex_phase: false,
            margin: DEFAULT_POLE_MARGIN,
            terminating: None,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_points(mut self, n: usize) -> Self {
        self.n_points = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(QError::config("n_points must be at least 1"));
        }
        if !(self.x_y_radius > 0.0 && self.x_y_radius < 1.0) {
            return Err(QError::config(format!("x_y_radius must lie in (0, 1), got {}", self.x_y_radius)));
        }
        let (lo, hi) = self.param_annulus;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(QError::config(format!("bad parameter annulus ({lo}, {hi})")));
        }
        if let Some((lo, hi)) = self.q_range {
            if !(lo > 0.0 && lo < hi && hi < 1.0) {
                return Err(QError::config(format!("q range ({lo}, {hi}) must satisfy 0 < lo < hi < 1")));
            }
        }
        if !(self.margin.is_finite() && self.margin > 0.0) {
            return Err(QError::config(format!("margin must be positive, got {}", self.margin)));
        }
        Ok(())
    }
}

/// A sampled point. For the exponent families `exponents` holds `(a, b, c)`
/// with `scalars.alpha = q^a` etc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledPoint {
    pub scalars: Scalars,
    pub exponents: Option<[ComplexValue; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<SampledPoint>,
    /// Candidates discarded by the constraint and pole filters.
    pub rejected: usize,
}

/// FNV-1a, so each record gets its own stream from one seed.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ComplexValue {
    let m = rng.gen_range(lo..hi);
    let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    ComplexValue::from_polar(m, t)
}

fn disk(rng: &mut ChaCha8Rng, radius: f64) -> ComplexValue {
    // area-uniform, strictly inside the radius
    let m = radius * rng.gen::<f64>().sqrt() * (1.0 - 1e-12);
    let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    ComplexValue::from_polar(m, t)
}

fn admissible(record: &IdentityRecord, sc: &Scalars, margin: f64) -> bool {
    let one = ComplexValue::new(1.0, 0.0);
    record.readings().all(|rd| {
        rd.constraints.iter().all(|c| c.holds(sc, margin))
            && rd.series().all(|ts| {
                ts.prefactor_value(sc).is_ok()
                    && ts
                        .denominator_params(sc)
                        .into_iter()
                        .all(|eta| (0..=POLE_SCAN).all(|k| (one - eta * q_pow_int(sc.q, k)).norm() > margin))
            })
    })
}

/// Draws `cfg.n_points` points at which every reading of `record` is defined.
pub fn sample_points(cfg: &SamplerConfig, record: &IdentityRecord, ctx: &QContext) -> Result<SampleSet> {
    cfg.validate()?;
    let margin = cfg.margin.max(ctx.pole_margin);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv1a(&record.id));
    let mut points = Vec::with_capacity(cfg.n_points);
    let mut rejected = 0usize;
    let budget = cfg.n_points * ATTEMPTS_PER_POINT;
    let (lo, hi) = cfg.param_annulus;
    for _ in 0..budget {
        if points.len() == cfg.n_points {
            break;
        }
        let q = match cfg.q_range {
            None => ctx.q(),
            Some((qlo, qhi)) => {
                let m = rng.gen_range(qlo..qhi);
                if cfg.q_complex_phase {
                    ComplexValue::from_polar(m, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                } else {
                    ComplexValue::new(m, 0.0)
                }
            }
        };
        let mut alpha = polar(&mut rng, lo, hi);
        let beta = polar(&mut rng, lo, hi);
        let gamma = polar(&mut rng, lo, hi);
        let stray = polar(&mut rng, lo, hi);
        let x = disk(&mut rng, cfg.x_y_radius);
        let y = disk(&mut rng, cfg.x_y_radius);
        if let Some(n) = cfg.terminating {
            alpha = q_pow_int(q, -(n as i64));
        }

        let mut exponents = None;
        let (alpha, beta, gamma) = if record.family.is_exp() {
            let lq = q.ln();
            let a = match cfg.terminating {
                Some(n) => ComplexValue::new(-(n as f64), 0.0),
                None => alpha.ln() / lq,
            };
            let (b, c) = (beta.ln() / lq, gamma.ln() / lq);
            exponents = Some([a, b, c]);
            (q_pow(q, a), q_pow(q, b), q_pow(q, c))
        } else {
            (alpha, beta, gamma)
        };

        let Ok(point) = HornPoint::new(alpha, beta, gamma, x, y) else {
            rejected += 1;
            continue;
        };
        let sc = Scalars::new(&point, q, stray);
        if admissible(record, &sc, margin) {
            points.push(SampledPoint { scalars: sc, exponents });
        } else {
            rejected += 1;
        }
    }
    if points.len() < cfg.n_points {
        return Err(QError::config(format!(
            "sampler exhausted for {}: {} of {} points after {} rejections",
            record.id,
            points.len(),
            cfg.n_points,
            rejected
        )));
    }
    Ok(SampleSet { points, rejected })
}
