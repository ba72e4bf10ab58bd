//! Runs every reading of every record over a sampled point set.

use rayon::prelude::*;

use crate::error::Result;
use crate::qcore::{ComplexValue, QContext};
use crate::series::EvalPolicy;

use super::sampler::{sample_points, SamplerConfig};
use super::{check_reading, reading_name, registry, Classification, Family, IdentityRecord, Verdict};

/// Result of one reading (literal or amended) over all sampled points.
#[derive(Debug, Clone)]
pub struct ReadingSummary {
    pub variant: String,
    pub rationale: String,
    pub n_points: usize,
    /// Worst relative residual among points that evaluated; `None` if none did.
    pub max_rel_residual: Option<f64>,
    pub classification: Classification,
    /// The point with the largest relative residual.
    pub witness: Option<Verdict>,
    /// Per-point evaluation errors, in point order.
    pub errors: Vec<String>,
    pub verified: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone)]
pub struct IdentityEntry {
    pub id: String,
    pub eq: String,
    pub family: Family,
    /// Index of the reading the headline numbers come from.
    pub headline: usize,
    pub classification: Classification,
    pub readings: Vec<ReadingSummary>,
    /// Sampler rejections for this record.
    pub rejected: usize,
}

impl IdentityEntry {
    pub fn headline_reading(&self) -> &ReadingSummary {
        &self.readings[self.headline]
    }

    pub fn literal(&self) -> &ReadingSummary {
        &self.readings[0]
    }
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub seed: u64,
    pub q: ComplexValue,
    pub policy: EvalPolicy,
    pub sampler: SamplerConfig,
    pub identities: Vec<IdentityEntry>,
}

impl AuditReport {
    /// True if some identity failed in its literal reading with no passing variant.
    pub fn has_failures(&self) -> bool {
        self.identities.iter().any(|e| e.classification == Classification::Failed)
    }

    pub fn entry(&self, id: &str) -> Option<&IdentityEntry> {
        self.identities.iter().find(|e| e.id == id || e.eq == id)
    }

    pub fn count(&self, c: Classification) -> usize {
        self.identities.iter().filter(|e| e.classification == c).count()
    }
}

fn summarize(record: &IdentityRecord, index: usize, results: Vec<Result<Verdict>>) -> ReadingSummary {
    let n_points = results.len();
    let rationale = record.reading(index).map_or("", |r| r.rationale).to_string();
    let (mut verified, mut failed, mut inconclusive) = (0, 0, 0);
    let mut errors = Vec::new();
    let mut witness: Option<Verdict> = None;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => {
                match v.classification {
                    Classification::Verified => verified += 1,
                    Classification::Failed => failed += 1,
                    _ => inconclusive += 1,
                }
                let worse = witness.as_ref().is_none_or(|w| v.rel_residual > w.rel_residual || v.rel_residual.is_nan());
                if worse {
                    witness = Some(v);
                }
            }
            Err(e) => {
                inconclusive += 1;
                errors.push(format!("point {i}: {e}"));
            }
        }
    }
    let classification = if failed > 0 {
        Classification::Failed
    } else if verified == n_points && n_points >= 2 {
        Classification::Verified
    } else {
        Classification::Inconclusive
    };
    ReadingSummary {
        variant: reading_name(index),
        rationale,
        n_points,
        max_rel_residual: witness.as_ref().map(|w| w.rel_residual),
        classification,
        witness,
        errors,
        verified,
        failed,
        inconclusive,
    }
}

/// Identity-level verdict and headline reading from the per-reading results.
fn combine(readings: &[ReadingSummary]) -> (Classification, usize) {
    let literal = readings[0].classification;
    let amended_ok = readings.iter().skip(1).position(|r| r.classification == Classification::Verified).map(|i| i + 1);
    match (literal, amended_ok) {
        (Classification::Verified, _) => (Classification::Verified, 0),
        (Classification::Failed, Some(i)) => (Classification::DiscrepantLiteral, i),
        (Classification::Failed, None) => (Classification::Failed, 0),
        (_, Some(i)) => (Classification::Verified, i),
        (c, None) => (c, 0),
    }
}

fn audit_one(record: &IdentityRecord, cfg: &SamplerConfig, ctx: &QContext, policy: &EvalPolicy) -> IdentityEntry {
    let (points, rejected, sample_err) = match sample_points(cfg, record, ctx) {
        Ok(s) => (s.points, s.rejected, None),
        Err(e) => (Vec::new(), 0, Some(e.to_string())),
    };
    let readings: Vec<ReadingSummary> = (0..record.n_readings())
        .map(|index| {
            let results: Vec<Result<Verdict>> =
                points.par_iter().map(|p| check_reading(record, index, p, ctx, policy)).collect();
            let mut s = summarize(record, index, results);
            if let Some(e) = &sample_err {
                s.errors.push(e.clone());
            }
            s
        })
        .collect();
    let (classification, headline) = combine(&readings);
    IdentityEntry {
        id: record.id.clone(),
        eq: record.eq_label.to_string(),
        family: record.family,
        headline,
        classification,
        readings,
        rejected,
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var("QHORN_THREADS").ok()?.trim().parse::<usize>().ok().filter(|n| *n > 0)
}

/// Audits the given records. Output order follows equation number.
pub fn audit_records(
    records: &[&IdentityRecord],
    cfg: &SamplerConfig,
    ctx: &QContext,
    policy: &EvalPolicy,
) -> Result<AuditReport> {
    cfg.validate()?;
    policy.validate()?;
    let run = || -> Vec<IdentityEntry> { records.par_iter().map(|r| audit_one(r, cfg, ctx, policy)).collect() };
    let mut identities = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the global pool");
                run()
            }
        },
        None => run(),
    };
    identities.sort_by_key(|e| super::eq_sort_key(&e.eq));
    Ok(AuditReport { seed: cfg.seed, q: ctx.q(), policy: *policy, sampler: cfg.clone(), identities })
}

/// Audits all 74 records.
pub fn audit_all(cfg: &SamplerConfig, ctx: &QContext, policy: &EvalPolicy) -> Result<AuditReport> {
    let all: Vec<&IdentityRecord> = registry().iter().collect();
    audit_records(&all, cfg, ctx, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::find_record;

    fn summary(c: Classification) -> ReadingSummary {
        ReadingSummary {
            variant: String::new(),
            rationale: String::new(),
            n_points: 2,
            max_rel_residual: None,
            classification: c,
            witness: None,
            errors: vec![],
            verified: 0,
            failed: 0,
            inconclusive: 0,
        }
    }

    #[test]
    fn combine_rules() {
        use Classification::*;
        assert_eq!(combine(&[summary(Verified)]), (Verified, 0));
        assert_eq!(combine(&[summary(Failed), summary(Failed), summary(Verified)]), (DiscrepantLiteral, 2));
        assert_eq!(combine(&[summary(Failed), summary(Inconclusive)]), (Failed, 0));
        assert_eq!(combine(&[summary(Inconclusive)]), (Inconclusive, 0));
    }

    #[test]
    fn single_point_never_verifies() {
        let rec = find_record("E2.25").unwrap();
        let cfg = SamplerConfig::default().with_n_points(1);
        let ctx = QContext::real(0.5).unwrap();
        let rep = audit_records(&[rec], &cfg, &ctx, &EvalPolicy::default()).unwrap();
        assert_eq!(rep.identities[0].classification, Classification::Inconclusive);
        assert_eq!(rep.identities[0].literal().verified, 1);
    }

    #[test]
    fn small_audit() {
        let recs = [find_record("E2.50").unwrap(), find_record("E2.21").unwrap()];
        let cfg = SamplerConfig::default().with_n_points(4);
        let ctx = QContext::real(0.5).unwrap();
        let rep = audit_records(&recs, &cfg, &ctx, &EvalPolicy::default()).unwrap();
        assert_eq!(rep.identities[0].id, "E2.21");
        assert!(rep.identities.iter().all(|e| e.classification == Classification::Verified));
        assert!(!rep.has_failures());
    }
}
