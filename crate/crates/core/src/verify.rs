//! Randomized invariant checks behind `packing-bounds verify`.
//!
//! Every sample draws from its own ChaCha stream, so reports do not
//! depend on thread count or scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::finite_bounds::cd_identity_residual;
use crate::geometry::{check_embedding_inequalities, positivity_sum, seeded_rng, ProductPoint};
use crate::orthopoly::{PolyFamily, RecurrenceTable};
use crate::spaces::{AngleKind, Field, Space};

/// Allowed excess in the embedding inequalities.
pub const EMBEDDING_SLACK: f64 = 1e-12;
/// Allowed relative residual in the Christoffel–Darboux identity.
pub const CD_TOLERANCE: f64 = 1e-10;
/// Allowed negative part of a positivity sum, relative to `|C|²`.
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;
/// Largest multi-index entry drawn for the identity check.
pub const CD_MAX_DEGREE: usize = 8;
/// Largest product length drawn for the identity check.
pub const CD_MAX_M: usize = 4;

/// Grassmannians sampled by the embedding check, as `(m, n, field)`.
pub const EMBEDDING_CASES: [(usize, usize, Field); 3] = [(2, 5, Field::R), (3, 8, Field::R), (2, 6, Field::C)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub samples: usize,
    /// Worst observed excess over the tolerance's reference, never negative.
    pub max_violation: f64,
    pub tolerance: f64,
    pub failures: usize,
}

impl CheckReport {
    fn new(name: String, samples: usize, violations: &[f64], tolerance: f64) -> Self {
        if samples == 0 {
            return Self {
                name,
                status: Status::Skipped,
                samples,
                max_violation: 0.0,
                tolerance,
                failures: 0,
            };
        }
        let failures = violations.iter().filter(|&&v| v.is_nan() || v > tolerance).count();
        Self {
            name,
            status: if failures == 0 { Status::Pass } else { Status::Fail },
            samples,
            max_violation: violations.iter().copied().fold(0.0, f64::max),
            tolerance,
            failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub samples: usize,
    pub fault_injected: bool,
    pub checks: Vec<CheckReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// pairs per Grassmannian; the identity check uses a tenth, positivity a hundredth
    pub samples: usize,
    pub seed: u64,
    /// perturb `a_1` of every recurrence by 1%
    pub corrupt_recurrence: bool,
}

fn sub_seed(seed: u64, check: u64) -> u64 {
    seed ^ (check + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Families drawn by the identity check: spheres `n = 3..=8` and the real,
/// complex and quaternionic projective spaces `n = 3..=8`.
pub fn identity_families() -> Vec<PolyFamily> {
    let mut out: Vec<PolyFamily> = (3..=8).map(|n| PolyFamily::gegenbauer(n).expect("n >= 2")).collect();
    for field in [Field::R, Field::C, Field::H] {
        out.extend((3..=8).map(|n| PolyFamily::projective(field, n).expect("n >= 2")));
    }
    out
}

fn uniform_in<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..=hi)
}

/// Largest relative residual of the product Christoffel–Darboux identity
/// for each of `triples` random `(family, k, x, y)`.
pub fn cd_residuals(triples: usize, seed: u64, corrupt: bool) -> Result<Vec<f64>> {
    let tables: Vec<RecurrenceTable> = identity_families()
        .iter()
        .map(|f| {
            let t = f.table(CD_MAX_DEGREE);
            if corrupt {
                t.with_corrupted_a(1, 1.01)
            } else {
                t
            }
        })
        .collect();
    (0..triples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(seed, i as u64);
            let table = &tables[rng.random_range(0..tables.len())];
            let support = table.family().support();
            let m = rng.random_range(1..=CD_MAX_M);
            let k: Vec<usize> = (0..m).map(|_| rng.random_range(0..=CD_MAX_DEGREE)).collect();
            let x: Vec<f64> = (0..m).map(|_| uniform_in(&mut rng, support)).collect();
            let y: Vec<f64> = (0..m).map(|_| uniform_in(&mut rng, support)).collect();
            cd_identity_residual(table, &k, &x, &y)
        })
        .collect()
}

/// Negative parts of `Σ_{u,v} Π P_{k_i}(t(u_i, v_i)) / |C|²` over random
/// codes in random small product spaces.
pub fn positivity_violations(codes: usize, seed: u64) -> Result<Vec<f64>> {
    (0..codes)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(seed, i as u64);
            let m = rng.random_range(1..=3);
            let n = rng.random_range(3..=6);
            let (kind, field) = match rng.random_range(0..4) {
                0 => (AngleKind::Sphere, Field::R),
                1 => (AngleKind::Projective, Field::R),
                2 => (AngleKind::Projective, Field::C),
                _ => (AngleKind::Projective, Field::H),
            };
            let family = match kind {
                AngleKind::Sphere => PolyFamily::gegenbauer(n)?,
                AngleKind::Projective => PolyFamily::projective(field, n)?,
            };
            let table = family.table(6);
            let size = rng.random_range(2..=16);
            let code: Vec<ProductPoint> = (0..size)
                .map(|_| ProductPoint::random(kind, field, n, m, &mut rng))
                .collect::<Result<_>>()?;
            let k: Vec<usize> = (0..m).map(|_| rng.random_range(0..=6)).collect();
            let sum = positivity_sum(&code, &table, &k)?;
            Ok((-sum / (size * size) as f64).max(0.0))
        })
        .collect()
}

pub fn run_verification(config: &VerifyConfig) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    for (i, &(m, n, field)) in EMBEDDING_CASES.iter().enumerate() {
        let name = format!("embedding {}", Space::Grassmann { field, m, n });
        if config.samples == 0 {
            checks.push(CheckReport::new(name, 0, &[], EMBEDDING_SLACK));
            continue;
        }
        let r = check_embedding_inequalities(m, n, field, config.samples, sub_seed(config.seed, i as u64), EMBEDDING_SLACK)?;
        let mut report = CheckReport::new(name, r.pairs, &[r.beta_excess, r.nu_excess], EMBEDDING_SLACK);
        report.failures = r.violations;
        if r.violations > 0 {
            report.status = Status::Fail;
        }
        checks.push(report);
    }
    let triples = config.samples / 10;
    let residuals = cd_residuals(triples, sub_seed(config.seed, 10), config.corrupt_recurrence)?;
    checks.push(CheckReport::new("cd-identity".into(), triples, &residuals, CD_TOLERANCE));
    let codes = config.samples / 100;
    let negatives = positivity_violations(codes, sub_seed(config.seed, 11))?;
    checks.push(CheckReport::new("positivity".into(), codes, &negatives, POSITIVITY_TOLERANCE));
    Ok(VerificationReport {
        seed: config.seed,
        samples: config.samples,
        fault_injected: config.corrupt_recurrence,
        checks,
    })
}
