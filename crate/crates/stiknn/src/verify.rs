//! Randomised equivalence sweep between the fast recursion and the
//! brute-force oracle.

use stiknn_core::oracle::sti_exact_matrix;
use stiknn_core::{Dataset, InteractionMatrix, KnnConfig, Role};

use crate::datagen::random_instance;
use crate::error::Result;
use crate::parallel::{assemble_in, pool};

pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n_max: 10, trials: 50, seed: 0, threads: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Case {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub classes: u32,
    pub trial: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub instances: usize,
    pub worst: f64,
    pub worst_case: Option<Case>,
    /// Largest `|pair_sum - v(N)|` seen, measured on the oracle matrices.
    pub worst_efficiency: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.worst <= TOLERANCE
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Instance seed for one sweep cell.
pub fn case_seed(base: u64, n: usize, t: usize, classes: u32, trial: usize) -> u64 {
    [n as u64, t as u64, classes as u64, trial as u64]
        .iter()
        .fold(mix(base), |acc, &x| mix(acc ^ x))
}

/// The sweep instance for a case: `n` train and `t` test points in the unit
/// square with `classes` labels.
pub fn case_instance(case: &Case) -> Result<(Dataset, Dataset)> {
    let both = random_instance(case.n + case.t, case.classes, case.seed)?;
    let train: Vec<usize> = (0..case.n).collect();
    let test: Vec<usize> = (case.n..case.n + case.t).collect();
    Ok((both.select(&train)?, both.select(&test)?.with_role(Role::Test)))
}

/// Every case of the sweep: `n in 2..=n_max`, `k in 1..=n`, `t in {1, 3}`,
/// binary and 3-class labels, `trials` instances each. One instance is
/// shared by all `k` for a given `(n, t, classes, trial)`.
pub fn cases(cfg: &VerifyConfig) -> Vec<Case> {
    let mut out = Vec::new();
    for n in 2..=cfg.n_max {
        for t in [1, 3] {
            for classes in [2u32, 3] {
                for trial in 0..cfg.trials {
                    let seed = case_seed(cfg.seed, n, t, classes, trial);
                    for k in 1..=n {
                        out.push(Case { n, k, t, classes, trial, seed });
                    }
                }
            }
        }
    }
    out
}

/// Runs the sweep with `compute` as the implementation under test.
pub fn run_with<F>(cfg: &VerifyConfig, compute: F) -> Result<VerifyReport>
where
    F: Fn(&Dataset, &Dataset, &KnnConfig) -> Result<InteractionMatrix>,
{
    let mut report = VerifyReport { instances: 0, worst: 0.0, worst_case: None, worst_efficiency: 0.0 };
    for case in cases(cfg) {
        let (train, test) = case_instance(&case)?;
        let knn = KnnConfig::new(case.k);
        let fast = compute(&train, &test, &knn)?;
        let exact = sti_exact_matrix(&train, &test, &knn)?;
        let diff = fast
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let eff = stiknn_core::analysis::efficiency_report(&exact, &train, &test, &knn)?;
        report.worst_efficiency = report.worst_efficiency.max(eff.residual.abs());
        if report.worst_case.is_none() || diff > report.worst || diff.is_nan() {
            report.worst = if diff.is_nan() { f64::INFINITY } else { diff };
            report.worst_case = Some(case);
        }
        report.instances += 1;
    }
    Ok(report)
}

/// Runs the sweep against the parallel recursion.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let pool = pool(cfg.threads)?;
    run_with(cfg, |train, test, knn| {
        let plan = stiknn_core::StiPlan::new(train, test, knn)?;
        assemble_in(&pool, &plan)
    })
}
