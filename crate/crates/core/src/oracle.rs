//! Brute-force ground truth: the Shapley-Taylor pair index evaluated by
//! enumerating every coalition. Exponential in `n`; meant for `n <= 22`.
//!
//! The valuation is tabulated once over all `2^n` coalitions (bit `i` of a
//! mask is training index `i`), then every pair sum reads from the table.
//! Subsets are visited in ascending numeric mask order.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::types::{Dataset, InteractionMatrix, KnnConfig, MatrixMeta};
use crate::valuation::ranked_matches;

/// Largest training set the oracle accepts.
pub const HARD_CAP: usize = 22;

/// Exact binomial coefficient; exact for every `n <= 62`.
pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut c: u64 = 1;
    for i in 0..r {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    c
}

/// A coalitional game on `n <= HARD_CAP` players given by its full value table.
#[derive(Debug, Clone)]
pub struct Game {
    n: usize,
    values: Vec<f64>,
    /// `weights[s] = 1 / C(n - 1, s)`
    weights: Vec<f64>,
}

impl Game {
    /// Tabulates the KNN test score `v(S)` for every coalition.
    pub fn knn(train: &Dataset, test: &Dataset, config: &KnnConfig) -> Result<Self> {
        let n = train.len();
        check_cap(n)?;
        if config.k == 0 {
            return Err(Error::InvalidK { k: 0, n });
        }
        let profiles = ranked_matches(train, test, config.metric)?;
        let t = test.len() as f64;
        Ok(Self::from_fn(n, |mask| {
            let total: f64 = profiles
                .iter()
                .map(|p| p.value_of(|i| mask >> i & 1 == 1, config.k))
                .sum();
            total / t
        }))
    }

    /// Tabulates an arbitrary valuation. Panics if `n > HARD_CAP`.
    pub fn from_fn(n: usize, valuation: impl Fn(u64) -> f64) -> Self {
        assert!(n <= HARD_CAP, "oracle limited to n <= {HARD_CAP}");
        let values = (0..1u64 << n).map(valuation).collect();
        let weights = (0..n.max(1))
            .map(|s| 1.0 / binomial(n.saturating_sub(1), s) as f64)
            .collect();
        Self { n, values, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for idx in [i, j] {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange { index: idx, n: self.n });
            }
        }
        if i == j {
            return Err(Error::IdenticalPair { index: i });
        }
        Ok(())
    }

    /// Discrete second difference `v(S+ij) - v(S+i) - v(S+j) + v(S)`.
    pub fn discrete_delta(&self, s: u64, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        for idx in [i, j] {
            if s >> idx & 1 == 1 {
                return Err(Error::OverlappingSubset { index: idx });
            }
        }
        Ok(self.delta(s, 1 << i, 1 << j))
    }

    fn delta(&self, s: u64, bi: u64, bj: u64) -> f64 {
        self.value(s | bi | bj) - self.value(s | bi) - self.value(s | bj) + self.value(s)
    }

    fn pair_sum(&self, i: usize, j: usize, min_size: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        let (bi, bj) = (1u64 << i, 1u64 << j);
        let rest = self.full_mask() & !(bi | bj);
        let mut sum = 0.0;
        for s in submasks(rest) {
            let size = s.count_ones() as usize;
            if size >= min_size {
                sum += self.weights[size] * self.delta(s, bi, bj);
            }
        }
        Ok(2.0 / self.n as f64 * sum)
    }

    /// Pair index by full enumeration of `S ⊆ N \ {i, j}`.
    pub fn pair(&self, i: usize, j: usize) -> Result<f64> {
        self.pair_sum(i, j, 0)
    }

    /// Same sum restricted to coalition sizes `s >= k - 1`; the skipped sizes
    /// contribute nothing because the valuation is additive below `k`.
    pub fn pair_restricted(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        self.pair_sum(i, j, k.saturating_sub(1))
    }

    /// Main term `v({i}) - v({})`.
    pub fn main_term(&self, i: usize) -> f64 {
        self.value(1 << i) - self.value(0)
    }

    /// Right-hand side of the pair-difference identity:
    /// `(2/n) * Σ_{S ⊆ N\{i,j,q}} (w(s) + w(s+1)) (v(Sij) - v(Siq) - v(Sj) + v(Sq))`.
    /// It equals `pair(i, j) - pair(i, q)`.
    pub fn pair_difference(&self, i: usize, j: usize, q: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        self.check_pair(i, q)?;
        self.check_pair(j, q)?;
        let (bi, bj, bq) = (1u64 << i, 1u64 << j, 1u64 << q);
        let rest = self.full_mask() & !(bi | bj | bq);
        let mut sum = 0.0;
        for s in submasks(rest) {
            let size = s.count_ones() as usize;
            let w = self.weights[size] + self.weights[size + 1];
            let d = self.value(s | bi | bj) - self.value(s | bi | bq) - self.value(s | bj)
                + self.value(s | bq);
            sum += w * d;
        }
        Ok(2.0 / self.n as f64 * sum)
    }

    /// All pairs plus main terms on the diagonal.
    pub fn matrix(&self, meta: MatrixMeta) -> Result<InteractionMatrix> {
        let n = self.n;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = self.main_term(i);
            for j in i + 1..n {
                let phi = self.pair(i, j)?;
                values[i * n + j] = phi;
                values[j * n + i] = phi;
            }
        }
        InteractionMatrix::from_values(n, values, meta)
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > HARD_CAP {
        return Err(Error::OracleCapExceeded { n, cap: HARD_CAP });
    }
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    Ok(())
}

/// Submasks of `set` in ascending numeric order, starting at 0.
fn submasks(set: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set { None } else { Some(cur.wrapping_sub(set) & set) };
        Some(cur)
    })
}

fn meta(train: &Dataset, test: &Dataset, config: &KnnConfig) -> MatrixMeta {
    MatrixMeta {
        k: config.k,
        t: test.len(),
        train_fingerprint: train.fingerprint(),
        test_fingerprint: test.fingerprint(),
    }
}

pub fn sti_exact_pair(
    train: &Dataset,
    test: &Dataset,
    config: &KnnConfig,
    i: usize,
    j: usize,
) -> Result<f64> {
    Game::knn(train, test, config)?.pair(i, j)
}

pub fn sti_exact_pair_restricted(
    train: &Dataset,
    test: &Dataset,
    config: &KnnConfig,
    i: usize,
    j: usize,
) -> Result<f64> {
    Game::knn(train, test, config)?.pair_restricted(i, j, config.k)
}

pub fn sti_exact_matrix(train: &Dataset, test: &Dataset, config: &KnnConfig) -> Result<InteractionMatrix> {
    Game::knn(train, test, config)?.matrix(meta(train, test, config))
}
