//! Exact pair-interaction (Shapley-Taylor) matrices for the KNN valuation
//! in `O(t * n^2)`.
//!
//! For one test point, sort the training set by distance. Every entry above
//! the diagonal of a ranked column holds the same value, so the matrix is
//! determined by one value per ranked column. Those values are computed by
//! a backward scan starting from the two farthest points. Averaging over the
//! test set is linear, and the diagonal holds the main terms `v({i}) - v({})`.
//!
//! The averaged matrix is assembled row by row: each cell sums its per-test
//! contributions in ascending test-index order and divides by `t` once. A
//! cell therefore has the same bits whichever order rows are computed in,
//! which is what lets the std companion crate parallelise over rows.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::types::{
    Dataset, InteractionMatrix, KnnConfig, LabelId, MatrixMeta, NeighborRanking, SingleTestMatrix,
};
use crate::valuation::{rank_neighbors, u_single};

/// Interaction of the two training points farthest from the test point:
/// `-2(n - k) / (n(n - 1)) * u_last`.
pub fn last_pair_term(n: usize, k: usize, u_last: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let coeff = (2 * (n - k)) as f64 / (n * (n - 1)) as f64;
    Ok(-coeff * u_last)
}

/// One backward step along the ranked superdiagonal (`j` is 1-based).
///
/// Returns the value of ranked column `j - 1` given the value of column `j`.
/// Only positions beyond `k + 1` can change it.
pub fn superdiag_step(phi_next: f64, j: usize, k: usize, u_j: f64, u_jm1: f64) -> f64 {
    if j > k + 1 {
        let coeff = (2 * (j - k - 1)) as f64 / ((j - 2) * (j - 1)) as f64;
        phi_next + coeff * (u_j - u_jm1)
    } else {
        phi_next
    }
}

/// Per-test data needed to reconstruct one test point's matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedColumns {
    /// Rank of each training index (0 = nearest).
    positions: Vec<u32>,
    /// `columns[r]` is the interaction of the rank-`r` point with any nearer point.
    columns: Vec<f64>,
}

impl RankedColumns {
    /// Runs the backward scan for one test point.
    pub fn compute(
        ranking: &NeighborRanking,
        train_labels: &[LabelId],
        test_label: LabelId,
        k: usize,
    ) -> Result<Self> {
        let n = ranking.len();
        if n < 2 {
            return Err(Error::TooFewPoints { n, min: 2 });
        }
        if k == 0 || k > n {
            return Err(Error::InvalidK { k, n });
        }
        let u: Vec<f64> = ranking
            .order()
            .iter()
            .map(|&i| u_single(train_labels[i], test_label, k))
            .collect();

        let mut columns = vec![0.0; n];
        columns[n - 1] = last_pair_term(n, k, u[n - 1])?;
        // 1-based j runs n..=3; column j-1 sits at index j-2
        for j in (3..=n).rev() {
            columns[j - 2] = superdiag_step(columns[j - 1], j, k, u[j - 1], u[j - 2]);
        }

        let mut positions = vec![0u32; n];
        for (rank, &i) in ranking.order().iter().enumerate() {
            positions[i] = rank as u32;
        }
        Ok(Self { positions, columns })
    }

    /// Column values in ranked coordinates; index 0 is unused and zero.
    pub fn columns(&self) -> &[f64] {
        &self.columns
    }

    /// Interaction between original training indices `i != j`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        let r = self.positions[i].max(self.positions[j]);
        self.columns[r as usize]
    }

    /// Scatters the columns into a full matrix in training order. The
    /// diagonal is left at zero.
    pub fn to_matrix(&self) -> SingleTestMatrix {
        let n = self.positions.len();
        let mut values = vec![0.0; n * n];
        let mut order = vec![0usize; n];
        for (i, &r) in self.positions.iter().enumerate() {
            order[r as usize] = i;
        }
        for (b, &col) in self.columns.iter().enumerate().skip(1) {
            let j = order[b];
            for &i in &order[..b] {
                values[i * n + j] = col;
                values[j * n + i] = col;
            }
        }
        SingleTestMatrix { n, values }
    }
}

/// Pair interactions relative to a single test point.
pub fn sti_knn_one_test(
    ranking: &NeighborRanking,
    train_labels: &[LabelId],
    test_label: LabelId,
    k: usize,
) -> Result<SingleTestMatrix> {
    Ok(RankedColumns::compute(ranking, train_labels, test_label, k)?.to_matrix())
}

/// Main terms `v({i}) - v({})`: the fraction of test points sharing point
/// `i`'s label, scaled by `1/k`.
pub fn main_terms(train: &Dataset, test: &Dataset, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidK { k, n: train.len() });
    }
    train.check_compatible(test)?;
    let vocab = train.label_names().len().max(test.label_names().len());
    let mut counts = vec![0usize; vocab];
    for p in test.points() {
        counts[p.label.index()] += 1;
    }
    let denom = (test.len() * k) as f64;
    Ok(train
        .points()
        .iter()
        .map(|p| counts[p.label.index()] as f64 / denom)
        .collect())
}

/// Validated inputs plus the per-test column data, ready to be assembled.
#[derive(Debug, Clone)]
pub struct StiPlan {
    n: usize,
    tests: Vec<RankedColumns>,
    main: Vec<f64>,
    meta: MatrixMeta,
}

impl StiPlan {
    pub fn new(train: &Dataset, test: &Dataset, config: &KnnConfig) -> Result<Self> {
        let n = train.len();
        if n < 2 {
            return Err(Error::TooFewPoints { n, min: 2 });
        }
        config.check_against(n)?;
        train.check_compatible(test)?;
        let labels = train.labels();
        let tests = test
            .points()
            .iter()
            .map(|q| {
                let ranking = rank_neighbors(train, &q.features, config.metric)?;
                RankedColumns::compute(&ranking, &labels, q.label, config.k)
            })
            .collect::<Result<Vec<_>>>()?;
        let main = main_terms(train, test, config.k)?;
        let meta = MatrixMeta {
            k: config.k,
            t: test.len(),
            train_fingerprint: train.fingerprint(),
            test_fingerprint: test.fingerprint(),
        };
        Ok(Self { n, tests, main, meta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.tests.len()
    }

    pub fn tests(&self) -> &[RankedColumns] {
        &self.tests
    }

    /// Fills `row[j]` for every `j > i` with the test-averaged interaction
    /// of `(i, j)`. Other entries of `row` are left untouched.
    pub fn fill_row(&self, i: usize, row: &mut [f64]) {
        let tail = &mut row[i + 1..self.n];
        tail.fill(0.0);
        for test in &self.tests {
            let pi = test.positions[i];
            let pos = &test.positions[i + 1..];
            for (cell, &pj) in tail.iter_mut().zip(pos) {
                *cell += test.columns[pi.max(pj) as usize];
            }
        }
        let t = self.tests.len() as f64;
        for cell in tail {
            *cell /= t;
        }
    }

    /// Mirrors the upper triangle of row-major `values` (as written by
    /// [`fill_row`](Self::fill_row)) and writes the main terms on the diagonal.
    pub fn finish(&self, values: Vec<f64>) -> Result<InteractionMatrix> {
        let n = self.n;
        let mut m = InteractionMatrix::from_values(n, values, self.meta)?;
        let v = m.values_mut();
        for i in 0..n {
            v[i * n + i] = self.main[i];
            for j in i + 1..n {
                v[j * n + i] = v[i * n + j];
            }
        }
        Ok(m)
    }

    /// Sequential assembly.
    pub fn assemble(&self) -> Result<InteractionMatrix> {
        let n = self.n;
        let mut values = vec![0.0; n * n];
        for (i, row) in values.chunks_mut(n).enumerate() {
            self.fill_row(i, row);
        }
        self.finish(values)
    }
}

/// Test-averaged pair-interaction matrix with main terms on the diagonal.
pub fn sti_knn(train: &Dataset, test: &Dataset, config: &KnnConfig) -> Result<InteractionMatrix> {
    StiPlan::new(train, test, config)?.assemble()
}
