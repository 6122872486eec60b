//! KNN valuation functions: the per-test likelihood of the right label and
//! its average over a test set, plus the leave-one-out baseline.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::types::{Dataset, KnnConfig, LabelId, Metric, NeighborRanking};

/// Sorts training indices by ascending distance to `query`; ties keep
/// ascending original index.
pub fn rank_neighbors(train: &Dataset, query: &[f64], metric: Metric) -> Result<NeighborRanking> {
    if query.len() != train.dim() {
        return Err(Error::DimensionMismatch { expected: train.dim(), found: query.len() });
    }
    let dist: Vec<f64> = train
        .points()
        .iter()
        .map(|p| metric.distance(&p.features, query))
        .collect();
    let mut order: Vec<usize> = (0..train.len()).collect();
    // stable sort: equal distances stay in index order
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]));
    let distances = order.iter().map(|&i| dist[i]).collect();
    Ok(NeighborRanking { order, distances })
}

/// Singleton valuation: `1/k` when the labels agree, else `0`.
pub fn u_single(train_label: LabelId, test_label: LabelId, k: usize) -> f64 {
    if train_label == test_label {
        1.0 / k as f64
    } else {
        0.0
    }
}

/// Label matches of one test point's neighbors, listed by rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedMatches {
    order: Vec<usize>,
    matches: Vec<bool>,
}

impl RankedMatches {
    pub fn new(ranking: &NeighborRanking, train_labels: &[LabelId], test_label: LabelId) -> Self {
        let matches = ranking.order().iter().map(|&i| train_labels[i] == test_label).collect();
        Self { order: ranking.order().to_vec(), matches }
    }

    /// `matches()[r]` tells whether the rank-`r` neighbor has the test label.
    pub fn matches(&self) -> &[bool] {
        &self.matches
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Valuation of the subset described by `member` (a predicate over
    /// original training indices).
    pub fn value_of(&self, member: impl Fn(usize) -> bool, k: usize) -> f64 {
        let mut taken = 0;
        let mut hits = 0usize;
        for (&i, &m) in self.order.iter().zip(&self.matches) {
            if taken == k {
                break;
            }
            if member(i) {
                taken += 1;
                hits += usize::from(m);
            }
        }
        hits as f64 / k as f64
    }
}

/// Likelihood of the test label among the `min(k, |subset|)` members of
/// `subset` nearest to the test point. The empty subset is worth 0.
pub fn u_subset(
    subset: &[usize],
    ranking: &NeighborRanking,
    train_labels: &[LabelId],
    test_label: LabelId,
    k: usize,
) -> f64 {
    let mut member = vec![false; ranking.len()];
    for &i in subset {
        member[i] = true;
    }
    RankedMatches::new(ranking, train_labels, test_label).value_of(|i| member[i], k)
}

/// Per-test match profiles for a whole test set.
pub fn ranked_matches(train: &Dataset, test: &Dataset, metric: Metric) -> Result<Vec<RankedMatches>> {
    train.check_compatible(test)?;
    let labels = train.labels();
    test.points()
        .iter()
        .map(|q| {
            let r = rank_neighbors(train, &q.features, metric)?;
            Ok(RankedMatches::new(&r, &labels, q.label))
        })
        .collect()
}

/// Mean of the per-test valuations of `subset` over the test set.
pub fn v_score(subset: &[usize], train: &Dataset, test: &Dataset, config: &KnnConfig) -> Result<f64> {
    if config.k == 0 {
        return Err(Error::InvalidK { k: 0, n: train.len() });
    }
    let mut member = vec![false; train.len()];
    for &i in subset {
        *member
            .get_mut(i)
            .ok_or(Error::IndexOutOfRange { index: i, n: train.len() })? = true;
    }
    let profiles = ranked_matches(train, test, config.metric)?;
    let total: f64 = profiles.iter().map(|p| p.value_of(|i| member[i], config.k)).sum();
    Ok(total / test.len() as f64)
}

/// Leave-one-out values `v(N) - v(N \ {i})`.
pub fn loo_values(train: &Dataset, test: &Dataset, config: &KnnConfig) -> Result<Vec<f64>> {
    let n = train.len();
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    if config.k == 0 {
        return Err(Error::InvalidK { k: 0, n });
    }
    let profiles = ranked_matches(train, test, config.metric)?;
    let t = test.len() as f64;
    let full: f64 = profiles.iter().map(|p| p.value_of(|_| true, config.k)).sum::<f64>() / t;
    Ok((0..n)
        .map(|i| {
            let without: f64 = profiles.iter().map(|p| p.value_of(|j| j != i, config.k)).sum();
            full - without / t
        })
        .collect())
}
