//! Statistics over interaction matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::sti::sti_knn;
use crate::types::{Dataset, InteractionMatrix, KnnConfig, LabelId, Metric};
use crate::valuation::v_score;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    /// Diagonal plus each unordered pair once.
    pub pair_sum: f64,
    /// All `n^2` entries.
    pub full_sum: f64,
    /// `full_sum / n^2`
    pub mean: f64,
    pub v_of_n: f64,
    /// `pair_sum - v_of_n`
    pub residual: f64,
}

pub fn efficiency_report(
    matrix: &InteractionMatrix,
    train: &Dataset,
    test: &Dataset,
    config: &KnnConfig,
) -> Result<EfficiencyReport> {
    let n = matrix.n();
    if n != train.len() {
        return Err(Error::ShapeMismatch { left: n, right: train.len() });
    }
    let mut pair_sum = 0.0;
    for i in 0..n {
        let row = matrix.row(i);
        pair_sum += row[i..].iter().sum::<f64>();
    }
    let full_sum: f64 = matrix.values().iter().sum();
    let all: Vec<usize> = (0..n).collect();
    let v_of_n = v_score(&all, train, test, config)?;
    Ok(EfficiencyReport {
        pair_sum,
        full_sum,
        mean: full_sum / (n * n) as f64,
        v_of_n,
        residual: pair_sum - v_of_n,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    libm::sqrt(var)
}

/// Pearson correlation of two equally sized samples.
pub fn pearson_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::UndefinedCorrelation);
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sab / (libm::sqrt(saa) * libm::sqrt(sbb))).clamp(-1.0, 1.0))
}

/// Pearson correlation of two flattened matrices (diagonal included).
pub fn pearson(a: &InteractionMatrix, b: &InteractionMatrix) -> Result<f64> {
    pearson_slices(a.values(), b.values())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSweep {
    pub ks: Vec<usize>,
    /// Row-major `ks.len() x ks.len()` table of pairwise correlations.
    pub correlations: Vec<f64>,
    /// Standard deviation of each flattened matrix.
    pub stds: Vec<f64>,
}

impl KSweep {
    pub fn correlation(&self, a: usize, b: usize) -> f64 {
        self.correlations[a * self.ks.len() + b]
    }

    pub fn min_correlation(&self) -> f64 {
        self.correlations.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Builds the sweep table from precomputed matrices, one per entry of `ks`.
pub fn k_sweep_from(ks: &[usize], matrices: &[InteractionMatrix]) -> Result<KSweep> {
    if ks.len() != matrices.len() {
        return Err(Error::ShapeMismatch { left: ks.len(), right: matrices.len() });
    }
    let m = ks.len();
    let mut correlations = vec![1.0; m * m];
    for a in 0..m {
        for b in a + 1..m {
            let r = pearson(&matrices[a], &matrices[b])?;
            correlations[a * m + b] = r;
            correlations[b * m + a] = r;
        }
    }
    let stds = matrices.iter().map(|mat| std_dev(mat.values())).collect();
    Ok(KSweep { ks: ks.to_vec(), correlations, stds })
}

pub fn k_sweep(train: &Dataset, test: &Dataset, ks: &[usize], metric: Metric) -> Result<KSweep> {
    let matrices = ks
        .iter()
        .map(|&k| sti_knn(train, test, &KnnConfig::new(k).with_metric(metric)))
        .collect::<Result<Vec<_>>>()?;
    k_sweep_from(ks, &matrices)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassBlock {
    pub row_class: LabelId,
    pub col_class: LabelId,
    pub count: usize,
    pub mean: f64,
    pub mean_abs: f64,
}

/// Mean and mean absolute off-diagonal interaction for every ordered pair of
/// classes that has at least one off-diagonal cell.
pub fn class_block_summary(matrix: &InteractionMatrix, labels: &[LabelId]) -> Result<Vec<ClassBlock>> {
    let n = matrix.n();
    if labels.len() != n {
        return Err(Error::ShapeMismatch { left: n, right: labels.len() });
    }
    let classes = distinct(labels);
    let c = classes.len();
    let slot = |l: LabelId| classes.binary_search(&l).unwrap_or(0);
    let mut sums = vec![(0usize, 0.0f64, 0.0f64); c * c];
    for i in 0..n {
        let a = slot(labels[i]);
        for (j, &v) in matrix.row(i).iter().enumerate() {
            if i != j {
                let cell = &mut sums[a * c + slot(labels[j])];
                cell.0 += 1;
                cell.1 += v;
                cell.2 += libm::fabs(v);
            }
        }
    }
    let mut blocks = Vec::new();
    for a in 0..c {
        for b in 0..c {
            let (count, sum, abs) = sums[a * c + b];
            if count > 0 {
                blocks.push(ClassBlock {
                    row_class: classes[a],
                    col_class: classes[b],
                    count,
                    mean: sum / count as f64,
                    mean_abs: abs / count as f64,
                });
            }
        }
    }
    Ok(blocks)
}

fn distinct(labels: &[LabelId]) -> Vec<LabelId> {
    let mut c = labels.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        ab / (libm::sqrt(aa) * libm::sqrt(bb))
    }
}

/// Per-point mislabel score from matrix rows: cosine similarity to the own
/// class centroid row (excluding the point) minus cosine similarity to the
/// closest other class centroid row. Lower is more suspicious. `None` marks
/// points that are alone in their class.
///
/// Each row's diagonal entry is replaced by the mean of its off-diagonal
/// entries before comparing, so main terms do not dominate the cosines.
pub fn mislabel_scores(matrix: &InteractionMatrix, labels: &[LabelId]) -> Result<Vec<Option<f64>>> {
    let n = matrix.n();
    if labels.len() != n {
        return Err(Error::ShapeMismatch { left: n, right: labels.len() });
    }
    let classes = distinct(labels);
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let slot = |l: LabelId| classes.binary_search(&l).unwrap_or(0);
    let profile = |i: usize, out: &mut [f64]| {
        out.copy_from_slice(matrix.row(i));
        out[i] = 0.0;
        out[i] = out.iter().sum::<f64>() / (n - 1) as f64;
    };
    // centroids up to a positive factor; cosine ignores scale
    let mut sums = vec![vec![0.0; n]; classes.len()];
    let mut sizes = vec![0usize; classes.len()];
    let mut row = vec![0.0; n];
    for (i, &label) in labels.iter().enumerate() {
        let c = slot(label);
        sizes[c] += 1;
        profile(i, &mut row);
        for (s, v) in sums[c].iter_mut().zip(&row) {
            *s += v;
        }
    }
    let mut own = vec![0.0; n];
    Ok((0..n)
        .map(|i| {
            let c = slot(labels[i]);
            if sizes[c] < 2 {
                return None;
            }
            profile(i, &mut row);
            for ((o, s), v) in own.iter_mut().zip(&sums[c]).zip(&row) {
                *o = s - v;
            }
            let other = (0..classes.len())
                .filter(|&d| d != c)
                .map(|d| cosine(&row, &sums[d]))
                .fold(f64::NEG_INFINITY, f64::max);
            Some(cosine(&row, &own) - other)
        })
        .collect())
}

/// Display permutation: by class id, then each coordinate in turn, then
/// original index.
pub fn display_order(dataset: &Dataset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (dataset.point(a), dataset.point(b));
        pa.label
            .cmp(&pb.label)
            .then_with(|| {
                pa.features
                    .iter()
                    .zip(&pb.features)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
            .then(a.cmp(&b))
    });
    order
}
