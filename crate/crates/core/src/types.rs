//! Domain types shared by every algorithm in the crate.
//!
//! All types are immutable once built. A [`Dataset`] owns its points in a
//! fixed order, and that order is the row/column identity of every
//! [`InteractionMatrix`] computed from it.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Dense integer id of an interned class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelId(pub u32);

impl LabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Maps label strings to dense ids in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelInterner {
    names: Vec<String>,
    ids: BTreeMap<String, LabelId>,
}

impl LabelInterner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an interner that already knows `names`, in order.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Self {
        let mut interner = Self::new();
        for name in names {
            interner.intern(name.as_ref());
        }
        interner
    }

    pub fn intern(&mut self, name: &str) -> LabelId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = LabelId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<LabelId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: LabelId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Interns `raw` labels, returning the mapping and the per-item ids.
pub fn intern_labels<S: AsRef<str>>(raw: &[S]) -> (LabelInterner, Vec<LabelId>) {
    let mut interner = LabelInterner::new();
    let ids = raw.iter().map(|s| interner.intern(s.as_ref())).collect();
    (interner, ids)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub features: Vec<f64>,
    pub label: LabelId,
}

impl LabeledPoint {
    pub fn new(features: Vec<f64>, label: LabelId) -> Self {
        Self { features, label }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Role {
    #[default]
    Train,
    Test,
}

/// An ordered, validated collection of labeled points.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<LabeledPoint>,
    label_names: Vec<String>,
    dim: usize,
    role: Role,
}

impl Dataset {
    /// Validates and wraps `points`. `label_names[id]` is the name of label id `id`.
    pub fn new(points: Vec<LabeledPoint>, label_names: Vec<String>, role: Role) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            if let Some(coord) = p.features.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFiniteFeature { point: i, coord });
            }
            if p.label.index() >= label_names.len() {
                return Err(Error::UnknownLabel { point: i, label: p.label.0 });
            }
        }
        Ok(Self { points, label_names, dim, role })
    }

    /// Builds a dataset from parallel feature rows and label strings.
    pub fn from_rows<S: AsRef<str>>(rows: &[Vec<f64>], labels: &[S], role: Role) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::ShapeMismatch { left: rows.len(), right: labels.len() });
        }
        let (interner, ids) = intern_labels(labels);
        let points = rows
            .iter()
            .zip(ids)
            .map(|(r, id)| LabeledPoint::new(r.clone(), id))
            .collect();
        Self::new(points, interner.names().to_vec(), role)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false for a constructed dataset; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &LabeledPoint {
        &self.points[i]
    }

    pub fn label(&self, i: usize) -> LabelId {
        self.points[i].label
    }

    pub fn labels(&self) -> Vec<LabelId> {
        self.points.iter().map(|p| p.label).collect()
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        &self.label_names[id.index()]
    }

    /// Distinct label ids present in the dataset, ascending.
    pub fn classes(&self) -> Vec<LabelId> {
        let mut seen: Vec<LabelId> = self.labels();
        seen.sort_unstable();
        seen.dedup();
        seen
    }

    /// Keeps the points at `indices`, in that order, with the same vocabulary.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let points = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: i, n: self.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, self.label_names.clone(), self.role)
    }

    /// Returns a copy with relabeled points; `labels` must index the same vocabulary.
    pub fn relabeled(&self, labels: &[LabelId]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::ShapeMismatch { left: self.len(), right: labels.len() });
        }
        let points = self
            .points
            .iter()
            .zip(labels)
            .map(|(p, &l)| LabeledPoint::new(p.features.clone(), l))
            .collect();
        Self::new(points, self.label_names.clone(), self.role)
    }

    /// Checks that `other` can be paired with `self`: same dimension and
    /// label vocabularies that agree on every id they share.
    pub fn check_compatible(&self, other: &Dataset) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let shared = self.label_names.len().min(other.label_names.len());
        if let Some(id) = (0..shared).find(|&i| self.label_names[i] != other.label_names[i]) {
            return Err(Error::LabelVocabularyMismatch { id: id as u32 });
        }
        Ok(())
    }

    /// FNV-1a hash over dimension, coordinates, and label names.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.write(&(self.dim as u64).to_le_bytes());
        for p in &self.points {
            for x in &p.features {
                h.write(&x.to_bits().to_le_bytes());
            }
            h.write(self.label_name(p.label).as_bytes());
            h.write(&[0xff]);
        }
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Distance used to rank training points against a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| x - y);
        match self {
            Metric::Euclidean => libm::sqrt(diffs.map(|d| d * d).sum()),
            Metric::Manhattan => diffs.map(libm::fabs).sum(),
            Metric::Chebyshev => diffs.map(libm::fabs).fold(0.0, f64::max),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Chebyshev => "chebyshev",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "euclidean" | "l2" => Some(Metric::Euclidean),
            "manhattan" | "l1" => Some(Metric::Manhattan),
            "chebyshev" | "linf" => Some(Metric::Chebyshev),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: Metric,
}

impl KnnConfig {
    pub fn new(k: usize) -> Self {
        Self { k, metric: Metric::Euclidean }
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    /// Requires `1 <= k <= n`.
    pub fn check_against(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidK { k: self.k, n });
        }
        Ok(())
    }
}

/// Training indices sorted by ascending distance to one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborRanking {
    pub(crate) order: Vec<usize>,
    pub(crate) distances: Vec<f64>,
}

impl NeighborRanking {
    /// Original training indices, nearest first (0-based).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `positions()[i]` is the rank (0 = nearest) of training index `i`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = alloc::vec![0; self.order.len()];
        for (rank, &i) in self.order.iter().enumerate() {
            pos[i] = rank;
        }
        pos
    }
}

/// Provenance recorded alongside a computed matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatrixMeta {
    pub k: usize,
    pub t: usize,
    pub train_fingerprint: u64,
    pub test_fingerprint: u64,
}

/// Square, symmetric matrix of pair interactions (off-diagonal) and main
/// terms (diagonal), stored row-major in training-set order.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    n: usize,
    values: Vec<f64>,
    meta: MatrixMeta,
}

impl InteractionMatrix {
    pub fn from_values(n: usize, values: Vec<f64>, meta: MatrixMeta) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch { left: n * n, right: values.len() });
        }
        Ok(Self { n, values, meta })
    }

    pub fn zeros(n: usize, meta: MatrixMeta) -> Self {
        Self { n, values: alloc::vec![0.0; n * n], meta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn meta(&self) -> &MatrixMeta {
        &self.meta
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Bitwise symmetry check.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }

    /// Reordered view: entry `(a, b)` of the result is `(perm[a], perm[b])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::ShapeMismatch { left: self.n, right: perm.len() });
        }
        let mut seen = alloc::vec![false; self.n];
        for &p in perm {
            if p >= self.n || core::mem::replace(&mut seen[p], true) {
                return Err(Error::IndexOutOfRange { index: p, n: self.n });
            }
        }
        let mut values = Vec::with_capacity(self.n * self.n);
        for &a in perm {
            values.extend(perm.iter().map(|&b| self.get(a, b)));
        }
        Ok(Self { n: self.n, values, meta: self.meta })
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Interactions relative to a single test point, in training-set order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleTestMatrix {
    pub(crate) n: usize,
    pub(crate) values: Vec<f64>,
}

impl SingleTestMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
