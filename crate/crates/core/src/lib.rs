//! Exact pair-interaction Shapley values (Shapley-Taylor index) for the
//! KNN valuation function.
//!
//! Training points are players and the game value of a subset `S` is the
//! average, over the test set, of the fraction of the `k` nearest members of
//! `S` that share the test point's label. [`sti::sti_knn`] computes the full
//! `n x n` interaction matrix in `O(t * n^2)`; [`oracle`] evaluates the same
//! index by enumerating all `2^n` coalitions for small `n`.
//!
//! The crate is `no_std` and needs only `alloc`. IO, data generation and the
//! command line live in the `stiknn` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod oracle;
pub mod sti;
pub mod types;
pub mod valuation;

pub use error::{Error, Result};
pub use sti::{main_terms, sti_knn, sti_knn_one_test, StiPlan};
pub use types::{
    intern_labels, Dataset, InteractionMatrix, KnnConfig, LabelId, LabelInterner, LabeledPoint,
    MatrixMeta, Metric, NeighborRanking, Role, SingleTestMatrix,
};
pub use valuation::{loo_values, rank_neighbors, u_single, u_subset, v_score};
