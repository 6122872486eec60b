//! Pairwise data-valuation interactions for K-nearest-neighbour classifiers:
//! file formats, synthetic data, parallel assembly, verification and the
//! command-line front end built on `stiknn-core`.

pub use stiknn_core as core;

pub mod bench;
pub mod datagen;
pub mod dataset_csv;
pub mod error;
pub mod matrix_io;
pub mod openml;
pub mod parallel;
pub mod verify;

pub use error::{Error, Result};
