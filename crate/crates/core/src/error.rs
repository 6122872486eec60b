use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyDataset,
    ZeroDimension,
    DimensionMismatch { expected: usize, found: usize },
    NonFiniteFeature { point: usize, coord: usize },
    UnknownLabel { point: usize, label: u32 },
    LabelVocabularyMismatch { id: u32 },
    /// `k` is zero or exceeds the training size.
    InvalidK { k: usize, n: usize },
    TooFewPoints { n: usize, min: usize },
    OracleCapExceeded { n: usize, cap: usize },
    OverlappingSubset { index: usize },
    IndexOutOfRange { index: usize, n: usize },
    IdenticalPair { index: usize },
    ShapeMismatch { left: usize, right: usize },
    UndefinedCorrelation,
    SingleClass,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDataset => write!(f, "dataset has no points"),
            Error::ZeroDimension => write!(f, "dataset dimension must be positive"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFiniteFeature { point, coord } => {
                write!(f, "non-finite feature at point {point}, coordinate {coord}")
            }
            Error::UnknownLabel { point, label } => {
                write!(f, "point {point} has label id {label} outside the vocabulary")
            }
            Error::LabelVocabularyMismatch { id } => {
                write!(f, "train and test label vocabularies disagree at id {id}")
            }
            Error::InvalidK { k, n } if *k == 0 => write!(f, "k must be at least 1 (n = {n})"),
            Error::InvalidK { k, n } => write!(f, "k exceeds training size (k = {k}, n = {n})"),
            Error::TooFewPoints { n, min } => {
                write!(f, "training set too small: n = {n}, need at least {min}")
            }
            Error::OracleCapExceeded { n, cap } => {
                write!(f, "brute-force oracle limited to n <= {cap}, got n = {n}")
            }
            Error::OverlappingSubset { index } => {
                write!(f, "subset already contains pair member {index}")
            }
            Error::IndexOutOfRange { index, n } => write!(f, "index {index} out of range for n = {n}"),
            Error::IdenticalPair { index } => write!(f, "pair indices must differ (both {index})"),
            Error::ShapeMismatch { left, right } => {
                write!(f, "shape mismatch: {left} vs {right} elements")
            }
            Error::UndefinedCorrelation => write!(f, "undefined correlation: zero variance input"),
            Error::SingleClass => write!(f, "operation requires at least two classes"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
