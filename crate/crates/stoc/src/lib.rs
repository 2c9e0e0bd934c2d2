//! Self-trained one-class classification for unsupervised anomaly
//! detection on tabular data.
//!
//! Training data is unlabeled and may be contaminated with anomalies. An
//! ensemble of one-class classifiers, each fitted on a disjoint subset of
//! the data, flags its top-scoring rows; rows flagged by any member are
//! dropped, and the surviving rows train the final scorer. Optionally a
//! transformation-classification representation is trained jointly,
//! re-refining the pool on a fixed epoch schedule.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod occ;
pub mod pipeline;
pub mod refine;
pub mod repr;
pub mod seed;

pub use error::{Result, StocError};
pub use matrix::Matrix;
pub use pipeline::{Mode, StocConfig, StocPipeline};
