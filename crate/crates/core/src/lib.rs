//! Decision-tree ensembles for tabular classification.
//!
//! The crate covers the whole evaluation pipeline: typed CSV data and a
//! synthetic worker generator ([`data`]), chi-square feature screening
//! ([`feature_select`]), CART / CHAID / Exhaustive CHAID trees ([`tree`]),
//! bagging, SAMME boosting, random forests and heterogeneous voting
//! ([`ensemble`]), evaluation ([`metrics`]) and the end-to-end driver used
//! by the `treevote` binary ([`pipeline`]).

pub mod data;
pub mod error;
pub mod feature_select;
pub mod rng;

pub use error::{Error, Result};
pub use rng::SeededRng;
pub mod ensemble;
pub mod metrics;
pub mod pipeline;
pub mod tree;
