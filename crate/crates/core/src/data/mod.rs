//! Typed tabular data: schema, rows, CSV ingestion, sampling and the
//! synthetic worker generator.

pub(crate) mod binning;
mod csv_io;
mod dataset;
mod sampling;
mod schema;
mod synthetic;

pub use binning::{equal_frequency_bins, Binning};
pub use csv_io::{format_number, load_csv, load_csv_path, write_csv, write_csv_string};
pub use dataset::{Dataset, Value, MISSING};
pub use sampling::{bootstrap, bootstrap_indices, stratified_split, BootstrapSample};
pub use schema::{Column, ColumnKind, Schema};
pub use synthetic::{evaluation_band, generate_workers, worker_schema, WORKER_CLASSES};
