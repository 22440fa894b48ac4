//! Binary datasets: bit-packed storage, CSV ingestion, pairwise co-occurrence
//! counts and random marginalization masks.

mod bitmatrix;
mod counts;
mod csv;
mod manifest;
mod mask;

pub use bitmatrix::BitMatrix;
pub use counts::{pairwise_counts, PairCounts};
pub use csv::{load_binary_csv, parse_binary_csv, write_binary_csv};
pub use manifest::{DatasetEntry, Manifest};
pub use mask::{gen_mask, CellState, MaskSpec, MaskedBatch};
