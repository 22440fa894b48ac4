//! Orchestration behind the `treepc` command-line tool: model files, the
//! benchmark protocol and its report.

pub mod bench;
pub mod model;

pub use bench::{run_bench, write_report, BenchConfig, BenchReport};
pub use model::{load_model, Model};
