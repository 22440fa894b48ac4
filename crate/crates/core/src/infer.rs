//! Batch queries over probabilistic circuits.
//!
//! All queries run one forward scan of the arena per row, in log-space, with
//! rows spread over `jobs` workers. Results never depend on `jobs`.

mod engine;

pub use engine::{Engine, EvalBuffer, MpeBatch, SampleBatch};

use crate::circuit::Circuit;
use crate::data::{BitMatrix, MaskedBatch};
use crate::Result;

/// The query classes the engine answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Evi,
    Mar,
    Mpe,
    ConditionalSample,
}

impl QueryKind {
    pub const ALL: [QueryKind; 4] = [
        QueryKind::Evi,
        QueryKind::Mar,
        QueryKind::Mpe,
        QueryKind::ConditionalSample,
    ];

    pub fn label(self) -> &'static str {
        match self {
            QueryKind::Evi => "EVI",
            QueryKind::Mar => "MAR",
            QueryKind::Mpe => "MPE",
            QueryKind::ConditionalSample => "C.Sampling",
        }
    }
}

pub fn pc_evi(c: &Circuit, batch: &BitMatrix, jobs: usize) -> Result<Vec<f64>> {
    Engine::<f64>::new(c).evi(batch, jobs)
}

pub fn pc_mar(c: &Circuit, batch: &MaskedBatch, jobs: usize) -> Result<Vec<f64>> {
    Engine::<f64>::new(c).mar(batch, jobs)
}

pub fn pc_mpe(c: &Circuit, batch: &MaskedBatch, jobs: usize) -> Result<MpeBatch> {
    Engine::<f64>::new(c).mpe(batch, jobs)
}

pub fn pc_conditional_sample(c: &Circuit, batch: &MaskedBatch, seed: u64, jobs: usize) -> Result<SampleBatch> {
    Engine::<f64>::new(c).conditional_sample(batch, seed, jobs)
}
