use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BitMatrix;
use crate::{Error, Result};

/// Query state of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum CellState {
    #[default]
    Obs0,
    Obs1,
    Marg,
}

impl CellState {
    pub fn observed(bit: bool) -> Self {
        if bit {
            CellState::Obs1
        } else {
            CellState::Obs0
        }
    }

    /// The observed value, or `None` for a marginalized cell.
    #[inline]
    pub fn value(self) -> Option<u8> {
        match self {
            CellState::Obs0 => Some(0),
            CellState::Obs1 => Some(1),
            CellState::Marg => None,
        }
    }
}

/// A batch of partially observed rows, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedBatch {
    rows: usize,
    cols: usize,
    cells: Vec<CellState>,
}

impl MaskedBatch {
    pub fn new(rows: usize, cols: usize, cells: Vec<CellState>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "masked batch of {rows}x{cols} needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        Ok(MaskedBatch { rows, cols, cells })
    }

    /// Builds a batch from rows of `Some(value)` / `None` (marginalized).
    pub fn from_options<R: AsRef<[Option<u8>]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut cells = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::InvalidArgument("ragged masked rows".into()));
            }
            cells.extend(row.iter().map(|v| match v {
                None => CellState::Marg,
                Some(b) => CellState::observed(*b != 0),
            }));
        }
        Self::new(rows.len(), cols, cells)
    }

    /// Every cell observed.
    pub fn observed(data: &BitMatrix) -> Self {
        let mut cells = Vec::with_capacity(data.rows() * data.cols());
        let mut row = vec![0u8; data.cols()];
        for r in 0..data.rows() {
            data.row_into(r, &mut row);
            cells.extend(row.iter().map(|&b| CellState::observed(b == 1)));
        }
        MaskedBatch {
            rows: data.rows(),
            cols: data.cols(),
            cells,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> CellState {
        self.cells[row * self.cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[CellState] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn marg_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == CellState::Marg).count()
    }

    /// The fully observed matrix, if no cell is marginalized.
    pub fn to_bitmatrix(&self) -> Option<BitMatrix> {
        if self.cells.contains(&CellState::Marg) {
            return None;
        }
        BitMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) == CellState::Obs1).ok()
    }
}

/// Marginalization probability and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    p: f64,
    seed: u64,
}

impl MaskSpec {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "marginalization probability {p} outside [0, 1]"
            )));
        }
        Ok(MaskSpec { p, seed })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Marginalizes each cell independently with probability `spec.p`.
///
/// Row `r` reads ChaCha stream `r` of the seeded generator and column `c`
/// consumes the `c`-th 64-bit word of that stream, so each decision depends
/// only on `(seed, r, c)`.
pub fn gen_mask(data: &BitMatrix, spec: MaskSpec) -> MaskedBatch {
    let (rows, cols) = (data.rows(), data.cols());
    let mut cells = Vec::with_capacity(rows * cols);
    let mut row = vec![0u8; cols];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for r in 0..rows {
        data.row_into(r, &mut row);
        rng.set_stream(r as u64);
        rng.set_word_pos(0);
        for &bit in &row {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            cells.push(if u < spec.p {
                CellState::Marg
            } else {
                CellState::observed(bit == 1)
            });
        }
    }
    MaskedBatch { rows, cols, cells }
}
