use crate::{Error, Result};

const WORD_BITS: usize = 64;

/// An `rows x cols` binary matrix stored column by column, 64 rows per word.
///
/// Bits past the last row of each column are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_col: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut cell: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "a dataset needs at least one row and one column, got {rows}x{cols}"
            )));
        }
        let words_per_col = rows.div_ceil(WORD_BITS);
        let mut words = vec![0u64; words_per_col * cols];
        for c in 0..cols {
            let col = &mut words[c * words_per_col..(c + 1) * words_per_col];
            for r in 0..rows {
                if cell(r, c) {
                    col[r / WORD_BITS] |= 1 << (r % WORD_BITS);
                }
            }
        }
        Ok(BitMatrix {
            rows,
            cols,
            words_per_col,
            words,
        })
    }

    /// Builds a matrix from row-major 0/1 values. Any nonzero byte counts as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != cols) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has {} values, expected {cols}",
                rows[bad].as_ref().len()
            )));
        }
        Self::from_fn(rows.len(), cols, |r, c| rows[r].as_ref()[c] != 0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_col(&self) -> usize {
        self.words_per_col
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.rows && col < self.cols);
        let w = self.words[col * self.words_per_col + row / WORD_BITS];
        (w >> (row % WORD_BITS)) & 1 == 1
    }

    /// Packed words of one column.
    #[inline]
    pub fn column(&self, col: usize) -> &[u64] {
        &self.words[col * self.words_per_col..(col + 1) * self.words_per_col]
    }

    pub fn count_ones(&self, col: usize) -> u64 {
        self.column(col).iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Writes row `row` into `out` as 0/1 bytes.
    pub fn row_into(&self, row: usize, out: &mut [u8]) {
        debug_assert_eq!(out.len(), self.cols);
        let word = row / WORD_BITS;
        let shift = row % WORD_BITS;
        for (c, slot) in out.iter_mut().enumerate() {
            *slot = ((self.words[c * self.words_per_col + word] >> shift) & 1) as u8;
        }
    }

    pub fn row(&self, row: usize) -> Vec<u8> {
        let mut out = vec![0; self.cols];
        self.row_into(row, &mut out);
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    /// Rows `start..end` as a new matrix.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.rows {
            return Err(Error::InvalidArgument(format!(
                "row range {start}..{end} outside 0..{}",
                self.rows
            )));
        }
        Self::from_fn(end - start, self.cols, |r, c| self.get(start + r, c))
    }
}
