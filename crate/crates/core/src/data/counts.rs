use super::BitMatrix;
use crate::parallel::map_rows;
use crate::Result;

/// Pairwise co-occurrence counts `n_ij(a, b)` for every ordered variable pair.
///
/// Only the `(1, 1)` counts and the per-column one-counts are stored; the
/// other three cells of each 2x2 table follow from them and `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCounts {
    n: u64,
    vars: usize,
    ones: Vec<u64>,
    both: Vec<u64>,
}

impl PairCounts {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn var_count(&self) -> usize {
        self.vars
    }

    /// Number of rows where variable `i` is 1.
    pub fn ones(&self, i: usize) -> u64 {
        self.ones[i]
    }

    /// `joint(i, j)[a][b]` = number of rows with `x_i = a` and `x_j = b`.
    pub fn joint(&self, i: usize, j: usize) -> [[u64; 2]; 2] {
        let n11 = self.both[i * self.vars + j];
        let n10 = self.ones[i] - n11;
        let n01 = self.ones[j] - n11;
        let n00 = self.n - n11 - n10 - n01;
        [[n00, n01], [n10, n11]]
    }
}

/// Counts co-occurrences with word-wise AND and popcount, over `jobs` workers.
pub fn pairwise_counts(data: &BitMatrix, jobs: usize) -> Result<PairCounts> {
    let vars = data.cols();
    let upper = map_rows(
        vars,
        jobs,
        || (),
        |i, _| {
            let ci = data.column(i);
            (i..vars)
                .map(|j| {
                    ci.iter()
                        .zip(data.column(j))
                        .map(|(a, b)| (a & b).count_ones() as u64)
                        .sum::<u64>()
                })
                .collect::<Vec<u64>>()
        },
    )?;
    let mut both = vec![0u64; vars * vars];
    for (i, row) in upper.iter().enumerate() {
        for (k, &count) in row.iter().enumerate() {
            let j = i + k;
            both[i * vars + j] = count;
            both[j * vars + i] = count;
        }
    }
    let ones = (0..vars).map(|i| both[i * vars + i]).collect();
    Ok(PairCounts {
        n: data.rows() as u64,
        vars,
        ones,
        both,
    })
}
