//! Exact EVI, MAR and MPE queries evaluated directly on a Chow-Liu tree.

use super::Clt;
use crate::data::{BitMatrix, CellState, MaskedBatch};
use crate::logspace::{log_add, LogReal};
use crate::parallel::map_rows;
use crate::{Error, Result};

/// Most probable completion of one query row.
#[derive(Debug, Clone, PartialEq)]
pub struct MpeResult {
    /// Full 0/1 assignment; agrees with every observed cell of the query.
    pub completion: Vec<u8>,
    /// Log-likelihood of `completion`.
    pub log_value: f64,
}

/// A tree prepared for evaluation in precision `T`.
#[derive(Debug, Clone)]
pub struct CltEngine<'a, T> {
    model: &'a Clt,
    log_cpt: Vec<[[T; 2]; 2]>,
    // Parent of each variable; the root points at itself and its two
    // table rows are identical, so the lookup state does not matter.
    parent: Vec<usize>,
}

impl<'a, T: LogReal> CltEngine<'a, T> {
    pub fn new(model: &'a Clt) -> Self {
        let log_cpt = (0..model.var_count())
            .map(|i| model.log_table(i).map(|row| row.map(T::from_f64)))
            .collect();
        let parent = (0..model.var_count())
            .map(|i| model.parent(i).unwrap_or(i))
            .collect();
        CltEngine {
            model,
            log_cpt,
            parent,
        }
    }

    fn check_cols(&self, cols: usize) -> Result<()> {
        if cols != self.model.var_count() {
            return Err(Error::DimensionMismatch {
                expected: self.model.var_count(),
                actual: cols,
            });
        }
        Ok(())
    }

    fn log_joint(&self, x: &[u8]) -> T {
        let mut total = T::zero();
        for (i, table) in self.log_cpt.iter().enumerate() {
            total = total + table[x[self.parent[i]] as usize][x[i] as usize];
        }
        total
    }

    /// Per-row log-likelihood of fully observed rows.
    pub fn evi(&self, batch: &BitMatrix, jobs: usize) -> Result<Vec<f64>> {
        self.check_cols(batch.cols())?;
        map_rows(
            batch.rows(),
            jobs,
            || vec![0u8; batch.cols()],
            |r, row| {
                batch.row_into(r, row);
                self.log_joint(row).to_f64()
            },
        )
    }

    /// Per-row log marginal probability of the observed cells.
    pub fn mar(&self, batch: &MaskedBatch, jobs: usize) -> Result<Vec<f64>> {
        self.check_cols(batch.cols())?;
        map_rows(
            batch.rows(),
            jobs,
            || (vec![[T::zero(); 2]; self.model.var_count()], vec![false; self.model.var_count()]),
            |r, (acc, observed_below)| self.mar_row(batch.row(r), acc, observed_below).to_f64(),
        )
    }

    // Leaf-to-root sum-product messages. `acc[i][v]` accumulates the
    // messages of i's children when x_i = v. A subtree without observed
    // cells sums to one, so its message is exactly zero and is skipped.
    fn mar_row(&self, cells: &[CellState], acc: &mut [[T; 2]], observed_below: &mut [bool]) -> T {
        acc.fill([T::zero(); 2]);
        observed_below.fill(false);
        for &i in self.model.topo_order().iter().rev() {
            let p = self.parent[i];
            if cells[i] == CellState::Marg && !observed_below[i] {
                if i == self.model.root() {
                    return T::zero();
                }
                continue;
            }
            observed_below[p] = true;
            let table = &self.log_cpt[i];
            let mut message = [T::neg_infinity(); 2];
            for (s, slot) in message.iter_mut().enumerate() {
                *slot = match cells[i].value() {
                    Some(v) => table[s][v as usize] + acc[i][v as usize],
                    None => log_add(table[s][0] + acc[i][0], table[s][1] + acc[i][1]),
                };
            }
            if i == self.model.root() {
                return message[0];
            }
            acc[p][0] = acc[p][0] + message[0];
            acc[p][1] = acc[p][1] + message[1];
        }
        unreachable!("topological order always ends at the root")
    }

    /// Most probable completion of each row; ties prefer value 0.
    pub fn mpe(&self, batch: &MaskedBatch, jobs: usize) -> Result<Vec<MpeResult>> {
        self.check_cols(batch.cols())?;
        let v = self.model.var_count();
        map_rows(
            batch.rows(),
            jobs,
            || (vec![[T::zero(); 2]; v], vec![[0u8; 2]; v]),
            |r, (acc, choice)| {
                let completion = self.mpe_row(batch.row(r), acc, choice);
                let log_value = self.log_joint(&completion).to_f64();
                MpeResult {
                    completion,
                    log_value,
                }
            },
        )
    }

    fn mpe_row(&self, cells: &[CellState], acc: &mut [[T; 2]], choice: &mut [[u8; 2]]) -> Vec<u8> {
        acc.fill([T::zero(); 2]);
        for &i in self.model.topo_order().iter().rev() {
            let table = &self.log_cpt[i];
            let mut message = [T::neg_infinity(); 2];
            for s in 0..2 {
                let (value, best) = match cells[i].value() {
                    Some(v) => (v, table[s][v as usize] + acc[i][v as usize]),
                    None => {
                        let zero = table[s][0] + acc[i][0];
                        let one = table[s][1] + acc[i][1];
                        if one > zero {
                            (1, one)
                        } else {
                            (0, zero)
                        }
                    }
                };
                choice[i][s] = value;
                message[s] = best;
            }
            if i != self.model.root() {
                let p = self.parent[i];
                acc[p][0] = acc[p][0] + message[0];
                acc[p][1] = acc[p][1] + message[1];
            }
        }
        let mut x = vec![0u8; cells.len()];
        for &i in self.model.topo_order() {
            x[i] = choice[i][x[self.parent[i]] as usize];
        }
        x
    }
}

pub fn clt_evi(model: &Clt, batch: &BitMatrix, jobs: usize) -> Result<Vec<f64>> {
    CltEngine::<f64>::new(model).evi(batch, jobs)
}

pub fn clt_mar(model: &Clt, batch: &MaskedBatch, jobs: usize) -> Result<Vec<f64>> {
    CltEngine::<f64>::new(model).mar(batch, jobs)
}

pub fn clt_mpe(model: &Clt, batch: &MaskedBatch, jobs: usize) -> Result<Vec<MpeResult>> {
    CltEngine::<f64>::new(model).mpe(batch, jobs)
}
