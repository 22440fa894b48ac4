use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Node};
use crate::clt::MpeResult;
use crate::data::{BitMatrix, CellState, MaskedBatch};
use crate::logspace::LogReal;
use crate::parallel::{map_rows, try_map_rows};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
enum Unit<T> {
    Sum { start: u32, end: u32 },
    Product { start: u32, end: u32 },
    Leaf { var: u32, log_p: [T; 2] },
}

/// Per-worker scratch: one value (and one recorded choice) per arena node.
#[derive(Debug, Clone)]
pub struct EvalBuffer<T> {
    values: Vec<T>,
    choice: Vec<u32>,
    cells: Vec<CellState>,
    stack: Vec<u32>,
}

impl<T: LogReal> EvalBuffer<T> {
    fn new(nodes: usize, vars: usize) -> Self {
        EvalBuffer {
            values: vec![T::zero(); nodes],
            choice: vec![0; nodes],
            cells: vec![CellState::Marg; vars],
            stack: Vec::new(),
        }
    }
}

/// MPE completions plus whether they are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct MpeBatch {
    pub results: Vec<MpeResult>,
    /// True when the circuit is deterministic, so max-product is exact;
    /// otherwise each `log_value` is a lower bound on the true maximum.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub completions: BitMatrix,
    pub log_values: Vec<f64>,
}

/// A circuit flattened for evaluation in precision `T`.
#[derive(Debug, Clone)]
pub struct Engine<'c, T> {
    circuit: &'c Circuit,
    units: Vec<Unit<T>>,
    children: Vec<u32>,
    // Aligned with `children`; only meaningful for sum units.
    log_weights: Vec<T>,
}

impl<'c, T: LogReal> Engine<'c, T> {
    pub fn new(circuit: &'c Circuit) -> Self {
        // Nodes after the root cannot be reached from it.
        let live = &circuit.nodes()[..=circuit.root()];
        let mut units = Vec::with_capacity(live.len());
        let mut children = Vec::new();
        let mut log_weights = Vec::new();
        for node in live {
            let start = children.len() as u32;
            let unit = match node {
                Node::Sum {
                    children: ch,
                    log_weights: w,
                } => {
                    children.extend(ch.iter().map(|&c| c as u32));
                    log_weights.extend(w.iter().map(|&x| T::from_f64(x)));
                    Unit::Sum {
                        start,
                        end: children.len() as u32,
                    }
                }
                Node::Product { children: ch } => {
                    children.extend(ch.iter().map(|&c| c as u32));
                    log_weights.extend(ch.iter().map(|_| T::zero()));
                    Unit::Product {
                        start,
                        end: children.len() as u32,
                    }
                }
                Node::Leaf { var, log_p } => Unit::Leaf {
                    var: *var as u32,
                    log_p: log_p.map(T::from_f64),
                },
            };
            units.push(unit);
        }
        Engine {
            circuit,
            units,
            children,
            log_weights,
        }
    }

    pub fn circuit(&self) -> &Circuit {
        self.circuit
    }

    fn check_cols(&self, cols: usize) -> Result<()> {
        if cols != self.circuit.var_count() {
            return Err(Error::DimensionMismatch {
                expected: self.circuit.var_count(),
                actual: cols,
            });
        }
        Ok(())
    }

    fn buffer(&self) -> EvalBuffer<T> {
        EvalBuffer::new(self.units.len(), self.circuit.var_count())
    }

    /// Sum-product pass; marginalized leaves evaluate to `log 1`.
    fn forward(&self, cells: &[CellState], values: &mut [T]) -> T {
        for (id, unit) in self.units.iter().enumerate() {
            values[id] = match *unit {
                Unit::Leaf { var, log_p } => match cells[var as usize] {
                    CellState::Obs0 => log_p[0],
                    CellState::Obs1 => log_p[1],
                    CellState::Marg => T::zero(),
                },
                Unit::Product { start, end } => self.children[start as usize..end as usize]
                    .iter()
                    .fold(T::zero(), |acc, &c| acc + values[c as usize]),
                Unit::Sum { start, end } => {
                    let (start, end) = (start as usize, end as usize);
                    let mut max = T::neg_infinity();
                    for k in start..end {
                        let v = self.log_weights[k] + values[self.children[k] as usize];
                        if v > max {
                            max = v;
                        }
                    }
                    if max == T::neg_infinity() {
                        max
                    } else {
                        let mut total = T::zero();
                        for k in start..end {
                            total = total + (self.log_weights[k] + values[self.children[k] as usize] - max).exp();
                        }
                        max + total.ln()
                    }
                }
            };
        }
        values[values.len() - 1]
    }

    fn evi_row(&self, x: &[u8], buf: &mut EvalBuffer<T>) -> T {
        for (cell, &b) in buf.cells.iter_mut().zip(x) {
            *cell = CellState::observed(b == 1);
        }
        self.forward(&buf.cells, &mut buf.values)
    }

    /// Per-row log-likelihood of fully observed rows.
    pub fn evi(&self, batch: &BitMatrix, jobs: usize) -> Result<Vec<f64>> {
        self.check_cols(batch.cols())?;
        map_rows(
            batch.rows(),
            jobs,
            || (self.buffer(), vec![0u8; batch.cols()]),
            |r, (buf, row)| {
                batch.row_into(r, row);
                self.evi_row(row, buf).to_f64()
            },
        )
    }

    /// Per-row log marginal probability of the observed cells.
    pub fn mar(&self, batch: &MaskedBatch, jobs: usize) -> Result<Vec<f64>> {
        self.check_cols(batch.cols())?;
        map_rows(
            batch.rows(),
            jobs,
            || self.buffer(),
            |r, buf| self.forward(batch.row(r), &mut buf.values).to_f64(),
        )
    }

    /// Max-product pass recording the best child of every sum and the best
    /// value of every marginalized leaf. Ties go to the lower index.
    fn max_forward(&self, cells: &[CellState], values: &mut [T], choice: &mut [u32]) {
        for (id, unit) in self.units.iter().enumerate() {
            values[id] = match *unit {
                Unit::Leaf { var, log_p } => match cells[var as usize] {
                    CellState::Obs0 => log_p[0],
                    CellState::Obs1 => log_p[1],
                    CellState::Marg => {
                        let pick = u32::from(log_p[1] > log_p[0]);
                        choice[id] = pick;
                        log_p[pick as usize]
                    }
                },
                Unit::Product { start, end } => self.children[start as usize..end as usize]
                    .iter()
                    .fold(T::zero(), |acc, &c| acc + values[c as usize]),
                Unit::Sum { start, end } => {
                    let (start, end) = (start as usize, end as usize);
                    let mut best = start;
                    let mut best_value = self.log_weights[start] + values[self.children[start] as usize];
                    for k in start + 1..end {
                        let v = self.log_weights[k] + values[self.children[k] as usize];
                        if v > best_value {
                            best = k;
                            best_value = v;
                        }
                    }
                    choice[id] = (best - start) as u32;
                    best_value
                }
            };
        }
    }

    /// Most probable completion of each row.
    pub fn mpe(&self, batch: &MaskedBatch, jobs: usize) -> Result<MpeBatch> {
        self.check_cols(batch.cols())?;
        let exact = self.circuit.structure().is_deterministic();
        let results = map_rows(
            batch.rows(),
            jobs,
            || self.buffer(),
            |r, buf| {
                let cells = batch.row(r);
                self.max_forward(cells, &mut buf.values, &mut buf.choice);
                let mut x: Vec<u8> = cells.iter().map(|c| c.value().unwrap_or(0)).collect();
                buf.stack.clear();
                buf.stack.push((self.units.len() - 1) as u32);
                while let Some(id) = buf.stack.pop() {
                    match self.units[id as usize] {
                        Unit::Leaf { var, .. } => {
                            if cells[var as usize] == CellState::Marg {
                                x[var as usize] = buf.choice[id as usize] as u8;
                            }
                        }
                        Unit::Product { start, end } => {
                            buf.stack.extend_from_slice(&self.children[start as usize..end as usize])
                        }
                        Unit::Sum { start, .. } => {
                            buf.stack.push(self.children[start as usize + buf.choice[id as usize] as usize])
                        }
                    }
                }
                let log_value = self.evi_row(&x, buf).to_f64();
                MpeResult {
                    completion: x,
                    log_value,
                }
            },
        )?;
        Ok(MpeBatch { results, exact })
    }

    /// Draws one completion per row from the circuit's conditional
    /// distribution given the observed cells.
    ///
    /// Row `r` uses ChaCha stream `r` of `seed`.
    pub fn conditional_sample(&self, batch: &MaskedBatch, seed: u64, jobs: usize) -> Result<SampleBatch> {
        self.check_cols(batch.cols())?;
        let rows = try_map_rows(
            batch.rows(),
            jobs,
            || (self.buffer(), ChaCha8Rng::seed_from_u64(seed)),
            |r, (buf, rng)| {
                let cells = batch.row(r);
                let total = self.forward(cells, &mut buf.values);
                if total == T::neg_infinity() {
                    return Err(Error::ZeroEvidenceProbability { row: r });
                }
                rng.set_stream(r as u64);
                rng.set_word_pos(0);
                let mut x: Vec<u8> = cells.iter().map(|c| c.value().unwrap_or(0)).collect();
                buf.stack.clear();
                buf.stack.push((self.units.len() - 1) as u32);
                while let Some(id) = buf.stack.pop() {
                    match self.units[id as usize] {
                        Unit::Leaf { var, log_p } => {
                            if cells[var as usize] == CellState::Marg {
                                let u: f64 = rng.random();
                                x[var as usize] = u8::from(u >= log_p[0].to_f64().exp());
                            }
                        }
                        Unit::Product { start, end } => {
                            buf.stack.extend_from_slice(&self.children[start as usize..end as usize])
                        }
                        Unit::Sum { start, end } => {
                            let node_value = buf.values[id as usize];
                            let u: f64 = rng.random();
                            let mut acc = 0.0;
                            let mut pick = None;
                            for k in start as usize..end as usize {
                                let lw = self.log_weights[k] + buf.values[self.children[k] as usize];
                                let p = (lw - node_value).to_f64().exp();
                                if p > 0.0 {
                                    acc += p;
                                    pick = Some(k);
                                    if u < acc {
                                        break;
                                    }
                                }
                            }
                            let k = pick.expect("a sum with finite value has a positive branch");
                            buf.stack.push(self.children[k]);
                        }
                    }
                }
                let log_value = self.evi_row(&x, buf).to_f64();
                Ok((x, log_value))
            },
        )?;
        let (completions, log_values): (Vec<Vec<u8>>, Vec<f64>) = rows.into_iter().unzip();
        Ok(SampleBatch {
            completions: BitMatrix::from_rows(&completions)?,
            log_values,
        })
    }
}
