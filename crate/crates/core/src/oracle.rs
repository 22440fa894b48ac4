//! Brute-force reference answers by enumerating every assignment.
//!
//! Nothing here shares evaluation code with the query engines: the tree
//! joint is the product of its conditional tables, the circuit joint is a
//! recursive evaluation of the node definitions in probability space.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Node};
use crate::clt::Clt;
use crate::data::CellState;
use crate::{Error, Result};

pub const MAX_ORACLE_VARS: usize = 20;

/// A model whose joint log-probability can be read off a full assignment.
pub trait JointModel {
    fn var_count(&self) -> usize;
    fn log_joint(&self, x: &[u8]) -> f64;
}

impl JointModel for Clt {
    fn var_count(&self) -> usize {
        Clt::var_count(self)
    }

    fn log_joint(&self, x: &[u8]) -> f64 {
        let mut p = 1.0;
        for i in 0..x.len() {
            let t = self.log_table(i);
            let s = self.parent(i).map_or(0, |pa| x[pa] as usize);
            p *= t[s][x[i] as usize].exp();
        }
        p.ln()
    }
}

impl JointModel for Circuit {
    fn var_count(&self) -> usize {
        Circuit::var_count(self)
    }

    fn log_joint(&self, x: &[u8]) -> f64 {
        fn prob(c: &Circuit, id: usize, x: &[u8], memo: &mut [Option<f64>]) -> f64 {
            if let Some(p) = memo[id] {
                return p;
            }
            let p = match c.node(id) {
                Node::Leaf { var, log_p } => log_p[x[*var] as usize].exp(),
                Node::Product { children } => children.iter().map(|&ch| prob(c, ch, x, memo)).product(),
                Node::Sum {
                    children,
                    log_weights,
                } => children
                    .iter()
                    .zip(log_weights)
                    .map(|(&ch, w)| w.exp() * prob(c, ch, x, memo))
                    .sum(),
            };
            memo[id] = Some(p);
            p
        }
        let mut memo = vec![None; self.len()];
        prob(self, self.root(), x, &mut memo).ln()
    }
}

/// Assignment for table index `k`: variable 0 is the most significant bit,
/// so increasing `k` walks assignments in lexicographic order.
pub fn assignment(k: usize, vars: usize) -> Vec<u8> {
    (0..vars).map(|i| ((k >> (vars - 1 - i)) & 1) as u8).collect()
}

fn check_size(vars: usize) -> Result<()> {
    if vars > MAX_ORACLE_VARS {
        return Err(Error::TooManyVariables {
            max: MAX_ORACLE_VARS,
            actual: vars,
        });
    }
    Ok(())
}

/// Log-probability of all `2^V` assignments, indexed as in [`assignment`].
pub fn brute_evi_table<M: JointModel + ?Sized>(model: &M) -> Result<Vec<f64>> {
    let v = model.var_count();
    check_size(v)?;
    Ok((0..1usize << v).map(|k| model.log_joint(&assignment(k, v))).collect())
}

fn consistent(k: usize, mask: &[CellState]) -> bool {
    let v = mask.len();
    mask.iter()
        .enumerate()
        .all(|(i, cell)| cell.value().is_none_or(|b| ((k >> (v - 1 - i)) & 1) as u8 == b))
}

fn check_mask<M: JointModel + ?Sized>(model: &M, mask: &[CellState]) -> Result<()> {
    check_size(model.var_count())?;
    if mask.len() != model.var_count() {
        return Err(Error::DimensionMismatch {
            expected: model.var_count(),
            actual: mask.len(),
        });
    }
    Ok(())
}

/// Log of the summed probability of every completion consistent with `mask`.
pub fn brute_mar<M: JointModel + ?Sized>(model: &M, mask: &[CellState]) -> Result<f64> {
    check_mask(model, mask)?;
    Ok(mar_from_table(&brute_evi_table(model)?, mask))
}

/// Best consistent completion; among exact ties the lexicographically
/// smallest assignment wins.
pub fn brute_mpe<M: JointModel + ?Sized>(model: &M, mask: &[CellState]) -> Result<(Vec<u8>, f64)> {
    check_mask(model, mask)?;
    Ok(mpe_from_table(&brute_evi_table(model)?, mask))
}

/// [`brute_mar`] over a table from [`brute_evi_table`], for many masks on one model.
pub fn mar_from_table(table: &[f64], mask: &[CellState]) -> f64 {
    let kept: Vec<f64> = (0..table.len())
        .filter(|&k| consistent(k, mask))
        .map(|k| table[k])
        .collect();
    let top = kept.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + kept.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

/// [`brute_mpe`] over a precomputed table.
pub fn mpe_from_table(table: &[f64], mask: &[CellState]) -> (Vec<u8>, f64) {
    let mut best: Option<usize> = None;
    for k in (0..table.len()).filter(|&k| consistent(k, mask)) {
        if best.is_none_or(|b| table[k] > table[b]) {
            best = Some(k);
        }
    }
    let k = best.expect("at least one completion is consistent");
    (assignment(k, mask.len()), table[k])
}

/// A random tree over `vars` variables for test instances: random root,
/// random attachment order, conditional probabilities drawn from `[lo, 1 - lo]`.
pub fn random_clt(vars: usize, lo: f64, seed: u64) -> Clt {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..vars).collect();
    perm.shuffle(&mut rng);
    let mut parent = vec![None; vars];
    for k in 1..vars {
        parent[perm[k]] = Some(perm[rng.random_range(0..k)]);
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let p: f64 = rng.random_range(lo..=1.0 - lo);
        [(1.0 - p).ln(), p.ln()]
    };
    let prior = draw(&mut rng);
    let cond = (0..vars).map(|_| [draw(&mut rng), draw(&mut rng)]).collect();
    Clt::new(perm[0], parent, prior, cond).expect("random parent links always form a tree")
}
