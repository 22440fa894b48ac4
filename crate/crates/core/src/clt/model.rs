use std::collections::VecDeque;

use crate::logspace::log_sum_exp;
use crate::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Laplace pseudo-count added to every cell of the frequency tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingSpec {
    alpha: f64,
}

impl SmoothingSpec {
    pub const DEFAULT_ALPHA: f64 = 0.01;

    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "smoothing alpha must be finite and >= 0, got {alpha}"
            )));
        }
        Ok(SmoothingSpec { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for SmoothingSpec {
    fn default() -> Self {
        SmoothingSpec {
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

/// A tree-shaped Bayesian network over binary variables.
///
/// `log_cpt[i][s][v]` is `log P(x_i = v | x_parent(i) = s)`. The root has no
/// parent; both of its rows hold the prior `log P(x_root = v)`, which lets
/// every query treat the root like any other node.
#[derive(Debug, Clone, PartialEq)]
pub struct Clt {
    root: usize,
    parent: Vec<Option<usize>>,
    order: Vec<usize>,
    child_start: Vec<usize>,
    child_list: Vec<usize>,
    log_cpt: Vec<[[f64; 2]; 2]>,
}

impl Clt {
    /// Builds a tree from parent links, the root prior and the conditional
    /// tables of non-root variables (the root's entry in `log_cond` is ignored).
    pub fn new(
        root: usize,
        parent: Vec<Option<usize>>,
        log_prior: [f64; 2],
        log_cond: Vec<[[f64; 2]; 2]>,
    ) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidTree("no variables".into()));
        }
        if log_cond.len() != n {
            return Err(Error::InvalidTree(format!(
                "{} conditional tables for {n} variables",
                log_cond.len()
            )));
        }
        if root >= n || parent[root].is_some() {
            return Err(Error::InvalidTree(format!("variable {root} is not a parentless root")));
        }
        let mut counts = vec![0usize; n + 1];
        for (i, p) in parent.iter().enumerate() {
            match *p {
                None if i != root => {
                    return Err(Error::InvalidTree(format!("variable {i} has no parent but is not the root")))
                }
                Some(p) if p >= n || p == i => {
                    return Err(Error::InvalidTree(format!("variable {i} has invalid parent {p}")))
                }
                Some(p) => counts[p + 1] += 1,
                None => {}
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let child_start = counts;
        let mut fill = child_start.clone();
        let mut child_list = vec![0; n - 1];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                child_list[fill[p]] = i;
                fill[p] += 1;
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            queue.extend(&child_list[child_start[i]..child_start[i + 1]]);
        }
        if order.len() != n {
            return Err(Error::InvalidTree(format!(
                "only {} of {n} variables are reachable from the root",
                order.len()
            )));
        }
        let mut log_cpt = log_cond;
        log_cpt[root] = [log_prior, log_prior];
        for (i, table) in log_cpt.iter().enumerate() {
            for row in table {
                let total = log_sum_exp(row);
                if row.iter().any(|v| v.is_nan() || *v == f64::INFINITY)
                    || !(total.abs() <= NORMALIZATION_TOL)
                {
                    return Err(Error::InvalidTree(format!(
                        "table of variable {i} is not a normalized distribution ({row:?})"
                    )));
                }
            }
        }
        Ok(Clt {
            root,
            parent,
            order,
            child_start,
            child_list,
            log_cpt,
        })
    }

    pub fn var_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, var: usize) -> Option<usize> {
        self.parent[var]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Root-first breadth-first order; parents always precede children.
    pub fn topo_order(&self) -> &[usize] {
        &self.order
    }

    pub fn children(&self, var: usize) -> &[usize] {
        &self.child_list[self.child_start[var]..self.child_start[var + 1]]
    }

    pub fn log_prior(&self) -> [f64; 2] {
        self.log_cpt[self.root][0]
    }

    /// `log P(x_var = v | x_parent = s)` as `[s][v]`; for the root both rows are the prior.
    pub fn log_table(&self, var: usize) -> [[f64; 2]; 2] {
        self.log_cpt[var]
    }

    /// Undirected tree edges as `(min, max)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i.min(p), i.max(p))))
            .collect();
        edges.sort_unstable();
        edges
    }
}
