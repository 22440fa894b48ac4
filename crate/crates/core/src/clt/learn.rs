use std::cmp::Ordering;
use std::collections::VecDeque;

use super::{Clt, SmoothingSpec};
use crate::data::{pairwise_counts, BitMatrix, PairCounts};
use crate::{Error, Result};

/// Pairwise mutual information in nats, as a dense `V x V` table.
///
/// The smoothed joint is `(n_ij(a, b) + alpha) / (N + 4 alpha)` and the
/// marginals are its row and column sums, so every entry is nonnegative.
pub fn mutual_information(counts: &PairCounts, smoothing: SmoothingSpec) -> Vec<Vec<f64>> {
    let v = counts.var_count();
    let alpha = smoothing.alpha();
    let denom = counts.n() as f64 + 4.0 * alpha;
    let mut mi = vec![vec![0.0; v]; v];
    for i in 0..v {
        for j in i..v {
            let raw = counts.joint(i, j);
            let mut p = [[0.0f64; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    p[a][b] = (raw[a][b] as f64 + alpha) / denom;
                }
            }
            let pi = [p[0][0] + p[0][1], p[1][0] + p[1][1]];
            let pj = [p[0][0] + p[1][0], p[0][1] + p[1][1]];
            let mut total = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    if p[a][b] > 0.0 {
                        total += p[a][b] * (p[a][b] / (pi[a] * pj[b])).ln();
                    }
                }
            }
            mi[i][j] = total;
            mi[j][i] = total;
        }
    }
    mi
}

/// Maximum spanning tree of a dense symmetric weight matrix (Prim, started at 0).
///
/// Among equal-weight candidate edges the one whose `(min, max)` endpoint
/// pair is lexicographically smallest is taken. Returns sorted `(min, max)` edges.
pub fn maximum_spanning_tree(weights: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let n = weights.len();
    let pair = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return edges;
    }
    let mut in_tree = vec![false; n];
    // Best known edge from the tree to each outside vertex.
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut best_from = vec![usize::MAX; n];
    in_tree[0] = true;
    let mut last = 0;
    for _ in 1..n {
        for v in (0..n).filter(|&v| !in_tree[v]) {
            let w = weights[last][v];
            if best_from[v] == usize::MAX
                || w > best[v]
                || (w == best[v] && pair(last, v) < pair(best_from[v], v))
            {
                best[v] = w;
                best_from[v] = last;
            }
        }
        let mut pick: Option<usize> = None;
        for v in (0..n).filter(|&v| !in_tree[v]) {
            pick = Some(match pick {
                None => v,
                Some(u) => match best[v].partial_cmp(&best[u]) {
                    Some(Ordering::Greater) => v,
                    Some(Ordering::Equal) if pair(best_from[v], v) < pair(best_from[u], u) => v,
                    _ => u,
                },
            });
        }
        let v = pick.expect("an outside vertex remains while the tree is incomplete");
        edges.push(pair(best_from[v], v));
        in_tree[v] = true;
        last = v;
    }
    edges.sort_unstable();
    edges
}

/// Learns a Chow-Liu tree: maximum-MI spanning tree rooted at `root`
/// (default variable 0), with Laplace-smoothed conditional tables.
pub fn fit_clt(
    data: &BitMatrix,
    smoothing: SmoothingSpec,
    root: Option<usize>,
    jobs: usize,
) -> Result<Clt> {
    let v = data.cols();
    let root = root.unwrap_or(0);
    if root >= v {
        return Err(Error::InvalidArgument(format!(
            "root {root} out of range for {v} variables"
        )));
    }
    let counts = pairwise_counts(data, jobs)?;
    let mi = mutual_information(&counts, smoothing);
    let edges = maximum_spanning_tree(&mi);

    let mut adjacent = vec![Vec::new(); v];
    for &(a, b) in &edges {
        adjacent[a].push(b);
        adjacent[b].push(a);
    }
    let mut parent = vec![None; v];
    let mut seen = vec![false; v];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        adjacent[i].sort_unstable();
        for &j in &adjacent[i] {
            if !seen[j] {
                seen[j] = true;
                parent[j] = Some(i);
                queue.push_back(j);
            }
        }
    }

    let alpha = smoothing.alpha();
    let n = counts.n() as f64;
    let root_ones = counts.ones(root) as f64;
    let root_denom = n + 2.0 * alpha;
    let log_prior = [
        ((n - root_ones + alpha) / root_denom).ln(),
        ((root_ones + alpha) / root_denom).ln(),
    ];
    let mut log_cond = vec![[[0.0; 2]; 2]; v];
    for i in 0..v {
        let Some(p) = parent[i] else { continue };
        let joint = counts.joint(i, p);
        for s in 0..2 {
            let parent_count = (joint[0][s] + joint[1][s]) as f64;
            let denom = parent_count + 2.0 * alpha;
            if denom == 0.0 {
                return Err(Error::DegenerateTable {
                    var: i,
                    parent: Some(p),
                    state: s as u8,
                });
            }
            for value in 0..2 {
                log_cond[i][s][value] = ((joint[value][s] as f64 + alpha) / denom).ln();
            }
        }
    }
    Clt::new(root, parent, log_prior, log_cond)
}
