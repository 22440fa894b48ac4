//! Compilation of a Chow-Liu tree into an equivalent probabilistic circuit.
//!
//! For every tree variable `i` and value `v` a branch unit
//! `B(i, v) = x_i=v * S(c, v) for each child c` is emitted (just the
//! indicator when `i` is a tree leaf). Every non-root `i` gets two sum units
//! `S(i, s) = sum_v P(x_i = v | x_parent = s) B(i, v)`, sharing the two
//! branch units; the root gets one sum over its prior. The result has
//! `2(V-1)+1` sums, `2V` indicator leaves and two products per internal tree
//! node, and it is smooth, decomposable and deterministic.

use crate::circuit::{Circuit, Node, NodeId};
use crate::clt::Clt;
use crate::Result;

pub fn compile_clt(model: &Clt) -> Result<Circuit> {
    let v = model.var_count();
    let mut nodes: Vec<Node> = Vec::with_capacity(6 * v);
    // sums[i][s] = id of S(i, s); the root stores its single sum in both slots.
    let mut sums: Vec<[NodeId; 2]> = vec![[usize::MAX; 2]; v];
    for &i in model.topo_order().iter().rev() {
        let children = model.children(i);
        let mut branch = [0; 2];
        for value in 0..2u8 {
            nodes.push(Node::indicator(i, value));
            let leaf = nodes.len() - 1;
            branch[value as usize] = if children.is_empty() {
                leaf
            } else {
                let mut factors = Vec::with_capacity(children.len() + 1);
                factors.push(leaf);
                factors.extend(children.iter().map(|&c| sums[c][value as usize]));
                nodes.push(Node::Product { children: factors });
                nodes.len() - 1
            };
        }
        let table = model.log_table(i);
        let states = if i == model.root() { 1 } else { 2 };
        for s in 0..states {
            nodes.push(Node::Sum {
                children: branch.to_vec(),
                log_weights: table[s].to_vec(),
            });
            sums[i][s] = nodes.len() - 1;
        }
        if states == 1 {
            sums[i][1] = sums[i][0];
        }
    }
    let root = sums[model.root()][0];
    Circuit::new(v, nodes, root)
}
