use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use super::validate::{compute_scopes, validate, StructureReport};
use crate::logspace::log_sum_exp;
use crate::{Error, Result};

pub type NodeId = usize;

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Sum {
        children: Vec<NodeId>,
        log_weights: Vec<f64>,
    },
    Product {
        children: Vec<NodeId>,
    },
    /// Bernoulli unit; `log_p[v] = log P(x_var = v)`. An indicator leaf has
    /// one entry equal to 0 and the other `-inf`.
    Leaf { var: usize, log_p: [f64; 2] },
}

impl Node {
    pub fn indicator(var: usize, value: u8) -> Node {
        let mut log_p = [f64::NEG_INFINITY; 2];
        log_p[value as usize] = 0.0;
        Node::Leaf { var, log_p }
    }

    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Sum { children, .. } | Node::Product { children } => children,
            Node::Leaf { .. } => &[],
        }
    }

    /// The forced value of an indicator leaf.
    pub fn indicator_value(&self) -> Option<(usize, u8)> {
        match self {
            Node::Leaf { var, log_p } => match (log_p[0] == 0.0, log_p[1] == 0.0) {
                (true, false) if log_p[1] == f64::NEG_INFINITY => Some((*var, 0)),
                (false, true) if log_p[0] == f64::NEG_INFINITY => Some((*var, 1)),
                _ => None,
            },
            _ => None,
        }
    }
}

/// A valid circuit. Construction checks every arena invariant, so a
/// `Circuit` value is always acyclic, normalized and covers all variables at
/// its root.
#[derive(Debug, Clone)]
pub struct Circuit {
    var_count: usize,
    nodes: Vec<Node>,
    root: NodeId,
    scopes: OnceLock<Vec<FixedBitSet>>,
    report: OnceLock<StructureReport>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.var_count == other.var_count && self.root == other.root && self.nodes == other.nodes
    }
}

impl Circuit {
    pub fn new(var_count: usize, nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        check_arena(var_count, &nodes, root)?;
        let circuit = Circuit {
            var_count,
            nodes,
            root,
            scopes: OnceLock::new(),
            report: OnceLock::new(),
        };
        let root_scope = &circuit.scopes()[root];
        if root_scope.count_ones(..) != var_count {
            return Err(Error::InvariantViolation {
                node: root,
                reason: format!(
                    "root scope covers {} of {var_count} variables",
                    root_scope.count_ones(..)
                ),
            });
        }
        Ok(circuit)
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Variable scope of every node, computed once and cached.
    pub fn scopes(&self) -> &[FixedBitSet] {
        self.scopes.get_or_init(|| compute_scopes(self.var_count, &self.nodes))
    }

    /// Cached [`validate`] result.
    pub fn structure(&self) -> &StructureReport {
        self.report.get_or_init(|| validate(self))
    }
}

/// Checks the arena-level invariants that do not need scopes.
pub(crate) fn check_arena(var_count: usize, nodes: &[Node], root: NodeId) -> Result<()> {
    if var_count == 0 {
        return Err(Error::InvalidArgument("a circuit needs at least one variable".into()));
    }
    if root >= nodes.len() {
        return Err(Error::InvariantViolation {
            node: root,
            reason: format!("root outside arena of {} nodes", nodes.len()),
        });
    }
    for (id, node) in nodes.iter().enumerate() {
        if let Some(&child) = node.children().iter().find(|&&c| c >= id) {
            return Err(Error::DanglingChild { node: id, child });
        }
        match node {
            Node::Sum {
                children,
                log_weights,
            } => {
                if children.is_empty() {
                    return Err(Error::EmptySum { node: id });
                }
                if log_weights.len() != children.len() {
                    return Err(Error::InvariantViolation {
                        node: id,
                        reason: format!("{} weights for {} children", log_weights.len(), children.len()),
                    });
                }
                if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
                    return Err(Error::InvariantViolation {
                        node: id,
                        reason: "weights must be finite or -inf".into(),
                    });
                }
                let total = log_sum_exp(log_weights);
                if !(total.abs() <= NORMALIZATION_TOL) {
                    return Err(Error::UnnormalizedSum {
                        node: id,
                        log_total: total,
                    });
                }
            }
            Node::Product { children } => {
                if children.len() < 2 {
                    return Err(Error::InvariantViolation {
                        node: id,
                        reason: "product unit needs at least two children".into(),
                    });
                }
            }
            Node::Leaf { var, log_p } => {
                if *var >= var_count {
                    return Err(Error::InvariantViolation {
                        node: id,
                        reason: format!("leaf variable {var} out of range"),
                    });
                }
                let total = log_sum_exp(log_p);
                if log_p.iter().any(|w| w.is_nan() || *w == f64::INFINITY) || !(total.abs() <= NORMALIZATION_TOL) {
                    return Err(Error::InvariantViolation {
                        node: id,
                        reason: format!("leaf distribution {log_p:?} is not normalized"),
                    });
                }
            }
        }
    }
    Ok(())
}
