use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Circuit, Node};
use crate::serial::{check_version, log_pair, unlog_pair, LogValue};
use crate::{Error, Result};

pub const CIRCUIT_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    format_version: u32,
    var_count: usize,
    root: usize,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum NodeDoc {
    Sum {
        children: Vec<usize>,
        log_weights: Vec<LogValue>,
    },
    Product {
        children: Vec<usize>,
    },
    Leaf {
        var: usize,
        log_p: [LogValue; 2],
    },
}

impl Circuit {
    pub fn to_json(&self) -> String {
        let nodes = self
            .nodes()
            .iter()
            .map(|n| match n {
                Node::Sum {
                    children,
                    log_weights,
                } => NodeDoc::Sum {
                    children: children.clone(),
                    log_weights: log_weights.iter().copied().map(LogValue).collect(),
                },
                Node::Product { children } => NodeDoc::Product {
                    children: children.clone(),
                },
                Node::Leaf { var, log_p } => NodeDoc::Leaf {
                    var: *var,
                    log_p: log_pair(*log_p),
                },
            })
            .collect();
        let doc = CircuitDoc {
            format_version: CIRCUIT_FORMAT_VERSION,
            var_count: self.var_count(),
            root: self.root(),
            nodes,
        };
        serde_json::to_string(&doc).expect("circuit documents always serialize")
    }

    /// Parses a circuit document and re-checks every circuit invariant.
    pub fn from_json(text: &str) -> Result<Self> {
        let value = check_version(text, CIRCUIT_FORMAT_VERSION)?;
        let doc: CircuitDoc = serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        let nodes = doc
            .nodes
            .into_iter()
            .map(|n| match n {
                NodeDoc::Sum {
                    children,
                    log_weights,
                } => Node::Sum {
                    children,
                    log_weights: log_weights.into_iter().map(|w| w.0).collect(),
                },
                NodeDoc::Product { children } => Node::Product { children },
                NodeDoc::Leaf { var, log_p } => Node::Leaf {
                    var,
                    log_p: unlog_pair(log_p),
                },
            })
            .collect();
        Circuit::new(doc.var_count, nodes, doc.root)
    }
}

pub fn save_circuit(c: &Circuit, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, c.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_circuit(path: impl AsRef<Path>) -> Result<Circuit> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Circuit::from_json(&text)
}
