use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Clt;
use crate::serial::{check_version, log_pair, unlog_pair, LogValue};
use crate::{Error, Result};

pub const CLT_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CltDoc {
    format_version: u32,
    var_count: usize,
    root: usize,
    parents: Vec<Option<usize>>,
    log_factors: Vec<FactorDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FactorDoc {
    /// `log P(x = v)` for the root.
    Prior([LogValue; 2]),
    /// `log P(x = v | x_parent = s)` as `[s][v]`.
    Conditional([[LogValue; 2]; 2]),
}

impl Clt {
    pub fn to_json(&self) -> String {
        let log_factors = (0..self.var_count())
            .map(|i| {
                let t = self.log_table(i);
                if i == self.root() {
                    FactorDoc::Prior(log_pair(t[0]))
                } else {
                    FactorDoc::Conditional(t.map(log_pair))
                }
            })
            .collect();
        let doc = CltDoc {
            format_version: CLT_FORMAT_VERSION,
            var_count: self.var_count(),
            root: self.root(),
            parents: self.parents().to_vec(),
            log_factors,
        };
        serde_json::to_string_pretty(&doc).expect("tree documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value = check_version(text, CLT_FORMAT_VERSION)?;
        let doc: CltDoc = serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        if doc.parents.len() != doc.var_count || doc.log_factors.len() != doc.var_count {
            return Err(Error::Format(format!(
                "var_count {} disagrees with {} parents and {} factors",
                doc.var_count,
                doc.parents.len(),
                doc.log_factors.len()
            )));
        }
        let mut prior = None;
        let mut cond = Vec::with_capacity(doc.var_count);
        for (i, f) in doc.log_factors.into_iter().enumerate() {
            match (f, i == doc.root) {
                (FactorDoc::Prior(p), true) => {
                    prior = Some(unlog_pair(p));
                    cond.push([[0.0; 2]; 2]);
                }
                (FactorDoc::Conditional(t), false) => cond.push(t.map(unlog_pair)),
                _ => {
                    return Err(Error::Format(format!(
                        "variable {i}: factor shape does not match its role in the tree"
                    )))
                }
            }
        }
        let prior = prior.ok_or_else(|| Error::Format("root has no prior".into()))?;
        Clt::new(doc.root, doc.parents, prior, cond)
    }
}

pub fn save_clt(model: &Clt, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_clt(path: impl AsRef<Path>) -> Result<Clt> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Clt::from_json(&text)
}
