use std::fs;
use std::path::Path;

use treepc::circuit::Circuit;
use treepc::clt::Clt;
use treepc::compile::compile_clt;

/// A model file holds either a Chow-Liu tree or a circuit.
#[derive(Debug, Clone)]
pub enum Model {
    Clt(Clt),
    Circuit(Circuit),
}

impl Model {
    pub fn var_count(&self) -> usize {
        match self {
            Model::Clt(m) => m.var_count(),
            Model::Circuit(c) => c.var_count(),
        }
    }

    /// The circuit form, compiling a tree if needed.
    pub fn into_circuit(self) -> treepc::Result<Circuit> {
        match self {
            Model::Clt(m) => compile_clt(&m),
            Model::Circuit(c) => Ok(c),
        }
    }
}

/// Reads a model file, telling trees and circuits apart by their fields.
pub fn load_model(path: impl AsRef<Path>) -> treepc::Result<Model> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| treepc::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    if text.contains("\"nodes\"") {
        Circuit::from_json(&text).map(Model::Circuit)
    } else {
        Clt::from_json(&text).map(Model::Clt)
    }
}
