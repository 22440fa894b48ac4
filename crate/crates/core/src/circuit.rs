//! Probabilistic circuits over binary variables: an arena of sum, product and
//! Bernoulli-leaf units in which every child precedes its parent.

mod io;
mod model;
mod validate;

pub use io::{load_circuit, save_circuit, CIRCUIT_FORMAT_VERSION};
pub use model::{Circuit, Node, NodeId};
pub use validate::{scope_of, validate, Determinism, StructureReport, UnitCounts, Violation, ViolationKind};
