//! Binary Chow-Liu trees: structure and parameter learning, exact inference
//! directly on the tree, ancestral sampling and serialization.

mod io;
mod learn;
mod model;
pub mod query;
mod sample;

pub use io::{load_clt, save_clt, CLT_FORMAT_VERSION};
pub use learn::{fit_clt, maximum_spanning_tree, mutual_information};
pub use model::{Clt, SmoothingSpec};
pub use query::{clt_evi, clt_mar, clt_mpe, CltEngine, MpeResult};
pub use sample::clt_sample;
