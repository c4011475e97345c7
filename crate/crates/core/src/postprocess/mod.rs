//! Repairs for sampled assignments: exact re-optimization over low-treewidth
//! subgraphs and multi-qubit correction.

mod decompose;
mod local;
mod mqc;

pub use decompose::{decompose_low_treewidth, Decomposition, Subset, TreeDecomposition};
pub use local::{boltzmann_sample_local, optimize_local};
pub use mqc::{disagreement_components, mqc, mqc_pair};
