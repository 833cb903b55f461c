//! Operators: single-site matrices, symbolic operator sums, sparse
//! matrices, pair couplings and the model builders.

pub mod coupling;
pub mod local;
pub mod models;
pub mod opsum;
pub mod sparse;

pub use coupling::{Bond, CouplingMap};
pub use local::LocalOp;
pub use models::*;
pub use opsum::{Leakage, OperatorSum, Term};
pub use sparse::{random_unit_vector, SparseOperator};
