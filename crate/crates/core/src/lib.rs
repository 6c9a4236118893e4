//! Finite quantum groups: Haar structure, the multiplicative unitary,
//! idempotent states and their correspondences with pre-subgroups,
//! group-like projections and expected right coidalgebras.

pub mod algebra;
pub mod cli;
pub mod coidalgebra;
pub mod error;
pub mod hopf;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod presubgroup;
pub mod search;
pub mod state;
pub mod verify;

pub use algebra::{AlgebraData, AlgebraElement, TensorElement};
pub use coidalgebra::{Coidalgebra, HaarEquivalenceReport, QuotientSide};
pub use error::{Error, Result};
pub use hopf::{HopfData, QuantumGroup, ValidationReport};
pub use lattice::IdempotentLattice;
pub use presubgroup::{GroupLikeProjection, PreSubgroup, QuantumSubgroup};
pub use search::{SearchOptions, SearchResult};
pub use state::{Functional, IdempotentState};
