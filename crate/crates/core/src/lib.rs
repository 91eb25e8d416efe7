//! Free Motzkin spin chain with periodic boundary conditions.
//!
//! Words over `{u, f, d}` label the basis. The Hamiltonian is a sum of
//! two-link projectors assembled in exact rational arithmetic; floats
//! appear only in the eigensolvers and the Bethe ansatz.

pub mod algebra;
pub mod basis;
pub mod bethe;
pub mod error;
pub mod exact;
pub mod operators;
pub mod paths;
pub mod report;
pub mod spectra;

pub use algebra::{RMatrix, RelationReport};
pub use basis::{Basis, ConfigWord, SectorLabel, Step};
pub use bethe::{BetheSolution, FlavorWord, SolutionClass, StateVector};
pub use error::{Error, Result};
pub use exact::{ExactOperator, Q};
pub use operators::HamiltonianSpec;
pub use paths::{Orbit, PathProfile};
pub use spectra::SpectrumReport;
