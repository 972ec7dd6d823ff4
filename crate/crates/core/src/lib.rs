// `!(x > floor)` is used on purpose so that NaN fails admissibility checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod active_flux;
pub mod corrections;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod models;
pub mod recovery;
pub mod schemes;
pub mod state;

pub use error::{Error, Result};
pub use mesh::{Boundary, EdgeFluxSet, ElementGraph, GraphKind, Mesh1D};
pub use models::Model;
pub use state::State;
