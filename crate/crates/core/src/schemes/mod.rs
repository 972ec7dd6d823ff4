pub mod flux;
pub mod nodal;
pub mod residuals;
pub mod time;
pub mod triangle;

pub use flux::{rusanov, NumericalFlux, RusanovEntropyFlux};
pub use nodal::{NcBurgers, NodalScheme, ResidualKind};
pub use residuals::{
    domain_boundary_flux, fv_flux_form_update, fv_residuals_1d, rd_step, supg_residuals_1d, ElementResidual,
    ResidualSet, CONSERVATION_TOLERANCE,
};
pub use time::{
    integrate, IntegrateOptions, LedgerRow, Semidiscrete, Snapshot, SolutionRecord, SubstepInfo, TimeScheme,
};
pub use triangle::{triangle_edge_fluxes, triangle_fv_residuals, PlanarModel, TriangleGeometry, Vec2};
