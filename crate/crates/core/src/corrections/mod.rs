pub mod energy;
pub mod entropy;
pub mod multi;

pub use energy::{energy_update_identity, nonconservative_energy_correction, EnergyElement, NcEnergyScheme};
pub use entropy::{
    correct_element, entropy_correction, entropy_residuals, entropy_variables, CorrectionReport, ElementCorrection,
};
pub use multi::{correct_element_multi, multi_constraint_correction, Constraint, MultiCorrection};
