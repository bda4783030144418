//! Sasakian structures, axiom checks and transverse quantities.

pub mod candidate;
pub mod frame;
pub mod hamiltonian;
pub mod structure;
pub mod transverse;

pub use candidate::SolitonCandidate;
pub use frame::{horizontal_frame, HorizontalFrame};
pub use hamiltonian::{
    hamiltonian_field_from_potential, holomorphicity_residual, HamiltonianField,
};
pub use structure::{
    axiom_residuals_at, check_sasakian_axioms, AxiomReport, SasakianStructure, StructureJets,
    AXIOM_NAMES,
};
pub use transverse::{
    basic_laplacian, transverse_hessian, transverse_ricci, transverse_scalar,
    weighted_basic_laplacian,
};
