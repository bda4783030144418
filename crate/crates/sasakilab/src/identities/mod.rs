//! Registry of soliton identities, inequalities and growth checks.

pub mod checks;
pub mod eval;
pub mod registry;

pub use checks::{
    potential_growth_check, second_variation_check, GrowthReport, SecondVariationReport,
};
pub use eval::{point_eval, PointEval, PsiPointEval, WEIGHTED_DRIFT_SIGN};
pub use registry::{
    find_spec, normalization_constants, registry, run_all, run_identity, run_selected,
    IdentityKind, IdentityResidualReport, IdentitySpec, RegistryOptions, RunContext, Verdict,
};
