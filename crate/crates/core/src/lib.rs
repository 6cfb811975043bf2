//! Numerics for paths in free nilpotent groups: truncated tensor arithmetic,
//! signature lifts of piecewise-linear paths, p-variation and Hölder-type path
//! metrics, Brownian drivers with dyadic refinement, and a level-2 one-step
//! scheme for differential equations driven by group-valued paths.

pub mod brownian;
pub mod error;
pub mod lift;
pub mod path;
pub mod rde;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{gdist, lie_bracket, outer, transpose2, GroupElement, TruncatedTensor};

pub use path::{
    dist_modulus, dist_modulus_strided, dist_pvar, Control, PointPath, SampledRoughPath,
    Subdivision,
};

pub use lift::{diag_lift, good_seq_diag, pair_lift, sig_pwl, young_cross, DiagnosticsReport};

pub use brownian::{
    derive_seed, dyadic_refine, linear_approx, reference_lift, sample_bm, scale_lift,
    BrownianSample, NormalSource,
};

pub use rde::{
    build_anticipating_scenario, rough_integral, solve_ode_ref, solve_rde2, LipschitzMeta,
    OneForm, Scenario, VectorField, VectorFieldSet,
};
