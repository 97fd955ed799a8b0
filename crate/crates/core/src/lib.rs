//! Numerical tools for Sobolev differential forms.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alexander_spanier;
pub mod domains;
pub mod error;
pub mod experiments;
pub mod exterior;
pub mod forms;
pub mod montecarlo;
pub mod numerics;
pub mod seminorms;
pub mod simplex;

pub use alexander_spanier::{Containment, EvalContext, Multifunction, Provenance, StokesResidual};
pub use domains::{Domain, Halfspace, Shape};
pub use error::{Error, Result};
pub use exterior::{Covector, MultiIndex, SphereMethod, SphereNormConfig};
pub use forms::{FormField, LpConfig, Mollifier, Polynomial};
pub use montecarlo::{Estimate, RunningStats};
pub use seminorms::{
    bbm_constant, fixed_theta_seminorm, near_far_split, theta_sweep, uniform_bound_check,
    Extrapolation, SeminormConfig, SeminormEstimate, SweepResult, Variant,
};
pub use simplex::{
    gram_jacobian, integrate_form, integrate_scalar, RuleKind, SimplexRule, SimplexTuple,
};
