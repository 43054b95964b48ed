//! Iyengar-type bounds on the trapezoid defect for twice differentiable
//! functions whose `|f''|^q` is quasi-convex, certified composite trapezoid
//! quadrature built on them, and a harness that checks every bound against
//! a reference integrator.

pub mod adaptive;
pub mod bounds;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod functions;
pub mod means;
pub mod quadrature;
pub mod special;
pub mod verify;

pub use bounds::{
    best_bound, bound_v1, bound_v2, bound_v2_limit, bound_v3, classic_iyengar_bound,
    conjugate_exponent, ion_bounds, sup_bound, BoundBreakdown, BoundKind, HolderPair, Interval,
    SecondDerivEndpoints, SupKind, V2Exponent,
};
pub use error::{Error, Result};
pub use functions::{Family, FunctionSpec, QuasiconvexVerdict};
pub use quadrature::{
    composite_certificate, integrate_certified, midpoint_sum, trapezoid_sum, Certificate,
    CertifiedResult, Partition,
};
pub use special::beta;
