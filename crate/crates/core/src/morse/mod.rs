//! Morse theory on the catalog surfaces: critical points, gradient flows,
//! the Morse complex over F₂ and its homology.

mod backend;
mod complex;
mod critical;
mod flow;
mod function;
mod manifold;

pub use backend::{BackendConfig, MorseBackend, Tolerances};
pub use complex::{homology_ranks, morse_boundary, separatrix_boundary_counts, MorseComplex};
pub use critical::{find_critical_points, CriticalPoint};
pub(crate) use critical::seeds;
pub use flow::{
    flow_point, integrate_trajectory, limit_critical_point, limit_critical_point_with, rk4_step,
    trace_to_limit, Direction, Trajectory,
};
pub use function::{catalog_keys, catalog_params, MorseFunction};
pub use manifold::{wrap_half, Manifold};

use alloc::string::String;

use thiserror::Error;

/// A point in the stored representation of a manifold (see [`Manifold`]).
pub type Point = [f64; 3];

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MorseError {
    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),
    #[error("unknown catalog key `{key}` for {manifold}")]
    UnknownFunction { manifold: Manifold, key: String },
    #[error("unknown or invalid parameter `{param}` for `{key}`")]
    UnknownParameter { key: String, param: String },
    #[error("unknown config key `{0}`")]
    UnknownConfigKey(String),
    #[error("invalid value for `{key}`: {value}")]
    InvalidValue { key: String, value: String },
    #[error("missing config key `{0}`")]
    MissingConfigKey(String),
    #[error("unknown label function `{0}`")]
    UnknownLabel(String),
    #[error("function `{0}` is not antipodally symmetric; rp2 needs an even function")]
    NotEven(String),
    #[error("degenerate critical point at {location:?} (hessian eigenvalue {eigenvalue:e})")]
    DegenerateCriticalPoint { location: Point, eigenvalue: f64 },
    #[error("critical point count violates Euler characteristic: alternating sum {got}, expected {expected}")]
    EulerMismatch { got: i64, expected: i64 },
    #[error("integration produced non-finite values")]
    NonFinite,
    #[error("no convergence by T_max={t_max}")]
    NoConvergence { t_max: f64 },
    #[error("negative duration {0}")]
    NegativeDuration(f64),
    #[error("transversality failure; perturb parameters ({0})")]
    Transversality(String),
    #[error("unknown critical point `{0}`")]
    UnknownCriticalPoint(String),
}
