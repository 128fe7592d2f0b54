//! Central subspace data depth.
//!
//! A library for depth-based analysis of multivariate point clouds where the
//! natural "center" is a subspace rather than a point:
//!
//! - point depth functions (halfspace, simplicial, Mahalanobis) with exact
//!   algorithms in one and two dimensions and randomized estimators in
//!   general dimension ([`depth`]);
//! - the depth-based dispersion measure `sigma(F)`, the integral of the
//!   depth function over the whole space ([`dispersion`]);
//! - search over orthonormal frames for the least- and most-dispersed
//!   projection of a sample, the central subspace depth of points, and
//!   quantile bands for anomaly flagging ([`subspace`]);
//! - recursive dimension selection driven by a Rayleigh-type uniformity
//!   statistic, the dimension-reduction dispersion profile, and a PCA
//!   cross-check ([`dimension`]).
//!
//! All stochastic operations take an explicit [`RngStream`], so results are
//! reproducible for a fixed master seed and safe to parallelize with
//! disjoint streams.

pub mod depth;
pub mod dimension;
pub mod dispersion;
pub mod numerics;
pub mod sample;
pub mod subspace;
pub mod synth;

mod error;

pub use error::Error;
pub use numerics::frame::Frame;
pub use numerics::rng::RngStream;
pub use sample::Sample;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Orthonormality tolerance for frames: `max|B Bᵀ − I| ≤ ORTHONORMALITY_TOL`.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Numerical-rank tolerance used by [`numerics::frame::orthonormalize`].
pub const RANK_TOL: f64 = 1e-10;

/// Symmetry tolerance for eigendecomposition inputs.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Off-diagonal threshold at which the Jacobi eigensolver stops.
pub const JACOBI_THRESHOLD: f64 = 1e-12;

/// Maximum number of Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Barycentric-coordinate slack: a point on a simplex facet counts as inside.
pub const BARYCENTRIC_TOL: f64 = 1e-12;

/// Condition-number limit beyond which a sample covariance is treated as
/// singular.
pub const COVARIANCE_CONDITION_LIMIT: f64 = 1e12;

/// Largest number of simplices `C(n, m+1)` that exact simplicial depth will
/// enumerate.
pub const SIMPLICIAL_EXACT_LIMIT: u128 = 10_000_000;
