use thiserror::Error;

/// Errors produced by the depth, dispersion and subspace-search operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input rows are numerically rank deficient.
    #[error("rank error: input rows are linearly dependent (numerical rank < {expected} at tolerance {tol:e})")]
    Rank { expected: usize, tol: f64 },

    /// A full frame (k = m) has no orthogonal complement.
    #[error("empty complement: frame already spans the full space (k = m = {dim})")]
    EmptyComplement { dim: usize },

    /// Eigendecomposition input is not symmetric.
    #[error("symmetry error: |S - Sᵀ| exceeds {tol:e} (max deviation {max_dev:e})")]
    Symmetry { max_dev: f64, tol: f64 },

    /// Exact simplicial depth would enumerate too many simplices.
    #[error("size error: C({n}, {k}) simplices exceed the exact-enumeration limit")]
    Size { n: usize, k: usize },

    /// Sample covariance is singular or too ill-conditioned to invert.
    #[error("singular covariance: condition number exceeds {limit:e}")]
    SingularCovariance { limit: f64 },

    /// Matrix/sample dimensions do not match.
    #[error("shape error: {context} (expected {expected}, got {got})")]
    Shape {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Too few points for the requested fit.
    #[error("degenerate sample: {context}")]
    DegenerateSample { context: &'static str },

    /// Quantile bands are defined only for one-dimensional projections.
    #[error("band dimension error: quantile bands require q = 1, got q = {q}")]
    BandDimension { q: usize },

    /// Subsample size must allow a meaningful fit.
    #[error("subsample error: sub_size must be at least 2 and smaller than n (got {sub_size} vs n = {n})")]
    Subsample { sub_size: usize, n: usize },

    /// A direction handed to the Rayleigh test is not unit norm.
    #[error("norm error: direction {index} has norm {norm} (must be 1 within {tol:e})")]
    NonUnitNorm { index: usize, norm: f64, tol: f64 },

    /// Invalid parameter value.
    #[error("invalid parameter: {context}")]
    InvalidParameter { context: &'static str },
}
