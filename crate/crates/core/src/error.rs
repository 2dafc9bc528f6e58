use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Domain(&'static str),

    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("Hilbert dimension {dim} exceeds the configured limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("Hermitian eigensolver did not converge")]
    EigenNoConvergence,

    #[error("curvature is undefined at the conical point theta = {theta}")]
    SingularPoint { theta: f64 },

    #[error("speed {v} outside the admissible range [{lo}, {hi}] for this branch")]
    OutOfRange { v: f64, lo: f64, hi: f64 },

    #[error("field direction is degenerate: both transverse projections vanish")]
    DegenerateDirection,

    #[error("evolution parameter is unbounded (field off the z axis or irrational h/J)")]
    UnboundedChi,

    #[error("g_chichi = {value} is not positive at theta = {theta}")]
    NonPositiveMetric { theta: f64, value: f64 },

    #[error("quadrature did not converge (estimated error {estimate})")]
    QuadratureNoConvergence { estimate: f64 },

    #[error("negative variance {0} beyond round-off")]
    NegativeVariance(f64),
}
