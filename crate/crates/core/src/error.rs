use thiserror::Error;

use crate::hyperpolygon::SubsetMask;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weights are not generic: |epsilon_S| = {margin:e} for S = {subset:?}")]
    NonGeneric { subset: SubsetMask, margin: f64 },
    #[error("{n} points exceed the enumeration cap of {cap}")]
    TooManyPoints { n: usize, cap: usize },
    #[error("q_{0} is the zero vector")]
    ZeroVector(usize),
    #[error("configuration is not alpha-stable{}", .0.map(|s| format!(" (long straight set {s:?})")).unwrap_or_default())]
    NotStable(Option<SubsetMask>),
    #[error("sampler failed after {0} attempts")]
    SamplerFailed(usize),
    #[error("no convergence after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("configuration is off the level set (residual {0:e})")]
    NotOnLevelSet(f64),
    #[error("configuration is not a fixed point of the requested type")]
    NotFixed,
    #[error("normalization entry vanishes: {0}")]
    IndexDegenerate(String),
    #[error("integer weight fit failed (residual {0:e})")]
    FitFailed(f64),
    #[error("identity {name} violated by {magnitude:e}")]
    IdentityViolated { name: String, magnitude: f64 },
    #[error("configuration has p = 0 and lies in the polygon component")]
    PolygonPoint,
    #[error("diagonal is light-like or not future time-like")]
    DegenerateDiagonal,
    #[error("vector is not tangent to the pseudosphere (defect {0:e})")]
    NotTangent(f64),
    #[error("partial sum up to side {0} is not time-like")]
    NotTimelike(usize),
    #[error("polygon is not in normal position")]
    NotNormalized,
    #[error("k1 = 1 or k2 = 1: the polygon space is compact")]
    CompactCase,
    #[error("configuration is not in canonical Z_S form: {0}")]
    NotCanonical(String),
    #[error("polygon does not close (residual {0:e})")]
    NotClosed(f64),
    #[error("parabolic weight out of range at point {0}")]
    WeightOutOfRange(usize),
    #[error("configuration is off the complex level set (residual {0:e})")]
    NotOnComplexLevel(f64),
    #[error("census totals disagree with closed-form counts: {0}")]
    CensusMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
