use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),

    #[error("basis too large: {count} indices exceed the cap of {cap}")]
    BasisTooLarge { count: usize, cap: usize },

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("aliasing risk: grid extent {grid} along axis {axis} cannot resolve coordinate {needed}")]
    AliasingRisk { axis: usize, grid: usize, needed: i64 },

    #[error("non-real field: {0}")]
    NonRealField(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("measure not in M_h: {0}")]
    NotInMh(String),

    #[error("empty sphere grid: S_(n-2)(gamma) needs n >= 3, got n = {0}")]
    EmptySphereGrid(usize),

    #[error("quasimomentum guard violated: {0}")]
    Guard(String),

    #[error("k is not in K(gamma): k_perp + 2 pi N_perp vanishes at N = {0:?}")]
    NotInKGamma(Vec<i64>),

    #[error("vanishing G factor at N = {0:?}")]
    ZeroGFactor(Vec<i64>),

    #[error("kappa = {kappa} below the shell threshold {threshold}")]
    KappaTooSmall { kappa: f64, threshold: f64 },

    #[error("no inner modes: {0}")]
    NoInnerModes(String),

    #[error("eigensolver failed at k index {0}")]
    Eigensolver(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
