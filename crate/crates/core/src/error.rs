use thiserror::Error;

#[derive(Debug, Error)]
pub enum CubeError {
    #[error("cube dimension {0} exceeds the supported maximum {max}", max = crate::cube_core::MAX_DIMENSION)]
    DimensionTooLarge(usize),

    #[error("cube dimension must be at least 1")]
    DimensionZero,

    #[error("mask {mask:#x} has bits above position {n}")]
    MaskOutOfRange { mask: u32, n: usize },

    #[error("signal length {len} is not 2^{n}")]
    BadSignalLength { len: usize, n: usize },

    #[error("sphere radius {r} out of range for dimension {n}")]
    RadiusOutOfRange { r: usize, n: usize },

    #[error("vector is not in W_{r}: ||A_- w|| / ||w|| = {ratio:.3e} exceeds tolerance {tol:.1e}")]
    NotInWr { r: usize, ratio: f64, tol: f64 },

    #[error("symmetrization inadmissible: m({r},{k}) = {value} is not positive")]
    SymmetrizeInadmissible { r: usize, k: usize, value: f64 },

    #[error("matrix is not symmetrizable by a diagonal similarity")]
    NotSymmetrizable,

    #[error("eigenvalue {value} has imaginary part {imag:.3e} beyond tolerance")]
    ComplexEigenvalue { value: f64, imag: f64 },

    #[error("eigenvalue {value} is {dist} away from the nearest grid point N - 2l (limit 0.5)")]
    SnapFailure { value: f64, dist: f64 },

    #[error("minor size {size} out of range for matrix of dimension {dim}")]
    MinorOutOfRange { size: usize, dim: usize },

    #[error("dense oracle refuses n = {0}: cap is {cap}", cap = crate::oracle::ORACLE_MAX_DIMENSION)]
    OracleDimensionTooLarge(usize),

    #[error("dense spectrum requires a symmetric operator; asymmetry {0:.3e}")]
    NotSymmetric(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CubeError>;
