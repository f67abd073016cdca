use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series has zero constant term and is not a unit")]
    NotAUnit,
    #[error("term p^{i} q^{j} is not divisible by p^{di} q^{dj}")]
    NotDivisible { i: u32, j: u32, di: u32, dj: u32 },
    #[error("{0} is not an admissible discriminant (must be positive and 0 or 1 mod 4)")]
    NotAdmissible(i64),
    #[error("characteristic {0} is not one of the six supported even characteristics")]
    UnsupportedCharacteristic(String),
    #[error("discriminant {0} is not supported here: {1}")]
    Unsupported(u64, &'static str),
    #[error("coefficient at p^{i} q^{j} of {series} is not an integer")]
    IntegralityViolation {
        series: &'static str,
        i: u32,
        j: u32,
    },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is a product of degenerate-locus factors only")]
    DegenerateOnly,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("no relation of degree {degree} found (kernel is empty)")]
    NoRelation { degree: u32 },
    #[error("kernel has dimension {dim} > 1; increase the precision (monomial count {monomials} must stay below the usable column count)")]
    AmbiguousKernel { dim: usize, monomials: usize },
    #[error("relation does not vanish on the series at precision {precision}")]
    ConfirmationFailed { precision: u32 },
    #[error("degree recursion produced a non-integral value at discriminant {0}")]
    NonIntegralDegree(u64),
    #[error("discriminant 1 is a special case and is not handled here")]
    SpecialCase,
    #[error("imaginary part of tau is not positive definite")]
    NonConvergent,
    #[error("no valid Humbert point sampled after {0} attempts")]
    SamplingExhausted(usize),
    #[error("theta denominator {0} is numerically zero at this point")]
    NearVanishingDenominator(&'static str),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        }
    }
}
