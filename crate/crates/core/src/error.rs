use thiserror::Error;

use crate::valuation::ValuationQ;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ramification index must be at least 1")]
    BadRamification,
    #[error("working precision {k} is below 2e = {min}")]
    PrecisionTooSmall { k: i64, min: i64 },
    #[error("operands belong to different prime contexts")]
    ContextMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: value indistinguishable from zero")]
    PrecisionExhausted,
    #[error("residue of an element of negative valuation {0}")]
    NegativeValuation(ValuationQ),
    #[error("{what} must lie in the unit disk")]
    OutsideUnitDisk { what: &'static str },
    #[error("{what} must lie in S = {{v > 1/(p-1)}}")]
    OutsideS { what: &'static str },
    #[error("q must differ from 1")]
    QIsOne,
    #[error("m0 = {m0} is not representable with e = {e}; rebuild the context with e a multiple of {required}")]
    NotRepresentable {
        m0: ValuationQ,
        e: u32,
        required: i64,
    },
    #[error("m0 = {m0} is outside the admissible range (1/(p-1), 1/(p-2)]")]
    InadmissibleM0 { m0: ValuationQ },
    #[error("the expansion point must avoid 0 and 1")]
    DegenerateCenter,
    #[error(
        "x is not in the image of the first projection: v(A_(p-2)(x)) = {0} is not below 1/(p-1)"
    )]
    NotInImage(String),
    #[error("no nontrivial fixed points exist for p = 2")]
    PrimeTwo,
    #[error("cannot certify: {0}")]
    Uncertified(String),
    #[error("Newton criterion unmet: v(f) = {f_val}, v(f') = {df_val}, coefficient floor {floor}")]
    HenselCriterion {
        f_val: String,
        df_val: String,
        floor: i64,
    },
    #[error("derivative vanishes at precision (double root)")]
    DoubleRoot,
    #[error("Newton iteration did not converge within {0} steps")]
    NonConvergence(usize),
    #[error("(x, q) is not a certified point of the fixed-point locus")]
    NotOnManifold,
    #[error("x' lies outside the open ball of radius |A_(p-2)(x)| around x")]
    OutsideBall,
    #[error("Newton polygon needs at least one finite point")]
    EmptyPolygon,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("suite {suite} cannot run in the requested context: {reason}")]
    IncompatibleContext { suite: String, reason: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    /// Parse failures are reported separately from mathematical preconditions.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::UnknownSuite(_))
    }
}
