use thiserror::Error;

use crate::site::TsetCondition;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("subbasis member {0:?} is not contained in the point set")]
    InvalidSubbasis(Vec<String>),
    #[error("classes do not partition the points: {0}")]
    InvalidPartition(String),
    #[error("subset is not contained in the point set")]
    InvalidSubset,
    #[error("maps do not share a target space")]
    TargetMismatch,
    #[error("space has {0} points, more than the supported {max}", max = crate::pointset::MAX_POINTS)]
    TooManyPoints(usize),
    #[error("map graph is not a total function into the target: {0}")]
    InvalidMap(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("groupoid is not open (domain or codomain map is not an open map)")]
    NotOpenGroupoid,
    #[error("groupoid axioms fail: {0}")]
    InvalidGroupoid(String),
    #[error("object set is not replete: arrow `{arrow}` leaves it")]
    NotReplete { arrow: String },
    #[error("not an open subgroupoid: {0}")]
    InvalidSubgroupoid(String),
    #[error("sheaves live over different groupoids")]
    AmbientMismatch,
    #[error("sheaf is not equivariant: {0}")]
    InvalidSheaf(String),
    #[error("map is not a section of the sheaf projection")]
    NotASection,
    #[error("map is not continuous")]
    NotContinuous,
    #[error("no arrow of the T-set is composable with `{0}`")]
    NoComposableWitness(String),
    #[error("site objects do not match for composition")]
    ObjectMismatch,
    #[error("T-set conditions violated: {0:?}")]
    ConditionViolated(Vec<TsetCondition>),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}
