use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    Parse(String),

    #[error("negative quantity {0}")]
    Negative(String),

    #[error("step function is not {expected}: {detail}")]
    NotMonotone { expected: &'static str, detail: String },

    #[error("cannot combine a non-increasing and a non-decreasing step function")]
    DirectionMismatch,

    #[error("step function does not vanish at the {end} end (boundary value {value})")]
    NotVanishing { end: &'static str, value: String },

    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("invalid iso-util: {0}")]
    InvalidCurve(String),

    #[error(
        "iso-util is not convex at vertex {vertex}: slope -1/{left_price} is followed by slope -1/{right_price}"
    )]
    NonConvex { vertex: usize, left_price: String, right_price: String },

    #[error("book is unsettled")]
    Unsettled,

    #[error("book has no {0} side")]
    OneSided(&'static str),

    #[error("requested volume {requested} exceeds available volume {available}")]
    ExceedsVolume { requested: String, available: String },

    #[error("iso-util is a single point")]
    Degenerate,

    #[error("supply level ({x}, {y}) is on the boundary of the domain")]
    BoundarySupply { x: String, y: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent supply levels: {0}")]
    InconsistentLevels(String),

    #[error("aggregation needs at least one market")]
    EmptyAggregation,
}
