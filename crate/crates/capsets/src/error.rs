use thiserror::Error;

/// Errors surfaced by the capset toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("extension degree {m} out of supported range 1..={max}")]
    DegreeOutOfRange { m: u32, max: u32 },

    #[error("inversion of zero in F_{{3^{m}}}")]
    InvertZero { m: u32 },

    #[error("operation requires even extension degree, got m = {m}")]
    OddDegree { m: u32 },

    #[error("operation requires odd extension degree, got m = {m}")]
    EvenDegree { m: u32 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("third point of a pair requires two distinct points")]
    EqualPoints,

    #[error("dimension {n} exceeds supported maximum {max}")]
    DimensionTooLarge { n: u32, max: u32 },

    #[error("ambient space of 3^{n} points exceeds the memory budget of {budget_bits} bits")]
    MemoryBudgetExceeded { n: u32, budget_bits: u64 },

    #[error("input is not a capset: {0}")]
    NotACapset(String),

    #[error("coefficient family invalid: {0}")]
    InvalidFamily(String),

    #[error("element {element} has Frobenius orbit of size {size}, expected full orbit of size {m}")]
    ShortOrbit { element: u32, size: u32, m: u32 },

    #[error("Frobenius orbits of {a} and {b} collide")]
    OrbitCollision { a: u32, b: u32 },

    #[error("search exceeded the node ceiling of {ceiling}")]
    SearchCeilingExceeded { ceiling: u64 },

    #[error("empty sample")]
    EmptySample,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
