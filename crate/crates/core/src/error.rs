use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0:?} is not irreducible over F_{1}")]
    Reducible(Vec<u64>, u64),
    #[error("Galois rings Z/p^k with r > 1 are not supported")]
    GaloisRing,
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("element is not a unit")]
    NonUnit,
    #[error("cannot reduce from level {from} to level {to}")]
    Level { from: u32, to: u32 },
    #[error("budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u64 },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("generator x{index} exceeds arity {arity}")]
    Arity { index: usize, arity: usize },
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("symbol degree exceeds truncation {0}")]
    DegreeExceeds(usize),
    #[error("empty word")]
    EmptyWord,
    #[error("rank {rank} too small for type {ty}")]
    Rank { ty: char, rank: usize },
    #[error("unsupported algebra type {0}")]
    UnsupportedType(String),
    #[error("word map is identically zero on {0}")]
    ZeroWordMap(String),
    #[error("{p} is a bad prime for {algebra}")]
    BadPrime { p: u64, algebra: String },
    #[error("support does not generate the group or misses the identity")]
    NonGenerating,
    #[error("mixing time exceeds {0}")]
    TMax(usize),
    #[error("non-integral slope {slope:.4} at m = {m}")]
    NonIntegralSlope { m: usize, slope: f64 },
    #[error("carrier mismatch: {0} vs {1}")]
    CarrierMismatch(String, String),
    #[error("unsupported carrier: {0}")]
    UnsupportedCarrier(String),
    #[error("unknown {0}")]
    Unknown(String),
    #[error("non-integral coefficient in {0}")]
    NonIntegral(String),
    #[error("empty type after elimination: {0}")]
    EmptyType(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Refuses work larger than `budget`.
pub fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::Budget { needed, budget })
    } else {
        Ok(())
    }
}
