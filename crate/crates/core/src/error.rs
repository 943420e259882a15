use thiserror::Error;

use crate::stream::Item;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("item id {item} outside universe [1, {universe}]")]
    ItemOutOfRange { item: Item, universe: u32 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("infeasible spike workload: {0}")]
    InfeasibleSpike(String),

    #[error("sketches built from different seeds cannot be merged")]
    SeedMismatch,

    #[error("malformed stream file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
