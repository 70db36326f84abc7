use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("position {position} lies outside the colored interval [1, {length}]")]
    OutOfRange { position: u32, length: u32 },

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("symmetry reduction needs r | k, got k = {k}, r = {r}")]
    NotDivisible { k: u32, r: u32 },

    #[error("family {family} does not apply to k = {k}: requires {condition}")]
    Inapplicable {
        family: &'static str,
        k: u32,
        condition: &'static str,
    },

    #[error("malformed cache file at byte {offset}: {message}")]
    Cache { offset: usize, message: String },

    #[error("unusable cache entry {index}: {message}")]
    CacheEntry { index: usize, message: String },

    #[error("invalid refutation certificate at step {step}: {message}")]
    Certificate { step: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}
