//! Exact computation of zero-sum generalized Schur numbers.
//!
//! For `r | k`, `S3(k; r)` is the least `n` such that every coloring of
//! `[1, n]` with colors `0..r` admits a solution of
//! `x_1 + ... + x_{k-1} = x_k` whose colors sum to `0 mod r`. `S3,2(k; r)`
//! restricts the colorings to `{0, 1}`. When `r` does not divide `k` both are
//! infinite.

pub mod constructions;
pub mod enumerate;
pub mod error;
pub mod model;
pub mod repro;
pub mod search;
pub mod zero_sum;

pub use error::{Error, Result};
pub use model::{
    color_sum, is_infinite_instance, is_zero_sum, Color, Coloring, Palette, Params, Solution,
};

/// Tag stored with cached results so that results from older engine builds
/// are never reused.
pub const ENGINE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+reach1");
