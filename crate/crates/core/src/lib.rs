//! Randomness of tick-by-tick trade prices under transaction-time aggregation.
//!
//! Trade prices are symbolized into up/down bit strings at aggregation levels
//! `ℓ = 1..=L` (with `ℓ` phase-shifted samples per level), concatenated over a
//! month, and scored by a battery of randomness tests. Tests are calibrated on
//! reference generators before they are trusted on market data.

pub mod bitcore;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod rngsrc;
pub mod sanity;
pub mod special;
pub mod stattests;

pub use error::{Error, Result};
