//! Reference randomness sources and a synthetic market.
//!
//! Bit sources (PRNG words, Möbius signs, file bits) become price-like value
//! streams through [`bits_to_walk`], so that they can be symbolized exactly
//! like trade prices.

mod mobius;
mod splitmix;
mod walk;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use mobius::{mobius_bits, mobius_stream, mobius_values};
pub use splitmix::SplitMix64;
pub use walk::{bits_to_walk, lobster_messages, persistent_walk, SyntheticMonth, WalkParams, WALK_ORIGIN};

use crate::bitcore::BitString;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamKind {
    DocumentedPrng,
    Mobius,
    FileBits,
    PersistentWalk,
}

/// Ordered positive values with the kind of source that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueStream {
    pub kind: StreamKind,
    pub values: Vec<u64>,
}

/// `n` SplitMix64 words. A zero word is replaced by 1 to keep values positive.
pub fn prng_stream(seed: u64, n: usize) -> ValueStream {
    ValueStream {
        kind: StreamKind::DocumentedPrng,
        values: SplitMix64::new(seed).take(n).map(|w| w.max(1)).collect(),
    }
}

/// First `n` bits of the SplitMix64 stream, each word unpacked most-significant bit first.
pub fn prng_bits(seed: u64, n: usize) -> BitString {
    let mut bits = BitString::with_capacity(n);
    let mut g = SplitMix64::new(seed);
    while bits.len() < n {
        let w = g.next_u64();
        for shift in (0..64).rev() {
            if bits.len() == n {
                break;
            }
            bits.push((w >> shift) & 1 == 1);
        }
    }
    bits
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileFormat {
    /// ASCII when the file holds only `0`, `1` and whitespace, bytes otherwise.
    #[default]
    Auto,
    Ascii,
    Binary,
}

/// Bits of a file in file order; bytes are unpacked most-significant bit first.
pub fn file_bits(path: &Path, format: FileFormat) -> Result<BitString> {
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    let generator_err = |message: &str| Error::Generator {
        name: path.display().to_string(),
        message: message.to_string(),
    };
    if raw.is_empty() {
        return Err(generator_err("file is empty"));
    }
    let looks_ascii = raw.iter().all(|b| matches!(b, b'0' | b'1') || b.is_ascii_whitespace());
    let bits = match (format, looks_ascii) {
        (FileFormat::Ascii, _) | (FileFormat::Auto, true) => {
            let text = std::str::from_utf8(&raw).map_err(|_| generator_err("not ASCII"))?;
            BitString::from_ascii(text)?
        }
        _ => BitString::from_bytes_msb(&raw),
    };
    if bits.is_empty() {
        return Err(generator_err("file holds no bits"));
    }
    Ok(bits)
}

/// A reference source used by the sanity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    DocumentedPrng { seed: u64 },
    Mobius,
    FileBits { path: PathBuf },
    PersistentWalk { seed: u64, params: WalkParams },
}

impl GeneratorSpec {
    pub fn name(&self) -> String {
        match self {
            GeneratorSpec::DocumentedPrng { seed } => format!("splitmix64:{seed}"),
            GeneratorSpec::Mobius => "mobius".into(),
            GeneratorSpec::FileBits { path } => format!("file:{}", path.display()),
            GeneratorSpec::PersistentWalk { seed, params } => format!("walk:{seed}:rho={}", params.rho),
        }
    }

    pub fn kind(&self) -> StreamKind {
        match self {
            GeneratorSpec::DocumentedPrng { .. } => StreamKind::DocumentedPrng,
            GeneratorSpec::Mobius => StreamKind::Mobius,
            GeneratorSpec::FileBits { .. } => StreamKind::FileBits,
            GeneratorSpec::PersistentWalk { .. } => StreamKind::PersistentWalk,
        }
    }

    /// A value stream whose level-1 symbolization has exactly `n_bits` comparisons.
    ///
    /// Bit sources are mapped through [`bits_to_walk`]; a file shorter than
    /// `n_bits` is an error naming the generator.
    pub fn values(&self, n_bits: usize) -> Result<ValueStream> {
        let values = match self {
            GeneratorSpec::DocumentedPrng { seed } => bits_to_walk(&prng_bits(*seed, n_bits)),
            GeneratorSpec::Mobius => bits_to_walk(&mobius_bits(n_bits)),
            GeneratorSpec::FileBits { path } => {
                let bits = file_bits(path, FileFormat::Auto)?;
                if bits.len() < n_bits {
                    return Err(Error::Generator {
                        name: self.name(),
                        message: format!("holds {} bits, {n_bits} requested", bits.len()),
                    });
                }
                bits_to_walk(&bits.slice(0, n_bits))
            }
            GeneratorSpec::PersistentWalk { seed, params } => persistent_walk(*seed, n_bits + 1, params)?,
        };
        Ok(ValueStream {
            kind: self.kind(),
            values,
        })
    }
}
