use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Append-only bit sequence packed into 64-bit words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64` (least significant first).
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let offset = self.len % 64;
        if offset == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().expect("word pushed above") |= 1 << offset;
        }
        self.len += 1;
    }

    /// Bit at `index`. Panics when out of range.
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range for length {}", self.len);
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { bits: self, pos: 0 }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Appends every bit of `other`.
    pub fn extend_from(&mut self, other: &BitString) {
        if self.len.is_multiple_of(64) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        for bit in other.iter() {
            self.push(bit);
        }
    }

    /// Copies bits `start..end` into a new string.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len, "slice {start}..{end} out of range");
        (start..end).map(|i| self.get(i)).collect()
    }

    /// Bitwise complement.
    pub fn complement(&self) -> BitString {
        self.iter().map(|b| !b).collect()
    }

    /// One byte per bit, each `0` or `1`. Test kernels work on this form.
    pub fn to_units(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn from_units(units: &[u8]) -> BitString {
        units.iter().map(|&u| u != 0).collect()
    }

    /// Parses ASCII `'0'`/`'1'`; ASCII whitespace is ignored.
    pub fn from_ascii(text: &str) -> Result<BitString> {
        let mut bits = BitString::with_capacity(text.len());
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_ascii_whitespace() => {}
                other => {
                    return Err(Error::Domain(format!(
                        "invalid bit character {other:?} at offset {i}"
                    )))
                }
            }
        }
        Ok(bits)
    }

    pub fn to_ascii(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Unpacks bytes most-significant bit first.
    pub fn from_bytes_msb(bytes: &[u8]) -> BitString {
        let mut bits = BitString::with_capacity(bytes.len() * 8);
        for byte in bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1 == 1);
            }
        }
        bits
    }

    /// Packs most-significant bit first; the final byte is zero padded.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, bit) in self.iter().enumerate() {
            if bit {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut bits = BitString::with_capacity(iter.size_hint().0);
        for b in iter {
            bits.push(b);
        }
        bits
    }
}

impl Extend<bool> for BitString {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for b in iter {
            self.push(b);
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 64;
        if self.len <= SHOWN {
            write!(f, "BitString({:?})", self.to_ascii())
        } else {
            let head: String = self.iter().take(SHOWN).map(|b| if b { '1' } else { '0' }).collect();
            write!(f, "BitString({head}… len={})", self.len)
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

pub struct Iter<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl Iterator for Iter<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        if self.pos >= self.bits.len {
            return None;
        }
        let bit = self.bits.get(self.pos);
        self.pos += 1;
        Some(bit)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.bits.len - self.pos;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for Iter<'_> {}
