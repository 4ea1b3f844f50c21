//! Binary vectors.
//!
//! [`BinaryVector`] is the interface the solvers and reductions work
//! against. [`BitVector`] is the dense packed implementation; the gadget
//! module provides a structured one for vectors too long to materialize.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub trait BinaryVector {
    fn dim(&self) -> u64;

    fn count_ones(&self) -> u64;

    fn dot(&self, other: &Self) -> u64;

    /// Hamming distance. The default uses `|x| + |y| − 2⟨x, y⟩`, which holds
    /// for any pair of binary vectors of equal dimension.
    fn hamming(&self, other: &Self) -> u64 {
        self.count_ones() + other.count_ones() - 2 * self.dot(other)
    }
}

/// Dense bit vector packed into 64-bit words, bit `i` at word `i / 64`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set_range(0, len);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Sets bits `start..end` to one.
    pub fn set_range(&mut self, start: usize, end: usize) {
        assert!(start <= end && end <= self.len);
        let mut i = start;
        while i < end {
            let word = i / 64;
            let lo = i % 64;
            let hi = (end - word * 64).min(64);
            let mask = if hi - lo == 64 {
                u64::MAX
            } else {
                ((1u64 << (hi - lo)) - 1) << lo
            };
            self.words[word] |= mask;
            i = word * 64 + hi;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Indices of the set bits, ascending.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn concat(parts: &[&BitVector]) -> BitVector {
        let len = parts.iter().map(|p| p.len).sum();
        let mut out = BitVector::zeros(len);
        let mut offset = 0;
        for part in parts {
            for i in part.ones_positions() {
                out.set(offset + i, true);
            }
            offset += part.len;
        }
        out
    }

    pub fn complement(&self) -> BitVector {
        let mut out = BitVector::ones(self.len);
        for (w, &x) in out.words.iter_mut().zip(&self.words) {
            *w &= !x;
        }
        out
    }

    /// Pads with zeros up to `len` (no-op if already that long).
    pub fn zero_extend(&self, len: usize) -> BitVector {
        assert!(len >= self.len);
        let mut out = self.clone();
        out.len = len;
        out.words.resize(len.div_ceil(64), 0);
        out
    }

    fn check_len(&self, other: &Self) {
        assert_eq!(self.len, other.len, "bit vectors of different dimension");
    }
}

impl BinaryVector for BitVector {
    fn dim(&self) -> u64 {
        self.len as u64
    }

    fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn dot(&self, other: &Self) -> u64 {
        self.check_len(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    fn hamming(&self, other: &Self) -> u64 {
        self.check_len(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => v.set(i, true),
                _ => {
                    return Err(Error::OutOfRange(format!(
                        "invalid character {:?} in bit string",
                        c as char
                    )))
                }
            }
        }
        Ok(v)
    }
}
