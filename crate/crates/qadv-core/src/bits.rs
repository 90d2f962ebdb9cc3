//! Fixed-width bit strings indexed by 1-based variable number.
//!
//! An input to an `n`-variable formula is a string of `n` bits. Bit `i`
//! (1-based) is the value of variable `x_i`. Strings are packed into a
//! `u64`, so `n <= 64`. The packing puts `x_1` at the most significant
//! position of the used range: the display form read as a binary number
//! equals the stored integer, and `Ord` sorts strings in display order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    len: u32,
    bits: u64,
}

impl BitString {
    /// Builds a string of `len` bits from the low `len` bits of `bits`,
    /// where the most significant used bit is `x_1`.
    pub fn new(len: u32, bits: u64) -> Self {
        assert!(len <= 64, "bit strings are capped at 64 bits");
        Self {
            len,
            bits: bits & Self::mask(len),
        }
    }

    pub fn zeros(len: u32) -> Self {
        Self::new(len, 0)
    }

    fn mask(len: u32) -> u64 {
        if len == 0 {
            0
        } else {
            u64::MAX >> (64 - len)
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_u64(&self) -> u64 {
        self.bits
    }

    /// Value of variable `i` (1-based).
    pub fn get(&self, i: u32) -> bool {
        assert!(i >= 1 && i <= self.len, "variable index out of range");
        (self.bits >> (self.len - i)) & 1 == 1
    }

    /// Returns a copy with variable `i` flipped.
    pub fn flip(&self, i: u32) -> Self {
        assert!(i >= 1 && i <= self.len, "variable index out of range");
        Self {
            len: self.len,
            bits: self.bits ^ (1u64 << (self.len - i)),
        }
    }

    /// Returns a copy with variable `i` set to `value`.
    pub fn with_bit(&self, i: u32, value: bool) -> Self {
        if self.get(i) == value {
            *self
        } else {
            self.flip(i)
        }
    }

    /// Concatenation; `self` supplies the leading variables.
    pub fn concat(&self, other: &Self) -> Self {
        assert!(self.len + other.len <= 64, "concatenation exceeds 64 bits");
        Self {
            len: self.len + other.len,
            bits: (self.bits << other.len) | other.bits,
        }
    }

    pub fn hamming_distance(&self, other: &Self) -> u32 {
        assert_eq!(self.len, other.len);
        (self.bits ^ other.bits).count_ones()
    }

    /// Indices (1-based) where the two strings differ.
    pub fn differing_bits(&self, other: &Self) -> Vec<u32> {
        assert_eq!(self.len, other.len);
        (1..=self.len).filter(|&i| self.get(i) != other.get(i)).collect()
    }

    /// All `2^len` strings of the given length, in sorted order.
    pub fn all(len: u32) -> impl Iterator<Item = BitString> {
        assert!(len <= 20, "exhaustive enumeration is capped at 2^20");
        (0..(1u64 << len)).map(move |v| BitString::new(len, v))
    }

    /// The `len` bits starting at variable `start` (1-based), as a string
    /// of their own.
    pub fn slice(&self, start: u32, len: u32) -> Self {
        assert!(start >= 1 && start + len - 1 <= self.len, "slice out of range");
        let shift = self.len - (start + len - 1);
        Self::new(len, self.bits >> shift)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > 64 {
            return Err(Error::TooManyVariables { n: s.len() });
        }
        let mut bits = 0u64;
        for (pos, c) in s.chars().enumerate() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        message: format!("expected '0' or '1', found {c:?}"),
                    })
                }
            }
        }
        Ok(Self {
            len: s.len() as u32,
            bits,
        })
    }
}
