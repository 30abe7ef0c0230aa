use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::F2Vector;

/// An arbitrary-length bit string; index 0 is the first (most significant) bit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.gen()).collect())
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self(
            (0..len)
                .map(|i| (value >> (len - 1 - i)) & 1 == 1)
                .collect(),
        )
    }

    pub fn to_u64(&self) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::param(format!(
                "{} bits do not fit in a u64",
                self.len()
            )));
        }
        Ok(self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    /// Big-endian bit expansion of bytes, truncated to `len` bits.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::param(format!(
                "{} bytes cannot supply {len} bits",
                bytes.len()
            )));
        }
        Ok(Self(
            (0..len)
                .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
                .collect(),
        ))
    }

    /// Packs into bytes, zero-padding the final byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                out[i / 8] |= 1 << (7 - i % 8);
            }
        }
        out
    }

    pub fn from_f2(v: &F2Vector) -> Self {
        Self(v.to_bools())
    }

    pub fn to_f2(&self) -> Result<F2Vector> {
        F2Vector::from_bools(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::param(format!(
                "xor of {} and {} bits",
                self.len(),
                other.len()
            )));
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self(self.0[start..end].to_vec())
    }

    /// Flips bit `i`.
    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            write!(f, "BitString({self})")
        } else {
            write!(
                f,
                "BitString({} bits, {})",
                self.len(),
                hex::encode(self.to_bytes())
            )
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::param(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_round_trip() {
        let b: BitString = "1011001110".parse().unwrap();
        let bytes = b.to_bytes();
        assert_eq!(bytes, vec![0b1011_0011, 0b1000_0000]);
        assert_eq!(BitString::from_bytes(&bytes, 10).unwrap(), b);
    }

    #[test]
    fn u64_round_trip() {
        let b = BitString::from_u64(0b101, 5);
        assert_eq!(b.to_string(), "00101");
        assert_eq!(b.to_u64().unwrap(), 5);
    }
}
