//! Unclonable encryption from a copy-protected PRF.

use rand::Rng;

use super::bits::BitString;
use super::cpprf::{self, ProtectedPrf};
use super::profile::LengthProfile;
use super::program::Output;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UeKey {
    profile: LengthProfile,
    ks: BitString,
}

impl UeKey {
    pub fn profile(&self) -> &LengthProfile {
        &self.profile
    }

    pub fn bits(&self) -> &BitString {
        &self.ks
    }
}

/// `(r, c, rho_{k_P})` for a single message bit.
#[derive(Debug)]
pub struct UeCiphertext {
    pub r: BitString,
    pub c: BitString,
    pub key: ProtectedPrf,
}

/// Multi-bit ciphertext: one `(r_i, c_i)` pair per bit, one shared protected key.
#[derive(Debug)]
pub struct UeMultiCiphertext {
    pub blocks: Vec<(BitString, BitString)>,
    pub key: ProtectedPrf,
}

pub fn keygen<R: Rng + ?Sized>(profile: &LengthProfile, rng: &mut R) -> Result<UeKey> {
    profile.validate_simulable()?;
    Ok(UeKey {
        profile: *profile,
        ks: BitString::random(profile.input_bits(), rng),
    })
}

fn block<R: Rng + ?Sized>(
    key: &UeKey,
    kp: &super::prf::PrfKey,
    b: bool,
    rng: &mut R,
) -> Result<(BitString, BitString)> {
    let r = BitString::random(key.profile.input_bits(), rng);
    let c = if b {
        BitString::random(key.profile.m, rng)
    } else {
        kp.eval(&key.ks.xor(&r)?)?
    };
    Ok((r, c))
}

pub fn enc<R: Rng + ?Sized>(key: &UeKey, b: bool, rng: &mut R) -> Result<UeCiphertext> {
    let kp = cpprf::keygen(&key.profile, rng)?;
    let (r, c) = block(key, &kp, b, rng)?;
    let protected = cpprf::protect(&key.profile, &kp, rng)?.protected;
    Ok(UeCiphertext {
        r,
        c,
        key: protected,
    })
}

fn dec_block<R: Rng + ?Sized>(
    key: &UeKey,
    pk: &ProtectedPrf,
    r: &BitString,
    c: &BitString,
    rng: &mut R,
) -> Result<bool> {
    if r.len() != key.ks.len() {
        return Err(Error::param("ciphertext randomness has the wrong length"));
    }
    Ok(pk.eval(&key.ks.xor(r)?, rng)? != Output::Bits(c.clone()))
}

/// Outputs 0 iff the protected key reproduces `c` at `k_S xor r`.
pub fn dec<R: Rng + ?Sized>(key: &UeKey, ct: UeCiphertext, rng: &mut R) -> Result<bool> {
    dec_block(key, &ct.key, &ct.r, &ct.c, rng)
}

pub fn enc_bits<R: Rng + ?Sized>(
    key: &UeKey,
    m: &BitString,
    rng: &mut R,
) -> Result<UeMultiCiphertext> {
    let kp = cpprf::keygen(&key.profile, rng)?;
    let blocks = m
        .bits()
        .iter()
        .map(|&b| block(key, &kp, b, rng))
        .collect::<Result<Vec<_>>>()?;
    let protected = cpprf::protect(&key.profile, &kp, rng)?.protected;
    Ok(UeMultiCiphertext {
        blocks,
        key: protected,
    })
}

pub fn dec_bits<R: Rng + ?Sized>(
    key: &UeKey,
    ct: UeMultiCiphertext,
    rng: &mut R,
) -> Result<BitString> {
    let bits = ct
        .blocks
        .iter()
        .map(|(r, c)| dec_block(key, &ct.key, r, c, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitString::new(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bit_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let key = keygen(&LengthProfile::desk(), &mut rng).unwrap();
        for b in [false, true, true, false] {
            let ct = enc(&key, b, &mut rng).unwrap();
            assert_eq!(dec(&key, ct, &mut rng).unwrap(), b);
        }
    }

    #[test]
    fn multi_bit_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let key = keygen(&LengthProfile::desk(), &mut rng).unwrap();
        let m = BitString::random(8, &mut rng);
        let ct = enc_bits(&key, &m, &mut rng).unwrap();
        assert_eq!(dec_bits(&key, ct, &mut rng).unwrap(), m);
    }
}
