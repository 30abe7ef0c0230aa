//! Copy-protection of point functions via a copy-protected PRF.

use rand::Rng;

use super::bits::BitString;
use super::cpprf::{self, ProtectedPrf};
use super::profile::LengthProfile;
use super::program::Output;
use crate::error::{Error, Result};

/// `(rho_k, z = PRF(k, y))`.
#[derive(Debug)]
pub struct ProtectedPoint {
    key: ProtectedPrf,
    z: BitString,
}

pub fn protect<R: Rng + ?Sized>(
    profile: &LengthProfile,
    y: &BitString,
    rng: &mut R,
) -> Result<ProtectedPoint> {
    if y.len() != profile.input_bits() {
        return Err(Error::param(format!(
            "point of {} bits, expected {}",
            y.len(),
            profile.input_bits()
        )));
    }
    let k = cpprf::keygen(profile, rng)?;
    let z = k.eval(y)?;
    let key = cpprf::protect(profile, &k, rng)?.protected;
    Ok(ProtectedPoint { key, z })
}

impl ProtectedPoint {
    pub fn from_parts(key: ProtectedPrf, z: BitString) -> Self {
        Self { key, z }
    }

    pub fn into_parts(self) -> (ProtectedPrf, BitString) {
        (self.key, self.z)
    }

    pub fn key(&self) -> &ProtectedPrf {
        &self.key
    }

    pub fn z(&self) -> &BitString {
        &self.z
    }

    /// 1 iff the protected key maps `x` to `z`.
    pub fn eval<R: Rng + ?Sized>(&self, x: &BitString, rng: &mut R) -> Result<bool> {
        Ok(self.key.eval(x, rng)? == Output::Bits(self.z.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn accepts_point_rejects_others() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let profile = LengthProfile::desk();
        let y = BitString::random(profile.input_bits(), &mut rng);
        let p = protect(&profile, &y, &mut rng).unwrap();
        assert!(p.eval(&y, &mut rng).unwrap());
        let mut other = y.clone();
        other.flip(0);
        assert!(!p.eval(&other, &mut rng).unwrap());
    }
}
