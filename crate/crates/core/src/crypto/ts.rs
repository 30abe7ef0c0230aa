//! Tokenized signatures for one-bit messages.

use rand::Rng;

use super::program::{params_for, Input, ObfProgram, Obfuscator, Output, Program, TransparentIo};
use crate::coset::CosetKey;
use crate::error::Result;
use crate::gf2::F2Vector;
use crate::qsim::StateVector;

#[derive(Clone, Debug)]
pub struct TsSecret {
    coset: CosetKey,
}

impl TsSecret {
    pub fn coset(&self) -> &CosetKey {
        &self.coset
    }
}

/// Obfuscated membership programs `(C_0, C_1)` for `A + s` and `A^perp + s'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationKey {
    programs: [ObfProgram; 2],
}

impl VerificationKey {
    pub fn program(&self, m: bool) -> &ObfProgram {
        &self.programs[m as usize]
    }
}

/// A signing token; signing consumes it.
#[derive(Debug)]
pub struct Token {
    state: StateVector,
}

impl Token {
    pub fn from_state(state: StateVector) -> Self {
        Self { state }
    }

    pub fn into_state(self) -> StateVector {
        self.state
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub message: bool,
    pub sigma: F2Vector,
}

pub fn keygen<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(TsSecret, VerificationKey)> {
    let coset = CosetKey::sample(n, rng)?;
    let mut progs = Vec::with_capacity(2);
    for b in [false, true] {
        let p = Program::Membership(coset.coset(b));
        let coins: [u8; 16] = rng.gen();
        progs.push(TransparentIo.obfuscate(&p, params_for(&p, n, 1), &coins)?);
    }
    let [c0, c1]: [ObfProgram; 2] = progs.try_into().expect("two programs");
    Ok((TsSecret { coset }, VerificationKey { programs: [c0, c1] }))
}

pub fn token_gen(sk: &TsSecret) -> Result<Token> {
    Ok(Token {
        state: sk.coset.state()?,
    })
}

/// Signs `m` by measuring the token in the computational (`m = 0`) or
/// Hadamard (`m = 1`) basis.
pub fn sign<R: Rng + ?Sized>(token: Token, m: bool, rng: &mut R) -> Result<Signature> {
    let mut st = token.state;
    if m {
        st.hadamard_all();
    }
    let (sigma, _) = st.measure(rng)?;
    Ok(Signature { message: m, sigma })
}

/// Accepts iff `C_m(sigma) = 1`; signatures of the wrong length are rejected.
pub fn verify(vk: &VerificationKey, m: bool, sigma: &F2Vector) -> bool {
    vk.program(m).eval(&Input::vector(*sigma)) == Output::Bit(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn honest_signatures_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (sk, vk) = keygen(4, &mut rng).unwrap();
        for m in [false, true] {
            for _ in 0..20 {
                let sig = sign(token_gen(&sk).unwrap(), m, &mut rng).unwrap();
                assert!(verify(&vk, m, &sig.sigma));
            }
        }
    }

    #[test]
    fn wrong_length_signature_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let (_, vk) = keygen(4, &mut rng).unwrap();
        assert!(!verify(&vk, false, &F2Vector::zero(6).unwrap()));
    }
}
