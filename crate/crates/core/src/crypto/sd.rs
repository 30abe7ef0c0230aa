//! Single-decryptor encryption from coset states.

use rand::Rng;

use super::bits::BitString;
use super::program::{params_for, Input, ObfProgram, Obfuscator, Output, Program, TransparentIo};
use crate::coset::CosetKey;
use crate::error::{Error, Result};
use crate::gf2::F2Vector;
use crate::qsim::StateVector;

#[derive(Clone, Debug)]
pub struct SdSecret {
    cosets: Vec<CosetKey>,
}

impl SdSecret {
    pub fn cosets(&self) -> &[CosetKey] {
        &self.cosets
    }
}

/// Obfuscated membership programs for `A_i + s_i` and `A_i^perp + s'_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdPublicKey {
    n: usize,
    programs: Vec<[ObfProgram; 2]>,
}

impl SdPublicKey {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.programs.len()
    }

    pub fn programs(&self) -> &[[ObfProgram; 2]] {
        &self.programs
    }
}

/// The quantum decryption key; decryption consumes it.
#[derive(Debug)]
pub struct QuantumKey {
    registers: Vec<StateVector>,
}

impl QuantumKey {
    pub fn from_registers(registers: Vec<StateVector>) -> Self {
        Self { registers }
    }

    pub fn into_registers(self) -> Vec<StateVector> {
        self.registers
    }

    pub fn registers(&self) -> &[StateVector] {
        &self.registers
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdCiphertext {
    pub r: BitString,
    pub program: ObfProgram,
}

/// Encryption randomness: the basis choice `r` and the obfuscator's coins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncCoins {
    pub r: BitString,
    pub obf: [u8; 16],
}

impl EncCoins {
    pub fn sample<R: Rng + ?Sized>(kappa: usize, rng: &mut R) -> Self {
        Self {
            r: BitString::random(kappa, rng),
            obf: rng.gen(),
        }
    }
}

pub fn setup<R: Rng + ?Sized>(
    n: usize,
    kappa: usize,
    rng: &mut R,
) -> Result<(SdSecret, SdPublicKey)> {
    if kappa == 0 {
        return Err(Error::param("kappa must be positive"));
    }
    let cosets = (0..kappa)
        .map(|_| CosetKey::sample(n, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut programs = Vec::with_capacity(kappa);
    for c in &cosets {
        let mut pair = Vec::with_capacity(2);
        for b in [false, true] {
            let p = Program::Membership(c.coset(b));
            let coins: [u8; 16] = rng.gen();
            pair.push(TransparentIo.obfuscate(&p, params_for(&p, n, 1), &coins)?);
        }
        let [p0, p1]: [ObfProgram; 2] = pair.try_into().expect("two programs");
        programs.push([p0, p1]);
    }
    Ok((SdSecret { cosets }, SdPublicKey { n, programs }))
}

pub fn qkeygen(sk: &SdSecret) -> Result<QuantumKey> {
    Ok(QuantumKey {
        registers: sk
            .cosets
            .iter()
            .map(|c| c.state())
            .collect::<Result<Vec<_>>>()?,
    })
}

/// Obfuscates `Q_{m,r}`: outputs `m` iff each readout `u_i` is accepted by
/// the `r_i`-th public program of register `i`.
pub fn enc(pk: &SdPublicKey, m: &BitString, coins: &EncCoins) -> Result<SdCiphertext> {
    if coins.r.len() != pk.kappa() {
        return Err(Error::param(format!(
            "basis string of {} bits for kappa = {}",
            coins.r.len(),
            pk.kappa()
        )));
    }
    let checks = pk
        .programs
        .iter()
        .enumerate()
        .map(|(i, pair)| Program::Obfuscated(Box::new(pair[coins.r.get(i) as usize].clone())))
        .collect();
    let q = Program::Locked {
        checks,
        message: m.clone(),
    };
    let program =
        TransparentIo.obfuscate(&q, params_for(&q, pk.kappa() * pk.n, m.len()), &coins.obf)?;
    Ok(SdCiphertext {
        r: coins.r.clone(),
        program,
    })
}

pub fn enc_random<R: Rng + ?Sized>(
    pk: &SdPublicKey,
    m: &BitString,
    rng: &mut R,
) -> Result<SdCiphertext> {
    enc(pk, m, &EncCoins::sample(pk.kappa(), rng))
}

/// Decrypts, consuming the key. `None` is the bottom output, which includes
/// ciphertexts whose shape does not fit the key.
pub fn dec<R: Rng + ?Sized>(
    key: QuantumKey,
    ct: &SdCiphertext,
    rng: &mut R,
) -> Result<Option<BitString>> {
    if ct.r.len() != key.registers.len() {
        return Ok(None);
    }
    let mut readouts = Vec::with_capacity(key.registers.len());
    for (i, mut reg) in key.registers.into_iter().enumerate() {
        if ct.r.get(i) {
            reg.hadamard_all();
        }
        readouts.push(reg.measure(rng)?.0);
    }
    Ok(match ct.program.eval(&Input::vectors(readouts)) {
        Output::Bits(m) => Some(m),
        _ => None,
    })
}

/// Decryption from classical readouts, one vector per register.
pub fn dec_classical(readouts: &[F2Vector], ct: &SdCiphertext) -> Option<BitString> {
    ct.program
        .eval(&Input::vectors(readouts.to_vec()))
        .bits()
        .cloned()
}
