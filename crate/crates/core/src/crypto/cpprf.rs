//! Copy-protected PRF: the key is a list of coset states plus an obfuscated
//! hidden-trigger program.

use std::collections::BTreeMap;

use rand::Rng;

use super::bits::BitString;
use super::prf::PrfKey;
use super::profile::LengthProfile;
use super::program::{
    params_for, Input, ObfProgram, Obfuscator, Output, Program, TransparentIo, TriggerLayout,
    TriggerProgram,
};
use crate::coset::CosetKey;
use crate::error::{Error, Result};
use crate::gf2::F2Vector;
use crate::qsim::{coherent_evaluate, StateVector};

/// The classical PRF key `k1: {0,1}^n -> {0,1}^m`.
pub fn keygen<R: Rng + ?Sized>(profile: &LengthProfile, rng: &mut R) -> Result<PrfKey> {
    profile.validate()?;
    PrfKey::generate(profile.input_bits(), profile.m, rng)
}

/// Everything the protector keeps: the PRF keys and the coset descriptions.
#[derive(Clone, Debug)]
pub struct CpPrfSecret {
    pub profile: LengthProfile,
    pub k1: PrfKey,
    pub k2: PrfKey,
    pub k3: PrfKey,
    pub cosets: Vec<CosetKey>,
}

/// The copy-protected key handed to an evaluator.
#[derive(Debug)]
pub struct ProtectedPrf {
    layout: TriggerLayout,
    registers: Vec<StateVector>,
    program: ObfProgram,
}

/// Protector secret together with the protected key.
#[derive(Debug)]
pub struct CpPrfKey {
    pub secret: CpPrfSecret,
    pub protected: ProtectedPrf,
}

/// Samples the cosets and auxiliary keys, and builds the protected key for `k1`.
pub fn protect<R: Rng + ?Sized>(
    profile: &LengthProfile,
    k1: &PrfKey,
    rng: &mut R,
) -> Result<CpPrfKey> {
    profile.validate_simulable()?;
    if k1.input_bits() != profile.input_bits() || k1.output_bits() != profile.m {
        return Err(Error::param(
            "PRF key shape does not match the length profile",
        ));
    }
    let layout = TriggerLayout {
        l0: profile.l0,
        l1: profile.l1,
        l2: profile.l2,
    };
    let k2 = PrfKey::generate(profile.l2, profile.l1, rng)?;
    let k3 = PrfKey::generate(profile.l1, profile.l2, rng)?;
    let cosets = (0..profile.l0)
        .map(|_| CosetKey::sample(profile.coset_n, rng))
        .collect::<Result<Vec<_>>>()?;
    let trigger = TriggerProgram {
        layout,
        k1: k1.clone(),
        k2: k2.clone(),
        k3: k3.clone(),
        cosets: cosets.iter().map(|c| [c.primal(), c.dual()]).collect(),
    };
    let program = Program::HiddenTrigger(Box::new(trigger));
    let coins: [u8; 16] = rng.gen();
    let obf = TransparentIo.obfuscate(
        &program,
        params_for(&program, profile.input_bits(), profile.m),
        &coins,
    )?;
    let registers = cosets
        .iter()
        .map(|c| c.state())
        .collect::<Result<Vec<_>>>()?;
    Ok(CpPrfKey {
        secret: CpPrfSecret {
            profile: *profile,
            k1: k1.clone(),
            k2,
            k3,
            cosets,
        },
        protected: ProtectedPrf {
            layout,
            registers,
            program: obf,
        },
    })
}

impl ProtectedPrf {
    pub fn from_parts(
        layout: TriggerLayout,
        registers: Vec<StateVector>,
        program: ObfProgram,
    ) -> Self {
        Self {
            layout,
            registers,
            program,
        }
    }

    pub fn into_parts(self) -> (TriggerLayout, Vec<StateVector>, ObfProgram) {
        (self.layout, self.registers, self.program)
    }

    pub fn layout(&self) -> TriggerLayout {
        self.layout
    }

    pub fn program(&self) -> &ObfProgram {
        &self.program
    }

    pub fn registers(&self) -> &[StateVector] {
        &self.registers
    }

    fn basis_mask(&self, x: &BitString, i: usize) -> Result<F2Vector> {
        let n = self.registers[i].num_qubits();
        let z = F2Vector::zero(n)?;
        Ok(if x.get(i) { z.not() } else { z })
    }

    fn check_input(&self, x: &BitString) -> Result<()> {
        if x.len() != self.layout.input_bits() {
            return Err(Error::param(format!(
                "input of {} bits, expected {}",
                x.len(),
                self.layout.input_bits()
            )));
        }
        if self.registers.len() != self.layout.l0 {
            return Err(Error::state("register count differs from l0"));
        }
        Ok(())
    }

    /// Evaluates at `x`: register `i` is measured in the Hadamard basis when
    /// `x0_i = 1` and in the computational basis otherwise, and the program
    /// runs on the readouts.
    ///
    /// The readouts are taken from copies of the registers. For an honestly
    /// generated key the output is deterministic, and a coherent evaluation
    /// followed by uncomputation returns the registers unchanged, so the key
    /// stays usable.
    pub fn eval<R: Rng + ?Sized>(&self, x: &BitString, rng: &mut R) -> Result<Output> {
        self.check_input(x)?;
        let mut readouts = Vec::with_capacity(self.registers.len());
        for (i, reg) in self.registers.iter().enumerate() {
            let mut r = reg.clone();
            r.hadamard(&self.basis_mask(x, i)?);
            readouts.push(r.measure(rng)?.0);
        }
        Ok(self.program.eval(&Input::full(x.clone(), readouts)))
    }

    /// Exact output distribution of the measure-then-evaluate procedure.
    pub fn eval_distribution(&self, x: &BitString) -> Result<BTreeMap<Output, f64>> {
        self.check_input(x)?;
        let mut joint: Vec<(Vec<F2Vector>, f64)> = vec![(Vec::new(), 1.0)];
        for (i, reg) in self.registers.iter().enumerate() {
            let dist = reg.outcome_distribution(Some(&self.basis_mask(x, i)?));
            joint = joint
                .iter()
                .flat_map(|(vs, p)| {
                    dist.iter().map(move |(v, q)| {
                        let mut w = vs.clone();
                        w.push(*v);
                        (w, p * q)
                    })
                })
                .collect();
        }
        let mut out = BTreeMap::new();
        for (vs, p) in joint {
            *out.entry(self.program.eval(&Input::full(x.clone(), vs)))
                .or_insert(0.0) += p;
        }
        Ok(out)
    }

    /// Output distribution of the fully coherent evaluation: the program is
    /// run as a unitary oracle into an output register, and only that
    /// register is read.
    pub fn eval_distribution_coherent(&self, x: &BitString) -> Result<BTreeMap<Output, f64>> {
        self.check_input(x)?;
        let mut regs = self.registers.clone();
        for (i, r) in regs.iter_mut().enumerate() {
            r.hadamard(&self.basis_mask(x, i)?);
        }
        coherent_evaluate(&regs, |vs| {
            self.program.eval(&Input::full(x.clone(), vs.to_vec()))
        })
    }
}

/// Total-variation distance between the coherent and the measured output
/// distributions at `x`.
pub fn coherent_gap(key: &ProtectedPrf, x: &BitString) -> Result<f64> {
    let a = key.eval_distribution(x)?;
    let b = key.eval_distribution_coherent(x)?;
    let mut gap = 0.0;
    for o in a.keys().chain(b.keys().filter(|o| !a.contains_key(*o))) {
        gap += (a.get(o).copied().unwrap_or(0.0) - b.get(o).copied().unwrap_or(0.0)).abs();
    }
    Ok(gap / 2.0)
}

/// Builds a trigger input that shares `x0` and makes the key output `y`.
pub fn gen_trigger(secret: &CpPrfSecret, x0: &BitString, y: &BitString) -> Result<BitString> {
    let p = &secret.profile;
    if x0.len() != p.l0 || y.len() != p.m {
        return Err(Error::param(
            "trigger prefix or output has the wrong length",
        ));
    }
    let q = Program::Locked {
        checks: secret
            .cosets
            .iter()
            .enumerate()
            .map(|(i, c)| Program::Membership(c.coset(x0.get(i))))
            .collect(),
        message: y.clone(),
    };
    let qbits = q.to_bits();
    let room = p.l2 - p.l0;
    if qbits.len() > room {
        return Err(Error::param(format!(
            "trigger program needs {} bits, only {room} available",
            qbits.len()
        )));
    }
    let payload = x0
        .concat(&qbits)
        .concat(&BitString::zeros(room - qbits.len()));
    let x1 = secret.k2.eval(&payload)?;
    let x2 = secret.k3.eval(&x1)?.xor(&payload)?;
    Ok(x0.concat(&x1).concat(&x2))
}
