//! Simultaneous distinguishing and predicting games over compute-and-compare
//! triples `(CC_1[f_1, y_1, m_1], CC_2[f_2, y_2, m_2], sigma_12)`.

use rand::Rng;

use super::{Challenge, DistributionKind, Game, Split, Strategy, TrialRng};
use crate::crypto::program::{params_for, Function, ObfKind, Obfuscator, ProgramParams};
use crate::crypto::{BitString, ObfProgram, Program};
use crate::error::{Error, Result};

pub struct CcTriple<B, C> {
    pub cc1: Program,
    pub cc2: Program,
    pub sigma_b: B,
    pub sigma_c: C,
}

/// A simultaneous compute-and-compare distribution.
pub trait CcSampler: Sync {
    type SigmaB: Send;
    type SigmaC: Send;

    fn name(&self) -> String;

    fn sample(&self, rng: &mut TrialRng) -> Result<CcTriple<Self::SigmaB, Self::SigmaC>>;
}

/// `(f, y, m)` of a compute-and-compare program.
pub fn cc_parts(p: &Program) -> Result<(&Function, &BitString, &BitString)> {
    match p {
        Program::ComputeCompare { f, lock, message } => Ok((f, lock, message)),
        _ => Err(Error::param("compute-and-compare program expected")),
    }
}

fn cc_params(p: &Program) -> Result<ProgramParams> {
    let (_, lock, message) = cc_parts(p)?;
    Ok(params_for(p, lock.len(), message.len()))
}

/// `CC[id, y_i, m_i]` with uniform locks and messages. With `leak` set, each
/// player's auxiliary register holds its own lock value.
#[derive(Clone, Copy, Debug)]
pub struct IdentityLocks {
    pub lock_bits: usize,
    pub message_bits: usize,
    pub leak: bool,
}

impl CcSampler for IdentityLocks {
    type SigmaB = Option<BitString>;
    type SigmaC = Option<BitString>;

    fn name(&self) -> String {
        if self.leak {
            "identity-locks-leaked"
        } else {
            "identity-locks"
        }
        .into()
    }

    fn sample(&self, rng: &mut TrialRng) -> Result<CcTriple<Option<BitString>, Option<BitString>>> {
        if self.lock_bits == 0 {
            return Err(Error::param("lock values need at least one bit"));
        }
        let one = |rng: &mut TrialRng| Program::ComputeCompare {
            f: Function::Identity,
            lock: BitString::random(self.lock_bits, rng),
            message: BitString::random(self.message_bits, rng),
        };
        let (cc1, cc2) = (one(rng), one(rng));
        let leak = |p: &Program| {
            if self.leak {
                cc_parts(p).ok().map(|(_, y, _)| y.clone())
            } else {
                None
            }
        };
        Ok(CcTriple {
            sigma_b: leak(&cc1),
            sigma_c: leak(&cc2),
            cc1,
            cc2,
        })
    }
}

/// The distinguishing game: each player receives its auxiliary register and
/// either the obfuscated program (`b_i = 0`) or the simulator's output
/// (`b_i = 1`), and must output `b_i`.
pub struct SimulDist<S, O> {
    pub sampler: S,
    pub obfuscator: O,
    pub coins: DistributionKind,
    pub bits: DistributionKind,
}

impl<S: CcSampler, O: Obfuscator + Sync> SimulDist<S, O> {
    fn present(&self, cc: &Program, b: bool, coins: &[u8; 16]) -> Result<ObfProgram> {
        let params = cc_params(cc)?;
        if b {
            Ok(self.obfuscator.simulate(params))
        } else {
            self.obfuscator.obfuscate(cc, params, coins)
        }
    }
}

impl<S: CcSampler, O: Obfuscator + Sync> Game for SimulDist<S, O> {
    type Prelude = ();
    type Secret = (Program, Program);
    type AliceInput = (S::SigmaB, S::SigmaC);
    type ToChallenger = ();
    type Hidden = (bool, bool);
    type Question = ObfProgram;
    type Answer = bool;

    fn name(&self) -> String {
        format!("simul-dist-{}", self.sampler.name())
    }

    fn identical(&self) -> bool {
        false
    }

    fn setup(
        &self,
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<((Program, Program), (S::SigmaB, S::SigmaC))> {
        let t = self.sampler.sample(rng)?;
        Ok(((t.cc1, t.cc2), (t.sigma_b, t.sigma_c)))
    }

    fn challenge(
        &self,
        ccs: &(Program, Program),
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<Challenge<(bool, bool), ObfProgram>> {
        let (b1, b2) = self.bits.pair(rng, |r| r.gen::<bool>());
        let (r1, r2) = self.coins.pair(rng, |r| r.gen::<[u8; 16]>());
        Ok(Challenge {
            hidden: (b1, b2),
            to_bob: self.present(&ccs.0, b1, &r1)?,
            to_charlie: self.present(&ccs.1, b2, &r2)?,
        })
    }

    fn judge(
        &self,
        _: &(Program, Program),
        b: &(bool, bool),
        g1: &bool,
        g2: &bool,
    ) -> Result<bool> {
        Ok(*g1 == b.0 && *g2 == b.1)
    }
}

/// The predicting game: each player receives `f_i` and its auxiliary
/// register and must output the lock value `y_i`.
pub struct SimulPredict<S> {
    pub sampler: S,
}

pub struct PredictSecret {
    pub f: (Function, Function),
    pub y: (BitString, BitString),
}

impl<S: CcSampler> Game for SimulPredict<S> {
    type Prelude = ();
    type Secret = PredictSecret;
    type AliceInput = (S::SigmaB, S::SigmaC);
    type ToChallenger = ();
    type Hidden = ();
    type Question = Function;
    type Answer = BitString;

    fn name(&self) -> String {
        format!("simul-predict-{}", self.sampler.name())
    }

    fn identical(&self) -> bool {
        false
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(PredictSecret, (S::SigmaB, S::SigmaC))> {
        let t = self.sampler.sample(rng)?;
        let (f1, y1, _) = cc_parts(&t.cc1)?;
        let (f2, y2, _) = cc_parts(&t.cc2)?;
        let secret = PredictSecret {
            f: (f1.clone(), f2.clone()),
            y: (y1.clone(), y2.clone()),
        };
        Ok((secret, (t.sigma_b, t.sigma_c)))
    }

    fn challenge(
        &self,
        s: &PredictSecret,
        _: &(),
        _: &mut TrialRng,
    ) -> Result<Challenge<(), Function>> {
        Ok(Challenge {
            hidden: (),
            to_bob: s.f.0.clone(),
            to_charlie: s.f.1.clone(),
        })
    }

    fn judge(&self, s: &PredictSecret, _: &(), y1: &BitString, y2: &BitString) -> Result<bool> {
        Ok(*y1 == s.y.0 && *y2 == s.y.1)
    }
}

/// Each player outputs the lock value found in its auxiliary register.
#[derive(Clone, Copy, Debug, Default)]
pub struct EchoLeak;

/// Each player outputs the all-zero string of the given length.
#[derive(Clone, Copy, Debug)]
pub struct ZeroGuess(pub usize);

impl Strategy<SimulPredict<IdentityLocks>> for EchoLeak {
    type ShareB = Option<BitString>;
    type ShareC = Option<BitString>;

    fn name(&self) -> String {
        "echo-leak".into()
    }

    fn split(
        &self,
        _: &(),
        sigma: (Option<BitString>, Option<BitString>),
        _: &mut TrialRng,
    ) -> Result<Split<Option<BitString>, Option<BitString>, ()>> {
        Ok(Split::new(sigma.0, sigma.1))
    }

    fn answer_b(&self, s: Option<BitString>, _: &Function, _: &mut TrialRng) -> Result<BitString> {
        s.ok_or_else(|| Error::strategy("no leaked lock in the auxiliary register"))
    }

    fn answer_c(&self, s: Option<BitString>, _: &Function, _: &mut TrialRng) -> Result<BitString> {
        s.ok_or_else(|| Error::strategy("no leaked lock in the auxiliary register"))
    }
}

impl<S: CcSampler> Strategy<SimulPredict<S>> for ZeroGuess {
    type ShareB = ();
    type ShareC = ();

    fn name(&self) -> String {
        "zero-guess".into()
    }

    fn split(
        &self,
        _: &(),
        _: (S::SigmaB, S::SigmaC),
        _: &mut TrialRng,
    ) -> Result<Split<(), (), ()>> {
        Ok(Split::new((), ()))
    }

    fn answer_b(&self, _: (), _: &Function, _: &mut TrialRng) -> Result<BitString> {
        Ok(BitString::zeros(self.0))
    }

    fn answer_c(&self, _: (), _: &Function, _: &mut TrialRng) -> Result<BitString> {
        Ok(BitString::zeros(self.0))
    }
}

/// Both players output a fixed bit.
#[derive(Clone, Copy, Debug)]
pub struct ConstantGuess(pub bool);

/// Reads the (transparent) program and answers 1 iff it came from the simulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct LockAware;

impl<S: CcSampler, O: Obfuscator + Sync> Strategy<SimulDist<S, O>> for ConstantGuess {
    type ShareB = ();
    type ShareC = ();

    fn name(&self) -> String {
        format!("constant-{}", self.0 as u8)
    }

    fn split(
        &self,
        _: &(),
        _: (S::SigmaB, S::SigmaC),
        _: &mut TrialRng,
    ) -> Result<Split<(), (), ()>> {
        Ok(Split::new((), ()))
    }

    fn answer_b(&self, _: (), _: &ObfProgram, _: &mut TrialRng) -> Result<bool> {
        Ok(self.0)
    }

    fn answer_c(&self, _: (), _: &ObfProgram, _: &mut TrialRng) -> Result<bool> {
        Ok(self.0)
    }
}

fn simulated(p: &ObfProgram) -> bool {
    p.kind() == ObfKind::Simulated || !matches!(p.inspect(), Program::ComputeCompare { .. })
}

impl<S: CcSampler, O: Obfuscator + Sync> Strategy<SimulDist<S, O>> for LockAware {
    type ShareB = ();
    type ShareC = ();

    fn name(&self) -> String {
        "lock-aware".into()
    }

    fn split(
        &self,
        _: &(),
        _: (S::SigmaB, S::SigmaC),
        _: &mut TrialRng,
    ) -> Result<Split<(), (), ()>> {
        Ok(Split::new((), ()))
    }

    fn answer_b(&self, _: (), p: &ObfProgram, _: &mut TrialRng) -> Result<bool> {
        Ok(simulated(p))
    }

    fn answer_c(&self, _: (), p: &ObfProgram, _: &mut TrialRng) -> Result<bool> {
        Ok(simulated(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::program::TransparentCcObf;
    use crate::games::run;

    fn game(bits: DistributionKind) -> SimulDist<IdentityLocks, TransparentCcObf> {
        SimulDist {
            sampler: IdentityLocks {
                lock_bits: 8,
                message_bits: 4,
                leak: false,
            },
            obfuscator: TransparentCcObf,
            coins: DistributionKind::Identical,
            bits,
        }
    }

    #[test]
    fn constant_guess_with_identical_bits_is_half() {
        let s = run(
            &game(DistributionKind::Identical),
            &ConstantGuess(false),
            20_000,
            1,
        )
        .unwrap();
        assert!(s.contains(0.5), "{s:?}");
        let u = run(
            &game(DistributionKind::Uniform),
            &ConstantGuess(false),
            20_000,
            1,
        )
        .unwrap();
        assert!(u.contains(0.25), "{u:?}");
    }

    #[test]
    fn transparent_obfuscation_is_distinguishable() {
        let s = run(&game(DistributionKind::Uniform), &LockAware, 1_000, 2).unwrap();
        assert_eq!(s.wins, 1_000);
    }

    #[test]
    fn leaked_locks_are_predictable() {
        let g = SimulPredict {
            sampler: IdentityLocks {
                lock_bits: 8,
                message_bits: 4,
                leak: true,
            },
        };
        assert_eq!(run(&g, &EchoLeak, 500, 3).unwrap().wins, 500);
        let h = SimulPredict {
            sampler: IdentityLocks {
                lock_bits: 8,
                message_bits: 4,
                leak: false,
            },
        };
        assert!(matches!(run(&h, &EchoLeak, 10, 3), Err(Error::Strategy(_))));
    }
}
