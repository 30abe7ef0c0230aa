//! Anti-piracy games for the five constructions, with baseline strategies.

use rand::Rng;

use super::{Challenge, DistributionKind, Game, Split, Strategy, TrialRng};
use crate::crypto::cppf::{self, ProtectedPoint};
use crate::crypto::cpprf::{self, ProtectedPrf};
use crate::crypto::sd::{self, EncCoins, QuantumKey, SdCiphertext, SdPublicKey};
use crate::crypto::ts::{self, Token, VerificationKey};
use crate::crypto::ue::{self, UeCiphertext, UeKey};
use crate::crypto::{BitString, LengthProfile, Output, Program};
use crate::error::{Error, Result};
use crate::gf2::F2Vector;

/// Both players' bits `(b_1, b_2)`; in identical variants `b_1 = b_2`.
pub type Bits = (bool, bool);

fn both_right(b: &Bits, g1: bool, g2: bool) -> bool {
    g1 == b.0 && g2 == b.1
}

// ---------------------------------------------------------------- single-decryptor

/// Alice's two message pairs, one for each player.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MessagePairs {
    pub bob: [BitString; 2],
    pub charlie: [BitString; 2],
}

/// Single-decryptor piracy game. Product variant: independent `b_i` and
/// coins `r_i`. Identical variant: one `b` and one `r` for both ciphertexts.
#[derive(Clone, Copy, Debug)]
pub struct SdPiracy {
    pub n: usize,
    pub kappa: usize,
    pub message_bits: usize,
    pub kind: DistributionKind,
}

pub struct SdInput {
    pub pk: SdPublicKey,
    pub key: QuantumKey,
    pub message_bits: usize,
}

impl Game for SdPiracy {
    type Prelude = ();
    type Secret = SdPublicKey;
    type AliceInput = SdInput;
    type ToChallenger = MessagePairs;
    type Hidden = Bits;
    type Question = SdCiphertext;
    type Answer = bool;

    fn name(&self) -> String {
        format!("sd-{}", kind_tag(self.kind))
    }

    fn identical(&self) -> bool {
        false
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(SdPublicKey, SdInput)> {
        let (sk, pk) = sd::setup(self.n, self.kappa, rng)?;
        let key = sd::qkeygen(&sk)?;
        Ok((
            pk.clone(),
            SdInput {
                pk,
                key,
                message_bits: self.message_bits,
            },
        ))
    }

    fn challenge(
        &self,
        pk: &SdPublicKey,
        msgs: &MessagePairs,
        rng: &mut TrialRng,
    ) -> Result<Challenge<Bits, SdCiphertext>> {
        for m in msgs.bob.iter().chain(&msgs.charlie) {
            if m.len() != self.message_bits {
                return Err(Error::strategy(format!(
                    "message of {} bits, expected {}",
                    m.len(),
                    self.message_bits
                )));
            }
        }
        let (b1, b2) = self.kind.pair(rng, |r| r.gen::<bool>());
        let (r1, r2) = self.kind.pair(rng, |r| EncCoins::sample(self.kappa, r));
        Ok(Challenge {
            hidden: (b1, b2),
            to_bob: sd::enc(pk, &msgs.bob[b1 as usize], &r1)?,
            to_charlie: sd::enc(pk, &msgs.charlie[b2 as usize], &r2)?,
        })
    }

    fn judge(&self, _: &SdPublicKey, b: &Bits, g1: &bool, g2: &bool) -> Result<bool> {
        Ok(both_right(b, *g1, *g2))
    }
}

fn kind_tag(kind: DistributionKind) -> &'static str {
    match kind {
        DistributionKind::Uniform => "product",
        DistributionKind::Identical => "identical",
    }
}

fn default_pair(bits: usize) -> [BitString; 2] {
    [BitString::zeros(bits), BitString::new(vec![true; bits])]
}

fn index_of(pair: &[BitString; 2], m: &BitString) -> bool {
    *m == pair[1] && pair[0] != pair[1]
}

/// Bob receives the quantum key and decrypts; Charlie guesses.
#[derive(Clone, Copy, Debug, Default)]
pub struct ForwardToBob;

pub struct SdBobShare {
    key: QuantumKey,
    pair: [BitString; 2],
}

impl Strategy<SdPiracy> for ForwardToBob {
    type ShareB = SdBobShare;
    type ShareC = ();

    fn name(&self) -> String {
        "forward-to-bob".into()
    }

    fn split(
        &self,
        _: &(),
        input: SdInput,
        _: &mut TrialRng,
    ) -> Result<Split<SdBobShare, (), MessagePairs>> {
        let pair = default_pair(input.message_bits);
        Ok(Split {
            bob: SdBobShare {
                key: input.key,
                pair: pair.clone(),
            },
            charlie: (),
            to_challenger: MessagePairs {
                bob: pair.clone(),
                charlie: pair,
            },
        })
    }

    fn answer_b(&self, share: SdBobShare, ct: &SdCiphertext, rng: &mut TrialRng) -> Result<bool> {
        let m = sd::dec(share.key, ct, rng)?
            .ok_or_else(|| Error::strategy("honest decryption failed"))?;
        Ok(index_of(&share.pair, &m))
    }

    fn answer_c(&self, _: (), _: &SdCiphertext, rng: &mut TrialRng) -> Result<bool> {
        Ok(rng.gen())
    }
}

/// Reads every coset out of the transparent public key, so both players can
/// decrypt classically from canonical representatives.
#[derive(Clone, Copy, Debug, Default)]
pub struct SdTransparent;

pub struct SdLeak {
    reps: Vec<[F2Vector; 2]>,
    pair: [BitString; 2],
}

impl SdLeak {
    fn guess(&self, ct: &SdCiphertext) -> Result<bool> {
        if ct.r.len() != self.reps.len() {
            return Err(Error::strategy("ciphertext does not match the public key"));
        }
        let readouts: Vec<F2Vector> = self
            .reps
            .iter()
            .enumerate()
            .map(|(i, r)| r[ct.r.get(i) as usize])
            .collect();
        let m = sd::dec_classical(&readouts, ct)
            .ok_or_else(|| Error::strategy("leaked cosets failed to decrypt"))?;
        Ok(index_of(&self.pair, &m))
    }
}

impl Strategy<SdPiracy> for SdTransparent {
    type ShareB = SdLeak;
    type ShareC = SdLeak;

    fn name(&self) -> String {
        "transparent-attack".into()
    }

    fn split(
        &self,
        _: &(),
        input: SdInput,
        _: &mut TrialRng,
    ) -> Result<Split<SdLeak, SdLeak, MessagePairs>> {
        let mut reps = Vec::with_capacity(input.pk.kappa());
        for pair in input.pk.programs() {
            let rep = |i: usize| match pair[i].inspect() {
                Program::Membership(c) => Ok(*c.rep()),
                _ => Err(Error::strategy(
                    "membership program expected in the public key",
                )),
            };
            reps.push([rep(0)?, rep(1)?]);
        }
        let pair = default_pair(input.message_bits);
        let leak = |reps: Vec<[F2Vector; 2]>| SdLeak {
            reps,
            pair: pair.clone(),
        };
        Ok(Split {
            bob: leak(reps.clone()),
            charlie: leak(reps),
            to_challenger: MessagePairs {
                bob: pair.clone(),
                charlie: pair.clone(),
            },
        })
    }

    fn answer_b(&self, share: SdLeak, ct: &SdCiphertext, _: &mut TrialRng) -> Result<bool> {
        share.guess(ct)
    }

    fn answer_c(&self, share: SdLeak, ct: &SdCiphertext, _: &mut TrialRng) -> Result<bool> {
        share.guess(ct)
    }
}

// ---------------------------------------------------------------- copy-protected PRF

/// PRF copy-protection piracy game: Alice gets `rho_k` and `y = PRF(k, x)`;
/// each player must tell whether its input is `x` (`b = 0`) or fresh.
#[derive(Clone, Copy, Debug)]
pub struct CpPrfPiracy {
    pub profile: LengthProfile,
    pub kind: DistributionKind,
}

pub struct CpPrfInput {
    pub key: ProtectedPrf,
    pub y: BitString,
}

impl Game for CpPrfPiracy {
    type Prelude = ();
    type Secret = BitString;
    type AliceInput = CpPrfInput;
    type ToChallenger = ();
    type Hidden = Bits;
    type Question = BitString;
    type Answer = bool;

    fn name(&self) -> String {
        format!("cp-prf-{}", kind_tag(self.kind))
    }

    fn identical(&self) -> bool {
        self.kind == DistributionKind::Identical
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(BitString, CpPrfInput)> {
        let k = cpprf::keygen(&self.profile, rng)?;
        let key = cpprf::protect(&self.profile, &k, rng)?.protected;
        let x = BitString::random(self.profile.input_bits(), rng);
        let y = k.eval(&x)?;
        Ok((x, CpPrfInput { key, y }))
    }

    fn challenge(
        &self,
        x: &BitString,
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<Challenge<Bits, BitString>> {
        let len = self.profile.input_bits();
        let (b1, b2) = self.kind.pair(rng, |r| r.gen::<bool>());
        let (x1, x2) = self.kind.pair(rng, |r| BitString::random(len, r));
        let pick = |b: bool, fresh: BitString| if b { fresh } else { x.clone() };
        Ok(Challenge {
            hidden: (b1, b2),
            to_bob: pick(b1, x1),
            to_charlie: pick(b2, x2),
        })
    }

    fn judge(&self, _: &BitString, b: &Bits, g1: &bool, g2: &bool) -> Result<bool> {
        Ok(both_right(b, *g1, *g2))
    }
}

impl Strategy<CpPrfPiracy> for ForwardToBob {
    type ShareB = CpPrfInput;
    type ShareC = ();

    fn name(&self) -> String {
        "forward-to-bob".into()
    }

    fn split(
        &self,
        _: &(),
        input: CpPrfInput,
        _: &mut TrialRng,
    ) -> Result<Split<CpPrfInput, (), ()>> {
        Ok(Split::new(input, ()))
    }

    fn answer_b(&self, share: CpPrfInput, x: &BitString, rng: &mut TrialRng) -> Result<bool> {
        Ok(share.key.eval(x, rng)? != Output::Bits(share.y))
    }

    fn answer_c(&self, _: (), _: &BitString, rng: &mut TrialRng) -> Result<bool> {
        Ok(rng.gen())
    }
}

// ---------------------------------------------------------------- copy-protected point functions

/// Point-function copy-protection piracy game: each player must tell whether
/// its input is the protected point `y` (`b = 0`) or a uniform string.
#[derive(Clone, Copy, Debug)]
pub struct CpPfPiracy {
    pub profile: LengthProfile,
    pub kind: DistributionKind,
}

impl Game for CpPfPiracy {
    type Prelude = ();
    type Secret = BitString;
    type AliceInput = ProtectedPoint;
    type ToChallenger = ();
    type Hidden = Bits;
    type Question = BitString;
    type Answer = bool;

    fn name(&self) -> String {
        format!("cp-pf-{}", kind_tag(self.kind))
    }

    fn identical(&self) -> bool {
        self.kind == DistributionKind::Identical
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(BitString, ProtectedPoint)> {
        let y = BitString::random(self.profile.input_bits(), rng);
        let rho = cppf::protect(&self.profile, &y, rng)?;
        Ok((y, rho))
    }

    fn challenge(
        &self,
        y: &BitString,
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<Challenge<Bits, BitString>> {
        let len = self.profile.input_bits();
        let (b1, b2) = self.kind.pair(rng, |r| r.gen::<bool>());
        let (x1, x2) = self.kind.pair(rng, |r| BitString::random(len, r));
        let pick = |b: bool, fresh: BitString| if b { fresh } else { y.clone() };
        Ok(Challenge {
            hidden: (b1, b2),
            to_bob: pick(b1, x1),
            to_charlie: pick(b2, x2),
        })
    }

    fn judge(&self, _: &BitString, b: &Bits, g1: &bool, g2: &bool) -> Result<bool> {
        Ok(both_right(b, *g1, *g2))
    }
}

impl Strategy<CpPfPiracy> for ForwardToBob {
    type ShareB = ProtectedPoint;
    type ShareC = ();

    fn name(&self) -> String {
        "forward-to-bob".into()
    }

    fn split(
        &self,
        _: &(),
        input: ProtectedPoint,
        _: &mut TrialRng,
    ) -> Result<Split<ProtectedPoint, (), ()>> {
        Ok(Split::new(input, ()))
    }

    fn answer_b(&self, rho: ProtectedPoint, x: &BitString, rng: &mut TrialRng) -> Result<bool> {
        Ok(!rho.eval(x, rng)?)
    }

    fn answer_c(&self, _: (), _: &BitString, rng: &mut TrialRng) -> Result<bool> {
        Ok(rng.gen())
    }
}

// ---------------------------------------------------------------- unclonable encryption

/// Alice's message pair for the unclonable-encryption game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UeMessages(pub [bool; 2]);

impl Default for UeMessages {
    fn default() -> Self {
        Self([false, true])
    }
}

/// One-time unclonable encryption piracy game: Alice picks `(m_0, m_1)`,
/// receives `Enc(k, m_b)`, splits; then both players get `k` and must
/// output `b`.
#[derive(Clone, Copy, Debug)]
pub struct UePiracy {
    pub profile: LengthProfile,
}

pub struct UeSecret {
    pub key: UeKey,
    pub b: bool,
}

impl Game for UePiracy {
    type Prelude = UeMessages;
    type Secret = UeSecret;
    type AliceInput = UeCiphertext;
    type ToChallenger = ();
    type Hidden = ();
    type Question = UeKey;
    type Answer = bool;

    fn name(&self) -> String {
        "ue".into()
    }

    fn identical(&self) -> bool {
        true
    }

    fn setup(&self, m: &UeMessages, rng: &mut TrialRng) -> Result<(UeSecret, UeCiphertext)> {
        let key = ue::keygen(&self.profile, rng)?;
        let b: bool = rng.gen();
        let ct = ue::enc(&key, m.0[b as usize], rng)?;
        Ok((UeSecret { key, b }, ct))
    }

    fn challenge(&self, s: &UeSecret, _: &(), _: &mut TrialRng) -> Result<Challenge<(), UeKey>> {
        Ok(Challenge {
            hidden: (),
            to_bob: s.key.clone(),
            to_charlie: s.key.clone(),
        })
    }

    fn judge(&self, s: &UeSecret, _: &(), g1: &bool, g2: &bool) -> Result<bool> {
        Ok(*g1 == s.b && *g2 == s.b)
    }
}

pub struct UeBobShare {
    ct: UeCiphertext,
    messages: UeMessages,
}

impl Strategy<UePiracy> for ForwardToBob {
    type ShareB = UeBobShare;
    type ShareC = ();

    fn name(&self) -> String {
        "forward-to-bob".into()
    }

    fn split(
        &self,
        m: &UeMessages,
        ct: UeCiphertext,
        _: &mut TrialRng,
    ) -> Result<Split<UeBobShare, (), ()>> {
        Ok(Split::new(UeBobShare { ct, messages: *m }, ()))
    }

    fn answer_b(&self, share: UeBobShare, key: &UeKey, rng: &mut TrialRng) -> Result<bool> {
        let m = ue::dec(key, share.ct, rng)?;
        let [m0, m1] = share.messages.0;
        Ok(m == m1 && m0 != m1)
    }

    fn answer_c(&self, _: (), _: &UeKey, rng: &mut TrialRng) -> Result<bool> {
        Ok(rng.gen())
    }
}

// ---------------------------------------------------------------- tokenized signatures

/// Unclonable-unforgeability game for single-bit tokenized signatures:
/// both players receive the same random `b` and must each produce a
/// signature of `b` that verifies.
#[derive(Clone, Copy, Debug)]
pub struct TsPiracy {
    pub n: usize,
}

pub struct TsInput {
    pub token: Token,
    pub vk: VerificationKey,
}

impl Game for TsPiracy {
    type Prelude = ();
    type Secret = VerificationKey;
    type AliceInput = TsInput;
    type ToChallenger = ();
    type Hidden = bool;
    type Question = bool;
    type Answer = F2Vector;

    fn name(&self) -> String {
        "ts-uu".into()
    }

    fn identical(&self) -> bool {
        true
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(VerificationKey, TsInput)> {
        let (sk, vk) = ts::keygen(self.n, rng)?;
        let token = ts::token_gen(&sk)?;
        Ok((vk.clone(), TsInput { token, vk }))
    }

    fn challenge(
        &self,
        _: &VerificationKey,
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<Challenge<bool, bool>> {
        let b: bool = rng.gen();
        Ok(Challenge {
            hidden: b,
            to_bob: b,
            to_charlie: b,
        })
    }

    /// Signatures of the wrong length are rejected, which is a loss.
    fn judge(&self, vk: &VerificationKey, b: &bool, s1: &F2Vector, s2: &F2Vector) -> Result<bool> {
        Ok(ts::verify(vk, *b, s1) && ts::verify(vk, *b, s2))
    }
}

/// Alice signs 0 with the token (a computational-basis measurement) and
/// forwards the signature; both players output it.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeasureForward;

impl Strategy<TsPiracy> for MeasureForward {
    type ShareB = F2Vector;
    type ShareC = F2Vector;

    fn name(&self) -> String {
        "measure-forward".into()
    }

    fn split(
        &self,
        _: &(),
        input: TsInput,
        rng: &mut TrialRng,
    ) -> Result<Split<F2Vector, F2Vector, ()>> {
        let sig = ts::sign(input.token, false, rng)?;
        Ok(Split::new(sig.sigma, sig.sigma))
    }

    fn answer_b(&self, s: F2Vector, _: &bool, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(s)
    }

    fn answer_c(&self, s: F2Vector, _: &bool, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(s)
    }
}

/// Value of [`MeasureForward`] in the tokenized-signature game: a bit-0
/// signature always verifies, and for `b = 1` it verifies iff it lies in
/// `A^perp + s'`, which for uniform `s'` happens with probability `2^{-n/2}`.
pub fn ts_measure_forward_value(n: usize) -> f64 {
    0.5 + 0.5 * 0.5f64.powi(n as i32 / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::run;

    #[test]
    fn sd_transparent_attack_always_wins() {
        for kind in [DistributionKind::Uniform, DistributionKind::Identical] {
            let g = SdPiracy {
                n: 4,
                kappa: 2,
                message_bits: 8,
                kind,
            };
            assert_eq!(run(&g, &SdTransparent, 200, 1).unwrap().wins, 200);
        }
    }

    #[test]
    fn sd_forward_to_bob_is_half() {
        let g = SdPiracy {
            n: 4,
            kappa: 2,
            message_bits: 8,
            kind: DistributionKind::Identical,
        };
        let s = run(&g, &ForwardToBob, 4_000, 2).unwrap();
        assert!(s.contains(0.5), "{s:?}");
    }

    #[test]
    fn cp_games_forward_to_bob_is_half() {
        let profile = LengthProfile::desk();
        for kind in [DistributionKind::Uniform, DistributionKind::Identical] {
            let s = run(&CpPrfPiracy { profile, kind }, &ForwardToBob, 1_000, 3).unwrap();
            assert!(s.contains(0.5), "{s:?}");
            let s = run(&CpPfPiracy { profile, kind }, &ForwardToBob, 1_000, 4).unwrap();
            assert!(s.contains(0.5), "{s:?}");
        }
    }
}
