//! Coset-state monogamy games: identical basis (plain and with membership
//! programs), the original two-coset game, and the κ-fold parallel game.

use std::collections::BTreeSet;

use rand::Rng;

use super::{
    check_enumeration, Challenge, EnumerableGame, ExactStrategy, Game, Split, Strategy, TrialRng,
};
use crate::coset::CosetKey;
use crate::crypto::program::{params_for, Obfuscator, TransparentIo};
use crate::crypto::{ObfProgram, Program};
use crate::error::{Error, Result};
use crate::gf2::{Coset, F2Subspace, F2Vector};
use crate::qsim::{StateVector, DEFAULT_QUBIT_LIMIT};

/// Largest `n` for which exact mode lists every coset key.
pub const MAX_EXACT_N: usize = 8;

pub fn check_even(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::param(format!(
            "n = {n}: Theta_n, the basis strings of weight n/2, needs an even, positive n"
        )));
    }
    if n > DEFAULT_QUBIT_LIMIT {
        return Err(Error::capacity(format!(
            "{n} qubits exceeds the limit of {DEFAULT_QUBIT_LIMIT}"
        )));
    }
    Ok(())
}

fn ones(n: usize) -> F2Vector {
    F2Vector::zero(n).expect("n checked").not()
}

/// One representative per coset of `space`.
fn coset_reps(space: &F2Subspace) -> Vec<F2Vector> {
    let n = space.ambient_dim();
    let reps: BTreeSet<F2Vector> = (0..1u64 << n)
        .map(|w| space.canonical_rep(&F2Vector::from_bits(n, w).expect("fits")))
        .collect();
    reps.into_iter().collect()
}

/// Every `(A, s, s')` up to the coset classes of `s` and `s'`, each with equal
/// weight. This induces the same distribution of states and cosets as uniform
/// `(A, s, s')`.
pub fn all_coset_keys(n: usize) -> Result<Vec<CosetKey>> {
    check_even(n)?;
    if n > MAX_EXACT_N {
        return Err(Error::capacity(format!(
            "exact coset enumeration is limited to n <= {MAX_EXACT_N}"
        )));
    }
    let spaces = F2Subspace::enumerate(n, n / 2)?;
    check_enumeration(spaces.len() as u64 * (1u64 << n))?;
    let mut out = Vec::new();
    for a in spaces {
        let dual = a.dual();
        let (reps, dual_reps) = (coset_reps(&a), coset_reps(&dual));
        for s in &reps {
            for sp in &dual_reps {
                out.push(CosetKey::new(a.clone(), *s, *sp)?);
            }
        }
    }
    Ok(out)
}

fn membership_programs(key: &CosetKey, coins: &[u8]) -> Result<[ObfProgram; 2]> {
    let n = key.n();
    let make = |c: Coset| {
        let p = Program::Membership(c);
        TransparentIo.obfuscate(&p, params_for(&p, n, 1), coins)
    };
    Ok([make(key.primal())?, make(key.dual())?])
}

fn check_answer(u: &F2Vector, n: usize) -> Result<()> {
    if u.len() != n {
        return Err(Error::strategy(format!(
            "answer of length {}, expected {n}",
            u.len()
        )));
    }
    Ok(())
}

fn correct(key: &CosetKey, b: bool, u: &F2Vector) -> Result<bool> {
    check_answer(u, key.n())?;
    Ok(key.coset(b).contains(u))
}

fn measured(state: &StateVector, hadamard: bool) -> Vec<(f64, F2Vector)> {
    let mask = ones(state.num_qubits());
    state
        .outcome_distribution(hadamard.then_some(&mask))
        .into_iter()
        .map(|(u, p)| (p, u))
        .collect()
}

fn measure(mut state: StateVector, hadamard: bool, rng: &mut TrialRng) -> Result<F2Vector> {
    if hadamard {
        state.hadamard_all();
    }
    Ok(state.measure(rng)?.0)
}

/// Cartesian product of independent finite distributions.
pub(crate) fn product<T: Clone>(dists: &[Vec<(f64, T)>]) -> Vec<(f64, Vec<T>)> {
    let mut acc: Vec<(f64, Vec<T>)> = vec![(1.0, Vec::new())];
    for d in dists {
        acc = acc
            .iter()
            .flat_map(|(p, xs)| {
                d.iter().map(move |(q, x)| {
                    let mut ys = xs.clone();
                    ys.push(x.clone());
                    (p * q, ys)
                })
            })
            .collect();
    }
    acc
}

fn bits(width: usize) -> Vec<Vec<bool>> {
    (0..1u64 << width)
        .map(|w| {
            (0..width)
                .map(|i| (w >> (width - 1 - i)) & 1 == 1)
                .collect()
        })
        .collect()
}

/// Identical-basis coset game. With `programs` set, Alice also receives
/// obfuscated membership programs for `A + s` and `A^perp + s'`.
#[derive(Clone, Copy, Debug)]
pub struct CosetIdentical {
    n: usize,
    programs: bool,
}

pub struct CosetInput {
    pub state: StateVector,
    pub programs: Option<[ObfProgram; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetQuestion {
    pub space: F2Subspace,
    pub b: bool,
}

impl CosetIdentical {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(Self { n, programs: false })
    }

    pub fn computational(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(Self { n, programs: true })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn input(&self, key: &CosetKey, coins: &[u8]) -> Result<CosetInput> {
        let programs = if self.programs {
            Some(membership_programs(key, coins)?)
        } else {
            None
        };
        Ok(CosetInput {
            state: key.state()?,
            programs,
        })
    }
}

impl Game for CosetIdentical {
    type Prelude = ();
    type Secret = CosetKey;
    type AliceInput = CosetInput;
    type ToChallenger = ();
    type Hidden = bool;
    type Question = CosetQuestion;
    type Answer = F2Vector;

    fn name(&self) -> String {
        if self.programs {
            "moe-coset-computational"
        } else {
            "moe-coset-identical"
        }
        .into()
    }

    fn identical(&self) -> bool {
        true
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(CosetKey, CosetInput)> {
        let key = CosetKey::sample(self.n, rng)?;
        let coins: [u8; 16] = rng.gen();
        let input = self.input(&key, &coins)?;
        Ok((key, input))
    }

    fn challenge(
        &self,
        key: &CosetKey,
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<Challenge<bool, CosetQuestion>> {
        let b: bool = rng.gen();
        let q = CosetQuestion {
            space: key.space().clone(),
            b,
        };
        Ok(Challenge {
            hidden: b,
            to_bob: q.clone(),
            to_charlie: q,
        })
    }

    fn judge(&self, key: &CosetKey, b: &bool, u1: &F2Vector, u2: &F2Vector) -> Result<bool> {
        Ok(correct(key, *b, u1)? & correct(key, *b, u2)?)
    }
}

impl EnumerableGame for CosetIdentical {
    fn setups(&self) -> Result<Vec<(f64, CosetKey, CosetInput)>> {
        let keys = all_coset_keys(self.n)?;
        let w = 1.0 / keys.len() as f64;
        keys.into_iter()
            .map(|k| {
                let input = self.input(&k, &[0; 16])?;
                Ok((w, k, input))
            })
            .collect()
    }

    fn challenges(
        &self,
        key: &CosetKey,
        _: &(),
    ) -> Result<Vec<(f64, Challenge<bool, CosetQuestion>)>> {
        Ok([false, true]
            .into_iter()
            .map(|b| {
                let q = CosetQuestion {
                    space: key.space().clone(),
                    b,
                };
                (
                    0.5,
                    Challenge {
                        hidden: b,
                        to_bob: q.clone(),
                        to_charlie: q,
                    },
                )
            })
            .collect())
    }
}

/// The original game: no basis bit; Bob must answer in `A + s` and Charlie in
/// `A^perp + s'`, both knowing `A`.
#[derive(Clone, Copy, Debug)]
pub struct CosetOriginal {
    n: usize,
}

impl CosetOriginal {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(Self { n })
    }
}

impl Game for CosetOriginal {
    type Prelude = ();
    type Secret = CosetKey;
    type AliceInput = StateVector;
    type ToChallenger = ();
    type Hidden = ();
    type Question = F2Subspace;
    type Answer = F2Vector;

    fn name(&self) -> String {
        "moe-coset-original".into()
    }

    fn identical(&self) -> bool {
        true
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(CosetKey, StateVector)> {
        let key = CosetKey::sample(self.n, rng)?;
        let state = key.state()?;
        Ok((key, state))
    }

    fn challenge(
        &self,
        key: &CosetKey,
        _: &(),
        _: &mut TrialRng,
    ) -> Result<Challenge<(), F2Subspace>> {
        Ok(Challenge {
            hidden: (),
            to_bob: key.space().clone(),
            to_charlie: key.space().clone(),
        })
    }

    fn judge(&self, key: &CosetKey, _: &(), u1: &F2Vector, u2: &F2Vector) -> Result<bool> {
        Ok(correct(key, false, u1)? & correct(key, true, u2)?)
    }
}

impl EnumerableGame for CosetOriginal {
    fn setups(&self) -> Result<Vec<(f64, CosetKey, StateVector)>> {
        let keys = all_coset_keys(self.n)?;
        let w = 1.0 / keys.len() as f64;
        keys.into_iter()
            .map(|k| {
                let s = k.state()?;
                Ok((w, k, s))
            })
            .collect()
    }

    fn challenges(&self, key: &CosetKey, _: &()) -> Result<Vec<(f64, Challenge<(), F2Subspace>)>> {
        Ok(vec![(
            1.0,
            Challenge {
                hidden: (),
                to_bob: key.space().clone(),
                to_charlie: key.space().clone(),
            },
        )])
    }
}

/// κ independent cosets with membership programs and one shared challenge
/// string `r`; a player is correct only if all κ answers are.
#[derive(Clone, Copy, Debug)]
pub struct CosetParallel {
    n: usize,
    kappa: usize,
}

pub struct ParallelInput {
    pub states: Vec<StateVector>,
    pub programs: Vec<[ObfProgram; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelQuestion {
    pub spaces: Vec<F2Subspace>,
    pub r: Vec<bool>,
}

impl CosetParallel {
    pub fn new(n: usize, kappa: usize) -> Result<Self> {
        check_even(n)?;
        if kappa == 0 {
            return Err(Error::param("kappa must be at least 1"));
        }
        Ok(Self { n, kappa })
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    fn input(keys: &[CosetKey], coins: &[u8]) -> Result<ParallelInput> {
        Ok(ParallelInput {
            states: keys.iter().map(|k| k.state()).collect::<Result<_>>()?,
            programs: keys
                .iter()
                .map(|k| membership_programs(k, coins))
                .collect::<Result<_>>()?,
        })
    }

    fn question(keys: &[CosetKey], r: Vec<bool>) -> Challenge<Vec<bool>, ParallelQuestion> {
        let q = ParallelQuestion {
            spaces: keys.iter().map(|k| k.space().clone()).collect(),
            r: r.clone(),
        };
        Challenge {
            hidden: r,
            to_bob: q.clone(),
            to_charlie: q,
        }
    }

    fn all_correct(&self, keys: &[CosetKey], r: &[bool], us: &[F2Vector]) -> Result<bool> {
        if us.len() != self.kappa {
            return Err(Error::strategy(format!(
                "{} answers, expected {}",
                us.len(),
                self.kappa
            )));
        }
        let mut ok = true;
        for ((k, &ri), u) in keys.iter().zip(r).zip(us) {
            ok &= correct(k, ri, u)?;
        }
        Ok(ok)
    }
}

impl Game for CosetParallel {
    type Prelude = ();
    type Secret = Vec<CosetKey>;
    type AliceInput = ParallelInput;
    type ToChallenger = ();
    type Hidden = Vec<bool>;
    type Question = ParallelQuestion;
    type Answer = Vec<F2Vector>;

    fn name(&self) -> String {
        "moe-coset-parallel".into()
    }

    fn identical(&self) -> bool {
        true
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(Vec<CosetKey>, ParallelInput)> {
        let keys = (0..self.kappa)
            .map(|_| CosetKey::sample(self.n, rng))
            .collect::<Result<Vec<_>>>()?;
        let coins: [u8; 16] = rng.gen();
        let input = Self::input(&keys, &coins)?;
        Ok((keys, input))
    }

    fn challenge(
        &self,
        keys: &Vec<CosetKey>,
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<Challenge<Vec<bool>, ParallelQuestion>> {
        let r = (0..self.kappa).map(|_| rng.gen()).collect();
        Ok(Self::question(keys, r))
    }

    fn judge(
        &self,
        keys: &Vec<CosetKey>,
        r: &Vec<bool>,
        u1: &Vec<F2Vector>,
        u2: &Vec<F2Vector>,
    ) -> Result<bool> {
        Ok(self.all_correct(keys, r, u1)? & self.all_correct(keys, r, u2)?)
    }
}

impl EnumerableGame for CosetParallel {
    fn setups(&self) -> Result<Vec<(f64, Vec<CosetKey>, ParallelInput)>> {
        let keys = all_coset_keys(self.n)?;
        let count = (keys.len() as u64)
            .checked_pow(self.kappa as u32)
            .unwrap_or(u64::MAX);
        check_enumeration(count.saturating_mul(1 << self.kappa.min(63)))?;
        let single: Vec<(f64, CosetKey)> = keys
            .iter()
            .map(|k| (1.0 / keys.len() as f64, k.clone()))
            .collect();
        product(&vec![single; self.kappa])
            .into_iter()
            .map(|(w, ks)| {
                let input = Self::input(&ks, &[0; 16])?;
                Ok((w, ks, input))
            })
            .collect()
    }

    fn challenges(
        &self,
        keys: &Vec<CosetKey>,
        _: &(),
    ) -> Result<Vec<(f64, Challenge<Vec<bool>, ParallelQuestion>)>> {
        let w = 1.0 / (1u64 << self.kappa) as f64;
        Ok(bits(self.kappa)
            .into_iter()
            .map(|r| (w, Self::question(keys, r)))
            .collect())
    }
}

/// Alice draws `b*`, measures in the computational basis if `b* = 0` and in
/// the Hadamard basis otherwise, and both players echo the outcome. In the
/// parallel game each register gets its own `b*`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Trivial;

/// Both players answer `0^n` whatever they are asked.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnswerZero;

/// Alice measures in the computational basis and hands the outcome to Bob
/// and the collapsed register to Charlie, who measures it in the Hadamard
/// basis. Bob is right whenever `b = 0`; Charlie's readout is uniform.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeasureSplit;

/// Reads the cosets out of the (transparent) membership programs. Both
/// players answer the canonical representative of the asked coset if it was
/// leaked, and of `A + s` otherwise. With `dual_aware` both cosets leak.
#[derive(Clone, Copy, Debug, Default)]
pub struct ProgramInspecting {
    pub dual_aware: bool,
}

/// Alice measures in the computational basis and forwards the outcome to
/// both players, who echo it.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeasureForward;

/// Bob receives the unmeasured state and measures it in the computational
/// basis; Charlie receives nothing and answers `0^n`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ForwardToBob;

/// Alice measures in the computational basis and forwards `u`; Bob answers
/// `Can_A(u)` and Charlie answers `Can_{A^perp}(u)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CanonicalRep;

fn trivial_dist(state: &StateVector) -> Vec<(f64, F2Vector)> {
    let mut out = Vec::new();
    for h in [false, true] {
        out.extend(measured(state, h).into_iter().map(|(p, u)| (0.5 * p, u)));
    }
    out
}

fn echo(u: &F2Vector) -> Result<Vec<(f64, F2Vector)>> {
    Ok(vec![(1.0, *u)])
}

impl Strategy<CosetIdentical> for Trivial {
    type ShareB = F2Vector;
    type ShareC = F2Vector;

    fn name(&self) -> String {
        "trivial".into()
    }

    fn split(
        &self,
        _: &(),
        input: CosetInput,
        rng: &mut TrialRng,
    ) -> Result<Split<F2Vector, F2Vector, ()>> {
        let u = measure(input.state, rng.gen(), rng)?;
        Ok(Split::new(u, u))
    }

    fn answer_b(&self, u: F2Vector, _: &CosetQuestion, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(u)
    }

    fn answer_c(&self, u: F2Vector, _: &CosetQuestion, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(u)
    }
}

impl ExactStrategy<CosetIdentical> for Trivial {
    fn split_dist(&self, input: &CosetInput) -> Result<Vec<(f64, Split<F2Vector, F2Vector, ()>)>> {
        Ok(trivial_dist(&input.state)
            .into_iter()
            .map(|(p, u)| (p, Split::new(u, u)))
            .collect())
    }

    fn answer_b_dist(&self, u: &F2Vector, _: &CosetQuestion) -> Result<Vec<(f64, F2Vector)>> {
        echo(u)
    }

    fn answer_c_dist(&self, u: &F2Vector, _: &CosetQuestion) -> Result<Vec<(f64, F2Vector)>> {
        echo(u)
    }
}

impl Strategy<CosetIdentical> for AnswerZero {
    type ShareB = ();
    type ShareC = ();

    fn name(&self) -> String {
        "answer-zero".into()
    }

    fn split(&self, _: &(), _: CosetInput, _: &mut TrialRng) -> Result<Split<(), (), ()>> {
        Ok(Split::new((), ()))
    }

    fn answer_b(&self, _: (), q: &CosetQuestion, _: &mut TrialRng) -> Result<F2Vector> {
        F2Vector::zero(q.space.ambient_dim())
    }

    fn answer_c(&self, _: (), q: &CosetQuestion, _: &mut TrialRng) -> Result<F2Vector> {
        F2Vector::zero(q.space.ambient_dim())
    }
}

impl ExactStrategy<CosetIdentical> for AnswerZero {
    fn split_dist(&self, _: &CosetInput) -> Result<Vec<(f64, Split<(), (), ()>)>> {
        Ok(vec![(1.0, Split::new((), ()))])
    }

    fn answer_b_dist(&self, _: &(), q: &CosetQuestion) -> Result<Vec<(f64, F2Vector)>> {
        Ok(vec![(1.0, F2Vector::zero(q.space.ambient_dim())?)])
    }

    fn answer_c_dist(&self, _: &(), q: &CosetQuestion) -> Result<Vec<(f64, F2Vector)>> {
        Ok(vec![(1.0, F2Vector::zero(q.space.ambient_dim())?)])
    }
}

impl Strategy<CosetIdentical> for MeasureSplit {
    type ShareB = F2Vector;
    type ShareC = StateVector;

    fn name(&self) -> String {
        "measure-split".into()
    }

    fn split(
        &self,
        _: &(),
        input: CosetInput,
        rng: &mut TrialRng,
    ) -> Result<Split<F2Vector, StateVector, ()>> {
        let (u, post) = input.state.measure(rng)?;
        Ok(Split::new(u, post))
    }

    fn answer_b(&self, u: F2Vector, _: &CosetQuestion, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(u)
    }

    fn answer_c(
        &self,
        state: StateVector,
        _: &CosetQuestion,
        rng: &mut TrialRng,
    ) -> Result<F2Vector> {
        measure(state, true, rng)
    }
}

impl ExactStrategy<CosetIdentical> for MeasureSplit {
    fn split_dist(
        &self,
        input: &CosetInput,
    ) -> Result<Vec<(f64, Split<F2Vector, StateVector, ()>)>> {
        measured(&input.state, false)
            .into_iter()
            .map(|(p, u)| Ok((p, Split::new(u, StateVector::basis(&u)?))))
            .collect()
    }

    fn answer_b_dist(&self, u: &F2Vector, _: &CosetQuestion) -> Result<Vec<(f64, F2Vector)>> {
        echo(u)
    }

    fn answer_c_dist(
        &self,
        state: &StateVector,
        _: &CosetQuestion,
    ) -> Result<Vec<(f64, F2Vector)>> {
        Ok(measured(state, true))
    }
}

/// Cosets recovered from membership programs.
#[derive(Clone, Debug)]
pub struct Leaked {
    pub primal: Coset,
    pub dual: Option<Coset>,
}

impl Leaked {
    fn read(programs: &[ObfProgram; 2], dual_aware: bool) -> Result<Self> {
        let coset = |p: &ObfProgram| match p.inspect() {
            Program::Membership(c) => Ok(c.clone()),
            _ => Err(Error::strategy("membership program expected")),
        };
        Ok(Self {
            primal: coset(&programs[0])?,
            dual: if dual_aware {
                Some(coset(&programs[1])?)
            } else {
                None
            },
        })
    }

    fn answer(&self, b: bool) -> F2Vector {
        match (&self.dual, b) {
            (Some(d), true) => *d.rep(),
            _ => *self.primal.rep(),
        }
    }
}

impl ProgramInspecting {
    fn label(&self) -> String {
        if self.dual_aware {
            "inspect-both"
        } else {
            "inspect-primal"
        }
        .into()
    }
}

impl Strategy<CosetIdentical> for ProgramInspecting {
    type ShareB = Leaked;
    type ShareC = Leaked;

    fn name(&self) -> String {
        self.label()
    }

    fn split(
        &self,
        _: &(),
        input: CosetInput,
        _: &mut TrialRng,
    ) -> Result<Split<Leaked, Leaked, ()>> {
        let programs = input
            .programs
            .ok_or_else(|| Error::strategy("no membership programs to inspect"))?;
        let leaked = Leaked::read(&programs, self.dual_aware)?;
        Ok(Split::new(leaked.clone(), leaked))
    }

    fn answer_b(&self, l: Leaked, q: &CosetQuestion, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(l.answer(q.b))
    }

    fn answer_c(&self, l: Leaked, q: &CosetQuestion, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(l.answer(q.b))
    }
}

impl ExactStrategy<CosetIdentical> for ProgramInspecting {
    fn split_dist(&self, input: &CosetInput) -> Result<Vec<(f64, Split<Leaked, Leaked, ()>)>> {
        let programs = input
            .programs
            .as_ref()
            .ok_or_else(|| Error::strategy("no membership programs to inspect"))?;
        let leaked = Leaked::read(programs, self.dual_aware)?;
        Ok(vec![(1.0, Split::new(leaked.clone(), leaked))])
    }

    fn answer_b_dist(&self, l: &Leaked, q: &CosetQuestion) -> Result<Vec<(f64, F2Vector)>> {
        echo(&l.answer(q.b))
    }

    fn answer_c_dist(&self, l: &Leaked, q: &CosetQuestion) -> Result<Vec<(f64, F2Vector)>> {
        echo(&l.answer(q.b))
    }
}

impl Strategy<CosetParallel> for Trivial {
    type ShareB = Vec<F2Vector>;
    type ShareC = Vec<F2Vector>;

    fn name(&self) -> String {
        "trivial".into()
    }

    fn split(
        &self,
        _: &(),
        input: ParallelInput,
        rng: &mut TrialRng,
    ) -> Result<Split<Vec<F2Vector>, Vec<F2Vector>, ()>> {
        let mut us = Vec::with_capacity(input.states.len());
        for s in input.states {
            let h = rng.gen();
            us.push(measure(s, h, rng)?);
        }
        Ok(Split::new(us.clone(), us))
    }

    fn answer_b(
        &self,
        us: Vec<F2Vector>,
        _: &ParallelQuestion,
        _: &mut TrialRng,
    ) -> Result<Vec<F2Vector>> {
        Ok(us)
    }

    fn answer_c(
        &self,
        us: Vec<F2Vector>,
        _: &ParallelQuestion,
        _: &mut TrialRng,
    ) -> Result<Vec<F2Vector>> {
        Ok(us)
    }
}

impl ExactStrategy<CosetParallel> for Trivial {
    fn split_dist(
        &self,
        input: &ParallelInput,
    ) -> Result<Vec<(f64, Split<Vec<F2Vector>, Vec<F2Vector>, ()>)>> {
        let per: Vec<_> = input.states.iter().map(trivial_dist).collect();
        Ok(product(&per)
            .into_iter()
            .map(|(p, us)| (p, Split::new(us.clone(), us)))
            .collect())
    }

    fn answer_b_dist(
        &self,
        us: &Vec<F2Vector>,
        _: &ParallelQuestion,
    ) -> Result<Vec<(f64, Vec<F2Vector>)>> {
        Ok(vec![(1.0, us.clone())])
    }

    fn answer_c_dist(
        &self,
        us: &Vec<F2Vector>,
        _: &ParallelQuestion,
    ) -> Result<Vec<(f64, Vec<F2Vector>)>> {
        Ok(vec![(1.0, us.clone())])
    }
}

fn leaked_all(input: &ParallelInput, dual_aware: bool) -> Result<Vec<Leaked>> {
    input
        .programs
        .iter()
        .map(|p| Leaked::read(p, dual_aware))
        .collect()
}

fn leaked_answers(ls: &[Leaked], q: &ParallelQuestion) -> Vec<F2Vector> {
    ls.iter().zip(&q.r).map(|(l, &ri)| l.answer(ri)).collect()
}

impl Strategy<CosetParallel> for ProgramInspecting {
    type ShareB = Vec<Leaked>;
    type ShareC = Vec<Leaked>;

    fn name(&self) -> String {
        self.label()
    }

    fn split(
        &self,
        _: &(),
        input: ParallelInput,
        _: &mut TrialRng,
    ) -> Result<Split<Vec<Leaked>, Vec<Leaked>, ()>> {
        let ls = leaked_all(&input, self.dual_aware)?;
        Ok(Split::new(ls.clone(), ls))
    }

    fn answer_b(
        &self,
        ls: Vec<Leaked>,
        q: &ParallelQuestion,
        _: &mut TrialRng,
    ) -> Result<Vec<F2Vector>> {
        Ok(leaked_answers(&ls, q))
    }

    fn answer_c(
        &self,
        ls: Vec<Leaked>,
        q: &ParallelQuestion,
        _: &mut TrialRng,
    ) -> Result<Vec<F2Vector>> {
        Ok(leaked_answers(&ls, q))
    }
}

impl ExactStrategy<CosetParallel> for ProgramInspecting {
    fn split_dist(
        &self,
        input: &ParallelInput,
    ) -> Result<Vec<(f64, Split<Vec<Leaked>, Vec<Leaked>, ()>)>> {
        let ls = leaked_all(input, self.dual_aware)?;
        Ok(vec![(1.0, Split::new(ls.clone(), ls))])
    }

    fn answer_b_dist(
        &self,
        ls: &Vec<Leaked>,
        q: &ParallelQuestion,
    ) -> Result<Vec<(f64, Vec<F2Vector>)>> {
        Ok(vec![(1.0, leaked_answers(ls, q))])
    }

    fn answer_c_dist(
        &self,
        ls: &Vec<Leaked>,
        q: &ParallelQuestion,
    ) -> Result<Vec<(f64, Vec<F2Vector>)>> {
        Ok(vec![(1.0, leaked_answers(ls, q))])
    }
}

impl Strategy<CosetOriginal> for Trivial {
    type ShareB = F2Vector;
    type ShareC = F2Vector;

    fn name(&self) -> String {
        "trivial".into()
    }

    fn split(
        &self,
        _: &(),
        state: StateVector,
        rng: &mut TrialRng,
    ) -> Result<Split<F2Vector, F2Vector, ()>> {
        let u = measure(state, rng.gen(), rng)?;
        Ok(Split::new(u, u))
    }

    fn answer_b(&self, u: F2Vector, _: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(u)
    }

    fn answer_c(&self, u: F2Vector, _: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(u)
    }
}

impl ExactStrategy<CosetOriginal> for Trivial {
    fn split_dist(&self, state: &StateVector) -> Result<Vec<(f64, Split<F2Vector, F2Vector, ()>)>> {
        Ok(trivial_dist(state)
            .into_iter()
            .map(|(p, u)| (p, Split::new(u, u)))
            .collect())
    }

    fn answer_b_dist(&self, u: &F2Vector, _: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        echo(u)
    }

    fn answer_c_dist(&self, u: &F2Vector, _: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        echo(u)
    }
}

impl Strategy<CosetOriginal> for AnswerZero {
    type ShareB = ();
    type ShareC = ();

    fn name(&self) -> String {
        "answer-zero".into()
    }

    fn split(&self, _: &(), _: StateVector, _: &mut TrialRng) -> Result<Split<(), (), ()>> {
        Ok(Split::new((), ()))
    }

    fn answer_b(&self, _: (), a: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        F2Vector::zero(a.ambient_dim())
    }

    fn answer_c(&self, _: (), a: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        F2Vector::zero(a.ambient_dim())
    }
}

impl ExactStrategy<CosetOriginal> for AnswerZero {
    fn split_dist(&self, _: &StateVector) -> Result<Vec<(f64, Split<(), (), ()>)>> {
        Ok(vec![(1.0, Split::new((), ()))])
    }

    fn answer_b_dist(&self, _: &(), a: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        Ok(vec![(1.0, F2Vector::zero(a.ambient_dim())?)])
    }

    fn answer_c_dist(&self, _: &(), a: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        Ok(vec![(1.0, F2Vector::zero(a.ambient_dim())?)])
    }
}

impl Strategy<CosetOriginal> for MeasureForward {
    type ShareB = F2Vector;
    type ShareC = F2Vector;

    fn name(&self) -> String {
        "measure-forward".into()
    }

    fn split(
        &self,
        _: &(),
        state: StateVector,
        rng: &mut TrialRng,
    ) -> Result<Split<F2Vector, F2Vector, ()>> {
        let u = measure(state, false, rng)?;
        Ok(Split::new(u, u))
    }

    fn answer_b(&self, u: F2Vector, _: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(u)
    }

    fn answer_c(&self, u: F2Vector, _: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(u)
    }
}

impl ExactStrategy<CosetOriginal> for MeasureForward {
    fn split_dist(&self, state: &StateVector) -> Result<Vec<(f64, Split<F2Vector, F2Vector, ()>)>> {
        Ok(measured(state, false)
            .into_iter()
            .map(|(p, u)| (p, Split::new(u, u)))
            .collect())
    }

    fn answer_b_dist(&self, u: &F2Vector, _: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        echo(u)
    }

    fn answer_c_dist(&self, u: &F2Vector, _: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        echo(u)
    }
}

impl Strategy<CosetOriginal> for ForwardToBob {
    type ShareB = StateVector;
    type ShareC = ();

    fn name(&self) -> String {
        "forward-to-bob".into()
    }

    fn split(
        &self,
        _: &(),
        state: StateVector,
        _: &mut TrialRng,
    ) -> Result<Split<StateVector, (), ()>> {
        Ok(Split::new(state, ()))
    }

    fn answer_b(&self, state: StateVector, _: &F2Subspace, rng: &mut TrialRng) -> Result<F2Vector> {
        measure(state, false, rng)
    }

    fn answer_c(&self, _: (), a: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        F2Vector::zero(a.ambient_dim())
    }
}

impl ExactStrategy<CosetOriginal> for ForwardToBob {
    fn split_dist(&self, state: &StateVector) -> Result<Vec<(f64, Split<StateVector, (), ()>)>> {
        Ok(vec![(1.0, Split::new(state.clone(), ()))])
    }

    fn answer_b_dist(&self, state: &StateVector, _: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        Ok(measured(state, false))
    }

    fn answer_c_dist(&self, _: &(), a: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        Ok(vec![(1.0, F2Vector::zero(a.ambient_dim())?)])
    }
}

impl Strategy<CosetOriginal> for CanonicalRep {
    type ShareB = F2Vector;
    type ShareC = F2Vector;

    fn name(&self) -> String {
        "canonical-rep".into()
    }

    fn split(
        &self,
        _: &(),
        state: StateVector,
        rng: &mut TrialRng,
    ) -> Result<Split<F2Vector, F2Vector, ()>> {
        let u = measure(state, false, rng)?;
        Ok(Split::new(u, u))
    }

    fn answer_b(&self, u: F2Vector, a: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(a.canonical_rep(&u))
    }

    fn answer_c(&self, u: F2Vector, a: &F2Subspace, _: &mut TrialRng) -> Result<F2Vector> {
        Ok(a.dual().canonical_rep(&u))
    }
}

impl ExactStrategy<CosetOriginal> for CanonicalRep {
    fn split_dist(&self, state: &StateVector) -> Result<Vec<(f64, Split<F2Vector, F2Vector, ()>)>> {
        Ok(measured(state, false)
            .into_iter()
            .map(|(p, u)| (p, Split::new(u, u)))
            .collect())
    }

    fn answer_b_dist(&self, u: &F2Vector, a: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        echo(&a.canonical_rep(u))
    }

    fn answer_c_dist(&self, u: &F2Vector, a: &F2Subspace) -> Result<Vec<(f64, F2Vector)>> {
        echo(&a.dual().canonical_rep(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::exact_win_probability;

    #[test]
    fn key_enumeration_counts() {
        // 3 lines in F_2^2, 2 cosets each for A and A^perp.
        assert_eq!(all_coset_keys(2).unwrap().len(), 12);
        // 35 planes in F_2^4, 4 cosets each.
        assert_eq!(all_coset_keys(4).unwrap().len(), 35 * 16);
    }

    #[test]
    fn odd_n_rejected() {
        assert!(matches!(CosetIdentical::new(3), Err(Error::Param(_))));
        assert!(CosetParallel::new(2, 0).is_err());
    }

    #[test]
    fn inspecting_both_cosets_always_wins() {
        let g = CosetParallel::new(2, 2).unwrap();
        let p = exact_win_probability(&g, &ProgramInspecting { dual_aware: true }).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn original_measure_forward_is_bob_always_right() {
        // Bob is always right, so the value is Pr[u in A^perp + s'] with u
        // uniform on A + s: a single point of the intersection out of 2^{n/2}.
        let g = CosetOriginal::new(2).unwrap();
        let p = exact_win_probability(&g, &MeasureForward).unwrap();
        let q = exact_win_probability(&g, &CanonicalRep).unwrap();
        assert!(p > 0.0 && p < 1.0);
        assert!((p - q).abs() < 1e-12);
    }
}
