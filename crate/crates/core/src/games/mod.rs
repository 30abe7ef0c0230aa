//! Challenger/adversary harnesses for the monogamy, simultaneous and piracy
//! games, with Monte-Carlo and exact evaluation.
//!
//! A trial runs in fixed phases: prelude (Alice's pre-setup choices), setup,
//! split, challenge, answers, judgement. The challenge is drawn only after
//! `split` has returned, and Bob and Charlie each receive only their own
//! share, question and RNG stream.

pub mod bb84;
pub mod coset;
pub mod enl;
pub mod piracy;
pub mod simul;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub type TrialRng = ChaCha8Rng;

/// Two-sided z-score for 99% confidence.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Upper bound on enumerated (setup, challenge) pairs in exact mode.
pub const MAX_ENUMERATION: u64 = 10_000_000;

/// How a pair of challenge values is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    /// Two independent uniform draws (the product distribution).
    Uniform,
    /// One uniform draw used for both players.
    Identical,
}

impl DistributionKind {
    pub fn pair<T, R: rand::Rng + ?Sized>(
        self,
        rng: &mut R,
        mut draw: impl FnMut(&mut R) -> T,
    ) -> (T, T)
    where
        T: Clone,
    {
        let first = draw(rng);
        match self {
            DistributionKind::Uniform => (first, draw(rng)),
            DistributionKind::Identical => (first.clone(), first),
        }
    }
}

impl std::str::FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "product" => Ok(Self::Uniform),
            "identical" => Ok(Self::Identical),
            other => Err(Error::param(format!(
                "unknown distribution kind '{other}' (uniform|identical)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Challenger = 0,
    Alice = 1,
    Bob = 2,
    Charlie = 3,
}

/// Independent RNG stream for one role in one trial.
fn role_rng(seed: u64, trial: u64, role: Role) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(4).wrapping_add(role as u64));
    rng
}

/// The challenger's view of both questions plus whatever it keeps hidden.
#[derive(Clone, Debug)]
pub struct Challenge<H, Q> {
    pub hidden: H,
    pub to_bob: Q,
    pub to_charlie: Q,
}

/// Alice's output: one share per player and an optional message to the challenger.
pub struct Split<B, C, M> {
    pub bob: B,
    pub charlie: C,
    pub to_challenger: M,
}

impl<B, C, M: Default> Split<B, C, M> {
    pub fn new(bob: B, charlie: C) -> Self {
        Self {
            bob,
            charlie,
            to_challenger: M::default(),
        }
    }
}

pub trait Game: Sync {
    /// Alice's choices sent before setup (message pairs and the like).
    type Prelude: Default + Send;
    type Secret: Send;
    type AliceInput: Send;
    type ToChallenger: Default + Send;
    type Hidden: Send;
    type Question: Clone + PartialEq + std::fmt::Debug + Send + Sync;
    type Answer: Send;

    fn name(&self) -> String;

    /// Whether Bob and Charlie must receive bit-identical questions.
    fn identical(&self) -> bool;

    fn setup(
        &self,
        prelude: &Self::Prelude,
        rng: &mut TrialRng,
    ) -> Result<(Self::Secret, Self::AliceInput)>;

    fn challenge(
        &self,
        secret: &Self::Secret,
        msg: &Self::ToChallenger,
        rng: &mut TrialRng,
    ) -> Result<Challenge<Self::Hidden, Self::Question>>;

    /// Decides the trial. Malformed answers are a strategy error, not a loss.
    fn judge(
        &self,
        secret: &Self::Secret,
        hidden: &Self::Hidden,
        bob: &Self::Answer,
        charlie: &Self::Answer,
    ) -> Result<bool>;
}

pub trait Strategy<G: Game>: Sync {
    type ShareB: Send;
    type ShareC: Send;

    fn name(&self) -> String;

    fn prelude(&self, _rng: &mut TrialRng) -> G::Prelude {
        G::Prelude::default()
    }

    fn split(
        &self,
        prelude: &G::Prelude,
        input: G::AliceInput,
        rng: &mut TrialRng,
    ) -> Result<Split<Self::ShareB, Self::ShareC, G::ToChallenger>>;

    fn answer_b(
        &self,
        share: Self::ShareB,
        q: &G::Question,
        rng: &mut TrialRng,
    ) -> Result<G::Answer>;

    fn answer_c(
        &self,
        share: Self::ShareC,
        q: &G::Question,
        rng: &mut TrialRng,
    ) -> Result<G::Answer>;
}

/// Plays one trial with RNG streams derived from `(seed, trial)`.
pub fn play_trial<G: Game, S: Strategy<G>>(
    game: &G,
    strategy: &S,
    seed: u64,
    trial: u64,
) -> Result<bool> {
    let abort = |e: Error| match e {
        Error::Strategy(_) | Error::Abort { .. } => e,
        other => Error::Abort {
            trial,
            reason: other.to_string(),
        },
    };
    let mut challenger = role_rng(seed, trial, Role::Challenger);
    let mut alice = role_rng(seed, trial, Role::Alice);
    let prelude = strategy.prelude(&mut alice);
    let (secret, input) = game.setup(&prelude, &mut challenger).map_err(abort)?;
    let split = strategy.split(&prelude, input, &mut alice)?;
    let ch = game
        .challenge(&secret, &split.to_challenger, &mut challenger)
        .map_err(abort)?;
    if game.identical() && ch.to_bob != ch.to_charlie {
        return Err(Error::Abort {
            trial,
            reason: "identical-distribution challenges differ".into(),
        });
    }
    let a_b = strategy.answer_b(split.bob, &ch.to_bob, &mut role_rng(seed, trial, Role::Bob))?;
    let a_c = strategy.answer_c(
        split.charlie,
        &ch.to_charlie,
        &mut role_rng(seed, trial, Role::Charlie),
    )?;
    game.judge(&secret, &ch.hidden, &a_b, &a_c)
}

/// Monte-Carlo estimate with a Wilson 99% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WinStats {
    pub trials: u64,
    pub wins: u64,
    pub estimate: f64,
    pub ci: (f64, f64),
}

impl WinStats {
    pub fn from_counts(wins: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(wins, trials, Z_99);
        let estimate = if trials == 0 {
            0.0
        } else {
            wins as f64 / trials as f64
        };
        Self {
            trials,
            wins,
            estimate,
            ci: (lo, hi),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci.0 <= p && p <= self.ci.1
    }
}

/// Wilson score interval for `wins` successes out of `trials`.
pub fn wilson_interval(wins: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = wins as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Runs `trials` independent trials in parallel.
///
/// Any aborted trial fails the whole run; the error reported is the one from
/// the lowest trial index, so the outcome does not depend on scheduling.
pub fn run<G: Game, S: Strategy<G>>(
    game: &G,
    strategy: &S,
    trials: u64,
    seed: u64,
) -> Result<WinStats> {
    if trials == 0 {
        return Err(Error::param("at least one trial is required"));
    }
    let folded = (0..trials)
        .into_par_iter()
        .map(|t| match play_trial(game, strategy, seed, t) {
            Ok(w) => (w as u64, None),
            Err(e) => (0, Some((t, e))),
        })
        .reduce(
            || (0u64, None),
            |(wa, ea), (wb, eb)| {
                let err = match (ea, eb) {
                    (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                    (a, b) => a.or(b),
                };
                (wa + wb, err)
            },
        );
    match folded {
        (_, Some((_, e))) => Err(e),
        (wins, None) => Ok(WinStats::from_counts(wins, trials)),
    }
}

/// A game whose challenger randomness can be listed exhaustively.
#[allow(clippy::type_complexity)]
pub trait EnumerableGame: Game {
    /// All setups with their probabilities (for the default prelude).
    fn setups(&self) -> Result<Vec<(f64, Self::Secret, Self::AliceInput)>>;

    fn challenges(
        &self,
        secret: &Self::Secret,
        msg: &Self::ToChallenger,
    ) -> Result<Vec<(f64, Challenge<Self::Hidden, Self::Question>)>>;
}

/// A strategy whose behaviour can be written as explicit finite mixtures.
#[allow(clippy::type_complexity)]
pub trait ExactStrategy<G: EnumerableGame>: Strategy<G> {
    fn split_dist(
        &self,
        input: &G::AliceInput,
    ) -> Result<Vec<(f64, Split<Self::ShareB, Self::ShareC, G::ToChallenger>)>>;

    fn answer_b_dist(&self, share: &Self::ShareB, q: &G::Question)
        -> Result<Vec<(f64, G::Answer)>>;

    fn answer_c_dist(&self, share: &Self::ShareC, q: &G::Question)
        -> Result<Vec<(f64, G::Answer)>>;
}

/// Exact winning probability: sums Born-rule probabilities over every
/// setup, every branch of the strategy and every challenge.
pub fn exact_win_probability<G: EnumerableGame, S: ExactStrategy<G>>(
    game: &G,
    strategy: &S,
) -> Result<f64> {
    let setups = game.setups()?;
    let total: f64 = setups
        .iter()
        .map(|(w, secret, input)| -> Result<f64> {
            let mut acc = 0.0;
            for (p, split) in strategy.split_dist(input)? {
                for (wc, ch) in game.challenges(secret, &split.to_challenger)? {
                    let bobs = strategy.answer_b_dist(&split.bob, &ch.to_bob)?;
                    let charlies = strategy.answer_c_dist(&split.charlie, &ch.to_charlie)?;
                    for (pb, ab) in &bobs {
                        for (pc, ac) in &charlies {
                            if game.judge(secret, &ch.hidden, ab, ac)? {
                                acc += p * wc * pb * pc;
                            }
                        }
                    }
                }
            }
            Ok(w * acc)
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    Ok(total)
}

pub(crate) fn check_enumeration(count: u64) -> Result<()> {
    if count > MAX_ENUMERATION {
        return Err(Error::capacity(format!(
            "enumeration of {count} cases exceeds {MAX_ENUMERATION}"
        )));
    }
    Ok(())
}
