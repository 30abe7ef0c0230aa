use clap::Args;
use serde_json::{json, Value};

use coset_moe::crypto::program::TransparentCcObf;
use coset_moe::crypto::LengthProfile;
use coset_moe::games::bb84::{Bb84Identical, Bb84Trivial, FiniteStrategy, MeasureComputational};
use coset_moe::games::coset::{self, CosetIdentical, CosetOriginal, CosetParallel};
use coset_moe::games::enl::{lift_to_extended, Enl};
use coset_moe::games::piracy::{
    self, CpPfPiracy, CpPrfPiracy, SdPiracy, SdTransparent, TsPiracy, UePiracy,
};
use coset_moe::games::simul::{
    ConstantGuess, EchoLeak, IdentityLocks, LockAware, SimulDist, SimulPredict, ZeroGuess,
};
use coset_moe::games::{
    exact_win_probability, run as run_trials, DistributionKind, EnumerableGame, ExactStrategy,
    Game, Strategy,
};
use coset_moe::{Error, Result};

use crate::output::Emitter;
use crate::Outcome;

pub const GAMES: &[&str] = &[
    "moe-bb84-identical",
    "moe-coset-identical",
    "moe-coset-computational",
    "moe-coset-original",
    "moe-coset-parallel",
    "enl",
    "sd-product",
    "sd-identical",
    "cp-prf-product",
    "cp-prf-identical",
    "cp-pf-product",
    "cp-pf-identical",
    "ue",
    "ts-uu",
    "simul-dist",
    "simul-predict",
];

#[derive(Args, Debug)]
pub struct GameArgs {
    /// Game name, e.g. moe-bb84-identical.
    pub name: String,
    /// Qubits per register (even).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of parallel registers.
    #[arg(long)]
    pub kappa: Option<usize>,
    #[arg(long)]
    pub strategy: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Also report the exact value by enumeration.
    #[arg(long)]
    pub exact: bool,
    /// Message length for single-decryptor games.
    #[arg(long, default_value_t = 8)]
    pub message_bits: usize,
    /// Length profile for PRF-based games: desk or crypto.
    #[arg(long, default_value = "desk")]
    pub profile: String,
    /// Challenge-bit distribution for simul-dist.
    #[arg(long, default_value = "uniform")]
    pub bits: DistributionKind,
    /// Obfuscator-coin distribution for simul-dist.
    #[arg(long, default_value = "identical")]
    pub coins: DistributionKind,
    /// Give each player its own lock value in simul games.
    #[arg(long)]
    pub leak: bool,
    #[arg(long, default_value_t = 8)]
    pub lock_bits: usize,
}

fn unknown_strategy(game: &str, s: &str, known: &[&str]) -> Error {
    Error::param(format!(
        "unknown strategy {s:?} for {game}; expected one of {}",
        known.join(", ")
    ))
}

fn profile(name: &str) -> Result<LengthProfile> {
    match name {
        "desk" => Ok(LengthProfile::desk()),
        "crypto" => {
            let p = LengthProfile::crypto(128);
            p.validate_simulable()?;
            Ok(p)
        }
        other => Err(Error::param(format!(
            "unknown profile {other:?}; expected desk or crypto"
        ))),
    }
}

fn default_n(game: &str) -> usize {
    match game {
        "ts-uu" => 16,
        g if g.starts_with("sd-") => 4,
        _ => 2,
    }
}

fn kind_of(name: &str) -> DistributionKind {
    if name.ends_with("identical") {
        DistributionKind::Identical
    } else {
        DistributionKind::Uniform
    }
}

struct Ctx<'a> {
    args: &'a GameArgs,
    params: Value,
    out: &'a mut Emitter,
}

impl Ctx<'_> {
    fn record<G: Game, S: Strategy<G>>(
        &mut self,
        g: &G,
        s: &S,
        exact: Option<f64>,
    ) -> Result<Outcome> {
        let stats = run_trials(g, s, self.args.trials, self.args.seed)?;
        let mut rec = json!({
            "command": "game",
            "game": g.name(),
            "strategy": self.args.strategy,
            "params": self.params,
            "trials": stats.trials,
            "seed": self.args.seed,
            "derivation": "chacha8(seed), stream 4*trial + role",
            "wins": stats.wins,
            "estimate": stats.estimate,
            "ci_low": stats.ci.0,
            "ci_high": stats.ci.1,
        });
        if let Some(p) = exact {
            rec["exact"] = p.into();
            rec["exact_in_ci"] = stats.contains(p).into();
        }
        self.out.emit(rec);
        Ok(Outcome::Ok)
    }

    fn play<G: Game, S: Strategy<G>>(&mut self, g: &G, s: &S) -> Result<Outcome> {
        if self.args.exact {
            return Err(Error::param(format!(
                "{} has no exact enumeration",
                g.name()
            )));
        }
        self.record(g, s, None)
    }

    fn play_exact<G: EnumerableGame, S: ExactStrategy<G>>(
        &mut self,
        g: &G,
        s: &S,
    ) -> Result<Outcome> {
        let exact = if self.args.exact {
            Some(exact_win_probability(g, s)?)
        } else {
            None
        };
        self.record(g, s, exact)
    }
}

pub fn run(a: &GameArgs, out: &mut Emitter) -> Result<Outcome> {
    if a.trials == 0 {
        return Err(Error::param("--trials must be positive"));
    }
    let name = a.name.as_str();
    let s = a.strategy.as_str();
    let n = a.n.unwrap_or_else(|| default_n(name));
    let params = match name {
        "moe-coset-parallel" => json!({ "n": n, "kappa": a.kappa.unwrap_or(2) }),
        "sd-product" | "sd-identical" => {
            json!({ "n": n, "kappa": a.kappa.unwrap_or(2), "message_bits": a.message_bits })
        }
        g if g.starts_with("cp-") || g == "ue" => json!({ "profile": a.profile }),
        g if g.starts_with("simul-") => json!({
            "lock_bits": a.lock_bits,
            "message_bits": a.message_bits,
            "leak": a.leak,
            "bits": a.bits,
            "coins": a.coins,
        }),
        _ => json!({ "n": n }),
    };
    let mut ctx = Ctx {
        args: a,
        params,
        out,
    };
    match name {
        "moe-bb84-identical" => {
            let g = Bb84Identical::new(n)?;
            match s {
                "trivial" => ctx.play_exact(&g, &Bb84Trivial),
                "measure-computational" => ctx.play_exact(&g, &MeasureComputational),
                _ => Err(unknown_strategy(
                    name,
                    s,
                    &["trivial", "measure-computational"],
                )),
            }
        }
        "moe-coset-identical" | "moe-coset-computational" => {
            let g = if name == "moe-coset-identical" {
                CosetIdentical::new(n)?
            } else {
                CosetIdentical::computational(n)?
            };
            match s {
                "trivial" => ctx.play_exact(&g, &coset::Trivial),
                "answer-zero" => ctx.play_exact(&g, &coset::AnswerZero),
                "measure-split" => ctx.play_exact(&g, &coset::MeasureSplit),
                "inspect-both" => {
                    ctx.play_exact(&g, &coset::ProgramInspecting { dual_aware: true })
                }
                "inspect-primal" => {
                    ctx.play_exact(&g, &coset::ProgramInspecting { dual_aware: false })
                }
                _ => Err(unknown_strategy(
                    name,
                    s,
                    &[
                        "trivial",
                        "answer-zero",
                        "measure-split",
                        "inspect-both",
                        "inspect-primal",
                    ],
                )),
            }
        }
        "moe-coset-original" => {
            let g = CosetOriginal::new(n)?;
            match s {
                "trivial" => ctx.play_exact(&g, &coset::Trivial),
                "answer-zero" => ctx.play_exact(&g, &coset::AnswerZero),
                "measure-forward" => ctx.play_exact(&g, &coset::MeasureForward),
                "forward-to-bob" => ctx.play_exact(&g, &coset::ForwardToBob),
                "canonical-rep" => ctx.play_exact(&g, &coset::CanonicalRep),
                _ => Err(unknown_strategy(
                    name,
                    s,
                    &[
                        "trivial",
                        "answer-zero",
                        "measure-forward",
                        "forward-to-bob",
                        "canonical-rep",
                    ],
                )),
            }
        }
        "moe-coset-parallel" => {
            let g = CosetParallel::new(n, a.kappa.unwrap_or(2))?;
            match s {
                "trivial" => ctx.play_exact(&g, &coset::Trivial),
                "inspect-both" => {
                    ctx.play_exact(&g, &coset::ProgramInspecting { dual_aware: true })
                }
                "inspect-primal" => {
                    ctx.play_exact(&g, &coset::ProgramInspecting { dual_aware: false })
                }
                _ => Err(unknown_strategy(
                    name,
                    s,
                    &["trivial", "inspect-both", "inspect-primal"],
                )),
            }
        }
        "enl" => {
            let g = Enl::new(n)?;
            let base = match s {
                "trivial-lifted" => FiniteStrategy::trivial(n)?,
                "measure-computational-lifted" => FiniteStrategy::measure_computational(n)?,
                _ => {
                    return Err(unknown_strategy(
                        name,
                        s,
                        &["trivial-lifted", "measure-computational-lifted"],
                    ))
                }
            };
            let st = lift_to_extended(&base)?;
            if a.exact {
                let p = st.win_probability()?;
                ctx.record(&g, &st, Some(p))
            } else {
                ctx.record(&g, &st, None)
            }
        }
        "sd-product" | "sd-identical" => {
            let g = SdPiracy {
                n,
                kappa: a.kappa.unwrap_or(2),
                message_bits: a.message_bits,
                kind: kind_of(name),
            };
            match s {
                "forward-to-bob" => ctx.play(&g, &piracy::ForwardToBob),
                "transparent-attack" => ctx.play(&g, &SdTransparent),
                _ => Err(unknown_strategy(
                    name,
                    s,
                    &["forward-to-bob", "transparent-attack"],
                )),
            }
        }
        "cp-prf-product" | "cp-prf-identical" => {
            let g = CpPrfPiracy {
                profile: profile(&a.profile)?,
                kind: kind_of(name),
            };
            match s {
                "forward-to-bob" => ctx.play(&g, &piracy::ForwardToBob),
                _ => Err(unknown_strategy(name, s, &["forward-to-bob"])),
            }
        }
        "cp-pf-product" | "cp-pf-identical" => {
            let g = CpPfPiracy {
                profile: profile(&a.profile)?,
                kind: kind_of(name),
            };
            match s {
                "forward-to-bob" => ctx.play(&g, &piracy::ForwardToBob),
                _ => Err(unknown_strategy(name, s, &["forward-to-bob"])),
            }
        }
        "ue" => {
            let g = UePiracy {
                profile: profile(&a.profile)?,
            };
            match s {
                "forward-to-bob" => ctx.play(&g, &piracy::ForwardToBob),
                _ => Err(unknown_strategy(name, s, &["forward-to-bob"])),
            }
        }
        "ts-uu" => {
            let g = TsPiracy { n };
            coset_moe::games::coset::check_even(g.n)?;
            match s {
                "measure-forward" => {
                    let exact = a.exact.then(|| piracy::ts_measure_forward_value(g.n));
                    ctx.record(&g, &piracy::MeasureForward, exact)
                }
                _ => Err(unknown_strategy(name, s, &["measure-forward"])),
            }
        }
        "simul-dist" => {
            let g = SimulDist {
                sampler: IdentityLocks {
                    lock_bits: a.lock_bits,
                    message_bits: a.message_bits,
                    leak: a.leak,
                },
                obfuscator: TransparentCcObf,
                coins: a.coins,
                bits: a.bits,
            };
            match s {
                "constant-0" => ctx.play(&g, &ConstantGuess(false)),
                "constant-1" => ctx.play(&g, &ConstantGuess(true)),
                "lock-aware" => ctx.play(&g, &LockAware),
                _ => Err(unknown_strategy(
                    name,
                    s,
                    &["constant-0", "constant-1", "lock-aware"],
                )),
            }
        }
        "simul-predict" => {
            let g = SimulPredict {
                sampler: IdentityLocks {
                    lock_bits: a.lock_bits,
                    message_bits: a.message_bits,
                    leak: a.leak,
                },
            };
            match s {
                "echo-leak" => ctx.play(&g, &EchoLeak),
                "zero-guess" => ctx.play(&g, &ZeroGuess(a.lock_bits)),
                _ => Err(unknown_strategy(name, s, &["echo-leak", "zero-guess"])),
            }
        }
        _ => Err(Error::param(format!(
            "unknown game {name:?}; expected one of {}",
            GAMES.join(", ")
        ))),
    }
}
