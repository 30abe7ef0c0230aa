use std::f64::consts::PI;

use clap::{Args, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use coset_moe::analysis::{
    bound_bb84_chain, build_base_family, check_overlap_ops, check_step2, check_tfkw_lemma,
    game_operators, lift_family, seesaw, verify_family, FamilyReport, PermutationFamily,
    SeesawConfig,
};
use coset_moe::crypto::cpprf::{self, coherent_gap, ProtectedPrf};
use coset_moe::crypto::{BitString, LengthProfile};
use coset_moe::games::bb84::FiniteStrategy;
use coset_moe::games::enl::lift_to_extended;
use coset_moe::qsim::{random_unitary, Matrix, StateVector, Vector};
use coset_moe::{Error, Result};

use crate::output::Emitter;
use crate::Outcome;

const EQ_TOL: f64 = 1e-9;

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Operator-norm bound for game projectors with conjugate bits.
    Overlap(OverlapArgs),
    /// Norm of a sum of projectors against a mutually orthogonal family.
    Tfkw(TfkwArgs),
    /// The permutation-family bound applied to all game projectors.
    Step2(StrategyArgs),
    /// Builds and checks the base and lifted permutation families.
    Family(FamilyArgs),
    /// Lifting a BB84 strategy to the extended game preserves its value.
    EnlEquality(StrategyArgs),
    /// Measured and coherent PRF evaluation give the same output distribution.
    Coherent(CoherentArgs),
    /// See-saw lower bound on the extended game value.
    Seesaw(SeesawArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// Master seed; instance i uses stream i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Ancilla dimension of each player; defaults to 2^(n/2).
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct TfkwArgs {
    /// Number of projectors.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct StrategyArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Ancilla dimension of each player; defaults to 2^(n/2).
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct CoherentArgs {
    /// Qubits per coset register.
    #[arg(long, default_value_t = 2)]
    pub coset_n: usize,
    /// Number of coset registers.
    #[arg(long, default_value_t = 1)]
    pub l0: usize,
    /// Replace the registers by Haar-random states.
    #[arg(long)]
    pub haar: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SeesawArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn player_dim(n: usize, dim: Option<usize>) -> usize {
    dim.unwrap_or(1 << (n / 2).min(8))
}

fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Tally<'a> {
    check: &'static str,
    params: Value,
    seed: u64,
    out: &'a mut Emitter,
    passed: u64,
    total: u64,
    worst_margin: f64,
}

impl<'a> Tally<'a> {
    fn new(check: &'static str, params: Value, seed: u64, out: &'a mut Emitter) -> Self {
        Self {
            check,
            params,
            seed,
            out,
            passed: 0,
            total: 0,
            worst_margin: f64::INFINITY,
        }
    }

    fn record(&mut self, index: u64, lhs: f64, rhs: f64, pass: bool, extra: Value) {
        self.total += 1;
        self.passed += pass as u64;
        self.worst_margin = self.worst_margin.min(rhs - lhs);
        let mut rec = json!({
            "check": self.check,
            "params": self.params,
            "seed": self.seed,
            "index": index,
            "lhs": lhs,
            "rhs": rhs,
            "pass": pass,
        });
        if let (Value::Object(r), Value::Object(e)) = (&mut rec, extra) {
            r.extend(e);
        }
        self.out.emit(rec);
    }

    fn finish(self) -> Outcome {
        let pass = self.passed == self.total;
        self.out.emit(json!({
            "check": self.check,
            "summary": true,
            "params": self.params,
            "seed": self.seed,
            "derivation": "chacha8(seed), stream = index",
            "instances": self.total,
            "passed": self.passed,
            "min_margin": if self.total == 0 { Value::Null } else { self.worst_margin.into() },
            "pass": pass,
        }));
        if pass {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        }
    }
}

pub fn run(cmd: &VerifyCommand, out: &mut Emitter) -> Result<Outcome> {
    match cmd {
        VerifyCommand::Overlap(a) => overlap(a, out),
        VerifyCommand::Tfkw(a) => tfkw(a, out),
        VerifyCommand::Step2(a) => step2(a, out),
        VerifyCommand::Family(a) => family(a, out),
        VerifyCommand::EnlEquality(a) => enl_equality(a, out),
        VerifyCommand::Coherent(a) => coherent(a, out),
        VerifyCommand::Seesaw(a) => run_seesaw(a, out),
    }
}

fn overlap(a: &OverlapArgs, out: &mut Emitter) -> Result<Outcome> {
    let dim = player_dim(a.n, a.dim);
    let params = json!({ "n": a.n, "dim": dim });
    let mut t = Tally::new("overlap", params, a.common.seed, out);
    for i in 0..a.common.seeds {
        let mut rng = instance_rng(a.common.seed, i);
        let s = FiniteStrategy::random(a.n, dim, dim, &mut rng)?;
        let mut worst: Option<(f64, f64, String, String, bool)> = None;
        let (mut pass, mut pairs) = (true, 0u64);
        let ops = game_operators(s.bob(), s.charlie())?;
        for p in &ops {
            for q in ops.iter().filter(|q| q.theta != p.theta && q.b != p.b) {
                let c = check_overlap_ops(p, q)?;
                pass &= c.pass;
                pairs += 1;
                if worst.as_ref().is_none_or(|w| c.rhs - c.lhs < w.1 - w.0) {
                    worst = Some((c.lhs, c.rhs, p.theta.to_string(), q.theta.to_string(), p.b));
                }
            }
        }
        let (lhs, rhs, th, tp, b) = worst.ok_or_else(|| Error::param("need at least two bases"))?;
        t.record(
            i,
            lhs,
            rhs,
            pass,
            json!({ "pairs": pairs, "theta": th, "theta_prime": tp, "b": b as u8 }),
        );
    }
    Ok(t.finish())
}

fn random_projector(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let u = random_unitary(dim, rng);
    let mut p = Matrix::zeros(dim, dim);
    for k in 0..rank {
        let c: Vector = u.column(k).into_owned();
        p += &c * c.adjoint();
    }
    p
}

fn tfkw(a: &TfkwArgs, out: &mut Emitter) -> Result<Outcome> {
    if a.m == 0 || a.rank == 0 || a.rank > a.dim {
        return Err(Error::param("need m >= 1 and 1 <= rank <= dim"));
    }
    let fam = PermutationFamily::cyclic(a.m);
    let params = json!({ "m": a.m, "dim": a.dim, "rank": a.rank, "family": "cyclic" });
    let mut t = Tally::new("tfkw", params, a.common.seed, out);
    for i in 0..a.common.seeds {
        let mut rng = instance_rng(a.common.seed, i);
        let ps: Vec<Matrix> = (0..a.m)
            .map(|_| random_projector(a.dim, a.rank, &mut rng))
            .collect();
        let c = check_tfkw_lemma(&ps, &fam)?;
        t.record(i, c.lhs, c.rhs, c.pass, json!({}));
    }
    Ok(t.finish())
}

fn step2(a: &StrategyArgs, out: &mut Emitter) -> Result<Outcome> {
    let dim = player_dim(a.n, a.dim);
    let params = json!({ "n": a.n, "dim": dim });
    let mut t = Tally::new("step2", params, a.common.seed, out);
    for i in 0..a.common.seeds {
        let mut rng = instance_rng(a.common.seed, i);
        let s = FiniteStrategy::random(a.n, dim, dim, &mut rng)?;
        let c = check_step2(s.bob(), s.charlie())?;
        t.record(i, c.lhs, c.rhs, c.pass, json!({}));
    }
    Ok(t.finish())
}

fn family_json(r: &FamilyReport) -> Value {
    json!({
        "bijective": r.bijective,
        "orthogonal": r.orthogonal,
        "irregular": r.irregular,
        "counts": r.counts.iter().map(|c| json!({ "i": c.i, "expected": c.expected, "found": c.found })).collect::<Vec<_>>(),
        "bit_rule": r.bit_rule,
    })
}

fn family(a: &FamilyArgs, out: &mut Emitter) -> Result<Outcome> {
    let base = build_base_family(a.n)?;
    let lifted = lift_family(&base)?;
    let params = json!({ "n": a.n });
    let mut t = Tally::new("family", params, 0, out);
    for (i, (label, fam)) in [("base", &base), ("lifted", &lifted)]
        .into_iter()
        .enumerate()
    {
        let r = verify_family(fam)?;
        let mut extra = family_json(&r);
        extra["family"] = label.into();
        extra["size"] = fam.len().into();
        if label == "base" {
            extra["perms"] = json!(fam.perms());
        }
        t.record(i as u64, r.irregular as f64, 0.0, r.pass, extra);
    }
    Ok(t.finish())
}

fn enl_equality(a: &StrategyArgs, out: &mut Emitter) -> Result<Outcome> {
    let dim = player_dim(a.n, a.dim);
    let params = json!({ "n": a.n, "dim": dim });
    let mut t = Tally::new("enl-equality", params, a.common.seed, out);
    for i in 0..a.common.seeds {
        let mut rng = instance_rng(a.common.seed, i);
        let s = FiniteStrategy::random(a.n, dim, dim, &mut rng)?;
        let p = s.win_probability()?;
        let q = lift_to_extended(&s)?.win_probability()?;
        t.record(i, p, q, (p - q).abs() <= EQ_TOL, json!({}));
    }
    Ok(t.finish())
}

fn haar_state(n: usize, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let u = random_unitary(1 << n, rng);
    StateVector::from_amplitudes(n, u.column(0).iter().copied().collect())
}

fn coherent(a: &CoherentArgs, out: &mut Emitter) -> Result<Outcome> {
    let profile = LengthProfile {
        l0: a.l0,
        coset_n: a.coset_n,
        ..LengthProfile::desk()
    };
    let params = json!({ "coset_n": a.coset_n, "l0": a.l0, "haar": a.haar });
    let mut t = Tally::new("coherent", params, a.common.seed, out);
    for i in 0..a.common.seeds {
        let mut rng = instance_rng(a.common.seed, i);
        let k1 = cpprf::keygen(&profile, &mut rng)?;
        let mut key = cpprf::protect(&profile, &k1, &mut rng)?.protected;
        if a.haar {
            let (layout, regs, prog) = key.into_parts();
            let regs = regs
                .iter()
                .map(|r| haar_state(r.num_qubits(), &mut rng))
                .collect::<Result<Vec<_>>>()?;
            key = ProtectedPrf::from_parts(layout, regs, prog);
        }
        let x = BitString::random(profile.input_bits(), &mut rng);
        let gap = coherent_gap(&key, &x)?;
        t.record(i, gap, EQ_TOL, gap <= EQ_TOL, json!({}));
    }
    Ok(t.finish())
}

fn run_seesaw(a: &SeesawArgs, out: &mut Emitter) -> Result<Outcome> {
    let cfg = SeesawConfig {
        iters: a.iters,
        restarts: a.restarts,
        ..SeesawConfig::new(a.n, a.dim, a.dim)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let r = seesaw(&cfg, &mut rng)?;
    let chain = bound_bb84_chain(a.n)?;
    let pass = r.verified <= chain + EQ_TOL && r.verified <= 1.0 + EQ_TOL;
    let params = json!({ "n": a.n, "dim": a.dim, "iters": a.iters, "restarts": a.restarts });
    let mut t = Tally::new("seesaw", params, a.seed, out);
    let extra = json!({
        "value": r.verified,
        "tracked": r.value,
        "converged": r.converged,
        "iterations": r.history.len(),
        "start": r.start,
        "reference_cos2_pi_8": if a.n == 2 { Value::from((PI / 8.0).cos().powi(2)) } else { Value::Null },
    });
    t.record(0, r.verified, chain, pass, extra);
    Ok(t.finish())
}
