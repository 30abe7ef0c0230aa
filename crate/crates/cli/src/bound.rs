use clap::{Args, Subcommand};
use serde_json::json;

use coset_moe::analysis::{bound_bb84_chain, bound_identical_bb84, ln_bound_parallel};
use coset_moe::{Error, Result};

use crate::output::Emitter;
use crate::Outcome;

#[derive(Subcommand, Debug)]
pub enum BoundCommand {
    /// Identical-basis BB84 bound and its intermediate sum, for even n up to --n-max.
    Bb84(Bb84Args),
    /// Parallel coset game bound for kappa = 1..=--kappa-max.
    Parallel(ParallelArgs),
}

#[derive(Args, Debug)]
pub struct Bb84Args {
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
}

#[derive(Args, Debug)]
pub struct ParallelArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub kappa_max: usize,
}

const REL_TOL: f64 = 1e-12;

pub fn run(cmd: &BoundCommand, out: &mut Emitter) -> Result<Outcome> {
    match cmd {
        BoundCommand::Bb84(a) => bb84(a, out),
        BoundCommand::Parallel(a) => parallel(a, out),
    }
}

fn bb84(a: &Bb84Args, out: &mut Emitter) -> Result<Outcome> {
    if a.n_max < 2 {
        return Err(Error::param("--n-max must be at least 2"));
    }
    let mut prev: Option<f64> = None;
    let (mut monotone, mut ordered) = (true, true);
    for n in (2..=a.n_max).step_by(2) {
        let bound = bound_identical_bb84(n)?;
        let chain = bound_bb84_chain(n)?;
        monotone &= prev.is_none_or(|p| bound < p);
        ordered &= chain <= bound + REL_TOL;
        prev = Some(bound);
        out.emit(json!({ "bound": "bb84-identical", "n": n, "value": bound, "chain": chain, "vacuous": bound >= 1.0 }));
    }
    let pass = monotone && ordered;
    out.emit(json!({
        "bound": "bb84-identical",
        "summary": true,
        "n_max": a.n_max,
        "decreasing": monotone,
        "chain_below_bound": ordered,
        "pass": pass,
    }));
    Ok(if pass {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}

fn parallel(a: &ParallelArgs, out: &mut Emitter) -> Result<Outcome> {
    if a.kappa_max == 0 {
        return Err(Error::param("--kappa-max must be at least 1"));
    }
    let ln1 = ln_bound_parallel(a.n, 1)?;
    let mut linear = true;
    for kappa in 1..=a.kappa_max {
        let ln_v = ln_bound_parallel(a.n, kappa)?;
        linear &= (ln_v - kappa as f64 * ln1).abs() <= REL_TOL * ln_v.abs().max(1.0);
        out.emit(json!({ "bound": "parallel", "n": a.n, "kappa": kappa, "value": ln_v.exp(), "ln_value": ln_v }));
    }
    out.emit(json!({
        "bound": "parallel",
        "summary": true,
        "n": a.n,
        "kappa_max": a.kappa_max,
        "ln_per_copy": ln1,
        "log_linear": linear,
        "pass": linear,
    }));
    Ok(if linear {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}
