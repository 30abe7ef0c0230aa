use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use coset_moe::crypto::program::Output;
use coset_moe::crypto::{cppf, cpprf, sd, ts, ue, BitString, LengthProfile};
use coset_moe::{Error, Result};

use crate::output::Emitter;
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileName {
    Desk,
    Crypto,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value_t = ProfileName::Desk)]
    pub profile: ProfileName,
    /// Round trips per construction.
    #[arg(long, default_value_t = 20)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coset dimension for single-decryptor encryption and tokenized signatures.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
}

const CRYPTO_LAMBDA: usize = 128;

fn rng_for(seed: u64, construction: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(construction);
    rng
}

pub fn run(a: &SelftestArgs, out: &mut Emitter) -> Result<Outcome> {
    if a.profile == ProfileName::Crypto {
        let p = LengthProfile::crypto(CRYPTO_LAMBDA);
        let checks = p.constraints();
        let all = checks.iter().all(|c| c.holds);
        out.emit(json!({
            "selftest": "profile",
            "profile": serde_json::to_value(p).map_err(|e| Error::internal(e.to_string()))?,
            "input_bits": p.input_bits(),
            "constraints": serde_json::to_value(&checks).map_err(|e| Error::internal(e.to_string()))?,
            "simulable": p.validate_simulable().is_ok(),
            "pass": all,
        }));
        return Ok(if all {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        });
    }
    if a.rounds == 0 {
        return Err(Error::param("--rounds must be positive"));
    }
    let profile = LengthProfile::desk();
    let waived: Vec<&str> = profile.validate()?.iter().map(|c| c.name).collect();
    type Round = fn(&SelftestArgs, &LengthProfile, &mut ChaCha8Rng) -> Result<bool>;
    let checks: [(&str, Round); 6] = [
        ("sd", sd_round),
        ("cp-prf", cpprf_round),
        ("cp-prf-trigger", trigger_round),
        ("cp-pf", cppf_round),
        ("ue", ue_round),
        ("ts", ts_round),
    ];
    let mut all = true;
    for (k, (name, f)) in checks.iter().enumerate() {
        let mut rng = rng_for(a.seed, k as u64);
        let mut correct = 0u64;
        for _ in 0..a.rounds {
            correct += f(a, &profile, &mut rng)? as u64;
        }
        let pass = correct == a.rounds;
        all &= pass;
        out.emit(json!({
            "selftest": name,
            "profile": "desk",
            "rounds": a.rounds,
            "correct": correct,
            "seed": a.seed,
            "stream": k,
            "pass": pass,
        }));
    }
    out.emit(json!({
        "selftest": "summary",
        "profile": "desk",
        "waived": waived,
        "constructions": checks.iter().map(|(n, _)| Value::from(*n)).collect::<Vec<_>>(),
        "pass": all,
    }));
    Ok(if all {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}

fn sd_round(a: &SelftestArgs, _: &LengthProfile, rng: &mut ChaCha8Rng) -> Result<bool> {
    let (sk, pk) = sd::setup(a.n, 2, rng)?;
    let m = BitString::random(8, rng);
    let ct = sd::enc_random(&pk, &m, rng)?;
    Ok(sd::dec(sd::qkeygen(&sk)?, &ct, rng)? == Some(m))
}

fn cpprf_round(_: &SelftestArgs, p: &LengthProfile, rng: &mut ChaCha8Rng) -> Result<bool> {
    let k1 = cpprf::keygen(p, rng)?;
    let key = cpprf::protect(p, &k1, rng)?;
    let x = BitString::random(p.input_bits(), rng);
    Ok(key.protected.eval(&x, rng)? == Output::Bits(k1.eval(&x)?))
}

fn trigger_round(_: &SelftestArgs, p: &LengthProfile, rng: &mut ChaCha8Rng) -> Result<bool> {
    let k1 = cpprf::keygen(p, rng)?;
    let key = cpprf::protect(p, &k1, rng)?;
    let x0 = BitString::random(p.l0, rng);
    let y = BitString::random(p.m, rng);
    let t = cpprf::gen_trigger(&key.secret, &x0, &y)?;
    Ok(key.protected.eval(&t, rng)? == Output::Bits(y))
}

fn cppf_round(_: &SelftestArgs, p: &LengthProfile, rng: &mut ChaCha8Rng) -> Result<bool> {
    let y = BitString::random(p.input_bits(), rng);
    let point = cppf::protect(p, &y, rng)?;
    let mut other = y.clone();
    other.flip(rng.gen_range(0..y.len()));
    Ok(point.eval(&y, rng)? && !point.eval(&other, rng)?)
}

fn ue_round(_: &SelftestArgs, p: &LengthProfile, rng: &mut ChaCha8Rng) -> Result<bool> {
    let key = ue::keygen(p, rng)?;
    let b: bool = rng.gen();
    let ct = ue::enc(&key, b, rng)?;
    Ok(ue::dec(&key, ct, rng)? == b)
}

fn ts_round(a: &SelftestArgs, _: &LengthProfile, rng: &mut ChaCha8Rng) -> Result<bool> {
    let (sk, vk) = ts::keygen(a.n, rng)?;
    let m: bool = rng.gen();
    let sig = ts::sign(ts::token_gen(&sk)?, m, rng)?;
    Ok(sig.message == m && ts::verify(&vk, m, &sig.sigma))
}
