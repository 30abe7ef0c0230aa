//! Puncturable PRF from the GGM tree over a SHA-256 length-doubling PRG.

use rand::Rng;
use sha2::{Digest, Sha256};

use super::bits::BitString;
use crate::error::{Error, Result};

pub const SEED_BYTES: usize = 16;
pub type Seed = [u8; SEED_BYTES];

const PRG_TAG: &[u8] = b"ggm/prg/v1";
const OUT_TAG: &[u8] = b"ggm/out/v1";

/// Upper bound on output length.
pub const MAX_OUTPUT_BITS: usize = 1 << 16;

fn prg(seed: &Seed) -> (Seed, Seed) {
    let mut h = Sha256::new();
    h.update(PRG_TAG);
    h.update(seed);
    let out = h.finalize();
    let mut left = [0u8; SEED_BYTES];
    let mut right = [0u8; SEED_BYTES];
    left.copy_from_slice(&out[..SEED_BYTES]);
    right.copy_from_slice(&out[SEED_BYTES..]);
    (left, right)
}

fn child(seed: &Seed, bit: bool) -> Seed {
    let (l, r) = prg(seed);
    if bit {
        r
    } else {
        l
    }
}

fn expand(leaf: &Seed, bits: usize) -> BitString {
    let mut bytes = Vec::with_capacity(bits.div_ceil(8) + 32);
    let mut ctr = 0u32;
    while bytes.len() * 8 < bits {
        let mut h = Sha256::new();
        h.update(OUT_TAG);
        h.update(leaf);
        h.update(ctr.to_be_bytes());
        bytes.extend_from_slice(&h.finalize());
        ctr += 1;
    }
    BitString::from_bytes(&bytes, bits).expect("enough bytes were generated")
}

fn walk(mut seed: Seed, path: &[bool]) -> Seed {
    for &b in path {
        seed = child(&seed, b);
    }
    seed
}

fn check_shape(input_bits: usize, output_bits: usize) -> Result<()> {
    if input_bits == 0 || output_bits == 0 || output_bits > MAX_OUTPUT_BITS {
        return Err(Error::param(format!(
            "unsupported PRF shape {input_bits} -> {output_bits} bits"
        )));
    }
    Ok(())
}

/// PRF key for `{0,1}^input_bits -> {0,1}^output_bits`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrfKey {
    seed: Seed,
    input_bits: usize,
    output_bits: usize,
}

impl std::fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "PrfKey({} -> {} bits)",
            self.input_bits, self.output_bits
        )
    }
}

impl PrfKey {
    pub fn generate<R: Rng + ?Sized>(
        input_bits: usize,
        output_bits: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_shape(input_bits, output_bits)?;
        let mut seed = [0u8; SEED_BYTES];
        rng.fill(&mut seed);
        Ok(Self {
            seed,
            input_bits,
            output_bits,
        })
    }

    pub fn from_seed(seed: Seed, input_bits: usize, output_bits: usize) -> Result<Self> {
        check_shape(input_bits, output_bits)?;
        Ok(Self {
            seed,
            input_bits,
            output_bits,
        })
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn eval(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.input_bits {
            return Err(Error::param(format!(
                "PRF input of {} bits, expected {}",
                x.len(),
                self.input_bits
            )));
        }
        Ok(expand(&walk(self.seed, x.bits()), self.output_bits))
    }

    /// Key that evaluates everywhere except `point`.
    pub fn puncture(&self, point: &BitString) -> Result<PuncturedKey> {
        if point.len() != self.input_bits {
            return Err(Error::param("puncture point has the wrong length"));
        }
        let mut copath = Vec::with_capacity(self.input_bits);
        let mut seed = self.seed;
        for &b in point.bits() {
            let (l, r) = prg(&seed);
            if b {
                copath.push(l);
                seed = r;
            } else {
                copath.push(r);
                seed = l;
            }
        }
        Ok(PuncturedKey {
            point: point.clone(),
            copath,
            output_bits: self.output_bits,
        })
    }
}

/// GGM key punctured at one point: the sibling seeds along the point's path.
#[derive(Clone, PartialEq, Eq)]
pub struct PuncturedKey {
    point: BitString,
    copath: Vec<Seed>,
    output_bits: usize,
}

impl PuncturedKey {
    pub fn point(&self) -> &BitString {
        &self.point
    }

    /// `None` exactly at the punctured point.
    pub fn eval(&self, x: &BitString) -> Result<Option<BitString>> {
        if x.len() != self.point.len() {
            return Err(Error::param("PRF input has the wrong length"));
        }
        let Some(depth) = (0..x.len()).find(|&i| x.get(i) != self.point.get(i)) else {
            return Ok(None);
        };
        let leaf = walk(self.copath[depth], &x.bits()[depth + 1..]);
        Ok(Some(expand(&leaf, self.output_bits)))
    }
}
