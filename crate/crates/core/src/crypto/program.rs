//! Restricted program language, canonical byte encoding and the transparent
//! obfuscators.
//!
//! Encoding: every top-level value starts with a 3-byte magic, a version byte
//! and a kind byte; integers are big-endian and every variable-length field
//! carries a length prefix. Decoding rejects trailing bytes other than zero
//! padding.

use super::bits::BitString;
use super::prf::{PrfKey, Seed, SEED_BYTES};
use crate::error::{Error, Result};
use crate::gf2::{Coset, F2Subspace, F2Vector};

pub const MAGIC: &[u8; 3] = b"CMP";
pub const VERSION: u8 = 1;

const KIND_PROGRAM: u8 = 0x50;
const KIND_OBF: u8 = 0x4f;

/// Upper bound on list lengths accepted by the decoder.
const MAX_ITEMS: usize = 1 << 12;

/// Program input: a classical string and/or a list of register readouts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Input {
    pub x: BitString,
    pub vectors: Vec<F2Vector>,
}

impl Input {
    pub fn vector(v: F2Vector) -> Self {
        Self {
            x: BitString::default(),
            vectors: vec![v],
        }
    }

    pub fn vectors(vs: Vec<F2Vector>) -> Self {
        Self {
            x: BitString::default(),
            vectors: vs,
        }
    }

    pub fn bits(x: BitString) -> Self {
        Self {
            x,
            vectors: Vec::new(),
        }
    }

    pub fn full(x: BitString, vectors: Vec<F2Vector>) -> Self {
        Self { x, vectors }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Bottom,
    Bit(bool),
    Bits(BitString),
}

impl Output {
    pub fn is_bottom(&self) -> bool {
        matches!(self, Output::Bottom)
    }

    pub fn bits(&self) -> Option<&BitString> {
        match self {
            Output::Bits(b) => Some(b),
            _ => None,
        }
    }
}

/// Functions allowed inside compute-and-compare programs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Function {
    Identity,
    Prf(PrfKey),
}

impl Function {
    pub fn apply(&self, x: &BitString) -> Result<BitString> {
        match self {
            Function::Identity => Ok(x.clone()),
            Function::Prf(k) => k.eval(x),
        }
    }
}

/// Layout of a hidden-trigger input `x = x0 || x1 || x2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriggerLayout {
    pub l0: usize,
    pub l1: usize,
    pub l2: usize,
}

impl TriggerLayout {
    pub fn input_bits(&self) -> usize {
        self.l0 + self.l1 + self.l2
    }

    pub fn split(&self, x: &BitString) -> Option<(BitString, BitString, BitString)> {
        (x.len() == self.input_bits()).then(|| {
            (
                x.slice(0, self.l0),
                x.slice(self.l0, self.l0 + self.l1),
                x.slice(self.l0 + self.l1, self.input_bits()),
            )
        })
    }
}

/// The hidden-trigger evaluation program for copy-protected PRFs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriggerProgram {
    pub layout: TriggerLayout,
    pub k1: PrfKey,
    pub k2: PrfKey,
    pub k3: PrfKey,
    /// `cosets[i][0]` is `A_i + s_i`, `cosets[i][1]` is `A_i^perp + s'_i`.
    pub cosets: Vec<[Coset; 2]>,
}

impl TriggerProgram {
    /// If `x` is a trigger input, the embedded program it carries.
    pub fn decode_trigger(&self, x: &BitString) -> Option<Program> {
        let (x0, x1, x2) = self.layout.split(x)?;
        let d = self.k3.eval(&x1).ok()?.xor(&x2).ok()?;
        if d.slice(0, self.layout.l0) != x0 {
            return None;
        }
        if self.k2.eval(&d).ok()? != x1 {
            return None;
        }
        decode_program_bits(&d.slice(self.layout.l0, d.len())).ok()
    }

    pub fn eval(&self, input: &Input) -> Output {
        let Some((x0, _, _)) = self.layout.split(&input.x) else {
            return Output::Bottom;
        };
        if let Some(q) = self.decode_trigger(&input.x) {
            return q.eval(&Input::vectors(input.vectors.clone()));
        }
        if input.vectors.len() != self.cosets.len() || self.cosets.len() != self.layout.l0 {
            return Output::Bottom;
        }
        let inside = self
            .cosets
            .iter()
            .zip(&input.vectors)
            .enumerate()
            .all(|(i, (pair, v))| pair[x0.get(i) as usize].contains(v));
        match (inside, self.k1.eval(&input.x)) {
            (true, Ok(y)) => Output::Bits(y),
            _ => Output::Bottom,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Program {
    /// Accepts a single vector iff it lies in the coset.
    Membership(Coset),
    /// Outputs `message` iff `f(x) = lock`.
    ComputeCompare {
        f: Function,
        lock: BitString,
        message: BitString,
    },
    /// Outputs `message` iff every check accepts its vector.
    Locked {
        checks: Vec<Program>,
        message: BitString,
    },
    HiddenTrigger(Box<TriggerProgram>),
    Obfuscated(Box<ObfProgram>),
    /// Constant bottom.
    Null,
}

impl Program {
    pub fn eval(&self, input: &Input) -> Output {
        match self {
            Program::Membership(c) => match input.vectors.as_slice() {
                [v] => Output::Bit(c.contains(v)),
                _ => Output::Bottom,
            },
            Program::ComputeCompare { f, lock, message } => match f.apply(&input.x) {
                Ok(y) if &y == lock => Output::Bits(message.clone()),
                _ => Output::Bottom,
            },
            Program::Locked { checks, message } => {
                if checks.len() != input.vectors.len() {
                    return Output::Bottom;
                }
                let ok = checks
                    .iter()
                    .zip(&input.vectors)
                    .all(|(c, v)| c.eval(&Input::vector(*v)) == Output::Bit(true));
                if ok {
                    Output::Bits(message.clone())
                } else {
                    Output::Bottom
                }
            }
            Program::HiddenTrigger(t) => t.eval(input),
            Program::Obfuscated(o) => o.eval(input),
            Program::Null => Output::Bottom,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.header(KIND_PROGRAM);
        w.program(self);
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.header(KIND_PROGRAM)?;
        let p = r.program(0)?;
        r.finish()?;
        Ok(p)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        Self::from_bytes(&hex::decode(s).map_err(|e| Error::decode(e.to_string()))?)
    }

    /// Encoding as a bit string (bytes expanded most significant bit first).
    pub fn to_bits(&self) -> BitString {
        let bytes = self.to_bytes();
        BitString::from_bytes(&bytes, bytes.len() * 8).expect("exact length")
    }
}

/// Decodes a program from a bit string; trailing bits must be zero.
pub fn decode_program_bits(bits: &BitString) -> Result<Program> {
    Program::from_bytes(&bits.to_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObfKind {
    Io,
    ComputeCompare,
    Simulated,
}

/// Public shape of an obfuscated program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProgramParams {
    pub input_bits: u32,
    pub output_bits: u32,
    pub size: u32,
}

/// Output of an obfuscator. The transparent obfuscators keep the program in
/// the clear, so security experiments run against them are only meaningful
/// for strategies that ignore the description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObfProgram {
    kind: ObfKind,
    params: ProgramParams,
    coins: Vec<u8>,
    body: Program,
}

impl ObfProgram {
    pub fn kind(&self) -> ObfKind {
        self.kind
    }

    pub fn params(&self) -> ProgramParams {
        self.params
    }

    /// The wrapped program, visible because obfuscation is transparent.
    pub fn inspect(&self) -> &Program {
        &self.body
    }

    pub fn eval(&self, input: &Input) -> Output {
        self.body.eval(input)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.header(KIND_OBF);
        w.obf(self);
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.header(KIND_OBF)?;
        let o = r.obf(0)?;
        r.finish()?;
        Ok(o)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        Self::from_bytes(&hex::decode(s).map_err(|e| Error::decode(e.to_string()))?)
    }
}

pub trait Obfuscator {
    fn obfuscate(
        &self,
        program: &Program,
        params: ProgramParams,
        coins: &[u8],
    ) -> Result<ObfProgram>;

    /// Output of the simulator: a constant-bottom program of the given shape.
    fn simulate(&self, params: ProgramParams) -> ObfProgram;
}

/// Transparent indistinguishability obfuscation.
#[derive(Clone, Copy, Debug, Default)]
pub struct TransparentIo;

/// Transparent compute-and-compare obfuscation.
#[derive(Clone, Copy, Debug, Default)]
pub struct TransparentCcObf;

impl Obfuscator for TransparentIo {
    fn obfuscate(
        &self,
        program: &Program,
        params: ProgramParams,
        coins: &[u8],
    ) -> Result<ObfProgram> {
        Ok(ObfProgram {
            kind: ObfKind::Io,
            params,
            coins: coins.to_vec(),
            body: program.clone(),
        })
    }

    fn simulate(&self, params: ProgramParams) -> ObfProgram {
        ObfProgram {
            kind: ObfKind::Simulated,
            params,
            coins: Vec::new(),
            body: Program::Null,
        }
    }
}

impl Obfuscator for TransparentCcObf {
    fn obfuscate(
        &self,
        program: &Program,
        params: ProgramParams,
        coins: &[u8],
    ) -> Result<ObfProgram> {
        if !matches!(program, Program::ComputeCompare { .. }) {
            return Err(Error::param(
                "compute-and-compare obfuscation needs a compute-and-compare program",
            ));
        }
        Ok(ObfProgram {
            kind: ObfKind::ComputeCompare,
            params,
            coins: coins.to_vec(),
            body: program.clone(),
        })
    }

    fn simulate(&self, params: ProgramParams) -> ObfProgram {
        ObfProgram {
            kind: ObfKind::Simulated,
            params,
            coins: Vec::new(),
            body: Program::Null,
        }
    }
}

/// Shape of a program with the given input/output lengths.
pub fn params_for(program: &Program, input_bits: usize, output_bits: usize) -> ProgramParams {
    ProgramParams {
        input_bits: input_bits as u32,
        output_bits: output_bits as u32,
        size: program.to_bytes().len() as u32,
    }
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn header(&mut self, kind: u8) {
        self.buf.extend_from_slice(MAGIC);
        self.buf.push(VERSION);
        self.buf.push(kind);
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u16(&mut self, v: usize) {
        self.buf.extend_from_slice(&(v as u16).to_be_bytes());
    }

    fn u32(&mut self, v: usize) {
        self.buf.extend_from_slice(&(v as u32).to_be_bytes());
    }

    fn bits(&mut self, b: &BitString) {
        self.u32(b.len());
        self.buf.extend_from_slice(&b.to_bytes());
    }

    fn bytes(&mut self, b: &[u8]) {
        self.u32(b.len());
        self.buf.extend_from_slice(b);
    }

    fn word(&mut self, n: usize, w: u64) {
        let nb = n.div_ceil(8);
        self.buf.extend_from_slice(&w.to_be_bytes()[8 - nb..]);
    }

    fn coset(&mut self, c: &Coset) {
        let n = c.ambient_dim();
        self.u8(n as u8);
        self.u8(c.space().dim() as u8);
        for row in c.space().basis() {
            self.word(n, row.bits());
        }
        self.word(n, c.rep().bits());
    }

    fn key(&mut self, k: &PrfKey) {
        self.buf.extend_from_slice(k.seed());
        self.u32(k.input_bits());
        self.u32(k.output_bits());
    }

    fn program(&mut self, p: &Program) {
        match p {
            Program::Membership(c) => {
                self.u8(1);
                self.coset(c);
            }
            Program::ComputeCompare { f, lock, message } => {
                self.u8(2);
                match f {
                    Function::Identity => self.u8(0),
                    Function::Prf(k) => {
                        self.u8(1);
                        self.key(k);
                    }
                }
                self.bits(lock);
                self.bits(message);
            }
            Program::Locked { checks, message } => {
                self.u8(3);
                self.u16(checks.len());
                for c in checks {
                    self.program(c);
                }
                self.bits(message);
            }
            Program::HiddenTrigger(t) => {
                self.u8(4);
                self.u32(t.layout.l0);
                self.u32(t.layout.l1);
                self.u32(t.layout.l2);
                self.key(&t.k1);
                self.key(&t.k2);
                self.key(&t.k3);
                self.u16(t.cosets.len());
                for [c0, c1] in &t.cosets {
                    self.coset(c0);
                    self.coset(c1);
                }
            }
            Program::Obfuscated(o) => {
                self.u8(5);
                self.obf(o);
            }
            Program::Null => self.u8(0),
        }
    }

    fn obf(&mut self, o: &ObfProgram) {
        self.u8(match o.kind {
            ObfKind::Io => 0,
            ObfKind::ComputeCompare => 1,
            ObfKind::Simulated => 2,
        });
        self.u32(o.params.input_bits as usize);
        self.u32(o.params.output_bits as usize);
        self.u32(o.params.size as usize);
        self.bytes(&o.coins);
        self.program(&o.body);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

const MAX_DEPTH: usize = 8;

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::decode(format!(
                "truncated input at byte {}",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<usize> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]) as usize)
    }

    fn u32(&mut self) -> Result<usize> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }

    fn header(&mut self, kind: u8) -> Result<()> {
        if self.take(3)? != MAGIC {
            return Err(Error::decode("bad magic"));
        }
        let v = self.u8()?;
        if v != VERSION {
            return Err(Error::decode(format!("unsupported version {v}")));
        }
        if self.u8()? != kind {
            return Err(Error::decode("unexpected object kind"));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.buf[self.pos..].iter().any(|&b| b != 0) {
            return Err(Error::decode("non-zero trailing bytes"));
        }
        Ok(())
    }

    fn bits(&mut self) -> Result<BitString> {
        let len = self.u32()?;
        let bytes = self.take(len.div_ceil(8))?;
        let b = BitString::from_bytes(bytes, len)?;
        if b.to_bytes() != bytes {
            return Err(Error::decode("non-canonical bit padding"));
        }
        Ok(b)
    }

    fn bytes(&mut self) -> Result<Vec<u8>> {
        let len = self.u32()?;
        Ok(self.take(len)?.to_vec())
    }

    fn word(&mut self, n: usize) -> Result<F2Vector> {
        let nb = n.div_ceil(8);
        let b = self.take(nb)?;
        let mut full = [0u8; 8];
        full[8 - nb..].copy_from_slice(b);
        F2Vector::from_bits(n, u64::from_be_bytes(full)).map_err(|e| Error::decode(e.to_string()))
    }

    fn coset(&mut self) -> Result<Coset> {
        let n = self.u8()? as usize;
        let k = self.u8()? as usize;
        if n == 0 || n > 64 || k > n {
            return Err(Error::decode(format!("bad coset shape ({n}, {k})")));
        }
        let rows = (0..k).map(|_| self.word(n)).collect::<Result<Vec<_>>>()?;
        let rep = self.word(n)?;
        let space = F2Subspace::span(n, &rows).map_err(|e| Error::decode(e.to_string()))?;
        if space.basis() != rows {
            return Err(Error::decode("coset basis is not in reduced echelon form"));
        }
        let c = Coset::new(space, &rep).map_err(|e| Error::decode(e.to_string()))?;
        if c.rep() != &rep {
            return Err(Error::decode("coset representative is not canonical"));
        }
        Ok(c)
    }

    fn key(&mut self) -> Result<PrfKey> {
        let mut seed: Seed = [0u8; SEED_BYTES];
        seed.copy_from_slice(self.take(SEED_BYTES)?);
        let i = self.u32()?;
        let o = self.u32()?;
        PrfKey::from_seed(seed, i, o).map_err(|e| Error::decode(e.to_string()))
    }

    fn program(&mut self, depth: usize) -> Result<Program> {
        if depth > MAX_DEPTH {
            return Err(Error::decode("program nesting too deep"));
        }
        Ok(match self.u8()? {
            0 => Program::Null,
            1 => Program::Membership(self.coset()?),
            2 => {
                let f = match self.u8()? {
                    0 => Function::Identity,
                    1 => Function::Prf(self.key()?),
                    t => return Err(Error::decode(format!("unknown function tag {t}"))),
                };
                let lock = self.bits()?;
                let message = self.bits()?;
                Program::ComputeCompare { f, lock, message }
            }
            3 => {
                let count = self.u16()?;
                if count > MAX_ITEMS {
                    return Err(Error::decode("too many checks"));
                }
                let checks = (0..count)
                    .map(|_| self.program(depth + 1))
                    .collect::<Result<Vec<_>>>()?;
                let message = self.bits()?;
                Program::Locked { checks, message }
            }
            4 => {
                let layout = TriggerLayout {
                    l0: self.u32()?,
                    l1: self.u32()?,
                    l2: self.u32()?,
                };
                let (k1, k2, k3) = (self.key()?, self.key()?, self.key()?);
                let count = self.u16()?;
                if count > MAX_ITEMS {
                    return Err(Error::decode("too many cosets"));
                }
                let cosets = (0..count)
                    .map(|_| Ok([self.coset()?, self.coset()?]))
                    .collect::<Result<Vec<_>>>()?;
                Program::HiddenTrigger(Box::new(TriggerProgram {
                    layout,
                    k1,
                    k2,
                    k3,
                    cosets,
                }))
            }
            5 => Program::Obfuscated(Box::new(self.obf(depth + 1)?)),
            t => return Err(Error::decode(format!("unknown program tag {t}"))),
        })
    }

    fn obf(&mut self, depth: usize) -> Result<ObfProgram> {
        let kind = match self.u8()? {
            0 => ObfKind::Io,
            1 => ObfKind::ComputeCompare,
            2 => ObfKind::Simulated,
            t => return Err(Error::decode(format!("unknown obfuscation kind {t}"))),
        };
        let params = ProgramParams {
            input_bits: self.u32()? as u32,
            output_bits: self.u32()? as u32,
            size: self.u32()? as u32,
        };
        let coins = self.bytes()?;
        let body = self.program(depth)?;
        Ok(ObfProgram {
            kind,
            params,
            coins,
            body,
        })
    }
}
