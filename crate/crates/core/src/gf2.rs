//! Linear algebra over GF(2) on bit-packed vectors of length at most 64.
//!
//! Coordinate 0 is the most significant packed bit, so integer order on the
//! packed word coincides with lexicographic order on the bit string.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const MAX_DIM: usize = 64;

/// A vector in F_2^n.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct F2Vector {
    n: u8,
    bits: u64,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_dim(n: usize) -> Result<(), Error> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::param(format!("dimension {n} outside 1..=64")));
    }
    Ok(())
}

impl F2Vector {
    pub fn zero(n: usize) -> Result<Self, Error> {
        check_dim(n)?;
        Ok(Self {
            n: n as u8,
            bits: 0,
        })
    }

    /// Builds a vector from its packed word. Bits above `n` must be clear.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self, Error> {
        check_dim(n)?;
        if bits & !mask(n) != 0 {
            return Err(Error::param(format!(
                "word {bits:#x} does not fit in {n} bits"
            )));
        }
        Ok(Self { n: n as u8, bits })
    }

    pub fn from_bools(v: &[bool]) -> Result<Self, Error> {
        let mut out = Self::zero(v.len())?;
        for (i, &b) in v.iter().enumerate() {
            out.set(i, b);
        }
        Ok(out)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, Error> {
        check_dim(n)?;
        Ok(Self {
            n: n as u8,
            bits: rng.gen::<u64>() & mask(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Packed word; coordinate `i` lives at bit `n - 1 - i`.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len(),
            "index {i} out of range for length {}",
            self.n
        );
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len(),
            "index {i} out of range for length {}",
            self.n
        );
        let bit = 1u64 << (self.len() - 1 - i);
        if value {
            self.bits |= bit;
        } else {
            self.bits &= !bit;
        }
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "length mismatch");
        Self {
            n: self.n,
            bits: self.bits ^ other.bits,
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "length mismatch");
        Self {
            n: self.n,
            bits: self.bits & other.bits,
        }
    }

    pub fn not(&self) -> Self {
        Self {
            n: self.n,
            bits: !self.bits & mask(self.len()),
        }
    }

    /// Coordinates where `self` is 1, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.get(i)).collect()
    }

    /// Restriction to the listed coordinates, in the order given.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self, Error> {
        let mut out = Self::zero(idx.len())?;
        for (j, &i) in idx.iter().enumerate() {
            out.set(j, self.get(i));
        }
        Ok(out)
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &Self) -> Result<Self, Error> {
        let n = self.len() + other.len();
        check_dim(n)?;
        Ok(Self {
            n: n as u8,
            bits: (self.bits << other.len()) | other.bits,
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

/// Inner product over GF(2).
pub fn inner(u: &F2Vector, v: &F2Vector) -> bool {
    assert_eq!(u.n, v.n, "length mismatch");
    (u.bits & v.bits).count_ones() & 1 == 1
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({self})")
    }
}

impl FromStr for F2Vector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bools = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::param(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bools(&bools)
    }
}

/// A linear subspace of F_2^n, stored as a reduced row-echelon basis.
///
/// Rows are sorted by pivot (leading coordinate) and every pivot column is
/// zero outside its own row.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct F2Subspace {
    n: u8,
    rows: Vec<u64>,
}

fn leading(word: u64) -> u32 {
    63 - word.leading_zeros()
}

/// Full Gauss-Jordan reduction of packed rows; zero rows are dropped.
fn rref(mut rows: Vec<u64>) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(rows.len());
    rows.retain(|&r| r != 0);
    while let Some(pos) = (0..rows.len()).max_by_key(|&i| rows[i]) {
        let pivot_row = rows.swap_remove(pos);
        if pivot_row == 0 {
            break;
        }
        let p = 1u64 << leading(pivot_row);
        for r in rows.iter_mut() {
            if *r & p != 0 {
                *r ^= pivot_row;
            }
        }
        for r in out.iter_mut() {
            if *r & p != 0 {
                *r ^= pivot_row;
            }
        }
        out.push(pivot_row);
        rows.retain(|&r| r != 0);
    }
    out
}

impl F2Subspace {
    /// Span of the given vectors inside F_2^n.
    pub fn span(n: usize, vectors: &[F2Vector]) -> Result<Self, Error> {
        check_dim(n)?;
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::param(format!(
                "vector of length {} in F_2^{n}",
                v.len()
            )));
        }
        Ok(Self {
            n: n as u8,
            rows: rref(vectors.iter().map(|v| v.bits).collect()),
        })
    }

    pub fn zero(n: usize) -> Result<Self, Error> {
        Self::span(n, &[])
    }

    pub fn full(n: usize) -> Result<Self, Error> {
        check_dim(n)?;
        let rows = (0..n).map(|i| 1u64 << (n - 1 - i)).collect();
        Ok(Self { n: n as u8, rows })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n as usize
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> Vec<F2Vector> {
        self.rows
            .iter()
            .map(|&bits| F2Vector { n: self.n, bits })
            .collect()
    }

    /// Coordinates of the pivots, in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|&r| self.ambient_dim() - 1 - leading(r) as usize)
            .collect()
    }

    /// Number of elements, `2^dim`.
    pub fn size(&self) -> u64 {
        1u64 << self.dim()
    }

    /// Lexicographically smallest element of `self + u`.
    pub fn canonical_rep(&self, u: &F2Vector) -> F2Vector {
        assert_eq!(u.len(), self.ambient_dim(), "length mismatch");
        let mut w = u.bits;
        for &r in &self.rows {
            if w & (1u64 << leading(r)) != 0 {
                w ^= r;
            }
        }
        F2Vector { n: self.n, bits: w }
    }

    pub fn contains(&self, u: &F2Vector) -> bool {
        self.canonical_rep(u).is_zero()
    }

    /// The orthogonal complement with respect to the standard inner product.
    pub fn dual(&self) -> Self {
        let n = self.ambient_dim();
        let pivots = self.pivots();
        let mut out = Vec::with_capacity(n - self.dim());
        for f in (0..n).filter(|c| !pivots.contains(c)) {
            let fbit = 1u64 << (n - 1 - f);
            let mut v = fbit;
            for (&r, &p) in self.rows.iter().zip(&pivots) {
                if r & fbit != 0 {
                    v |= 1u64 << (n - 1 - p);
                }
            }
            out.push(v);
        }
        Self {
            n: self.n,
            rows: rref(out),
        }
    }

    /// Element of the subspace with coefficient vector given by the low bits
    /// of `index` (row 0 is the most significant coefficient).
    pub fn element(&self, index: u64) -> F2Vector {
        let k = self.dim();
        let mut w = 0u64;
        for (j, &r) in self.rows.iter().enumerate() {
            if (index >> (k - 1 - j)) & 1 == 1 {
                w ^= r;
            }
        }
        F2Vector { n: self.n, bits: w }
    }

    /// All elements, in the order of `element(0..size)`.
    pub fn elements(&self) -> Vec<F2Vector> {
        (0..self.size()).map(|i| self.element(i)).collect()
    }

    /// Every `k`-dimensional subspace of F_2^n, enumerated by pivot pattern.
    pub fn enumerate(n: usize, k: usize) -> Result<Vec<Self>, Error> {
        check_dim(n)?;
        if k > n || n > 16 {
            return Err(Error::param(format!(
                "cannot enumerate {k}-dim subspaces of F_2^{n}"
            )));
        }
        let mut out = Vec::new();
        for pivset in 0u32..(1u32 << n) {
            if pivset.count_ones() as usize != k {
                continue;
            }
            let pivots: Vec<usize> = (0..n).filter(|i| pivset >> (n - 1 - i) & 1 == 1).collect();
            // free slots: (row j, column c) with c > pivot j and c not a pivot
            let slots: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(j, &p)| {
                    (p + 1..n)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (j, c))
                })
                .collect();
            for fill in 0u64..(1u64 << slots.len()) {
                let mut rows: Vec<u64> = pivots.iter().map(|&p| 1u64 << (n - 1 - p)).collect();
                for (t, &(j, c)) in slots.iter().enumerate() {
                    if fill >> t & 1 == 1 {
                        rows[j] |= 1u64 << (n - 1 - c);
                    }
                }
                out.push(Self { n: n as u8, rows });
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for F2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis().iter().map(|v| v.to_string()).collect();
        write!(f, "F2Subspace(n={}, [{}])", self.n, rows.join(", "))
    }
}

/// Uniformly random `k`-dimensional subspace of F_2^n.
///
/// Rejection-samples full-rank `k x n` matrices; each subspace has the same
/// number of ordered bases, so the row space is uniform.
pub fn sample_subspace<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<F2Subspace, Error> {
    check_dim(n)?;
    if !n.is_multiple_of(2) {
        return Err(Error::param(format!("ambient dimension {n} must be even")));
    }
    if k > n {
        return Err(Error::param(format!("subspace dimension {k} exceeds {n}")));
    }
    loop {
        let rows: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & mask(n)).collect();
        let reduced = rref(rows);
        if reduced.len() == k {
            return Ok(F2Subspace {
                n: n as u8,
                rows: reduced,
            });
        }
    }
}

/// The coset `A + rep`, with `rep` kept canonical.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coset {
    space: F2Subspace,
    rep: F2Vector,
}

impl Coset {
    pub fn new(space: F2Subspace, shift: &F2Vector) -> Result<Self, Error> {
        if shift.len() != space.ambient_dim() {
            return Err(Error::param(
                "coset shift length differs from ambient dimension",
            ));
        }
        let rep = space.canonical_rep(shift);
        Ok(Self { space, rep })
    }

    pub fn space(&self) -> &F2Subspace {
        &self.space
    }

    pub fn rep(&self) -> &F2Vector {
        &self.rep
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }

    /// Membership; vectors of the wrong length are rejected.
    pub fn contains(&self, u: &F2Vector) -> bool {
        u.len() == self.ambient_dim() && self.space.canonical_rep(u) == self.rep
    }

    pub fn elements(&self) -> Vec<F2Vector> {
        self.space
            .elements()
            .iter()
            .map(|a| a.xor(&self.rep))
            .collect()
    }
}

impl fmt::Debug for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coset({:?} + {})", self.space, self.rep)
    }
}

/// Membership of `u` in `A + s`, decided by comparing canonical representatives.
pub fn coset_member(space: &F2Subspace, s: &F2Vector, u: &F2Vector) -> bool {
    space.canonical_rep(s) == space.canonical_rep(u)
}

/// All weight-`n/2` strings of length `n`, in lexicographic order.
pub fn balanced_strings(n: usize) -> Result<Vec<F2Vector>, Error> {
    check_dim(n)?;
    if !n.is_multiple_of(2) {
        return Err(Error::param(format!(
            "balanced strings of length {n} do not exist: the length must be even"
        )));
    }
    if n > 24 {
        return Err(Error::param(format!(
            "enumerating balanced strings of length {n} is too large"
        )));
    }
    Ok((0u64..(1u64 << n))
        .filter(|w| w.count_ones() as usize == n / 2)
        .map(|bits| F2Vector { n: n as u8, bits })
        .collect())
}

/// Uniform weight-`n/2` string of length `n`.
pub fn sample_balanced<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<F2Vector, Error> {
    check_dim(n)?;
    if !n.is_multiple_of(2) {
        return Err(Error::param(format!(
            "balanced strings of length {n} do not exist: the length must be even"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(idx.as_mut_slice(), rng);
    let mut v = F2Vector::zero(n)?;
    for &i in &idx[..n / 2] {
        v.set(i, true);
    }
    Ok(v)
}
