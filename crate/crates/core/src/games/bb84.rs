//! Identical-basis BB84 game and explicit finite strategies for it.

use std::sync::{Arc, Mutex};

use rand::Rng;

use super::coset::check_even;
use super::{
    check_enumeration, Challenge, EnumerableGame, ExactStrategy, Game, Split, Strategy, TrialRng,
};
use crate::error::{Error, Result};
use crate::gf2::{balanced_strings, sample_balanced, F2Vector};
use crate::qsim::{
    is_projector, max_abs, random_isometry, random_unitary, Matrix, StateVector, Vector, C64,
};

/// Tolerance for isometry and completeness checks on finite strategies.
pub const FINITE_TOL: f64 = 1e-9;

/// Largest `n` supported by the finite-strategy machinery.
pub const MAX_FINITE_N: usize = 6;

/// Positions `T_b = {i : theta_i = b}`.
pub fn targets(theta: &F2Vector, b: bool) -> Vec<usize> {
    (0..theta.len()).filter(|&i| theta.get(i) == b).collect()
}

/// `x` restricted to `T_b`.
pub fn target_bits(x: &F2Vector, theta: &F2Vector, b: bool) -> F2Vector {
    x.restrict(&targets(theta, b)).expect("indices in range")
}

/// The question set `Theta_n x {0,1}`, in the order used to index families.
pub fn questions(n: usize) -> Result<Vec<(F2Vector, bool)>> {
    check_even(n)?;
    Ok(balanced_strings(n)?
        .into_iter()
        .flat_map(|t| [(t, false), (t, true)])
        .collect())
}

pub fn question_index(n: usize, theta: &F2Vector, b: bool) -> Result<usize> {
    let thetas = balanced_strings(n)?;
    let pos = thetas.binary_search(theta).map_err(|_| {
        Error::param(format!(
            "{theta} is not a balanced basis string of length {n}"
        ))
    })?;
    Ok(2 * pos + b as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bb84Secret {
    pub x: F2Vector,
    pub theta: F2Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bb84Question {
    pub theta: F2Vector,
    pub b: bool,
}

/// Challenge `|x^theta>` with `|theta| = n/2`; after the split both players
/// get `(theta, b)` and must return `x` restricted to `T_b`.
#[derive(Clone, Copy, Debug)]
pub struct Bb84Identical {
    n: usize,
}

impl Bb84Identical {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn correct(&self, s: &Bb84Secret, b: bool, y: &F2Vector) -> Result<bool> {
        if y.len() != self.n / 2 {
            return Err(Error::strategy(format!(
                "answer of length {}, expected {}",
                y.len(),
                self.n / 2
            )));
        }
        Ok(target_bits(&s.x, &s.theta, b) == *y)
    }

    fn challenge_for(s: &Bb84Secret, b: bool) -> Challenge<bool, Bb84Question> {
        let q = Bb84Question { theta: s.theta, b };
        Challenge {
            hidden: b,
            to_bob: q.clone(),
            to_charlie: q,
        }
    }
}

impl Game for Bb84Identical {
    type Prelude = ();
    type Secret = Bb84Secret;
    type AliceInput = StateVector;
    type ToChallenger = ();
    type Hidden = bool;
    type Question = Bb84Question;
    type Answer = F2Vector;

    fn name(&self) -> String {
        "moe-bb84-identical".into()
    }

    fn identical(&self) -> bool {
        true
    }

    fn setup(&self, _: &(), rng: &mut TrialRng) -> Result<(Bb84Secret, StateVector)> {
        let x = F2Vector::random(self.n, rng)?;
        let theta = sample_balanced(self.n, rng)?;
        let state = StateVector::bb84_state(&x, &theta)?;
        Ok((Bb84Secret { x, theta }, state))
    }

    fn challenge(
        &self,
        s: &Bb84Secret,
        _: &(),
        rng: &mut TrialRng,
    ) -> Result<Challenge<bool, Bb84Question>> {
        Ok(Self::challenge_for(s, rng.gen()))
    }

    fn judge(&self, s: &Bb84Secret, b: &bool, y1: &F2Vector, y2: &F2Vector) -> Result<bool> {
        Ok(self.correct(s, *b, y1)? & self.correct(s, *b, y2)?)
    }
}

impl EnumerableGame for Bb84Identical {
    fn setups(&self) -> Result<Vec<(f64, Bb84Secret, StateVector)>> {
        let thetas = balanced_strings(self.n)?;
        check_enumeration((thetas.len() as u64) << (self.n + 1))?;
        let w = 1.0 / (thetas.len() as f64 * (1u64 << self.n) as f64);
        let mut out = Vec::new();
        for theta in thetas {
            for xb in 0..1u64 << self.n {
                let x = F2Vector::from_bits(self.n, xb)?;
                out.push((
                    w,
                    Bb84Secret { x, theta },
                    StateVector::bb84_state(&x, &theta)?,
                ));
            }
        }
        Ok(out)
    }

    fn challenges(
        &self,
        s: &Bb84Secret,
        _: &(),
    ) -> Result<Vec<(f64, Challenge<bool, Bb84Question>)>> {
        Ok(vec![
            (0.5, Self::challenge_for(s, false)),
            (0.5, Self::challenge_for(s, true)),
        ])
    }
}

/// Closed form of the trivial strategy's value: `1/2 + 2^{-n/2 - 1}`.
pub fn trivial_value(n: usize) -> f64 {
    0.5 + 0.5f64.powi(n as i32 / 2 + 1)
}

/// Alice draws `b*`, measures every qubit in basis `b*` and forwards the
/// outcome; both players answer its restriction to `T_b`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Bb84Trivial;

/// Alice measures every qubit in the computational basis and forwards the
/// outcome. Perfect when `b = 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeasureComputational;

fn readout_dist(state: &StateVector, hadamard: bool) -> Vec<(f64, F2Vector)> {
    let mask = F2Vector::zero(state.num_qubits()).expect("non-empty").not();
    state
        .outcome_distribution(hadamard.then_some(&mask))
        .into_iter()
        .map(|(u, p)| (p, u))
        .collect()
}

fn readout(mut state: StateVector, hadamard: bool, rng: &mut TrialRng) -> Result<F2Vector> {
    if hadamard {
        state.hadamard_all();
    }
    Ok(state.measure(rng)?.0)
}

macro_rules! classical_bb84_strategy {
    ($ty:ty, $name:expr, $basis:expr, $dist:expr) => {
        impl Strategy<Bb84Identical> for $ty {
            type ShareB = F2Vector;
            type ShareC = F2Vector;

            fn name(&self) -> String {
                $name.into()
            }

            fn split(
                &self,
                _: &(),
                state: StateVector,
                rng: &mut TrialRng,
            ) -> Result<Split<F2Vector, F2Vector, ()>> {
                let h: bool = $basis(rng);
                let u = readout(state, h, rng)?;
                Ok(Split::new(u, u))
            }

            fn answer_b(
                &self,
                u: F2Vector,
                q: &Bb84Question,
                _: &mut TrialRng,
            ) -> Result<F2Vector> {
                Ok(target_bits(&u, &q.theta, q.b))
            }

            fn answer_c(
                &self,
                u: F2Vector,
                q: &Bb84Question,
                _: &mut TrialRng,
            ) -> Result<F2Vector> {
                Ok(target_bits(&u, &q.theta, q.b))
            }
        }

        impl ExactStrategy<Bb84Identical> for $ty {
            fn split_dist(
                &self,
                state: &StateVector,
            ) -> Result<Vec<(f64, Split<F2Vector, F2Vector, ()>)>> {
                let dist: Vec<(f64, F2Vector)> = $dist(state);
                Ok(dist
                    .into_iter()
                    .map(|(p, u)| (p, Split::new(u, u)))
                    .collect())
            }

            fn answer_b_dist(
                &self,
                u: &F2Vector,
                q: &Bb84Question,
            ) -> Result<Vec<(f64, F2Vector)>> {
                Ok(vec![(1.0, target_bits(u, &q.theta, q.b))])
            }

            fn answer_c_dist(
                &self,
                u: &F2Vector,
                q: &Bb84Question,
            ) -> Result<Vec<(f64, F2Vector)>> {
                Ok(vec![(1.0, target_bits(u, &q.theta, q.b))])
            }
        }
    };
}

classical_bb84_strategy!(
    Bb84Trivial,
    "trivial",
    |rng: &mut TrialRng| rng.gen(),
    |s: &StateVector| {
        let mut d: Vec<(f64, F2Vector)> = readout_dist(s, false)
            .into_iter()
            .map(|(p, u)| (0.5 * p, u))
            .collect();
        d.extend(readout_dist(s, true).into_iter().map(|(p, u)| (0.5 * p, u)));
        d
    }
);

classical_bb84_strategy!(
    MeasureComputational,
    "measure-computational",
    |_: &mut TrialRng| false,
    |s: &StateVector| { readout_dist(s, false) }
);

/// Projective measurements for every question `(theta, b)`, each with
/// `2^{n/2}` outcomes indexed by the packed answer string.
#[derive(Clone, Debug)]
pub struct Family {
    n: usize,
    dim: usize,
    ops: Vec<Vec<Matrix>>,
}

impl Family {
    pub fn new(n: usize, dim: usize, ops: Vec<Vec<Matrix>>) -> Result<Self> {
        let f = Self { n, dim, ops };
        f.validate()?;
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        1 << (self.n / 2)
    }

    pub fn ops(&self) -> &[Vec<Matrix>] {
        &self.ops
    }

    pub fn op(&self, question: usize, outcome: usize) -> &Matrix {
        &self.ops[question][outcome]
    }

    pub fn measurement(&self, question: usize) -> &[Matrix] {
        &self.ops[question]
    }

    /// Checks that every measurement is projective and complete.
    pub fn validate(&self) -> Result<()> {
        let nq = questions(self.n)?.len();
        if self.ops.len() != nq {
            return Err(Error::param(format!(
                "{} measurements, expected {nq}",
                self.ops.len()
            )));
        }
        let id = Matrix::identity(self.dim, self.dim);
        for (q, meas) in self.ops.iter().enumerate() {
            if meas.len() != self.outcomes() {
                return Err(Error::param(format!(
                    "question {q}: {} outcomes, expected {}",
                    meas.len(),
                    self.outcomes()
                )));
            }
            let mut sum = Matrix::zeros(self.dim, self.dim);
            for p in meas {
                if p.nrows() != self.dim || p.ncols() != self.dim || !is_projector(p, FINITE_TOL) {
                    return Err(Error::param(format!(
                        "question {q}: operator is not a {0}x{0} projector",
                        self.dim
                    )));
                }
                sum += p;
            }
            if max_abs(&(sum - &id)) > FINITE_TOL {
                return Err(Error::param(format!(
                    "question {q}: projectors do not sum to the identity"
                )));
            }
        }
        Ok(())
    }

    /// Random projective measurements: a Haar basis per question with each
    /// basis vector assigned to a uniformly random outcome.
    pub fn random<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<Self> {
        let k = 1usize << (n / 2);
        let ops = questions(n)?
            .iter()
            .map(|_| {
                let u = random_unitary(dim, rng);
                let mut meas = vec![Matrix::zeros(dim, dim); k];
                for j in 0..dim {
                    let c = u.column(j);
                    meas[rng.gen_range(0..k)] += c * c.adjoint();
                }
                meas
            })
            .collect();
        Self::new(n, dim, ops)
    }

    /// Measurements that are diagonal in the standard basis of the ancilla:
    /// basis state `j` is assigned to outcome `label(question, j)`.
    pub fn diagonal(
        n: usize,
        dim: usize,
        label: impl Fn(&F2Vector, bool, usize) -> F2Vector,
    ) -> Result<Self> {
        let k = 1usize << (n / 2);
        let ops = questions(n)?
            .iter()
            .map(|(theta, b)| {
                let mut meas = vec![Matrix::zeros(dim, dim); k];
                for j in 0..dim {
                    meas[label(theta, *b, j).bits() as usize][(j, j)] = C64::new(1.0, 0.0);
                }
                meas
            })
            .collect();
        Self::new(n, dim, ops)
    }
}

/// `<psi| B (x) C |psi>` for `psi` on `C^{d_b} (x) C^{d_c}`.
pub fn local_expectation(psi: &Vector, b: &Matrix, c: &Matrix) -> f64 {
    let (db, dc) = (b.nrows(), c.nrows());
    let m = Matrix::from_fn(db, dc, |i, j| psi[i * dc + j]);
    let bmc = b * &m * c.transpose();
    m.iter()
        .zip(bmc.iter())
        .map(|(a, z)| (a.conj() * z).re)
        .sum()
}

/// An explicit strategy: Alice applies an isometry `V: C^{2^n} -> C^{d_b} (x) C^{d_c}`,
/// and the players measure with projective families.
#[derive(Clone, Debug)]
pub struct FiniteStrategy {
    n: usize,
    isometry: Matrix,
    bob: Family,
    charlie: Family,
}

impl FiniteStrategy {
    pub fn new(isometry: Matrix, bob: Family, charlie: Family) -> Result<Self> {
        let n = bob.n;
        check_even(n)?;
        if n > MAX_FINITE_N {
            return Err(Error::capacity(format!(
                "finite strategies are limited to n <= {MAX_FINITE_N}"
            )));
        }
        if charlie.n != n {
            return Err(Error::param("Bob and Charlie measure different game sizes"));
        }
        if isometry.ncols() != 1 << n || isometry.nrows() != bob.dim * charlie.dim {
            return Err(Error::param(format!(
                "isometry is {}x{}, expected {}x{}",
                isometry.nrows(),
                isometry.ncols(),
                bob.dim * charlie.dim,
                1 << n
            )));
        }
        let gram = isometry.adjoint() * &isometry;
        if max_abs(&(gram - Matrix::identity(1 << n, 1 << n))) > FINITE_TOL {
            return Err(Error::param("isometry columns are not orthonormal"));
        }
        Ok(Self {
            n,
            isometry,
            bob,
            charlie,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn isometry(&self) -> &Matrix {
        &self.isometry
    }

    pub fn bob(&self) -> &Family {
        &self.bob
    }

    pub fn charlie(&self) -> &Family {
        &self.charlie
    }

    /// Haar-random isometry with random projective families.
    pub fn random<R: Rng + ?Sized>(n: usize, d_b: usize, d_c: usize, rng: &mut R) -> Result<Self> {
        check_even(n)?;
        let v = random_isometry(1 << n, d_b * d_c, rng)?;
        let bob = Family::random(n, d_b, rng)?;
        let charlie = Family::random(n, d_c, rng)?;
        Self::new(v, bob, charlie)
    }

    /// Alice copies the computational-basis value to both players:
    /// `V|x> = |x>|x>`. Both answer `x_{T_b}`.
    pub fn measure_computational(n: usize) -> Result<Self> {
        check_even(n)?;
        let d = 1usize << n;
        let mut v = Matrix::zeros(d * d, d);
        for x in 0..d {
            v[(x * d + x, x)] = C64::new(1.0, 0.0);
        }
        let fam = Family::diagonal(n, d, |theta, b, j| {
            target_bits(&F2Vector::from_bits(n, j as u64).expect("fits"), theta, b)
        })?;
        Self::new(v, fam.clone(), fam)
    }

    /// The trivial strategy with its coin purified: both players hold a copy
    /// of `|b*>|x>`, where `x` is the outcome of measuring in basis `b*`.
    pub fn trivial(n: usize) -> Result<Self> {
        check_even(n)?;
        let d = 1usize << n;
        let dd = 2 * d;
        let mut v = Matrix::zeros(dd * dd, d);
        let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for coin in 0..2usize {
            let hmask = if coin == 1 {
                F2Vector::zero(n)?.not()
            } else {
                F2Vector::zero(n)?
            };
            for x in 0..d {
                // column z gets <x^{coin}|z>
                let bra = StateVector::bb84_state(&F2Vector::from_bits(n, x as u64)?, &hmask)?;
                let row = (coin * d + x) * dd + (coin * d + x);
                for z in 0..d {
                    v[(row, z)] += amp * bra.amplitudes()[z].conj();
                }
            }
        }
        let fam = Family::diagonal(n, dd, |theta, b, j| {
            target_bits(
                &F2Vector::from_bits(n, (j % d) as u64).expect("fits"),
                theta,
                b,
            )
        })?;
        Self::new(v, fam.clone(), fam)
    }

    /// Exact winning probability in the identical-basis BB84 game.
    pub fn win_probability(&self) -> Result<f64> {
        let qs = questions(self.n)?;
        let mut total = 0.0;
        for (qi, (theta, b)) in qs.iter().enumerate() {
            for xb in 0..1u64 << self.n {
                let x = F2Vector::from_bits(self.n, xb)?;
                let psi = &self.isometry * StateVector::bb84_state(&x, theta)?.to_vector();
                let y = target_bits(&x, theta, *b).bits() as usize;
                total += local_expectation(&psi, self.bob.op(qi, y), self.charlie.op(qi, y));
            }
        }
        Ok(total / (qs.len() as f64 * (1u64 << self.n) as f64))
    }
}

/// Applies `op` to factor `k` of a vector on `dims[0] (x) dims[1] (x) ...`.
pub fn apply_local(psi: &Vector, dims: &[usize], k: usize, op: &Matrix) -> Vector {
    let left: usize = dims[..k].iter().product();
    let d = dims[k];
    let right: usize = dims[k + 1..].iter().product();
    let mut out = Vector::zeros(psi.len());
    for l in 0..left {
        for r in 0..right {
            for i in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..d {
                    let a = op[(i, j)];
                    if a != C64::new(0.0, 0.0) {
                        acc += a * psi[(l * d + j) * right + r];
                    }
                }
                out[(l * d + i) * right + r] = acc;
            }
        }
    }
    out
}

/// A multipartite pure state held jointly by several parties. Each party
/// only ever applies operators on its own tensor factor.
#[derive(Debug)]
pub struct SharedState {
    psi: Vector,
    dims: Vec<usize>,
}

/// One party's handle on a [`SharedState`].
#[derive(Clone, Debug)]
pub struct SharedFactor {
    state: Arc<Mutex<SharedState>>,
    factor: usize,
}

impl SharedState {
    pub fn split(psi: Vector, dims: Vec<usize>) -> Vec<SharedFactor> {
        let k = dims.len();
        let state = Arc::new(Mutex::new(SharedState { psi, dims }));
        (0..k)
            .map(|factor| SharedFactor {
                state: state.clone(),
                factor,
            })
            .collect()
    }
}

impl SharedFactor {
    /// Measures this factor with a complete projective measurement and
    /// returns the outcome index.
    pub fn measure<R: Rng + ?Sized>(&self, meas: &[Matrix], rng: &mut R) -> Result<usize> {
        let mut st = self
            .state
            .lock()
            .map_err(|_| Error::state("shared state poisoned"))?;
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = None;
        for (i, p) in meas.iter().enumerate() {
            let phi = apply_local(&st.psi, &st.dims, self.factor, p);
            let w = phi.norm_squared();
            if w <= 0.0 {
                continue;
            }
            acc += w;
            last = Some((i, phi, w));
            if r < acc {
                break;
            }
        }
        let (i, phi, w) = last.ok_or_else(|| Error::state("measurement annihilated the state"))?;
        st.psi = phi / C64::new(w.sqrt(), 0.0);
        Ok(i)
    }
}

fn outcome_string(n: usize, y: usize) -> Result<F2Vector> {
    F2Vector::from_bits(n / 2, y as u64)
}

impl Strategy<Bb84Identical> for FiniteStrategy {
    type ShareB = SharedFactor;
    type ShareC = SharedFactor;

    fn name(&self) -> String {
        "finite".into()
    }

    fn split(
        &self,
        _: &(),
        state: StateVector,
        _: &mut TrialRng,
    ) -> Result<Split<SharedFactor, SharedFactor, ()>> {
        let psi = &self.isometry * state.to_vector();
        let mut parts = SharedState::split(psi, vec![self.bob.dim, self.charlie.dim]).into_iter();
        let (b, c) = (
            parts.next().expect("two factors"),
            parts.next().expect("two factors"),
        );
        Ok(Split::new(b, c))
    }

    fn answer_b(
        &self,
        share: SharedFactor,
        q: &Bb84Question,
        rng: &mut TrialRng,
    ) -> Result<F2Vector> {
        let qi = question_index(self.n, &q.theta, q.b)?;
        outcome_string(self.n, share.measure(self.bob.measurement(qi), rng)?)
    }

    fn answer_c(
        &self,
        share: SharedFactor,
        q: &Bb84Question,
        rng: &mut TrialRng,
    ) -> Result<F2Vector> {
        let qi = question_index(self.n, &q.theta, q.b)?;
        outcome_string(self.n, share.measure(self.charlie.measurement(qi), rng)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::exact_win_probability;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_closed_form() {
        for n in [2, 4] {
            let g = Bb84Identical::new(n).unwrap();
            let p = exact_win_probability(&g, &Bb84Trivial).unwrap();
            assert!((p - trivial_value(n)).abs() < 1e-12, "n = {n}: {p}");
            let q = exact_win_probability(&g, &MeasureComputational).unwrap();
            assert!((q - trivial_value(n)).abs() < 1e-12, "n = {n}: {q}");
        }
    }

    #[test]
    fn finite_versions_match_the_classical_strategies() {
        for n in [2, 4] {
            let t = FiniteStrategy::trivial(n)
                .unwrap()
                .win_probability()
                .unwrap();
            let m = FiniteStrategy::measure_computational(n)
                .unwrap()
                .win_probability()
                .unwrap();
            assert!((t - trivial_value(n)).abs() < 1e-12);
            assert!((m - trivial_value(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn random_families_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Family::random(4, 3, &mut rng).unwrap();
        assert_eq!(f.ops().len(), 12);
        assert!(f.validate().is_ok());
    }

    #[test]
    fn question_indexing() {
        let qs = questions(4).unwrap();
        for (i, (t, b)) in qs.iter().enumerate() {
            assert_eq!(question_index(4, t, *b).unwrap(), i);
        }
        assert!(question_index(4, &"1110".parse().unwrap(), false).is_err());
    }

    #[test]
    fn apply_local_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary(3, &mut rng);
        let psi = random_isometry(1, 12, &mut rng)
            .unwrap()
            .column(0)
            .into_owned();
        let dims = [2, 3, 2];
        let full = crate::qsim::kron(
            &crate::qsim::kron(&Matrix::identity(2, 2), &u),
            &Matrix::identity(2, 2),
        );
        let diff = apply_local(&psi, &dims, 1, &u) - full * &psi;
        assert!(diff.norm() < 1e-12);
    }
}
