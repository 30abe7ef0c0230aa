//! Extended non-local game: the players prepare a tripartite state, hand
//! register 0 to the challenger, who measures it in a random basis
//! `theta in Theta_n`, and both players must output the result on `T_b`.

use rand::Rng;

use super::bb84::{
    local_expectation, question_index, questions, target_bits, Bb84Question, Family,
    FiniteStrategy, SharedFactor, SharedState, FINITE_TOL, MAX_FINITE_N,
};
use super::coset::check_even;
use super::{Challenge, Game, Split, Strategy, TrialRng};
use crate::error::{Error, Result};
use crate::gf2::{sample_balanced, F2Vector};
use crate::qsim::{Matrix, StateVector, Vector, C64};

/// A pure state on `C^{2^n} (x) C^{d_b} (x) C^{d_c}` with measurement families
/// for Bob and Charlie.
#[derive(Clone, Debug)]
pub struct EnlStrategy {
    n: usize,
    state: Vector,
    bob: Family,
    charlie: Family,
}

impl EnlStrategy {
    pub fn new(state: Vector, bob: Family, charlie: Family) -> Result<Self> {
        let n = bob.n();
        check_even(n)?;
        if n > MAX_FINITE_N || charlie.n() != n {
            return Err(Error::param(
                "families must describe the same game of size at most MAX_FINITE_N",
            ));
        }
        let dim = (1usize << n) * bob.dim() * charlie.dim();
        if state.len() != dim {
            return Err(Error::param(format!(
                "state of dimension {}, expected {dim}",
                state.len()
            )));
        }
        if (state.norm_squared() - 1.0).abs() > FINITE_TOL {
            return Err(Error::param("state is not normalised"));
        }
        Ok(Self {
            n,
            state,
            bob,
            charlie,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> &Vector {
        &self.state
    }

    pub fn bob(&self) -> &Family {
        &self.bob
    }

    pub fn charlie(&self) -> &Family {
        &self.charlie
    }

    pub fn dims(&self) -> [usize; 3] {
        [1 << self.n, self.bob.dim(), self.charlie.dim()]
    }

    /// `(<x^theta| (x) I (x) I) |psi>`.
    fn branch(&self, x: &F2Vector, theta: &F2Vector) -> Result<Vector> {
        let ket = StateVector::bb84_state(x, theta)?;
        let d0 = 1usize << self.n;
        let rest = self.bob.dim() * self.charlie.dim();
        let mut out = Vector::zeros(rest);
        for (z, a) in ket.amplitudes().iter().enumerate() {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..rest {
                out[r] += a.conj() * self.state[z * rest + r];
            }
        }
        debug_assert_eq!(d0 * rest, self.state.len());
        Ok(out)
    }

    /// Exact winning probability: the average over `(theta, b)` of
    /// `sum_x <psi| |x^theta><x^theta| (x) B_{x_T} (x) C_{x_T} |psi>`.
    pub fn win_probability(&self) -> Result<f64> {
        let qs = questions(self.n)?;
        let mut total = 0.0;
        for (qi, (theta, b)) in qs.iter().enumerate() {
            for xb in 0..1u64 << self.n {
                let x = F2Vector::from_bits(self.n, xb)?;
                let phi = self.branch(&x, theta)?;
                let y = target_bits(&x, theta, *b).bits() as usize;
                total += local_expectation(&phi, self.bob.op(qi, y), self.charlie.op(qi, y));
            }
        }
        Ok(total / qs.len() as f64)
    }
}

/// Builds the extended strategy from a BB84 strategy: the players share
/// `2^{-n/2} sum_z |z> (x) V|z>`, so that measuring register 0 in basis
/// `theta` with outcome `x` leaves `V|x^theta>` (the BB84 states are real).
pub fn lift_to_extended(s: &FiniteStrategy) -> Result<EnlStrategy> {
    let n = s.n();
    let d0 = 1usize << n;
    let rest = s.bob().dim() * s.charlie().dim();
    let dim = d0
        .checked_mul(rest)
        .filter(|&d| d <= 1 << 16)
        .ok_or_else(|| {
            Error::capacity(format!(
                "lifted state of dimension {d0} x {rest} is too large"
            ))
        })?;
    let v = s.isometry();
    let norm = C64::new((d0 as f64).sqrt().recip(), 0.0);
    let mut psi = Vector::zeros(dim);
    for z in 0..d0 {
        for r in 0..rest {
            psi[z * rest + r] = norm * v[(r, z)];
        }
    }
    EnlStrategy::new(psi, s.bob().clone(), s.charlie().clone())
}

/// `Pi_{theta,b} = sum_x |x^theta><x^theta| (x) B_{x_T} (x) C_{x_T}` on
/// register 0, Bob and Charlie.
pub fn game_operator(
    n: usize,
    bob: &Family,
    charlie: &Family,
    theta: &F2Vector,
    b: bool,
) -> Result<Matrix> {
    let qi = question_index(n, theta, b)?;
    let d0 = 1usize << n;
    let (db, dc) = (bob.dim(), charlie.dim());
    let dim = d0 * db * dc;
    let mut pi = Matrix::zeros(dim, dim);
    for xb in 0..d0 as u64 {
        let x = F2Vector::from_bits(n, xb)?;
        let ket = StateVector::bb84_state(&x, theta)?.to_vector();
        let y = target_bits(&x, theta, b).bits() as usize;
        let bc = bob.op(qi, y).kronecker(charlie.op(qi, y));
        pi += (&ket * ket.adjoint()).kronecker(&bc);
    }
    Ok(pi)
}

/// The challenger's view: the register it measured and the target string.
#[derive(Clone, Debug)]
pub struct EnlHidden {
    pub target: F2Vector,
}

/// Register 0 as handed to the challenger.
#[derive(Default)]
pub struct ChallengerRegister(Option<SharedFactor>);

/// The extended non-local game as a harness game. Alice's role is played by
/// the preparation of the tripartite state.
#[derive(Clone, Copy, Debug)]
pub struct Enl {
    n: usize,
}

impl Enl {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(Self { n })
    }
}

impl Game for Enl {
    type Prelude = ();
    type Secret = ();
    type AliceInput = ();
    type ToChallenger = ChallengerRegister;
    type Hidden = EnlHidden;
    type Question = Bb84Question;
    type Answer = F2Vector;

    fn name(&self) -> String {
        "enl".into()
    }

    fn identical(&self) -> bool {
        true
    }

    fn setup(&self, _: &(), _: &mut TrialRng) -> Result<((), ())> {
        Ok(((), ()))
    }

    fn challenge(
        &self,
        _: &(),
        reg: &ChallengerRegister,
        rng: &mut TrialRng,
    ) -> Result<Challenge<EnlHidden, Bb84Question>> {
        let reg = reg
            .0
            .as_ref()
            .ok_or_else(|| Error::strategy("register 0 was not handed over"))?;
        let theta = sample_balanced(self.n, rng)?;
        let b: bool = rng.gen();
        let meas = (0..1u64 << self.n)
            .map(|xb| {
                let ket =
                    StateVector::bb84_state(&F2Vector::from_bits(self.n, xb)?, &theta)?.to_vector();
                Ok(&ket * ket.adjoint())
            })
            .collect::<Result<Vec<Matrix>>>()?;
        let x = F2Vector::from_bits(self.n, reg.measure(&meas, rng)? as u64)?;
        let q = Bb84Question { theta, b };
        Ok(Challenge {
            hidden: EnlHidden {
                target: target_bits(&x, &theta, b),
            },
            to_bob: q.clone(),
            to_charlie: q,
        })
    }

    fn judge(&self, _: &(), h: &EnlHidden, y1: &F2Vector, y2: &F2Vector) -> Result<bool> {
        for y in [y1, y2] {
            if y.len() != self.n / 2 {
                return Err(Error::strategy(format!(
                    "answer of length {}, expected {}",
                    y.len(),
                    self.n / 2
                )));
            }
        }
        Ok(*y1 == h.target && *y2 == h.target)
    }
}

impl Strategy<Enl> for EnlStrategy {
    type ShareB = SharedFactor;
    type ShareC = SharedFactor;

    fn name(&self) -> String {
        "finite".into()
    }

    fn split(
        &self,
        _: &(),
        _: (),
        _: &mut TrialRng,
    ) -> Result<Split<SharedFactor, SharedFactor, ChallengerRegister>> {
        let mut parts = SharedState::split(self.state.clone(), self.dims().to_vec()).into_iter();
        let (r0, b, c) = (parts.next(), parts.next(), parts.next());
        match (r0, b, c) {
            (Some(r0), Some(b), Some(c)) => Ok(Split {
                bob: b,
                charlie: c,
                to_challenger: ChallengerRegister(Some(r0)),
            }),
            _ => Err(Error::state("tripartite split failed")),
        }
    }

    fn answer_b(
        &self,
        share: SharedFactor,
        q: &Bb84Question,
        rng: &mut TrialRng,
    ) -> Result<F2Vector> {
        let qi = question_index(self.n, &q.theta, q.b)?;
        F2Vector::from_bits(
            self.n / 2,
            share.measure(self.bob.measurement(qi), rng)? as u64,
        )
    }

    fn answer_c(
        &self,
        share: SharedFactor,
        q: &Bb84Question,
        rng: &mut TrialRng,
    ) -> Result<F2Vector> {
        let qi = question_index(self.n, &q.theta, q.b)?;
        F2Vector::from_bits(
            self.n / 2,
            share.measure(self.charlie.measurement(qi), rng)? as u64,
        )
    }
}

/// `Tr(Pi rho)` for a pure state.
pub fn expectation(op: &Matrix, psi: &Vector) -> f64 {
    psi.dotc(&(op * psi)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::bb84::trivial_value;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lift_preserves_value_for_random_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let s = FiniteStrategy::random(2, 2, 3, &mut rng).unwrap();
            let p = s.win_probability().unwrap();
            let q = lift_to_extended(&s).unwrap().win_probability().unwrap();
            assert!((p - q).abs() < 1e-9, "{p} vs {q}");
        }
    }

    #[test]
    fn lifted_trivial_value() {
        let e = lift_to_extended(&FiniteStrategy::trivial(2).unwrap()).unwrap();
        assert!((e.win_probability().unwrap() - trivial_value(2)).abs() < 1e-12);
    }

    #[test]
    fn operator_formulation_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = FiniteStrategy::random(2, 2, 2, &mut rng).unwrap();
        let e = lift_to_extended(&s).unwrap();
        let qs = questions(2).unwrap();
        let avg: f64 = qs
            .iter()
            .map(|(t, b)| {
                expectation(
                    &game_operator(2, e.bob(), e.charlie(), t, *b).unwrap(),
                    e.state(),
                )
            })
            .sum::<f64>()
            / qs.len() as f64;
        assert!((avg - e.win_probability().unwrap()).abs() < 1e-12);
    }
}
