//! Secret descriptions `(A, s, s')` of coset states.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{sample_subspace, Coset, F2Subspace, F2Vector};
use crate::qsim::StateVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetKey {
    space: F2Subspace,
    s: F2Vector,
    s_prime: F2Vector,
}

impl CosetKey {
    pub fn new(space: F2Subspace, s: F2Vector, s_prime: F2Vector) -> Result<Self> {
        let n = space.ambient_dim();
        if s.len() != n || s_prime.len() != n {
            return Err(Error::param(
                "coset shifts must match the ambient dimension",
            ));
        }
        Ok(Self { space, s, s_prime })
    }

    /// Uniform `A` of dimension `n/2` and uniform shifts.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let space = sample_subspace(n, n / 2, rng)?;
        let s = F2Vector::random(n, rng)?;
        let s_prime = F2Vector::random(n, rng)?;
        Ok(Self { space, s, s_prime })
    }

    pub fn n(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn space(&self) -> &F2Subspace {
        &self.space
    }

    pub fn s(&self) -> &F2Vector {
        &self.s
    }

    pub fn s_prime(&self) -> &F2Vector {
        &self.s_prime
    }

    /// `A + s`.
    pub fn primal(&self) -> Coset {
        Coset::new(self.space.clone(), &self.s).expect("lengths checked at construction")
    }

    /// `A^perp + s'`.
    pub fn dual(&self) -> Coset {
        Coset::new(self.space.dual(), &self.s_prime).expect("lengths checked at construction")
    }

    /// `primal()` for `b = 0`, `dual()` for `b = 1`.
    pub fn coset(&self, b: bool) -> Coset {
        if b {
            self.dual()
        } else {
            self.primal()
        }
    }

    pub fn state(&self) -> Result<StateVector> {
        StateVector::coset_state(&self.space, &self.s, &self.s_prime)
    }
}
