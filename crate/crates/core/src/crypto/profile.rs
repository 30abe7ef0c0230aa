//! Length profiles for the copy-protected PRF family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::DEFAULT_QUBIT_LIMIT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// Small enough to simulate; cryptographic length constraints are waived.
    Desk,
    /// Enforces every length constraint; too large to simulate.
    Crypto,
}

/// Input `x = x0 || x1 || x2` with `|x_j| = l_j`; `l0` coset registers of
/// `coset_n` qubits each; outputs of `m` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LengthProfile {
    pub kind: ProfileKind,
    pub lambda: usize,
    pub l0: usize,
    pub l1: usize,
    pub l2: usize,
    pub coset_n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
    /// Functional constraints are enforced in every profile.
    pub functional: bool,
}

/// Bits taken by the encoded trigger program for this shape.
pub fn trigger_payload_bits(l0: usize, coset_n: usize, m: usize) -> usize {
    let word = coset_n.div_ceil(8);
    let coset = 1 + 2 + (coset_n / 2 + 1) * word;
    let bytes = 5 + 1 + 2 + l0 * coset + 4 + m.div_ceil(8);
    bytes * 8
}

impl LengthProfile {
    pub fn desk() -> Self {
        Self {
            kind: ProfileKind::Desk,
            lambda: 16,
            l0: 2,
            l1: 64,
            l2: 256,
            coset_n: 4,
            m: 32,
        }
    }

    /// Smallest profile meeting every constraint at security parameter `lambda`.
    pub fn crypto(lambda: usize) -> Self {
        let (l0, coset_n, m) = (lambda, lambda, lambda);
        let l2 = l0 + trigger_payload_bits(l0, coset_n, m) + lambda;
        let l1 = 2 * l2 + lambda;
        Self {
            kind: ProfileKind::Crypto,
            lambda,
            l0,
            l1,
            l2,
            coset_n,
            m,
        }
    }

    pub fn input_bits(&self) -> usize {
        self.l0 + self.l1 + self.l2
    }

    pub fn constraints(&self) -> Vec<ConstraintCheck> {
        let payload = trigger_payload_bits(self.l0, self.coset_n, self.m);
        let c = |name, lhs: usize, rhs: usize, functional| ConstraintCheck {
            name,
            lhs,
            rhs,
            holds: lhs >= rhs,
            functional,
        };
        vec![
            c(
                "n >= m + 2*lambda + 4",
                self.input_bits(),
                self.m + 2 * self.lambda + 4,
                false,
            ),
            c(
                "l1 >= 2*l2 + lambda",
                self.l1,
                2 * self.l2 + self.lambda,
                false,
            ),
            c(
                "l2 - l0 >= lambda",
                self.l2.saturating_sub(self.l0),
                self.lambda,
                false,
            ),
            c("coset_n >= lambda", self.coset_n, self.lambda, false),
            c(
                "l2 - l0 >= trigger payload",
                self.l2.saturating_sub(self.l0),
                payload,
                true,
            ),
            c("l0 >= 1", self.l0, 1, true),
            c("coset_n even", 1 - self.coset_n % 2, 1, true),
        ]
    }

    /// Checks the profile; returns the constraints waived by a desk profile.
    pub fn validate(&self) -> Result<Vec<ConstraintCheck>> {
        let checks = self.constraints();
        let mut waived = Vec::new();
        for ch in checks {
            if ch.holds {
                continue;
            }
            if ch.functional || self.kind == ProfileKind::Crypto {
                return Err(Error::param(format!(
                    "length profile violates {} ({} < {})",
                    ch.name, ch.lhs, ch.rhs
                )));
            }
            waived.push(ch);
        }
        for w in &waived {
            log::info!("desk profile waives {} ({} < {})", w.name, w.lhs, w.rhs);
        }
        Ok(waived)
    }

    /// Validates and additionally requires the coset registers to be simulable.
    pub fn validate_simulable(&self) -> Result<Vec<ConstraintCheck>> {
        let waived = self.validate()?;
        if self.coset_n > DEFAULT_QUBIT_LIMIT || self.coset_n == 0 {
            return Err(Error::capacity(format!(
                "coset registers of {} qubits cannot be simulated",
                self.coset_n
            )));
        }
        Ok(waived)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_waives_only_cryptographic_constraints() {
        let waived = LengthProfile::desk().validate_simulable().unwrap();
        let names: Vec<_> = waived.iter().map(|w| w.name).collect();
        assert_eq!(names, vec!["l1 >= 2*l2 + lambda", "coset_n >= lambda"]);
    }

    #[test]
    fn crypto_profile_meets_everything() {
        let p = LengthProfile::crypto(128);
        assert!(p.constraints().iter().all(|c| c.holds));
        assert!(p.validate().unwrap().is_empty());
        assert!(matches!(p.validate_simulable(), Err(Error::Capacity(_))));
    }

    #[test]
    fn crypto_profile_rejects_short_l1() {
        let mut p = LengthProfile::crypto(128);
        p.l1 -= 1;
        assert!(p.validate().is_err());
    }
}
