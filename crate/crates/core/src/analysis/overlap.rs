//! Game projectors `Pi_{theta,b}` and numerical checks of the operator-norm
//! inequalities behind the identical-basis bound.

use std::collections::HashMap;

use super::family::{build_base_family, lift_family, PermutationFamily};
use crate::error::{Error, Result};
use crate::games::bb84::{question_index, questions, target_bits, targets, Family};
use crate::games::enl;
use crate::gf2::F2Vector;
use crate::qsim::{
    hermitian_eigen, is_projector, max_abs, operator_norm, Matrix, StateVector, Vector,
};

/// Tolerance for projector checks and for the inequalities.
pub const CHECK_TOL: f64 = 1e-9;

/// `R`, `T`, `T'` and `S` for a pair of bases and the bit `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisOverlap {
    /// `{i : theta_i != theta'_i}`
    pub r: Vec<usize>,
    /// `{i : theta_i = b}`
    pub t: Vec<usize>,
    /// `{i : theta'_i = 1 - b}`
    pub t_prime: Vec<usize>,
    /// `{i in R : theta_i = b, theta'_i = 1 - b}`
    pub s: Vec<usize>,
}

impl BasisOverlap {
    pub fn new(theta: &F2Vector, theta_p: &F2Vector, b: bool) -> Result<Self> {
        if theta.len() != theta_p.len() {
            return Err(Error::param("bases of different lengths"));
        }
        let n = theta.len();
        let r: Vec<usize> = (0..n).filter(|&i| theta.get(i) != theta_p.get(i)).collect();
        let s = r
            .iter()
            .copied()
            .filter(|&i| theta.get(i) == b && theta_p.get(i) != b)
            .collect();
        Ok(Self {
            t: targets(theta, b),
            t_prime: targets(theta_p, !b),
            r,
            s,
        })
    }
}

/// `Pi_{theta,b} = sum_x |x^theta><x^theta| (x) B_{x_T} (x) C_{x_T}`.
#[derive(Clone, Debug)]
pub struct GameOperator {
    pub theta: F2Vector,
    pub b: bool,
    pub projector: Matrix,
    /// Orthonormal basis of the range of `projector`, as columns.
    pub range: Matrix,
}

fn range_basis(p: &Matrix) -> Result<Vec<Vector>> {
    let (vals, vecs) = hermitian_eigen(p)?;
    let rank = vals.iter().take_while(|&&v| v > 0.5).count();
    Ok((0..rank).map(|k| vecs.column(k).into_owned()).collect())
}

/// The range of `Pi_{theta,b}` is spanned by `|x^theta> (x) u (x) v` with `u`
/// and `v` running over range bases of `B_{x_T}` and `C_{x_T}`.
pub fn game_operator(
    bob: &Family,
    charlie: &Family,
    theta: &F2Vector,
    b: bool,
) -> Result<GameOperator> {
    let n = bob.n();
    if charlie.n() != n {
        return Err(Error::param(
            "Bob and Charlie answer games of different sizes",
        ));
    }
    let projector = enl::game_operator(n, bob, charlie, theta, b)?;
    let qi = question_index(n, theta, b)?;
    let mut cols = Vec::new();
    for xb in 0..1u64 << n {
        let x = F2Vector::from_bits(n, xb)?;
        let ket = StateVector::bb84_state(&x, theta)?.to_vector();
        let y = target_bits(&x, theta, b).bits() as usize;
        let rc = range_basis(charlie.op(qi, y))?;
        for u in range_basis(bob.op(qi, y))? {
            let ku = ket.kronecker(&u);
            cols.extend(rc.iter().map(|v| ku.kronecker(v)));
        }
    }
    let dim = projector.nrows();
    let range = if cols.is_empty() {
        Matrix::zeros(dim, 0)
    } else {
        Matrix::from_columns(&cols)
    };
    let gram = range.adjoint() * &range - Matrix::identity(cols.len(), cols.len());
    if max_abs(&gram) > CHECK_TOL || max_abs(&(&range * range.adjoint() - &projector)) > CHECK_TOL {
        return Err(Error::param(format!(
            "Pi for theta = {theta}, b = {} is not a projector",
            b as u8
        )));
    }
    Ok(GameOperator {
        theta: *theta,
        b,
        projector,
        range,
    })
}

/// Every `Pi_{theta,b}`, in question order.
pub fn game_operators(bob: &Family, charlie: &Family) -> Result<Vec<GameOperator>> {
    questions(bob.n())?
        .iter()
        .map(|(t, b)| game_operator(bob, charlie, t, *b))
        .collect()
}

#[derive(Clone, Debug)]
pub struct OverlapCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// Whether `theta` and `theta'` were swapped to make `|S| >= |R|/2`.
    pub swapped: bool,
    /// The sets in the orientation the bound is stated for.
    pub sets: BasisOverlap,
}

/// `||Pi_{theta,b} Pi_{theta',b'}||` against `2^{-|R|/4}` when `b' = 1 - b`
/// and against 1 when `b' = b`.
pub fn check_overlap_ops(p: &GameOperator, q: &GameOperator) -> Result<OverlapCheck> {
    // PQ = V_P (V_P^* V_Q) V_Q^* with isometries V_P, V_Q
    let lhs = operator_norm(&(p.range.adjoint() * &q.range))?;
    let mut sets = BasisOverlap::new(&p.theta, &q.theta, p.b)?;
    let mut swapped = false;
    let rhs = if p.b == q.b {
        1.0
    } else {
        if 2 * sets.s.len() < sets.r.len() {
            sets = BasisOverlap::new(&q.theta, &p.theta, q.b)?;
            swapped = true;
        }
        2f64.powf(-(sets.r.len() as f64) / 4.0)
    };
    Ok(OverlapCheck {
        lhs,
        rhs,
        pass: lhs <= rhs + CHECK_TOL,
        swapped,
        sets,
    })
}

/// The check for `(theta, b)` against `(theta', 1 - b)`.
pub fn check_overlap_bound(
    bob: &Family,
    charlie: &Family,
    theta: &F2Vector,
    theta_p: &F2Vector,
    b: bool,
) -> Result<OverlapCheck> {
    let p = game_operator(bob, charlie, theta, b)?;
    let q = game_operator(bob, charlie, theta_p, !b)?;
    check_overlap_ops(&p, &q)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TfkwCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `||sum_i Pi_i||` against `sum_i max_j ||Pi_j Pi_{pi_i(j)}||`.
pub fn check_tfkw_lemma(projectors: &[Matrix], family: &PermutationFamily) -> Result<TfkwCheck> {
    let m = projectors.len();
    let dim = projectors.first().map_or(0, Matrix::nrows);
    for (i, p) in projectors.iter().enumerate() {
        if p.nrows() != dim || p.ncols() != dim || !is_projector(p, CHECK_TOL) {
            return Err(Error::param(format!(
                "operator {i} is not a {dim}x{dim} projector"
            )));
        }
    }
    if family.len() != m || family.domain().size()? != m {
        return Err(Error::param(format!(
            "{} permutations of a {}-element set for {m} projectors",
            family.len(),
            family.domain().size()?
        )));
    }
    if !family.is_bijective() || !family.is_mutually_orthogonal() {
        return Err(Error::param(
            "the family is not a set of mutually orthogonal permutations",
        ));
    }
    let mut sum = Matrix::zeros(dim, dim);
    for p in projectors {
        sum += p;
    }
    let lhs = operator_norm(&sum)?;
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut rhs = 0.0;
    for perm in family.perms() {
        let mut best = 0.0f64;
        for (j, &k) in perm.iter().enumerate() {
            let key = (j.min(k), j.max(k));
            let v = match cache.get(&key) {
                Some(&v) => v,
                None => {
                    let v = operator_norm(&(&projectors[j] * &projectors[k]))?;
                    cache.insert(key, v);
                    v
                }
            };
            best = best.max(v);
        }
        rhs += best;
    }
    Ok(TfkwCheck {
        lhs,
        rhs,
        pass: lhs <= rhs + CHECK_TOL,
    })
}

/// `||E_{theta,b} Pi_{theta,b}||` and its upper bound through the lifted
/// permutation family, both normalised by the number of questions.
pub fn check_step2(bob: &Family, charlie: &Family) -> Result<TfkwCheck> {
    let ops: Vec<Matrix> = game_operators(bob, charlie)?
        .into_iter()
        .map(|g| g.projector)
        .collect();
    let fam = lift_family(&build_base_family(bob.n())?)?;
    let c = check_tfkw_lemma(&ops, &fam)?;
    let q = ops.len() as f64;
    Ok(TfkwCheck {
        lhs: c.lhs / q,
        rhs: c.rhs / q,
        pass: c.pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::bb84::FiniteStrategy;
    use crate::qsim::{hermitian_eigen, random_unitary, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(s: &str) -> F2Vector {
        s.parse().unwrap()
    }

    #[test]
    fn basis_overlap_sets() {
        let o = BasisOverlap::new(&v("0110"), &v("1100"), true).unwrap();
        assert_eq!(o.r, vec![0, 2]);
        assert_eq!(o.t, vec![1, 2]);
        assert_eq!(o.t_prime, vec![2, 3]);
        assert_eq!(o.s, vec![2]);
    }

    #[test]
    fn same_basis_has_trivial_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = FiniteStrategy::random(2, 2, 2, &mut rng).unwrap();
        let c = check_overlap_bound(s.bob(), s.charlie(), &v("01"), &v("01"), false).unwrap();
        assert_eq!(c.rhs, 1.0);
        assert!(c.pass);
        let p = game_operator(s.bob(), s.charlie(), &v("01"), false).unwrap();
        let q = game_operator(s.bob(), s.charlie(), &v("10"), false).unwrap();
        assert_eq!(check_overlap_ops(&p, &q).unwrap().rhs, 1.0);
    }

    #[test]
    fn n2_conjugate_pair_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let s = FiniteStrategy::random(2, 2, 2, &mut rng).unwrap();
            for b in [false, true] {
                let c = check_overlap_bound(s.bob(), s.charlie(), &v("01"), &v("10"), b).unwrap();
                assert!(c.pass, "{c:?}");
                assert!((c.rhs - 2f64.powf(-0.5)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn range_route_matches_full_product_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = FiniteStrategy::random(2, 2, 3, &mut rng).unwrap();
        let ops = game_operators(s.bob(), s.charlie()).unwrap();
        for p in &ops {
            for q in &ops {
                let direct = operator_norm(&(&p.projector * &q.projector)).unwrap();
                let c = check_overlap_ops(p, q).unwrap();
                assert!((c.lhs - direct).abs() < 1e-10, "{} vs {direct}", c.lhs);
            }
        }
    }

    #[test]
    fn constant_answers_give_a_rank_projector() {
        let fam = Family::diagonal(2, 1, |_, _, _| F2Vector::zero(1).unwrap()).unwrap();
        let g = game_operator(&fam, &fam, &v("01"), false).unwrap();
        let tr: f64 = (0..4).map(|i| g.projector[(i, i)].re).sum();
        assert!((tr - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_is_sum_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = FiniteStrategy::random(2, 2, 3, &mut rng).unwrap();
        let theta = v("10");
        let g = game_operator(s.bob(), s.charlie(), &theta, true).unwrap();
        let qi = crate::games::bb84::question_index(2, &theta, true).unwrap();
        let rank = |m: &Matrix| (0..m.nrows()).map(|i| m[(i, i)].re).sum::<f64>().round() as usize;
        let expected: usize = (0..4u64)
            .map(|x| {
                let y =
                    target_bits(&F2Vector::from_bits(2, x).unwrap(), &theta, true).bits() as usize;
                rank(s.bob().op(qi, y)) * rank(s.charlie().op(qi, y))
            })
            .sum();
        assert_eq!(rank(&g.projector), expected);
    }

    fn rank_one(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let u = random_unitary(d, rng);
        let c: Vector = u.column(0).into_owned();
        &c * c.adjoint()
    }

    #[test]
    fn tfkw_random_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fam = PermutationFamily::cyclic(4);
        for _ in 0..100 {
            let ps: Vec<Matrix> = (0..4).map(|_| rank_one(8, &mut rng)).collect();
            let c = check_tfkw_lemma(&ps, &fam).unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn tfkw_orthogonal_projectors() {
        let ps: Vec<Matrix> = (0..3)
            .map(|i| {
                let mut m = Matrix::zeros(3, 3);
                m[(i, i)] = C64::new(1.0, 0.0);
                m
            })
            .collect();
        let c = check_tfkw_lemma(&ps, &PermutationFamily::cyclic(3)).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12 && (c.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tfkw_rejects_bad_inputs() {
        let not_proj = Matrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(check_tfkw_lemma(&[not_proj], &PermutationFamily::cyclic(1)).is_err());
        let id = Matrix::identity(2, 2);
        let repeated = PermutationFamily::new(
            super::super::family::Domain::Plain(2),
            vec![vec![0, 1], vec![0, 1]],
        )
        .unwrap();
        assert!(check_tfkw_lemma(&[id.clone(), id], &repeated).is_err());
    }

    #[test]
    fn step2_chain_on_game_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = FiniteStrategy::random(2, 2, 2, &mut rng).unwrap();
        let c = check_step2(s.bob(), s.charlie()).unwrap();
        assert!(c.pass, "{c:?}");
        // the top eigenvalue of the mean operator bounds the lifted strategy's value
        let e = enl::lift_to_extended(&s).unwrap();
        assert!(e.win_probability().unwrap() <= c.lhs + 1e-9);
        let mean = game_operators(s.bob(), s.charlie())
            .unwrap()
            .iter()
            .fold(Matrix::zeros(16, 16), |acc, g| acc + &g.projector)
            / C64::new(4.0, 0.0);
        let (vals, _) = hermitian_eigen(&mean).unwrap();
        assert!((vals[0] - c.lhs).abs() < 1e-9);
    }
}
