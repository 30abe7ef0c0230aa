use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coset_moe::coset::CosetKey;
use coset_moe::crypto::program::{params_for, Function, Input, Obfuscator, Program, TransparentIo};
use coset_moe::crypto::{BitString, PrfKey};
use coset_moe::games::bb84::{apply_local, Family, SharedState};
use coset_moe::games::{wilson_interval, DistributionKind, WinStats, Z_99};
use coset_moe::gf2::{coset_member, inner, sample_subspace, F2Subspace, F2Vector};
use coset_moe::qsim::{
    operator_norm, partial_trace, random_isometry, random_unitary, Matrix, StateVector, Vector, C64,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subspace(n: usize, seed: u64) -> F2Subspace {
    let mut r = rng(seed);
    let k = r.gen_range(0..=n);
    let gens: Vec<F2Vector> = (0..k)
        .map(|_| F2Vector::random(n, &mut r).unwrap())
        .collect();
    F2Subspace::span(n, &gens).unwrap()
}

fn all_vectors(n: usize) -> impl Iterator<Item = F2Vector> {
    (0..1u64 << n).map(move |b| F2Vector::from_bits(n, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_is_reduced_and_independent(n in 1usize..=10, seed in any::<u64>()) {
        let a = subspace(n, seed);
        let basis = a.basis();
        let pivots = a.pivots();
        prop_assert_eq!(basis.len(), pivots.len());
        for (i, &p) in pivots.iter().enumerate() {
            for (j, row) in basis.iter().enumerate() {
                prop_assert_eq!(row.get(p), i == j);
            }
        }
        prop_assert_eq!(a.size(), 1u64 << basis.len());
        prop_assert_eq!(a.elements().len() as u64, a.size());
    }

    #[test]
    fn dual_is_the_orthogonal_complement(n in 1usize..=10, seed in any::<u64>()) {
        let a = subspace(n, seed);
        let d = a.dual();
        prop_assert_eq!(a.dim() + d.dim(), n);
        for u in a.basis() {
            for v in d.basis() {
                prop_assert!(!inner(&u, &v));
            }
        }
        prop_assert_eq!(d.dual(), a);
    }

    #[test]
    fn canonical_rep_is_coset_minimum(n in 1usize..=8, seed in any::<u64>(), u in any::<u64>()) {
        let a = subspace(n, seed);
        let u = F2Vector::from_bits(n, u & ((1u64 << n) - 1)).unwrap();
        let rep = a.canonical_rep(&u);
        let coset: Vec<F2Vector> = a.elements().iter().map(|x| x.xor(&u)).collect();
        prop_assert_eq!(Some(&rep), coset.iter().min());
        for w in &coset {
            prop_assert_eq!(a.canonical_rep(w), rep);
        }
    }

    #[test]
    fn membership_matches_enumeration(n in 1usize..=8, seed in any::<u64>(), s in any::<u64>()) {
        let a = subspace(n, seed);
        let s = F2Vector::from_bits(n, s & ((1u64 << n) - 1)).unwrap();
        let coset: Vec<F2Vector> = a.elements().iter().map(|x| x.xor(&s)).collect();
        for v in all_vectors(n) {
            prop_assert_eq!(coset_member(&a, &s, &v), coset.contains(&v));
        }
    }

    #[test]
    fn sampled_subspaces_have_the_requested_dimension(h in 1usize..=6, seed in any::<u64>()) {
        let n = 2 * h;
        let mut r = rng(seed);
        let k = r.gen_range(0..=n);
        let a = sample_subspace(n, k, &mut r).unwrap();
        prop_assert_eq!(a.dim(), k);
        prop_assert_eq!(a.ambient_dim(), n);
    }

    #[test]
    fn coset_state_amplitudes(n in 1usize..=8, seed in any::<u64>()) {
        let a = subspace(n, seed);
        let mut r = rng(seed ^ 1);
        let s = F2Vector::random(n, &mut r).unwrap();
        let sp = F2Vector::random(n, &mut r).unwrap();
        let st = StateVector::coset_state(&a, &s, &sp).unwrap();
        let norm = 1.0 / (a.size() as f64).sqrt();
        for v in all_vectors(n) {
            let want = if coset_member(&a, &s, &v) {
                if inner(&v.xor(&s), &sp) { -norm } else { norm }
            } else {
                0.0
            };
            prop_assert!((st.amplitude(&v) - C64::new(want, 0.0)).norm() < 1e-12);
        }
        prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hadamard_is_an_involution(n in 1usize..=8, seed in any::<u64>(), mask in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_unitary(1 << n, &mut r);
        let st = StateVector::from_amplitudes(n, u.column(0).iter().copied().collect()).unwrap();
        let mask = F2Vector::from_bits(n, mask & ((1u64 << n) - 1)).unwrap();
        let mut h = st.clone();
        h.hadamard(&mask);
        prop_assert!((h.norm_sqr() - 1.0).abs() < 1e-12);
        h.hadamard(&mask);
        for (x, y) in h.amplitudes().iter().zip(st.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn born_probabilities_sum_to_one(n in 1usize..=6, seed in any::<u64>(), mask in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_unitary(1 << n, &mut r);
        let st = StateVector::from_amplitudes(n, u.column(0).iter().copied().collect()).unwrap();
        let mask = F2Vector::from_bits(n, mask & ((1u64 << n) - 1)).unwrap();
        let dist = st.outcome_distribution(Some(&mask));
        let total: f64 = dist.values().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        let mut h = st.clone();
        h.hadamard(&mask);
        for (v, p) in dist {
            prop_assert!((h.amplitude(&v).norm_sqr() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_norm_matches_gram_eigenvalue(d in 1usize..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = Matrix::from_fn(d, d, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let gram = m.adjoint() * &m;
        let top = gram.symmetric_eigen().eigenvalues.iter().copied().fold(0.0, f64::max);
        let norm = operator_norm(&m).unwrap();
        prop_assert!((norm - top.sqrt()).abs() <= 1e-9 * norm.max(1.0));
    }

    #[test]
    fn partial_trace_preserves_trace(da in 1usize..=4, db in 1usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi: Vector = random_unitary(da * db, &mut r).column(0).into_owned();
        let rho = &psi * psi.adjoint();
        for keep in [[0usize].as_slice(), [1usize].as_slice()] {
            let red = partial_trace(&rho, &[da, db], keep).unwrap();
            let tr: C64 = (0..red.nrows()).map(|i| red[(i, i)]).sum();
            prop_assert!((tr - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn identical_pairs_are_equal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = DistributionKind::Identical.pair(&mut r, |r| r.gen::<u64>());
        prop_assert_eq!(a, b);
        let (c, d) = DistributionKind::Uniform.pair(&mut r, |r| r.gen::<u64>());
        prop_assert_ne!(c, d);
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(trials in 1u64..1_000_000, frac in 0.0f64..=1.0) {
        let wins = ((trials as f64) * frac) as u64;
        let s = WinStats::from_counts(wins, trials);
        prop_assert!(s.ci.0 <= s.estimate && s.estimate <= s.ci.1);
        prop_assert!(0.0 <= s.ci.0 && s.ci.1 <= 1.0);
        prop_assert_eq!(s.estimate, wins as f64 / trials as f64);
        prop_assert_eq!(wilson_interval(wins, trials, Z_99), s.ci);
    }

    #[test]
    fn punctured_prf_agrees_off_the_point(bits in 1usize..=8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = PrfKey::generate(bits, 12, &mut r).unwrap();
        let point = BitString::random(bits, &mut r);
        let pk = k.puncture(&point).unwrap();
        for v in 0..1u64 << bits {
            let x = BitString::from_u64(v, bits);
            let got = pk.eval(&x).unwrap();
            if x == point {
                prop_assert!(got.is_none());
            } else {
                prop_assert_eq!(got, Some(k.eval(&x).unwrap()));
            }
        }
    }

    #[test]
    fn obfuscation_preserves_functionality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let key = CosetKey::sample(4, &mut r).unwrap();
        let p = Program::Membership(key.coset(r.gen()));
        let obf = TransparentIo.obfuscate(&p, params_for(&p, 4, 1), &r.gen::<[u8; 16]>()).unwrap();
        for v in all_vectors(4) {
            prop_assert_eq!(obf.eval(&Input::vector(v)), p.eval(&Input::vector(v)));
        }
        let round = coset_moe::crypto::ObfProgram::from_bytes(&obf.to_bytes()).unwrap();
        prop_assert_eq!(round.to_bytes(), obf.to_bytes());
    }

    #[test]
    fn program_serialization_round_trips(seed in any::<u64>(), lock in 1usize..=16) {
        let mut r = rng(seed);
        let p = Program::ComputeCompare {
            f: Function::Identity,
            lock: BitString::random(lock, &mut r),
            message: BitString::random(8, &mut r),
        };
        prop_assert_eq!(Program::from_bytes(&p.to_bytes()).unwrap(), p);
    }

    #[test]
    fn random_families_are_projective_measurements(h in 1usize..=2, dim in 1usize..=4, seed in any::<u64>()) {
        let fam = Family::random(2 * h, dim, &mut rng(seed)).unwrap();
        prop_assert!(fam.validate().is_ok());
    }
}

/// Exact marginal of Bob's outcome, with and without Charlie measuring first
/// in either of two bases.
#[test]
fn charlie_cannot_signal_to_bob() {
    let mut r = rng(77);
    for _ in 0..20 {
        let (db, dc) = (2usize, 3usize);
        let psi: Vector = random_unitary(db * dc, &mut r).column(0).into_owned();
        let bob = projective(db, &mut r);
        let rho = &psi * psi.adjoint();
        let alone = bob_marginal(&partial_trace(&rho, &[db, dc], &[0]).unwrap(), &bob);
        for _ in 0..2 {
            let charlie = projective(dc, &mut r);
            let mut after = Matrix::zeros(db * dc, db * dc);
            for c in &charlie {
                let phi = apply_local(&psi, &[db, dc], 1, c);
                after += &phi * phi.adjoint();
            }
            let m = bob_marginal(&partial_trace(&after, &[db, dc], &[0]).unwrap(), &bob);
            for (x, y) in m.iter().zip(&alone) {
                assert!((x - y).abs() < 1e-12, "{m:?} vs {alone:?}");
            }
        }
    }
}

/// The same through sampled measurements on a shared state: Bob's outcome
/// frequencies do not depend on which measurement Charlie performed first.
#[test]
fn sampled_bob_marginal_ignores_charlie() {
    let mut r = rng(78);
    let (db, dc) = (2usize, 2usize);
    let psi: Vector = random_unitary(db * dc, &mut r).column(0).into_owned();
    let bob = projective(db, &mut r);
    let rho = &psi * psi.adjoint();
    let p0 = bob_marginal(&partial_trace(&rho, &[db, dc], &[0]).unwrap(), &bob)[0];
    let charlies = [projective(dc, &mut r), projective(dc, &mut r)];
    let trials = 20_000u64;
    for charlie in charlies.iter().map(Some).chain([None]) {
        let mut zeros = 0u64;
        for t in 0..trials {
            let mut tr = rng(1_000 + t);
            let mut parts = SharedState::split(psi.clone(), vec![db, dc]).into_iter();
            let (b, c) = (parts.next().unwrap(), parts.next().unwrap());
            if let Some(meas) = charlie {
                c.measure(meas, &mut tr).unwrap();
            }
            zeros += (b.measure(&bob, &mut tr).unwrap() == 0) as u64;
        }
        let (lo, hi) = wilson_interval(zeros, trials, 5.0);
        assert!(lo <= p0 && p0 <= hi, "{zeros}/{trials} vs {p0}");
    }
}

fn projective(d: usize, r: &mut ChaCha8Rng) -> Vec<Matrix> {
    let u = random_isometry(d, d, r).unwrap();
    (0..d)
        .map(|k| {
            let c: Vector = u.column(k).into_owned();
            &c * c.adjoint()
        })
        .collect()
}

fn bob_marginal(rho_b: &Matrix, meas: &[Matrix]) -> Vec<f64> {
    meas.iter().map(|p| (p * rho_b).trace().re).collect()
}
