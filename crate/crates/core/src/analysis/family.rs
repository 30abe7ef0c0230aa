//! Families of mutually orthogonal permutations: search, verification and
//! the lift from `Theta_n` to `Theta_n x {0,1}`.

use crate::error::{Error, Result};
use crate::games::bb84::questions;
use crate::gf2::{balanced_strings, F2Vector};

/// Largest `n` for which [`build_base_family`] searches.
pub const MAX_FAMILY_N: usize = 4;

/// What the permuted indices stand for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `0..m` with no further structure.
    Plain(usize),
    /// `Theta_n` in the order of [`balanced_strings`].
    Bases(usize),
    /// `Theta_n x {0,1}` with `(theta, b)` at index `2 * pos(theta) + b`.
    Questions(usize),
}

impl Domain {
    pub fn size(&self) -> Result<usize> {
        Ok(match *self {
            Domain::Plain(m) => m,
            Domain::Bases(n) => balanced_strings(n)?.len(),
            Domain::Questions(n) => 2 * balanced_strings(n)?.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationFamily {
    domain: Domain,
    perms: Vec<Vec<usize>>,
}

impl PermutationFamily {
    /// Wraps raw permutations; only the shape is checked here, the rest is
    /// left to [`verify_family`].
    pub fn new(domain: Domain, perms: Vec<Vec<usize>>) -> Result<Self> {
        let m = domain.size()?;
        if let Some(p) = perms
            .iter()
            .find(|p| p.len() != m || p.iter().any(|&v| v >= m))
        {
            return Err(Error::param(format!(
                "map {p:?} is not a map of a {m}-element set"
            )));
        }
        Ok(Self { domain, perms })
    }

    /// `i -> i + k mod m` for `k = 0..m`.
    pub fn cyclic(m: usize) -> Self {
        let perms = (0..m)
            .map(|k| (0..m).map(|i| (i + k) % m).collect())
            .collect();
        Self {
            domain: Domain::Plain(m),
            perms,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn is_bijective(&self) -> bool {
        self.perms.iter().all(|p| {
            let mut seen = vec![false; p.len()];
            p.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        })
    }

    /// Distinct members disagree everywhere.
    pub fn is_mutually_orthogonal(&self) -> bool {
        let m = self.perms.first().map_or(0, Vec::len);
        (0..m).all(|x| {
            let mut seen = vec![false; m];
            self.perms
                .iter()
                .all(|p| !std::mem::replace(&mut seen[p[x]], true))
        })
    }
}

fn overlap(a: &F2Vector, b: &F2Vector) -> usize {
    a.and(b).weight()
}

fn check_family_n(n: usize) -> Result<()> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::param(format!(
            "n = {n}: Theta_n needs an even n >= 2"
        )));
    }
    if n > MAX_FAMILY_N {
        return Err(Error::capacity(format!(
            "base families are only searched for n <= {MAX_FAMILY_N}; n = {n} is unavailable"
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(n/2, i)^2` for `i = 0..=n/2`.
pub fn expected_overlap_counts(n: usize) -> Vec<usize> {
    (0..=n / 2).map(|i| binomial(n / 2, i).pow(2)).collect()
}

/// Searches for `N = C(n, n/2)` mutually orthogonal permutations of
/// `Theta_n` such that, for each `i`, exactly `C(n/2, i)^2` of them map every
/// `theta` to a string sharing `n/2 - i` ones with it.
///
/// The search fills a Latin square row by row with a fixed overlap class per
/// row, trying candidates in increasing index order.
pub fn build_base_family(n: usize) -> Result<PermutationFamily> {
    check_family_n(n)?;
    let thetas = balanced_strings(n)?;
    let m = thetas.len();
    let h = n / 2;
    let targets: Vec<usize> = expected_overlap_counts(n)
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(h - i, c))
        .collect();
    debug_assert_eq!(targets.len(), m);
    let ov: Vec<Vec<usize>> = thetas
        .iter()
        .map(|a| thetas.iter().map(|b| overlap(a, b)).collect())
        .collect();

    let mut grid = vec![vec![usize::MAX; m]; m];
    let mut row_used = vec![vec![false; m]; m];
    let mut col_used = vec![vec![false; m]; m];

    fn fill(
        cell: usize,
        m: usize,
        targets: &[usize],
        ov: &[Vec<usize>],
        grid: &mut [Vec<usize>],
        row_used: &mut [Vec<bool>],
        col_used: &mut [Vec<bool>],
    ) -> bool {
        if cell == m * m {
            return true;
        }
        let (r, j) = (cell / m, cell % m);
        for v in 0..m {
            if ov[j][v] != targets[r] || row_used[r][v] || col_used[j][v] {
                continue;
            }
            grid[r][j] = v;
            row_used[r][v] = true;
            col_used[j][v] = true;
            if fill(cell + 1, m, targets, ov, grid, row_used, col_used) {
                return true;
            }
            row_used[r][v] = false;
            col_used[j][v] = false;
        }
        grid[r][j] = usize::MAX;
        false
    }

    if !fill(0, m, &targets, &ov, &mut grid, &mut row_used, &mut col_used) {
        return Err(Error::internal(format!(
            "no permutation family with the required overlap profile for n = {n}"
        )));
    }
    PermutationFamily::new(Domain::Bases(n), grid)
}

/// `pi_{k,0}(theta || b) = pi_k(theta) || (1 - b)` and
/// `pi_{k,1}(theta || b) = pi_k(theta) || b`, stored at index `2k + alpha`.
pub fn lift_family(base: &PermutationFamily) -> Result<PermutationFamily> {
    let Domain::Bases(n) = base.domain else {
        return Err(Error::param("only families on Theta_n can be lifted"));
    };
    let m = base.domain.size()?;
    let mut perms = Vec::with_capacity(2 * base.len());
    for p in base.perms() {
        for alpha in [false, true] {
            let lifted = (0..2 * m)
                .map(|q| {
                    let (pos, b) = (q / 2, q % 2 == 1);
                    2 * p[pos] + (if alpha { b } else { !b }) as usize
                })
                .collect();
            perms.push(lifted);
        }
    }
    PermutationFamily::new(Domain::Questions(n), perms)
}

/// One row of the overlap table: how many members keep `n/2 - i` ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapCount {
    pub i: usize,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub bijective: bool,
    pub orthogonal: bool,
    /// Members whose overlap with the input is not the same for every input.
    pub irregular: usize,
    pub counts: Vec<OverlapCount>,
    /// For lifted families: whether `alpha = 0` flips `b` and `alpha = 1` keeps it.
    pub bit_rule: Option<bool>,
    pub pass: bool,
}

/// Exhaustively checks bijectivity, mutual orthogonality and, for families
/// on `Theta_n` or `Theta_n x {0,1}`, the overlap profile and the bit rule.
pub fn verify_family(fam: &PermutationFamily) -> Result<FamilyReport> {
    let bijective = fam.is_bijective();
    let orthogonal = fam.is_mutually_orthogonal();
    let (n, lifted) = match fam.domain {
        Domain::Plain(_) => {
            return Ok(FamilyReport {
                bijective,
                orthogonal,
                irregular: 0,
                counts: Vec::new(),
                bit_rule: None,
                pass: bijective && orthogonal,
            })
        }
        Domain::Bases(n) => (n, false),
        Domain::Questions(n) => (n, true),
    };
    let thetas = balanced_strings(n)?;
    let h = n / 2;
    let mut found = vec![0usize; h + 1];
    let mut irregular = 0;
    let mut bit_rule = true;
    let qs = if lifted { questions(n)? } else { Vec::new() };
    for (idx, p) in fam.perms().iter().enumerate() {
        let alpha = idx % 2 == 1;
        let overlaps: Vec<usize> = if lifted {
            for (q, &img) in p.iter().enumerate() {
                let (b_in, b_out) = (qs[q].1, img % 2 == 1);
                bit_rule &= if alpha { b_out == b_in } else { b_out != b_in };
            }
            if alpha {
                continue;
            }
            p.iter()
                .enumerate()
                .map(|(q, &img)| overlap(&thetas[q / 2], &thetas[img / 2]))
                .collect()
        } else {
            p.iter()
                .enumerate()
                .map(|(j, &img)| overlap(&thetas[j], &thetas[img]))
                .collect()
        };
        match overlaps.first() {
            Some(&c) if overlaps.iter().all(|&o| o == c) => found[h - c] += 1,
            _ => irregular += 1,
        }
    }
    let counts: Vec<OverlapCount> = expected_overlap_counts(n)
        .into_iter()
        .enumerate()
        .map(|(i, expected)| OverlapCount {
            i,
            expected,
            found: found[i],
        })
        .collect();
    let profile_ok = irregular == 0 && counts.iter().all(|c| c.expected == c.found);
    let bit_rule = lifted.then_some(bit_rule);
    let pass = bijective && orthogonal && profile_ok && bit_rule.unwrap_or(true);
    Ok(FamilyReport {
        bijective,
        orthogonal,
        irregular,
        counts,
        bit_rule,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_family_is_identity_and_swap() {
        let f = build_base_family(2).unwrap();
        assert_eq!(f.perms(), &[vec![0, 1], vec![1, 0]]);
        assert!(verify_family(&f).unwrap().pass);
    }

    #[test]
    fn n4_family_has_the_overlap_profile() {
        let f = build_base_family(4).unwrap();
        assert_eq!(f.len(), 6);
        let r = verify_family(&f).unwrap();
        assert!(r.pass, "{r:?}");
        let found: Vec<usize> = r.counts.iter().map(|c| c.found).collect();
        assert_eq!(found, vec![1, 4, 1]);
    }

    #[test]
    fn lifted_families_verify() {
        for n in [2, 4] {
            let l = lift_family(&build_base_family(n).unwrap()).unwrap();
            assert_eq!(l.len(), 2 * build_base_family(n).unwrap().len());
            let r = verify_family(&l).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.bit_rule, Some(true));
        }
    }

    #[test]
    fn broken_families_are_rejected() {
        let f = PermutationFamily::new(Domain::Bases(2), vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(!verify_family(&f).unwrap().pass);
        let g = PermutationFamily::new(Domain::Plain(3), vec![vec![0, 0, 1]]).unwrap();
        assert!(!g.is_bijective());
        assert!(PermutationFamily::new(Domain::Plain(2), vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn out_of_range_sizes() {
        assert!(matches!(build_base_family(6), Err(Error::Capacity(_))));
        assert!(matches!(build_base_family(3), Err(Error::Param(_))));
    }

    #[test]
    fn cyclic_is_latin() {
        assert!(verify_family(&PermutationFamily::cyclic(5)).unwrap().pass);
    }
}
