//! See-saw lower bounds on the extended non-local game value.
//!
//! Alternates between the optimal state for fixed measurements (top
//! eigenvector of `E[Pi_{theta,b}]`) and pairwise two-outcome Helstrom
//! updates of one player's projectors with the state and the other player
//! fixed. Every step is a coordinate ascent, so the value never decreases.

use rand::Rng;

use crate::error::{Error, Result};
use crate::games::bb84::{apply_local, questions, target_bits, Family};
use crate::games::coset::check_even;
use crate::games::enl::EnlStrategy;
use crate::gf2::F2Vector;
use crate::qsim::{hermitian_eigen, Matrix, StateVector, Vector, C64};

pub const MAX_SEESAW_N: usize = 4;
pub const MAX_ANCILLA_DIM: usize = 8;

/// Eigenvalues at or below this (relative to the largest magnitude) count as zero.
const EIG_GAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct SeesawConfig {
    pub n: usize,
    pub d_b: usize,
    pub d_c: usize,
    pub iters: usize,
    pub tol: f64,
    /// Random restarts on top of the deterministic start.
    pub restarts: usize,
}

impl SeesawConfig {
    pub fn new(n: usize, d_b: usize, d_c: usize) -> Self {
        Self {
            n,
            d_b,
            d_c,
            iters: 50,
            tol: 1e-10,
            restarts: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        check_even(self.n)?;
        if self.n > MAX_SEESAW_N {
            return Err(Error::capacity(format!(
                "see-saw supports n <= {MAX_SEESAW_N}, got {}",
                self.n
            )));
        }
        for d in [self.d_b, self.d_c] {
            if d == 0 || d > MAX_ANCILLA_DIM {
                return Err(Error::param(format!(
                    "ancilla dimension {d} outside 1..={MAX_ANCILLA_DIM}"
                )));
            }
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::param("tolerance must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub strategy: EnlStrategy,
    /// Value of `strategy` as tracked by the optimizer.
    pub value: f64,
    /// Value re-computed through the game's exact evaluation.
    pub verified: f64,
    /// Value after the initial state choice and after each iteration of the
    /// winning run.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Which start won: 0 is the deterministic start, `k` the `k`-th restart.
    pub start: usize,
}

struct Workspace {
    dims: [usize; 3],
    /// `W[q][y] = sum_{x : x_T = y} |x^theta><x^theta|` on register 0.
    w: Vec<Vec<Matrix>>,
}

impl Workspace {
    fn new(n: usize, d_b: usize, d_c: usize) -> Result<Self> {
        let d0 = 1usize << n;
        let k = 1usize << (n / 2);
        let mut w = Vec::new();
        for (theta, b) in questions(n)? {
            let mut row = vec![Matrix::zeros(d0, d0); k];
            for xb in 0..d0 as u64 {
                let x = F2Vector::from_bits(n, xb)?;
                let ket = StateVector::bb84_state(&x, &theta)?.to_vector();
                row[target_bits(&x, &theta, b).bits() as usize] += &ket * ket.adjoint();
            }
            w.push(row);
        }
        Ok(Self {
            dims: [d0, d_b, d_c],
            w,
        })
    }

    fn apply(
        &self,
        psi: &Vector,
        q: usize,
        y: usize,
        b: Option<&Matrix>,
        c: Option<&Matrix>,
    ) -> Vector {
        let mut phi = apply_local(psi, &self.dims, 0, &self.w[q][y]);
        if let Some(b) = b {
            phi = apply_local(&phi, &self.dims, 1, b);
        }
        if let Some(c) = c {
            phi = apply_local(&phi, &self.dims, 2, c);
        }
        phi
    }

    fn value(&self, psi: &Vector, bob: &[Vec<Matrix>], charlie: &[Vec<Matrix>]) -> f64 {
        let mut total = 0.0;
        for q in 0..self.w.len() {
            for y in 0..self.w[q].len() {
                total += self
                    .apply(psi, q, y, Some(&bob[q][y]), Some(&charlie[q][y]))
                    .norm_squared();
            }
        }
        total / self.w.len() as f64
    }

    fn mean_operator(&self, bob: &[Vec<Matrix>], charlie: &[Vec<Matrix>]) -> Matrix {
        let dim: usize = self.dims.iter().product();
        let mut m = Matrix::zeros(dim, dim);
        for q in 0..self.w.len() {
            for y in 0..self.w[q].len() {
                m += self.w[q][y].kronecker(&bob[q][y].kronecker(&charlie[q][y]));
            }
        }
        m / C64::new(self.w.len() as f64, 0.0)
    }

    /// `Tr_{others} |phi><phi|` on factor `k`.
    fn reduced(&self, phi: &Vector, k: usize) -> Matrix {
        let d = self.dims[k];
        let left: usize = self.dims[..k].iter().product();
        let right: usize = self.dims[k + 1..].iter().product();
        let mut out = Matrix::zeros(d, d);
        for l in 0..left {
            for r in 0..right {
                for i in 0..d {
                    let a = phi[(l * d + i) * right + r];
                    if a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..d {
                        out[(i, j)] += a * phi[(l * d + j) * right + r].conj();
                    }
                }
            }
        }
        out
    }

    /// Improves the projectors of player `k` (1 = Bob, 2 = Charlie) with the
    /// state and the other player's projectors fixed.
    fn update(
        &self,
        psi: &Vector,
        k: usize,
        own: &mut [Vec<Matrix>],
        other: &[Vec<Matrix>],
    ) -> Result<()> {
        for q in 0..self.w.len() {
            let outcomes = self.w[q].len();
            let ks: Vec<Matrix> = (0..outcomes)
                .map(|y| {
                    let phi = if k == 1 {
                        self.apply(psi, q, y, None, Some(&other[q][y]))
                    } else {
                        self.apply(psi, q, y, Some(&other[q][y]), None)
                    };
                    self.reduced(&phi, k)
                })
                .collect();
            for y1 in 0..outcomes {
                for y2 in y1 + 1..outcomes {
                    let (p1, p2) = helstrom_pair(&own[q][y1], &own[q][y2], &ks[y1], &ks[y2])?;
                    own[q][y1] = p1;
                    own[q][y2] = p2;
                }
            }
        }
        Ok(())
    }
}

/// Orthonormal basis (as columns) of the range of a projector.
fn range_basis(p: &Matrix) -> Result<Matrix> {
    let (vals, vecs) = hermitian_eigen(p)?;
    let r = vals.iter().filter(|&&v| v > 0.5).count();
    Ok(vecs.columns(0, r).into_owned())
}

/// Redistributes the range of `P1 + P2` between two outcomes to maximise
/// `Tr(P1 K1) + Tr(P2 K2)`: outcome 1 gets the positive eigenspace of the
/// compression of `K1 - K2`, outcome 2 the rest. Zero eigenvalues go to
/// outcome 2, and ties keep the lower eigenvector index first.
fn helstrom_pair(p1: &Matrix, p2: &Matrix, k1: &Matrix, k2: &Matrix) -> Result<(Matrix, Matrix)> {
    let u = range_basis(&(p1 + p2))?;
    if u.ncols() == 0 {
        return Ok((p1.clone(), p2.clone()));
    }
    let d = u.adjoint() * (k1 - k2) * &u;
    let (vals, vecs) = hermitian_eigen(&d)?;
    let scale = vals
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let pos = vals.iter().filter(|&&v| v > EIG_GAP * scale).count();
    let v1 = &u * vecs.columns(0, pos);
    let v2 = &u * vecs.columns(pos, vals.len() - pos);
    Ok((&v1 * v1.adjoint(), &v2 * v2.adjoint()))
}

fn top_state(m: &Matrix) -> Result<(f64, Vector)> {
    let (vals, vecs) = hermitian_eigen(m)?;
    let v: Vector = vecs.column(0).into_owned();
    Ok((vals[0], &v / C64::new(v.norm(), 0.0)))
}

/// The deterministic start: basis state `j` of an ancilla answers as if the
/// challenge string were `j mod 2^n`. With `d = 2^{n+1}` these are the
/// measurements of the purified trivial strategy.
fn diagonal_start(n: usize, d: usize) -> Result<Family> {
    let d0 = 1u64 << n;
    Family::diagonal(n, d, |theta, b, j| {
        target_bits(
            &F2Vector::from_bits(n, j as u64 % d0).expect("fits"),
            theta,
            b,
        )
    })
}

fn family_ops(f: &Family) -> Vec<Vec<Matrix>> {
    f.ops().to_vec()
}

struct Run {
    psi: Vector,
    bob: Vec<Vec<Matrix>>,
    charlie: Vec<Vec<Matrix>>,
    value: f64,
    history: Vec<f64>,
    converged: bool,
}

fn run_once(ws: &Workspace, cfg: &SeesawConfig, bob: Family, charlie: Family) -> Result<Run> {
    let (mut bob, mut charlie) = (family_ops(&bob), family_ops(&charlie));
    let (_, mut psi) = top_state(&ws.mean_operator(&bob, &charlie))?;
    let mut value = ws.value(&psi, &bob, &charlie);
    let mut history = vec![value];
    let mut converged = false;
    for _ in 0..cfg.iters {
        ws.update(&psi, 1, &mut bob, &charlie)?;
        ws.update(&psi, 2, &mut charlie, &bob)?;
        let (_, next) = top_state(&ws.mean_operator(&bob, &charlie))?;
        let (kept, moved) = (
            ws.value(&psi, &bob, &charlie),
            ws.value(&next, &bob, &charlie),
        );
        // keep the previous state on a numerically flat step
        if moved >= kept {
            psi = next;
        }
        let v = kept.max(moved);
        history.push(v);
        let delta = v - value;
        value = v;
        if delta.abs() < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(Run {
        psi,
        bob,
        charlie,
        value,
        history,
        converged,
    })
}

/// Runs the see-saw from the deterministic start and `cfg.restarts` random
/// starts and returns the best strategy found, re-verified exactly.
pub fn seesaw<R: Rng + ?Sized>(cfg: &SeesawConfig, rng: &mut R) -> Result<SeesawResult> {
    cfg.validate()?;
    let ws = Workspace::new(cfg.n, cfg.d_b, cfg.d_c)?;
    let mut best: Option<(usize, Run)> = None;
    for start in 0..=cfg.restarts {
        let (b, c) = if start == 0 {
            (
                diagonal_start(cfg.n, cfg.d_b)?,
                diagonal_start(cfg.n, cfg.d_c)?,
            )
        } else {
            (
                Family::random(cfg.n, cfg.d_b, rng)?,
                Family::random(cfg.n, cfg.d_c, rng)?,
            )
        };
        let run = run_once(&ws, cfg, b, c)?;
        if best.as_ref().is_none_or(|(_, r)| run.value > r.value) {
            best = Some((start, run));
        }
    }
    let (start, run) = best.ok_or_else(|| Error::internal("no see-saw run"))?;
    let strategy = EnlStrategy::new(
        run.psi,
        Family::new(cfg.n, cfg.d_b, run.bob)?,
        Family::new(cfg.n, cfg.d_c, run.charlie)?,
    )?;
    let verified = strategy.win_probability()?;
    if (verified - run.value).abs() > 1e-9 {
        return Err(Error::numeric(format!(
            "tracked value {} disagrees with exact value {verified}",
            run.value
        )));
    }
    Ok(SeesawResult {
        strategy,
        value: run.value,
        verified,
        history: run.history,
        converged: run.converged,
        start,
    })
}
