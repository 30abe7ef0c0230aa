//! Dense state-vector and density-matrix simulation.
//!
//! Basis index `i` of an `n`-qubit register is the packed word of the
//! corresponding [`F2Vector`], so qubit 0 is the most significant bit.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gf2::{inner, F2Subspace, F2Vector};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const DEFAULT_QUBIT_LIMIT: usize = 20;

/// Normalisation slack accepted on inputs.
pub const NORM_TOL: f64 = 1e-10;

/// Probabilities at or below this are treated as exact zeros in outcome tables.
pub const PROB_FLOOR: f64 = 1e-14;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A pure state of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

fn check_qubits(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::capacity(format!(
            "{n} qubits exceeds the limit of {limit}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// Builds a state from raw amplitudes, which must be normalised.
    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_qubits(n, DEFAULT_QUBIT_LIMIT)?;
        if amps.len() != 1usize << n {
            return Err(Error::state(format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        let s = Self { n, amps };
        s.check_normalised()?;
        Ok(s)
    }

    pub fn basis(x: &F2Vector) -> Result<Self> {
        Self::basis_with_limit(x, DEFAULT_QUBIT_LIMIT)
    }

    pub fn basis_with_limit(x: &F2Vector, limit: usize) -> Result<Self> {
        check_qubits(x.len(), limit)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << x.len()];
        amps[x.bits() as usize] = C64::new(1.0, 0.0);
        Ok(Self { n: x.len(), amps })
    }

    /// The coset state `|A_{s,s'}> = |A|^{-1/2} sum_{a in A} (-1)^{<a,s'>} |a + s>`.
    pub fn coset_state(a: &F2Subspace, s: &F2Vector, s_prime: &F2Vector) -> Result<Self> {
        Self::coset_state_with_limit(a, s, s_prime, DEFAULT_QUBIT_LIMIT)
    }

    pub fn coset_state_with_limit(
        a: &F2Subspace,
        s: &F2Vector,
        s_prime: &F2Vector,
        limit: usize,
    ) -> Result<Self> {
        let n = a.ambient_dim();
        if s.len() != n || s_prime.len() != n {
            return Err(Error::param(
                "coset shifts must match the ambient dimension",
            ));
        }
        check_qubits(n, limit)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << n];
        let norm = 1.0 / (a.size() as f64).sqrt();
        for elem in a.elements() {
            let sign = if inner(&elem, s_prime) { -norm } else { norm };
            amps[elem.xor(s).bits() as usize] = C64::new(sign, 0.0);
        }
        Ok(Self { n, amps })
    }

    /// The BB84 state `H^theta |x>`.
    pub fn bb84_state(x: &F2Vector, theta: &F2Vector) -> Result<Self> {
        if x.len() != theta.len() {
            return Err(Error::param("basis string length differs from data length"));
        }
        let mut s = Self::basis(x)?;
        s.hadamard(theta);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, x: &F2Vector) -> C64 {
        self.amps[x.bits() as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalised(&self) -> Result<()> {
        let ns = self.norm_sqr();
        if !ns.is_finite() {
            return Err(Error::numeric("non-finite amplitude"));
        }
        if (ns - 1.0).abs() > NORM_TOL {
            return Err(Error::state(format!("state has squared norm {ns}")));
        }
        Ok(())
    }

    /// Applies `H` to every qubit `i` with `mask[i] = 1`.
    pub fn hadamard(&mut self, mask: &F2Vector) {
        assert_eq!(mask.len(), self.n, "mask length differs from qubit count");
        for q in mask.support() {
            let bit = 1usize << (self.n - 1 - q);
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    let (a, b) = (self.amps[i], self.amps[i | bit]);
                    self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                    self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
    }

    /// Applies `H` to all qubits.
    pub fn hadamard_all(&mut self) {
        let ones = F2Vector::zero(self.n).expect("non-empty register").not();
        self.hadamard(&ones);
    }

    /// Born-rule distribution of a computational-basis measurement after
    /// applying `H` on `mask`. Outcomes below [`PROB_FLOOR`] are omitted.
    pub fn outcome_distribution(&self, mask: Option<&F2Vector>) -> BTreeMap<F2Vector, f64> {
        let mut work = self.clone();
        if let Some(m) = mask {
            work.hadamard(m);
        }
        work.amps
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                let p = a.norm_sqr();
                (p > PROB_FLOOR).then(|| {
                    (
                        F2Vector::from_bits(self.n, i as u64).expect("index fits"),
                        p,
                    )
                })
            })
            .collect()
    }

    /// Measures every qubit in the computational basis.
    pub fn measure<R: Rng + ?Sized>(self, rng: &mut R) -> Result<(F2Vector, StateVector)> {
        self.check_normalised()?;
        let r: f64 = rng.gen::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        let mut pick = None;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            acc += p;
            pick = Some(i);
            if r < acc {
                break;
            }
        }
        let i = pick.ok_or_else(|| Error::state("zero state"))?;
        let x = F2Vector::from_bits(self.n, i as u64)?;
        let post = StateVector::basis(&x)?;
        Ok((x, post))
    }

    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        check_qubits(n, DEFAULT_QUBIT_LIMIT)?;
        let mut amps = Vec::with_capacity(1usize << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { n, amps })
    }

    pub fn to_vector(&self) -> Vector {
        Vector::from_column_slice(&self.amps)
    }

    pub fn density(&self) -> DensityMatrix {
        let v = self.to_vector();
        DensityMatrix {
            matrix: &v * v.adjoint(),
            dims: vec![2; self.n],
        }
    }
}

/// A density operator on a tensor product of subsystems of the given dimensions.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: Matrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: Matrix, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::param(format!(
                "matrix shape {:?} does not match dims {dims:?}",
                matrix.shape()
            )));
        }
        let rho = Self { matrix, dims };
        rho.validate(1e-9)?;
        Ok(rho)
    }

    /// Pure state on subsystems of the given dimensions.
    pub fn from_pure(psi: &Vector, dims: Vec<usize>) -> Result<Self> {
        Self::new(psi * psi.adjoint(), dims)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Checks hermiticity, unit trace and positivity to within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self
            .matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::numeric("non-finite density matrix entry"));
        }
        let herm_dev = max_abs(&(&self.matrix - self.matrix.adjoint()));
        if herm_dev > tol {
            return Err(Error::state(format!(
                "not Hermitian (deviation {herm_dev})"
            )));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::state(format!("trace {tr}")));
        }
        let (vals, _) = hermitian_eigen(&self.matrix)?;
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::state(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        Ok(DensityMatrix {
            matrix: m,
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
        })
    }

    /// Diagonal of the matrix, i.e. computational-basis outcome probabilities.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        (0..self.matrix.nrows())
            .map(|i| self.matrix[(i, i)].re)
            .collect()
    }
}

/// Partial trace of an operator on `dims[0] x dims[1] x ...`, keeping the
/// listed subsystems (in increasing order).
pub fn partial_trace(m: &Matrix, dims: &[usize], keep: &[usize]) -> Result<Matrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::param(
            "operator shape does not match subsystem dimensions",
        ));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::param(format!(
            "keep set {keep:?} must be strictly increasing and in range"
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let dk: usize = keep.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    let digits = |mut idx: usize, which: &[usize]| -> Vec<usize> {
        let mut out = vec![0; which.len()];
        for j in (0..which.len()).rev() {
            out[j] = idx % dims[which[j]];
            idx /= dims[which[j]];
        }
        out
    };
    let compose = |kd: &[usize], td: &[usize]| -> usize {
        let mut full = vec![0; dims.len()];
        for (j, &k) in keep.iter().enumerate() {
            full[k] = kd[j];
        }
        for (j, &t) in traced.iter().enumerate() {
            full[t] = td[j];
        }
        full.iter()
            .zip(dims)
            .fold(0, |acc, (&d, &dim)| acc * dim + d)
    };
    let mut out = Matrix::zeros(dk, dk);
    for i in 0..dk {
        let ki = digits(i, keep);
        for j in 0..dk {
            let kj = digits(j, keep);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                let td = digits(t, &traced);
                acc += m[(compose(&ki, &td), compose(&kj, &td))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Largest entry modulus.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Largest singular value.
pub fn operator_norm(m: &Matrix) -> Result<f64> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numeric("non-finite operator entry"));
    }
    if m.is_empty() {
        return Ok(0.0);
    }
    let sv = m.clone().singular_values();
    Ok(sv.iter().copied().fold(0.0, f64::max))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in decreasing order
/// with eigenvectors as the matching columns.
pub fn hermitian_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numeric("non-finite operator entry"));
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .total_cmp(&eig.eigenvalues[i])
            .then(i.cmp(&j))
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Matrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok((vals, vecs))
}

/// Projector onto the span of the given orthonormal columns.
pub fn projector_onto(columns: &[Vector], dim: usize) -> Matrix {
    let mut p = Matrix::zeros(dim, dim);
    for c in columns {
        p += c * c.adjoint();
    }
    p
}

/// Whether `m` is an orthogonal projector to within `tol`.
pub fn is_projector(m: &Matrix, tol: f64) -> bool {
    max_abs(&(m - m.adjoint())) <= tol && max_abs(&(m * m - m)) <= tol
}

/// Haar-random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(d, d, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let phase = r[(j, j)] / r[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random isometry `C^d_in -> C^d_out` (the first `d_in` columns of a Haar unitary).
pub fn random_isometry<R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> Result<Matrix> {
    if d_in > d_out {
        return Err(Error::param(format!(
            "no isometry from dimension {d_in} into {d_out}"
        )));
    }
    Ok(random_unitary(d_out, rng).columns(0, d_in).into_owned())
}

/// Coherent evaluation of a classical function on a product of registers.
///
/// Implements the oracle `|v>|o> -> |v>|o XOR label(f(v))>` on the joint
/// register plus a fresh output register, traces out the inputs and reads the
/// output register's diagonal. Returns the distribution over the values of `f`.
pub fn coherent_evaluate<T: Ord + Clone>(
    registers: &[StateVector],
    f: impl Fn(&[F2Vector]) -> T,
) -> Result<BTreeMap<T, f64>> {
    let widths: Vec<usize> = registers.iter().map(|r| r.num_qubits()).collect();
    let nin: usize = widths.iter().sum();
    let din = 1usize << nin;
    let split = |idx: usize| -> Vec<F2Vector> {
        let mut out = Vec::with_capacity(widths.len());
        let mut shift = nin;
        for &w in &widths {
            shift -= w;
            let bits = (idx >> shift) & ((1usize << w) - 1);
            out.push(F2Vector::from_bits(w, bits as u64).expect("register width fits"));
        }
        out
    };
    let values: Vec<T> = (0..din).map(|i| f(&split(i))).collect();
    let mut labels: Vec<T> = values.clone();
    labels.sort();
    labels.dedup();
    let wout = (usize::BITS - (labels.len().max(2) - 1).leading_zeros()) as usize;
    check_qubits(nin + wout, DEFAULT_QUBIT_LIMIT)?;
    let dout = 1usize << wout;

    let mut joint = vec![C64::new(1.0, 0.0)];
    for r in registers {
        joint = joint
            .iter()
            .flat_map(|a| r.amplitudes().iter().map(move |b| a * b))
            .collect();
    }
    // input register (x) output register initialised to |0>
    let mut psi = Vector::zeros(din * dout);
    for (i, a) in joint.iter().enumerate() {
        psi[i * dout] = *a;
    }
    let mut out_state = Vector::zeros(din * dout);
    for i in 0..din {
        let label = labels.binary_search(&values[i]).expect("label present");
        for o in 0..dout {
            out_state[i * dout + (o ^ label)] = psi[i * dout + o];
        }
    }
    let rho = DensityMatrix::from_pure(&out_state, vec![din, dout])?;
    let reduced = rho.partial_trace(&[1])?;
    let probs = reduced.diagonal_probabilities();
    Ok(labels
        .into_iter()
        .zip(probs)
        .filter(|(_, p)| *p > PROB_FLOOR)
        .collect())
}
