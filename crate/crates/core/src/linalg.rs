//! Small dense linear-algebra helpers shared by the operator builders and the
//! propagators.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };
pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A Hermitian generator applied matrix-free.
pub trait Generator {
    fn dim(&self) -> usize;

    /// `out = (H - shift) psi`.
    fn apply_shifted(&self, psi: &[C64], out: &mut [C64]);

    /// Real constant removed from the spectrum before exponentiation.
    fn shift(&self) -> f64 {
        0.0
    }

    /// Upper bound on the operator norm of `H - shift`.
    fn norm_bound(&self) -> f64;
}

/// Dense Hermitian matrix as a generator.
pub struct DenseGenerator<'a> {
    pub matrix: &'a DMatrix<C64>,
    bound: f64,
}

impl<'a> DenseGenerator<'a> {
    pub fn new(matrix: &'a DMatrix<C64>) -> Self {
        // max absolute row sum bounds the 2-norm of a Hermitian matrix
        let bound = matrix
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        DenseGenerator { matrix, bound }
    }
}

impl Generator for DenseGenerator<'_> {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_shifted(&self, psi: &[C64], out: &mut [C64]) {
        let dim = self.dim();
        for (r, o) in out.iter_mut().enumerate().take(dim) {
            let mut acc = ZERO;
            for (c, p) in psi.iter().enumerate() {
                acc += self.matrix[(r, c)] * p;
            }
            *o = acc;
        }
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }
}

const CHUNK_NORM: f64 = 2.0;
const MAX_TERMS: usize = 60;

/// `psi <- exp(-i H dt) psi` by a scaled Taylor series summed to machine
/// precision. The spectrum shift reported by the generator is removed during
/// summation and restored as a global phase.
pub fn expm_apply<G: Generator + ?Sized>(gen: &G, dt: f64, psi: &mut [C64], scratch: &mut Scratch) {
    let dim = gen.dim();
    debug_assert_eq!(psi.len(), dim);
    scratch.ensure(dim);
    let chunks = ((gen.norm_bound() * dt.abs()) / CHUNK_NORM).ceil().max(1.0) as usize;
    let tau = dt / chunks as f64;
    let phase = C64::from_polar(1.0, -gen.shift() * tau);
    let Scratch { term, next } = scratch;
    for _ in 0..chunks {
        term[..dim].copy_from_slice(psi);
        let psi_norm = norm(psi);
        for k in 1..=MAX_TERMS {
            gen.apply_shifted(&term[..dim], &mut next[..dim]);
            let scale = -I * (tau / k as f64);
            let mut term_norm = 0.0;
            for (t, (nx, p)) in term[..dim].iter_mut().zip(next[..dim].iter().zip(psi.iter_mut())) {
                *t = nx * scale;
                *p += *t;
                term_norm += t.norm_sqr();
            }
            if term_norm.sqrt() <= 1e-17 * psi_norm {
                break;
            }
        }
        if gen.shift() != 0.0 {
            psi.iter_mut().for_each(|p| *p *= phase);
        }
    }
}

/// Reusable work buffers for [`expm_apply`].
#[derive(Default)]
pub struct Scratch {
    term: Vec<C64>,
    next: Vec<C64>,
}

impl Scratch {
    fn ensure(&mut self, dim: usize) {
        if self.term.len() < dim {
            self.term.resize(dim, ZERO);
            self.next.resize(dim, ZERO);
        }
    }
}

pub fn norm(psi: &[C64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Applies the same 2x2 matrix to every qubit of an `n`-qubit state.
/// Matrix rows and columns are ordered `(|0>, |1>)`.
pub fn apply_to_every_qubit(psi: &mut [C64], m: &Matrix2<C64>, n: usize) {
    for j in 0..n {
        apply_to_qubit(psi, m, j);
    }
}

pub fn apply_to_qubit(psi: &mut [C64], m: &Matrix2<C64>, qubit: usize) {
    let bit = 1usize << qubit;
    for i0 in 0..psi.len() {
        if i0 & bit != 0 {
            continue;
        }
        let i1 = i0 | bit;
        let (a, b) = (psi[i0], psi[i1]);
        psi[i0] = m[(0, 0)] * a + m[(0, 1)] * b;
        psi[i1] = m[(1, 0)] * a + m[(1, 1)] * b;
    }
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Kronecker product `a ⊗ b`; the left factor acts on the higher-order bits.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// `m^{⊗n}` in the bit-`j`-is-qubit-`j` index convention.
pub fn tensor_power(m: &Matrix2<C64>, n: usize) -> DMatrix<C64> {
    let single = DMatrix::from_fn(2, 2, |r, c| m[(r, c)]);
    let mut out = DMatrix::from_element(1, 1, ONE);
    for _ in 0..n {
        out = kron(&single, &out);
    }
    out
}

/// `max |M - M†|` relative to `max |M|` (absolute when `M` vanishes).
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let defect = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        defect / scale
    } else {
        defect
    }
}
