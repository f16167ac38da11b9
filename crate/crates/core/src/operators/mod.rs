//! Dense Hamiltonians over the `2^n` computational basis, the rotating frame,
//! and the projected gauge matrix.

mod frame;
pub(crate) mod gauge;

pub use frame::{numerical_generator, FrameKind, FrameRates, SpinField};
pub use gauge::{gauge_matrix, min_gap_delta, project, pxp_hamiltonian, GapReport, GaugeMatrix};

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::graph::{Bitstring, Graph};
use crate::linalg::{self, ZERO};

/// Largest vertex count for which dense `2^n x 2^n` operators are built.
pub const MAX_DENSE_VERTICES: usize = 12;

/// Dense Hermitian operator indexed by bitstrings (bit `j` = vertex `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    n: usize,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(n: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.nrows(),
            });
        }
        Ok(Operator { n, matrix })
    }

    fn zeros(n: usize) -> Result<Self> {
        check_dense(n)?;
        let dim = 1usize << n;
        Ok(Operator {
            n,
            matrix: DMatrix::from_element(dim, dim, ZERO),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: Bitstring, col: Bitstring) -> C64 {
        self.matrix[(row.0 as usize, col.0 as usize)]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|z| *z == ZERO)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        linalg::hermiticity_defect(&self.matrix) <= rel_tol
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// `(row, col, re, im)` lines for every nonzero entry.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in 0..self.dim() {
            for r in 0..self.dim() {
                let z = self.matrix[(r, c)];
                if z != ZERO {
                    let _ = writeln!(out, "{r} {c} {} {}", z.re + 0.0, z.im + 0.0);
                }
            }
        }
        out
    }
}

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_VERTICES {
        return Err(Error::Capacity {
            what: "dense operator",
            n,
            max: MAX_DENSE_VERTICES,
        });
    }
    Ok(())
}

fn diagonal_operator(n: usize, f: impl Fn(Bitstring) -> f64) -> Result<Operator> {
    let mut op = Operator::zeros(n)?;
    for i in 0..op.dim() {
        op.matrix[(i, i)] = C64::from(f(Bitstring(i as u32)));
    }
    Ok(op)
}

/// `Ĥ_2 = Σ V_ij n̂_i n̂_j`, diagonal in the computational basis.
pub fn build_h2(g: &Graph) -> Result<Operator> {
    diagonal_operator(g.n(), |s| g.interaction_energy(s))
}

/// `Ĥ_2'`: the same edge set with every strength replaced by `v0`.
pub fn build_h2_uniform(g: &Graph, v0: f64) -> Result<Operator> {
    build_h2(&g.with_uniform_interaction(v0)?)
}

/// Dense form of a uniform single-spin field on `n` spins.
pub fn build_field(field: SpinField, n: usize) -> Result<Operator> {
    let mut op = Operator::zeros(n)?;
    let c = field.transverse();
    for i in 0..op.dim() {
        let s = Bitstring(i as u32);
        op.matrix[(i, i)] = C64::from(field.z * (2.0 * s.count() as f64 - n as f64));
        for j in 0..n {
            let k = s.flip(j).0 as usize;
            // <k| f·σ_j |i>: lowering (1 -> 0) carries x + iy
            op.matrix[(k, i)] = if s.contains(j) { c } else { c.conj() };
        }
    }
    Ok(op)
}

/// `Ĥ_1 = (Ω/2)cosφ Σσ^x + (Ω/2)sinφ Σσ^y - (Δ/2) Σσ^z`.
pub fn build_h1_controls(omega: f64, phase: f64, detuning: f64, n: usize) -> Result<Operator> {
    build_field(SpinField::from_controls(omega, phase, detuning), n)
}

/// `Ĥ_1 = (μ × μ')·Σ σ_j` for the full frame at time `t`.
pub fn build_h1_frame(t: f64, rates: &FrameRates, n: usize) -> Result<Operator> {
    build_field(rates.field(t), n)
}

/// Dense frame unitary `U(t) = V(t)^{⊗n}`.
pub fn frame_unitary(t: f64, rates: &FrameRates, kind: FrameKind, n: usize) -> Result<DMatrix<C64>> {
    check_dense(n)?;
    Ok(linalg::tensor_power(&rates.single_qubit(kind, t), n))
}

/// `Ĥ_PK(t) = U(t) Ĥ_2' U†(t)` in the full frame.
pub fn build_h_pk(t: f64, g: &Graph, v0: f64, rates: &FrameRates) -> Result<Operator> {
    let h2 = build_h2_uniform(g, v0)?;
    let u = frame_unitary(t, rates, FrameKind::Full, g.n())?;
    Operator::from_matrix(g.n(), &u * h2.matrix * u.adjoint())
}
