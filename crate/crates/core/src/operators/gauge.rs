use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{FrameKind, FrameRates, Operator, SpinField};
use crate::error::{Error, Result};
use crate::graph::ISBasis;
use crate::linalg::{self, DenseGenerator, Scratch, ZERO};

/// Hermitian matrix over independent-set indices at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeMatrix {
    pub t: f64,
    pub matrix: DMatrix<C64>,
}

impl GaugeMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Index pairs `(a, b)`, `a < b`, with `|M_ab| > tol`.
    pub fn off_diagonal_support(&self, tol: f64) -> Vec<(usize, usize)> {
        let d = self.dim();
        let mut out = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                if self.matrix[(a, b)].norm() > tol {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// `P f·Σσ P` on the independent-set subspace.
fn projected_field(field: SpinField, basis: &ISBasis) -> DMatrix<C64> {
    let n = basis.n();
    let d = basis.len();
    let c = field.transverse();
    let mut m = DMatrix::from_element(d, d, ZERO);
    for (a, &s) in basis.states().iter().enumerate() {
        m[(a, a)] = C64::from(field.z * (2.0 * s.count() as f64 - n as f64));
        for j in 0..n {
            if let Some(b) = basis.index_of(s.flip(j)) {
                m[(b, a)] = if s.contains(j) { c } else { c.conj() };
            }
        }
    }
    m
}

/// Gauge matrix `A(t) = -P Ĥ_1(t) P` restricted to the independent sets.
pub fn gauge_matrix(t: f64, basis: &ISBasis, rates: &FrameRates, kind: FrameKind) -> GaugeMatrix {
    GaugeMatrix {
        t,
        matrix: -projected_field(rates.field_for(kind, t), basis),
    }
}

/// Projected transverse field `(Ω/2) P Σσ^x P`. On a path graph this is the
/// PXP chain.
pub fn pxp_hamiltonian(omega: f64, basis: &ISBasis) -> GaugeMatrix {
    GaugeMatrix {
        t: 0.0,
        matrix: projected_field(SpinField::new(0.5 * omega, 0.0, 0.0), basis),
    }
}

/// Restriction of a full-space operator to the independent-set subspace.
pub fn project(op: &Operator, basis: &ISBasis) -> DMatrix<C64> {
    let d = basis.len();
    DMatrix::from_fn(d, d, |a, b| op.get(basis.get(a), basis.get(b)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    /// Minimum followed gap divided by `|ω_φ|`.
    pub delta: f64,
    /// Minimum followed gap in rad/μs.
    pub min_gap: f64,
    /// Grid time at which the minimum occurs.
    pub at_time: f64,
    /// `(t, followed gap)` at every grid time.
    pub samples: Vec<(f64, f64)>,
}

/// Minimum gap of `A(t)` around the band of levels followed by the state.
///
/// The state starts on the empty set at `grid[0]` and is propagated under
/// `P Ĥ_1 P` between grid times. At each grid time the followed eigenvector is
/// the one with maximal overlap with the state. The band around it has one
/// level per maximum independent set, since mixing among those levels still
/// ends on a maximum set, and the gap is the distance from the band to the
/// rest of the spectrum. With a unique maximum set this is the distance from
/// the followed level to its nearest neighbour.
pub fn min_gap_delta(rates: &FrameRates, kind: FrameKind, basis: &ISBasis, grid: &[f64]) -> Result<GapReport> {
    if grid.is_empty() {
        return Err(Error::invalid("gap grid is empty"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("gap grid must be ascending"));
    }
    if basis.len() < 2 {
        return Err(Error::invalid("gap needs at least two independent sets"));
    }
    if rates.omega_phi == 0.0 {
        return Err(Error::invalid("ω_φ must be nonzero to normalise the gap"));
    }
    let empty = basis
        .index_of(crate::graph::Bitstring::EMPTY)
        .ok_or_else(|| Error::invalid("basis lacks the empty set"))?;
    let mut psi = vec![ZERO; basis.len()];
    psi[empty] = C64::from(1.0);
    let mut scratch = Scratch::default();
    let mut spectra = Vec::with_capacity(grid.len());

    for (k, &t) in grid.iter().enumerate() {
        let a = gauge_matrix(t, basis, rates, kind);
        let (values, vectors) = linalg::hermitian_eigen(&a.matrix);
        let state = DVector::from_column_slice(&psi);
        let followed = (0..values.len())
            .map(|i| (i, vectors.column(i).dotc(&state).norm_sqr()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        spectra.push((values, followed));

        if let Some(&next) = grid.get(k + 1) {
            propagate_projected(rates, kind, basis, t, next, &mut psi, &mut scratch);
        }
    }

    let band = crate::graph::maximum_sets_of(basis).sets.len();
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .zip(&spectra)
        .map(|(&t, (values, followed))| (t, band_gap(values, *followed, band)))
        .collect();

    let (at_time, min_gap) = samples
        .iter()
        .copied()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("grid is nonempty");
    Ok(GapReport {
        delta: min_gap / rates.omega_phi.abs(),
        min_gap,
        at_time,
        samples,
    })
}

/// Largest isolation of `band` consecutive levels containing `followed`
/// (ascending `values`).
fn band_gap(values: &[f64], followed: usize, band: usize) -> f64 {
    let d = values.len();
    let band = band.clamp(1, d - 1);
    let first = followed.saturating_sub(band - 1);
    let last = followed.min(d - band);
    (first..=last)
        .map(|lo| {
            let below = if lo > 0 { values[lo] - values[lo - 1] } else { f64::INFINITY };
            let hi = lo + band - 1;
            let above = if hi + 1 < d { values[hi + 1] - values[hi] } else { f64::INFINITY };
            below.min(above)
        })
        .fold(0.0, f64::max)
}

/// Midpoint propagation under `P Ĥ_1 P` from `t0` to `t1`.
pub(crate) fn propagate_projected(
    rates: &FrameRates,
    kind: FrameKind,
    basis: &ISBasis,
    t0: f64,
    t1: f64,
    psi: &mut [C64],
    scratch: &mut Scratch,
) {
    let span = t1 - t0;
    if span == 0.0 {
        return;
    }
    let scale = rates.omega_theta.abs() + 2.0 * rates.omega_phi.abs();
    let steps = ((span.abs() * scale * basis.n().max(1) as f64) / 0.02).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    for k in 0..steps {
        let tm = t0 + (k as f64 + 0.5) * dt;
        let h = -gauge_matrix(tm, basis, rates, kind).matrix;
        linalg::expm_apply(&DenseGenerator::new(&h), dt, psi, scratch);
    }
}
