use std::cell::RefCell;

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::graph::{Bitstring, Graph};
use crate::linalg::{self, expm_apply, Generator, Scratch};
use crate::operators::{FrameKind, FrameRates, SpinField};

/// How the time dependence inside one step is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// One exponential of the Hamiltonian at the step midpoint (order 2).
    Midpoint,
    /// Two exponentials of Gauss-point combinations (commutator-free
    /// Magnus, order 4).
    Magnus4,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;
const GAUSS_1: f64 = 0.5 - SQRT3 / 6.0;
const GAUSS_2: f64 = 0.5 + SQRT3 / 6.0;
const CF4_A1: f64 = (3.0 - 2.0 * SQRT3) / 12.0;
const CF4_A2: f64 = (3.0 + 2.0 * SQRT3) / 12.0;

fn combine(a: SpinField, wa: f64, b: SpinField, wb: f64) -> SpinField {
    SpinField::new(wa * a.x + wb * b.x, wa * a.y + wb * b.y, wa * a.z + wb * b.z)
}

impl Integrator {
    pub(crate) fn step_lab<F: Fn(f64) -> SpinField>(
        self,
        lab: &LabGenerator,
        field: F,
        t: f64,
        dt: f64,
        psi: &mut [C64],
        scratch: &mut Scratch,
    ) {
        match self {
            Integrator::Midpoint => {
                let gen = lab.at(1.0, field(t + 0.5 * dt));
                expm_apply(&gen, dt, psi, scratch);
            }
            Integrator::Magnus4 => {
                let (f1, f2) = (field(t + GAUSS_1 * dt), field(t + GAUSS_2 * dt));
                // each factor runs for dt/2, so the constant interaction keeps
                // weight 1 and the field weights are doubled
                expm_apply(&lab.at(1.0, combine(f1, 2.0 * CF4_A2, f2, 2.0 * CF4_A1)), 0.5 * dt, psi, scratch);
                expm_apply(&lab.at(1.0, combine(f1, 2.0 * CF4_A1, f2, 2.0 * CF4_A2)), 0.5 * dt, psi, scratch);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn step_rotated(
        self,
        diag: &[f64],
        rates: &FrameRates,
        kind: FrameKind,
        n: usize,
        t: f64,
        dt: f64,
        psi: &mut [C64],
        scratch: &mut Scratch,
    ) {
        let rot = |s: f64, w: f64| RotatedDiagonal::new(diag, rates.single_qubit(kind, s), n, w);
        match self {
            Integrator::Midpoint => expm_apply(&rot(t + 0.5 * dt, 1.0), dt, psi, scratch),
            Integrator::Magnus4 => {
                let (t1, t2) = (t + GAUSS_1 * dt, t + GAUSS_2 * dt);
                let first = Pair::new(rot(t1, CF4_A2), rot(t2, CF4_A1));
                expm_apply(&first, dt, psi, scratch);
                let second = Pair::new(rot(t1, CF4_A1), rot(t2, CF4_A2));
                expm_apply(&second, dt, psi, scratch);
            }
        }
    }
}

/// Laboratory Hamiltonian `w Ĥ_2 + f·Σσ`, applied matrix-free.
pub struct LabGenerator {
    n: usize,
    interaction: Vec<f64>,
    magnetisation: Vec<f64>,
}

impl LabGenerator {
    pub fn new(g: &Graph) -> Self {
        let dim = 1usize << g.n();
        LabGenerator {
            n: g.n(),
            interaction: interaction_diagonal(g),
            magnetisation: (0..dim)
                .map(|i| 2.0 * Bitstring(i as u32).count() as f64 - g.n() as f64)
                .collect(),
        }
    }

    /// The generator with `Ĥ_2` weighted by `weight` and the given field.
    pub fn at(&self, weight: f64, field: SpinField) -> LabStep {
        let diag: Vec<f64> = self
            .interaction
            .iter()
            .zip(&self.magnetisation)
            .map(|(v, m)| weight * v + field.z * m)
            .collect();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        let shift = 0.5 * (lo + hi);
        let transverse = field.transverse();
        LabStep {
            n: self.n,
            diag,
            shift,
            transverse,
            bound: 0.5 * (hi - lo) + self.n as f64 * transverse.norm(),
        }
    }
}

pub struct LabStep {
    n: usize,
    diag: Vec<f64>,
    shift: f64,
    transverse: C64,
    bound: f64,
}

impl Generator for LabStep {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_shifted(&self, psi: &[C64], out: &mut [C64]) {
        for ((o, p), d) in out.iter_mut().zip(psi).zip(&self.diag) {
            *o = p * (d - self.shift);
        }
        if self.transverse == C64::new(0.0, 0.0) {
            return;
        }
        let (c, cc) = (self.transverse, self.transverse.conj());
        for j in 0..self.n {
            let bit = 1usize << j;
            for i0 in 0..psi.len() {
                if i0 & bit != 0 {
                    continue;
                }
                let i1 = i0 | bit;
                out[i0] += c * psi[i1];
                out[i1] += cc * psi[i0];
            }
        }
    }

    fn shift(&self) -> f64 {
        self.shift
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }
}

pub(crate) fn interaction_diagonal(g: &Graph) -> Vec<f64> {
    (0..1usize << g.n())
        .map(|i| g.interaction_energy(Bitstring(i as u32)))
        .collect()
}

/// `w U D U†` for a diagonal `D` and `U = V^{⊗n}`.
pub struct RotatedDiagonal<'a> {
    diag: &'a [f64],
    v: Matrix2<C64>,
    v_dag: Matrix2<C64>,
    n: usize,
    weight: f64,
    center: f64,
    half_width: f64,
}

impl<'a> RotatedDiagonal<'a> {
    pub fn new(diag: &'a [f64], v: Matrix2<C64>, n: usize, weight: f64) -> Self {
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        RotatedDiagonal {
            diag,
            v,
            v_dag: v.adjoint(),
            n,
            weight,
            center: 0.5 * (lo + hi),
            half_width: 0.5 * (hi - lo),
        }
    }
}

impl Generator for RotatedDiagonal<'_> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_shifted(&self, psi: &[C64], out: &mut [C64]) {
        out.copy_from_slice(psi);
        linalg::apply_to_every_qubit(out, &self.v_dag, self.n);
        for (o, d) in out.iter_mut().zip(self.diag) {
            *o *= self.weight * (d - self.center);
        }
        linalg::apply_to_every_qubit(out, &self.v, self.n);
    }

    fn shift(&self) -> f64 {
        self.weight * self.center
    }

    fn norm_bound(&self) -> f64 {
        self.weight.abs() * self.half_width
    }
}

/// Sum of two generators.
struct Pair<A, B> {
    a: A,
    b: B,
    buf: RefCell<Vec<C64>>,
}

impl<A: Generator, B: Generator> Pair<A, B> {
    fn new(a: A, b: B) -> Self {
        let dim = a.dim();
        Pair {
            a,
            b,
            buf: RefCell::new(vec![C64::new(0.0, 0.0); dim]),
        }
    }
}

impl<A: Generator, B: Generator> Generator for Pair<A, B> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply_shifted(&self, psi: &[C64], out: &mut [C64]) {
        let mut buf = self.buf.borrow_mut();
        self.a.apply_shifted(psi, out);
        self.b.apply_shifted(psi, &mut buf);
        out.iter_mut().zip(buf.iter()).for_each(|(o, b)| *o += b);
    }

    fn shift(&self) -> f64 {
        self.a.shift() + self.b.shift()
    }

    fn norm_bound(&self) -> f64 {
        self.a.norm_bound() + self.b.norm_bound()
    }
}
