//! State-vector time evolution in the laboratory (Schrödinger) picture and in
//! the rotating-frame interaction picture.
//!
//! Every step is a piecewise-constant propagator `exp(-i H dt)` evaluated to
//! machine precision, so norm conservation does not depend on the step size;
//! only the sampling of the time dependence does.

mod measure;
mod propagate;

pub use measure::{observables, observables_with, sample_shots, Observables, ShotCounts};
pub use propagate::{Integrator, LabGenerator, RotatedDiagonal};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Bitstring, Graph, ISBasis};
use crate::linalg::{self, Scratch, ZERO};
use crate::operators::{gauge, FrameKind, FrameRates};
use crate::schedule::Schedule;

/// Largest vertex count simulated in the full `2^n` space.
pub const MAX_STATE_VERTICES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Picture {
    Schroedinger,
    Interaction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    picture: Picture,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|s>` for a single configuration.
    pub fn basis(n: usize, s: Bitstring, picture: Picture) -> Result<Self> {
        if n > MAX_STATE_VERTICES {
            return Err(Error::Capacity {
                what: "state vector",
                n,
                max: MAX_STATE_VERTICES,
            });
        }
        if !s.fits(n) {
            return Err(Error::invalid(format!("bitstring {:#b} does not fit {n} bits", s.0)));
        }
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[s.0 as usize] = C64::from(1.0);
        Ok(StateVector { n, picture, amplitudes })
    }

    /// No Rydberg excitations, `|0...0>`.
    pub fn ground(n: usize, picture: Picture) -> Result<Self> {
        Self::basis(n, Bitstring::EMPTY, picture)
    }

    pub fn from_amplitudes(n: usize, picture: Picture, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: amplitudes.len(),
            });
        }
        Ok(StateVector { n, picture, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `|<self|other>|`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    /// Time steps over the whole schedule.
    pub steps: usize,
    pub integrator: Integrator,
    /// Self-convergence target: when set, the step count is doubled until
    /// the final probabilities change by at most this much.
    pub tolerance: Option<f64>,
    /// Maximum number of doublings for the self-convergence check.
    pub max_refinements: usize,
    /// Number of evenly spaced snapshots to record (0 = final state only).
    pub record_points: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            steps: 2000,
            integrator: Integrator::Midpoint,
            tolerance: None,
            max_refinements: 4,
            record_points: 0,
        }
    }
}

impl EvolveConfig {
    pub fn with_steps(steps: usize) -> Self {
        EvolveConfig {
            steps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("step count must be positive"));
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) {
                return Err(Error::invalid("tolerance must be positive"));
            }
        }
        if self.record_points > 0 && self.steps % self.record_points != 0 {
            return Err(Error::invalid(format!(
                "step count {} must be a multiple of record points {}",
                self.steps, self.record_points
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps: usize,
    /// `| ||ψ(T)|| - 1 |`, worst over recorded snapshots.
    pub norm_drift: f64,
    pub refinements: usize,
    /// Largest probability change in the last step doubling, when checked.
    pub self_convergence: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: StateVector,
    /// `(t, state)` snapshots including `t = 0`, when requested.
    pub trajectory: Vec<(f64, StateVector)>,
    pub diagnostics: Diagnostics,
}

const NORM_TOLERANCE: f64 = 1e-9;

fn check_initial(psi0: &StateVector, n: usize, picture: Picture) -> Result<()> {
    if psi0.n != n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: psi0.amplitudes.len(),
        });
    }
    if psi0.picture != picture {
        return Err(Error::invalid(format!(
            "initial state is in the {:?} picture, expected {picture:?}",
            psi0.picture
        )));
    }
    if (psi0.norm() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::invalid(format!("initial state norm {} is not 1", psi0.norm())));
    }
    Ok(())
}

/// Runs `step(t0, dt, psi)` over `[0, total]`, recording snapshots.
fn integrate<F>(psi0: &StateVector, total: f64, cfg: &EvolveConfig, steps: usize, mut step: F) -> Evolution
where
    F: FnMut(f64, f64, &mut [C64], &mut Scratch),
{
    let dt = total / steps as f64;
    let mut psi = psi0.amplitudes.clone();
    let mut scratch = Scratch::default();
    let record_every = if cfg.record_points > 0 {
        steps / cfg.record_points
    } else {
        0
    };
    let mut trajectory = Vec::new();
    if record_every > 0 {
        trajectory.push((0.0, psi0.clone()));
    }
    let mut drift: f64 = 0.0;
    for k in 0..steps {
        step(k as f64 * dt, dt, &mut psi, &mut scratch);
        if record_every > 0 && (k + 1) % record_every == 0 {
            let snap = StateVector {
                amplitudes: psi.clone(),
                ..psi0.clone()
            };
            drift = drift.max((snap.norm() - 1.0).abs());
            trajectory.push(((k + 1) as f64 * dt, snap));
        }
    }
    let state = StateVector {
        amplitudes: psi,
        ..psi0.clone()
    };
    drift = drift.max((state.norm() - 1.0).abs());
    Evolution {
        state,
        trajectory,
        diagnostics: Diagnostics {
            steps,
            norm_drift: drift,
            refinements: 0,
            self_convergence: None,
        },
    }
}

/// Applies the configured self-convergence policy around `run(steps)`.
fn converge<F>(cfg: &EvolveConfig, mut run: F) -> Result<Evolution>
where
    F: FnMut(usize) -> Evolution,
{
    cfg.validate()?;
    let mut current = run(cfg.steps);
    let Some(tol) = cfg.tolerance else {
        return finish(current);
    };
    for refinement in 1..=cfg.max_refinements {
        let finer = run(current.diagnostics.steps * 2);
        let change = max_probability_change(&current.state, &finer.state);
        current = finer;
        current.diagnostics.refinements = refinement;
        current.diagnostics.self_convergence = Some(change);
        if change <= tol {
            return finish(current);
        }
    }
    Err(Error::Convergence {
        steps: current.diagnostics.steps,
        achieved: current.diagnostics.self_convergence.unwrap_or(f64::INFINITY),
        tolerance: tol,
    })
}

fn finish(ev: Evolution) -> Result<Evolution> {
    if !ev.state.amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("state amplitude".into()));
    }
    if ev.diagnostics.norm_drift > NORM_TOLERANCE {
        return Err(Error::Convergence {
            steps: ev.diagnostics.steps,
            achieved: ev.diagnostics.norm_drift,
            tolerance: NORM_TOLERANCE,
        });
    }
    Ok(ev)
}

fn max_probability_change(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
        .fold(0.0, f64::max)
}

/// Evolves `ψ0` under `Ĥ_1(t) + Ĥ_2` with `Ĥ_1` driven by the schedule's
/// controls and `Ĥ_2` the graph's interactions.
pub fn evolve_schroedinger(g: &Graph, s: &Schedule, cfg: &EvolveConfig, psi0: &StateVector) -> Result<Evolution> {
    check_initial(psi0, g.n(), Picture::Schroedinger)?;
    let lab = LabGenerator::new(g);
    converge(cfg, |steps| {
        integrate(psi0, s.total_time(), cfg, steps, |t, dt, psi, scratch| {
            cfg.integrator.step_lab(&lab, |t| s.field(t), t, dt, psi, scratch)
        })
    })
}

/// Interaction operator conjugated by the frame in the interaction picture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Interaction {
    /// The graph's own strengths `V_ij`.
    Graph,
    /// Every edge at the same strength `V0`.
    Uniform(f64),
}

/// Evolves `ψ_I(0)` under `U(t) Ĥ_2 U†(t)`.
pub fn evolve_interaction(
    g: &Graph,
    rates: &FrameRates,
    kind: FrameKind,
    interaction: Interaction,
    cfg: &EvolveConfig,
    psi0: &StateVector,
) -> Result<Evolution> {
    check_initial(psi0, g.n(), Picture::Interaction)?;
    let graph = match interaction {
        Interaction::Graph => g.clone(),
        Interaction::Uniform(v0) => g.with_uniform_interaction(v0)?,
    };
    let diag = propagate::interaction_diagonal(&graph);
    converge(cfg, |steps| {
        integrate(psi0, rates.total_time(), cfg, steps, |t, dt, psi, scratch| {
            cfg.integrator.step_rotated(&diag, rates, kind, g.n(), t, dt, psi, scratch)
        })
    })
}

/// Evolves the independent-set component of `|0...0>` under `P Ĥ_1 P`
/// (the negated gauge matrix) and returns the laboratory-picture state
/// embedded in the full space.
pub fn evolve_reduced(basis: &ISBasis, rates: &FrameRates, kind: FrameKind, cfg: &EvolveConfig) -> Result<StateVector> {
    cfg.validate()?;
    let empty = basis
        .index_of(Bitstring::EMPTY)
        .ok_or_else(|| Error::invalid("basis lacks the empty set"))?;
    let mut sub = vec![ZERO; basis.len()];
    sub[empty] = C64::from(1.0);
    let mut scratch = Scratch::default();
    let total = rates.total_time();
    let dt = total / cfg.steps as f64;
    for k in 0..cfg.steps {
        let t = k as f64 * dt;
        gauge::propagate_projected(rates, kind, basis, t, t + dt, &mut sub, &mut scratch);
    }
    let mut full = StateVector::ground(basis.n(), Picture::Schroedinger)?;
    full.amplitudes.fill(ZERO);
    for (i, s) in basis.states().iter().enumerate() {
        full.amplitudes[s.0 as usize] = sub[i];
    }
    Ok(full)
}

/// Direction of [`frame_map`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameDirection {
    /// `|Φ_I> = U(t) |Φ_S>`.
    ToInteraction,
    /// `|Φ_S> = U†(t) |Φ_I>`.
    ToSchroedinger,
}

/// Maps a state between pictures with `U(t) = V(t)^{⊗n}`.
pub fn frame_map(
    psi: &StateVector,
    t: f64,
    rates: &FrameRates,
    kind: FrameKind,
    direction: FrameDirection,
) -> Result<StateVector> {
    let (expected, target, m) = match direction {
        FrameDirection::ToInteraction => (Picture::Schroedinger, Picture::Interaction, rates.single_qubit(kind, t)),
        FrameDirection::ToSchroedinger => (
            Picture::Interaction,
            Picture::Schroedinger,
            rates.single_qubit(kind, t).adjoint(),
        ),
    };
    if psi.picture != expected {
        return Err(Error::invalid(format!(
            "state is in the {:?} picture, cannot map {direction:?}",
            psi.picture
        )));
    }
    let mut amplitudes = psi.amplitudes.clone();
    linalg::apply_to_every_qubit(&mut amplitudes, &m, psi.n);
    Ok(StateVector {
        n: psi.n,
        picture: target,
        amplitudes,
    })
}

/// One simulated run of a schedule on a graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub graph_id: usize,
    pub schedule: Schedule,
    pub p_mis: f64,
    pub p_is: f64,
    /// Final probability of every configuration, indexed by bitstring.
    pub distribution: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl RunResult {
    /// Configurations with the `k` largest probabilities (ties by bitstring).
    pub fn top(&self, k: usize) -> Vec<(Bitstring, f64)> {
        let mut v: Vec<(Bitstring, f64)> = self
            .distribution
            .iter()
            .enumerate()
            .map(|(i, &p)| (Bitstring(i as u32), p))
            .collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }

    /// One-line JSON record: parameters, probabilities, top configurations
    /// and integrator diagnostics.
    pub fn to_json_line(&self, n: usize, top_k: usize) -> Result<String> {
        let top: Vec<_> = self
            .top(top_k)
            .into_iter()
            .map(|(s, p)| serde_json::json!({ "bitstring": s.to_string_n(n), "probability": p }))
            .collect();
        let record = serde_json::json!({
            "graph_id": self.graph_id,
            "schedule_kind": self.schedule.kind().label(),
            "parameters": self.schedule,
            "p_mis": self.p_mis,
            "p_is": self.p_is,
            "top": top,
            "diagnostics": self.diagnostics,
        });
        Ok(serde_json::to_string(&record)?)
    }
}

/// Simulates a schedule from `|0...0>` in the laboratory picture and reads
/// out `P_MIS` and `P_IS`.
pub fn run_schedule(g: &Graph, graph_id: usize, s: &Schedule, cfg: &EvolveConfig) -> Result<RunResult> {
    let basis = crate::graph::enumerate_independent_sets(g)?;
    let mis = crate::graph::maximum_sets_of(&basis);
    run_schedule_with(g, graph_id, s, cfg, &basis, &mis)
}

pub fn run_schedule_with(
    g: &Graph,
    graph_id: usize,
    s: &Schedule,
    cfg: &EvolveConfig,
    basis: &ISBasis,
    mis: &crate::graph::MaximumSets,
) -> Result<RunResult> {
    let psi0 = StateVector::ground(g.n(), Picture::Schroedinger)?;
    let ev = evolve_schroedinger(g, s, cfg, &psi0)?;
    let obs = observables_with(&ev.state, basis, mis)?;
    Ok(RunResult {
        graph_id,
        schedule: s.clone(),
        p_mis: obs.p_mis,
        p_is: obs.p_is,
        distribution: obs.distribution,
        diagnostics: ev.diagnostics,
    })
}
