//! Variational optimization of knot paths by finite-difference gradient
//! ascent on `P_MIS`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{self, EvolveConfig, Picture, StateVector};
use crate::error::{Error, Result};
use crate::graph::{Graph, ISBasis, MaximumSets};
use crate::schedule::{knots_to_schedule, KnotPath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn label(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sgd" => Ok(OptimizerKind::Sgd),
            "adam" => Ok(OptimizerKind::Adam),
            other => Err(Error::invalid(format!("unknown optimizer `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub optimizer: OptimizerKind,
    /// Initial learning rate `lr₀`.
    pub learning_rate: f64,
    /// Decay `γ` in `lr₀ / (1 + γ·step)`; SGD only.
    pub decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Finite-difference step in rad/μs.
    pub fd_step: f64,
    pub max_steps: usize,
    /// Shots per objective evaluation; 0 evaluates `P_MIS` exactly.
    pub shots: u64,
    pub readout_error: f64,
    pub seed: u64,
    pub evolve: EvolveConfig,
}

impl OptConfig {
    pub fn new(optimizer: OptimizerKind) -> Self {
        let (learning_rate, decay) = match optimizer {
            OptimizerKind::Sgd => (400.0, 0.01),
            OptimizerKind::Adam => (2.0, 0.0),
        };
        OptConfig {
            optimizer,
            learning_rate,
            decay,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            fd_step: 0.5,
            max_steps: 500,
            shots: 0,
            readout_error: 0.0,
            seed: 0,
            evolve: EvolveConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps < 1 {
            return Err(Error::invalid("max steps must be at least 1"));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::invalid("finite-difference step must be positive"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(self.decay >= 0.0) {
            return Err(Error::invalid("decay must be non-negative"));
        }
        if !(0.0..0.5).contains(&self.readout_error) {
            return Err(Error::invalid("readout error must lie in [0, 1/2)"));
        }
        self.evolve.validate()
    }

    /// Objective evaluations charged per optimization step.
    pub fn evaluations_per_step(&self, parameters: usize) -> u64 {
        2 * parameters as u64
    }
}

/// `P_MIS` of knot paths on one graph, exact or shot-estimated.
pub struct Objective<'a> {
    graph: &'a Graph,
    basis: ISBasis,
    mis: MaximumSets,
    evolve: EvolveConfig,
}

impl<'a> Objective<'a> {
    pub fn new(graph: &'a Graph, evolve: EvolveConfig) -> Result<Self> {
        let basis = crate::graph::enumerate_independent_sets(graph)?;
        let mis = crate::graph::maximum_sets_of(&basis);
        Ok(Objective {
            graph,
            basis,
            mis,
            evolve,
        })
    }

    fn final_state(&self, path: &KnotPath) -> Result<StateVector> {
        let s = knots_to_schedule(path.clone())?;
        let psi0 = StateVector::ground(self.graph.n(), Picture::Schroedinger)?;
        Ok(engine::evolve_schroedinger(self.graph, &s, &self.evolve, &psi0)?.state)
    }

    pub fn exact(&self, path: &KnotPath) -> Result<f64> {
        let psi = self.final_state(path)?;
        let v = engine::observables_with(&psi, &self.basis, &self.mis)?.p_mis;
        finite(v)
    }

    /// Shot estimate with readout flips; `shots = 0` falls back to exact.
    pub fn estimate(&self, path: &KnotPath, shots: u64, readout_error: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
        if shots == 0 {
            return self.exact(path);
        }
        let psi = self.final_state(path)?;
        let counts = engine::sample_shots(&psi, shots, readout_error, rng)?;
        finite(counts.p_mis(&self.mis))
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("objective".into()))
    }
}

/// Central differences `(f(x+h) - f(x-h)) / 2h`. Parameters listed in
/// `nonneg` are never evaluated below zero; there the stencil becomes
/// one-sided and is divided by the actual spacing.
pub fn central_gradient<F>(x: &[f64], h: f64, nonneg: std::ops::Range<usize>, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let hi = x[i] + h;
        let lo = if nonneg.contains(&i) { (x[i] - h).max(0.0) } else { x[i] - h };
        probe[i] = hi;
        let f_hi = f(&probe)?;
        probe[i] = lo;
        let f_lo = f(&probe)?;
        probe[i] = x[i];
        grad.push((f_hi - f_lo) / (hi - lo));
    }
    Ok(grad)
}

/// `x <- x + lr(step)·g` with `lr(step) = lr₀ / (1 + γ·step)`.
pub fn sgd_step(params: &mut [f64], grad: &[f64], step: usize, cfg: &OptConfig) {
    let lr = cfg.learning_rate / (1.0 + cfg.decay * step as f64);
    for (x, g) in params.iter_mut().zip(grad) {
        *x += lr * g;
    }
}

/// First and second moment estimates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }
}

/// Bias-corrected Adam ascent update.
pub fn adam_step(params: &mut [f64], grad: &[f64], state: &mut AdamState, cfg: &OptConfig) {
    state.t += 1;
    let b1t = 1.0 - cfg.beta1.powi(state.t as i32);
    let b2t = 1.0 - cfg.beta2.powi(state.t as i32);
    for i in 0..params.len() {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        let m_hat = state.m[i] / b1t;
        let v_hat = state.v[i] / b2t;
        params[i] += cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
}

/// Applies the configured optimizer to a parameter vector.
pub struct Stepper {
    kind: OptimizerKind,
    adam: AdamState,
    step: usize,
}

impl Stepper {
    pub fn new(cfg: &OptConfig, len: usize) -> Self {
        Stepper {
            kind: cfg.optimizer,
            adam: AdamState::new(len),
            step: 0,
        }
    }

    pub fn apply(&mut self, params: &mut [f64], grad: &[f64], cfg: &OptConfig) {
        match self.kind {
            OptimizerKind::Sgd => sgd_step(params, grad, self.step, cfg),
            OptimizerKind::Adam => adam_step(params, grad, &mut self.adam, cfg),
        }
        self.step += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub params: Vec<f64>,
    /// Exact `P_MIS` after the update.
    pub objective: f64,
    pub gradient_norm: f64,
    pub best_so_far: f64,
    pub cumulative_shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptTrace {
    pub optimizer: OptimizerKind,
    pub target: f64,
    pub initial_objective: f64,
    pub records: Vec<StepRecord>,
    /// Steps used, `S`.
    pub steps: usize,
    pub reached: bool,
    pub best: f64,
    pub final_path: KnotPath,
}

impl OptTrace {
    pub fn cumulative_shots(&self) -> u64 {
        self.records.last().map_or(0, |r| r.cumulative_shots)
    }

    pub fn hit_cap(&self, cfg: &OptConfig) -> bool {
        !self.reached && self.steps >= cfg.max_steps
    }

    pub fn to_jsonl(&self, graph_id: usize) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            let line = serde_json::json!({
                "graph_id": graph_id,
                "optimizer": self.optimizer,
                "step": r.step,
                "params": r.params,
                "objective": r.objective,
                "gradient_norm": r.gradient_norm,
                "best_so_far": r.best_so_far,
                "cumulative_shots": r.cumulative_shots,
            });
            out.push_str(&serde_json::to_string(&line)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Stopping target `min(0.99, reference)`.
pub fn target_for(reference: f64) -> f64 {
    reference.min(0.99)
}

/// Gradient ascent from `init` until the best exact objective reaches
/// `min(0.99, reference)` or `max_steps` updates have been made.
///
/// Only gradient evaluations are charged shots; the exact objective after
/// each update is bookkeeping.
pub fn optimize_path(g: &Graph, init: &KnotPath, cfg: &OptConfig, reference: f64) -> Result<OptTrace> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&reference) {
        return Err(Error::invalid(format!("reference {reference} must lie in [0, 1]")));
    }
    let objective = Objective::new(g, cfg.evolve.clone())?;
    let target = target_for(reference);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = init.params();
    let nonneg = init.omega_param_indices();
    let initial = objective.exact(init)?;
    let mut best = initial;
    let mut path = init.clone();
    let mut records = Vec::new();
    let mut shots_used = 0u64;
    let mut stepper = Stepper::new(cfg, params.len());
    let per_step = cfg.evaluations_per_step(params.len()) * cfg.shots;

    if best < target {
        for step in 1..=cfg.max_steps {
            let grad = central_gradient(&params, cfg.fd_step, nonneg.clone(), |x| {
                objective.estimate(&init.with_params(x)?, cfg.shots, cfg.readout_error, &mut rng)
            })?;
            shots_used += per_step;
            stepper.apply(&mut params, &grad, cfg);
            for i in nonneg.clone() {
                params[i] = params[i].max(0.0);
            }
            if params.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("parameters at step {step}")));
            }
            path = init.with_params(&params)?;
            let value = objective.exact(&path)?;
            best = best.max(value);
            records.push(StepRecord {
                step,
                params: params.clone(),
                objective: value,
                gradient_norm: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
                best_so_far: best,
                cumulative_shots: shots_used,
            });
            if best >= target {
                break;
            }
        }
    }
    Ok(OptTrace {
        optimizer: cfg.optimizer,
        target,
        initial_objective: initial,
        steps: records.len(),
        reached: best >= target,
        best,
        final_path: path,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{hv_unoptimized, HvPath, KnotBoundary};
    use crate::operators::FrameRates;

    fn toy(x: &[f64], c: &[f64]) -> f64 {
        1.0 - x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    }

    fn toy_steps(cfg: &OptConfig, budget: usize) -> Option<usize> {
        let c = [0.3, -0.7, 1.1];
        let mut x = vec![0.0; 3];
        let mut stepper = Stepper::new(cfg, 3);
        for step in 1..=budget {
            let g = central_gradient(&x, 1e-4, 0..0, |p| Ok(toy(p, &c))).unwrap();
            stepper.apply(&mut x, &g, cfg);
            if x.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-3) {
                return Some(step);
            }
        }
        None
    }

    #[test]
    fn toy_concave_convergence() {
        let mut sgd = OptConfig::new(OptimizerKind::Sgd);
        sgd.learning_rate = 0.1;
        assert!(toy_steps(&sgd, 200).is_some());
        let mut adam = OptConfig::new(OptimizerKind::Adam);
        adam.learning_rate = 0.05;
        assert!(toy_steps(&adam, 300).is_some());
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let cfg = OptConfig::new(OptimizerKind::Sgd);
        let mut x = vec![1.0, 2.0];
        sgd_step(&mut x, &[0.0, 0.0], 3, &cfg);
        assert_eq!(x, vec![1.0, 2.0]);
        let cfg = OptConfig::new(OptimizerKind::Adam);
        let mut st = AdamState::new(2);
        adam_step(&mut x, &[0.0, 0.0], &mut st, &cfg);
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn adam_first_step_is_lr_sized() {
        let cfg = OptConfig::new(OptimizerKind::Adam);
        let mut x = vec![0.0, 0.0];
        let mut st = AdamState::new(2);
        adam_step(&mut x, &[3.0, -1e-3], &mut st, &cfg);
        assert!((x[0] - cfg.learning_rate).abs() < 1e-6);
        assert!((x[1] + cfg.learning_rate).abs() < 1e-4);
    }

    #[test]
    fn sgd_decay() {
        let mut cfg = OptConfig::new(OptimizerKind::Sgd);
        cfg.learning_rate = 1.0;
        cfg.decay = 1.0;
        let mut x = vec![0.0];
        sgd_step(&mut x, &[1.0], 1, &cfg);
        assert_eq!(x[0], 0.5);
    }

    #[test]
    fn gradient_clips_nonnegative_parameters() {
        let g = central_gradient(&[0.0, 0.0], 0.5, 1..2, |p| {
            assert!(p[1] >= 0.0);
            Ok(2.0 * p[0] + 3.0 * p[1])
        })
        .unwrap();
        assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn early_exit_and_cap() {
        let g = Graph::edgeless(1).unwrap();
        let rates = FrameRates::for_duration(1.5, -11.0);
        let init = KnotPath::sample(&hv_unoptimized(HvPath::matching(&rates)).unwrap(), 4, KnotBoundary::Pinned).unwrap();
        let mut cfg = OptConfig::new(OptimizerKind::Sgd);
        cfg.evolve = EvolveConfig::with_steps(200);
        let tr = optimize_path(&g, &init, &cfg, 0.5).unwrap();
        assert!(tr.initial_objective >= 0.5);
        assert_eq!((tr.steps, tr.reached, tr.cumulative_shots()), (0, true, 0));

        cfg.max_steps = 1;
        cfg.learning_rate = 1e-9;
        cfg.shots = 100;
        let tr = optimize_path(&g, &init, &cfg, 1.0).unwrap();
        assert_eq!((tr.steps, tr.reached), (1, false));
        assert_eq!(tr.cumulative_shots(), 2 * init.parameter_count() as u64 * 100);
        assert!(tr.hit_cap(&cfg));
        assert!(optimize_path(&g, &init, &cfg, 1.5).is_err());
    }
}
