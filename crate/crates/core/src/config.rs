//! Experiment configuration: a `key = value` text file with `#` comments.
//!
//! Keys ending in `_mhz` are frequencies `f` entered in MHz and stored as
//! `2πf` rad/μs. Every other rate is rad/μs, times are μs.
//!
//! ```text
//! seed = 7
//! graphs = 200
//! vertices = 7
//! region = 4x4
//! v_nn_mhz = 107
//! v_nnn_mhz = 13
//! total_time = 1.5
//! phi_ratio = -11
//! schedules = pk-simplified, pk-simplified-phase, hv-unoptimized
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::engine::{EvolveConfig, Integrator};
use crate::error::{Error, Result};
use crate::graph::UnitDiskParams;
use crate::operators::FrameRates;
use crate::optimizer::{OptConfig, OptimizerKind};
use crate::schedule::{self, HvPath, Schedule};
use crate::units::{mhz_to_rad_per_us, rad_per_us_to_mhz};

/// Schedules selectable from a config file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleChoice {
    PkFull,
    /// Simplified path with `φ ≡ 0`.
    PkSimplified,
    /// Simplified path following the frame phase.
    PkSimplifiedPhase,
    HvUnoptimized,
}

impl ScheduleChoice {
    pub const ALL: [ScheduleChoice; 4] = [
        ScheduleChoice::PkFull,
        ScheduleChoice::PkSimplified,
        ScheduleChoice::PkSimplifiedPhase,
        ScheduleChoice::HvUnoptimized,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ScheduleChoice::PkFull => "pk-full",
            ScheduleChoice::PkSimplified => "pk-simplified",
            ScheduleChoice::PkSimplifiedPhase => "pk-simplified-phase",
            ScheduleChoice::HvUnoptimized => "hv-unoptimized",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub graphs: usize,
    pub vertices: usize,
    pub width: usize,
    pub height: usize,
    /// rad/μs.
    pub v_nn: f64,
    /// rad/μs.
    pub v_nnn: f64,
    pub total_time: f64,
    /// `ω_φ / ω_θ` with `ω_θ = π / T`.
    pub phi_ratio: f64,
    pub schedules: Vec<ScheduleChoice>,
    pub hv_ramp: f64,
    /// `None` follows `(ω_φ² + ω_θ²)^{1/2}`.
    pub hv_omega_max: Option<f64>,
    /// `None` follows `-|ω_φ|`.
    pub hv_delta_start: Option<f64>,
    pub hv_delta_end: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub tolerance: Option<f64>,
    pub optimizers: Vec<OptimizerKind>,
    pub knots: usize,
    pub sgd_learning_rate: f64,
    pub sgd_decay: f64,
    pub adam_learning_rate: f64,
    pub fd_step: f64,
    pub max_steps: usize,
    pub shots: u64,
    pub readout_error: f64,
    pub reference: ScheduleChoice,
    pub gap_points: usize,
    pub gap_graph: usize,
    pub histogram_bins: usize,
    pub top_k: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sgd = OptConfig::new(OptimizerKind::Sgd);
        let adam = OptConfig::new(OptimizerKind::Adam);
        ExperimentConfig {
            seed: None,
            graphs: 200,
            vertices: 7,
            width: 4,
            height: 4,
            v_nn: mhz_to_rad_per_us(107.0),
            v_nnn: mhz_to_rad_per_us(13.0),
            total_time: 1.5,
            phi_ratio: -11.0,
            schedules: vec![
                ScheduleChoice::PkSimplified,
                ScheduleChoice::PkSimplifiedPhase,
                ScheduleChoice::HvUnoptimized,
            ],
            hv_ramp: 0.12,
            hv_omega_max: None,
            hv_delta_start: None,
            hv_delta_end: schedule::HV_DELTA_END,
            steps: 2000,
            integrator: Integrator::Midpoint,
            tolerance: None,
            optimizers: vec![OptimizerKind::Sgd, OptimizerKind::Adam],
            knots: 7,
            sgd_learning_rate: sgd.learning_rate,
            sgd_decay: sgd.decay,
            adam_learning_rate: adam.learning_rate,
            fd_step: sgd.fd_step,
            max_steps: sgd.max_steps,
            shots: 0,
            readout_error: 0.0,
            reference: ScheduleChoice::PkSimplified,
            gap_points: 200,
            gap_graph: 0,
            histogram_bins: 20,
            top_k: 5,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// MHz value at 13 significant digits, which hides the rounding of the
/// 2π conversion and re-parses within one part in 10^12.
fn echo_mhz(rad_per_us: f64) -> String {
    let mhz: f64 = format!("{:.12e}", rad_per_us_to_mhz(rad_per_us)).parse().unwrap_or(f64::NAN);
    mhz.to_string()
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_list<T>(key: &str, value: &str, f: impl Fn(&str) -> Option<T>) -> std::result::Result<Vec<T>, String> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| f(s).ok_or_else(|| format!("unknown entry `{s}` in `{key}`")))
        .collect::<std::result::Result<_, _>>()?;
    if items.is_empty() {
        return Err(format!("`{key}` must list at least one entry"));
    }
    Ok(items)
}

impl ExperimentConfig {
    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
            cfg.set(key, value.trim()).map_err(parse_err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not `key=value`")))?;
        self.set(key.trim(), value.trim())
            .map_err(|m| Error::Config(format!("override `{assignment}`: {m}")))?;
        self.validate()
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let mhz = |v: &str| parse_value::<f64>(key, v).map(mhz_to_rad_per_us);
        match key {
            "seed" => self.seed = Some(parse_value(key, value)?),
            "graphs" => self.graphs = parse_value(key, value)?,
            "vertices" => self.vertices = parse_value(key, value)?,
            "region" => {
                let (w, h) = value
                    .split_once('x')
                    .ok_or_else(|| format!("`region` must look like `4x4`, got `{value}`"))?;
                self.width = parse_value(key, w.trim())?;
                self.height = parse_value(key, h.trim())?;
            }
            "v_nn_mhz" => self.v_nn = mhz(value)?,
            "v_nnn_mhz" => self.v_nnn = mhz(value)?,
            "total_time" => self.total_time = parse_value(key, value)?,
            "phi_ratio" => self.phi_ratio = parse_value(key, value)?,
            "schedules" => self.schedules = parse_list(key, value, ScheduleChoice::parse)?,
            "hv_ramp" => self.hv_ramp = parse_value(key, value)?,
            "hv_omega_max_mhz" => self.hv_omega_max = if value == "auto" { None } else { Some(mhz(value)?) },
            "hv_delta_start_mhz" => self.hv_delta_start = if value == "auto" { None } else { Some(mhz(value)?) },
            "hv_delta_end_mhz" => self.hv_delta_end = mhz(value)?,
            "steps" => self.steps = parse_value(key, value)?,
            "integrator" => {
                self.integrator = match value {
                    "midpoint" => Integrator::Midpoint,
                    "magnus4" => Integrator::Magnus4,
                    _ => return Err(format!("unknown integrator `{value}`")),
                }
            }
            "tolerance" => {
                self.tolerance = if value == "none" { None } else { Some(parse_value(key, value)?) }
            }
            "optimizers" => self.optimizers = parse_list(key, value, |s| OptimizerKind::parse(s).ok())?,
            "knots" => self.knots = parse_value(key, value)?,
            "sgd_learning_rate" => self.sgd_learning_rate = parse_value(key, value)?,
            "sgd_decay" => self.sgd_decay = parse_value(key, value)?,
            "adam_learning_rate" => self.adam_learning_rate = parse_value(key, value)?,
            "fd_step" => self.fd_step = parse_value(key, value)?,
            "max_steps" => self.max_steps = parse_value(key, value)?,
            "shots" => self.shots = parse_value(key, value)?,
            "readout_error" => self.readout_error = parse_value(key, value)?,
            "reference" => {
                self.reference = ScheduleChoice::parse(value).ok_or_else(|| format!("unknown schedule `{value}`"))?
            }
            "gap_points" => self.gap_points = parse_value(key, value)?,
            "gap_graph" => self.gap_graph = parse_value(key, value)?,
            "histogram_bins" => self.histogram_bins = parse_value(key, value)?,
            "top_k" => self.top_k = parse_value(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.graphs == 0 {
            return bad("graphs must be at least 1");
        }
        if self.vertices == 0 || self.vertices > crate::engine::MAX_STATE_VERTICES {
            return bad("vertices must lie in 1..=20");
        }
        if self.width * self.height < self.vertices {
            return bad("region has fewer sites than vertices");
        }
        if !(self.v_nn > 0.0 && self.v_nnn > 0.0) {
            return bad("interaction strengths must be positive");
        }
        if !(self.total_time > 0.0) {
            return bad("total_time must be positive");
        }
        if !self.phi_ratio.is_finite() {
            return bad("phi_ratio must be finite");
        }
        if !(self.hv_ramp > 0.0 && self.hv_ramp < 0.5) {
            return bad("hv_ramp must lie in (0, 1/2)");
        }
        if matches!(self.hv_omega_max, Some(w) if !(w >= 0.0)) {
            return bad("hv_omega_max_mhz must be non-negative");
        }
        if self.steps == 0 {
            return bad("steps must be positive");
        }
        if matches!(self.tolerance, Some(t) if !(t > 0.0)) {
            return bad("tolerance must be positive");
        }
        if self.knots < 2 {
            return bad("knots must be at least 2");
        }
        if !(self.sgd_learning_rate > 0.0 && self.adam_learning_rate > 0.0) {
            return bad("learning rates must be positive");
        }
        if !(self.sgd_decay >= 0.0) {
            return bad("sgd_decay must be non-negative");
        }
        if !(self.fd_step > 0.0) {
            return bad("fd_step must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        if !(0.0..0.5).contains(&self.readout_error) {
            return bad("readout_error must lie in [0, 1/2)");
        }
        if self.gap_points < 2 {
            return bad("gap_points must be at least 2");
        }
        if self.histogram_bins == 0 {
            return bad("histogram_bins must be positive");
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required (pass --seed)".into()))
    }

    pub fn rates(&self) -> FrameRates {
        FrameRates::for_duration(self.total_time, self.phi_ratio)
    }

    pub fn hv_path(&self) -> HvPath {
        let m = HvPath::matching(&self.rates());
        HvPath {
            ramp: self.hv_ramp,
            omega_max: self.hv_omega_max.unwrap_or(m.omega_max),
            delta_start: self.hv_delta_start.unwrap_or(m.delta_start),
            delta_end: self.hv_delta_end,
            total_time: m.total_time,
        }
    }

    pub fn unit_disk(&self) -> UnitDiskParams {
        UnitDiskParams {
            width: self.width,
            height: self.height,
            v_nn: self.v_nn,
            v_nnn: self.v_nnn,
        }
    }

    pub fn evolve(&self) -> EvolveConfig {
        EvolveConfig {
            steps: self.steps,
            integrator: self.integrator,
            tolerance: self.tolerance,
            ..EvolveConfig::default()
        }
    }

    pub fn schedule(&self, choice: ScheduleChoice) -> Result<Schedule> {
        let r = self.rates();
        match choice {
            ScheduleChoice::PkFull => schedule::pk_full(r.omega_theta, r.omega_phi),
            ScheduleChoice::PkSimplified => schedule::pk_simplified_with(r.omega_theta, r.omega_phi, false),
            ScheduleChoice::PkSimplifiedPhase => schedule::pk_simplified_with(r.omega_theta, r.omega_phi, true),
            ScheduleChoice::HvUnoptimized => schedule::hv_unoptimized(self.hv_path()),
        }
    }

    pub fn opt_config(&self, kind: OptimizerKind, seed: u64) -> OptConfig {
        let mut c = OptConfig::new(kind);
        c.learning_rate = match kind {
            OptimizerKind::Sgd => self.sgd_learning_rate,
            OptimizerKind::Adam => self.adam_learning_rate,
        };
        c.decay = match kind {
            OptimizerKind::Sgd => self.sgd_decay,
            OptimizerKind::Adam => 0.0,
        };
        c.fd_step = self.fd_step;
        c.max_steps = self.max_steps;
        c.shots = self.shots;
        c.readout_error = self.readout_error;
        c.seed = seed;
        c.evolve = self.evolve();
        c
    }

    /// Canonical `key = value` text; parsing it reproduces this config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        if let Some(s) = self.seed {
            kv("seed", s.to_string());
        }
        kv("graphs", self.graphs.to_string());
        kv("vertices", self.vertices.to_string());
        kv("region", format!("{}x{}", self.width, self.height));
        kv("v_nn_mhz", echo_mhz(self.v_nn));
        kv("v_nnn_mhz", echo_mhz(self.v_nnn));
        kv("total_time", self.total_time.to_string());
        kv("phi_ratio", self.phi_ratio.to_string());
        let labels: Vec<&str> = self.schedules.iter().map(|s| s.label()).collect();
        kv("schedules", labels.join(", "));
        let auto = |v: Option<f64>| v.map_or("auto".into(), echo_mhz);
        kv("hv_ramp", self.hv_ramp.to_string());
        kv("hv_omega_max_mhz", auto(self.hv_omega_max));
        kv("hv_delta_start_mhz", auto(self.hv_delta_start));
        kv("hv_delta_end_mhz", echo_mhz(self.hv_delta_end));
        kv("steps", self.steps.to_string());
        kv(
            "integrator",
            match self.integrator {
                Integrator::Midpoint => "midpoint",
                Integrator::Magnus4 => "magnus4",
            }
            .into(),
        );
        kv("tolerance", self.tolerance.map_or("none".into(), |t| t.to_string()));
        let opts: Vec<&str> = self.optimizers.iter().map(|o| o.label()).collect();
        kv("optimizers", opts.join(", "));
        kv("knots", self.knots.to_string());
        kv("sgd_learning_rate", self.sgd_learning_rate.to_string());
        kv("sgd_decay", self.sgd_decay.to_string());
        kv("adam_learning_rate", self.adam_learning_rate.to_string());
        kv("fd_step", self.fd_step.to_string());
        kv("max_steps", self.max_steps.to_string());
        kv("shots", self.shots.to_string());
        kv("readout_error", self.readout_error.to_string());
        kv("reference", self.reference.label().into());
        kv("gap_points", self.gap_points.to_string());
        kv("gap_graph", self.gap_graph.to_string());
        kv("histogram_bins", self.histogram_bins.to_string());
        kv("top_k", self.top_k.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_experiment() {
        let c = ExperimentConfig::default();
        assert!((c.v_nn - 672.300827).abs() < 1e-5);
        assert!((c.v_nnn - 81.681409).abs() < 1e-5);
        assert!((c.rates().omega_phi + 11.0 * std::f64::consts::PI / 1.5).abs() < 1e-12);
    }

    #[test]
    fn echo_round_trip() {
        let text = "seed = 5\nv_nn_mhz = 107\nregion = 5x3\nschedules = pk-full, hv-unoptimized\n";
        let a = ExperimentConfig::parse(text).unwrap();
        assert_eq!((a.width, a.height), (5, 3));
        let b = ExperimentConfig::parse(&a.to_text()).unwrap();
        assert!((a.v_nn - b.v_nn).abs() <= 1e-12 * a.v_nn);
        assert!((a.hv_delta_end - b.hv_delta_end).abs() <= 1e-12 * a.hv_delta_end);
        assert_eq!(a.hv_path(), HvPath::matching(&a.rates()));
        assert_eq!(a.schedules, b.schedules);
        assert_eq!(b.to_text(), ExperimentConfig::parse(&b.to_text()).unwrap().to_text());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = ExperimentConfig::parse("seed = 1\n\n# note\nbogus = 3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = ExperimentConfig::parse("graphs = many\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = ExperimentConfig::parse("seed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(matches!(ExperimentConfig::parse("graphs = 0"), Err(Error::Config(_))));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_override("graphs=12").unwrap();
        assert_eq!(c.graphs, 12);
        assert!(c.apply_override("graphs").is_err());
        assert!(c.apply_override("hv_ramp=0.7").is_err());
        assert!(c.require_seed().is_err());
    }
}
