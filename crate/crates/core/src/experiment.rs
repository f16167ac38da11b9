//! Ensemble orchestration behind the command-line subcommands. Every output
//! file starts with the code version and the resolved configuration, and
//! contains no timestamps, so reruns with the same seed are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ScheduleChoice};
use crate::engine::{self, RunResult};
use crate::error::Result;
use crate::graph::{self, Graph};
use crate::metrology::{self, BudgetReport};
use crate::operators::{self, FrameKind};
use crate::optimizer::{self, OptTrace, OptimizerKind};
use crate::schedule::{self, AdiabaticityReport, KnotBoundary, KnotPath};

pub const VERSION: &str = concat!("rydberg-mis ", env!("CARGO_PKG_VERSION"));

const RUN_STREAMS: u64 = 1 << 32;

/// Independent ChaCha stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Graph `i` is drawn from stream `i`, so ensembles of different sizes
/// share their leading graphs.
pub fn generate_ensemble(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Graph>> {
    let params = cfg.unit_disk();
    (0..cfg.graphs)
        .map(|i| graph::generate_unit_disk_with(cfg.vertices, &params, &mut stream_rng(seed, i as u64)))
        .collect()
}

/// Seed for per-run randomness (shots) of graph `i`.
pub fn run_seed(seed: u64, i: usize) -> u64 {
    stream_rng(seed, RUN_STREAMS + i as u64).next_u64()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub stderr: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Stats {
            mean,
            std: var.sqrt(),
            stderr: var.sqrt() / n.sqrt(),
        }
    }
}

/// Counts of `values` in `bins` equal bins on `[lo, hi]`; `hi` itself falls
/// in the last bin.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for &v in values {
        let x = ((v - lo) / (hi - lo) * bins as f64).floor();
        let b = (x.max(0.0) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
}

fn header(cfg: &ExperimentConfig, comment: &str) -> String {
    let mut out = format!("{comment} {VERSION}\n");
    for line in cfg.to_text().lines() {
        let _ = writeln!(out, "{comment} {line}");
    }
    out
}

fn json_header(cfg: &ExperimentConfig) -> Result<String> {
    Ok(serde_json::to_string(&serde_json::json!({
        "version": VERSION,
        "config": cfg.to_text(),
    }))? + "\n")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Results of every configured schedule on every graph.
#[derive(Clone, Debug)]
pub struct EnsembleRun {
    pub graphs: Vec<Graph>,
    pub schedules: Vec<ScheduleChoice>,
    /// `results[g][s]` for graph `g` and schedule `s`.
    pub results: Vec<Vec<RunResult>>,
}

impl EnsembleRun {
    pub fn p_mis(&self, choice: ScheduleChoice) -> Option<Vec<f64>> {
        let k = self.schedules.iter().position(|c| *c == choice)?;
        Some(self.results.iter().map(|r| r[k].p_mis).collect())
    }

    pub fn p_is(&self, choice: ScheduleChoice) -> Option<Vec<f64>> {
        let k = self.schedules.iter().position(|c| *c == choice)?;
        Some(self.results.iter().map(|r| r[k].p_is).collect())
    }
}

pub fn run_ensemble(cfg: &ExperimentConfig, seed: u64) -> Result<EnsembleRun> {
    let graphs = generate_ensemble(cfg, seed)?;
    let schedules: Vec<_> = cfg
        .schedules
        .iter()
        .map(|&c| cfg.schedule(c))
        .collect::<Result<_>>()?;
    let evolve = cfg.evolve();
    let results = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let basis = graph::enumerate_independent_sets(g)?;
            let mis = graph::maximum_sets_of(&basis);
            schedules
                .iter()
                .map(|s| engine::run_schedule_with(g, i, s, &evolve, &basis, &mis))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleRun {
        graphs,
        schedules: cfg.schedules.clone(),
        results,
    })
}

/// `run`: simulates every configured schedule on the ensemble and writes
/// `runs.jsonl`, `summary.csv` and `histogram.csv`.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<EnsembleRun> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    let run = run_ensemble(cfg, seed)?;

    let mut jsonl = json_header(cfg)?;
    for per_graph in &run.results {
        for r in per_graph {
            jsonl.push_str(&r.to_json_line(cfg.vertices, cfg.top_k)?);
            jsonl.push('\n');
        }
    }

    let mut summary = header(cfg, "#");
    summary.push_str("schedule,graphs,p_mis_mean,p_mis_std,p_mis_stderr,p_is_mean,p_is_std,p_is_stderr\n");
    let mut hist = header(cfg, "#");
    hist.push_str("schedule,quantity,bin_lo,bin_hi,count\n");
    for &choice in &run.schedules {
        let mis = run.p_mis(choice).unwrap_or_default();
        let is = run.p_is(choice).unwrap_or_default();
        let (a, b) = (Stats::of(&mis), Stats::of(&is));
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{},{}",
            choice.label(),
            mis.len(),
            a.mean,
            a.std,
            a.stderr,
            b.mean,
            b.std,
            b.stderr
        );
        for (quantity, values) in [("p_mis", &mis), ("p_is", &is)] {
            let bins = cfg.histogram_bins;
            for (k, c) in histogram(values, bins, 0.0, 1.0).iter().enumerate() {
                let lo = k as f64 / bins as f64;
                let hi = (k + 1) as f64 / bins as f64;
                let _ = writeln!(hist, "{},{quantity},{lo},{hi},{c}", choice.label());
            }
        }
    }

    let dir = &cfg.output_dir;
    write_file(dir, "runs.jsonl", &jsonl)?;
    write_file(dir, "summary.csv", &summary)?;
    write_file(dir, "histogram.csv", &hist)?;
    for (i, g) in run.graphs.iter().enumerate() {
        write_file(&dir.join("graphs"), &format!("{i:04}.txt"), &g.to_text())?;
    }
    Ok(run)
}

/// One graph's optimization campaign.
#[derive(Clone, Debug)]
pub struct GraphOptimization {
    pub graph_id: usize,
    pub reference: f64,
    pub traces: Vec<OptTrace>,
}

/// Aggregate of one optimizer over the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerSummary {
    pub optimizer: OptimizerKind,
    pub graphs: usize,
    pub success_rate: f64,
    pub mean_steps: f64,
    pub cap_fraction: f64,
    pub best: Stats,
    /// Best objective over graphs that exhausted the step budget.
    pub capped_best: Stats,
    pub cumulative_shots: u64,
}

/// Starting path: the unoptimized path sampled at the configured knots.
pub fn initial_knots(cfg: &ExperimentConfig) -> Result<KnotPath> {
    let hv = schedule::hv_unoptimized(cfg.hv_path())?;
    KnotPath::sample(&hv, cfg.knots, KnotBoundary::Pinned)
}

pub fn optimize_ensemble(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<GraphOptimization>> {
    let graphs = generate_ensemble(cfg, seed)?;
    let init = initial_knots(cfg)?;
    let reference_schedule = cfg.schedule(cfg.reference)?;
    let evolve = cfg.evolve();
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let reference = engine::run_schedule(g, i, &reference_schedule, &evolve)?.p_mis;
            let traces = cfg
                .optimizers
                .iter()
                .map(|&kind| optimizer::optimize_path(g, &init, &cfg.opt_config(kind, run_seed(seed, i)), reference))
                .collect::<Result<Vec<_>>>()?;
            Ok(GraphOptimization {
                graph_id: i,
                reference,
                traces,
            })
        })
        .collect()
}

pub fn summarize_optimizations(cfg: &ExperimentConfig, runs: &[GraphOptimization]) -> Vec<OptimizerSummary> {
    cfg.optimizers
        .iter()
        .enumerate()
        .map(|(k, &optimizer)| {
            let traces: Vec<&OptTrace> = runs.iter().map(|r| &r.traces[k]).collect();
            let n = traces.len().max(1) as f64;
            let capped: Vec<f64> = traces.iter().filter(|t| !t.reached).map(|t| t.best).collect();
            let best: Vec<f64> = traces.iter().map(|t| t.best).collect();
            OptimizerSummary {
                optimizer,
                graphs: traces.len(),
                success_rate: traces.iter().filter(|t| t.reached).count() as f64 / n,
                mean_steps: traces.iter().map(|t| t.steps as f64).sum::<f64>() / n,
                cap_fraction: capped.len() as f64 / n,
                best: Stats::of(&best),
                capped_best: Stats::of(&capped),
                cumulative_shots: traces.iter().map(|t| t.cumulative_shots()).sum(),
            }
        })
        .collect()
}

/// `optimize`: runs every configured optimizer on every graph and writes
/// `traces.jsonl`, `opt_summary.csv`, `opt_report.csv` and
/// `opt_histogram.csv`.
pub fn cmd_optimize(cfg: &ExperimentConfig) -> Result<(Vec<GraphOptimization>, Vec<OptimizerSummary>)> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    let runs = optimize_ensemble(cfg, seed)?;
    let summaries = summarize_optimizations(cfg, &runs);

    let mut jsonl = json_header(cfg)?;
    let mut per_graph = header(cfg, "#");
    per_graph.push_str("graph_id,optimizer,reference,target,initial,steps,reached,best,cumulative_shots\n");
    for r in &runs {
        for t in &r.traces {
            jsonl.push_str(&t.to_jsonl(r.graph_id)?);
            let _ = writeln!(
                per_graph,
                "{},{},{},{},{},{},{},{},{}",
                r.graph_id,
                t.optimizer.label(),
                r.reference,
                t.target,
                t.initial_objective,
                t.steps,
                t.reached,
                t.best,
                t.cumulative_shots()
            );
        }
    }

    let mut report = header(cfg, "#");
    report.push_str(
        "optimizer,graphs,success_rate,mean_steps,cap_fraction,best_mean,best_std,capped_best_mean,capped_best_std,cumulative_shots\n",
    );
    let mut hist = header(cfg, "#");
    hist.push_str("optimizer,quantity,bin_lo,bin_hi,count\n");
    let bins = cfg.histogram_bins;
    for (k, s) in summaries.iter().enumerate() {
        let _ = writeln!(
            report,
            "{},{},{},{},{},{},{},{},{},{}",
            s.optimizer.label(),
            s.graphs,
            s.success_rate,
            s.mean_steps,
            s.cap_fraction,
            s.best.mean,
            s.best.std,
            s.capped_best.mean,
            s.capped_best.std,
            s.cumulative_shots
        );
        let steps: Vec<f64> = runs.iter().map(|r| r.traces[k].steps as f64).collect();
        let capped: Vec<f64> = runs
            .iter()
            .filter(|r| !r.traces[k].reached)
            .map(|r| r.traces[k].best)
            .collect();
        let top = cfg.max_steps as f64;
        for (quantity, values, hi) in [("steps", &steps, top), ("capped_best", &capped, 1.0)] {
            for (b, c) in histogram(values, bins, 0.0, hi).iter().enumerate() {
                let lo = hi * b as f64 / bins as f64;
                let up = hi * (b + 1) as f64 / bins as f64;
                let _ = writeln!(hist, "{},{quantity},{lo},{up},{c}", s.optimizer.label());
            }
        }
    }

    let dir = &cfg.output_dir;
    write_file(dir, "traces.jsonl", &jsonl)?;
    write_file(dir, "opt_summary.csv", &per_graph)?;
    write_file(dir, "opt_report.csv", &report)?;
    write_file(dir, "opt_histogram.csv", &hist)?;
    Ok((runs, summaries))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualStats {
    pub independent_sets: usize,
    pub mis_size: u32,
    pub mis_count: usize,
    pub edges: usize,
}

impl DualStats {
    pub fn line(&self) -> String {
        format!(
            "independent_sets={} mis_size={} mis_count={} edges={}",
            self.independent_sets, self.mis_size, self.mis_count, self.edges
        )
    }
}

/// `dual`: the dual graph of a graph file as DOT plus summary counts.
pub fn cmd_dual(graph_text: &str) -> Result<(String, DualStats)> {
    let g = Graph::from_text(graph_text)?;
    let dual = graph::dual_graph(&g)?;
    let mis = graph::maximum_sets_of(&dual.basis);
    let stats = DualStats {
        independent_sets: dual.vertex_count(),
        mis_size: mis.size,
        mis_count: mis.sets.len(),
        edges: dual.edge_count(),
    };
    let mut dot = format!("// {VERSION}\n// {}\n", stats.line());
    dot.push_str(&dual.to_dot());
    Ok((dot, stats))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSummary {
    pub delta: f64,
    pub min_gap: f64,
    pub at_time: f64,
    pub interaction: f64,
    pub adiabaticity: AdiabaticityReport,
}

/// `gap`: tabulates `ΔE(t)`, the followed gap and the spectrum of `A(t)` on
/// one graph, and reports `δ` with the adiabaticity ratios.
pub fn cmd_gap(cfg: &ExperimentConfig, graph: Option<Graph>) -> Result<(String, GapSummary)> {
    cfg.validate()?;
    let g = match graph {
        Some(g) => g,
        None => {
            let seed = cfg.require_seed()?;
            let params = cfg.unit_disk();
            graph::generate_unit_disk_with(cfg.vertices, &params, &mut stream_rng(seed, cfg.gap_graph as u64))?
        }
    };
    let rates = cfg.rates();
    let basis = graph::enumerate_independent_sets(&g)?;
    let total = rates.total_time();
    let grid: Vec<f64> = (0..cfg.gap_points)
        .map(|k| total * k as f64 / (cfg.gap_points - 1) as f64)
        .collect();
    let report = operators::min_gap_delta(&rates, FrameKind::Full, &basis, &grid)?;
    let interaction = g.edges().map(|(_, _, v)| v).fold(f64::INFINITY, f64::min);
    let interaction = if interaction.is_finite() { interaction } else { cfg.v_nnn };
    let pk = schedule::pk_full(rates.omega_theta, rates.omega_phi)?;
    let adiabaticity =
        schedule::adiabaticity_report(&pk, interaction, report.delta, schedule::DEFAULT_ADIABATIC_THRESHOLD)?;

    let mut csv = header(cfg, "#");
    csv.push_str("t,h1_gap,followed_gap");
    for k in 0..basis.len() {
        let _ = write!(csv, ",a_eig_{k}");
    }
    csv.push('\n');
    for &(t, followed) in &report.samples {
        let _ = write!(csv, "{t},{},{followed}", rates.h1_gap(t));
        for e in operators::gauge_matrix(t, &basis, &rates, FrameKind::Full).eigenvalues() {
            let _ = write!(csv, ",{e}");
        }
        csv.push('\n');
    }
    let summary = GapSummary {
        delta: report.delta,
        min_gap: report.min_gap,
        at_time: report.at_time,
        interaction,
        adiabaticity,
    };
    write_file(&cfg.output_dir, "gap.csv", &csv)?;
    write_file(
        &cfg.output_dir,
        "gap_report.json",
        &(serde_json::to_string_pretty(&serde_json::json!({
            "version": VERSION,
            "config": cfg.to_text(),
            "report": summary,
        }))? + "\n"),
    )?;
    Ok((csv, summary))
}

/// `budget`: shot bound, per-step cost and saved measurements.
pub fn cmd_budget(
    epsilon: f64,
    eta: f64,
    parameters: usize,
    shots_per_evaluation: u64,
    steps: u64,
    shots_per_step: u64,
) -> Result<(String, BudgetReport)> {
    let r = metrology::budget_report(epsilon, eta, parameters, shots_per_evaluation, steps, shots_per_step)?;
    let text = format!(
        "{VERSION}\n\
         chernoff_shots(epsilon={}, eta={}) = {}\n\
         per_step_cost(parameters={}, shots={}) = {}\n\
         measurements_saved(steps={}, shots_per_step={}) = {} (~{:e})\n",
        r.epsilon,
        r.eta,
        r.chernoff_shots,
        r.parameters,
        r.shots_per_evaluation,
        r.per_step_cost,
        r.steps,
        r.shots_per_step,
        r.saved,
        r.saved_class
    );
    Ok((text, r))
}

/// Maps `Err` into the process exit code.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) => e.exit_code(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_edges() {
        assert_eq!(histogram(&[0.0, 0.05, 0.999, 1.0], 20, 0.0, 1.0)[19], 2);
        assert_eq!(histogram(&[0.0, 0.05], 20, 0.0, 1.0)[..2], [1, 1]);
    }

    #[test]
    fn stats() {
        let s = Stats::of(&[1.0, 3.0]);
        assert_eq!((s.mean, s.std), (2.0, 1.0));
    }

    #[test]
    fn streams_are_independent_and_stable() {
        let a = stream_rng(1, 0).next_u64();
        assert_eq!(a, stream_rng(1, 0).next_u64());
        assert_ne!(a, stream_rng(1, 1).next_u64());
        assert_ne!(run_seed(1, 0), run_seed(1, 1));
    }

    #[test]
    fn dual_command_on_single_vertex() {
        let (dot, s) = cmd_dual("n 1\n").unwrap();
        assert_eq!((s.independent_sets, s.edges, s.mis_size), (2, 1, 1));
        assert!(dot.contains("graph"));
    }
}
