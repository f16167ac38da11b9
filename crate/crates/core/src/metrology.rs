//! Shot budgets and readout-error models for `P_MIS`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{hamming_distance, Bitstring, Graph, MaximumSets};

/// Smallest `m` with `m >= ln(2/η) / (2ε²)`.
pub fn chernoff_shots(epsilon: f64, eta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("ε = {epsilon} must lie in (0, 1)")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("η = {eta} must lie in (0, 1)")));
    }
    Ok(((2.0 / eta).ln() / (2.0 * epsilon * epsilon)).ceil() as u64)
}

pub fn measurements_saved(steps: u64, shots_per_step: u64) -> u64 {
    steps.saturating_mul(shots_per_step)
}

/// Rounds to one significant figure, e.g. `5.97e6 -> 6e6`.
pub fn order_class(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powf(x.abs().log10().floor());
    (x / scale).round() * scale
}

/// Probability mass around one maximum independent set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MisShells {
    pub set: Bitstring,
    /// `p_i`: probability of the set itself.
    pub p: f64,
    /// `p_ij` for `j = 1..=n` at index `j - 1`.
    pub shells: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorModelInput {
    pub n: usize,
    pub p_error: f64,
    pub mis: Vec<MisShells>,
}

impl ErrorModelInput {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.p_error) {
            return Err(Error::invalid(format!("p_e = {} must lie in [0, 1/2)", self.p_error)));
        }
        for m in &self.mis {
            if m.shells.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    actual: m.shells.len(),
                });
            }
            let in_range = |p: f64| (0.0..=1.0).contains(&p);
            if !in_range(m.p) || !m.shells.iter().all(|&p| in_range(p)) {
                return Err(Error::invalid("probabilities must lie in [0, 1]"));
            }
            if m.p + m.shells.iter().sum::<f64>() > 1.0 + 1e-12 {
                return Err(Error::invalid("shell masses exceed 1"));
            }
        }
        Ok(())
    }

    /// Error-free `P_MIS`, `Σ p_i`.
    pub fn p_mis0(&self) -> f64 {
        self.mis.iter().map(|m| m.p).sum()
    }

    pub fn k(&self) -> usize {
        self.mis.len()
    }
}

/// `Σ_i [p_i (1-p_e)^n + Σ_j p_ij (1-p_e)^{n-j} p_e^j]`.
///
/// Readouts landing on different maximum sets are disjoint events, so the
/// sum is exact for any number of maximum sets.
pub fn pmis_with_error(e: &ErrorModelInput) -> f64 {
    let (n, p) = (e.n as i32, e.p_error);
    e.mis
        .iter()
        .map(|m| {
            m.p * (1.0 - p).powi(n)
                + m.shells
                    .iter()
                    .enumerate()
                    .map(|(j, pij)| {
                        let j = j as i32 + 1;
                        pij * (1.0 - p).powi(n - j) * p.powi(j)
                    })
                    .sum::<f64>()
        })
        .sum()
}

/// `(1 - n p_e) P_MIS0 + p_e Σ_i p_i1`.
pub fn pmis_first_order(e: &ErrorModelInput) -> f64 {
    let shell1: f64 = e.mis.iter().map(|m| m.shells.first().copied().unwrap_or(0.0)).sum();
    (1.0 - e.n as f64 * e.p_error) * e.p_mis0() + e.p_error * shell1
}

/// As [`pmis_first_order`] with the correction summed over every shell.
pub fn pmis_first_order_all_shells(e: &ErrorModelInput) -> f64 {
    let shells: f64 = e.mis.iter().map(|m| m.shells.iter().sum::<f64>()).sum();
    (1.0 - e.n as f64 * e.p_error) * e.p_mis0() + e.p_error * shells
}

/// Post-readout `P_MIS` by summing flip transitions from every configuration
/// onto every maximum set.
pub fn pmis_by_transitions(dist: &[f64], n: usize, mis: &MaximumSets, p_error: f64) -> Result<f64> {
    check_len(dist, n)?;
    let mut total = 0.0;
    for (s, &ps) in dist.iter().enumerate() {
        if ps == 0.0 {
            continue;
        }
        for &m in &mis.sets {
            let d = hamming_distance(Bitstring(s as u32), m) as i32;
            total += ps * p_error.powi(d) * (1.0 - p_error).powi(n as i32 - d);
        }
    }
    Ok(total)
}

fn check_len(dist: &[f64], n: usize) -> Result<()> {
    if dist.len() != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: dist.len(),
        });
    }
    Ok(())
}

/// Hamming shells of a distribution around each maximum independent set.
pub fn distribution_to_error_input(dist: &[f64], g: &Graph, p_error: f64) -> Result<ErrorModelInput> {
    let n = g.n();
    check_len(dist, n)?;
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("distribution sums to {total}, not 1")));
    }
    let mis = crate::graph::maximum_independent_sets(g)?;
    let shells = mis
        .sets
        .iter()
        .map(|&m| {
            let mut shells = vec![0.0; n];
            for (s, &ps) in dist.iter().enumerate() {
                let d = hamming_distance(Bitstring(s as u32), m) as usize;
                if d > 0 {
                    shells[d - 1] += ps;
                }
            }
            MisShells {
                set: m,
                p: dist[m.0 as usize],
                shells,
            }
        })
        .collect();
    let e = ErrorModelInput {
        n,
        p_error,
        mis: shells,
    };
    e.validate()?;
    Ok(e)
}

/// Shot economics of one optimization campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub epsilon: f64,
    pub eta: f64,
    pub chernoff_shots: u64,
    pub parameters: usize,
    pub shots_per_evaluation: u64,
    /// `2 × parameters × shots per evaluation`.
    pub per_step_cost: u64,
    pub steps: u64,
    pub shots_per_step: u64,
    pub saved: u64,
    pub saved_class: f64,
}

pub fn budget_report(
    epsilon: f64,
    eta: f64,
    parameters: usize,
    shots_per_evaluation: u64,
    steps: u64,
    shots_per_step: u64,
) -> Result<BudgetReport> {
    let saved = measurements_saved(steps, shots_per_step);
    Ok(BudgetReport {
        epsilon,
        eta,
        chernoff_shots: chernoff_shots(epsilon, eta)?,
        parameters,
        shots_per_evaluation,
        per_step_cost: 2 * parameters as u64 * shots_per_evaluation,
        steps,
        shots_per_step,
        saved,
        saved_class: order_class(saved as f64),
    })
}
