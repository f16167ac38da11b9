use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::error::{Error, Result};
use crate::graph::{Bitstring, Graph, ISBasis, MaximumSets};

/// Read-out probabilities of a final state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    /// Total probability on maximum independent sets.
    pub p_mis: f64,
    /// Total probability on independent sets (including the empty set).
    pub p_is: f64,
    pub distribution: Vec<f64>,
}

pub fn observables(psi: &StateVector, g: &Graph) -> Result<Observables> {
    let basis = crate::graph::enumerate_independent_sets(g)?;
    let mis = crate::graph::maximum_sets_of(&basis);
    observables_with(psi, &basis, &mis)
}

pub fn observables_with(psi: &StateVector, basis: &ISBasis, mis: &MaximumSets) -> Result<Observables> {
    if psi.n() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: 1 << basis.n(),
            actual: psi.amplitudes().len(),
        });
    }
    let distribution = psi.probabilities();
    let p_is = basis.states().iter().map(|s| distribution[s.0 as usize]).sum();
    let p_mis = mis.sets.iter().map(|s| distribution[s.0 as usize]).sum();
    Ok(Observables {
        p_mis,
        p_is,
        distribution,
    })
}

/// Outcome histogram of repeated projective measurements.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ShotCounts {
    pub n: usize,
    pub counts: BTreeMap<Bitstring, u64>,
}

impl ShotCounts {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Fraction of shots that landed on a maximum independent set.
    pub fn p_mis(&self, mis: &MaximumSets) -> f64 {
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(s, _)| mis.contains(**s))
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.total().max(1) as f64
    }

    /// `bitstring,count` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (s, c) in &self.counts {
            out.push_str(&format!("{},{c}\n", s.to_string_n(self.n)));
        }
        out
    }
}

/// Draws `shots` outcomes from `|ψ|²`, then flips each bit independently with
/// probability `p_error`.
pub fn sample_shots<R: Rng + ?Sized>(psi: &StateVector, shots: u64, p_error: f64, rng: &mut R) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::invalid("shot count must be positive"));
    }
    if !(0.0..0.5).contains(&p_error) {
        return Err(Error::invalid(format!("readout error {p_error} must lie in [0, 1/2)")));
    }
    let probs = psi.probabilities();
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::invalid(format!("bad distribution: {e}")))?;
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let mut s = Bitstring(dist.sample(rng) as u32);
        if p_error > 0.0 {
            for j in 0..psi.n() {
                if rng.gen_bool(p_error) {
                    s = s.flip(j);
                }
            }
        }
        *counts.entry(s).or_insert(0) += 1;
    }
    Ok(ShotCounts { n: psi.n(), counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Picture;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn observables_of_a_basis_state() {
        let g = Graph::path(3).unwrap();
        let psi = StateVector::basis(3, Bitstring::from_vertices(&[0, 2]), Picture::Schroedinger).unwrap();
        let o = observables(&psi, &g).unwrap();
        assert_eq!((o.p_mis, o.p_is), (1.0, 1.0));
        let psi = StateVector::basis(3, Bitstring::from_vertices(&[0, 1]), Picture::Schroedinger).unwrap();
        let o = observables(&psi, &g).unwrap();
        assert_eq!((o.p_mis, o.p_is), (0.0, 0.0));
    }

    #[test]
    fn shots_are_deterministic_and_validated() {
        let psi = StateVector::basis(2, Bitstring(0b01), Picture::Schroedinger).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = sample_shots(&psi, 100, 0.0, &mut rng).unwrap();
        assert_eq!(c.counts.get(&Bitstring(1)), Some(&100));
        assert!(sample_shots(&psi, 0, 0.0, &mut rng).is_err());
        assert!(sample_shots(&psi, 10, 0.5, &mut rng).is_err());
        let a = sample_shots(&psi, 500, 0.1, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_shots(&psi, 500, 0.1, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 500);
        assert!(a.counts.len() > 1);
    }
}
