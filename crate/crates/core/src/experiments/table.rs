use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::circuit::ElementProgram;
use crate::error::{Error, Result};
use crate::photon::Outcome;

/// Parameters of a Poisson-sampled run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    /// Photon pairs entering the interferometer per second.
    pub pair_rate: f64,
    pub duration_s: f64,
    pub seed: u64,
}

impl Sampling {
    pub fn check(&self) -> Result<()> {
        if !(self.pair_rate.is_finite() && self.pair_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pair rate must be positive, got {}",
                self.pair_rate
            )));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "duration must be positive, got {}",
                self.duration_s
            )));
        }
        Ok(())
    }

    /// Same rate and duration, seed derived from `(self.seed, index)`.
    pub fn for_point(&self, index: u64) -> Self {
        Self {
            seed: derive_seed(self.seed, index),
            ..*self
        }
    }
}

/// Independent per-point seed: first output of ChaCha stream `index`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Outcome probabilities of one configuration, optionally with sampled counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceTable {
    /// Declared coincidence pairs, in declaration order.
    pub pairs: Vec<(String, String)>,
    pub probabilities: BTreeMap<Outcome, f64>,
    pub counts: Option<BTreeMap<Outcome, u64>>,
    pub sampling: Option<Sampling>,
}

impl CoincidenceTable {
    pub fn probability(&self, outcome: &Outcome) -> f64 {
        self.probabilities.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn pair_probability(&self, a: &str, b: &str) -> f64 {
        self.probability(&Outcome::coincidence(a, b))
    }

    pub fn count(&self, outcome: &Outcome) -> Option<u64> {
        self.counts
            .as_ref()
            .map(|c| c.get(outcome).copied().unwrap_or(0))
    }

    pub fn pair_count(&self, a: &str, b: &str) -> Option<u64> {
        self.count(&Outcome::coincidence(a, b))
    }

    pub fn loss(&self) -> f64 {
        self.probability(&Outcome::Lost)
    }

    /// Single-click probabilities from photons bunched on one detector.
    pub fn bunched(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probabilities.iter().filter_map(|(o, p)| match o {
            Outcome::Bunched(d) => Some((d.as_str(), *p)),
            _ => None,
        })
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities.values().sum()
    }
}

/// Exact outcome probabilities of the compiled program.
pub fn run_exact(program: &ElementProgram) -> Result<CoincidenceTable> {
    let state = program.run()?;
    let mut probabilities = state.outcome_distribution(&program.detector_map)?;
    // declared pairs are always reported, even when they never fire
    for (a, b) in &program.coincidences {
        probabilities
            .entry(Outcome::coincidence(a, b))
            .or_insert(0.0);
    }
    Ok(CoincidenceTable {
        pairs: program.coincidences.clone(),
        probabilities,
        counts: None,
        sampling: None,
    })
}

/// Draws every outcome count independently from a Poisson distribution with
/// mean `P · pair_rate · duration`. Outcomes are visited in a fixed order so
/// a given seed always yields the same counts.
pub fn sample_counts(table: &CoincidenceTable, sampling: &Sampling) -> Result<CoincidenceTable> {
    sampling.check()?;
    let exposure = sampling.pair_rate * sampling.duration_s;
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut counts = BTreeMap::new();
    for (outcome, p) in &table.probabilities {
        let mean = p * exposure;
        let n = if mean > 0.0 {
            let dist = Poisson::new(mean)
                .map_err(|e| Error::InvalidArgument(format!("poisson mean {mean}: {e}")))?;
            dist.sample(&mut rng) as u64
        } else {
            0
        };
        counts.insert(outcome.clone(), n);
    }
    Ok(CoincidenceTable {
        counts: Some(counts),
        sampling: Some(*sampling),
        ..table.clone()
    })
}
