use std::collections::BTreeMap;
use std::fmt;

use super::{Mode, Polarization, TwoPhotonState};
use crate::error::{Error, Result};

/// Where a terminal mode ends up.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    Detector(String),
    Discard,
}

/// Assignment of terminal modes to threshold detectors or discard ports.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DetectorMap {
    ports: BTreeMap<Mode, Port>,
}

impl DetectorMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn detect(&mut self, mode: Mode, detector: impl Into<String>) -> &mut Self {
        self.ports.insert(mode, Port::Detector(detector.into()));
        self
    }

    pub fn discard(&mut self, mode: Mode) -> &mut Self {
        self.ports.insert(mode, Port::Discard);
        self
    }

    /// Discards both polarizations of a spatial label.
    pub fn discard_label(&mut self, spatial: &str) -> &mut Self {
        for pol in Polarization::BOTH {
            self.discard(Mode::new(spatial, pol));
        }
        self
    }

    pub fn get(&self, mode: &Mode) -> Option<&Port> {
        self.ports.get(mode)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Port)> {
        self.ports.iter()
    }

    /// Mode watched by the named detector.
    pub fn mode_of(&self, detector: &str) -> Option<&Mode> {
        self.ports.iter().find_map(|(m, p)| match p {
            Port::Detector(d) if d == detector => Some(m),
            _ => None,
        })
    }
}

/// Detection pattern of one two-photon event under threshold detectors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    /// Two distinct detectors fired; names are stored sorted.
    Coincidence(String, String),
    /// Both photons reached the same detector: one click.
    Bunched(String),
    /// One photon detected, the other left through a discard port.
    Single(String),
    /// Both photons left through discard ports.
    Discarded,
    /// Absorbed by a lossy element.
    Lost,
}

impl Outcome {
    pub fn coincidence(a: &str, b: &str) -> Self {
        if a <= b {
            Outcome::Coincidence(a.to_string(), b.to_string())
        } else {
            Outcome::Coincidence(b.to_string(), a.to_string())
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Coincidence(a, b) => write!(f, "{a}-{b}"),
            Outcome::Bunched(d) => write!(f, "bunched:{d}"),
            Outcome::Single(d) => write!(f, "single:{d}"),
            Outcome::Discarded => f.write_str("discarded"),
            Outcome::Lost => f.write_str("lost"),
        }
    }
}

impl TwoPhotonState {
    /// Detection probabilities with internal labels traced out.
    ///
    /// The map always contains [`Outcome::Lost`]; all entries sum to one.
    pub fn outcome_distribution(&self, detectors: &DetectorMap) -> Result<BTreeMap<Outcome, f64>> {
        let mut dist = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            let port = |m: &Mode| {
                detectors
                    .get(m)
                    .ok_or_else(|| Error::UnmappedMode(m.to_string()))
            };
            let (pa, pb) = (port(&a.mode)?, port(&b.mode)?);
            let weight = if a == b {
                2.0 * c.norm_sqr()
            } else {
                c.norm_sqr()
            };
            let outcome = match (pa, pb) {
                (Port::Detector(x), Port::Detector(y)) if x == y => Outcome::Bunched(x.clone()),
                (Port::Detector(x), Port::Detector(y)) => Outcome::coincidence(x, y),
                (Port::Detector(x), Port::Discard) | (Port::Discard, Port::Detector(x)) => {
                    Outcome::Single(x.clone())
                }
                (Port::Discard, Port::Discard) => Outcome::Discarded,
            };
            *dist.entry(outcome).or_insert(0.0) += weight;
        }
        dist.insert(Outcome::Lost, self.accumulated_loss);
        Ok(dist)
    }
}
