//! Exact second-quantized evolution of a two-photon state.
//!
//! States are sums of creation-operator monomials `c · a†_x a†_y |0⟩`, each
//! operator carrying a spatial label, a polarization and an internal
//! (wavepacket) label. Linear optical elements act operator by operator.

mod element;
mod outcome;
mod state;
mod wavepacket;

use std::fmt;

pub use element::Element;
pub use outcome::{DetectorMap, Outcome, Port};
pub use state::{LabelBasis, PhotonInput, TwoPhotonState, AMPLITUDE_CUTOFF};
pub use wavepacket::{
    delay_for_overlap, detuned_wavelength_for_overlap, distinguishability, wavepacket_overlap,
    Wavepacket, SPEED_OF_LIGHT_NM_PER_FS,
};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub spatial: String,
    pub pol: Polarization,
}

impl Mode {
    pub fn new(spatial: impl Into<String>, pol: Polarization) -> Self {
        Self {
            spatial: spatial.into(),
            pol,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.spatial, self.pol)
    }
}

/// Orthonormal internal label. `Ref` is the reference wavepacket of the
/// state's [`LabelBasis`], `Perp` the Gram–Schmidt complement of the
/// partner wavepacket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InternalLabel {
    Ref,
    Perp,
}

/// A single creation operator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Op {
    pub mode: Mode,
    pub label: InternalLabel,
}

impl Op {
    pub fn new(spatial: impl Into<String>, pol: Polarization, label: InternalLabel) -> Self {
        Self {
            mode: Mode::new(spatial, pol),
            label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub first: Op,
    pub second: Op,
    pub amplitude: Complex64,
}

impl Monomial {
    /// Squared-norm contribution: `2|c|²` for a doubly occupied operator.
    pub fn weight(&self) -> f64 {
        if self.first == self.second {
            2.0 * self.amplitude.norm_sqr()
        } else {
            self.amplitude.norm_sqr()
        }
    }
}
