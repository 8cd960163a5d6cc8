//! Measurements on compiled programs: coincidence tables, Poisson sampling,
//! post-selection, delay scans and CHSH tests.

mod chsh;
mod csv;
mod postselect;
mod scan;
mod table;

pub use chsh::{
    chsh, chsh_for_indistinguishability, correlation_e, indistinguishability_for_chsh, ChshAngles,
    ChshMode, ChshResult, Correlation,
};
pub use csv::{write_chsh_csv, write_scan_csv, write_table_csv};
pub use postselect::{
    postselect_pairs, postselect_state, tunable_state, PostSelectedState, TwoQubit,
};
pub use scan::{
    dip_visibility, fringe_scan, fringe_visibility, hom_scan, scan, Grid, ScanCurve, ScanKind,
    ScanPoint,
};
pub use table::{derive_seed, run_exact, sample_counts, CoincidenceTable, Sampling};

use crate::circuit::ElementProgram;
use crate::error::{Error, Result};
use crate::photon::Polarization;

/// A measurement station: one spatial label with an H and a V detector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub label: String,
    pub h_detector: String,
    pub v_detector: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sites {
    pub a: Site,
    pub b: Site,
}

impl Sites {
    /// First two spatial labels, in detector declaration order, that carry
    /// both an H and a V detector.
    pub fn of(program: &ElementProgram) -> Result<Self> {
        let mut found = Vec::new();
        for d in &program.detectors {
            if found.iter().any(|s: &Site| s.label == d.mode) {
                continue;
            }
            let h = program.detector_on(&d.mode, Polarization::H);
            let v = program.detector_on(&d.mode, Polarization::V);
            if let (Some(h), Some(v)) = (h, v) {
                found.push(Site {
                    label: d.mode.clone(),
                    h_detector: h.name.clone(),
                    v_detector: v.name.clone(),
                });
            }
        }
        let mut it = found.into_iter();
        match (it.next(), it.next()) {
            (Some(a), Some(b)) => Ok(Self { a, b }),
            _ => Err(Error::InvalidArgument(
                "need two sites, each with an H and a V detector".into(),
            )),
        }
    }

    pub fn detectors_a(&self) -> [&str; 2] {
        [&self.a.h_detector, &self.a.v_detector]
    }

    pub fn detectors_b(&self) -> [&str; 2] {
        [&self.b.h_detector, &self.b.v_detector]
    }
}
