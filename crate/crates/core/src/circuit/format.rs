use std::fmt::Write;

use super::Circuit;
use crate::photon::Element;

/// Canonical text form: photons, elements, detectors, discards, then
/// coincidences. Numbers use the shortest representation that parses back
/// to the same `f64`. Comments are not preserved.
pub fn format_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    for p in &circuit.photons {
        let w = &p.wavepacket;
        let _ = writeln!(
            out,
            "photon {} mode={} pol={} wavelength_nm={} bandwidth_nm={} delay_fs={}",
            p.name, p.mode, p.pol, w.center_wavelength_nm, w.bandwidth_fwhm_nm, w.delay_fs
        );
    }
    for e in &circuit.elements {
        let name = &e.name;
        let _ = match &e.element {
            Element::BeamSplitter { inputs, outputs } => writeln!(
                out,
                "bs {name} in={},{} out={},{}",
                inputs[0], inputs[1], outputs[0], outputs[1]
            ),
            Element::PolarizingBeamSplitter { inputs, outputs } => writeln!(
                out,
                "pbs {name} in={},{} out={},{}",
                inputs[0], inputs[1], outputs[0], outputs[1]
            ),
            Element::Phase { mode, phi_rad } => {
                writeln!(out, "phase {name} mode={mode} phi_rad={phi_rad}")
            }
            Element::HalfWavePlate { mode, angle_deg } => {
                writeln!(out, "hwp {name} mode={mode} angle_deg={angle_deg}")
            }
            Element::Delay { mode, tau_fs } => {
                writeln!(out, "delay {name} mode={mode} tau_fs={tau_fs}")
            }
            Element::Polarizer {
                mode,
                angle_deg,
                extinction,
            } => writeln!(
                out,
                "pol {name} mode={mode} angle_deg={angle_deg} extinction={extinction}"
            ),
        };
    }
    for d in &circuit.detectors {
        let _ = writeln!(out, "detector {} mode={} pol={}", d.name, d.mode, d.pol);
    }
    for l in &circuit.discards {
        let _ = writeln!(out, "discard {l}");
    }
    for (a, b) in &circuit.coincidences {
        let _ = writeln!(out, "coincidence {a},{b}");
    }
    out
}
