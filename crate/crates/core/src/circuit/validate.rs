use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{is_vacuum_label, Circuit, Decl, Diagnostic};
use crate::photon::{Element, Polarization};

pub(crate) struct Analysis {
    pub diagnostics: Vec<Diagnostic>,
    /// Labels still live after the last element, in creation order.
    pub terminal: Vec<String>,
}

struct Flow {
    defined: HashSet<String>,
    live: Vec<String>,
    used_vacuum: HashSet<String>,
}

impl Flow {
    fn consume(&mut self, label: &str, line: usize, diags: &mut Vec<Diagnostic>) {
        if is_vacuum_label(label) {
            if !self.used_vacuum.insert(label.to_string()) {
                diags.push(
                    Diagnostic::error(line, format!("vacuum port `{label}` is already used"))
                        .with_token(label),
                );
            }
            return;
        }
        match self.live.iter().position(|l| l == label) {
            Some(i) => {
                self.live.remove(i);
            }
            None => diags.push(self.missing(label, line)),
        }
    }

    fn missing(&self, label: &str, line: usize) -> Diagnostic {
        let msg = if self.defined.contains(label) {
            format!("label `{label}` was already consumed by an earlier element")
        } else {
            format!("undefined label `{label}`")
        };
        Diagnostic::error(line, msg).with_token(label)
    }

    fn produce(&mut self, label: &str, line: usize, diags: &mut Vec<Diagnostic>) {
        if is_vacuum_label(label) {
            diags.push(
                Diagnostic::error(line, format!("`{label}` is a reserved vacuum label"))
                    .with_token(label),
            );
        } else if !self.defined.insert(label.to_string()) {
            diags.push(
                Diagnostic::error(line, format!("label `{label}` is already defined"))
                    .with_token(label),
            );
        } else {
            self.live.push(label.to_string());
        }
    }
}

fn check_finite(value: f64, key: &str, line: usize, diags: &mut Vec<Diagnostic>) {
    if !value.is_finite() {
        diags.push(Diagnostic::error(
            line,
            format!("`{key}` must be finite, got {value}"),
        ));
    }
}

pub(crate) fn analyze(c: &Circuit) -> Analysis {
    let mut diags = Vec::new();

    // names
    let mut seen: HashSet<&str> = HashSet::new();
    let names = c
        .photons
        .iter()
        .enumerate()
        .map(|(i, p)| (p.name.as_str(), Decl::Photon(i)))
        .chain(
            c.elements
                .iter()
                .enumerate()
                .map(|(i, e)| (e.name.as_str(), Decl::Element(i))),
        )
        .chain(
            c.detectors
                .iter()
                .enumerate()
                .map(|(i, d)| (d.name.as_str(), Decl::Detector(i))),
        );
    for (name, decl) in names {
        if !seen.insert(name) {
            diags.push(
                Diagnostic::error(c.line_of(decl), format!("duplicate name `{name}`"))
                    .with_token(name),
            );
        }
    }

    // photons
    if c.photons.len() != 2 {
        let line = match c.photons.len() {
            0 => 1,
            1 => c.line_of(Decl::Photon(0)),
            _ => c.line_of(Decl::Photon(2)),
        };
        diags.push(Diagnostic::error(line, "exactly two photons required"));
    }
    let mut flow = Flow {
        defined: HashSet::new(),
        live: Vec::new(),
        used_vacuum: HashSet::new(),
    };
    for (i, p) in c.photons.iter().enumerate() {
        let line = c.line_of(Decl::Photon(i));
        if let Err(e) = p.wavepacket.check() {
            diags.push(Diagnostic::error(line, e.to_string()));
        }
        flow.produce(&p.mode, line, &mut diags);
    }
    if let [first, rest @ ..] = c.photons.as_slice() {
        for (i, p) in rest.iter().enumerate() {
            if p.wavepacket.bandwidth_fwhm_nm != first.wavepacket.bandwidth_fwhm_nm {
                diags.push(Diagnostic::error(
                    c.line_of(Decl::Photon(i + 1)),
                    "photon bandwidths must be equal",
                ));
            }
        }
    }

    // element dataflow
    for (i, e) in c.elements.iter().enumerate() {
        let line = c.line_of(Decl::Element(i));
        match &e.element {
            Element::BeamSplitter { inputs, outputs }
            | Element::PolarizingBeamSplitter { inputs, outputs } => {
                for input in inputs {
                    flow.consume(input, line, &mut diags);
                }
                for output in outputs {
                    if inputs.contains(output) {
                        diags.push(
                            Diagnostic::error(
                                line,
                                format!("output `{output}` reuses an input label"),
                            )
                            .with_token(output.as_str()),
                        );
                    } else {
                        flow.produce(output, line, &mut diags);
                    }
                }
            }
            other => {
                let mode = other.inputs()[0];
                if is_vacuum_label(mode) {
                    diags.push(Diagnostic::error(
                        line,
                        format!("cannot place an element on vacuum port `{mode}`"),
                    ));
                } else if !flow.live.iter().any(|l| l == mode) {
                    diags.push(flow.missing(mode, line));
                }
                match other {
                    Element::Phase { phi_rad, .. } => {
                        check_finite(*phi_rad, "phi_rad", line, &mut diags)
                    }
                    Element::HalfWavePlate { angle_deg, .. } => {
                        check_finite(*angle_deg, "angle_deg", line, &mut diags)
                    }
                    Element::Delay { tau_fs, .. } => {
                        check_finite(*tau_fs, "tau_fs", line, &mut diags)
                    }
                    Element::Polarizer {
                        angle_deg,
                        extinction,
                        ..
                    } => {
                        check_finite(*angle_deg, "angle_deg", line, &mut diags);
                        if !(*extinction >= 1.0) {
                            diags.push(Diagnostic::error(
                                line,
                                format!("`extinction` must be >= 1, got {extinction}"),
                            ));
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    // detectors
    let mut watched: BTreeMap<&str, BTreeSet<Polarization>> = BTreeMap::new();
    for (i, d) in c.detectors.iter().enumerate() {
        let line = c.line_of(Decl::Detector(i));
        if !flow.live.contains(&d.mode) {
            diags.push(flow.missing(&d.mode, line));
        }
        if !watched.entry(d.mode.as_str()).or_default().insert(d.pol) {
            diags.push(Diagnostic::error(
                line,
                format!("mode {}/{} already has a detector", d.mode, d.pol),
            ));
        }
    }

    let mut discarded: BTreeSet<&str> = BTreeSet::new();
    for (i, label) in c.discards.iter().enumerate() {
        let line = c.line_of(Decl::Discard(i));
        if !flow.live.contains(label) {
            diags.push(flow.missing(label, line));
        }
        if watched.contains_key(label.as_str()) {
            diags.push(Diagnostic::error(
                line,
                format!("`{label}` is both detected and discarded"),
            ));
        }
        if !discarded.insert(label.as_str()) {
            diags.push(Diagnostic::error(
                line,
                format!("`{label}` is discarded twice"),
            ));
        }
    }

    let last_line = (c.photons.len()
        + c.elements.len()
        + c.detectors.len()
        + c.discards.len()
        + c.coincidences.len())
    .max(1);
    let end_line = [
        c.lines.photons.last(),
        c.lines.elements.last(),
        c.lines.detectors.last(),
        c.lines.discards.last(),
        c.lines.coincidences.last(),
    ]
    .into_iter()
    .flatten()
    .copied()
    .max()
    .unwrap_or(last_line);
    for label in &flow.live {
        if discarded.contains(label.as_str()) {
            continue;
        }
        match watched.get(label.as_str()) {
            None => diags.push(Diagnostic::warning(
                end_line,
                format!("unterminated mode {label}"),
            )),
            Some(pols) => {
                for pol in Polarization::BOTH {
                    if !pols.contains(&pol) {
                        diags.push(Diagnostic::warning(
                            end_line,
                            format!("unterminated mode {label} ({pol})"),
                        ));
                    }
                }
            }
        }
    }

    // coincidence pairs
    let detector_names: HashSet<&str> = c.detectors.iter().map(|d| d.name.as_str()).collect();
    let mut pairs: HashSet<(&str, &str)> = HashSet::new();
    for (i, (a, b)) in c.coincidences.iter().enumerate() {
        let line = c.line_of(Decl::Coincidence(i));
        for d in [a, b] {
            if !detector_names.contains(d.as_str()) {
                diags.push(
                    Diagnostic::error(line, format!("unknown detector `{d}`"))
                        .with_token(d.as_str()),
                );
            }
        }
        if a == b {
            diags.push(Diagnostic::error(
                line,
                "coincidence needs two distinct detectors",
            ));
        }
        let key = if a <= b {
            (a.as_str(), b.as_str())
        } else {
            (b.as_str(), a.as_str())
        };
        if !pairs.insert(key) {
            diags.push(Diagnostic::error(
                line,
                format!("duplicate coincidence pair {a},{b}"),
            ));
        }
    }

    diags.sort_by_key(|d| d.line);
    Analysis {
        diagnostics: diags,
        terminal: flow.live,
    }
}

/// Semantic checks on a parsed circuit. An empty result means the circuit
/// compiles without remarks; warnings alone do not block compilation.
pub fn validate(circuit: &Circuit) -> Vec<Diagnostic> {
    analyze(circuit).diagnostics
}
