use std::collections::BTreeMap;

use super::{Circuit, DetectorDecl, Diagnostic, NamedElement, PhotonDecl};
use crate::photon::{Element, Polarization, Wavepacket};

fn valid_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// key=value arguments of one statement.
struct Args<'a> {
    line: usize,
    values: BTreeMap<&'a str, &'a str>,
    diags: Vec<Diagnostic>,
}

impl<'a> Args<'a> {
    fn collect(line: usize, tokens: &[&'a str], allowed: &[&str]) -> Self {
        let mut values = BTreeMap::new();
        let mut diags = Vec::new();
        for tok in tokens {
            let Some((key, value)) = tok.split_once('=') else {
                diags.push(
                    Diagnostic::error(line, format!("expected key=value, found `{tok}`"))
                        .with_token(*tok),
                );
                continue;
            };
            if !allowed.contains(&key) {
                diags
                    .push(Diagnostic::error(line, format!("unknown key `{key}`")).with_token(*tok));
            } else if values.insert(key, value).is_some() {
                diags.push(
                    Diagnostic::error(line, format!("duplicate key `{key}`")).with_token(*tok),
                );
            }
        }
        for key in allowed {
            if !values.contains_key(key) {
                diags.push(Diagnostic::error(line, format!("missing key `{key}`")));
            }
        }
        Self {
            line,
            values,
            diags,
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.values.get(key).copied()
    }

    fn label(&mut self, key: &str) -> Option<String> {
        let v = self.raw(key)?;
        if valid_identifier(v) {
            Some(v.to_string())
        } else {
            self.diags.push(
                Diagnostic::error(self.line, format!("invalid label `{v}` for `{key}`"))
                    .with_token(v),
            );
            None
        }
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        let v = self.raw(key)?;
        match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.diags.push(
                    Diagnostic::error(self.line, format!("malformed number `{v}` for `{key}`"))
                        .with_token(v),
                );
                None
            }
        }
    }

    fn pol(&mut self, key: &str) -> Option<Polarization> {
        let v = self.raw(key)?;
        match v {
            "H" => Some(Polarization::H),
            "V" => Some(Polarization::V),
            _ => {
                self.diags.push(
                    Diagnostic::error(
                        self.line,
                        format!("polarization must be H or V, found `{v}`"),
                    )
                    .with_token(v),
                );
                None
            }
        }
    }

    fn port_pair(&mut self, key: &str, what: &str) -> Option<[String; 2]> {
        let v = self.raw(key)?;
        let pair = split_pair(v);
        match pair {
            Some((a, b)) if valid_identifier(a) && valid_identifier(b) => {
                if a == b {
                    self.diags.push(
                        Diagnostic::error(self.line, format!("duplicate {what} port `{a}`"))
                            .with_token(v),
                    );
                    return None;
                }
                Some([a.to_string(), b.to_string()])
            }
            _ => {
                self.diags.push(
                    Diagnostic::error(
                        self.line,
                        format!("`{key}` expects two comma-separated labels, found `{v}`"),
                    )
                    .with_token(v),
                );
                None
            }
        }
    }
}

fn split_pair(v: &str) -> Option<(&str, &str)> {
    let mut parts = v.split(',');
    let a = parts.next()?;
    let b = parts.next()?;
    parts.next().is_none().then_some((a, b))
}

enum Statement {
    Photon(PhotonDecl),
    Element(NamedElement),
    Detector(DetectorDecl),
    Discard(String),
    Coincidence(String, String),
}

fn parse_statement(line: usize, tokens: &[&str], diags: &mut Vec<Diagnostic>) -> Option<Statement> {
    let directive = tokens[0];
    let rest = &tokens[1..];

    match directive {
        "discard" => {
            return match rest {
                [label] if valid_identifier(label) => Some(Statement::Discard(label.to_string())),
                [label] => {
                    diags.push(
                        Diagnostic::error(line, format!("invalid label `{label}`"))
                            .with_token(*label),
                    );
                    None
                }
                _ => {
                    diags.push(Diagnostic::error(line, "discard expects exactly one label"));
                    None
                }
            };
        }
        "coincidence" => {
            return match rest {
                [pair] => match split_pair(pair) {
                    Some((a, b)) if valid_identifier(a) && valid_identifier(b) => {
                        Some(Statement::Coincidence(a.to_string(), b.to_string()))
                    }
                    _ => {
                        diags.push(
                            Diagnostic::error(
                                line,
                                format!("coincidence expects two detector names, found `{pair}`"),
                            )
                            .with_token(*pair),
                        );
                        None
                    }
                },
                _ => {
                    diags.push(Diagnostic::error(
                        line,
                        "coincidence expects `<det1>,<det2>`",
                    ));
                    None
                }
            };
        }
        "photon" | "bs" | "pbs" | "hwp" | "phase" | "delay" | "pol" | "detector" => {}
        other => {
            diags.push(
                Diagnostic::error(line, format!("unknown directive `{other}`")).with_token(other),
            );
            return None;
        }
    }

    let Some(name) = rest.first().filter(|t| !t.contains('=')) else {
        diags.push(Diagnostic::error(
            line,
            format!("`{directive}` is missing a name"),
        ));
        return None;
    };
    if !valid_identifier(name) {
        diags.push(Diagnostic::error(line, format!("invalid name `{name}`")).with_token(*name));
        return None;
    }
    let name = name.to_string();
    let tokens = &rest[1..];

    let allowed: &[&str] = match directive {
        "photon" => &["mode", "pol", "wavelength_nm", "bandwidth_nm", "delay_fs"],
        "bs" | "pbs" => &["in", "out"],
        "hwp" => &["mode", "angle_deg"],
        "phase" => &["mode", "phi_rad"],
        "delay" => &["mode", "tau_fs"],
        "pol" => &["mode", "angle_deg", "extinction"],
        _ => &["mode", "pol"],
    };
    let mut args = Args::collect(line, tokens, allowed);

    let statement = match directive {
        "photon" => {
            let mode = args.label("mode");
            let pol = args.pol("pol");
            let lambda = args.number("wavelength_nm");
            let bw = args.number("bandwidth_nm");
            let delay = args.number("delay_fs");
            match (mode, pol, lambda, bw, delay) {
                (Some(mode), Some(pol), Some(l), Some(b), Some(d)) => {
                    Some(Statement::Photon(PhotonDecl {
                        name,
                        mode,
                        pol,
                        wavepacket: Wavepacket {
                            center_wavelength_nm: l,
                            bandwidth_fwhm_nm: b,
                            delay_fs: d,
                        },
                    }))
                }
                _ => None,
            }
        }
        "bs" | "pbs" => {
            let inputs = args.port_pair("in", "input");
            let outputs = args.port_pair("out", "output");
            match (inputs, outputs) {
                (Some(inputs), Some(outputs)) => {
                    let element = if directive == "bs" {
                        Element::BeamSplitter { inputs, outputs }
                    } else {
                        Element::PolarizingBeamSplitter { inputs, outputs }
                    };
                    Some(Statement::Element(NamedElement { name, element }))
                }
                _ => None,
            }
        }
        "hwp" | "phase" | "delay" => {
            let key = match directive {
                "hwp" => "angle_deg",
                "phase" => "phi_rad",
                _ => "tau_fs",
            };
            let mode = args.label("mode");
            let value = args.number(key);
            match (mode, value) {
                (Some(mode), Some(v)) => {
                    let element = match directive {
                        "hwp" => Element::HalfWavePlate { mode, angle_deg: v },
                        "phase" => Element::Phase { mode, phi_rad: v },
                        _ => Element::Delay { mode, tau_fs: v },
                    };
                    Some(Statement::Element(NamedElement { name, element }))
                }
                _ => None,
            }
        }
        "pol" => {
            let mode = args.label("mode");
            let angle = args.number("angle_deg");
            let ext = args.number("extinction");
            match (mode, angle, ext) {
                (Some(mode), Some(angle_deg), Some(extinction)) => {
                    Some(Statement::Element(NamedElement {
                        name,
                        element: Element::Polarizer {
                            mode,
                            angle_deg,
                            extinction,
                        },
                    }))
                }
                _ => None,
            }
        }
        _ => {
            let mode = args.label("mode");
            let pol = args.pol("pol");
            match (mode, pol) {
                (Some(mode), Some(pol)) => {
                    Some(Statement::Detector(DetectorDecl { name, mode, pol }))
                }
                _ => None,
            }
        }
    };

    let clean = args.diags.is_empty();
    diags.append(&mut args.diags);
    statement.filter(|_| clean)
}

/// Parses a `.qopt` description.
///
/// Parsing never stops at the first problem: every line is examined and all
/// error diagnostics are returned together.
pub fn parse_circuit(text: &str) -> Result<Circuit, Vec<Diagnostic>> {
    let mut circuit = Circuit::default();
    let mut diags = Vec::new();
    let mut saw_photon = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        saw_photon |= tokens[0] == "photon";
        match parse_statement(line, &tokens, &mut diags) {
            Some(Statement::Photon(p)) => {
                circuit.photons.push(p);
                circuit.lines.photons.push(line);
            }
            Some(Statement::Element(e)) => {
                circuit.elements.push(e);
                circuit.lines.elements.push(line);
            }
            Some(Statement::Detector(d)) => {
                circuit.detectors.push(d);
                circuit.lines.detectors.push(line);
            }
            Some(Statement::Discard(l)) => {
                circuit.discards.push(l);
                circuit.lines.discards.push(line);
            }
            Some(Statement::Coincidence(a, b)) => {
                circuit.coincidences.push((a, b));
                circuit.lines.coincidences.push(line);
            }
            None => {}
        }
    }

    if !saw_photon {
        diags.push(Diagnostic::error(1, "no photon declarations"));
    }
    if diags.is_empty() {
        Ok(circuit)
    } else {
        diags.sort_by_key(|d| d.line);
        Err(diags)
    }
}
