use crate::error::{Error, Result};

/// Linear optical element acting on spatial labels.
///
/// Angles are in degrees, phases in radians and delays in femtoseconds.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// 50:50 beamsplitter with a factor `i` on reflection.
    BeamSplitter {
        inputs: [String; 2],
        outputs: [String; 2],
    },
    /// Transmits H straight through, reflects V with a factor `i`.
    PolarizingBeamSplitter {
        inputs: [String; 2],
        outputs: [String; 2],
    },
    Phase {
        mode: String,
        phi_rad: f64,
    },
    HalfWavePlate {
        mode: String,
        angle_deg: f64,
    },
    Delay {
        mode: String,
        tau_fs: f64,
    },
    Polarizer {
        mode: String,
        angle_deg: f64,
        extinction: f64,
    },
}

impl Element {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::BeamSplitter { .. } => "bs",
            Element::PolarizingBeamSplitter { .. } => "pbs",
            Element::Phase { .. } => "phase",
            Element::HalfWavePlate { .. } => "hwp",
            Element::Delay { .. } => "delay",
            Element::Polarizer { .. } => "pol",
        }
    }

    pub fn inputs(&self) -> Vec<&str> {
        match self {
            Element::BeamSplitter { inputs, .. }
            | Element::PolarizingBeamSplitter { inputs, .. } => {
                inputs.iter().map(String::as_str).collect()
            }
            Element::Phase { mode, .. }
            | Element::HalfWavePlate { mode, .. }
            | Element::Delay { mode, .. }
            | Element::Polarizer { mode, .. } => vec![mode.as_str()],
        }
    }

    pub fn outputs(&self) -> Vec<&str> {
        match self {
            Element::BeamSplitter { outputs, .. }
            | Element::PolarizingBeamSplitter { outputs, .. } => {
                outputs.iter().map(String::as_str).collect()
            }
            _ => self.inputs(),
        }
    }

    /// Names of the numeric parameters the element exposes.
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            Element::BeamSplitter { .. } | Element::PolarizingBeamSplitter { .. } => &[],
            Element::Phase { .. } => &["phi_rad"],
            Element::HalfWavePlate { .. } => &["angle_deg"],
            Element::Delay { .. } => &["tau_fs"],
            Element::Polarizer { .. } => &["angle_deg", "extinction"],
        }
    }

    pub fn parameter(&self, field: &str) -> Option<f64> {
        match (self, field) {
            (Element::Phase { phi_rad, .. }, "phi_rad") => Some(*phi_rad),
            (Element::HalfWavePlate { angle_deg, .. }, "angle_deg") => Some(*angle_deg),
            (Element::Delay { tau_fs, .. }, "tau_fs") => Some(*tau_fs),
            (Element::Polarizer { angle_deg, .. }, "angle_deg") => Some(*angle_deg),
            (Element::Polarizer { extinction, .. }, "extinction") => Some(*extinction),
            _ => None,
        }
    }

    pub fn parameter_mut(&mut self, field: &str) -> Option<&mut f64> {
        match (self, field) {
            (Element::Phase { phi_rad, .. }, "phi_rad") => Some(phi_rad),
            (Element::HalfWavePlate { angle_deg, .. }, "angle_deg") => Some(angle_deg),
            (Element::Delay { tau_fs, .. }, "tau_fs") => Some(tau_fs),
            (Element::Polarizer { angle_deg, .. }, "angle_deg") => Some(angle_deg),
            (Element::Polarizer { extinction, .. }, "extinction") => Some(extinction),
            _ => None,
        }
    }

    pub(crate) fn check_ports(&self) -> Result<()> {
        if let Element::BeamSplitter { inputs, outputs }
        | Element::PolarizingBeamSplitter { inputs, outputs } = self
        {
            let all = [&inputs[0], &inputs[1], &outputs[0], &outputs[1]];
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if all[i] == all[j] {
                        return Err(Error::InvalidElement(format!(
                            "{} ports must be four distinct labels, `{}` repeats",
                            self.kind(),
                            all[i]
                        )));
                    }
                }
            }
        }
        if let Element::Polarizer { extinction, .. } = self {
            if !(*extinction >= 1.0) {
                return Err(Error::InvalidElement(format!(
                    "polarizer extinction must be >= 1, got {extinction}"
                )));
            }
        }
        Ok(())
    }
}
