//! Line-oriented circuit description language (`.qopt`).
//!
//! ```text
//! photon <name> mode=<label> pol=<H|V> wavelength_nm=<f> bandwidth_nm=<f> delay_fs=<f>
//! bs <name> in=<l1>,<l2> out=<l3>,<l4>
//! pbs <name> in=<l1>,<l2> out=<l3>,<l4>
//! hwp <name> mode=<l> angle_deg=<f>
//! phase <name> mode=<l> phi_rad=<f>
//! delay <name> mode=<l> tau_fs=<f>
//! pol <name> mode=<l> angle_deg=<f> extinction=<f>
//! detector <name> mode=<l> pol=<H|V>
//! discard <label>
//! coincidence <det1>,<det2>
//! ```
//!
//! `#` starts a comment. Labels beginning with `vac` are vacuum ports and
//! may be used once as a beamsplitter input without being declared.

mod format;
mod parse;
mod program;
mod validate;

use std::fmt;

pub use format::format_circuit;
pub use parse::parse_circuit;
pub use program::{compile, ElementProgram};
pub use validate::validate;

use crate::photon::{Element, Polarization, Wavepacket};

pub fn is_vacuum_label(label: &str) -> bool {
    label.starts_with("vac")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A parse or validation message. Displays as `LINE:SEVERITY:MESSAGE`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// 1-based source line.
    pub line: usize,
    pub message: String,
    pub token: Option<String>,
}

impl Diagnostic {
    pub fn error(line: usize, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            line,
            message: message.into(),
            token: None,
        }
    }

    pub fn warning(line: usize, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            line,
            message: message.into(),
            token: None,
        }
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.token = Some(token.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.line, self.severity, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDecl {
    pub name: String,
    pub mode: String,
    pub pol: Polarization,
    pub wavepacket: Wavepacket,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedElement {
    pub name: String,
    pub element: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorDecl {
    pub name: String,
    pub mode: String,
    pub pol: Polarization,
}

/// Source line of every declaration, per category.
#[derive(Debug, Clone, Default)]
pub(crate) struct SourceLines {
    photons: Vec<usize>,
    elements: Vec<usize>,
    detectors: Vec<usize>,
    discards: Vec<usize>,
    coincidences: Vec<usize>,
}

/// Parsed circuit. Equality is semantic: source line numbers are ignored.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    pub photons: Vec<PhotonDecl>,
    pub elements: Vec<NamedElement>,
    pub detectors: Vec<DetectorDecl>,
    pub discards: Vec<String>,
    pub coincidences: Vec<(String, String)>,
    pub(crate) lines: SourceLines,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.photons == other.photons
            && self.elements == other.elements
            && self.detectors == other.detectors
            && self.discards == other.discards
            && self.coincidences == other.coincidences
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Decl {
    Photon(usize),
    Element(usize),
    Detector(usize),
    Discard(usize),
    Coincidence(usize),
}

impl Circuit {
    /// Source line of a declaration; circuits built in code fall back to the
    /// line the statement would occupy in [`format_circuit`] output.
    pub(crate) fn line_of(&self, decl: Decl) -> usize {
        let l = &self.lines;
        let (recorded, offset, idx) = match decl {
            Decl::Photon(i) => (&l.photons, 0, i),
            Decl::Element(i) => (&l.elements, self.photons.len(), i),
            Decl::Detector(i) => (&l.detectors, self.photons.len() + self.elements.len(), i),
            Decl::Discard(i) => (
                &l.discards,
                self.photons.len() + self.elements.len() + self.detectors.len(),
                i,
            ),
            Decl::Coincidence(i) => (
                &l.coincidences,
                self.photons.len()
                    + self.elements.len()
                    + self.detectors.len()
                    + self.discards.len(),
                i,
            ),
        };
        recorded.get(idx).copied().unwrap_or(offset + idx + 1)
    }
}
