use thiserror::Error;

use crate::circuit::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid wavepacket: {0}")]
    InvalidWavepacket(String),

    #[error("wavepackets are not comparable: {0}")]
    WavepacketMismatch(String),

    #[error("exactly two photons required, got {0}")]
    PhotonCount(usize),

    #[error("duplicate spatial label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("port collision: output `{0}` already carries an unrelated photon")]
    PortCollision(String),

    #[error("unsupported circuit: {0}")]
    Unsupported(String),

    #[error("mode {0} carries amplitude but is neither detected nor discarded")]
    UnmappedMode(String),

    #[error("circuit has {} error diagnostic(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidCircuit(Vec<Diagnostic>),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("element `{name}` has no parameter `{field}`")]
    UnknownParameter { name: String, field: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),
}
