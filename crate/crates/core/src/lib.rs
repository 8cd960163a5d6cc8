//! Two-photon linear-optics simulator.
//!
//! - [`photon`]: exact evolution of two-photon states through beamsplitters,
//!   polarizing beamsplitters, wave plates, phases, delays and polarizers.
//! - [`circuit`]: the `.qopt` description language (parse, validate,
//!   format, compile).
//! - [`experiments`]: exact and Poisson-sampled coincidence tables, HOM and
//!   fringe scans, post-selection and CHSH analysis, CSV output.

pub mod circuit;
pub mod error;
pub mod experiments;
pub mod photon;

pub use error::{Error, Result};
