//! Gaussian single-photon wavepackets and their mutual overlap.
//!
//! A wavepacket is a Gaussian spectral amplitude centred on `ω_c` whose
//! spectral *intensity* has the given FWHM (converted from wavelength to
//! angular frequency to first order), shifted in time by `delay_fs`:
//!
//! ```text
//! φ(ω) ∝ exp(-(ω-ω_c)² / 4σ_ω²) · exp(iω·delay)
//! ```
//!
//! For two packets with identical spectra the overlap reduces to
//! `γ(Δτ) = exp(iω₀Δτ) · exp(-Δτ² / 4σ_τ²)` with `σ_τ = 1 / (√2 σ_ω)`,
//! which is also the standard deviation of the Gaussian HOM dip.

use std::f64::consts::{LN_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792_458;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavepacket {
    pub center_wavelength_nm: f64,
    pub bandwidth_fwhm_nm: f64,
    pub delay_fs: f64,
}

impl Wavepacket {
    pub fn new(center_wavelength_nm: f64, bandwidth_fwhm_nm: f64, delay_fs: f64) -> Result<Self> {
        let w = Self {
            center_wavelength_nm,
            bandwidth_fwhm_nm,
            delay_fs,
        };
        w.check()?;
        Ok(w)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.center_wavelength_nm.is_finite() && self.center_wavelength_nm > 0.0) {
            return Err(Error::InvalidWavepacket(format!(
                "center wavelength must be positive, got {}",
                self.center_wavelength_nm
            )));
        }
        if !(self.bandwidth_fwhm_nm.is_finite() && self.bandwidth_fwhm_nm > 0.0) {
            return Err(Error::InvalidWavepacket(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth_fwhm_nm
            )));
        }
        if !self.delay_fs.is_finite() {
            return Err(Error::InvalidWavepacket(format!(
                "delay must be finite, got {}",
                self.delay_fs
            )));
        }
        Ok(())
    }

    /// Carrier angular frequency ω₀ = 2πc/λ₀ in rad/fs.
    pub fn carrier_angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS / self.center_wavelength_nm
    }

    /// Optical period λ₀/c in fs.
    pub fn optical_period_fs(&self) -> f64 {
        self.center_wavelength_nm / SPEED_OF_LIGHT_NM_PER_FS
    }

    /// Standard deviation of the spectral intensity in rad/fs.
    pub fn spectral_sigma(&self) -> f64 {
        let lambda = self.center_wavelength_nm;
        let fwhm_omega =
            2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS * self.bandwidth_fwhm_nm / (lambda * lambda);
        fwhm_omega / (2.0 * (2.0 * LN_2).sqrt())
    }

    /// Temporal coherence width σ_τ in fs.
    pub fn coherence_sigma_fs(&self) -> f64 {
        1.0 / (SQRT_2 * self.spectral_sigma())
    }

    pub fn delayed(&self, tau_fs: f64) -> Self {
        Self {
            delay_fs: self.delay_fs + tau_fs,
            ..*self
        }
    }

    /// Same spectrum and, up to a relative tolerance of 1e-12, the same delay.
    pub(crate) fn same_mode(&self, other: &Self) -> bool {
        self.center_wavelength_nm == other.center_wavelength_nm
            && self.bandwidth_fwhm_nm == other.bandwidth_fwhm_nm
            && (self.delay_fs - other.delay_fs).abs()
                <= 1e-12 * self.delay_fs.abs().max(other.delay_fs.abs()).max(1.0)
    }
}

struct OverlapParts {
    log_magnitude: f64,
    phase: f64,
}

fn overlap_parts(w1: &Wavepacket, w2: &Wavepacket) -> Result<OverlapParts> {
    w1.check()?;
    w2.check()?;
    if w1.bandwidth_fwhm_nm != w2.bandwidth_fwhm_nm {
        return Err(Error::WavepacketMismatch(format!(
            "bandwidths differ ({} nm vs {} nm)",
            w1.bandwidth_fwhm_nm, w2.bandwidth_fwhm_nm
        )));
    }
    let (s1, s2) = (w1.spectral_sigma(), w2.spectral_sigma());
    let (o1, o2) = (
        w1.carrier_angular_frequency(),
        w2.carrier_angular_frequency(),
    );
    let dt = w2.delay_fs - w1.delay_fs;

    let k1 = 1.0 / (4.0 * s1 * s1);
    let k2 = 1.0 / (4.0 * s2 * s2);
    let a = k1 + k2;
    let center = (o1 * k1 + o2 * k2) / a;
    let d_omega = o2 - o1;

    // ln of sqrt(π/a) / sqrt(2π σ₁σ₂), zero for equal widths.
    let log_norm = if s1 == s2 {
        0.0
    } else {
        -0.5 * (2.0 * a * s1 * s2).ln()
    };
    let log_magnitude =
        log_norm - d_omega * d_omega / (4.0 * (s1 * s1 + s2 * s2)) - dt * dt / (4.0 * a);
    Ok(OverlapParts {
        log_magnitude,
        phase: center * dt,
    })
}

/// Complex overlap γ = ⟨w₁|w₂⟩.
///
/// Packets must share a bandwidth; centre wavelengths may differ (spectral
/// detuning lowers |γ| at every delay).
pub fn wavepacket_overlap(w1: &Wavepacket, w2: &Wavepacket) -> Result<Complex64> {
    let p = overlap_parts(w1, w2)?;
    Ok(Complex64::from_polar(p.log_magnitude.exp(), p.phase))
}

/// `1 - |γ|²`, evaluated without cancellation for nearly identical packets.
pub fn distinguishability(w1: &Wavepacket, w2: &Wavepacket) -> Result<f64> {
    let p = overlap_parts(w1, w2)?;
    Ok(-(2.0 * p.log_magnitude).exp_m1())
}

/// Delay offset giving `|γ| = magnitude` between `w` and a delayed copy of it.
pub fn delay_for_overlap(w: &Wavepacket, magnitude: f64) -> Result<f64> {
    if !(magnitude > 0.0 && magnitude <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "overlap magnitude must lie in (0, 1], got {magnitude}"
        )));
    }
    Ok(2.0 * w.coherence_sigma_fs() * (-magnitude.ln()).sqrt())
}

/// Centre wavelength for a second photon such that `|γ(0)| = magnitude`
/// against `w` (bluer than `w`, same bandwidth).
pub fn detuned_wavelength_for_overlap(w: &Wavepacket, magnitude: f64) -> Result<f64> {
    if !(magnitude > 0.0 && magnitude <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "overlap magnitude must lie in (0, 1], got {magnitude}"
        )));
    }
    // |γ(0)| is monotone in the detuning; bisect on wavelength.
    let target = magnitude;
    let mut lo = 0.0;
    let mut hi = w.center_wavelength_nm * 0.5;
    let at = |shift: f64| -> Result<f64> {
        let other = Wavepacket {
            center_wavelength_nm: w.center_wavelength_nm - shift,
            delay_fs: w.delay_fs,
            ..*w
        };
        Ok(wavepacket_overlap(w, &other)?.norm())
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(w.center_wavelength_nm - 0.5 * (lo + hi))
}
