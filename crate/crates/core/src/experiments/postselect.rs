//! Conditioning on one photon at each of two sites.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::CoincidenceTable;
use crate::error::{Error, Result};
use crate::photon::{InternalLabel, Outcome, TwoPhotonState};

/// Cross-site coincidence distribution renormalized to the post-selected
/// events, together with the post-selection success probability.
///
/// Keys are `(site A detector, site B detector)`; every combination is
/// present. When nothing post-selects the distribution is left at zero.
pub fn postselect_pairs(
    table: &CoincidenceTable,
    site_a: &[&str],
    site_b: &[&str],
) -> Result<(BTreeMap<(String, String), f64>, f64)> {
    if site_a.is_empty() || site_b.is_empty() {
        return Err(Error::InvalidArgument(
            "both sites need at least one detector".into(),
        ));
    }
    let mut raw: BTreeMap<(String, String), f64> = site_a
        .iter()
        .flat_map(|a| {
            site_b
                .iter()
                .map(move |b| ((a.to_string(), b.to_string()), 0.0))
        })
        .collect();
    for (outcome, p) in &table.probabilities {
        let Outcome::Coincidence(x, y) = outcome else {
            continue;
        };
        let key = if site_a.contains(&x.as_str()) && site_b.contains(&y.as_str()) {
            (x.clone(), y.clone())
        } else if site_a.contains(&y.as_str()) && site_b.contains(&x.as_str()) {
            (y.clone(), x.clone())
        } else {
            continue;
        };
        *raw.entry(key).or_insert(0.0) += p;
    }
    let success: f64 = raw.values().sum();
    if success > 0.0 {
        for p in raw.values_mut() {
            *p /= success;
        }
    }
    Ok((raw, success))
}

/// Basis index of a two-qubit polarization amplitude: `2·pol_A + pol_B`
/// with H = 0, V = 1.
pub type TwoQubit = [Complex64; 4];

/// `(|HV⟩ + e^{iφ}|VH⟩)/√2`.
pub fn tunable_state(phi: f64) -> TwoQubit {
    let r = FRAC_1_SQRT_2;
    [
        Complex64::default(),
        Complex64::new(r, 0.0),
        Complex64::from_polar(r, phi),
        Complex64::default(),
    ]
}

/// Polarization state of the events with exactly one photon on each of two
/// spatial labels. Each internal-label pair contributes one (unnormalized)
/// branch; branches add incoherently.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelectedState {
    pub branches: Vec<TwoQubit>,
    pub success: f64,
}

impl PostSelectedState {
    /// Normalized density matrix with internal labels traced out.
    pub fn density(&self) -> [[Complex64; 4]; 4] {
        let mut rho = [[Complex64::default(); 4]; 4];
        if self.success <= 0.0 {
            return rho;
        }
        for psi in &self.branches {
            for i in 0..4 {
                for j in 0..4 {
                    rho[i][j] += psi[i] * psi[j].conj() / self.success;
                }
            }
        }
        rho
    }

    /// `⟨t|ρ|t⟩` for a normalized pure target.
    pub fn fidelity(&self, target: &TwoQubit) -> f64 {
        if self.success <= 0.0 {
            return 0.0;
        }
        self.branches
            .iter()
            .map(|psi| {
                target
                    .iter()
                    .zip(psi)
                    .map(|(t, p)| t.conj() * p)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum::<f64>()
            / self.success
    }
}

/// Projects `state` onto one photon on `site_a` and one on `site_b`.
pub fn postselect_state(
    state: &TwoPhotonState,
    site_a: &str,
    site_b: &str,
) -> Result<PostSelectedState> {
    if site_a == site_b {
        return Err(Error::InvalidArgument(
            "sites must be distinct spatial labels".into(),
        ));
    }
    let mut branches: BTreeMap<(InternalLabel, InternalLabel), TwoQubit> = BTreeMap::new();
    let mut success = 0.0;
    for m in state.terms() {
        let (a, b) = if m.first.mode.spatial == site_a && m.second.mode.spatial == site_b {
            (&m.first, &m.second)
        } else if m.second.mode.spatial == site_a && m.first.mode.spatial == site_b {
            (&m.second, &m.first)
        } else {
            continue;
        };
        let idx = 2 * a.mode.pol.index() + b.mode.pol.index();
        branches.entry((a.label, b.label)).or_default()[idx] += m.amplitude;
        success += m.amplitude.norm_sqr();
    }
    Ok(PostSelectedState {
        branches: branches.into_values().collect(),
        success,
    })
}
