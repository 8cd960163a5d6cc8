use std::f64::consts::SQRT_2;

use super::{run_exact, sample_counts, Sampling, Sites};
use crate::circuit::ElementProgram;
use crate::error::{Error, Result};

/// Correlation coefficient and its Poisson uncertainty from the four
/// coincidence numbers `[N++, N−−, N+−, N−+]`.
///
/// Inputs are plain numbers so that probabilities work as well as counts.
pub fn correlation_e(n: [f64; 4]) -> Result<(f64, f64)> {
    if n.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "invalid coincidence numbers {n:?}"
        )));
    }
    let [pp, mm, pm, mp] = n;
    let same = pp + mm;
    let diff = pm + mp;
    let total = same + diff;
    if total <= 0.0 {
        return Err(Error::Degenerate("no coincidences for correlation".into()));
    }
    let e = (same - diff) / total;
    // ∂E/∂N± = ±(1 ∓ E)/T, var N = N
    let var = ((1.0 - e).powi(2) * same + (1.0 + e).powi(2) * diff) / (total * total);
    Ok((e, var.sqrt()))
}

/// Analysis angles in degrees for both settings of each site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshAngles {
    fn default() -> Self {
        Self {
            a: 0.0,
            a_prime: 45.0,
            b: 22.5,
            b_prime: 67.5,
        }
    }
}

impl ChshAngles {
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match *v {
            [a, a_prime, b, b_prime] if v.iter().all(|x| x.is_finite()) => Ok(Self {
                a,
                a_prime,
                b,
                b_prime,
            }),
            _ => Err(Error::InvalidArgument(format!(
                "expected four finite angles, got {v:?}"
            ))),
        }
    }

    /// `(θA, θB)` in the order `E(a,b), E(a,b'), E(a',b), E(a',b')`.
    pub fn settings(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChshMode {
    Exact,
    Sampled(Sampling),
}

/// One analyzer setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub theta_a: f64,
    pub theta_b: f64,
    /// `[P++, P−−, P+−, P−+]` (unconditional).
    pub probabilities: [f64; 4],
    pub counts: Option<[u64; 4]>,
    pub e: f64,
    pub de: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshResult {
    pub angles: ChshAngles,
    pub correlations: [Correlation; 4],
    pub s: f64,
    pub ds: Option<f64>,
    /// `(S − 2)/ΔS`.
    pub sigma: Option<f64>,
}

impl ChshResult {
    /// ΔS expected from Poisson statistics at the exact probabilities.
    pub fn predicted_uncertainty(&self, pair_rate: f64, duration_s: f64) -> f64 {
        (self.variance_per_exposure() / (pair_rate * duration_s)).sqrt()
    }

    /// Acquisition time per setting needed for a target ΔS.
    pub fn duration_for_uncertainty(&self, pair_rate: f64, ds: f64) -> f64 {
        self.variance_per_exposure() / (pair_rate * ds * ds)
    }

    fn variance_per_exposure(&self) -> f64 {
        // expected counts give ΔE² = (1 − E²)/T
        self.correlations
            .iter()
            .map(|c| {
                let p: f64 = c.probabilities.iter().sum();
                let e = correlation_e(c.probabilities).map(|x| x.0).unwrap_or(0.0);
                if p > 0.0 {
                    (1.0 - e * e) / p
                } else {
                    f64::INFINITY
                }
            })
            .sum()
    }
}

/// Last half-wave plate acting on `label`: the analyzer of that site.
fn analyzer(program: &ElementProgram, label: &str) -> Result<String> {
    program
        .elements
        .iter()
        .rev()
        .find(|e| e.element.kind() == "hwp" && e.element.inputs() == [label])
        .map(|e| e.name.clone())
        .ok_or_else(|| Error::InvalidArgument(format!("no half-wave plate on site `{label}`")))
}

/// CHSH parameter `S = |E(a,b) − E(a,b') + E(a',b) + E(a',b')|`.
///
/// The two sites are the first two spatial labels carrying both an H and a V
/// detector; each site is analysed by its last half-wave plate, set to half
/// the analysis angle. In sampled mode each setting gets its own seed
/// derived from the master seed.
pub fn chsh(program: &ElementProgram, angles: &ChshAngles, mode: ChshMode) -> Result<ChshResult> {
    let sites = Sites::of(program)?;
    let hwp_a = analyzer(program, &sites.a.label)?;
    let hwp_b = analyzer(program, &sites.b.label)?;
    if let ChshMode::Sampled(s) = &mode {
        s.check()?;
    }
    let (ha, va) = (&sites.a.h_detector, &sites.a.v_detector);
    let (hb, vb) = (&sites.b.h_detector, &sites.b.v_detector);

    let mut out = Vec::with_capacity(4);
    for (i, (ta, tb)) in angles.settings().into_iter().enumerate() {
        let p = program
            .with_parameter(&hwp_a, "angle_deg", ta / 2.0)?
            .with_parameter(&hwp_b, "angle_deg", tb / 2.0)?;
        let table = run_exact(&p)?;
        let pairs = [(ha, hb), (va, vb), (ha, vb), (va, hb)];
        let probabilities = pairs.map(|(x, y)| table.pair_probability(x, y));
        let c = match &mode {
            ChshMode::Exact => Correlation {
                theta_a: ta,
                theta_b: tb,
                probabilities,
                counts: None,
                e: correlation_e(probabilities)?.0,
                de: None,
            },
            ChshMode::Sampled(s) => {
                let sampled = sample_counts(&table, &s.for_point(i as u64))?;
                let counts = pairs.map(|(x, y)| sampled.pair_count(x, y).unwrap_or(0));
                let (e, de) = correlation_e(counts.map(|n| n as f64))?;
                Correlation {
                    theta_a: ta,
                    theta_b: tb,
                    probabilities,
                    counts: Some(counts),
                    e,
                    de: Some(de),
                }
            }
        };
        out.push(c);
    }
    let correlations: [Correlation; 4] = out.try_into().expect("four settings");
    let [e1, e2, e3, e4] = correlations.map(|c| c.e);
    let s = (e1 - e2 + e3 + e4).abs();
    let ds = match mode {
        ChshMode::Exact => None,
        ChshMode::Sampled(_) => Some(
            correlations
                .iter()
                .map(|c| c.de.unwrap().powi(2))
                .sum::<f64>()
                .sqrt(),
        ),
    };
    let sigma = ds.and_then(|d| (d > 0.0).then(|| (s - 2.0) / d));
    Ok(ChshResult {
        angles: *angles,
        correlations,
        s,
        ds,
        sigma,
    })
}

/// S at the standard angles when a fraction `g = |γ|²` of the post-selected
/// pairs is entangled and the rest is an incoherent HV/VH mixture.
pub fn chsh_for_indistinguishability(g: f64) -> f64 {
    2.0 * SQRT_2 * g + SQRT_2 * (1.0 - g)
}

/// Inverse of [`chsh_for_indistinguishability`].
pub fn indistinguishability_for_chsh(s: f64) -> Result<f64> {
    let g = (s - SQRT_2) / SQRT_2;
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidArgument(format!("S = {s} outside [√2, 2√2]")));
    }
    Ok(g)
}
