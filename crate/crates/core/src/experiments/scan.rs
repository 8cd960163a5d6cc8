use rayon::prelude::*;

use super::{run_exact, sample_counts, CoincidenceTable, Sampling, Sites};
use crate::circuit::ElementProgram;
use crate::error::{Error, Result};

/// Inclusive, evenly spaced parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(from: f64, to: f64, step: f64) -> Result<Self> {
        if !(from.is_finite() && to.is_finite() && step.is_finite()) {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if to < from {
            return Err(Error::InvalidArgument(format!(
                "grid end {to} lies below start {from}"
            )));
        }
        if (to - from) / step > 1e7 {
            return Err(Error::InvalidArgument(
                "grid has more than 10^7 points".into(),
            ));
        }
        Ok(Self { from, to, step })
    }

    pub fn values(&self) -> Vec<f64> {
        // tolerate the end point landing a rounding error past `to`
        let n = ((self.to - self.from) / self.step * (1.0 + 1e-12)).floor() as usize;
        (0..=n).map(|i| self.from + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    /// Same-site coincidences against a photon delay; expect a dip.
    Hom,
    /// Cross-site coincidences against a path delay; expect fringes.
    Fringe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub param: f64,
    pub table: CoincidenceTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanCurve {
    pub element: String,
    pub field: String,
    pub kind: ScanKind,
    /// Coincidence pair whose rate is tracked.
    pub monitored: (String, String),
    pub points: Vec<ScanPoint>,
    /// Carrier period of the photons, for fringe analysis.
    pub period_fs: Option<f64>,
}

impl ScanCurve {
    /// `(param, value)` of the monitored pair: counts when sampled,
    /// probabilities otherwise.
    pub fn series(&self) -> Vec<(f64, f64)> {
        let (a, b) = &self.monitored;
        self.points
            .iter()
            .map(|p| {
                let v = match p.table.pair_count(a, b) {
                    Some(n) => n as f64,
                    None => p.table.pair_probability(a, b),
                };
                (p.param, v)
            })
            .collect()
    }

    pub fn visibility(&self) -> Result<f64> {
        match self.kind {
            ScanKind::Hom => dip_visibility(self),
            ScanKind::Fringe => fringe_visibility(self),
        }
    }
}

fn monitored_pair(program: &ElementProgram, kind: ScanKind) -> Result<(String, String)> {
    let site = |d: &str| program.detector(d).map(|d| d.mode.as_str());
    let declared = program.coincidences.iter().find(|(a, b)| {
        let same = site(a) == site(b);
        match kind {
            ScanKind::Hom => same,
            ScanKind::Fringe => !same,
        }
    });
    if let Some(pair) = declared {
        return Ok(pair.clone());
    }
    let sites = Sites::of(program)?;
    Ok(match kind {
        ScanKind::Hom => (sites.a.h_detector, sites.a.v_detector),
        ScanKind::Fringe => (sites.a.h_detector, sites.b.v_detector),
    })
}

/// Runs the program once per grid value of `element.field`. Points are
/// evaluated in parallel and returned in grid order; sampled points use
/// seeds derived from the master seed and the point index.
pub fn scan(
    program: &ElementProgram,
    element: &str,
    field: &str,
    grid: &[f64],
    kind: ScanKind,
    sampling: Option<&Sampling>,
) -> Result<ScanCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "scan grid must be strictly increasing".into(),
        ));
    }
    if let Some(s) = sampling {
        s.check()?;
    }
    // surfaces unknown element/field before fanning out
    program.with_parameter(element, field, grid[0])?;
    let monitored = monitored_pair(program, kind)?;

    let points = grid
        .par_iter()
        .enumerate()
        .map(|(i, &param)| {
            let table = run_exact(&program.with_parameter(element, field, param)?)?;
            let table = match sampling {
                Some(s) => sample_counts(&table, &s.for_point(i as u64))?,
                None => table,
            };
            Ok(ScanPoint { param, table })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScanCurve {
        element: element.to_string(),
        field: field.to_string(),
        kind,
        monitored,
        points,
        period_fs: program
            .photons
            .first()
            .map(|p| p.wavepacket.optical_period_fs()),
    })
}

fn delay_element(program: &ElementProgram, element: &str) -> Result<()> {
    let e = program
        .element(element)
        .ok_or_else(|| Error::UnknownElement(element.to_string()))?;
    if e.element.kind() != "delay" {
        return Err(Error::InvalidArgument(format!(
            "`{element}` is a {}, not a delay",
            e.element.kind()
        )));
    }
    Ok(())
}

/// Exact coincidence dip against the delay `element`.
pub fn hom_scan(program: &ElementProgram, element: &str, grid: &[f64]) -> Result<ScanCurve> {
    delay_element(program, element)?;
    scan(program, element, "tau_fs", grid, ScanKind::Hom, None)
}

/// Exact cross-site fringes against the delay `element`.
pub fn fringe_scan(program: &ElementProgram, element: &str, grid: &[f64]) -> Result<ScanCurve> {
    delay_element(program, element)?;
    scan(program, element, "tau_fs", grid, ScanKind::Fringe, None)
}

/// `(plateau − dip)/plateau`, with the plateau averaged over the outer 20%
/// of points on each side.
pub fn dip_visibility(curve: &ScanCurve) -> Result<f64> {
    let values: Vec<f64> = curve.series().into_iter().map(|(_, v)| v).collect();
    let n = values.len();
    if n < 5 {
        return Err(Error::Degenerate(format!(
            "{n} points are too few for a dip"
        )));
    }
    let k = ((n as f64 * 0.2).floor() as usize).max(1);
    let plateau = values[..k].iter().chain(&values[n - k..]).sum::<f64>() / (2 * k) as f64;
    if plateau <= 0.0 {
        return Err(Error::Degenerate("plateau rate is zero".into()));
    }
    let dip = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((plateau - dip) / plateau)
}

/// `(max − min)/(max + min)` over the optical period centred on the scan.
/// Without a period hint the whole curve is used.
pub fn fringe_visibility(curve: &ScanCurve) -> Result<f64> {
    let series = curve.series();
    let (Some(first), Some(last)) = (series.first(), series.last()) else {
        return Err(Error::Degenerate("empty scan".into()));
    };
    let window: Vec<f64> = match curve.period_fs {
        Some(period) => {
            if last.0 - first.0 < period * (1.0 - 1e-9) {
                return Err(Error::Degenerate(format!(
                    "scan spans less than one period ({period} fs)"
                )));
            }
            let centre = 0.5 * (first.0 + last.0);
            series
                .iter()
                .filter(|(x, _)| (x - centre).abs() <= 0.5 * period * (1.0 + 1e-9))
                .map(|(_, v)| *v)
                .collect()
        }
        None => series.iter().map(|(_, v)| *v).collect(),
    };
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max + min > 0.0) {
        return Err(Error::Degenerate("no coincidences in fringe window".into()));
    }
    Ok((max - min) / (max + min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::Outcome;
    use std::collections::BTreeMap;

    fn curve(kind: ScanKind, values: &[(f64, f64)], period: Option<f64>) -> ScanCurve {
        let points = values
            .iter()
            .map(|&(param, p)| {
                let mut probabilities = BTreeMap::new();
                probabilities.insert(Outcome::coincidence("X", "Y"), p);
                ScanPoint {
                    param,
                    table: CoincidenceTable {
                        pairs: vec![],
                        probabilities,
                        counts: None,
                        sampling: None,
                    },
                }
            })
            .collect();
        ScanCurve {
            element: "D".into(),
            field: "tau_fs".into(),
            kind,
            monitored: ("X".into(), "Y".into()),
            points,
            period_fs: period,
        }
    }

    #[test]
    fn grid_values() {
        let g = Grid::new(-1.0, 1.0, 0.5).unwrap();
        assert_eq!(g.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(Grid::new(0.0, 0.3, 0.1).unwrap().values().len(), 4);
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn flat_curve_has_zero_visibility() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 0.125)).collect();
        assert_eq!(
            dip_visibility(&curve(ScanKind::Hom, &pts, None)).unwrap(),
            0.0
        );
        assert_eq!(
            fringe_visibility(&curve(ScanKind::Fringe, &pts, None)).unwrap(),
            0.0
        );
    }

    #[test]
    fn full_dip() {
        let pts: Vec<_> = (0..11)
            .map(|i| (i as f64, if i == 5 { 0.0 } else { 0.125 }))
            .collect();
        assert!((dip_visibility(&curve(ScanKind::Hom, &pts, None)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_plateau_is_degenerate() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 0.0)).collect();
        assert!(matches!(
            dip_visibility(&curve(ScanKind::Hom, &pts, None)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn fringe_needs_a_full_period() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64 * 0.1, 0.1)).collect();
        assert!(fringe_visibility(&curve(ScanKind::Fringe, &pts, Some(2.34))).is_err());
    }

    #[test]
    fn cosine_fringe() {
        let period = 2.0;
        let pts: Vec<_> = (0..=200)
            .map(|i| {
                let x = -2.0 + i as f64 * 0.02;
                (
                    x,
                    0.25 * (1.0 - 0.8 * (std::f64::consts::TAU * x / period).cos()),
                )
            })
            .collect();
        let v = fringe_visibility(&curve(ScanKind::Fringe, &pts, Some(period))).unwrap();
        assert!((v - 0.8).abs() < 1e-12, "{v}");
    }
}
