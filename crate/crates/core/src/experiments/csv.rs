//! Plain CSV output. Labels are identifiers, so no quoting is needed.

use std::io::{self, Write};

use super::{ChshResult, CoincidenceTable, ScanCurve};

/// `outcome,probability,count`; count is empty for exact runs.
pub fn write_table_csv<W: Write>(table: &CoincidenceTable, mut w: W) -> io::Result<()> {
    writeln!(w, "outcome,probability,count")?;
    for (outcome, p) in &table.probabilities {
        let n = table
            .count(outcome)
            .map(|n| n.to_string())
            .unwrap_or_default();
        writeln!(w, "{outcome},{p},{n}")?;
    }
    Ok(())
}

/// One row per grid point with every declared pair, probability and count,
/// then the loss; a `# visibility=` trailer when given.
pub fn write_scan_csv<W: Write>(
    curve: &ScanCurve,
    visibility: Option<f64>,
    mut w: W,
) -> io::Result<()> {
    let mut pairs: Vec<(String, String)> = curve
        .points
        .first()
        .map(|p| p.table.pairs.clone())
        .unwrap_or_default();
    if !pairs.contains(&curve.monitored) {
        pairs.insert(0, curve.monitored.clone());
    }
    write!(w, "{}", curve.field)?;
    for (a, b) in &pairs {
        write!(w, ",{a}-{b}_p,{a}-{b}_n")?;
    }
    writeln!(w, ",loss_p")?;
    for point in &curve.points {
        write!(w, "{}", point.param)?;
        for (a, b) in &pairs {
            let n = point
                .table
                .pair_count(a, b)
                .map(|n| n.to_string())
                .unwrap_or_default();
            write!(w, ",{},{n}", point.table.pair_probability(a, b))?;
        }
        writeln!(w, ",{}", point.table.loss())?;
    }
    if let Some(v) = visibility {
        writeln!(w, "# visibility={v}")?;
    }
    Ok(())
}

/// One row per setting, then `S,dS,sigma`.
pub fn write_chsh_csv<W: Write>(result: &ChshResult, mut w: W) -> io::Result<()> {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    writeln!(w, "thetaA,thetaB,Npp,Nmm,Npm,Nmp,Ppp,Pmm,Ppm,Pmp,E,dE")?;
    for c in &result.correlations {
        let n = match c.counts {
            Some(n) => n.map(|x| x.to_string()),
            None => Default::default(),
        };
        let p = c.probabilities;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            c.theta_a,
            c.theta_b,
            n[0],
            n[1],
            n[2],
            n[3],
            p[0],
            p[1],
            p[2],
            p[3],
            c.e,
            opt(c.de)
        )?;
    }
    writeln!(w, "S,dS,sigma")?;
    writeln!(w, "{},{},{}", result.s, opt(result.ds), opt(result.sigma))?;
    Ok(())
}
