//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! on stderr:
//!
//! ```text
//! cargo test -p qopt-core --test acceptance -- --nocapture
//! ```

mod common;

use std::f64::consts::{PI, SQRT_2, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fixture, fixture_text, random_circuit, with_hwps, with_phases};
use qopt_core::circuit::{format_circuit, parse_circuit, validate, ElementProgram};
use qopt_core::experiments::*;
use qopt_core::photon::{
    delay_for_overlap, detuned_wavelength_for_overlap, Wavepacket, SPEED_OF_LIGHT_NM_PER_FS,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn source_packet() -> Wavepacket {
    Wavepacket::new(702.2, 1.5, 0.0).unwrap()
}

/// 1. Post-selected state is (|HV⟩ + e^{iφ}|VH⟩)/√2 with
///    φ = φ2 + φ3 − φ1 − φ4, success probability 1/2.
fn postselected_state() -> Check {
    let base = with_hwps(&fixture("bell_setup.qopt"), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_f: f64 = 1.0;
    let mut worst_p: f64 = 0.0;
    for _ in 0..20 {
        let phi: [f64; 4] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        let p = with_phases(&base, phi);
        let ps = postselect_state(&p.run().map_err(|e| e.to_string())?, "A", "B")
            .map_err(|e| e.to_string())?;
        let total = phi[1] + phi[2] - phi[0] - phi[3];
        worst_f = worst_f.min(ps.fidelity(&tunable_state(total)));
        worst_p = worst_p.max((ps.success - 0.5).abs());
    }
    ensure(worst_f >= 1.0 - 1e-12, || format!("fidelity {worst_f}"))?;
    ensure(worst_p <= 1e-12, || format!("success off by {worst_p}"))?;
    Ok(format!(
        "min fidelity {worst_f:.15}, max |success-0.5| {worst_p:.1e}"
    ))
}

/// 2. Ideal singlet at (0°, 45°, 22.5°, 67.5°) gives S = 2√2.
fn chsh_maximum() -> Check {
    let r = chsh(
        &fixture("bell_setup.qopt"),
        &ChshAngles::default(),
        ChshMode::Exact,
    )
    .map_err(|e| e.to_string())?;
    ensure((r.s - 2.0 * SQRT_2).abs() <= 1e-9, || {
        format!("S = {}", r.s)
    })?;
    Ok(format!("S = {:.12}", r.s))
}

/// 3. Product inputs and fully distinguishable photons never exceed S = 2.
fn local_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let angle_sets: Vec<ChshAngles> = (0..100)
        .map(|_| {
            let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-180.0..180.0));
            ChshAngles::from_slice(&v).unwrap()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (pa, pb) = (rng.random_range(-90.0..90.0), rng.random_range(-90.0..90.0));
        let text = format!(
            "photon P1 mode=A pol=H wavelength_nm=702.2 bandwidth_nm=1.5 delay_fs=0
photon P2 mode=B pol=V wavelength_nm=702.2 bandwidth_nm=1.5 delay_fs=0
hwp PA mode=A angle_deg={pa}
hwp PB mode=B angle_deg={pb}
hwp HA mode=A angle_deg=0
hwp HB mode=B angle_deg=0
detector DHA mode=A pol=H
detector DVA mode=A pol=V
detector DHB mode=B pol=H
detector DVB mode=B pol=V
"
        );
        let p = ElementProgram::from_text(&text).map_err(|e| e.to_string())?;
        for a in &angle_sets {
            worst = worst.max(chsh(&p, a, ChshMode::Exact).map_err(|e| e.to_string())?.s);
        }
    }
    let product = worst;
    let mut distinguishable = fixture("bell_setup.qopt");
    distinguishable.photons[1].wavepacket.delay_fs = 50.0 * source_packet().coherence_sigma_fs();
    for a in &angle_sets {
        worst = worst.max(
            chsh(&distinguishable, a, ChshMode::Exact)
                .map_err(|e| e.to_string())?
                .s,
        );
    }
    ensure(worst <= 2.0 + 1e-9, || format!("S = {worst}"))?;
    Ok(format!("max S product {product:.9}, overall {worst:.9}"))
}

/// 4. HOM dip depth equals |γ(0)|²; indistinguishable photons never coincide.
fn hom_dip() -> Check {
    let w = source_packet();
    let grid = Grid::new(-3000.0, 3000.0, 25.0).unwrap().values();
    let mut details = Vec::new();
    for (target, site) in [(0.966, ("DHA", "DVA")), (0.959, ("DHB", "DVB"))] {
        let started = Instant::now();
        let mut p = fixture("hom_setup.qopt");
        p.photons[1].wavepacket.center_wavelength_nm =
            detuned_wavelength_for_overlap(&w, f64::sqrt(target)).map_err(|e| e.to_string())?;
        let mut curve = hom_scan(&p, "PRISM1", &grid).map_err(|e| e.to_string())?;
        curve.monitored = (site.0.to_string(), site.1.to_string());
        let v = dip_visibility(&curve).map_err(|e| e.to_string())?;
        ensure((v - target).abs() <= 1e-3, || {
            format!("V = {v} for |γ|² = {target}")
        })?;
        ensure(started.elapsed() < Duration::from_secs(5), || {
            "scan slower than 5 s".into()
        })?;
        details.push(format!("{}-{} V = {:.4}%", site.0, site.1, 100.0 * v));
    }
    let t = run_exact(&fixture("hom_setup.qopt")).map_err(|e| e.to_string())?;
    let c = t.pair_probability("DHA", "DVA") + t.pair_probability("DHB", "DVB");
    ensure(c <= 1e-30, || format!("coincidence {c} at τ = 0"))?;
    details.push(format!("ideal τ=0 coincidence {c:e}"));
    Ok(details.join(", "))
}

/// 5. Fringes at the carrier period under a |γ(τ)| envelope, maximal at φ = π.
fn fringes() -> Check {
    let w = source_packet();
    let period = 702.2 / SPEED_OF_LIGHT_NM_PER_FS;
    let sigma = w.coherence_sigma_fs();
    let p = fixture("fringe_setup.qopt");

    // period from successive maxima of a fine scan
    let fine = fringe_scan(&p, "PRISM2", &Grid::new(-5.0, 5.0, 0.01).unwrap().values())
        .map_err(|e| e.to_string())?;
    let ys: Vec<(f64, f64)> = fine.series();
    let mut peaks = Vec::new();
    for i in 1..ys.len() - 1 {
        let (y0, y1, y2) = (ys[i - 1].1, ys[i].1, ys[i + 1].1);
        if y1 > y0 && y1 >= y2 {
            // vertex of the parabola through the three samples
            let h = ys[i].0 - ys[i - 1].0;
            peaks.push(ys[i].0 + 0.5 * h * (y0 - y2) / (y0 - 2.0 * y1 + y2));
        }
    }
    ensure(peaks.len() >= 4, || {
        format!("{} maxima in 10 fs", peaks.len())
    })?;
    let measured = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    ensure((measured / 2.3424 - 1.0).abs() <= 0.01, || {
        format!("period {measured} fs")
    })?;

    // pointwise against an independent closed form over the whole envelope
    let wide = Grid::new(-900.0, 900.0, 0.37).unwrap().values();
    let curve = fringe_scan(&p, "PRISM2", &wide).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (tau, y) in curve.series() {
        let envelope = (-tau * tau / (4.0 * sigma * sigma)).exp();
        let expect = 0.125 * (1.0 + envelope * (TAU * tau / period).cos());
        worst = worst.max((y - expect).abs() / 0.125);
    }
    ensure(worst <= 1e-6, || format!("envelope deviation {worst}"))?;

    // the central maximum sits at τ = 0 only when the set phase is π
    let at = |phi2: f64| -> Result<f64, String> {
        let q = p
            .with_parameter("PHI2", "phi_rad", phi2)
            .map_err(|e| e.to_string())?;
        let c = fringe_scan(&q, "PRISM2", &Grid::new(-1.2, 1.2, 0.01).unwrap().values())
            .map_err(|e| e.to_string())?;
        let best = c
            .series()
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        Ok(best.0)
    };
    let peak_pi = at(PI)?;
    let peak_0 = at(0.0)?;
    ensure(peak_pi.abs() < 0.011, || {
        format!("maximum at τ = {peak_pi} for φ = π")
    })?;
    ensure(peak_0.abs() > 0.5, || {
        format!("maximum at τ = {peak_0} for φ = 0")
    })?;
    Ok(format!(
        "period {measured:.5} fs ({} maxima), max envelope deviation {worst:.1e}, φ=π peak at τ={peak_pi:.3} fs",
        peaks.len()
    ))
}

/// 6. S = 2.54 ± 0.02 violates the local bound by about 27 standard deviations.
fn headline() -> Check {
    let w = source_packet();
    let g = indistinguishability_for_chsh(2.54).map_err(|e| e.to_string())?;
    let mut p = fixture("bell_setup.qopt");
    p.photons[1].wavepacket.delay_fs =
        delay_for_overlap(&w, g.sqrt()).map_err(|e| e.to_string())?;
    let exact = chsh(&p, &ChshAngles::default(), ChshMode::Exact).map_err(|e| e.to_string())?;
    ensure(
        (exact.s - chsh_for_indistinguishability(g)).abs() <= 1e-9,
        || {
            format!(
                "mapping {} vs simulation {}",
                chsh_for_indistinguishability(g),
                exact.s
            )
        },
    )?;
    ensure((exact.s - 2.54).abs() <= 0.005, || {
        format!("tuned S = {}", exact.s)
    })?;

    let rate = 12_000.0;
    let duration = exact.duration_for_uncertainty(rate, 0.02);
    let mut ss = Vec::new();
    let mut dss = Vec::new();
    let mut sigmas = Vec::new();
    for seed in 0..200 {
        let r = chsh(
            &p,
            &ChshAngles::default(),
            ChshMode::Sampled(Sampling {
                pair_rate: rate,
                duration_s: duration,
                seed,
            }),
        )
        .map_err(|e| e.to_string())?;
        ss.push(r.s);
        dss.push(r.ds.unwrap());
        sigmas.push(r.sigma.unwrap());
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
    };
    let mean_s = ss.iter().sum::<f64>() / ss.len() as f64;
    let med_ds = median(&mut dss);
    let med_sigma = median(&mut sigmas);
    ensure((med_ds - 0.02).abs() <= 0.002, || format!("ΔS = {med_ds}"))?;
    ensure((24.0..=30.0).contains(&med_sigma), || {
        format!("median sigma {med_sigma}")
    })?;
    ensure((2.52..=2.56).contains(&mean_s), || {
        format!("mean S {mean_s}")
    })?;
    Ok(format!(
        "exact S {:.4} (|γ|² {g:.5}), {duration:.3} s per setting, median ΔS {med_ds:.4}, mean S {mean_s:.4}, median sigma {med_sigma:.2}",
        exact.s
    ))
}

/// 7. ΔE propagation matches finite differences; sampled E scatters as ΔE says.
fn statistics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n: [f64; 4] = std::array::from_fn(|_| rng.random_range(1.0..20_000.0f64).round());
        let (_, de) = correlation_e(n).map_err(|e| e.to_string())?;
        let mut var = 0.0;
        for i in 0..4 {
            let h = 1e-3;
            let (mut up, mut down) = (n, n);
            up[i] += h;
            down[i] -= h;
            let d = (correlation_e(up).unwrap().0 - correlation_e(down).unwrap().0) / (2.0 * h);
            var += d * d * n[i];
        }
        worst = worst.max((var.sqrt() - de).abs() / de);
    }
    ensure(worst <= 1e-6, || format!("relative ΔE mismatch {worst}"))?;

    let p = fixture("bell_setup_degraded.qopt");
    let exact = chsh(&p, &ChshAngles::default(), ChshMode::Exact).map_err(|e| e.to_string())?;
    let e0 = exact.correlations[0].e;
    let mut inside = 0;
    for seed in 0..1000 {
        let r = chsh(
            &p,
            &ChshAngles::default(),
            ChshMode::Sampled(Sampling {
                pair_rate: 12_000.0,
                duration_s: 3.0,
                seed,
            }),
        )
        .map_err(|e| e.to_string())?;
        let c = r.correlations[0];
        if (c.e - e0).abs() <= 3.0 * c.de.unwrap() {
            inside += 1;
        }
    }
    ensure(inside >= 950, || format!("{inside}/1000 within 3ΔE"))?;
    Ok(format!(
        "max relative ΔE mismatch {worst:.1e}, {inside}/1000 within 3ΔE"
    ))
}

/// 8. Norm plus accumulated loss stays 1 after every element.
fn normalization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut elements = 0;
    for _ in 0..1000 {
        let text = random_circuit(&mut rng, true);
        let p = ElementProgram::from_text(&text).map_err(|e| format!("{e}\n{text}"))?;
        elements += p.elements.len();
        let s = p
            .run_with(|_, s| worst = worst.max((s.norm_sqr() + s.accumulated_loss() - 1.0).abs()))
            .map_err(|e| format!("{e}\n{text}"))?;
        let total: f64 = s
            .outcome_distribution(&p.detector_map)
            .map_err(|e| e.to_string())?
            .values()
            .sum();
        worst = worst.max((total - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("deviation {worst}"))?;
    Ok(format!(
        "1000 circuits, {elements} elements, max deviation {worst:.1e}"
    ))
}

fn mutate<R: Rng>(rng: &mut R, text: &str) -> String {
    const ALPHABET: &[u8] = b" =,#.-_0123456789eEHVabcdinoprstuvxyzPBSA\n\t";
    const WORDS: &[&str] = &[
        "photon",
        "bs",
        "pbs",
        "hwp",
        "phase",
        "delay",
        "pol",
        "detector",
        "discard",
        "coincidence",
        "mode=",
        "pol=",
        "in=",
        "out=",
        "NaN",
        "inf",
        "-1e999",
        "vac1",
        "1e-400",
        "\u{00e9}",
        "\u{1F600}",
    ];
    let mut s: Vec<char> = text.chars().collect();
    for _ in 0..rng.random_range(1..6) {
        let at = rng.random_range(0..=s.len());
        match rng.random_range(0..6) {
            0 if at < s.len() => {
                s.remove(at);
            }
            1 => s.insert(at, ALPHABET[rng.random_range(0..ALPHABET.len())] as char),
            2 if at < s.len() => s[at] = ALPHABET[rng.random_range(0..ALPHABET.len())] as char,
            3 => {
                let w = WORDS[rng.random_range(0..WORDS.len())];
                for (k, c) in w.chars().enumerate() {
                    s.insert(at + k, c);
                }
            }
            4 => {
                // duplicate or drop a line
                let text: String = s.iter().collect();
                let mut lines: Vec<&str> = text.lines().collect();
                if !lines.is_empty() {
                    let i = rng.random_range(0..lines.len());
                    if rng.random_bool(0.5) {
                        lines.insert(i, lines[i]);
                    } else {
                        lines.remove(i);
                    }
                }
                s = lines.join("\n").chars().collect();
            }
            _ => {
                let end = (at + rng.random_range(0..20)).min(s.len());
                s.drain(at..end);
            }
        }
    }
    s.into_iter().collect()
}

/// 9. Formatting round-trips; mutated inputs only ever produce diagnostics.
fn parser_robustness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let text = random_circuit(&mut rng, true);
        let c = parse_circuit(&text).map_err(|d| format!("{d:?}\n{text}"))?;
        let f = format_circuit(&c);
        let back = parse_circuit(&f).map_err(|d| format!("{d:?}\n{f}"))?;
        ensure(back == c && format_circuit(&back) == f, || {
            format!("round trip changed\n{text}")
        })?;
    }

    let seeds: Vec<String> = ["bell_setup.qopt", "hom_setup.qopt", "fringe_setup.qopt"]
        .iter()
        .map(|f| fixture_text(f))
        .chain((0..20).map(|_| random_circuit(&mut rng, true)))
        .collect();
    let (mut rejected, mut compiled) = (0, 0);
    for _ in 0..100_000 {
        let base = &seeds[rng.random_range(0..seeds.len())];
        let text = mutate(&mut rng, base);
        let outcome = catch_unwind(AssertUnwindSafe(|| match parse_circuit(&text) {
            Err(d) => {
                assert!(!d.is_empty() && d.iter().all(|x| x.line >= 1));
                false
            }
            Ok(c) => {
                let diags = validate(&c);
                if diags.iter().any(|d| d.is_error()) {
                    false
                } else {
                    // errors are fine, panics are not
                    let _ = ElementProgram::from_text(&text).and_then(|p| p.run());
                    true
                }
            }
        }));
        match outcome {
            Ok(true) => compiled += 1,
            Ok(false) => rejected += 1,
            Err(_) => return Err(format!("panic on input:\n{text}")),
        }
    }
    Ok(format!(
        "500 round trips; 100000 mutants: {rejected} rejected with diagnostics, {compiled} valid"
    ))
}

/// Straight to the stderr handle, which the test harness does not capture,
/// so the verdicts show up in every run.
fn report(line: String) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Check, u64); 9] = [
        ("post-selected state identity", postselected_state, 1),
        ("CHSH maximum", chsh_maximum, 1),
        ("local bound", local_bound, 10),
        ("HOM dip visibility", hom_dip, 10),
        ("fringe structure", fringes, 10),
        ("headline S = 2.54, ~27 sigma", headline, 60),
        ("statistical soundness", statistics, 30),
        ("normalization invariant", normalization, 30),
        ("parser robustness", parser_robustness, 60),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let result = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = started.elapsed();
        let result = result.and_then(|d| {
            if elapsed > Duration::from_secs(limit) {
                Err(format!("took {elapsed:.2?}, limit {limit} s ({d})"))
            } else {
                Ok(d)
            }
        });
        match &result {
            Ok(d) => report(format!("criterion {}: PASS  {name} [{elapsed:.2?}] {d}", i + 1)),
            Err(e) => {
                report(format!("criterion {}: FAIL  {name} [{elapsed:.2?}] {e}", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
