#![allow(dead_code)]

use qopt_core::circuit::ElementProgram;

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> ElementProgram {
    ElementProgram::from_text(&fixture_text(name)).unwrap()
}

pub fn with_phases(p: &ElementProgram, phi: [f64; 4]) -> ElementProgram {
    let mut p = p.clone();
    for (i, v) in phi.iter().enumerate() {
        p.set_parameter(&format!("PHI{}", i + 1), "phi_rad", *v)
            .unwrap();
    }
    p
}

pub fn with_hwps(p: &ElementProgram, deg: f64) -> ElementProgram {
    p.with_parameter("HWP1", "angle_deg", deg)
        .unwrap()
        .with_parameter("HWP2", "angle_deg", deg)
        .unwrap()
}

use rand::seq::IndexedRandom;
use rand::Rng;

/// Random feed-forward circuit text. With `allow_delay` at most one delay
/// element is emitted and both photons are then made identical, so the
/// state never needs more than two distinct wavepackets.
pub fn random_circuit<R: Rng>(rng: &mut R, allow_delay: bool) -> String {
    let mut out = String::new();
    let with_delay = allow_delay && rng.random_bool(0.5);
    let pol = |rng: &mut R| if rng.random_bool(0.5) { "H" } else { "V" };
    let (lambda2, delay2) = if with_delay {
        (702.2, 0.0)
    } else {
        (
            702.2 - rng.random_range(0.0..0.5),
            rng.random_range(-400.0..400.0),
        )
    };
    out += &format!(
        "photon P1 mode=p1 pol={} wavelength_nm=702.2 bandwidth_nm=1.5 delay_fs=0\n",
        pol(rng)
    );
    out += &format!(
        "photon P2 mode=p2 pol={} wavelength_nm={lambda2} bandwidth_nm=1.5 delay_fs={delay2}\n",
        pol(rng)
    );
    let mut live = vec!["p1".to_string(), "p2".to_string()];
    let mut fresh = 0usize;
    let mut vac = 0usize;
    let mut delay_left = with_delay;
    let n = rng.random_range(0..12);
    for i in 0..n {
        let kind = rng.random_range(0..6);
        match kind {
            0 | 1 => {
                let a = live.swap_remove(rng.random_range(0..live.len()));
                let b = if live.is_empty() || rng.random_bool(0.3) {
                    vac += 1;
                    format!("vac{vac}")
                } else {
                    live.swap_remove(rng.random_range(0..live.len()))
                };
                let (x, y) = (format!("l{fresh}"), format!("l{}", fresh + 1));
                fresh += 2;
                let ins = if rng.random_bool(0.5) { [a, b] } else { [b, a] };
                let op = if kind == 0 { "bs" } else { "pbs" };
                out += &format!("{op} E{i} in={},{} out={x},{y}\n", ins[0], ins[1]);
                live.push(x);
                live.push(y);
            }
            2 => {
                let m = live.choose(rng).unwrap();
                out += &format!(
                    "phase E{i} mode={m} phi_rad={}\n",
                    rng.random_range(-7.0..7.0)
                );
            }
            3 => {
                let m = live.choose(rng).unwrap();
                out += &format!(
                    "hwp E{i} mode={m} angle_deg={}\n",
                    rng.random_range(-180.0..180.0)
                );
            }
            4 => {
                let m = live.choose(rng).unwrap();
                out += &format!(
                    "pol E{i} mode={m} angle_deg={} extinction={}\n",
                    rng.random_range(0.0..180.0),
                    rng.random_range(1.0..1e5)
                );
            }
            _ if delay_left => {
                delay_left = false;
                let m = live.choose(rng).unwrap();
                out += &format!(
                    "delay E{i} mode={m} tau_fs={}\n",
                    rng.random_range(-1000.0..1000.0)
                );
            }
            _ => {}
        }
    }
    let mut dets = Vec::new();
    for (k, m) in live.iter().enumerate() {
        match rng.random_range(0..4) {
            0 => out += &format!("discard {m}\n"),
            1 => {}
            _ => {
                for p in ["H", "V"] {
                    let name = format!("D{p}{k}");
                    out += &format!("detector {name} mode={m} pol={p}\n");
                    dets.push(name);
                }
            }
        }
    }
    if dets.len() >= 2 && rng.random_bool(0.7) {
        let pick: Vec<_> = dets.choose_multiple(rng, 2).collect();
        out += &format!("coincidence {},{}\n", pick[0], pick[1]);
    }
    out
}
