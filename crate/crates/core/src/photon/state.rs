use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::wavepacket::{distinguishability, wavepacket_overlap, Wavepacket};
use super::{Element, InternalLabel, Mode, Monomial, Op, Polarization};
use crate::error::{Error, Result};

/// Amplitudes below this magnitude are pruned after every element.
pub const AMPLITUDE_CUTOFF: f64 = 1e-15;

/// Residues of exact cancellations when re-expressing labels through
/// physical wavepackets; relative to the largest amplitude.
const CANCELLATION_CUTOFF: f64 = 1e-13;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// One input photon: where it enters, its polarization and its wavepacket.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonInput {
    pub spatial: String,
    pub pol: Polarization,
    pub wavepacket: Wavepacket,
}

impl PhotonInput {
    pub fn new(spatial: impl Into<String>, pol: Polarization, wavepacket: Wavepacket) -> Self {
        Self {
            spatial: spatial.into(),
            pol,
            wavepacket,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Partner {
    wavepacket: Wavepacket,
    /// ⟨reference|partner⟩
    overlap: Complex64,
    /// √(1 - |overlap|²)
    complement: f64,
}

/// The pair of physical wavepackets the orthonormal labels were built from.
///
/// `ξ_ref` is the reference packet itself; the partner packet decomposes as
/// `γ·ξ_ref + √(1-|γ|²)·ξ_perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelBasis {
    reference: Wavepacket,
    partner: Option<Partner>,
}

impl LabelBasis {
    fn new(reference: Wavepacket, partner: Option<Wavepacket>) -> Result<Self> {
        let partner = match partner {
            Some(p) if !p.same_mode(&reference) => Some(Partner {
                overlap: wavepacket_overlap(&reference, &p)?,
                complement: distinguishability(&reference, &p)?.max(0.0).sqrt(),
                wavepacket: p,
            }),
            _ => None,
        };
        Ok(Self { reference, partner })
    }

    pub fn reference(&self) -> &Wavepacket {
        &self.reference
    }

    pub fn partner(&self) -> Option<&Wavepacket> {
        self.partner.as_ref().map(|p| &p.wavepacket)
    }

    /// γ between the two basis packets (1 when there is no partner).
    pub fn overlap(&self) -> Complex64 {
        self.partner.as_ref().map_or(ONE, |p| p.overlap)
    }

    fn wavepackets(&self) -> Vec<Wavepacket> {
        let mut v = vec![self.reference];
        if let Some(p) = &self.partner {
            v.push(p.wavepacket);
        }
        v
    }

    /// Components of physical packet `index` (0 = reference, 1 = partner).
    fn decompose(&self, index: usize) -> Vec<(InternalLabel, Complex64)> {
        match (index, &self.partner) {
            (0, _) | (_, None) => vec![(InternalLabel::Ref, ONE)],
            (_, Some(p)) => vec![
                (InternalLabel::Ref, p.overlap),
                (InternalLabel::Perp, Complex64::new(p.complement, 0.0)),
            ],
        }
    }

    /// Inverse of [`decompose`]: a label as a combination of physical packets.
    fn expand(&self, label: InternalLabel) -> Vec<(usize, Complex64)> {
        match (label, &self.partner) {
            (InternalLabel::Ref, _) => vec![(0, ONE)],
            (InternalLabel::Perp, Some(p)) if p.complement > 0.0 => {
                let inv = 1.0 / p.complement;
                vec![(1, Complex64::new(inv, 0.0)), (0, -p.overlap * inv)]
            }
            (InternalLabel::Perp, _) => vec![],
        }
    }
}

fn canonical<T: Ord>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn prune<K: Ord>(terms: &mut BTreeMap<K, Complex64>, cutoff: f64) {
    terms.retain(|_, c| c.norm() >= cutoff);
}

/// Two photons in a linear-optical network, plus the probability already
/// absorbed by lossy elements.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    pub(super) terms: BTreeMap<(Op, Op), Complex64>,
    pub(super) accumulated_loss: f64,
    pub(super) basis: LabelBasis,
}

impl TwoPhotonState {
    /// Product state of two photons on distinct spatial labels.
    ///
    /// Photon 1 defines `ξ_ref`; photon 2 is Gram–Schmidt decomposed against
    /// it, giving one monomial when the packets are identical or orthogonal
    /// and two otherwise.
    pub fn initial(photons: &[PhotonInput]) -> Result<Self> {
        let [p1, p2] = photons else {
            return Err(Error::PhotonCount(photons.len()));
        };
        if p1.spatial == p2.spatial {
            return Err(Error::DuplicateLabel(p1.spatial.clone()));
        }
        p1.wavepacket.check()?;
        p2.wavepacket.check()?;
        let basis = LabelBasis::new(p1.wavepacket, Some(p2.wavepacket))?;
        let first = Op::new(p1.spatial.clone(), p1.pol, InternalLabel::Ref);
        let mut terms = BTreeMap::new();
        for (label, c) in basis.decompose(1) {
            let second = Op::new(p2.spatial.clone(), p2.pol, label);
            terms.insert(canonical(first.clone(), second), c);
        }
        prune(&mut terms, AMPLITUDE_CUTOFF);
        Ok(Self {
            terms,
            accumulated_loss: 0.0,
            basis,
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|((a, b), c)| Monomial {
            first: a.clone(),
            second: b.clone(),
            amplitude: *c,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Amplitude of `a†_a a†_b` in either order.
    pub fn amplitude(&self, a: &Op, b: &Op) -> Complex64 {
        let key = canonical(a.clone(), b.clone());
        self.terms.get(&key).copied().unwrap_or_default()
    }

    pub fn accumulated_loss(&self) -> f64 {
        self.accumulated_loss
    }

    pub fn basis(&self) -> &LabelBasis {
        &self.basis
    }

    /// Σ|c|² over distinct operator pairs plus 2|c|² over doubly occupied ones.
    pub fn norm_sqr(&self) -> f64 {
        self.terms
            .iter()
            .map(|((a, b), c)| {
                if a == b {
                    2.0 * c.norm_sqr()
                } else {
                    c.norm_sqr()
                }
            })
            .sum()
    }

    /// Spatial labels that carry amplitude.
    pub fn occupied_labels(&self) -> BTreeSet<&str> {
        self.terms
            .keys()
            .flat_map(|(a, b)| [a.mode.spatial.as_str(), b.mode.spatial.as_str()])
            .collect()
    }

    fn occupies(&self, spatial: &str) -> bool {
        self.terms
            .keys()
            .any(|(a, b)| a.mode.spatial == spatial || b.mode.spatial == spatial)
    }

    pub fn apply(&self, element: &Element) -> Result<Self> {
        element.check_ports()?;
        match element {
            Element::BeamSplitter { inputs, outputs } => {
                self.apply_beamsplitter([&inputs[0], &inputs[1]], [&outputs[0], &outputs[1]])
            }
            Element::PolarizingBeamSplitter { inputs, outputs } => {
                self.apply_pbs([&inputs[0], &inputs[1]], [&outputs[0], &outputs[1]])
            }
            Element::Phase { mode, phi_rad } => Ok(self.apply_phase(mode, *phi_rad)),
            Element::HalfWavePlate { mode, angle_deg } => Ok(self.apply_hwp(mode, *angle_deg)),
            Element::Delay { mode, tau_fs } => self.apply_delay(mode, *tau_fs),
            Element::Polarizer {
                mode,
                angle_deg,
                extinction,
            } => self.apply_polarizer(mode, *angle_deg, *extinction),
        }
    }

    /// Substitutes every operator by a linear combination of operators and
    /// re-canonicalizes. `None` leaves the operator untouched.
    fn map_operators<F>(&self, f: F) -> Self
    where
        F: Fn(&Op) -> Option<Vec<(Op, Complex64)>>,
    {
        let mut out: BTreeMap<(Op, Op), Complex64> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            let ia = f(a).unwrap_or_else(|| vec![(a.clone(), ONE)]);
            let ib = f(b).unwrap_or_else(|| vec![(b.clone(), ONE)]);
            for (x, cx) in &ia {
                for (y, cy) in &ib {
                    *out.entry(canonical(x.clone(), y.clone())).or_default() += c * cx * cy;
                }
            }
        }
        prune(&mut out, AMPLITUDE_CUTOFF);
        Self {
            terms: out,
            accumulated_loss: self.accumulated_loss,
            basis: self.basis.clone(),
        }
    }

    fn check_outputs(&self, inputs: [&str; 2], outputs: [&str; 2]) -> Result<()> {
        let ports = [inputs[0], inputs[1], outputs[0], outputs[1]];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if ports[i] == ports[j] {
                    return Err(Error::InvalidElement(format!(
                        "ports must be four distinct labels, `{}` repeats",
                        ports[i]
                    )));
                }
            }
        }
        for out in outputs {
            if self.occupies(out) {
                return Err(Error::PortCollision(out.to_string()));
            }
        }
        Ok(())
    }

    /// 50:50 beamsplitter: `in1 → (i·out1 + out2)/√2`, `in2 → (out1 + i·out2)/√2`.
    pub fn apply_beamsplitter(&self, inputs: [&str; 2], outputs: [&str; 2]) -> Result<Self> {
        self.check_outputs(inputs, outputs)?;
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Ok(self.map_operators(|op| {
            let (c1, c2) = if op.mode.spatial == inputs[0] {
                (I * r, r)
            } else if op.mode.spatial == inputs[1] {
                (r, I * r)
            } else {
                return None;
            };
            Some(vec![
                (Op::new(outputs[0], op.mode.pol, op.label), c1),
                (Op::new(outputs[1], op.mode.pol, op.label), c2),
            ])
        }))
    }

    /// Polarizing beamsplitter: H is transmitted (`in1→out1`, `in2→out2`),
    /// V is reflected with a factor `i` (`in1→out2`, `in2→out1`).
    pub fn apply_pbs(&self, inputs: [&str; 2], outputs: [&str; 2]) -> Result<Self> {
        self.check_outputs(inputs, outputs)?;
        Ok(self.map_operators(|op| {
            let port = if op.mode.spatial == inputs[0] {
                0
            } else if op.mode.spatial == inputs[1] {
                1
            } else {
                return None;
            };
            let (target, c) = match op.mode.pol {
                Polarization::H => (outputs[port], ONE),
                Polarization::V => (outputs[1 - port], I),
            };
            Some(vec![(Op::new(target, op.mode.pol, op.label), c)])
        }))
    }

    pub fn apply_phase(&self, spatial: &str, phi_rad: f64) -> Self {
        let factor = Complex64::from_polar(1.0, phi_rad);
        self.map_operators(|op| (op.mode.spatial == spatial).then(|| vec![(op.clone(), factor)]))
    }

    /// Half-wave plate with its fast axis at `angle_deg` from H:
    /// `H → cos2θ·H + sin2θ·V`, `V → sin2θ·H − cos2θ·V`.
    pub fn apply_hwp(&self, spatial: &str, angle_deg: f64) -> Self {
        let two_theta = 2.0 * angle_deg.to_radians();
        let (s, c) = two_theta.sin_cos();
        self.apply_jones(spatial, [[c, s], [s, -c]])
    }

    /// Real Jones matrix given by columns: `jones[p]` is the image of `p`.
    fn apply_jones(&self, spatial: &str, jones: [[f64; 2]; 2]) -> Self {
        self.map_operators(|op| {
            if op.mode.spatial != spatial {
                return None;
            }
            let col = jones[op.mode.pol.index()];
            Some(
                Polarization::BOTH
                    .iter()
                    .map(|&p| {
                        (
                            Op::new(spatial, p, op.label),
                            Complex64::new(col[p.index()], 0.0),
                        )
                    })
                    .collect(),
            )
        })
    }

    /// Linear polarizer passing `angle_deg`; the blocked axis is attenuated in
    /// amplitude by `1/√extinction` and the removed probability is added to
    /// the accumulated loss.
    pub fn apply_polarizer(&self, spatial: &str, angle_deg: f64, extinction: f64) -> Result<Self> {
        if !(extinction >= 1.0) {
            return Err(Error::InvalidElement(format!(
                "polarizer extinction must be >= 1, got {extinction}"
            )));
        }
        let t = 1.0 / extinction.sqrt();
        let (s, c) = angle_deg.to_radians().sin_cos();
        let off = c * s * (1.0 - t);
        let jones = [[c * c + t * s * s, off], [off, s * s + t * c * c]];
        let before = self.norm_sqr();
        let mut next = self.apply_jones(spatial, jones);
        let after = next.norm_sqr();
        next.accumulated_loss += (before - after).max(0.0);
        Ok(next)
    }

    /// Delays every photon component on `spatial` by `tau_fs`.
    ///
    /// The state is re-expressed in physical wavepackets, the delayed ones are
    /// shifted, and a new orthonormal label pair is built. Fails when more than
    /// two distinct wavepackets would remain in the state.
    pub fn apply_delay(&self, spatial: &str, tau_fs: f64) -> Result<Self> {
        if !tau_fs.is_finite() {
            return Err(Error::InvalidElement(format!(
                "delay must be finite, got {tau_fs}"
            )));
        }
        if tau_fs == 0.0 || !self.occupies(spatial) {
            return Ok(self.clone());
        }

        let mut waves = self.basis.wavepackets();
        let original = waves.len();
        let mut shifted = Vec::with_capacity(original);
        for i in 0..original {
            let moved = waves[i].delayed(tau_fs);
            let idx = match waves.iter().position(|w| w.same_mode(&moved)) {
                Some(idx) => idx,
                None => {
                    waves.push(moved);
                    waves.len() - 1
                }
            };
            shifted.push(idx);
        }

        type PhysOp = (Mode, usize);
        let mut physical: BTreeMap<(PhysOp, PhysOp), Complex64> = BTreeMap::new();
        let relabel = |op: &Op, idx: usize| -> PhysOp {
            let idx = if op.mode.spatial == spatial {
                shifted[idx]
            } else {
                idx
            };
            (op.mode.clone(), idx)
        };
        for ((a, b), c) in &self.terms {
            for (ia, ca) in self.basis.expand(a.label) {
                for (ib, cb) in self.basis.expand(b.label) {
                    let key = canonical(relabel(a, ia), relabel(b, ib));
                    *physical.entry(key).or_default() += c * ca * cb;
                }
            }
        }
        let largest = physical.values().map(|c| c.norm()).fold(0.0, f64::max);
        prune(
            &mut physical,
            (CANCELLATION_CUTOFF * largest).max(AMPLITUDE_CUTOFF),
        );

        let used: BTreeSet<usize> = physical.keys().flat_map(|(a, b)| [a.1, b.1]).collect();
        if used.len() > 2 {
            return Err(Error::Unsupported(format!(
                "delay on `{spatial}` leaves {} distinguishable wavepackets in the state; at most two are supported",
                used.len()
            )));
        }
        let reference = if used.contains(&0) {
            0
        } else {
            used.first().copied().unwrap_or(0)
        };
        let partner = used.iter().copied().find(|&i| i != reference);
        let basis = LabelBasis::new(waves[reference], partner.map(|i| waves[i]))?;

        let components = |idx: usize| {
            if idx == reference {
                basis.decompose(0)
            } else {
                basis.decompose(1)
            }
        };
        let mut terms: BTreeMap<(Op, Op), Complex64> = BTreeMap::new();
        for (((ma, ia), (mb, ib)), c) in physical {
            for (la, ca) in components(ia) {
                for (lb, cb) in components(ib) {
                    let a = Op {
                        mode: ma.clone(),
                        label: la,
                    };
                    let b = Op {
                        mode: mb.clone(),
                        label: lb,
                    };
                    *terms.entry(canonical(a, b)).or_default() += c * ca * cb;
                }
            }
        }
        prune(&mut terms, AMPLITUDE_CUTOFF);
        Ok(Self {
            terms,
            accumulated_loss: self.accumulated_loss,
            basis,
        })
    }
}
