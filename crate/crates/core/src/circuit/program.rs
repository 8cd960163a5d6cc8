use super::validate::analyze;
use super::{parse_circuit, Circuit, DetectorDecl, NamedElement, PhotonDecl};
use crate::error::{Error, Result};
use crate::photon::{DetectorMap, Mode, PhotonInput, Polarization, TwoPhotonState};

/// Compiled, validated circuit: photon sources, elements in file order and
/// the terminal detector assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementProgram {
    pub photons: Vec<PhotonDecl>,
    pub elements: Vec<NamedElement>,
    pub detectors: Vec<DetectorDecl>,
    pub detector_map: DetectorMap,
    pub coincidences: Vec<(String, String)>,
}

/// Compiles a circuit that validates without errors. Terminal modes that are
/// neither detected nor discarded (reported as warnings) are discarded.
pub fn compile(circuit: &Circuit) -> Result<ElementProgram> {
    let analysis = analyze(circuit);
    if analysis.diagnostics.iter().any(|d| d.is_error()) {
        return Err(Error::InvalidCircuit(analysis.diagnostics));
    }
    let mut map = DetectorMap::new();
    for label in &analysis.terminal {
        map.discard_label(label);
    }
    for d in &circuit.detectors {
        map.detect(Mode::new(d.mode.clone(), d.pol), d.name.clone());
    }
    Ok(ElementProgram {
        photons: circuit.photons.clone(),
        elements: circuit.elements.clone(),
        detectors: circuit.detectors.clone(),
        detector_map: map,
        coincidences: circuit.coincidences.clone(),
    })
}

impl ElementProgram {
    /// Parses and compiles `.qopt` text.
    pub fn from_text(text: &str) -> Result<Self> {
        let circuit = parse_circuit(text).map_err(Error::InvalidCircuit)?;
        compile(&circuit)
    }

    pub fn photon_inputs(&self) -> Vec<PhotonInput> {
        self.photons
            .iter()
            .map(|p| PhotonInput::new(p.mode.clone(), p.pol, p.wavepacket))
            .collect()
    }

    pub fn element(&self, name: &str) -> Option<&NamedElement> {
        self.elements.iter().find(|e| e.name == name)
    }

    pub fn detector(&self, name: &str) -> Option<&DetectorDecl> {
        self.detectors.iter().find(|d| d.name == name)
    }

    /// Detector watching `spatial` in polarization `pol`.
    pub fn detector_on(&self, spatial: &str, pol: Polarization) -> Option<&DetectorDecl> {
        self.detectors
            .iter()
            .find(|d| d.mode == spatial && d.pol == pol)
    }

    pub fn set_parameter(&mut self, name: &str, field: &str, value: f64) -> Result<()> {
        let element = self
            .elements
            .iter_mut()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))?;
        let slot = element
            .element
            .parameter_mut(field)
            .ok_or_else(|| Error::UnknownParameter {
                name: name.to_string(),
                field: field.to_string(),
            })?;
        *slot = value;
        Ok(())
    }

    pub fn with_parameter(&self, name: &str, field: &str, value: f64) -> Result<Self> {
        let mut p = self.clone();
        p.set_parameter(name, field, value)?;
        Ok(p)
    }

    /// Runs the photons through every element.
    pub fn run(&self) -> Result<TwoPhotonState> {
        self.run_with(|_, _| {})
    }

    /// Like [`run`](Self::run), calling `inspect(i, state)` after element `i`.
    pub fn run_with<F>(&self, mut inspect: F) -> Result<TwoPhotonState>
    where
        F: FnMut(usize, &TwoPhotonState),
    {
        let mut state = TwoPhotonState::initial(&self.photon_inputs())?;
        for (i, e) in self.elements.iter().enumerate() {
            state = state.apply(&e.element)?;
            inspect(i, &state);
        }
        Ok(state)
    }
}
