//! JSON documents describing finite ontological models:
//!
//! ```json
//! {
//!   "lambda_count": 3,
//!   "preparations": { "psi1": [0.2, 0.8, 0.0], "psi2": [0.2, 0.0, 0.8] },
//!   "responses": { "Z": [[1, 0], [1, 0], [0, 1]] },
//!   "bindings": { "psi1": "|0>", "psi2": "|+>", "Z": "|0>" }
//! }
//! ```
//!
//! Response rows are indexed by λ, then by outcome. A binding names the
//! quantum object a label stands for: preparations bind to states
//! (`|0>`, `|1>`, `|+>`, `|->`, `|+i>`, `|-i>`, `hardy:M:j`), measurements bind
//! to `Z`, `X`, `Y` or to a state name, meaning the qubit basis whose first
//! outcome is that state.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FiniteOntologicalModel, QuantumAssignment};
use crate::error::{Error, Result};
use crate::hilbert::{qubit, MeasurementBasis, Pauli, StateVector};
use crate::nonclassicality::hardy_state;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub lambda_count: usize,
    pub preparations: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub responses: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, String>,
}

impl ModelDocument {
    pub fn from_model(model: &FiniteOntologicalModel, bindings: &Bindings) -> Self {
        Self {
            lambda_count: model.lambda_count(),
            preparations: model.preparations().clone(),
            responses: model.responses().clone(),
            bindings: bindings.0.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }
}

/// Label → quantum-object name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(pub BTreeMap<String, String>);

impl Bindings {
    pub fn get(&self, label: &str) -> Option<&str> {
        self.0.get(label).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Resolves every binding against the model's preparation and
    /// measurement labels.
    pub fn assignment(&self, model: &FiniteOntologicalModel) -> Result<QuantumAssignment> {
        let mut qa = QuantumAssignment::new();
        for (label, name) in &self.0 {
            let path = format!("bindings.{label}");
            if model.preparations().contains_key(label) {
                let state = resolve_state(name).ok_or_else(|| unknown_object(&path, name))?;
                qa.states.insert(label.clone(), state);
            } else if model.responses().contains_key(label) {
                let basis = resolve_basis(name).ok_or_else(|| unknown_object(&path, name))?;
                qa.bases.insert(label.clone(), basis);
            } else {
                return Err(Error::InvalidModel {
                    path,
                    message: "label is neither a preparation nor a measurement".into(),
                });
            }
        }
        Ok(qa)
    }
}

fn unknown_object(path: &str, name: &str) -> Error {
    Error::InvalidModel { path: path.to_string(), message: format!("unknown quantum object `{name}`") }
}

pub fn resolve_state(name: &str) -> Option<StateVector> {
    if let Some(s) = qubit::named(name) {
        return Some(s);
    }
    let rest = name.trim().strip_prefix("hardy:")?;
    let (m, j) = rest.split_once(':')?;
    hardy_state(m.parse().ok()?, j.parse().ok()?).ok()
}

pub fn resolve_basis(name: &str) -> Option<MeasurementBasis> {
    match name.trim() {
        "Z" => Some(MeasurementBasis::pauli_eigenbasis(Pauli::Z)),
        "X" => Some(MeasurementBasis::pauli_eigenbasis(Pauli::X)),
        "Y" => Some(MeasurementBasis::pauli_eigenbasis(Pauli::Y)),
        other => MeasurementBasis::qubit_with_first(&resolve_state(other)?).ok(),
    }
}

/// Parses and validates a model document. Syntax errors carry the JSON path
/// of the offending value; normalization errors carry the table row.
pub fn parse_model(text: &str) -> Result<(FiniteOntologicalModel, Bindings)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ModelDocument = serde_path_to_error::deserialize(de).map_err(|e| Error::InvalidModel {
        path: match e.path().to_string() {
            p if p == "." => "$".to_string(),
            p => p,
        },
        message: e.inner().to_string(),
    })?;
    let model = FiniteOntologicalModel::new(doc.lambda_count, doc.preparations, doc.responses)?;
    let bindings = Bindings(doc.bindings);
    bindings.assignment(&model)?;
    Ok((model, bindings))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(FiniteOntologicalModel, Bindings)> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_model(&text)
}
