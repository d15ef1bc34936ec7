//! Ontological models over a finite state space Λ.
//!
//! A model assigns every preparation a distribution p(λ|Ψ) and every
//! measurement a response table p(k|λ). It reproduces quantum theory when
//! Σ_λ p(k|λ) p(λ|Ψ) equals the Born probability |⟨Φ_k|Ψ⟩|² for every
//! preparation, measurement and outcome.

mod kochen_specker;
mod model_file;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hilbert::{born_probabilities, MeasurementBasis, StateVector};
use crate::TOL_ALG;

pub use kochen_specker::{
    discretize_ks, ks_density, ks_overlap, ks_predicted, ks_response, sample_ks, Resolution, SpherePoint,
    SphereQuadrature,
};
pub use model_file::{load_model, parse_model, Bindings, ModelDocument};

/// Default threshold below which a probability counts as zero.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOntologicalModel {
    lambda_count: usize,
    preparations: BTreeMap<String, Vec<f64>>,
    /// responses[meas][λ][k] = p(k|λ).
    responses: BTreeMap<String, Vec<Vec<f64>>>,
}

impl FiniteOntologicalModel {
    /// Validates shapes and normalization of every table.
    pub fn new(
        lambda_count: usize,
        preparations: BTreeMap<String, Vec<f64>>,
        responses: BTreeMap<String, Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if lambda_count == 0 {
            return Err(invalid("lambda_count", "must be positive"));
        }
        for (label, p) in &preparations {
            let path = format!("preparations.{label}");
            if p.len() != lambda_count {
                return Err(invalid(&path, format!("has {} entries, expected {lambda_count}", p.len())));
            }
            if let Some(i) = p.iter().position(|x| !x.is_finite() || *x < -TOL_ALG) {
                return Err(invalid(&format!("{path}[{i}]"), format!("invalid probability {}", p[i])));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > TOL_ALG {
                return Err(invalid(&path, format!("sums to {sum}, expected 1")));
            }
        }
        for (label, table) in &responses {
            let path = format!("responses.{label}");
            if table.len() != lambda_count {
                return Err(invalid(&path, format!("has {} rows, expected {lambda_count}", table.len())));
            }
            let outcomes = table[0].len();
            for (l, row) in table.iter().enumerate() {
                let row_path = format!("{path}[{l}]");
                if row.len() != outcomes || outcomes == 0 {
                    return Err(invalid(&row_path, format!("has {} outcomes, expected {outcomes}", row.len())));
                }
                if let Some(k) = row.iter().position(|x| !x.is_finite() || *x < -TOL_ALG || *x > 1.0 + TOL_ALG) {
                    return Err(invalid(&format!("{row_path}[{k}]"), format!("invalid probability {}", row[k])));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > TOL_ALG {
                    return Err(invalid(&row_path, format!("outcome probabilities sum to {sum}, expected 1")));
                }
            }
        }
        Ok(Self { lambda_count, preparations, responses })
    }

    pub fn lambda_count(&self) -> usize {
        self.lambda_count
    }

    pub fn preparation(&self, label: &str) -> Result<&[f64]> {
        self.preparations
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn response(&self, label: &str) -> Result<&[Vec<f64>]> {
        self.responses
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn outcome_count(&self, meas: &str) -> Result<usize> {
        Ok(self.response(meas)?[0].len())
    }

    pub fn preparation_labels(&self) -> impl Iterator<Item = &str> {
        self.preparations.keys().map(String::as_str)
    }

    pub fn measurement_labels(&self) -> impl Iterator<Item = &str> {
        self.responses.keys().map(String::as_str)
    }

    pub fn preparations(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.preparations
    }

    pub fn responses(&self) -> &BTreeMap<String, Vec<Vec<f64>>> {
        &self.responses
    }

    /// Σ_λ p(k|λ) q(λ) for an arbitrary distribution q over Λ.
    pub fn predicted_for_distribution(&self, dist: &[f64], meas: &str, outcome: usize) -> Result<f64> {
        if dist.len() != self.lambda_count {
            return Err(Error::DimensionMismatch { expected: self.lambda_count, found: dist.len() });
        }
        let table = self.response(meas)?;
        let count = table[0].len();
        if outcome >= count {
            return Err(Error::OutcomeOutOfRange { outcome, count });
        }
        Ok(table.iter().zip(dist).map(|(row, p)| row[outcome] * p).sum())
    }
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::InvalidModel { path: path.to_string(), message: message.into() }
}

/// Binds model labels to the quantum objects they are meant to represent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantumAssignment {
    pub states: BTreeMap<String, StateVector>,
    pub bases: BTreeMap<String, MeasurementBasis>,
}

impl QuantumAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_state(mut self, label: impl Into<String>, state: StateVector) -> Self {
        self.states.insert(label.into(), state);
        self
    }

    pub fn with_basis(mut self, label: impl Into<String>, basis: MeasurementBasis) -> Self {
        self.bases.insert(label.into(), basis);
        self
    }

    pub fn born(&self, prep: &str, meas: &str) -> Result<Vec<f64>> {
        let psi = self.states.get(prep).ok_or_else(|| Error::UnknownLabel(prep.to_string()))?;
        let basis = self.bases.get(meas).ok_or_else(|| Error::UnknownLabel(meas.to_string()))?;
        born_probabilities(psi, basis)
    }
}

/// Σ_λ p(k|λ) p(λ|Ψ).
pub fn predicted_probability(model: &FiniteOntologicalModel, prep: &str, meas: &str, outcome: usize) -> Result<f64> {
    model.predicted_for_distribution(model.preparation(prep)?, meas, outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub preparation: String,
    pub measurement: String,
    pub outcome: usize,
    pub predicted: f64,
    pub born: f64,
}

impl Deviation {
    pub fn size(&self) -> f64 {
        (self.predicted - self.born).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionReport {
    pub tolerance: f64,
    pub max_deviation: f64,
    /// Largest deviation found, if any triple exceeds the tolerance.
    pub worst: Option<Deviation>,
    pub offending: Vec<Deviation>,
}

impl ReproductionReport {
    pub fn passes(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Compares the model's predictions to the Born rule for every
/// (preparation, measurement, outcome) triple named in the assignment.
pub fn reproduces_quantum(
    model: &FiniteOntologicalModel,
    qa: &QuantumAssignment,
    tol: f64,
) -> Result<ReproductionReport> {
    let mut max_deviation: f64 = 0.0;
    let mut offending = Vec::new();
    for prep in qa.states.keys() {
        let dist = model.preparation(prep)?;
        for (meas, basis) in &qa.bases {
            let born = qa.born(prep, meas)?;
            let count = model.outcome_count(meas)?;
            if count != basis.dim() {
                return Err(invalid(
                    &format!("responses.{meas}"),
                    format!("{count} outcomes but the bound basis has {}", basis.dim()),
                ));
            }
            for (k, &b) in born.iter().enumerate() {
                let predicted = model.predicted_for_distribution(dist, meas, k)?;
                let d = Deviation {
                    preparation: prep.clone(),
                    measurement: meas.clone(),
                    outcome: k,
                    predicted,
                    born: b,
                };
                max_deviation = max_deviation.max(d.size());
                if d.size() > tol {
                    offending.push(d);
                }
            }
        }
    }
    let worst = offending.iter().max_by(|a, b| a.size().total_cmp(&b.size())).cloned();
    Ok(ReproductionReport { tolerance: tol, max_deviation, worst, offending })
}

/// The model in which the ontic state is the quantum state itself: one λ per
/// distinct state (phase-equivalent states share a λ), point-mass
/// preparations, and Born-rule responses.
pub fn orthodox_model(qa: &QuantumAssignment) -> Result<FiniteOntologicalModel> {
    let mut ontic: Vec<StateVector> = Vec::new();
    let mut index_of = BTreeMap::new();
    for (label, psi) in &qa.states {
        let idx = match ontic.iter().position(|o| o.eq_up_to_phase(psi, TOL_ALG)) {
            Some(i) => i,
            None => {
                ontic.push(psi.clone());
                ontic.len() - 1
            }
        };
        index_of.insert(label.clone(), idx);
    }
    let n = ontic.len().max(1);
    let preparations = index_of
        .into_iter()
        .map(|(label, idx)| {
            let mut p = vec![0.0; n];
            p[idx] = 1.0;
            (label, p)
        })
        .collect();
    let mut responses = BTreeMap::new();
    for (label, basis) in &qa.bases {
        let table = ontic.iter().map(|psi| born_probabilities(psi, basis)).collect::<Result<Vec<_>>>()?;
        responses.insert(label.clone(), table);
    }
    FiniteOntologicalModel::new(n, preparations, responses)
}

/// {λ : p(λ|Ψ) > tol}.
pub fn support(model: &FiniteOntologicalModel, prep: &str, tol: f64) -> Result<BTreeSet<usize>> {
    Ok(model.preparation(prep)?.iter().enumerate().filter(|(_, &p)| p > tol).map(|(i, _)| i).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    /// Σ_λ min(p₁(λ), p₂(λ)).
    pub variational_overlap: f64,
    /// The same sum restricted to λ in both supports (at the tolerance).
    pub common_support_mass: f64,
}

pub fn overlap(model: &FiniteOntologicalModel, prep1: &str, prep2: &str, tol: f64) -> Result<Overlap> {
    let p1 = model.preparation(prep1)?;
    let p2 = model.preparation(prep2)?;
    Ok(distribution_overlap(p1, p2, tol))
}

pub(crate) fn distribution_overlap(p1: &[f64], p2: &[f64], tol: f64) -> Overlap {
    let mut variational_overlap = 0.0;
    let mut common_support_mass = 0.0;
    for (&a, &b) in p1.iter().zip(p2) {
        let m = a.min(b).max(0.0);
        variational_overlap += m;
        if a > tol && b > tol {
            common_support_mass += m;
        }
    }
    Overlap { variational_overlap, common_support_mass }
}
