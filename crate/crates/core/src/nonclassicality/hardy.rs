//! Hardy's counting argument. Take M qubit states on a great circle,
//! |Ψ_j⟩ = cos(jπ/2M)|0⟩ + sin(jπ/2M)|1⟩. A model that reproduces quantum
//! theory must answer "Ψ_j" with certainty on the whole support of Ψ_j.
//! Since |⟨Ψ_k|Ψ_j⟩|² < 1 for j ≠ k, no two of the M supports can coincide.
//! M distinct nonempty subsets of Λ need 2^N ≥ M, so the number of ontic
//! states grows without bound as M does.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{qubit, MeasurementBasis, StateVector};
use crate::ontology::{reproduces_quantum, support, Deviation, FiniteOntologicalModel, QuantumAssignment};

pub fn hardy_state(m: usize, j: usize) -> Result<StateVector> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("Hardy family needs M ≥ 2, got {m}")));
    }
    if j >= m {
        return Err(Error::OutcomeOutOfRange { outcome: j, count: m });
    }
    Ok(qubit::real(j as f64 * PI / (2.0 * m as f64)))
}

pub fn hardy_states(m: usize) -> Result<Vec<StateVector>> {
    (0..m).map(|j| hardy_state(m, j)).collect()
}

/// Preparation label `psi{j}` bound to |Ψ_j⟩ and measurement label `meas{j}`
/// bound to {|Ψ_j⟩, |Ψ_j^⊥⟩}, for j < M.
pub fn hardy_assignment(m: usize) -> Result<QuantumAssignment> {
    let mut qa = QuantumAssignment::new();
    for (j, psi) in hardy_states(m)?.into_iter().enumerate() {
        qa = qa.with_basis(format!("meas{j}"), MeasurementBasis::qubit_with_first(&psi)?);
        qa = qa.with_state(format!("psi{j}"), psi);
    }
    Ok(qa)
}

/// A model on `n` ontic states for the M-state Hardy family. Preparation
/// `psi{j}` is uniform on the j-th nonempty subset of Λ (cycling once the
/// 2^n − 1 subsets run out) and `meas{j}` answers "Ψ_j" exactly on that
/// subset. With 2^n < M two states are forced onto the same subset.
pub fn cycled_subset_model(m: usize, n: usize) -> Result<FiniteOntologicalModel> {
    if n == 0 || n >= 16 {
        return Err(Error::InvalidParameter(format!("ontic state count {n} outside 1..16")));
    }
    let subsets: Vec<Vec<usize>> =
        (1u32..(1 << n)).map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()).collect();
    let mut preps = BTreeMap::new();
    let mut responses = BTreeMap::new();
    for j in 0..m {
        let s = &subsets[j % subsets.len()];
        let mut p = vec![0.0; n];
        s.iter().for_each(|&i| p[i] = 1.0 / s.len() as f64);
        preps.insert(format!("psi{j}"), p);
        let table = (0..n).map(|l| if s.contains(&l) { vec![1.0, 0.0] } else { vec![0.0, 1.0] }).collect();
        responses.insert(format!("meas{j}"), table);
    }
    FiniteOntologicalModel::new(n, preps, responses)
}

#[derive(Debug, Clone, PartialEq)]
pub enum HardyWitness {
    /// The response certifying Ψ_j is below 1 somewhere on Ψ_j's support.
    CertaintyViolation { state: usize, lambda: usize, response: f64 },
    /// Two distinct Hardy states share a support.
    IdenticalSupports { first: usize, second: usize, support: BTreeSet<usize> },
    /// A predicted probability differs from the Born rule.
    StatisticsDeviation(Deviation),
    /// Fewer than M subsets are available: 2^N < M.
    CountingBound { lambda_count: usize, states: usize },
}

impl fmt::Display for HardyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HardyWitness::CertaintyViolation { state, lambda, response } => {
                write!(f, "Ψ_{state} is certified with probability {response} at λ = {lambda} in its support")
            }
            HardyWitness::IdenticalSupports { first, second, support } => {
                write!(f, "Ψ_{first} and Ψ_{second} share the support {support:?}")
            }
            HardyWitness::StatisticsDeviation(d) => write!(
                f,
                "{} on {} outcome {}: predicted {}, Born {}",
                d.preparation, d.measurement, d.outcome, d.predicted, d.born
            ),
            HardyWitness::CountingBound { lambda_count, states } => {
                write!(f, "2^{lambda_count} < {states}: too few subsets of Λ")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyVerdict {
    pub states: usize,
    pub lambda_count: usize,
    pub reproduces: bool,
    pub certainty_holds: bool,
    pub distinct_support_count: usize,
    /// ⌈log₂ M⌉.
    pub required_bound: u32,
    /// The most informative failure: certainty, then support collisions,
    /// then statistics, then the bare counting bound.
    pub witness: Option<HardyWitness>,
    pub witnesses: Vec<HardyWitness>,
}

impl HardyVerdict {
    pub fn accepted(&self) -> bool {
        self.witness.is_none()
    }
}

struct HardyLabels {
    prep: Vec<String>,
    /// (measurement label, outcome index certifying Ψ_j)
    cert: Vec<(String, usize)>,
}

fn locate_labels(qa: &QuantumAssignment, m: usize) -> Result<HardyLabels> {
    let mut prep = Vec::with_capacity(m);
    let mut cert = Vec::with_capacity(m);
    for (j, psi) in hardy_states(m)?.iter().enumerate() {
        let p = qa
            .states
            .iter()
            .find(|(_, s)| s.eq_up_to_phase(psi, 1e-9))
            .map(|(l, _)| l.clone())
            .ok_or_else(|| Error::UnknownLabel(format!("preparation for hardy:{m}:{j}")))?;
        let c = qa
            .bases
            .iter()
            .find_map(|(l, b)| b.vectors().iter().position(|v| v.eq_up_to_phase(psi, 1e-9)).map(|k| (l.clone(), k)))
            .ok_or_else(|| Error::UnknownLabel(format!("measurement containing hardy:{m}:{j}")))?;
        prep.push(p);
        cert.push(c);
    }
    Ok(HardyLabels { prep, cert })
}

/// Runs the four checks: Born-rule reproduction, certainty on supports,
/// pairwise-distinct supports, and 2^N ≥ M.
pub fn hardy_check(model: &FiniteOntologicalModel, qa: &QuantumAssignment, m: usize, tol: f64) -> Result<HardyVerdict> {
    let labels = locate_labels(qa, m)?;
    let n = model.lambda_count();
    let mut witnesses = Vec::new();

    let repro = reproduces_quantum(model, qa, tol)?;
    let reproduces = repro.passes();

    let supports: Vec<BTreeSet<usize>> =
        labels.prep.iter().map(|p| support(model, p, tol)).collect::<Result<_>>()?;

    let mut certainty_holds = true;
    for (j, supp) in supports.iter().enumerate() {
        let (meas, k) = &labels.cert[j];
        let table = model.response(meas)?;
        if table[0].len() <= *k {
            return Err(Error::OutcomeOutOfRange { outcome: *k, count: table[0].len() });
        }
        if let Some(&lambda) = supp.iter().find(|&&l| table[l][*k] < 1.0 - tol) {
            certainty_holds = false;
            witnesses.push(HardyWitness::CertaintyViolation { state: j, lambda, response: table[lambda][*k] });
        }
    }

    let distinct: BTreeSet<&BTreeSet<usize>> = supports.iter().collect();
    let distinct_support_count = distinct.len();
    'pairs: for j in 0..m {
        for k in (j + 1)..m {
            if supports[j] == supports[k] {
                witnesses.push(HardyWitness::IdenticalSupports { first: j, second: k, support: supports[j].clone() });
                break 'pairs;
            }
        }
    }

    if let Some(worst) = repro.worst {
        witnesses.push(HardyWitness::StatisticsDeviation(worst));
    }

    let enough_subsets = n >= usize::BITS as usize || (1usize << n) >= m;
    if !enough_subsets {
        witnesses.push(HardyWitness::CountingBound { lambda_count: n, states: m });
    }

    Ok(HardyVerdict {
        states: m,
        lambda_count: n,
        reproduces,
        certainty_holds,
        distinct_support_count,
        required_bound: m.next_power_of_two().trailing_zeros(),
        witness: witnesses.first().cloned(),
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::orthodox_model;

    #[test]
    fn state_family() {
        let s = hardy_states(2).unwrap();
        assert!((s[1].overlap_sq(&s[0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(hardy_state(5, 0).unwrap().approx_eq(&qubit::zero(), 0.0));
        let m = 7;
        let s = hardy_states(m).unwrap();
        let expected = (PI / (2.0 * m as f64)).cos().powi(2);
        for w in s.windows(2) {
            assert!((w[0].overlap_sq(&w[1]).unwrap() - expected).abs() < 1e-12);
        }
        for (j, a) in s.iter().enumerate() {
            for b in &s[j + 1..] {
                assert!(a.overlap_sq(b).unwrap() < 1.0);
            }
        }
        assert!(hardy_states(1).is_err());
    }

    #[test]
    fn orthodox_model_is_accepted() {
        let qa = hardy_assignment(8).unwrap();
        let v = hardy_check(&orthodox_model(&qa).unwrap(), &qa, 8, 1e-9).unwrap();
        assert!(v.accepted(), "{v:?}");
        assert_eq!(v.distinct_support_count, 8);
        assert_eq!(v.lambda_count, 8);
        assert_eq!(v.required_bound, 3);
    }

    #[test]
    fn certainty_violation_names_state_and_lambda() {
        let qa = hardy_assignment(4).unwrap();
        let m = orthodox_model(&qa).unwrap();
        let mut responses = m.responses().clone();
        let lambda = support(&m, "psi2", 1e-12).unwrap().into_iter().next().unwrap();
        responses.get_mut("meas2").unwrap()[lambda] = vec![0.9, 0.1];
        let broken = FiniteOntologicalModel::new(m.lambda_count(), m.preparations().clone(), responses).unwrap();
        let v = hardy_check(&broken, &qa, 4, 1e-9).unwrap();
        assert!(!v.certainty_holds);
        assert_eq!(v.witness, Some(HardyWitness::CertaintyViolation { state: 2, lambda, response: 0.9 }));
    }

    #[test]
    fn three_points_cannot_host_sixteen_states() {
        let m = 16;
        let qa = hardy_assignment(m).unwrap();
        let model = cycled_subset_model(m, 3).unwrap();
        let v = hardy_check(&model, &qa, m, 1e-9).unwrap();
        assert!(!v.accepted());
        assert!(matches!(v.witness, Some(HardyWitness::IdenticalSupports { first: 0, second: 7, .. })), "{v:?}");
        assert!(v.witnesses.iter().any(|w| matches!(w, HardyWitness::CountingBound { lambda_count: 3, states: 16 })));
    }

    #[test]
    fn missing_labels_are_an_error() {
        let qa = hardy_assignment(4).unwrap();
        let model = orthodox_model(&qa).unwrap();
        assert!(matches!(hardy_check(&model, &hardy_assignment(2).unwrap(), 4, 1e-9), Err(Error::UnknownLabel(_))));
    }
}
