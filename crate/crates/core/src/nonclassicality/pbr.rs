//! The PBR argument. Two systems are prepared independently, each in |0⟩ or
//! |+⟩, and measured jointly in an entangled basis {|Φ_jk⟩} where outcome jk
//! never occurs for preparation |Ψ_j⟩⊗|Ψ_k⟩. If the single-system
//! distributions for |0⟩ and |+⟩ share ontic states with mass P⋆, then under
//! preparation independence every one of the four preparations puts at
//! least P⋆² on pairs of shared ontic states. On those pairs no outcome is
//! allowed.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{qubit, MeasurementBasis, Pauli, StateVector, Tensor, C64};
use crate::ontology::{overlap, FiniteOntologicalModel, QuantumAssignment};

/// Label of the single-system preparation bound to |0⟩.
pub const PSI1: &str = "psi1";
/// Label of the single-system preparation bound to |+⟩.
pub const PSI2: &str = "psi2";

const SINGLE: [&str; 2] = [PSI1, PSI2];

fn single_states() -> [StateVector; 2] {
    [qubit::zero(), qubit::plus()]
}

/// Label for the joint preparation |Ψ_j⟩⊗|Ψ_k⟩, with j, k ∈ {1, 2}.
fn joint_label(j: usize, k: usize) -> String {
    format!("psi{}{}", j + 1, k + 1)
}

/// The four product preparations, ordered 11, 12, 21, 22.
pub fn pbr_preparations() -> Vec<(String, StateVector)> {
    let s = single_states();
    let mut out = Vec::with_capacity(4);
    for j in 0..2 {
        for k in 0..2 {
            out.push((joint_label(j, k), s[j].tensor(&s[k])));
        }
    }
    out
}

/// |Φ₁₁⟩ = (|0,1⟩ + |1,0⟩)/√2, |Φ₁₂⟩ = (|0,−⟩ + |1,+⟩)/√2,
/// |Φ₂₁⟩ = (|+,1⟩ + |−,0⟩)/√2, |Φ₂₂⟩ = (|+,−⟩ + |−,+⟩)/√2.
pub fn pbr_basis() -> MeasurementBasis {
    let (zero, one, plus, minus) = (qubit::zero(), qubit::one(), qubit::plus(), qubit::minus());
    let pair = |a: &StateVector, b: &StateVector, c: &StateVector, d: &StateVector| {
        let u = a.tensor(b);
        let v = c.tensor(d);
        let amps: Vec<C64> = u
            .amplitudes()
            .iter()
            .zip(v.amplitudes())
            .map(|(x, y)| (x + y) * FRAC_1_SQRT_2)
            .collect();
        StateVector::new(amps).expect("normalized by construction")
    };
    MeasurementBasis::new(vec![
        pair(&zero, &one, &one, &zero),
        pair(&zero, &minus, &one, &plus),
        pair(&plus, &one, &minus, &zero),
        pair(&plus, &minus, &minus, &plus),
    ])
    .expect("the PBR vectors are orthonormal")
}

/// Joint model on Λ×Λ with p(λ₁, λ₂ | Ψ_jk) = p(λ₁|Ψ_j) p(λ₂|Ψ_k).
/// The pair (λ₁, λ₂) has index λ₁·N + λ₂.
pub fn pbr_product_model(single: &FiniteOntologicalModel) -> Result<FiniteOntologicalModel> {
    let n = single.lambda_count();
    let dists = [single.preparation(PSI1)?, single.preparation(PSI2)?];
    let mut preps = BTreeMap::new();
    for j in 0..2 {
        for k in 0..2 {
            let joint: Vec<f64> = (0..n * n).map(|i| dists[j][i / n] * dists[k][i % n]).collect();
            let total: f64 = joint.iter().sum();
            preps.insert(joint_label(j, k), joint.into_iter().map(|p| p / total).collect());
        }
    }
    FiniteOntologicalModel::new(n * n, preps, BTreeMap::new())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PbrOutcomeRow {
    /// (j, k) with j, k ∈ {1, 2}.
    pub outcome: (usize, usize),
    /// Preparations under which the Born probability of this outcome is zero.
    pub forbidden_by: Vec<(usize, usize)>,
    /// Number of joint ontic states on which this outcome is still allowed.
    pub allowed_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PbrReport {
    /// Common-support mass of the |0⟩ and |+⟩ preparations.
    pub p_star: f64,
    /// Smallest, over the four preparations, probability of landing on a
    /// joint ontic state where every outcome is forbidden.
    pub deficit: f64,
    /// Mass on outcome-less joint ontic states under each preparation,
    /// indexed [j−1][k−1].
    pub inconsistent_mass: [[f64; 2]; 2],
    pub inconsistent_pairs: usize,
    pub outcomes: Vec<PbrOutcomeRow>,
    pub inconsistent_with_quantum: bool,
}

/// Checks a single-system model whose `psi1` and `psi2` preparations stand
/// for |0⟩ and |+⟩.
pub fn pbr_contradiction(single: &FiniteOntologicalModel, tol: f64) -> Result<PbrReport> {
    let n = single.lambda_count();
    let dists = [single.preparation(PSI1)?, single.preparation(PSI2)?];
    let p_star = overlap(single, PSI1, PSI2, tol)?.common_support_mass;
    let joint = pbr_product_model(single)?;

    let basis = pbr_basis();
    let preps = pbr_preparations();
    // forbidden[o][p]: outcome o has zero Born probability under preparation p.
    let mut forbidden = [[false; 4]; 4];
    for (o, phi) in basis.vectors().iter().enumerate() {
        for (p, (_, psi)) in preps.iter().enumerate() {
            forbidden[o][p] = phi.overlap_sq(psi)? <= tol;
        }
    }

    let in_support = |j: usize, l: usize| dists[j][l] > tol;
    let mut allowed_pairs = [0usize; 4];
    let mut inconsistent = Vec::new();
    for l1 in 0..n {
        for l2 in 0..n {
            let present: Vec<usize> = (0..4).filter(|&p| in_support(p / 2, l1) && in_support(p % 2, l2)).collect();
            if present.is_empty() {
                continue;
            }
            let mut any_allowed = false;
            for (o, row) in forbidden.iter().enumerate() {
                if !present.iter().any(|&p| row[p]) {
                    allowed_pairs[o] += 1;
                    any_allowed = true;
                }
            }
            if !any_allowed {
                inconsistent.push(l1 * n + l2);
            }
        }
    }

    let mut inconsistent_mass = [[0.0; 2]; 2];
    for (j, row) in inconsistent_mass.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            let dist = joint.preparation(&joint_label(j, k))?;
            *slot = inconsistent.iter().map(|&i| dist[i]).sum();
        }
    }
    let deficit = inconsistent_mass.iter().flatten().cloned().fold(f64::INFINITY, f64::min);

    let outcomes = (0..4)
        .map(|o| PbrOutcomeRow {
            outcome: (o / 2 + 1, o % 2 + 1),
            forbidden_by: (0..4).filter(|&p| forbidden[o][p]).map(|p| (p / 2 + 1, p % 2 + 1)).collect(),
            allowed_pairs: allowed_pairs[o],
        })
        .collect();

    Ok(PbrReport {
        p_star,
        deficit,
        inconsistent_mass,
        inconsistent_pairs: inconsistent.len(),
        outcomes,
        inconsistent_with_quantum: p_star > tol,
    })
}

/// Bindings `psi1` → |0⟩, `psi2` → |+⟩, `Z` → σ₃ basis, `X` → σ₁ basis.
pub fn single_system_assignment() -> QuantumAssignment {
    let [zero, plus] = single_states();
    QuantumAssignment::new()
        .with_state(SINGLE[0], zero)
        .with_state(SINGLE[1], plus)
        .with_basis("Z", MeasurementBasis::pauli_eigenbasis(Pauli::Z))
        .with_basis("X", MeasurementBasis::pauli_eigenbasis(Pauli::X))
}

/// A random single-system model that reproduces the σ₃ and σ₁ statistics of
/// |0⟩ and |+⟩ exactly while letting the two preparations overlap.
///
/// Ontic states carry deterministic (σ₃, σ₁) outcomes. |0⟩ spreads half its
/// mass over (+, +) states and half over (+, −) states; |+⟩ spreads half over
/// (+, +) states and half over (−, +) states. The shared (+, +) states give
/// the overlap. A few extra states outside both supports get random
/// responses.
pub fn random_overlapping_model<R: Rng + ?Sized>(rng: &mut R) -> FiniteOntologicalModel {
    // kinds: 0 = (+,+), 1 = (+,−), 2 = (−,+), 3 = unused by either preparation
    let counts = [rng.gen_range(1..=4), rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(0..=3)];
    let mut kinds = Vec::new();
    for (kind, &c) in counts.iter().enumerate() {
        kinds.extend(std::iter::repeat_n(kind, c));
    }
    // Shuffle so that the shared states are not always first.
    for i in (1..kinds.len()).rev() {
        let j = rng.gen_range(0..=i);
        kinds.swap(i, j);
    }
    let n = kinds.len();

    let spread = |targets: &[usize], rng: &mut R| {
        let mut p = vec![0.0; n];
        for &kind in targets {
            let idx: Vec<usize> = (0..n).filter(|&i| kinds[i] == kind).collect();
            let w: Vec<f64> = idx.iter().map(|_| rng.gen::<f64>() + 0.05).collect();
            let total: f64 = w.iter().sum();
            for (i, wi) in idx.into_iter().zip(w) {
                p[i] = 0.5 * wi / total;
            }
        }
        p
    };
    let psi1 = spread(&[0, 1], rng);
    let psi2 = spread(&[0, 2], rng);

    let det = |plus: bool| if plus { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
    let mut z = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for &kind in &kinds {
        let (zr, xr) = match kind {
            0 => (det(true), det(true)),
            1 => (det(true), det(false)),
            2 => (det(false), det(true)),
            _ => {
                let a: f64 = rng.gen();
                let b: f64 = rng.gen();
                (vec![a, 1.0 - a], vec![b, 1.0 - b])
            }
        };
        z.push(zr);
        x.push(xr);
    }

    let preparations = BTreeMap::from([(PSI1.to_string(), psi1), (PSI2.to_string(), psi2)]);
    let responses = BTreeMap::from([("Z".to_string(), z), ("X".to_string(), x)]);
    FiniteOntologicalModel::new(n, preparations, responses).expect("generator builds normalized tables")
}

/// Smallest n with overlap_sq^n < 1/2: after n copies, |Ψ₁⟩^⊗n and |Ψ₂⟩^⊗n are
/// at least as distinguishable as |0⟩ and |+⟩. The transformation taking
/// them to |0⟩ and |+⟩ is known to exist and is not built here.
pub fn moseley_copies(overlap_sq: f64) -> Result<u32> {
    if !(overlap_sq > 0.0 && overlap_sq < 1.0) {
        return Err(Error::InvalidParameter(format!("overlap {overlap_sq} outside (0, 1)")));
    }
    let mut n = ((0.5f64).ln() / overlap_sq.ln()).ceil().max(1.0) as u32;
    while overlap_sq.powi(n as i32) >= 0.5 {
        n += 1;
    }
    while n > 1 && overlap_sq.powi(n as i32 - 1) < 0.5 {
        n -= 1;
    }
    Ok(n)
}
