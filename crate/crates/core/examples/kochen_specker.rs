//! The Kochen–Specker model for a qubit: hidden states on the sphere that
//! reproduce the Born rule, and how much two preparations overlap.

use qfoundations::hilbert::{born_bloch, qubit, BlochVector, MeasurementBasis};
use qfoundations::ontology::{
    discretize_ks, overlap, reproduces_quantum, sample_ks, ks_response, QuantumAssignment, Resolution,
    SphereQuadrature,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qfoundations::Result<()> {
    let grid = SphereQuadrature::new(Resolution::default())?;
    let psi = BlochVector::from_angles(0.3, 1.0);
    for theta in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let phi = BlochVector::from_angles(theta, 0.2);
        println!(
            "θ_Φ = {theta:.1}: model {:.6}, Born {:.6}",
            grid.ks_predicted(&phi, &psi),
            born_bloch(&phi, &psi)?
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z = BlochVector::from_angles(0.0, 0.0);
    let hits: u32 = (0..100_000).map(|_| u32::from(ks_response(&psi, &sample_ks(&z, &mut rng)))).sum();
    println!("sampled P(Ψ | ẑ) = {:.4}, Born {:.4}", hits as f64 / 1e5, born_bloch(&psi, &z)?);

    let x = BlochVector::from_angles(std::f64::consts::FRAC_PI_2, 0.0);
    println!("overlap of ẑ and x̂ preparations: {:.6} (1 − 1/√2 = {:.6})", grid.ks_overlap(&z, &x), 1.0 - 0.5f64.sqrt());

    // The same model as a finite table, checked against quantum predictions.
    let qa = QuantumAssignment::new()
        .with_state("zero", qubit::zero())
        .with_state("plus", qubit::plus())
        .with_basis("Z", MeasurementBasis::computational(2)?)
        .with_basis("X", MeasurementBasis::qubit_with_first(&qubit::plus())?);
    let model = discretize_ks(&qa, Resolution::new(100, 200)?)?;
    let report = reproduces_quantum(&model, &qa, 5e-3)?;
    println!("100x200 table: max deviation {:.2e}", report.max_deviation);
    println!("{:?}", overlap(&model, "zero", "plus", 1e-12)?);
    Ok(())
}
