//! A photon in a Mach–Zehnder interferometer, and a tour of the Bloch sphere.

use qfoundations::hilbert::{
    born_bloch, born_probabilities, collapse, mach_zehnder, pauli, qubit, BlochVector, MeasurementBasis, Pauli,
};

fn main() -> qfoundations::Result<()> {
    println!("with second beamsplitter:    {:?}", mach_zehnder(true));
    println!("without second beamsplitter: {:?}", mach_zehnder(false));

    let psi = BlochVector::from_angles(1.0, 0.5);
    for axis in Pauli::ALL {
        let basis = MeasurementBasis::pauli_eigenbasis(axis);
        let p = born_probabilities(&psi.to_state(), &basis)?;
        let after = collapse(&psi.to_state(), &basis, 0)?;
        println!(
            "{axis:?}: P(+) = {:.4}, Bloch form {:.4}, post-state {:?}",
            p[0],
            born_bloch(&BlochVector::from_state(basis.vector(0))?, &psi)?,
            BlochVector::from_state(&after)?.components()
        );
    }
    let z = pauli(3)?;
    println!("<0|σ3|0> = {}", z.expectation(&qubit::zero())?);
    Ok(())
}
