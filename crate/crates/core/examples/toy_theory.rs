//! The toy theory: four cells, at most one bit of knowledge.

use qfoundations::toy_theory::{
    agreement_probability, measure, qubit_correspondence_report, sequence_distribution, ToyMacrostate,
    ToyMeasurement::{A, B},
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qfoundations::Result<()> {
    println!("state  meas  toy          qubit");
    for row in qubit_correspondence_report()? {
        println!(
            "{:<6} {:<5} {:<12} {}, {}",
            row.state.to_string(),
            row.measurement.to_string(),
            format!("{}, {}", row.toy[0], row.toy[1]),
            row.qubit[0],
            row.qubit[1]
        );
    }

    let start = ToyMacrostate::uniform();
    println!("\nP(A twice agrees)     = {}", agreement_probability(&start, &[A, A], 0, 1));
    println!("P(A agrees after B)   = {}", agreement_probability(&start, &[A, B, A], 0, 2));
    for (outcomes, p) in sequence_distribution(&start, &[A, B, A]) {
        println!("  A,B,A -> {outcomes:?} with probability {p}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (first, after) = measure(&start, A, &mut rng);
    let (again, _) = measure(&after, A, &mut rng);
    println!("\nsampled: A = {first}, post-state {after}, A again = {again}");
    Ok(())
}
