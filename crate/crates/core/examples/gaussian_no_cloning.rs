//! Gaussian phase-space states under the resolution restriction, and why
//! fidelity-preserving dynamics cannot clone them.

use qfoundations::phase_space::{
    evolve, fidelity, no_cloning_witness, rr_satisfied, uncertainty_product, GaussianMacrostate, RrScale,
    SymplecticMatrix,
};

fn main() -> qfoundations::Result<()> {
    let lambda = RrScale::default();
    for (vx, vp) in [(0.5, 0.5), (0.25, 0.25), (2.0, 0.125)] {
        let g = GaussianMacrostate::diagonal(&[0.0, 0.0], &[vx, vp])?;
        let check = rr_satisfied(g.cov(), lambda)?;
        println!(
            "diag({vx}, {vp}): ΔxΔp = {:.4}, allowed = {}, margin = {:+.4}",
            uncertainty_product(&g)[0],
            check.satisfied,
            check.margin
        );
    }

    let f = GaussianMacrostate::vacuum(1, lambda);
    let g = f.displaced(&[1.0, 0.0])?;
    let w = no_cloning_witness(&f, &g)?;
    println!("\nF = {:.10}, F² = {:.10}, cloning impossible: {}", w.fidelity, w.fidelity_sq, w.cloning_impossible);

    let a = SymplecticMatrix::rotation(1, 0, 0.4).then(&SymplecticMatrix::squeeze(1, 0, 3.0)?);
    let (fa, ga) = (evolve(&f, &a)?, evolve(&g, &a)?);
    println!("after squeezing and rotating: F = {:.10}", fidelity(&fa, &ga)?);
    println!("evolved state: {}", serde_json::to_string(&fa).expect("serializable"));
    Ok(())
}
