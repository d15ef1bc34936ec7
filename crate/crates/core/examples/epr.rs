//! The EPR state as a sharply correlated Gaussian: reading x₁ pins down x₂.

use qfoundations::phase_space::{condition_on_position, epr_state, rr_satisfied, Particle, RrScale};

fn main() -> qfoundations::Result<()> {
    let c = 1.5;
    for s in [1.0, 0.1, 1e-3] {
        let state = epr_state(c, s)?;
        let g = state.cov();
        let check = rr_satisfied(g, RrScale::default())?;
        let post = condition_on_position(&state, Particle::First, 0.0)?;
        println!(
            "s = {s:>6}: Var(x1−x2) = {:.3e}, Var(x2) = {:.3e}, allowed = {}, x1 = 0 ⇒ x2 = {:.6} ± {:.3e}",
            g[(0, 0)] + g[(2, 2)] - 2.0 * g[(0, 2)],
            g[(2, 2)],
            check.satisfied,
            post.mean()[0],
            post.cov()[(0, 0)].sqrt()
        );
    }
    Ok(())
}
