//! Hardy's bound: M states on a great circle need at least log₂ M ontic states.

use qfoundations::nonclassicality::{cycled_subset_model, hardy_assignment, hardy_check};
use qfoundations::ontology::orthodox_model;

fn main() -> qfoundations::Result<()> {
    for m in [2, 4, 8, 16] {
        let qa = hardy_assignment(m)?;
        let v = hardy_check(&orthodox_model(&qa)?, &qa, m, 1e-9)?;
        println!("M = {m:>2}: orthodox model on {} states accepted = {}", v.lambda_count, v.accepted());
        for n in (1..).take_while(|&n: &usize| (1usize << n) < m) {
            let v = hardy_check(&cycled_subset_model(m, n)?, &qa, m, 1e-9)?;
            if let Some(w) = &v.witness {
                println!("        {n} ontic states: rejected, {w}");
            }
        }
    }
    Ok(())
}
