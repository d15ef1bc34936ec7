//! The PBR argument: overlapping preparations run into a joint measurement
//! with no allowed outcome.

use qfoundations::nonclassicality::{moseley_copies, pbr_contradiction, random_overlapping_model, PSI1, PSI2};
use qfoundations::ontology::parse_model;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOY_EMBEDDING: &str = r#"{
  "lambda_count": 4,
  "preparations": { "psi1": [0.5, 0.5, 0, 0], "psi2": [0.5, 0, 0.5, 0] },
  "responses": {
    "Z": [[1, 0], [1, 0], [0, 1], [0, 1]],
    "X": [[1, 0], [0, 1], [1, 0], [0, 1]]
  },
  "bindings": { "psi1": "|0>", "psi2": "|+>", "Z": "Z", "X": "X" }
}"#;

fn main() -> qfoundations::Result<()> {
    let (model, _) = parse_model(TOY_EMBEDDING)?;
    let r = pbr_contradiction(&model, 1e-12)?;
    println!("toy embedding: P* = {}, deficit = {} (P*² = {})", r.p_star, r.deficit, r.p_star * r.p_star);
    for row in &r.outcomes {
        println!("  outcome {:?}: forbidden by {:?}, allowed on {} pairs", row.outcome, row.forbidden_by, row.allowed_pairs);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let m = random_overlapping_model(&mut rng);
        let r = pbr_contradiction(&m, 1e-12)?;
        println!("random model, {} states: P* = {:.4}, deficit = {:.4}", m.lambda_count(), r.p_star, r.deficit);
    }

    let o = (std::f64::consts::PI / 8.0).cos().powi(2);
    println!("{PSI1}/{PSI2} stand for |0>/|+>; states with overlap {o:.4} need {} copies", moseley_copies(o)?);
    Ok(())
}
