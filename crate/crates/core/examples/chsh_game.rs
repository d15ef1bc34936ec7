//! The CHSH game: classical strategies top out at 3/4, the singlet does better.

use qfoundations::nonclassicality::{
    canonical_quantum_strategy, evaluate_deterministic, evaluate_lhv, evaluate_quantum, simulate_game,
    DeterministicStrategy, GameStrategy, LhvModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qfoundations::Result<()> {
    let best = DeterministicStrategy::all()
        .into_iter()
        .max_by(|a, b| evaluate_deterministic(a).total_cmp(&evaluate_deterministic(b)))
        .expect("sixteen strategies");
    println!("best deterministic strategy {best:?}: {}", evaluate_deterministic(&best));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lhv_best = (0..1000).map(|_| evaluate_lhv(&LhvModel::random(&mut rng, 8))).fold(0.0, f64::max);
    println!("best of 1000 random hidden-variable models: {lhv_best:.12}");

    let quantum = canonical_quantum_strategy();
    println!("singlet strategy: {:.12} (exact (2+√2)/4 = {:.12})", evaluate_quantum(&quantum)?, (2.0 + 2f64.sqrt()) / 4.0);

    let sim = simulate_game(&GameStrategy::Quantum(quantum), 1_000_000, 42)?;
    let (lo, hi) = sim.interval();
    println!("10⁶ simulated rounds: {} wins, frequency {:.6}, 3σ band [{lo:.6}, {hi:.6}]", sim.wins, sim.frequency);
    Ok(())
}
