//! No-go verifiers: the CHSH game, Hardy's bound on the number of ontic
//! states, and the PBR argument against overlapping preparations.

mod chsh;
mod hardy;
mod pbr;

pub use chsh::{
    canonical_quantum_strategy, evaluate_deterministic, evaluate_lhv, evaluate_quantum, random_product_strategy,
    simulate_game, winning_predicate, Answer, AnswerMap, DeterministicStrategy, GameStrategy, LhvModel,
    QuantumStrategy, SimulationResult,
};
pub use hardy::{cycled_subset_model, hardy_assignment, hardy_check, hardy_state, hardy_states, HardyVerdict, HardyWitness};
pub use pbr::{
    moseley_copies, pbr_basis, pbr_contradiction, pbr_preparations, pbr_product_model, random_overlapping_model,
    single_system_assignment, PbrOutcomeRow, PbrReport, PSI1, PSI2,
};
