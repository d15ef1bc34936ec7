//! The CHSH game. Alice and Bob are each asked a binary question x, y and
//! must answer yes/no. They win when their answers agree, except for the
//! question pair (1, 1), where they must disagree. No deterministic strategy
//! satisfies all four constraints, so classical strategies win at most 3/4
//! of the time; measurements on a shared singlet reach (2 + √2)/4.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{singlet, BlochVector, Operator, Pauli, StateVector, Tensor, C64};
use crate::TOL_ALG;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    pub const BOTH: [Answer; 2] = [Answer::Yes, Answer::No];
}

/// True iff the answers win on questions (x, y).
pub fn winning_predicate(x: usize, y: usize, a: Answer, b: Answer) -> bool {
    if x == 1 && y == 1 {
        a != b
    } else {
        a == b
    }
}

const QUESTIONS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// Answers fixed in advance for each question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: [Answer; 2],
    pub bob: [Answer; 2],
}

impl DeterministicStrategy {
    pub fn new(a0: Answer, a1: Answer, b0: Answer, b1: Answer) -> Self {
        Self { alice: [a0, a1], bob: [b0, b1] }
    }

    /// All 16 strategies.
    pub fn all() -> Vec<DeterministicStrategy> {
        let mut out = Vec::with_capacity(16);
        for a0 in Answer::BOTH {
            for a1 in Answer::BOTH {
                for b0 in Answer::BOTH {
                    for b1 in Answer::BOTH {
                        out.push(Self::new(a0, a1, b0, b1));
                    }
                }
            }
        }
        out
    }

    /// Number of question pairs won, out of 4.
    pub fn wins(&self) -> usize {
        QUESTIONS.iter().filter(|&&(x, y)| winning_predicate(x, y, self.alice[x], self.bob[y])).count()
    }
}

/// Win probability under uniformly random questions.
pub fn evaluate_deterministic(s: &DeterministicStrategy) -> f64 {
    s.wins() as f64 / 4.0
}

/// A locally causal model: a shared variable λ ~ p(λ) and local response
/// probabilities p(A_x = yes | x, λ), p(B_y = yes | y, λ).
#[derive(Debug, Clone, PartialEq)]
pub struct LhvModel {
    weights: Vec<f64>,
    alice_yes: Vec<[f64; 2]>,
    bob_yes: Vec<[f64; 2]>,
}

impl LhvModel {
    pub fn new(weights: Vec<f64>, alice_yes: Vec<[f64; 2]>, bob_yes: Vec<[f64; 2]>) -> Result<Self> {
        let n = weights.len();
        if n == 0 || alice_yes.len() != n || bob_yes.len() != n {
            return Err(Error::InvalidDistribution(format!(
                "LHV tables have lengths {}, {}, {}",
                n,
                alice_yes.len(),
                bob_yes.len()
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > TOL_ALG {
            return Err(Error::InvalidDistribution("p(λ) is not a probability vector".into()));
        }
        let in_unit = |t: &[[f64; 2]]| t.iter().flatten().all(|&p| (0.0..=1.0).contains(&p));
        if !in_unit(&alice_yes) || !in_unit(&bob_yes) {
            return Err(Error::InvalidDistribution("response probability outside [0, 1]".into()));
        }
        Ok(Self { weights, alice_yes, bob_yes })
    }

    /// Point mass on one deterministic strategy.
    pub fn deterministic(s: &DeterministicStrategy) -> Self {
        Self::mixture(&[(*s, 1.0)]).expect("single strategy with weight 1")
    }

    /// λ selects which deterministic strategy is played.
    pub fn mixture(parts: &[(DeterministicStrategy, f64)]) -> Result<Self> {
        let yes = |a: Answer| if a == Answer::Yes { 1.0 } else { 0.0 };
        Self::new(
            parts.iter().map(|p| p.1).collect(),
            parts.iter().map(|(s, _)| s.alice.map(yes)).collect(),
            parts.iter().map(|(s, _)| s.bob.map(yes)).collect(),
        )
    }

    /// Random model with between 1 and `max_lambda` hidden states.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_lambda: usize) -> Self {
        let n = rng.gen_range(1..=max_lambda.max(1));
        let mut weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let table = |rng: &mut R| {
            (0..n)
                .map(|_| {
                    // Mix in extreme responses so deterministic corners are explored.
                    let mut pick = || match rng.gen_range(0..4) {
                        0 => 0.0,
                        1 => 1.0,
                        _ => rng.gen::<f64>(),
                    };
                    [pick(), pick()]
                })
                .collect::<Vec<_>>()
        };
        let alice_yes = table(rng);
        let bob_yes = table(rng);
        Self { weights, alice_yes, bob_yes }
    }

    pub fn lambda_count(&self) -> usize {
        self.weights.len()
    }

    fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.len() - 1
    }
}

/// Σ_λ p(λ) · ¼ Σ_{x,y} P(win | x, y, λ) with factorized local responses.
pub fn evaluate_lhv(model: &LhvModel) -> f64 {
    let mut total = 0.0;
    for (l, &w) in model.weights.iter().enumerate() {
        let mut per_lambda = 0.0;
        for (x, y) in QUESTIONS {
            let a = model.alice_yes[l][x];
            let b = model.bob_yes[l][y];
            let same = a * b + (1.0 - a) * (1.0 - b);
            per_lambda += if x == 1 && y == 1 { 1.0 - same } else { same };
        }
        total += w * per_lambda / 4.0;
    }
    total
}

/// How a player turns a ±1 measurement outcome into an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnswerMap {
    pub on_plus: Answer,
    pub on_minus: Answer,
}

impl AnswerMap {
    pub const PLUS_YES: AnswerMap = AnswerMap { on_plus: Answer::Yes, on_minus: Answer::No };
    pub const PLUS_NO: AnswerMap = AnswerMap { on_plus: Answer::No, on_minus: Answer::Yes };

    /// Sign index 0 is the +1 outcome, 1 the −1 outcome.
    pub fn answer(&self, sign_index: usize) -> Answer {
        if sign_index == 0 {
            self.on_plus
        } else {
            self.on_minus
        }
    }
}

/// Shared bipartite state plus a ±1-valued observable per player and question.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    state: StateVector,
    alice: [Operator; 2],
    bob: [Operator; 2],
    alice_map: AnswerMap,
    bob_map: AnswerMap,
}

impl QuantumStrategy {
    pub fn new(
        state: StateVector,
        alice: [Operator; 2],
        bob: [Operator; 2],
        alice_map: AnswerMap,
        bob_map: AnswerMap,
    ) -> Result<Self> {
        for obs in alice.iter().chain(bob.iter()) {
            let dev = obs.selfadjoint_deviation();
            if dev > TOL_ALG {
                return Err(Error::NotSelfAdjoint { deviation: dev });
            }
            // Self-adjoint with A² = 1 means spectrum ⊆ {+1, −1}.
            let sq = obs.compose(obs)?;
            let dev = max_entry_diff(&sq, &Operator::identity(obs.dim()));
            if dev > TOL_ALG {
                return Err(Error::NotDichotomic { deviation: dev });
            }
        }
        if alice[0].dim() != alice[1].dim() || bob[0].dim() != bob[1].dim() {
            return Err(Error::DimensionMismatch { expected: alice[0].dim(), found: alice[1].dim() });
        }
        let expected = alice[0].dim() * bob[0].dim();
        if state.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: state.dim() });
        }
        Ok(Self { state, alice, bob, alice_map, bob_map })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// P(sign_a, sign_b | x, y) = ⟨ψ| P_a ⊗ Q_b |ψ⟩ with spectral projectors
    /// P_± = (1 ± A)/2; the two local observables commute as A ⊗ 1 and 1 ⊗ B.
    pub fn joint_distribution(&self, x: usize, y: usize) -> Result<[[f64; 2]; 2]> {
        let pa = projectors(&self.alice[x]);
        let pb = projectors(&self.bob[y]);
        let mut out = [[0.0; 2]; 2];
        for (i, p) in pa.iter().enumerate() {
            for (j, q) in pb.iter().enumerate() {
                out[i][j] = p.tensor(q).expectation(&self.state)?.re.max(0.0);
            }
        }
        Ok(out)
    }
}

fn projectors(obs: &Operator) -> [Operator; 2] {
    let id = Operator::identity(obs.dim());
    let half = C64::new(0.5, 0.0);
    let plus = id.add(obs).expect("same dim").scale(half);
    let minus = id.add(&obs.scale(C64::new(-1.0, 0.0))).expect("same dim").scale(half);
    [plus, minus]
}

fn max_entry_diff(a: &Operator, b: &Operator) -> f64 {
    let n = a.dim();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            m = m.max((a.entry(i, j) - b.entry(i, j)).norm());
        }
    }
    m
}

/// Singlet; Alice measures σ₃ then σ₁ and answers "no" on +1; Bob measures
/// (σ₃ ± σ₁)/√2 and answers "yes" on +1.
pub fn canonical_quantum_strategy() -> QuantumStrategy {
    let z = Pauli::Z.operator();
    let x = Pauli::X.operator();
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let b0 = z.add(&x).expect("2x2").scale(r);
    let b1 = z.add(&x.scale(C64::new(-1.0, 0.0))).expect("2x2").scale(r);
    QuantumStrategy::new(singlet(), [z, x], [b0, b1], AnswerMap::PLUS_NO, AnswerMap::PLUS_YES)
        .expect("canonical strategy is valid")
}

/// Win probability of a quantum strategy under uniform questions.
pub fn evaluate_quantum(qs: &QuantumStrategy) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in QUESTIONS {
        let dist = qs.joint_distribution(x, y)?;
        for (i, row) in dist.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if winning_predicate(x, y, qs.alice_map.answer(i), qs.bob_map.answer(j)) {
                    total += p;
                }
            }
        }
    }
    Ok(total / 4.0)
}

/// Product shared state with random local ±1 observables n·σ and random
/// answer maps. Such strategies admit a local simulation.
pub fn random_product_strategy<R: Rng + ?Sized>(rng: &mut R) -> QuantumStrategy {
    let unit = |rng: &mut R| {
        let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
        let phi = rng.gen::<f64>() * std::f64::consts::TAU;
        BlochVector::from_angles(theta, phi)
    };
    let observable = |rng: &mut R| {
        let n = unit(rng).components();
        let mut op = Operator::identity(2).scale(C64::new(0.0, 0.0));
        for (axis, c) in Pauli::ALL.into_iter().zip(n) {
            op = op.add(&axis.operator().scale(C64::new(c, 0.0))).expect("2x2");
        }
        op
    };
    let a = unit(rng).to_state();
    let b = unit(rng).to_state();
    let alice = [observable(rng), observable(rng)];
    let bob = [observable(rng), observable(rng)];
    let map = |flip: bool| if flip { AnswerMap::PLUS_NO } else { AnswerMap::PLUS_YES };
    let (fa, fb) = (rng.gen(), rng.gen());
    QuantumStrategy::new(a.tensor(&b), alice, bob, map(fa), map(fb)).expect("valid product strategy")
}

#[derive(Debug, Clone)]
pub enum GameStrategy {
    Deterministic(DeterministicStrategy),
    Lhv(LhvModel),
    Quantum(QuantumStrategy),
}

impl GameStrategy {
    pub fn analytic_value(&self) -> Result<f64> {
        match self {
            GameStrategy::Deterministic(s) => Ok(evaluate_deterministic(s)),
            GameStrategy::Lhv(m) => Ok(evaluate_lhv(m)),
            GameStrategy::Quantum(q) => evaluate_quantum(q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationResult {
    pub rounds: u64,
    pub wins: u64,
    pub frequency: f64,
    pub analytic: f64,
    /// Binomial standard deviation of the frequency at the analytic value.
    pub sigma: f64,
}

impl SimulationResult {
    /// analytic ± 3σ.
    pub fn interval(&self) -> (f64, f64) {
        (self.analytic - 3.0 * self.sigma, self.analytic + 3.0 * self.sigma)
    }

    pub fn within_three_sigma(&self) -> bool {
        let (lo, hi) = self.interval();
        (lo..=hi).contains(&self.frequency)
    }
}

const CHUNK_ROUNDS: u64 = 1 << 16;

/// Plays `rounds` rounds with uniformly random questions. Rounds are split
/// into fixed-size chunks; chunk `c` draws from a generator seeded with
/// `seed + c`, so the result does not depend on the thread count.
pub fn simulate_game(strategy: &GameStrategy, rounds: u64, seed: u64) -> Result<SimulationResult> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    let analytic = strategy.analytic_value()?;
    let joint = match strategy {
        GameStrategy::Quantum(q) => {
            let mut t = [[[0.0; 4]; 2]; 2];
            for (x, y) in QUESTIONS {
                let d = q.joint_distribution(x, y)?;
                t[x][y] = [d[0][0], d[0][1], d[1][0], d[1][1]];
            }
            Some(t)
        }
        _ => None,
    };
    let chunks = rounds.div_ceil(CHUNK_ROUNDS);
    let wins: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(c));
            let n = CHUNK_ROUNDS.min(rounds - c * CHUNK_ROUNDS);
            let mut wins = 0u64;
            for _ in 0..n {
                let x = rng.gen_range(0..2usize);
                let y = rng.gen_range(0..2usize);
                let (a, b) = match strategy {
                    GameStrategy::Deterministic(s) => (s.alice[x], s.bob[y]),
                    GameStrategy::Lhv(m) => {
                        let l = m.sample_lambda(&mut rng);
                        let a = if rng.gen::<f64>() < m.alice_yes[l][x] { Answer::Yes } else { Answer::No };
                        let b = if rng.gen::<f64>() < m.bob_yes[l][y] { Answer::Yes } else { Answer::No };
                        (a, b)
                    }
                    GameStrategy::Quantum(q) => {
                        let probs = joint.as_ref().expect("quantum table")[x][y];
                        let outcome = sample_index(&probs, rng.gen());
                        (q.alice_map.answer(outcome / 2), q.bob_map.answer(outcome % 2))
                    }
                };
                wins += u64::from(winning_predicate(x, y, a, b));
            }
            wins
        })
        .sum();
    let frequency = wins as f64 / rounds as f64;
    let sigma = (analytic * (1.0 - analytic) / rounds as f64).sqrt();
    Ok(SimulationResult { rounds, wins, frequency, analytic, sigma })
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::pauli;
    use Answer::{No, Yes};

    #[test]
    fn predicate_examples() {
        assert!(winning_predicate(1, 1, Yes, No));
        assert!(winning_predicate(0, 0, Yes, Yes));
        assert!(!winning_predicate(0, 1, Yes, No));
    }

    #[test]
    fn deterministic_examples() {
        assert_eq!(evaluate_deterministic(&DeterministicStrategy::new(Yes, Yes, Yes, No)), 0.75);
        assert_eq!(evaluate_deterministic(&DeterministicStrategy::new(No, No, No, No)), 0.75);
        let all = DeterministicStrategy::all();
        assert_eq!(all.len(), 16);
        let values: Vec<f64> = all.iter().map(evaluate_deterministic).collect();
        assert_eq!(values.iter().cloned().fold(0.0, f64::max), 0.75);
        assert!(values.iter().all(|v| [0.0, 0.25, 0.5, 0.75].contains(v)));
    }

    #[test]
    fn lhv_examples() {
        let best = DeterministicStrategy::new(Yes, Yes, Yes, No);
        assert_eq!(evaluate_lhv(&LhvModel::deterministic(&best)), 0.75);
        let coin = LhvModel::new(vec![1.0], vec![[0.5, 0.5]], vec![[0.5, 0.5]]).unwrap();
        assert_eq!(evaluate_lhv(&coin), 0.5);
        assert!(LhvModel::new(vec![0.5, 0.4], vec![[0.0; 2]; 2], vec![[0.0; 2]; 2]).is_err());
        assert!(LhvModel::new(vec![1.0], vec![[1.5, 0.0]], vec![[0.0; 2]]).is_err());
    }

    #[test]
    fn lhv_mixture_is_linear() {
        let all = DeterministicStrategy::all();
        let parts: Vec<_> = all.iter().enumerate().map(|(i, s)| (*s, (i + 1) as f64 / 136.0)).collect();
        let mixed = evaluate_lhv(&LhvModel::mixture(&parts).unwrap());
        let expected: f64 = parts.iter().map(|(s, w)| w * evaluate_deterministic(s)).sum();
        assert!((mixed - expected).abs() < 1e-12);
    }

    #[test]
    fn canonical_quantum_value() {
        let v = evaluate_quantum(&canonical_quantum_strategy()).unwrap();
        assert!((v - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn aligned_sigma_z_on_singlet() {
        let z = pauli(3).unwrap();
        let qs = QuantumStrategy::new(
            singlet(),
            [z.clone(), z.clone()],
            [z.clone(), z],
            AnswerMap::PLUS_NO,
            AnswerMap::PLUS_YES,
        )
        .unwrap();
        let d = qs.joint_distribution(0, 0).unwrap();
        assert!(d[0][0].abs() < 1e-12 && d[1][1].abs() < 1e-12);
        assert!((evaluate_quantum(&qs).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_dichotomic_observables() {
        let z = pauli(3).unwrap();
        let half_z = z.scale(C64::new(0.5, 0.0));
        let err = QuantumStrategy::new(singlet(), [half_z, z.clone()], [z.clone(), z], AnswerMap::PLUS_NO, AnswerMap::PLUS_YES);
        assert!(matches!(err, Err(Error::NotDichotomic { .. })));
    }

    #[test]
    fn simulation_is_reproducible() {
        let s = GameStrategy::Quantum(canonical_quantum_strategy());
        let a = simulate_game(&s, 200_000, 9).unwrap();
        let b = simulate_game(&s, 200_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.within_three_sigma(), "{a:?}");
        let det = GameStrategy::Deterministic(DeterministicStrategy::new(Yes, Yes, Yes, No));
        let r = simulate_game(&det, 100_000, 1).unwrap();
        assert!(r.within_three_sigma(), "{r:?}");
        assert!(simulate_game(&det, 0, 1).is_err());
    }
}
