//! The four-cell toy theory: a particle sits in one of the cells (0,0),
//! (0,1), (1,0), (1,1), and an observer may never know more than one bit
//! about which. Macrostates are probability vectors over the cells with no
//! entry above 1/2; the six extremal ones put 1/2 on exactly two cells.
//!
//! Probabilities are exact rationals so that every table built here can be
//! compared exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{born_probabilities, MeasurementBasis, Pauli, StateVector};
use crate::TOL_ALG;

pub type Prob = Ratio<i64>;

/// Cell index for (row, column): (0,0)=0, (0,1)=1, (1,0)=2, (1,1)=3.
pub const fn cell(row: usize, col: usize) -> usize {
    2 * row + col
}

fn half() -> Prob {
    Prob::new(1, 2)
}

pub fn to_f64(p: Prob) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ToyMacrostate {
    p: [Prob; 4],
}

impl ToyMacrostate {
    /// Validates nonnegativity, normalization and the one-bit restriction
    /// (no cell above 1/2, i.e. membership in the hull of the extremal states).
    pub fn new(p: [Prob; 4]) -> Result<Self> {
        if p.iter().any(|x| *x < Prob::from_integer(0)) {
            return Err(Error::InvalidDistribution(format!("negative entry in {p:?}")));
        }
        let total: Prob = p.iter().sum();
        if total != Prob::from_integer(1) {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        if let Some(i) = p.iter().position(|x| *x > half()) {
            return Err(Error::InvalidDistribution(format!(
                "cell {i} has probability {} > 1/2, more than one bit of knowledge",
                p[i]
            )));
        }
        Ok(Self { p })
    }

    pub fn from_fractions(p: [(i64, i64); 4]) -> Result<Self> {
        Self::new(p.map(|(n, d)| Prob::new(n, d)))
    }

    pub fn uniform() -> Self {
        Self { p: [Prob::new(1, 4); 4] }
    }

    /// Uniform over the two cells of one measurement outcome.
    pub fn extremal(label: Extremal) -> Self {
        let mut p = [Prob::from_integer(0); 4];
        for c in label.measurement().outcome_cells(label.outcome()) {
            p[c] = half();
        }
        Self { p }
    }

    pub fn probs(&self) -> [Prob; 4] {
        self.p
    }

    pub fn as_f64(&self) -> [f64; 4] {
        self.p.map(to_f64)
    }

    pub fn label(&self) -> Option<Extremal> {
        Extremal::ALL.into_iter().find(|&e| Self::extremal(e) == *self)
    }

    /// Σ_i min(p_i, q_i).
    pub fn overlap(&self, other: &ToyMacrostate) -> Prob {
        self.p.iter().zip(other.p.iter()).map(|(a, b)| *a.min(b)).sum()
    }
}

impl fmt::Display for ToyMacrostate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label() {
            Some(l) => write!(f, "{l}"),
            None => write!(f, "({}, {}, {}, {})", self.p[0], self.p[1], self.p[2], self.p[3]),
        }
    }
}

/// The three two-outcome measurements, each asking which pair of cells the
/// particle is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ToyMeasurement {
    /// Row: {(0,0),(0,1)} vs {(1,0),(1,1)}.
    A,
    /// Column: {(0,0),(1,0)} vs {(0,1),(1,1)}.
    B,
    /// Diagonal: {(0,0),(1,1)} vs {(0,1),(1,0)}.
    C,
}

impl ToyMeasurement {
    pub const ALL: [ToyMeasurement; 3] = [ToyMeasurement::A, ToyMeasurement::B, ToyMeasurement::C];

    pub fn outcome_cells(self, outcome: usize) -> [usize; 2] {
        let partition = match self {
            ToyMeasurement::A => [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
            ToyMeasurement::B => [[cell(0, 0), cell(1, 0)], [cell(0, 1), cell(1, 1)]],
            ToyMeasurement::C => [[cell(0, 0), cell(1, 1)], [cell(0, 1), cell(1, 0)]],
        };
        partition[outcome]
    }

    pub fn outcome_of(self, c: usize) -> usize {
        if self.outcome_cells(0).contains(&c) {
            0
        } else {
            1
        }
    }

    /// Pauli observable with the same statistics: A↔σ₃, B↔σ₁, C↔σ₂.
    pub fn pauli(self) -> Pauli {
        match self {
            ToyMeasurement::A => Pauli::Z,
            ToyMeasurement::B => Pauli::X,
            ToyMeasurement::C => Pauli::Y,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(ToyMeasurement::A),
            "B" | "b" => Ok(ToyMeasurement::B),
            "C" | "c" => Ok(ToyMeasurement::C),
            other => Err(Error::InvalidParameter(format!("unknown toy measurement `{other}`"))),
        }
    }
}

impl fmt::Display for ToyMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ToyMeasurement::A => "A",
            ToyMeasurement::B => "B",
            ToyMeasurement::C => "C",
        };
        f.write_str(s)
    }
}

/// Labels of the six extremal macrostates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extremal {
    A,
    ABar,
    B,
    BBar,
    C,
    CBar,
}

impl Extremal {
    pub const ALL: [Extremal; 6] =
        [Extremal::A, Extremal::B, Extremal::C, Extremal::ABar, Extremal::BBar, Extremal::CBar];

    pub fn of(meas: ToyMeasurement, outcome: usize) -> Self {
        match (meas, outcome) {
            (ToyMeasurement::A, 0) => Extremal::A,
            (ToyMeasurement::A, _) => Extremal::ABar,
            (ToyMeasurement::B, 0) => Extremal::B,
            (ToyMeasurement::B, _) => Extremal::BBar,
            (ToyMeasurement::C, 0) => Extremal::C,
            (ToyMeasurement::C, _) => Extremal::CBar,
        }
    }

    pub fn measurement(self) -> ToyMeasurement {
        match self {
            Extremal::A | Extremal::ABar => ToyMeasurement::A,
            Extremal::B | Extremal::BBar => ToyMeasurement::B,
            Extremal::C | Extremal::CBar => ToyMeasurement::C,
        }
    }

    pub fn outcome(self) -> usize {
        match self {
            Extremal::A | Extremal::B | Extremal::C => 0,
            _ => 1,
        }
    }

    /// The matching Pauli eigenstate.
    pub fn qubit_state(self) -> StateVector {
        MeasurementBasis::pauli_eigenbasis(self.measurement().pauli()).vector(self.outcome()).clone()
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(Extremal::A),
            "b" => Ok(Extremal::B),
            "c" => Ok(Extremal::C),
            "abar" | "ā" => Ok(Extremal::ABar),
            "bbar" | "b̄" => Ok(Extremal::BBar),
            "cbar" | "c̄" => Ok(Extremal::CBar),
            other => Err(Error::InvalidParameter(format!("unknown toy macrostate `{other}`"))),
        }
    }
}

impl fmt::Display for Extremal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Extremal::A => "a",
            Extremal::B => "b",
            Extremal::C => "c",
            Extremal::ABar => "abar",
            Extremal::BBar => "bbar",
            Extremal::CBar => "cbar",
        };
        f.write_str(s)
    }
}

/// The six minimal-uncertainty macrostates {a, b, c, ā, b̄, c̄}.
pub fn extremal_macrostates() -> [(Extremal, ToyMacrostate); 6] {
    Extremal::ALL.map(|e| (e, ToyMacrostate::extremal(e)))
}

/// (p₀, p₁): the macrostate's mass on each outcome's pair of cells.
pub fn measurement_statistics(m: &ToyMacrostate, meas: ToyMeasurement) -> [Prob; 2] {
    [0, 1].map(|k| meas.outcome_cells(k).iter().map(|&c| m.p[c]).sum())
}

/// Post-measurement macrostate for an observed outcome: whatever the prior,
/// the outcome reveals the pair and the disturbance leaves the particle
/// equally likely in either of its cells.
pub fn post_measurement_state(meas: ToyMeasurement, outcome: usize) -> ToyMacrostate {
    ToyMacrostate::extremal(Extremal::of(meas, outcome))
}

/// Samples an outcome from the macrostate's statistics and returns it with
/// the disturbed post-measurement macrostate.
pub fn measure<R: Rng + ?Sized>(
    m: &ToyMacrostate,
    meas: ToyMeasurement,
    rng: &mut R,
) -> (usize, ToyMacrostate) {
    let [p0, _] = measurement_statistics(m, meas);
    let outcome = usize::from(rng.gen::<f64>() >= to_f64(p0));
    (outcome, post_measurement_state(meas, outcome))
}

/// Microstate-level measurement: reports which pair the particle occupies,
/// then with probability 1/2 leaves it in place and otherwise swaps the two
/// cells of that pair.
pub fn measure_microstate<R: Rng + ?Sized>(c: usize, meas: ToyMeasurement, rng: &mut R) -> (usize, usize) {
    let outcome = meas.outcome_of(c);
    let [x, y] = meas.outcome_cells(outcome);
    let after = if rng.gen_bool(0.5) { c } else if c == x { y } else { x };
    (outcome, after)
}

/// Samples a microstate from a macrostate.
pub fn sample_microstate<R: Rng + ?Sized>(m: &ToyMacrostate, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (c, p) in m.as_f64().into_iter().enumerate() {
        acc += p;
        if u < acc {
            return c;
        }
    }
    (0..4).rev().find(|&c| m.p[c] > Prob::from_integer(0)).unwrap_or(3)
}

/// Exact distribution over outcome strings for a sequence of measurements,
/// using the post-measurement rule after every step.
pub fn sequence_distribution(initial: &ToyMacrostate, sequence: &[ToyMeasurement]) -> BTreeMap<Vec<usize>, Prob> {
    let mut branches: Vec<(Vec<usize>, Prob, ToyMacrostate)> = vec![(Vec::new(), Prob::from_integer(1), *initial)];
    for &meas in sequence {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (outcomes, weight, state) in branches {
            let stats = measurement_statistics(&state, meas);
            for (k, pk) in stats.into_iter().enumerate() {
                if pk == Prob::from_integer(0) {
                    continue;
                }
                let mut o = outcomes.clone();
                o.push(k);
                next.push((o, weight * pk, post_measurement_state(meas, k)));
            }
        }
        branches = next;
    }
    let mut out = BTreeMap::new();
    for (o, w, _) in branches {
        *out.entry(o).or_insert(Prob::from_integer(0)) += w;
    }
    out
}

/// Probability that measurements at positions `i` and `j` of `sequence`
/// give the same outcome.
pub fn agreement_probability(initial: &ToyMacrostate, sequence: &[ToyMeasurement], i: usize, j: usize) -> Prob {
    sequence_distribution(initial, sequence)
        .into_iter()
        .filter(|(o, _)| o[i] == o[j])
        .map(|(_, w)| w)
        .sum()
}

/// Relabels cells: the mass at cell `c` moves to `perm[c]`.
pub fn permute(m: &ToyMacrostate, perm: [usize; 4]) -> Result<ToyMacrostate> {
    let mut seen = [false; 4];
    for &t in &perm {
        if t >= 4 || seen[t] {
            return Err(Error::NotAPermutation);
        }
        seen[t] = true;
    }
    let mut p = [Prob::from_integer(0); 4];
    for (c, &t) in perm.iter().enumerate() {
        p[t] = m.p[c];
    }
    ToyMacrostate::new(p)
}

/// Optimal equal-prior probability of guessing which of two macrostates was
/// prepared when handed the exact microstate: 1 − ½ Σ_i min(m1_i, m2_i).
pub fn single_shot_distinguish_bound(m1: &ToyMacrostate, m2: &ToyMacrostate) -> Prob {
    Prob::from_integer(1) - m1.overlap(m2) / 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceRow {
    pub state: Extremal,
    pub measurement: ToyMeasurement,
    pub toy: [Prob; 2],
    pub qubit: [Prob; 2],
}

impl CorrespondenceRow {
    pub fn matches(&self) -> bool {
        self.toy == self.qubit
    }
}

/// Toy statistics of every extremal macrostate under every measurement next
/// to the Born statistics of the corresponding Pauli eigenstate and Pauli
/// measurement.
pub fn qubit_correspondence_report() -> Result<Vec<CorrespondenceRow>> {
    let mut rows = Vec::with_capacity(18);
    for (label, m) in extremal_macrostates() {
        let psi = label.qubit_state();
        for meas in ToyMeasurement::ALL {
            let basis = MeasurementBasis::pauli_eigenbasis(meas.pauli());
            let born = born_probabilities(&psi, &basis)?;
            rows.push(CorrespondenceRow {
                state: label,
                measurement: meas,
                toy: measurement_statistics(&m, meas),
                qubit: [snap_quarter(born[0])?, snap_quarter(born[1])?],
            });
        }
    }
    Ok(rows)
}

/// Rounds a probability to the nearest multiple of 1/4, failing if it is
/// further than `TOL_ALG` away.
fn snap_quarter(p: f64) -> Result<Prob> {
    let q = (p * 4.0).round();
    if (p - q / 4.0).abs() > TOL_ALG {
        return Err(Error::InvalidParameter(format!("{p} is not a multiple of 1/4")));
    }
    Ok(Prob::new(q as i64, 4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: i64, d: i64) -> Prob {
        Prob::new(n, d)
    }

    fn all_permutations() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let perm = [a, b, c, d];
                        let mut s = perm;
                        s.sort();
                        if s == [0, 1, 2, 3] {
                            out.push(perm);
                        }
                    }
                }
            }
        }
        out
    }

    /// Best success over all 16 deterministic rules cell → {first, second}.
    fn brute_force_guess(m1: &ToyMacrostate, m2: &ToyMacrostate) -> Prob {
        (0u32..16)
            .map(|rule| {
                (0..4)
                    .map(|c| if rule >> c & 1 == 0 { m1.p[c] } else { m2.p[c] })
                    .sum::<Prob>()
                    / 2
            })
            .max()
            .unwrap()
    }

    #[test]
    fn extremal_states_are_as_listed() {
        let expect = |e, v: [i64; 4]| assert_eq!(ToyMacrostate::extremal(e).probs(), v.map(|n| p(n, 2)));
        expect(Extremal::A, [1, 1, 0, 0]);
        expect(Extremal::ABar, [0, 0, 1, 1]);
        expect(Extremal::B, [1, 0, 1, 0]);
        expect(Extremal::BBar, [0, 1, 0, 1]);
        expect(Extremal::C, [1, 0, 0, 1]);
        expect(Extremal::CBar, [0, 1, 1, 0]);
        for (e, m) in extremal_macrostates() {
            assert!(ToyMacrostate::new(m.probs()).is_ok());
            assert_eq!(m.probs().iter().filter(|&&x| x == half()).count(), 2);
            let partner = Extremal::of(e.measurement(), 1 - e.outcome());
            assert_eq!(m.overlap(&ToyMacrostate::extremal(partner)), p(0, 1));
        }
    }

    #[test]
    fn rejects_more_than_one_bit() {
        assert!(ToyMacrostate::from_fractions([(1, 1), (0, 1), (0, 1), (0, 1)]).is_err());
        assert!(ToyMacrostate::from_fractions([(1, 2), (1, 2), (1, 2), (0, 1)]).is_err());
        assert!(ToyMacrostate::from_fractions([(1, 2), (1, 4), (1, 4), (0, 1)]).is_ok());
    }

    #[test]
    fn statistics_examples() {
        let a = ToyMacrostate::extremal(Extremal::A);
        let b = ToyMacrostate::extremal(Extremal::B);
        assert_eq!(measurement_statistics(&b, ToyMeasurement::A), [half(), half()]);
        assert_eq!(measurement_statistics(&a, ToyMeasurement::A), [p(1, 1), p(0, 1)]);
        assert_eq!(measurement_statistics(&ToyMacrostate::uniform(), ToyMeasurement::B), [half(), half()]);
    }

    #[test]
    fn measurement_disturbs_to_outcome_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = ToyMacrostate::extremal(Extremal::B);
        let mut seen = [false; 2];
        for _ in 0..64 {
            let (k, post) = measure(&b, ToyMeasurement::A, &mut rng);
            seen[k] = true;
            let expected = if k == 0 { Extremal::A } else { Extremal::ABar };
            assert_eq!(post, ToyMacrostate::extremal(expected));
        }
        assert_eq!(seen, [true, true]);

        let a = ToyMacrostate::extremal(Extremal::A);
        for _ in 0..16 {
            assert_eq!(measure(&a, ToyMeasurement::A, &mut rng), (0, a));
        }
    }

    #[test]
    fn interleaved_measurement_randomizes() {
        let a = ToyMacrostate::extremal(Extremal::A);
        use ToyMeasurement::*;
        assert_eq!(agreement_probability(&a, &[A, A], 0, 1), p(1, 1));
        assert_eq!(agreement_probability(&a, &[A, B, A], 0, 2), half());
        let dist = sequence_distribution(&a, &[A, B, A]);
        assert_eq!(dist.len(), 4);
        assert!(dist.values().all(|&w| w == p(1, 4)));
    }

    #[test]
    fn microstate_rule_reproduces_macrostate_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = ToyMacrostate::extremal(Extremal::B);
        let trials = 40_000;
        let mut counts = [[0usize; 4]; 2];
        for _ in 0..trials {
            let c = sample_microstate(&b, &mut rng);
            let (k, after) = measure_microstate(c, ToyMeasurement::A, &mut rng);
            counts[k][after] += 1;
            let (k2, _) = measure_microstate(after, ToyMeasurement::A, &mut rng);
            assert_eq!(k, k2);
        }
        // Each (outcome, cell-of-that-outcome) pair should carry 1/4 of the runs.
        for (k, row) in counts.iter().enumerate() {
            for c in ToyMeasurement::A.outcome_cells(k) {
                let f = row[c] as f64 / trials as f64;
                assert!((f - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / trials as f64).sqrt(), "{f}");
            }
        }
    }

    #[test]
    fn permutation_examples() {
        let a = ToyMacrostate::extremal(Extremal::A);
        let swap = [0, 2, 1, 3];
        let moved = permute(&a, swap).unwrap();
        assert_eq!(moved, ToyMacrostate::extremal(Extremal::B));
        assert_eq!(measurement_statistics(&a, ToyMeasurement::B), [half(), half()]);
        assert_eq!(measurement_statistics(&moved, ToyMeasurement::B), [p(1, 1), p(0, 1)]);
        assert_eq!(permute(&a, [0, 1, 2, 3]).unwrap(), a);
        assert_eq!(permute(&a, [0, 0, 1, 2]), Err(Error::NotAPermutation));
    }

    #[test]
    fn every_permutation_keeps_extremal_states_valid() {
        let perms = all_permutations();
        assert_eq!(perms.len(), 24);
        for perm in perms {
            for (_, m) in extremal_macrostates() {
                let moved = permute(&m, perm).unwrap();
                assert!(moved.label().is_some());
            }
        }
    }

    #[test]
    fn distinguish_bound_matches_brute_force() {
        let a = ToyMacrostate::extremal(Extremal::A);
        let b = ToyMacrostate::extremal(Extremal::B);
        let abar = ToyMacrostate::extremal(Extremal::ABar);
        assert_eq!(single_shot_distinguish_bound(&a, &b), p(3, 4));
        assert_eq!(single_shot_distinguish_bound(&a, &abar), p(1, 1));
        assert_eq!(single_shot_distinguish_bound(&a, &a), half());
        let states = extremal_macrostates();
        let mut pairs = 0;
        for i in 0..6 {
            for j in (i + 1)..6 {
                let (m1, m2) = (states[i].1, states[j].1);
                assert_eq!(single_shot_distinguish_bound(&m1, &m2), brute_force_guess(&m1, &m2));
                pairs += 1;
            }
        }
        assert_eq!(pairs, 15);
    }

    #[test]
    fn correspondence_table() {
        let rows = qubit_correspondence_report().unwrap();
        assert_eq!(rows.len(), 18);
        assert!(rows.iter().all(CorrespondenceRow::matches));
        let row = |s, m| rows.iter().find(|r| r.state == s && r.measurement == m).unwrap();
        assert_eq!(row(Extremal::A, ToyMeasurement::A).qubit, [p(1, 1), p(0, 1)]);
        assert_eq!(row(Extremal::A, ToyMeasurement::B).qubit, [half(), half()]);
    }
}
