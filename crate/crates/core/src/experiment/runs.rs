use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ChshMode, Experiment, ExperimentConfig, GaussianMode, KsMode, ReportRow};
use crate::error::{Error, Result};
use crate::hilbert::{born_bloch, mach_zehnder, BlochVector};
use crate::nonclassicality::{
    canonical_quantum_strategy, cycled_subset_model, evaluate_deterministic, evaluate_lhv, evaluate_quantum,
    hardy_assignment, hardy_check, moseley_copies, pbr_basis, pbr_contradiction, pbr_preparations,
    random_overlapping_model, random_product_strategy, simulate_game, single_system_assignment, DeterministicStrategy,
    GameStrategy, LhvModel,
};
use crate::ontology::{
    ks_response, load_model, orthodox_model, reproduces_quantum, sample_ks, SphereQuadrature,
};
use crate::phase_space::{
    condition_on_position, epr_state, evolve, fidelity, no_cloning_witness, random_rr_valid, rr_satisfied,
    symplectic_eigenvalues, uncertainty_product, GaussianMacrostate, Particle, SymplecticMatrix,
};
use crate::toy_theory::{
    agreement_probability, measure, measure_microstate, qubit_correspondence_report, sample_microstate, to_f64,
    Prob, ToyMacrostate, ToyMeasurement,
};
use crate::TOL_ALG;

/// Rounds per independently seeded chunk in sampled experiments.
const CHUNK: u64 = 1 << 16;

/// Offset between x₁ and x₂ in the EPR demo.
const EPR_OFFSET: f64 = 1.5;

pub(super) fn dispatch(c: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    match c.experiment {
        Experiment::Toy => toy(c),
        Experiment::Chsh(mode) => chsh(c, mode),
        Experiment::Ks(mode) => ks(c, mode),
        Experiment::Gaussian(mode) => gaussian(c, mode),
        Experiment::Hardy => hardy(c),
        Experiment::Pbr => pbr(c),
        Experiment::MachZehnder => Ok(mach_zehnder_rows()),
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(stream))
}

/// Splits `total` rounds into fixed chunks, each with its own seed, and sums
/// the per-chunk counters.
fn chunked<const K: usize, F>(seed: u64, total: u64, f: F) -> [u64; K]
where
    F: Fn(&mut ChaCha8Rng, u64) -> [u64; K] + Sync,
{
    (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| f(&mut rng_for(seed, chunk), CHUNK.min(total - chunk * CHUNK)))
        .reduce(|| [0; K], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        })
}

fn toy(c: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for r in qubit_correspondence_report()? {
        for k in 0..2 {
            rows.push(ReportRow::new(
                format!("P({}={k} | {})", r.measurement, r.state),
                Some(to_f64(r.qubit[k])),
                to_f64(r.toy[k]),
                0.0,
                r.toy[k] == r.qubit[k],
            ));
        }
    }

    let uniform = ToyMacrostate::uniform();
    let one = Prob::from_integer(1);
    let half = Prob::new(1, 2);
    for m in ToyMeasurement::ALL {
        let p = agreement_probability(&uniform, &[m, m], 0, 1);
        rows.push(ReportRow::new(format!("P(repeat {m} agrees)"), Some(1.0), to_f64(p), 0.0, p == one));
    }
    for (a, b) in [(ToyMeasurement::A, ToyMeasurement::B), (ToyMeasurement::B, ToyMeasurement::C), (ToyMeasurement::C, ToyMeasurement::A)] {
        let p = agreement_probability(&uniform, &[a, b, a], 0, 2);
        rows.push(ReportRow::new(format!("P({a} agrees across {a},{b},{a})"), Some(0.5), to_f64(p), 0.0, p == half));
    }

    let n = c.samples;
    let [repeat, agree, micro] = chunked(c.seed, n, |rng, rounds| {
        let mut counts = [0u64; 3];
        for _ in 0..rounds {
            let (o1, m1) = measure(&uniform, ToyMeasurement::A, rng);
            let (o_rep, _) = measure(&m1, ToyMeasurement::A, rng);
            let (_, m2) = measure(&m1, ToyMeasurement::B, rng);
            let (o3, _) = measure(&m2, ToyMeasurement::A, rng);
            counts[0] += u64::from(o1 == o_rep);
            counts[1] += u64::from(o1 == o3);
            let cell = sample_microstate(&uniform, rng);
            let (a1, cell) = measure_microstate(cell, ToyMeasurement::A, rng);
            let (_, cell) = measure_microstate(cell, ToyMeasurement::B, rng);
            let (a2, _) = measure_microstate(cell, ToyMeasurement::A, rng);
            counts[2] += u64::from(a1 == a2);
        }
        counts
    });
    let tol = 4.0 * (0.25 / n as f64).sqrt();
    rows.push(ReportRow::close("sampled P(repeat A agrees)", 1.0, repeat as f64 / n as f64, 0.0));
    rows.push(ReportRow::close("sampled P(A agrees across A,B,A)", 0.5, agree as f64 / n as f64, tol));
    rows.push(ReportRow::close("sampled microstate P(A agrees across A,B,A)", 0.5, micro as f64 / n as f64, tol));
    Ok(rows)
}

fn chsh(c: &ExperimentConfig, mode: ChshMode) -> Result<Vec<ReportRow>> {
    let quantum_value = (2.0 + SQRT_2) / 4.0;
    let rows = match mode {
        ChshMode::Enumerate => {
            let values: Vec<f64> = DeterministicStrategy::all().iter().map(evaluate_deterministic).collect();
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let optimal = values.iter().filter(|&&v| v == max).count();
            // Every strategy loses an odd number of the four questions.
            vec![
                ReportRow::close("max deterministic win probability", 0.75, max, 0.0),
                ReportRow::close("deterministic strategies attaining the maximum", 8.0, optimal as f64, 0.0),
                ReportRow::close("deterministic strategies enumerated", 16.0, values.len() as f64, 0.0),
            ]
        }
        ChshMode::Quantum => {
            let v = evaluate_quantum(&canonical_quantum_strategy())?;
            vec![
                ReportRow::close("quantum win probability", quantum_value, v, 1e-12),
                ReportRow::flag("quantum value exceeds 3/4", true, v > 0.75 + 1e-12),
            ]
        }
        ChshMode::LhvSweep => {
            let lhv_max = (0..c.trials as u64)
                .into_par_iter()
                .map(|i| evaluate_lhv(&LhvModel::random(&mut rng_for(c.seed, i), 8)))
                .reduce(|| f64::NEG_INFINITY, f64::max);
            let product_max = (0..c.trials as u64)
                .into_par_iter()
                .map(|i| evaluate_quantum(&random_product_strategy(&mut rng_for(c.seed ^ 0x5bd1_e995, i))))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            vec![
                ReportRow::at_most(format!("max win over {} random LHV models", c.trials), 0.75, lhv_max, 1e-12),
                ReportRow::at_most(format!("max win over {} product-state strategies", c.trials), 0.75, product_max, 1e-12),
            ]
        }
        ChshMode::Simulate => {
            let best = DeterministicStrategy::all()
                .into_iter()
                .find(|s| evaluate_deterministic(s) == 0.75)
                .expect("an optimal deterministic strategy exists");
            let strategies = [
                ("quantum", GameStrategy::Quantum(canonical_quantum_strategy())),
                ("deterministic", GameStrategy::Deterministic(best)),
            ];
            let mut rows = Vec::new();
            for (stream, (label, s)) in strategies.into_iter().enumerate() {
                let r = simulate_game(&s, c.samples, c.seed.wrapping_add((stream as u64) << 32))?;
                let tol = (4.0 * r.sigma).max(0.002);
                rows.push(ReportRow::close(format!("simulated {label} win frequency"), r.analytic, r.frequency, tol));
            }
            rows
        }
    };
    Ok(rows)
}

fn ks(c: &ExperimentConfig, mode: KsMode) -> Result<Vec<ReportRow>> {
    let quad = SphereQuadrature::new(c.resolution)?;
    let mut rng = rng_for(c.seed, 0);
    let rows = match mode {
        KsMode::BornCheck => {
            let pairs: Vec<(BlochVector, BlochVector)> =
                (0..c.pairs).map(|_| (BlochVector::random(&mut rng), BlochVector::random(&mut rng))).collect();
            let errors = pairs
                .par_iter()
                .map(|(psi, phi)| Ok((quad.ks_predicted(phi, psi) - born_bloch(phi, psi)?).abs()))
                .collect::<Result<Vec<f64>>>()?;
            let max = errors.iter().cloned().fold(0.0, f64::max);
            let (psi, phi) = pairs[0];
            let n = c.samples;
            let [yes] = chunked(c.seed.wrapping_add(1 << 32), n, |rng, rounds| {
                [(0..rounds).map(|_| u64::from(ks_response(&phi, &sample_ks(&psi, rng)))).sum()]
            });
            let born = born_bloch(&phi, &psi)?;
            let sigma = (born * (1.0 - born) / n as f64).sqrt();
            vec![
                ReportRow::new(format!("max |ks - born| over {} pairs", c.pairs), Some(0.0), max, 1e-3, max < 1e-3),
                ReportRow::close("sampled KS outcome frequency, first pair", born, yes as f64 / n as f64, (4.0 * sigma).max(1e-12)),
            ]
        }
        KsMode::Overlap => {
            let z = BlochVector::from_angles(0.0, 0.0);
            let mut rows: Vec<ReportRow> = (0..=4)
                .map(|k| {
                    let theta = k as f64 * FRAC_PI_4;
                    let other = BlochVector::from_angles(theta, 0.0);
                    // The distributions differ by sin(θ/2) in total variation.
                    ReportRow::close(
                        format!("ks overlap at angle {k}π/4"),
                        1.0 - (theta / 2.0).sin(),
                        quad.ks_overlap(&z, &other),
                        1e-3,
                    )
                })
                .collect();
            let asym = (0..c.pairs.min(20))
                .map(|_| {
                    let (a, b) = (BlochVector::random(&mut rng), BlochVector::random(&mut rng));
                    (quad.ks_overlap(&a, &b) - quad.ks_overlap(&b, &a)).abs()
                })
                .fold(0.0, f64::max);
            rows.push(ReportRow::close("max overlap asymmetry", 0.0, asym, 1e-12));
            rows
        }
    };
    Ok(rows)
}

fn gaussian(c: &ExperimentConfig, mode: GaussianMode) -> Result<Vec<ReportRow>> {
    let lambda = c.rr_scale;
    let lam = lambda.value();
    let s = c.squeeze;
    let rows = match mode {
        GaussianMode::Uncertainty => {
            let outcomes = (0..c.trials as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(c.seed, i);
                    let n = 1 + (i as usize % 3);
                    let g = random_rr_valid(n, lambda, &mut rng);
                    let valid = rr_satisfied(g.cov(), lambda)?.satisfied;
                    let product = uncertainty_product(&g).into_iter().fold(f64::INFINITY, f64::min);
                    let a = SymplecticMatrix::random(n, &mut rng);
                    let after = evolve(&g, &a)?;
                    let still_valid = rr_satisfied(after.cov(), lambda)?.satisfied;
                    let before_nu = symplectic_eigenvalues(g.cov())?[0];
                    let after_nu = symplectic_eigenvalues(after.cov())?[0];
                    Ok((valid, product, still_valid, ((after_nu - lam) - (before_nu - lam)).abs()))
                })
                .collect::<Result<Vec<_>>>()?;
            let all_valid = outcomes.iter().all(|o| o.0);
            let min_product = outcomes.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
            let preserved = outcomes.iter().all(|o| o.2);
            let drift = outcomes.iter().map(|o| o.3).fold(0.0, f64::max);

            let squeezed = evolve(&GaussianMacrostate::vacuum(1, lambda), &SymplecticMatrix::squeeze(1, 0, s)?)?;
            let sq_check = rr_satisfied(squeezed.cov(), lambda)?;
            vec![
                ReportRow::flag(format!("{} generated states are RR-valid", c.trials), true, all_valid),
                ReportRow::at_least("min Δx·Δp over generated states", lam, min_product, 1e-9),
                ReportRow::flag("RR restriction preserved under symplectic evolution", true, preserved),
                ReportRow::close("max drift of min symplectic eigenvalue − λ", 0.0, drift, 1e-9),
                ReportRow::close("Δx·Δp of squeezed minimum-uncertainty state", lam, uncertainty_product(&squeezed)[0], 1e-12),
                ReportRow::flag("squeezed state RR-valid", true, sq_check.satisfied)
                    .with_note(format!("margin {:.3e}", sq_check.margin)),
            ]
        }
        GaussianMode::NoCloning => {
            if lam <= 0.0 {
                return Err(Error::InvalidParameter("no-cloning demo needs rr_scale > 0".into()));
            }
            let f = GaussianMacrostate::vacuum(1, lambda);
            let g = f.displaced(&[1.0, 0.0])?;
            let far = f.displaced(&[100.0 * lam.sqrt(), 0.0])?;
            let expected = (-1.0 / (8.0 * lam)).exp();
            let w = no_cloning_witness(&f, &g)?;
            let drift = (0..c.trials.min(1000) as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(c.seed, i);
                    let a = random_rr_valid(2, lambda, &mut rng);
                    let b = random_rr_valid(2, lambda, &mut rng);
                    let sym = SymplecticMatrix::random(2, &mut rng);
                    Ok((fidelity(&a, &b)? - fidelity(&evolve(&a, &sym)?, &evolve(&b, &sym)?)?).abs())
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            vec![
                ReportRow::close("fidelity of unit-displaced minimum-uncertainty states", expected, w.fidelity, 1e-12),
                ReportRow::close("F² for the same pair", expected * expected, w.fidelity_sq, 1e-12),
                ReportRow::flag("cloning impossible for overlapping distinct states", true, w.cloning_impossible),
                ReportRow::flag("cloning impossible for identical states", false, no_cloning_witness(&f, &f)?.cloning_impossible),
                ReportRow::flag("cloning impossible for states 100σ apart", false, no_cloning_witness(&f, &far)?.cloning_impossible),
                ReportRow::close("max fidelity drift under symplectic evolution", 0.0, drift, 1e-9),
            ]
        }
        GaussianMode::Epr => {
            let e = epr_state(EPR_OFFSET, s)?;
            let g = e.cov();
            let check = rr_satisfied(g, lambda)?;
            let var_diff = g[(0, 0)] + g[(2, 2)] - 2.0 * g[(0, 2)];
            let var_psum = g[(1, 1)] + g[(3, 3)] + 2.0 * g[(1, 3)];
            let post = condition_on_position(&e, Particle::First, 0.0)?;
            let std = post.cov()[(0, 0)].sqrt();
            let scale = g.amax().max(1.0);
            // The Schur complement subtracts entries of size 1/(2s²), so the
            // posterior std carries round-off of order ε/s³.
            let std_tol = 1e-9f64.max(4.0 * f64::EPSILON / s.powi(3));
            vec![
                ReportRow::flag("EPR state RR-valid", true, check.satisfied).with_note(format!("margin {:.3e}", check.margin)),
                ReportRow::close("Var(x1 − x2)", s * s, var_diff, 1e-9),
                ReportRow::close("Var(p1 + p2)", s * s, var_psum, 1e-9),
                ReportRow::close("marginal Var(x2)", (s * s + 1.0 / (s * s)) / 4.0, g[(2, 2)], TOL_ALG * scale),
                ReportRow::close("posterior mean of x2 given x1 = 0", EPR_OFFSET, post.mean()[0], 1e-6),
                ReportRow::close("posterior std of x2 given x1 = 0", 1.0 / (s * s + 1.0 / (s * s)).sqrt(), std, std_tol),
                ReportRow::at_most("posterior std of x2 within 2s", 2.0 * s, std, 0.0),
            ]
        }
    };
    Ok(rows)
}

fn hardy(c: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let tol = 1e-9;
    if let Some(path) = &c.model {
        let m = c.m.ok_or_else(|| Error::InvalidParameter("hardy with --model needs --m".into()))?;
        let (model, bindings) = load_model(path)?;
        let qa = if bindings.is_empty() { hardy_assignment(m)? } else { bindings.assignment(&model)? };
        let v = hardy_check(&model, &qa, m, tol)?;
        let too_small = model.lambda_count() < usize::BITS as usize && (1usize << model.lambda_count()) < m;
        let note = v.witness.as_ref().map_or(String::new(), |w| w.to_string());
        return Ok(vec![ReportRow::new(
            format!("M={m}: supplied {}-state model accepted", model.lambda_count()),
            None,
            f64::from(u8::from(v.accepted())),
            0.0,
            !(v.accepted() && too_small),
        )
        .with_note(note)]);
    }
    let ms = c.m.map_or_else(|| vec![2, 4, 8, 16], |m| vec![m]);
    let mut rows = Vec::new();
    for m in ms {
        let qa = hardy_assignment(m)?;
        let v = hardy_check(&orthodox_model(&qa)?, &qa, m, tol)?;
        rows.push(
            ReportRow::flag(format!("M={m}: orthodox model accepted"), true, v.accepted())
                .with_note(format!("{} ontic states, {} distinct supports", v.lambda_count, v.distinct_support_count)),
        );
        for n in (1..).take_while(|&n: &usize| (1usize << n) < m) {
            let v = hardy_check(&cycled_subset_model(m, n)?, &qa, m, tol)?;
            let note = v.witness.as_ref().map_or(String::new(), |w| w.to_string());
            rows.push(ReportRow::flag(format!("M={m}: {n}-state model rejected"), true, !v.accepted()).with_note(note));
        }
    }
    Ok(rows)
}

fn pbr(c: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let tol = 1e-12;
    let basis = pbr_basis();
    let mut ortho: f64 = 0.0;
    for (i, u) in basis.vectors().iter().enumerate() {
        for (j, v) in basis.vectors().iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((u.inner(v)? - target).norm());
        }
    }
    let mut excluded: f64 = 0.0;
    for (o, (_, psi)) in pbr_preparations().iter().enumerate() {
        excluded = excluded.max(basis.vector(o).overlap_sq(psi)?);
    }
    let mut rows = vec![
        ReportRow::close("PBR basis orthonormality deviation", 0.0, ortho, 1e-12),
        ReportRow::close("max |<Φjk|Ψjk>|²", 0.0, excluded, 1e-12),
    ];

    if let Some(path) = &c.model {
        let (model, bindings) = load_model(path)?;
        if !bindings.is_empty() {
            let qa = bindings.assignment(&model)?;
            let repro = reproduces_quantum(&model, &qa, 1e-9)?;
            rows.push(ReportRow::new(
                "supplied model reproduces single-system statistics",
                None,
                f64::from(u8::from(repro.passes())),
                1e-9,
                true,
            ));
        }
        let r = pbr_contradiction(&model, tol)?;
        rows.push(ReportRow::new("supplied model P*", None, r.p_star, tol, true));
        rows.push(ReportRow::at_least("supplied model deficit ≥ P*²", r.p_star * r.p_star, r.deficit, 1e-9));
        rows.push(ReportRow::new(
            "supplied model contradicts the PBR prediction",
            None,
            f64::from(u8::from(r.inconsistent_with_quantum)),
            0.0,
            true,
        ));
        return Ok(rows);
    }

    let reports = (0..c.trials as u64)
        .into_par_iter()
        .map(|i| pbr_contradiction(&random_overlapping_model(&mut rng_for(c.seed, i)), tol))
        .collect::<Result<Vec<_>>>()?;
    let margin = reports.iter().map(|r| r.deficit - r.p_star * r.p_star).fold(f64::INFINITY, f64::min);
    let all = reports.iter().all(|r| r.inconsistent_with_quantum);
    let orthodox = pbr_contradiction(&orthodox_model(&single_system_assignment())?, tol)?;
    let cos2 = (PI / 8.0).cos().powi(2);
    rows.push(ReportRow::at_least(format!("min deficit − P*² over {} overlapping models", c.trials), 0.0, margin, 1e-9));
    rows.push(ReportRow::flag("every overlapping model contradicts quantum predictions", true, all));
    rows.push(ReportRow::flag("orthodox model contradicts quantum predictions", false, orthodox.inconsistent_with_quantum));
    rows.push(ReportRow::close("copies until cos²(π/8)ⁿ < 1/2", 5.0, f64::from(moseley_copies(cos2)?), 0.0));
    Ok(rows)
}

fn mach_zehnder_rows() -> Vec<ReportRow> {
    let with = mach_zehnder(true);
    let without = mach_zehnder(false);
    vec![
        ReportRow::close("P(D0) with second beamsplitter", 1.0, with[0], 1e-12),
        ReportRow::close("P(D1) with second beamsplitter", 0.0, with[1], 1e-12),
        ReportRow::close("P(D0) without second beamsplitter", 0.5, without[0], 1e-12),
        ReportRow::close("P(D1) without second beamsplitter", 0.5, without[1], 1e-12),
    ]
}
