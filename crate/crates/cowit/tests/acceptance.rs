//! End-to-end acceptance checks.
//!
//! Each test exercises one advertised guarantee on a sizeable random or
//! adversarial corpus, asserts it with pinned tolerances, and prints a
//! one-line summary (run with `--nocapture` to see all of them).

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cowit::compare::{self, StateVerdict, WitnessVerdict};
use cowit::mat::dephase;
use cowit::oracle;
use cowit::robustness;
use cowit::witness;
use cowit::{CoherenceWitness, DensityMatrix, HermitianMatrix};

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Interior simplex weights: a floor of `0.6 / n` plus a random bump.
fn interior_weights(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let bumps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1f64..1.0)).collect();
    let total: f64 = bumps.iter().sum();
    bumps.iter().map(|b| 0.6 / n as f64 + 0.4 * b / total).collect()
}

/// Builds `n` witnesses admitting a positive semidefinite combination at
/// interior weights: the first absorbs a strictly positive diagonal
/// target minus the random rest, so the target itself is the certificate.
fn plant_admissible_tuple(dim: usize, n: usize, rng: &mut impl Rng) -> Vec<CoherenceWitness> {
    loop {
        let others: Vec<CoherenceWitness> =
            (1..n).map(|_| oracle::random_witness(dim, rng)).collect();
        let t = interior_weights(n, rng);
        let target: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.02f64..0.05)).collect();
        let diag = HermitianMatrix::from_diagonal(&target);
        let mut terms: Vec<(f64, &HermitianMatrix)> = vec![(1.0 / t[0], &diag)];
        for (k, w) in others.iter().enumerate() {
            terms.push((-t[k + 1] / t[0], w.matrix()));
        }
        let first = HermitianMatrix::linear_combination(&terms);
        if let Ok(w) = witness::validate(first) {
            let mut tuple = vec![w.normalize()];
            tuple.extend(others);
            return tuple;
        }
    }
}

/// A random full-rank incoherent state (probabilities bounded away from
/// zero) plus a traceless coherent perturbation scaled so that both
/// `delta + c E` and `delta - r c E` stay positive semidefinite.
fn planted_state_pair(
    dim: usize,
    t: f64,
    rng: &mut impl Rng,
) -> (DensityMatrix, DensityMatrix, f64) {
    loop {
        let bumps: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1f64..1.0)).collect();
        let total: f64 = bumps.iter().sum();
        let probs: Vec<f64> =
            bumps.iter().map(|b| 0.5 / dim as f64 + 0.5 * b / total).collect();
        let delta = HermitianMatrix::from_diagonal(&probs);
        let g = oracle::random_hermitian(dim, rng);
        let e = g.sub(&g.dephased());
        if e.operator_norm() < 1e-6 {
            continue;
        }
        let floor = probs.iter().copied().fold(f64::INFINITY, f64::min);
        let ratio = t / (1.0 - t);
        let scale = 0.4 * floor / (e.operator_norm() * ratio.max(1.0));
        let rho1 = DensityMatrix::new(delta.add(&e.scaled(scale))).expect("shift below gap");
        let rho2 =
            DensityMatrix::new(delta.sub(&e.scaled(scale * ratio))).expect("shift below gap");
        return (rho1, rho2, scale);
    }
}

#[test]
fn witness_axioms_hold_for_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0001);
    let mut worst_pairing = f64::INFINITY;
    let mut worst_eigenvalue = f64::NEG_INFINITY;
    for k in 0..500 {
        let dim = 2 + k % 7;
        let w = if k % 2 == 0 {
            oracle::random_witness(dim, &mut rng)
        } else {
            oracle::random_lifted_witness(dim, &mut rng)
        };
        worst_eigenvalue = worst_eigenvalue.max(w.min_eigenvalue());
        let delta = oracle::random_incoherent_state(dim, &mut rng);
        let report = w.detect(&delta.to_density()).expect("matching dimensions");
        assert!(report.value >= -1e-10, "witness {k} flagged an incoherent state");
        assert!(!report.detected);
        worst_pairing = worst_pairing.min(report.value);
    }
    assert!(worst_eigenvalue <= -1e-9, "a witness lost its negative eigenvalue");
    println!(
        "[acceptance 01] witness axioms hold for random instances: PASS \
         (500 witnesses x 500 incoherent states, min pairing {worst_pairing:.3e}, \
         max bottom eigenvalue {worst_eigenvalue:.3e})"
    );
}

#[test]
fn dephasing_witness_flags_only_its_coherence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0002);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let dim = 2 + k % 5;
        let rho = oracle::random_coherent_density(dim, &mut rng);
        let w = witness::dephasing_witness(&rho).expect("coherent input");
        assert!(w.is_optimal(), "dephasing witness grew a diagonal");
        let value = w.detect(&rho).expect("same dimension").value;
        let expected = -rho.matrix().off_diagonal_sq_norm();
        worst = worst.max((value - expected).abs());
    }
    assert!(worst <= 1e-10);
    println!(
        "[acceptance 02] dephasing witness flags exactly its coherence weight: PASS \
         (200 states, max deviation {worst:.3e})"
    );
}

#[test]
fn geometric_and_dephasing_constructions_are_proportional() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0003);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let dim = 2 + k % 5;
        let rho = oracle::random_coherent_density(dim, &mut rng);
        let geometric = witness::geometric_witness(&rho).expect("coherent input");
        let dephasing = witness::dephasing_witness(&rho).expect("coherent input");
        let distance = rho.matrix().sub(&dephase(rho.matrix())).frobenius_norm();
        for (g, w) in geometric.matrix().entries().iter().zip(dephasing.matrix().entries()) {
            worst = worst.max((g - w / distance).norm());
        }
        let value = geometric.detect(&rho).expect("same dimension").value;
        worst = worst.max((value + distance).abs());
    }
    assert!(worst <= 1e-9);
    println!(
        "[acceptance 03] geometric and dephasing constructions are proportional: PASS \
         (200 states, max entry deviation {worst:.3e})"
    );
}

#[test]
fn pairwise_witness_verdicts_match_grid_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0004);
    let mut marginal = 0usize;
    let mut admissible = 0usize;
    for k in 0..200 {
        let dim = 2 + k % 3;
        let pair: Vec<CoherenceWitness> = if k % 2 == 0 {
            plant_admissible_tuple(dim, 2, &mut rng)
        } else {
            (0..2).map(|_| oracle::random_witness(dim, &mut rng)).collect()
        };
        let report = compare::compare_witnesses(&pair).expect("valid pair");
        let grid = oracle::grid_pairwise_psd_search(&pair[0], &pair[1], 1e-3);
        match report.verdict {
            WitnessVerdict::Incomparable => {
                admissible += 1;
                assert!(
                    grid.is_some(),
                    "pair {k}: solver found a nonnegative combination, grid did not \
                     (optimum {:.3e})",
                    report.optimum
                );
            }
            WitnessVerdict::Comparable => {
                assert!(
                    grid.is_none(),
                    "pair {k}: grid found a nonnegative combination at t = {:?}, \
                     solver did not (optimum {:.3e})",
                    grid,
                    report.optimum
                );
            }
            WitnessVerdict::Marginal => marginal += 1,
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(marginal <= 10, "too many undecided pairs: {marginal} / 200");
    assert!(elapsed < 60.0, "verdict sweep took {elapsed:.1}s");
    println!(
        "[acceptance 04] pairwise witness verdicts match the grid oracle: PASS \
         (200 pairs, {admissible} with common nonnegative combination, \
         {marginal} undecided, {elapsed:.1}s)"
    );
}

#[test]
fn joint_witness_verdicts_carry_checkable_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0005);
    let mut marginal = 0usize;
    let mut detected_counts = (0usize, 0usize);
    for k in 0..100 {
        let dim = 2 + k % 3;
        let n = 3 + k % 2;
        let tuple: Vec<CoherenceWitness> = if k % 2 == 0 {
            plant_admissible_tuple(dim, n, &mut rng)
        } else {
            (0..n).map(|_| oracle::random_witness(dim, &mut rng)).collect()
        };
        let report = compare::compare_witnesses(&tuple).expect("valid tuple");
        match report.verdict {
            WitnessVerdict::Incomparable => {
                detected_counts.0 += 1;
                let weights = report.psd_certificate.expect("certificate accompanies verdict");
                let terms: Vec<(f64, &HermitianMatrix)> = weights
                    .weights()
                    .iter()
                    .copied()
                    .zip(tuple.iter().map(|w| w.matrix()))
                    .collect();
                let combo = HermitianMatrix::linear_combination(&terms);
                assert!(
                    combo.min_eigenpair().0 >= -1e-9,
                    "tuple {k}: certificate combination is not positive semidefinite"
                );
                assert!(
                    oracle::sample_common_detection(&tuple, 10_000, 0xACC0_5A11 + k as u64)
                        .is_none(),
                    "tuple {k}: sampling found a commonly detected state"
                );
            }
            WitnessVerdict::Comparable => {
                detected_counts.1 += 1;
                let rho = report.common_state.expect("state accompanies verdict");
                for (i, w) in tuple.iter().enumerate() {
                    let value = w.detect(&rho).expect("same dimension").value;
                    assert!(value <= -1e-8, "tuple {k}: witness {i} missed the common state");
                }
            }
            WitnessVerdict::Marginal => marginal += 1,
        }
    }
    assert!(marginal <= 5, "too many undecided tuples: {marginal} / 100");
    println!(
        "[acceptance 05] joint witness verdicts carry checkable certificates: PASS \
         (100 tuples, {} with nonnegative combination, {} with common state, {marginal} undecided)",
        detected_counts.0, detected_counts.1
    );
}

#[test]
fn planted_mixture_weight_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0006);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let dim = 2 + k % 3;
        let t = rng.gen_range(0.2f64..0.8);
        let (rho1, rho2, _) = planted_state_pair(dim, t, &mut rng);
        let report = compare::compare_two_states(&rho1, &rho2).expect("coherent inputs");
        assert_eq!(
            report.verdict,
            StateVerdict::Incomparable,
            "pair {k}: planted mixture went undetected"
        );
        let weights = report.mixture_certificate.expect("certificate accompanies verdict");
        worst = worst.max((weights.weights()[0] - t).abs());
    }
    assert!(worst <= 1e-6, "recovered weight drifted by {worst:.3e}");

    // The symmetric case pins the weight to one half essentially exactly.
    let (rho1, rho2, _) = planted_state_pair(4, 0.5, &mut rng);
    let report = compare::compare_two_states(&rho1, &rho2).expect("coherent inputs");
    let weights = report.mixture_certificate.expect("certificate accompanies verdict");
    let symmetric_err = (weights.weights()[0] - 0.5).abs();
    assert!(symmetric_err <= 1e-12);
    println!(
        "[acceptance 06] planted mixture weight is recovered: PASS \
         (200 pairs, max weight error {worst:.3e}, symmetric pair error {symmetric_err:.3e})"
    );
}

#[test]
fn symmetric_qutrit_triple_mixes_to_incoherent() {
    // Coherences proportional to the three cube roots of unity cancel
    // only at uniform weights.
    let omega = c(-0.5, 0.75f64.sqrt());
    let states: Vec<DensityMatrix> = (0u32..3)
        .map(|k| {
            let z = omega.powu(k) * 0.2;
            DensityMatrix::new(
                HermitianMatrix::from_rows(&[
                    vec![r(0.4), z, r(0.0)],
                    vec![z.conj(), r(0.4), r(0.0)],
                    vec![r(0.0), r(0.0), r(0.2)],
                ])
                .expect("square rows"),
            )
            .expect("valid state")
        })
        .collect();
    let report = compare::compare_states(&states).expect("coherent inputs");
    assert_eq!(report.verdict, StateVerdict::Incomparable);
    let weights = report.mixture_certificate.expect("certificate accompanies verdict");
    let mut worst_weight = 0.0f64;
    for &w in weights.weights() {
        worst_weight = worst_weight.max((w - 1.0 / 3.0).abs());
    }
    assert!(worst_weight <= 1e-8);
    let terms: Vec<(f64, &HermitianMatrix)> = weights
        .weights()
        .iter()
        .copied()
        .zip(states.iter().map(|s| s.matrix()))
        .collect();
    let residue = HermitianMatrix::linear_combination(&terms).off_diagonal_sq_norm().sqrt();
    assert!(residue <= 1e-12);
    println!(
        "[acceptance 07] symmetric qutrit triple mixes to incoherent: PASS \
         (weights within {worst_weight:.3e} of 1/3, residual coherence {residue:.3e})"
    );
}

#[test]
fn robustness_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0008);
    let mut slowest = 0.0f64;
    let mut timed = |rho: &DensityMatrix| {
        let started = Instant::now();
        let result = robustness::robustness(rho);
        slowest = slowest.max(started.elapsed().as_secs_f64());
        result
    };

    // Qubits: twice the coherence magnitude.
    let mut worst_qubit = 0.0f64;
    for _ in 0..100 {
        let p = rng.gen_range(0.05f64..0.95);
        let cap = (p * (1.0 - p)).sqrt() * 0.95;
        let z = loop {
            let z = c(rng.gen_range(-cap..cap), rng.gen_range(-cap..cap));
            if z.norm() > 1e-3 && z.norm() < cap {
                break z;
            }
        };
        let rho = DensityMatrix::new(
            HermitianMatrix::from_rows(&[vec![r(p), z], vec![z.conj(), r(1.0 - p)]])
                .expect("square rows"),
        )
        .expect("valid state");
        worst_qubit = worst_qubit.max((timed(&rho).value - 2.0 * z.norm()).abs());
    }
    assert!(worst_qubit <= 1e-7);

    // Uniform-superposition states: dimension minus one.
    let mut worst_uniform = 0.0f64;
    for dim in 2..=8 {
        let rho = DensityMatrix::maximally_coherent(dim);
        worst_uniform = worst_uniform.max((timed(&rho).value - (dim as f64 - 1.0)).abs());
    }
    assert!(worst_uniform <= 1e-5);

    // Random pure states against the amplitude formula.
    let mut worst_pure = 0.0f64;
    for k in 0..100 {
        let dim = 2 + k % 5;
        let psi = oracle::haar_pure_state(dim, &mut rng);
        let expected = robustness::pure_state_robustness(&psi).expect("unit vector");
        let rho = DensityMatrix::pure(&psi).expect("unit vector");
        worst_pure = worst_pure.max((timed(&rho).value - expected).abs());
    }
    assert!(worst_pure <= 1e-5);
    assert!(slowest < 1.0, "a single solve took {slowest:.2}s");
    println!(
        "[acceptance 08] robustness matches closed forms: PASS \
         (qubit max error {worst_qubit:.3e}, uniform max error {worst_uniform:.3e}, \
         pure max error {worst_pure:.3e}, slowest solve {slowest:.3}s)"
    );
}

#[test]
fn robustness_minimizer_is_incomparable_with_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0009);
    let mut checked = 0usize;
    while checked < 50 {
        let dim = 2 + checked % 3;
        let rho = oracle::random_coherent_density(dim, &mut rng);
        if robustness::robustness(&rho).value <= 1e-3 {
            continue;
        }
        let verdict = robustness::verify_minimizer_incomparable(&rho);
        assert!(
            matches!(verdict, Ok(true)),
            "state {checked}: minimizer check came back {verdict:?}"
        );
        checked += 1;
    }
    println!(
        "[acceptance 09] robustness minimizer is incomparable with its input: PASS \
         (50 states, dimensions 2 through 4)"
    );
}

#[test]
fn comparable_state_pairs_yield_common_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_000A);
    let mut comparable = 0usize;
    let mut other = 0usize;
    for k in 0..200 {
        let dim = 2 + k % 3;
        let rho1 = oracle::random_coherent_density(dim, &mut rng);
        let rho2 = oracle::random_coherent_density(dim, &mut rng);
        let report = compare::compare_two_states(&rho1, &rho2).expect("coherent inputs");
        if report.verdict == StateVerdict::Comparable {
            comparable += 1;
            let w = report.common_witness.expect("witness accompanies verdict");
            assert!(w.detect(&rho1).expect("same dimension").detected, "pair {k}");
            assert!(w.detect(&rho2).expect("same dimension").detected, "pair {k}");
        } else {
            other += 1;
        }
    }
    // Independent draws should essentially never admit an incoherent
    // mixture, so the comparable branch must dominate.
    assert!(comparable >= 190, "only {comparable} / 200 pairs were comparable");

    // A pair built so that the evenly weighted witness misses the second
    // state: the reweighted retry has to close the gap.
    let rho1 = DensityMatrix::new(
        HermitianMatrix::from_rows(&[
            vec![r(0.4), r(0.2), r(0.0)],
            vec![r(0.2), r(0.3), r(0.0)],
            vec![r(0.0), r(0.0), r(0.3)],
        ])
        .expect("square rows"),
    )
    .expect("valid state");
    let rho2 = DensityMatrix::new(
        HermitianMatrix::from_rows(&[
            vec![r(0.4), r(-0.18), r(0.05)],
            vec![r(-0.18), r(0.3), r(0.0)],
            vec![r(0.05), r(0.0), r(0.3)],
        ])
        .expect("square rows"),
    )
    .expect("valid state");
    let uniform = compare::common_witness(&[rho1.clone(), rho2.clone()], None);
    assert!(
        matches!(uniform, Err(cowit::Error::NotDetected { index: 1, .. })),
        "even weights unexpectedly worked: {uniform:?}"
    );
    let report = compare::compare_two_states(&rho1, &rho2).expect("coherent inputs");
    assert_eq!(report.verdict, StateVerdict::Comparable);
    let w = report.common_witness.expect("witness accompanies verdict");
    assert!(w.detect(&rho1).expect("same dimension").detected);
    assert!(w.detect(&rho2).expect("same dimension").detected);
    println!(
        "[acceptance 10] comparable state pairs yield a common witness: PASS \
         (200 pairs: {comparable} comparable, {other} other; reweighted retry exercised)"
    );
}
