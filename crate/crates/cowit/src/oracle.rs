//! Brute-force checks and seeded random instances.
//!
//! Everything here goes through the public eigensolver and trace
//! primitives only — no shared code with the comparability or robustness
//! solvers — so these routines can serve as independent cross-checks in
//! tests. Sampling is deterministic: callers pass either an explicit RNG
//! or a seed, and seeded searches derive one counter-based stream per
//! trial, so trial `k` produces the same candidate no matter how many
//! trials run in total.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::mat::{DensityMatrix, HermitianMatrix, IncoherentState};
use crate::witness::{dephasing_witness, is_coherent, validate, CoherenceWitness};

/// PSD slack matching the solver-side verdict threshold.
const PSD_TOL: f64 = 1e-9;
/// A mixture counts as incoherent when its off-diagonal Frobenius norm
/// falls below this.
const MIXTURE_TOL: f64 = 1e-6;

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Exponential spacings normalized to sum 1: uniform on the simplex.
fn dirichlet_flat(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..n)
        .map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let total: f64 = draws.iter().sum();
    for d in &mut draws {
        *d /= total;
    }
    draws
}

/// A Haar-random unit vector: normalized complex Gaussian amplitudes.
pub fn haar_pure_state(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let mut psi: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for z in &mut psi {
                *z /= norm;
            }
            return psi;
        }
    }
}

/// A full-rank random state `G G^dag / tr(G G^dag)` with Gaussian `G`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g: Vec<Complex64> = (0..dim * dim).map(|_| gaussian(rng)).collect();
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            rows[i][j] = (0..dim).map(|k| g[i * dim + k] * g[j * dim + k].conj()).sum();
        }
    }
    let trace: f64 = (0..dim).map(|i| rows[i][i].re).sum();
    for row in &mut rows {
        for entry in row.iter_mut() {
            *entry /= trace;
        }
    }
    let mat = HermitianMatrix::from_rows(&rows).expect("square Gaussian product");
    DensityMatrix::new(mat).expect("Gram matrix of Gaussian rows is a valid state")
}

/// Like [`random_density`], resampling until the state carries coherence.
pub fn random_coherent_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    loop {
        let rho = random_density(dim, rng);
        if is_coherent(&rho) {
            return rho;
        }
    }
}

/// A uniform sample from the probability simplex, as a diagonal state.
pub fn random_incoherent_state(dim: usize, rng: &mut impl Rng) -> IncoherentState {
    IncoherentState::new(dirichlet_flat(dim, rng)).expect("normalized spacings")
}

/// A Gaussian Hermitian matrix (real Gaussian diagonal, complex Gaussian
/// off-diagonal entries).
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        rows[i][i] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for j in i + 1..dim {
            let z = gaussian(rng);
            rows[i][j] = z;
            rows[j][i] = z.conj();
        }
    }
    HermitianMatrix::from_rows(&rows).expect("Hermitian by construction")
}

/// A normalized witness with zero diagonal, built by dephasing a random
/// coherent state.
pub fn random_witness(dim: usize, rng: &mut impl Rng) -> CoherenceWitness {
    let rho = random_coherent_density(dim, rng);
    dephasing_witness(&rho).expect("input sampled coherent").normalize()
}

/// A witness with a strictly positive random diagonal, built by lifting a
/// zero-diagonal witness until just before its negative eigenvalue would
/// disappear. Falls back to the unlifted witness if every tried lift
/// swallows the negative part.
pub fn random_lifted_witness(dim: usize, rng: &mut impl Rng) -> CoherenceWitness {
    let rho = random_coherent_density(dim, rng);
    let base = dephasing_witness(&rho).expect("input sampled coherent");
    let lift: Vec<f64> =
        (0..dim).map(|_| rng.gen::<f64>() * 0.3 * base.operator_norm()).collect();
    let mut scale = 1.0;
    for _ in 0..80 {
        let shifted: Vec<f64> = lift.iter().map(|d| d * scale).collect();
        let mat = base.matrix().add(&HermitianMatrix::from_diagonal(&shifted));
        if let Ok(w) = validate(mat) {
            return w;
        }
        scale *= 0.5;
    }
    base
}

/// Scans `t W1 + (1-t) W2` over a uniform grid on `[0, 1]` and returns the
/// first weight whose combination is PSD (smallest eigenvalue >= -1e-9),
/// or `None` when no grid point is.
///
/// # Panics
///
/// When `step` is outside `(0, 0.1]` or the witnesses differ in dimension.
pub fn grid_pairwise_psd_search(
    w1: &CoherenceWitness,
    w2: &CoherenceWitness,
    step: f64,
) -> Option<f64> {
    assert!(step > 0.0 && step <= 0.1, "grid step must lie in (0, 0.1]");
    assert_eq!(w1.dim(), w2.dim(), "witness dimensions must match");
    let steps = (1.0 / step).round() as usize;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let combo =
            HermitianMatrix::linear_combination(&[(t, w1.matrix()), (1.0 - t, w2.matrix())]);
        if combo.min_eigenpair().0 >= -PSD_TOL {
            return Some(t);
        }
    }
    None
}

/// Hunts for a state every witness detects, alternating Haar-random pure
/// states (even trials) with random mixtures of `2 * dim` pure states
/// (odd trials). Trial `k` draws from stream `k` of a ChaCha generator
/// seeded with `seed`, so results are reproducible and independent of
/// `trials`.
///
/// # Panics
///
/// When `witnesses` is empty or its dimensions disagree.
pub fn sample_common_detection(
    witnesses: &[CoherenceWitness],
    trials: usize,
    seed: u64,
) -> Option<DensityMatrix> {
    assert!(!witnesses.is_empty(), "need at least one witness");
    let dim = witnesses[0].dim();
    assert!(witnesses.iter().all(|w| w.dim() == dim), "witness dimensions must match");
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let rho = if trial % 2 == 0 {
            DensityMatrix::pure(&haar_pure_state(dim, &mut rng)).expect("unit vector")
        } else {
            let weights = dirichlet_flat(2 * dim, &mut rng);
            let pures: Vec<HermitianMatrix> = (0..2 * dim)
                .map(|_| HermitianMatrix::outer(&haar_pure_state(dim, &mut rng)))
                .collect();
            let terms: Vec<(f64, &HermitianMatrix)> =
                weights.iter().copied().zip(pures.iter()).collect();
            DensityMatrix::new(HermitianMatrix::linear_combination(&terms))
                .expect("convex mixture of pure states")
        };
        if witnesses.iter().all(|w| w.detect(&rho).expect("dims checked").detected) {
            return Some(rho);
        }
    }
    None
}

/// Scans mixtures `t rho1 + (1-t) rho2` over the open interval `(0, 1)`
/// and returns the weight minimizing the off-diagonal Frobenius norm,
/// provided that minimum is below 1e-6; `None` otherwise.
///
/// # Panics
///
/// When `step` is outside `(0, 0.1]` or the states differ in dimension.
pub fn grid_mixture_search(rho1: &DensityMatrix, rho2: &DensityMatrix, step: f64) -> Option<f64> {
    assert!(step > 0.0 && step <= 0.1, "grid step must lie in (0, 0.1]");
    assert_eq!(rho1.dim(), rho2.dim(), "state dimensions must match");
    let steps = (1.0 / step).round() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 1..steps {
        let t = k as f64 / steps as f64;
        let mix =
            HermitianMatrix::linear_combination(&[(t, rho1.matrix()), (1.0 - t, rho2.matrix())]);
        let off = mix.off_diagonal_sq_norm().sqrt();
        if off < best.0 {
            best = (off, t);
        }
    }
    if best.0 <= MIXTURE_TOL {
        Some(best.1)
    } else {
        None
    }
}
