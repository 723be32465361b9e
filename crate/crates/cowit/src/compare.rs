//! Decision procedures for whether witnesses or states share detections.
//!
//! Two questions drive this module, and both come with machine-checkable
//! certificates:
//!
//! * **Witness side** — do several witnesses detect a common state? They
//!   fail to exactly when some convex combination of them is positive
//!   semidefinite, so [`compare_witnesses`] maximizes the smallest
//!   eigenvalue of the combination over the weight simplex. A maximizer
//!   with nonnegative smallest eigenvalue certifies *incomparable* (no
//!   common detection); a certified negative upper bound yields a common
//!   detected state, built from the dual of the cutting-plane master.
//!
//! * **State side** — are several coherent states detected by a common
//!   witness? They are exactly when no convex mixture with all weights
//!   strictly interior dephases to an incoherent state, so
//!   [`compare_states`] solves the mixture equations and maximizes the
//!   smallest weight over the solution set. The interior mixture itself is
//!   the *incomparable* certificate; otherwise a combination of dephasing
//!   witnesses detects every input.
//!
//! Verdicts are tri-state: optima inside a narrow tolerance band, or
//! certificates that fail their own verification, come back as `Marginal`
//! (or `DegenerateBoundary` on the state side, when the only incoherent
//! mixture sits on the simplex boundary) rather than forcing a call either
//! way.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mat::{trace_pair, DensityMatrix, HermitianMatrix};
use crate::simplex::{minimize, Constraint, LpOutcome, Relation};
use crate::witness::{is_coherent, validate, CoherenceWitness};

/// Weight vectors may dip this far below zero / deviate from sum 1.
const WEIGHT_TOL: f64 = 1e-10;
/// Combinations with smallest eigenvalue at or above minus this are PSD.
const PSD_TOL: f64 = 1e-9;
/// Certified upper bounds below minus this rule out any PSD combination.
const NEGATIVE_TOL: f64 = 1e-7;
/// Extracted common states must beat this detection value on every input.
const CERT_DETECTION_TOL: f64 = 1e-8;
/// The cutting-plane loop stops at this gap (relative to operator norms).
const GAP_TOL: f64 = 1e-9;
/// Cutting-plane iteration budget.
const MAX_CUT_ROUNDS: usize = 300;
/// Supergradient warm-start iterations before cutting planes take over.
const WARM_START_ITERS: usize = 80;
/// Active cuts are pruned back to this many when they pile up.
const CUT_KEEP: usize = 120;
/// Eigenvectors within this of the smallest eigenvalue also contribute cuts.
const DEGENERACY_BAND: f64 = 1e-8;
/// Mixture weights this close to 0 or 1 sit on the simplex boundary.
const INTERIOR_TOL: f64 = 1e-9;
/// Pairwise mixture ratios must agree across entries within this.
const RATIO_TOL: f64 = 1e-8;
/// Matrix entries below this magnitude are treated as absent coherences.
const ENTRY_TOL: f64 = 1e-12;
/// A verified incoherent mixture must dephase to within this Frobenius norm.
const MIXTURE_CHECK_TOL: f64 = 1e-8;
/// Seed for the deterministic restart states of the extraction fallback.
const EXTRACTION_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// A point on the probability simplex: nonnegative weights summing to 1.
///
/// Construction clamps round-off negatives (down to -1e-10) and
/// renormalizes, so stored weights sum to 1 exactly up to one division.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let mut w = weights;
        for (i, x) in w.iter_mut().enumerate() {
            if *x < -WEIGHT_TOL {
                return Err(Error::NegativeProbability { index: i, value: *x });
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::ProbabilitySumNotOne(sum));
        }
        for x in &mut w {
            *x /= sum;
        }
        Ok(Self(w))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of the witness-side decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessVerdict {
    /// Some convex combination of the witnesses is PSD: no state is
    /// detected by all of them.
    Incomparable,
    /// Every combination keeps a negative eigenvalue: a common detected
    /// state exists (and is attached).
    Comparable,
    /// The optimum falls inside the tolerance band, or a certificate
    /// failed verification; neither call can be made honestly.
    Marginal,
}

/// Outcome of the state-side decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateVerdict {
    /// An interior convex mixture of the states is incoherent: no witness
    /// detects all of them.
    Incomparable,
    /// No mixture dephases: a common detecting witness exists (attached).
    Comparable,
    /// A certificate fell in the tolerance band or failed verification.
    Marginal,
    /// The only incoherent mixtures sit on the boundary of the weight
    /// simplex (some weights vanish), where neither certificate applies.
    DegenerateBoundary,
}

/// Verdict plus certificates for a family of witnesses.
///
/// `optimum` is the best *evaluated* smallest eigenvalue over the weight
/// simplex. For `Incomparable` the weights achieving it are attached; for
/// `Comparable` a state detected by every witness is. A `Marginal` result
/// carries whichever candidates were found, unverified, for inspection.
#[derive(Debug, Clone)]
pub struct WitnessComparability {
    pub verdict: WitnessVerdict,
    pub optimum: f64,
    pub psd_certificate: Option<SimplexWeights>,
    pub common_state: Option<DensityMatrix>,
}

/// Verdict plus certificates for a family of states.
///
/// `Incomparable` attaches the interior incoherent mixture,
/// `Comparable` the common detecting witness (normalized), and
/// `DegenerateBoundary` the boundary mixture together with the indices of
/// its vanishing weights. `Marginal` carries unverified candidates.
#[derive(Debug, Clone)]
pub struct StateComparability {
    pub verdict: StateVerdict,
    pub mixture_certificate: Option<SimplexWeights>,
    pub common_witness: Option<CoherenceWitness>,
    pub boundary_subset: Option<Vec<usize>>,
}

// ---------------------------------------------------------------------------
// Max-min eigenvalue over the weight simplex.

/// One linearization of the smallest eigenvalue: for a unit vector `v`,
/// `lambda_min(sum_i t_i W_i) <= sum_i t_i <v|W_i|v>` for every `t`.
struct Cut {
    vector: Vec<Complex64>,
    gains: Vec<f64>,
}

/// Smallest eigenvalue of `sum_i t_i W_i`, plus cuts from every
/// eigenvector within `band` of the bottom (at most three).
fn evaluate(mats: &[&HermitianMatrix], t: &[f64], band: f64) -> (f64, Vec<Cut>) {
    let terms: Vec<(f64, &HermitianMatrix)> = t.iter().copied().zip(mats.iter().copied()).collect();
    let combo = HermitianMatrix::linear_combination(&terms);
    let eig = combo.eig();
    let min = eig.min_eigenvalue();
    let mut cuts = Vec::new();
    for k in 0..combo.dim() {
        if eig.eigenvalues()[k] > min + band || cuts.len() == 3 {
            break;
        }
        let v = eig.eigenvector(k).to_vec();
        let gains = mats.iter().map(|m| m.expectation(&v)).collect();
        cuts.push(Cut { vector: v, gains });
    }
    (min, cuts)
}

/// Euclidean projection onto the probability simplex.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Solves the cutting-plane master: maximize `z` subject to
/// `z <= sum_i t_i g_j[i]` for every cut `j` and `t` on the simplex.
/// Returns the maximizing weights and the bound `z`.
fn master_lp(cuts: &[Cut], n: usize) -> (Vec<f64>, f64) {
    // Variables: t_0..t_{n-1}, z+, z-.
    let mut constraints = Vec::with_capacity(cuts.len() + 1);
    let mut ones = vec![1.0; n];
    ones.extend_from_slice(&[0.0, 0.0]);
    constraints.push(Constraint { coeffs: ones, rel: Relation::Eq, rhs: 1.0 });
    for cut in cuts {
        let mut coeffs: Vec<f64> = cut.gains.iter().map(|g| -g).collect();
        coeffs.extend_from_slice(&[1.0, -1.0]);
        constraints.push(Constraint { coeffs, rel: Relation::Le, rhs: 0.0 });
    }
    let mut costs = vec![0.0; n];
    costs.extend_from_slice(&[-1.0, 1.0]);
    match minimize(&costs, &constraints) {
        LpOutcome::Optimal { x, value } => (x[..n].to_vec(), -value),
        _ => unreachable!("bounded feasible master program"),
    }
}

/// Solves the dual side over recorded cut vectors: find mixture weights
/// `mu` over the cuts minimizing `max_i sum_j mu_j g_j[i]`. The mixture of
/// the cut states `sum_j mu_j |v_j><v_j|` then achieves exactly that value
/// as its worst detection, which certifies a common detected state when
/// the value is negative.
fn mixture_lp(cuts: &[Cut], n: usize) -> (HermitianMatrix, f64) {
    // Variables: mu_0..mu_{k-1}, w+, w-.
    let k = cuts.len();
    let mut constraints = Vec::with_capacity(n + 1);
    let mut ones = vec![1.0; k];
    ones.extend_from_slice(&[0.0, 0.0]);
    constraints.push(Constraint { coeffs: ones, rel: Relation::Eq, rhs: 1.0 });
    for i in 0..n {
        let mut coeffs: Vec<f64> = cuts.iter().map(|c| c.gains[i]).collect();
        coeffs.extend_from_slice(&[-1.0, 1.0]);
        constraints.push(Constraint { coeffs, rel: Relation::Le, rhs: 0.0 });
    }
    let mut costs = vec![0.0; k];
    costs.extend_from_slice(&[1.0, -1.0]);
    let (mu, value) = match minimize(&costs, &constraints) {
        LpOutcome::Optimal { x, value } => (x[..k].to_vec(), value),
        _ => unreachable!("bounded feasible mixture program"),
    };
    let outers: Vec<HermitianMatrix> = cuts
        .iter()
        .zip(mu.iter())
        .filter(|(_, &m)| m > 1e-15)
        .map(|(c, _)| HermitianMatrix::outer(&c.vector))
        .collect();
    let weights: Vec<f64> = mu.iter().copied().filter(|&m| m > 1e-15).collect();
    let terms: Vec<(f64, &HermitianMatrix)> =
        weights.iter().copied().zip(outers.iter()).collect();
    (HermitianMatrix::linear_combination(&terms), value)
}

struct MaxMinOutcome {
    weights: Vec<f64>,
    /// Best evaluated objective: a certified lower bound on the max.
    lb: f64,
    /// Certified upper bound on the max.
    ub: f64,
    cuts: Vec<Cut>,
}

fn max_min_inner(mats: &[&HermitianMatrix], max_rounds: usize) -> MaxMinOutcome {
    let n = mats.len();
    let scale = mats.iter().map(|m| m.operator_norm()).fold(1.0, f64::max);
    let band = DEGENERACY_BAND * scale;
    let mut cuts: Vec<Cut> = Vec::new();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_t = vec![0.0; n];

    let probe = |t: &[f64], cuts: &mut Vec<Cut>, best_value: &mut f64, best_t: &mut Vec<f64>| {
        let (value, new_cuts) = evaluate(mats, t, band);
        let gains = new_cuts[0].gains.clone();
        cuts.extend(new_cuts);
        if value > *best_value {
            *best_value = value;
            best_t.copy_from_slice(t);
        }
        (value, gains)
    };

    if n == 1 {
        let (value, _) = probe(&[1.0], &mut cuts, &mut best_value, &mut best_t);
        return MaxMinOutcome { weights: vec![1.0], lb: value, ub: value, cuts };
    }

    if n == 2 {
        // The objective is concave in the single free weight; golden-section
        // search brackets the maximum to width 1e-12. Every evaluation also
        // leaves a cut behind for the mixture program.
        let lipschitz = mats[0].sub(mats[1]).frobenius_norm().max(1e-30);
        let shot = |t: f64, cuts: &mut Vec<Cut>, bv: &mut f64, bt: &mut Vec<f64>| -> f64 {
            probe(&[t, 1.0 - t], cuts, bv, bt).0
        };
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.0f64, 1.0f64);
        shot(a, &mut cuts, &mut best_value, &mut best_t);
        shot(b, &mut cuts, &mut best_value, &mut best_t);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = shot(c, &mut cuts, &mut best_value, &mut best_t);
        let mut fd = shot(d, &mut cuts, &mut best_value, &mut best_t);
        while b - a > 1e-12 {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = shot(c, &mut cuts, &mut best_value, &mut best_t);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = shot(d, &mut cuts, &mut best_value, &mut best_t);
            }
        }
        let ub = best_value + (b - a) * lipschitz;
        return MaxMinOutcome { weights: best_t, lb: best_value, ub, cuts };
    }

    // Vertices and the barycenter seed the cut collection.
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        probe(&e, &mut cuts, &mut best_value, &mut best_t);
    }
    let mut t = vec![1.0 / n as f64; n];
    probe(&t, &mut cuts, &mut best_value, &mut best_t);

    // Projected supergradient warm start: cheap progress toward the
    // optimum, and each step's eigenvector feeds the cut collection.
    for k in 0..WARM_START_ITERS {
        let (_, gains) = probe(&t, &mut cuts, &mut best_value, &mut best_t);
        let step = 0.3 / (scale * ((k + 1) as f64).sqrt());
        let moved: Vec<f64> = t.iter().zip(&gains).map(|(ti, g)| ti + step * g).collect();
        t = project_to_simplex(&moved);
    }

    // Cutting-plane refinement closes the gap between the evaluated best
    // and the master bound. Pruning keeps only the tightest cuts at the
    // current iterate; since every master over a cut subset still bounds
    // the true optimum from above, the running minimum stays valid.
    let mut ub = f64::INFINITY;
    for _ in 0..max_rounds {
        if cuts.len() > CUT_KEEP + 60 {
            cuts.sort_by(|p, q| {
                let sp: f64 = p.gains.iter().zip(&best_t).map(|(g, w)| g * w).sum::<f64>();
                let sq: f64 = q.gains.iter().zip(&best_t).map(|(g, w)| g * w).sum::<f64>();
                sp.partial_cmp(&sq).expect("finite slack")
            });
            cuts.truncate(CUT_KEEP);
        }
        let (t_hat, bound) = master_lp(&cuts, n);
        ub = ub.min(bound);
        if ub - best_value <= GAP_TOL * scale {
            break;
        }
        probe(&t_hat, &mut cuts, &mut best_value, &mut best_t);
        if ub - best_value <= GAP_TOL * scale {
            break;
        }
    }
    MaxMinOutcome { weights: best_t, lb: best_value, ub, cuts }
}

fn check_dims(dims: impl Iterator<Item = usize>) -> Result<usize> {
    let mut first = None;
    for d in dims {
        match first {
            None => first = Some(d),
            Some(f) if f != d => return Err(Error::DimensionMismatch(f, d)),
            _ => {}
        }
    }
    Ok(first.expect("nonempty checked by callers"))
}

/// Maximizes the smallest eigenvalue of `sum_i t_i A_i` over the weight
/// simplex. Returns the best weights found and the evaluated optimum.
pub fn max_min_eigenvalue_over_simplex(mats: &[HermitianMatrix]) -> Result<(SimplexWeights, f64)> {
    if mats.is_empty() {
        return Err(Error::NotEnoughInputs { needed: 1, got: 0 });
    }
    check_dims(mats.iter().map(|m| m.dim()))?;
    let refs: Vec<&HermitianMatrix> = mats.iter().collect();
    let outcome = max_min_inner(&refs, MAX_CUT_ROUNDS);
    Ok((SimplexWeights::new(outcome.weights)?, outcome.lb))
}

// ---------------------------------------------------------------------------
// Witness-side decision.

/// Projects a Hermitian matrix onto the density matrices (unit-trace PSD)
/// by clipping its spectrum to the probability simplex.
fn project_to_density(mat: &HermitianMatrix) -> HermitianMatrix {
    let eig = mat.eig();
    let clipped = project_to_simplex(eig.eigenvalues());
    let outers: Vec<HermitianMatrix> = (0..mat.dim())
        .filter(|&k| clipped[k] > 0.0)
        .map(|k| HermitianMatrix::outer(eig.eigenvector(k)))
        .collect();
    let weights: Vec<f64> = clipped.iter().copied().filter(|&w| w > 0.0).collect();
    let terms: Vec<(f64, &HermitianMatrix)> = weights.iter().copied().zip(outers.iter()).collect();
    HermitianMatrix::linear_combination(&terms)
}

/// Projected subgradient descent on `max_i tr(W_i rho)` with Polyak steps
/// toward `target`. Returns the best iterate and its objective.
fn polish_state(
    wmats: &[&HermitianMatrix],
    start: HermitianMatrix,
    target: f64,
) -> (HermitianMatrix, f64) {
    let frob_sq: Vec<f64> = wmats.iter().map(|w| w.frobenius_norm().powi(2)).collect();
    let mut rho = start;
    let mut best = (f64::INFINITY, rho.clone());
    for _ in 0..2000 {
        let values: Vec<f64> = wmats
            .iter()
            .map(|w| trace_pair(w, &rho).expect("dimensions checked by caller"))
            .collect();
        let (j, &g) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite trace"))
            .expect("at least one witness");
        if g < best.0 {
            best = (g, rho.clone());
        }
        let gap = g - target;
        if gap <= 0.0 {
            break;
        }
        let step = gap / frob_sq[j];
        rho = project_to_density(&rho.sub(&wmats[j].scaled(step)));
    }
    (best.1, best.0)
}

/// Best common detected state over the recorded cuts, with a subgradient
/// polish and deterministic pure-state restarts when the cut mixture alone
/// does not reach the detection gate.
fn extract_inner(wmats: &[&HermitianMatrix], outcome: &MaxMinOutcome) -> Result<DensityMatrix> {
    let (candidate, value) = mixture_lp(&outcome.cuts, wmats.len());
    if value <= -CERT_DETECTION_TOL {
        return DensityMatrix::new(candidate);
    }
    let (polished, polished_value) = polish_state(wmats, candidate, outcome.lb);
    if polished_value <= -CERT_DETECTION_TOL {
        return DensityMatrix::new(polished);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(EXTRACTION_SEED);
    let dim = wmats[0].dim();
    for _ in 0..8 {
        let psi = crate::oracle::haar_pure_state(dim, &mut rng);
        let (restarted, restart_value) =
            polish_state(wmats, HermitianMatrix::outer(&psi), outcome.lb);
        if restart_value <= -CERT_DETECTION_TOL {
            return DensityMatrix::new(restarted);
        }
    }
    Err(Error::ExtractionFailed)
}

/// Decides whether the witnesses share a detected state, with certificates.
///
/// Requires at least two witnesses of equal dimension. The verdict follows
/// the certified bounds on the simplex max-min eigenvalue: an evaluated
/// optimum at `-1e-9` or above is `Incomparable` (the weights are the PSD
/// certificate); an upper bound below `-1e-7` is `Comparable`, with a
/// state every witness detects below `-1e-8`; anything between — or a
/// failed extraction — is `Marginal`.
pub fn compare_witnesses(witnesses: &[CoherenceWitness]) -> Result<WitnessComparability> {
    compare_witnesses_with_budget(witnesses, MAX_CUT_ROUNDS)
}

/// [`compare_witnesses`] with a caller-chosen cap on refinement rounds
/// (the default is 300). Tighter caps trade runtime for a wider
/// `Marginal` band: the bounds stop where the rounds run out.
pub fn compare_witnesses_with_budget(
    witnesses: &[CoherenceWitness],
    max_rounds: usize,
) -> Result<WitnessComparability> {
    if witnesses.len() < 2 {
        return Err(Error::NotEnoughInputs { needed: 2, got: witnesses.len() });
    }
    check_dims(witnesses.iter().map(|w| w.dim()))?;
    let mats: Vec<&HermitianMatrix> = witnesses.iter().map(|w| w.matrix()).collect();
    let outcome = max_min_inner(&mats, max_rounds);

    if outcome.lb >= -PSD_TOL {
        return Ok(WitnessComparability {
            verdict: WitnessVerdict::Incomparable,
            optimum: outcome.lb,
            psd_certificate: Some(SimplexWeights::new(outcome.weights.clone())?),
            common_state: None,
        });
    }
    if outcome.ub < -NEGATIVE_TOL {
        return match extract_inner(&mats, &outcome) {
            Ok(rho) => Ok(WitnessComparability {
                verdict: WitnessVerdict::Comparable,
                optimum: outcome.lb,
                psd_certificate: None,
                common_state: Some(rho),
            }),
            // A certified-negative bound whose state cannot be produced is
            // reported as Marginal rather than an unbacked Comparable.
            Err(Error::ExtractionFailed) => Ok(WitnessComparability {
                verdict: WitnessVerdict::Marginal,
                optimum: outcome.lb,
                psd_certificate: Some(SimplexWeights::new(outcome.weights.clone())?),
                common_state: None,
            }),
            Err(e) => Err(e),
        };
    }
    // Tolerance band: attach the best-effort candidates without claiming
    // either verification passed.
    let candidate_state = extract_inner(&mats, &outcome).ok();
    Ok(WitnessComparability {
        verdict: WitnessVerdict::Marginal,
        optimum: outcome.lb,
        psd_certificate: Some(SimplexWeights::new(outcome.weights.clone())?),
        common_state: candidate_state,
    })
}

/// Finds a state detected by every witness, or fails with
/// [`Error::ExtractionFailed`] when the family admits a PSD combination
/// (so no such state exists) or the search cannot certify one.
pub fn extract_common_state(witnesses: &[CoherenceWitness]) -> Result<DensityMatrix> {
    if witnesses.len() < 2 {
        return Err(Error::NotEnoughInputs { needed: 2, got: witnesses.len() });
    }
    check_dims(witnesses.iter().map(|w| w.dim()))?;
    let mats: Vec<&HermitianMatrix> = witnesses.iter().map(|w| w.matrix()).collect();
    let outcome = max_min_inner(&mats, MAX_CUT_ROUNDS);
    if outcome.lb >= -PSD_TOL {
        return Err(Error::ExtractionFailed);
    }
    extract_inner(&mats, &outcome)
}

// ---------------------------------------------------------------------------
// State-side decision.

/// Clamps stray negatives (from LP round-off) and renormalizes.
fn clamp_to_simplex(t: &[f64]) -> Result<SimplexWeights> {
    SimplexWeights::new(t.iter().map(|&x| x.max(0.0)).collect())
}

fn mixture_off_norm(rhos: &[&DensityMatrix], t: &[f64]) -> f64 {
    let terms: Vec<(f64, &HermitianMatrix)> =
        t.iter().copied().zip(rhos.iter().map(|r| r.matrix())).collect();
    HermitianMatrix::linear_combination(&terms).off_diagonal_sq_norm().sqrt()
}

/// Builds `sum_k a_k (Delta(rho_k) - rho_k)` and insists it detect every
/// input below `-1e-9`; zero weights are allowed here (the public
/// [`common_witness`] wrapper enforces positivity on caller weights).
fn combine_dephasing(rhos: &[&DensityMatrix], weights: &[f64]) -> Result<CoherenceWitness> {
    let diffs: Vec<HermitianMatrix> = rhos
        .iter()
        .map(|r| crate::mat::dephase(r.matrix()).sub(r.matrix()))
        .collect();
    let terms: Vec<(f64, &HermitianMatrix)> =
        weights.iter().copied().zip(diffs.iter()).collect();
    let combo = HermitianMatrix::linear_combination(&terms);
    for (i, rho) in rhos.iter().enumerate() {
        let value = trace_pair(&combo, rho.matrix())?;
        if value >= -PSD_TOL {
            return Err(Error::NotDetected { index: i, value });
        }
    }
    validate(combo)
}

/// Comparable-side workhorse: uniform dephasing combination first, then a
/// weight reoptimization over the detection Gram matrix when some input
/// escapes. Returns `Marginal` when no combination certifies.
fn comparable_state_verdict(rhos: &[&DensityMatrix]) -> Result<StateComparability> {
    let n = rhos.len();
    let uniform = vec![1.0 / n as f64; n];
    let attempt = match combine_dephasing(rhos, &uniform) {
        Ok(w) => Some(w),
        Err(Error::NotDetected { .. }) => {
            // Maximize the worst detection margin over combination weights:
            // the margin of input i under weights a is sum_k a_k gram[k][i],
            // with gram[k][i] = -tr((Delta(rho_k) - rho_k) rho_i). This is
            // the same max-min shape as the cutting-plane master, reused
            // with one pseudo-cut per input state.
            let diffs: Vec<HermitianMatrix> = rhos
                .iter()
                .map(|r| crate::mat::dephase(r.matrix()).sub(r.matrix()))
                .collect();
            let mut pseudo = Vec::with_capacity(n);
            for i in 0..n {
                let gains: Vec<f64> = diffs
                    .iter()
                    .map(|d| -trace_pair(d, rhos[i].matrix()).expect("dimensions checked"))
                    .collect();
                pseudo.push(Cut { vector: Vec::new(), gains });
            }
            let (a, margin) = master_lp(&pseudo, n);
            if margin > PSD_TOL {
                combine_dephasing(rhos, &a).ok()
            } else {
                None
            }
        }
        Err(e) => return Err(e),
    };
    Ok(match attempt {
        Some(w) => StateComparability {
            verdict: StateVerdict::Comparable,
            mixture_certificate: None,
            common_witness: Some(w.normalize()),
            boundary_subset: None,
        },
        None => StateComparability {
            verdict: StateVerdict::Marginal,
            mixture_certificate: None,
            common_witness: None,
            boundary_subset: None,
        },
    })
}

fn interior_verdict(rhos: &[&DensityMatrix], t: &[f64]) -> Result<StateComparability> {
    let weights = clamp_to_simplex(t)?;
    if mixture_off_norm(rhos, weights.weights()) <= MIXTURE_CHECK_TOL {
        Ok(StateComparability {
            verdict: StateVerdict::Incomparable,
            mixture_certificate: Some(weights),
            common_witness: None,
            boundary_subset: None,
        })
    } else {
        // The solved weights should dephase the mixture; if they fail their
        // own check the instance is numerically too tight to call.
        Ok(StateComparability {
            verdict: StateVerdict::Marginal,
            mixture_certificate: Some(weights),
            common_witness: None,
            boundary_subset: None,
        })
    }
}

fn boundary_verdict(t: &[f64]) -> Result<StateComparability> {
    let subset: Vec<usize> =
        (0..t.len()).filter(|&k| t[k] <= INTERIOR_TOL).collect();
    Ok(StateComparability {
        verdict: StateVerdict::DegenerateBoundary,
        mixture_certificate: Some(clamp_to_simplex(t)?),
        common_witness: None,
        boundary_subset: Some(subset),
    })
}

/// Decides whether two coherent states admit a common detecting witness.
///
/// The mixture `t rho1 + (1-t) rho2` is incoherent only if every
/// off-diagonal entry cancels, which pins `t` to `-b/(a-b)` entrywise;
/// all entries must agree on one real `t`. An interior `t` certifies
/// `Incomparable`; `t` at 0 or 1 (within 1e-9) is `DegenerateBoundary`;
/// no consistent interior `t` leads to a common-witness construction.
pub fn compare_two_states(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<StateComparability> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), rho2.dim()));
    }
    if !is_coherent(rho1) {
        return Err(Error::InputIncoherent(0));
    }
    if !is_coherent(rho2) {
        return Err(Error::InputIncoherent(1));
    }
    let d = rho1.dim();
    let pair = [rho1, rho2];

    // Each coherent entry pins t through t (a - b) = -b; collect the
    // pinned values and check they agree.
    let mut records: Vec<(Complex64, Complex64)> = Vec::new();
    let mut feasible = true;
    for i in 0..d {
        for j in i + 1..d {
            let a = rho1.matrix().get(i, j);
            let b = rho2.matrix().get(i, j);
            let coef = a - b;
            if coef.norm() <= ENTRY_TOL {
                if b.norm() > ENTRY_TOL {
                    // This coherence is shared unchanged by both states; no
                    // mixture removes it.
                    feasible = false;
                }
                continue;
            }
            records.push((coef, b));
        }
    }

    if feasible && !records.is_empty() {
        let (ref_coef, ref_b) = records
            .iter()
            .copied()
            .max_by(|p, q| p.0.norm().partial_cmp(&q.0.norm()).expect("finite entry"))
            .expect("records nonempty");
        let t_ref = -ref_b / ref_coef;
        let consistent = records.iter().all(|&(coef, b)| (-b / coef - t_ref).norm() <= RATIO_TOL)
            && t_ref.im.abs() <= RATIO_TOL;
        if consistent {
            let t = t_ref.re;
            if t > INTERIOR_TOL && t < 1.0 - INTERIOR_TOL {
                return interior_verdict(&pair, &[t, 1.0 - t]);
            }
            if t.abs() <= INTERIOR_TOL {
                return boundary_verdict(&[0.0, 1.0]);
            }
            if (t - 1.0).abs() <= INTERIOR_TOL {
                return boundary_verdict(&[1.0, 0.0]);
            }
            // A consistent t outside [0, 1]: the dephasing point misses the
            // segment, so no convex mixture is incoherent.
        }
    }
    comparable_state_verdict(&pair)
}

enum AffineSolution {
    Infeasible,
    Solved { particular: Vec<f64>, nullspace: Vec<Vec<f64>> },
}

/// Gauss-Jordan elimination with partial pivoting on `rows * t = rhs`.
/// Rows are max-normalized first; pivots below 1e-10 count as rank
/// deficiency, and a zeroed row with residual above 1e-8 as inconsistency.
fn solve_affine(mut rows: Vec<Vec<f64>>, mut rhs: Vec<f64>, n: usize) -> AffineSolution {
    for (row, b) in rows.iter_mut().zip(rhs.iter_mut()) {
        let m = row.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if m > 0.0 {
            for x in row.iter_mut() {
                *x /= m;
            }
            *b /= m;
        }
    }
    let m = rows.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(best) = (rank..m)
            .max_by(|&p, &q| rows[p][col].abs().partial_cmp(&rows[q][col].abs()).expect("finite"))
        else {
            break;
        };
        if rows[best][col].abs() <= 1e-10 {
            continue;
        }
        rows.swap(rank, best);
        rhs.swap(rank, best);
        let pivot = rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x /= pivot;
        }
        rhs[rank] /= pivot;
        for r in 0..m {
            if r != rank && rows[r][col].abs() > 0.0 {
                let factor = rows[r][col];
                let (pivot_row, pivot_rhs) = (rows[rank].clone(), rhs[rank]);
                for (x, p) in rows[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= factor * p;
                }
                rhs[r] -= factor * pivot_rhs;
            }
        }
        pivots.push((rank, col));
        rank += 1;
        if rank == m {
            break;
        }
    }
    for r in rank..m {
        if rhs[r].abs() > 1e-8 {
            return AffineSolution::Infeasible;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut particular = vec![0.0; n];
    for &(r, c) in &pivots {
        particular[c] = rhs[r];
    }
    let nullspace: Vec<Vec<f64>> = (0..n)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![0.0; n];
            v[free] = 1.0;
            for &(r, c) in &pivots {
                v[c] = -rows[r][free];
            }
            v
        })
        .collect();
    AffineSolution::Solved { particular, nullspace }
}

/// Decides whether `n` coherent states admit a common detecting witness.
///
/// Solves the affine system "some mixture of the states dephases"
/// (one real pair of equations per off-diagonal entry plus weight
/// normalization), then maximizes the smallest mixture weight over the
/// solution set. A positive optimum certifies `Incomparable` with the
/// interior mixture; an optimum at zero (within 1e-9) is
/// `DegenerateBoundary`; a negative optimum or an inconsistent system
/// leads to a common-witness construction.
pub fn compare_states(rhos: &[DensityMatrix]) -> Result<StateComparability> {
    let n = rhos.len();
    if n < 2 {
        return Err(Error::NotEnoughInputs { needed: 2, got: n });
    }
    let d = check_dims(rhos.iter().map(|r| r.dim()))?;
    for (k, rho) in rhos.iter().enumerate() {
        if !is_coherent(rho) {
            return Err(Error::InputIncoherent(k));
        }
    }
    let refs: Vec<&DensityMatrix> = rhos.iter().collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let re: Vec<f64> = rhos.iter().map(|r| r.matrix().get(i, j).re).collect();
            let im: Vec<f64> = rhos.iter().map(|r| r.matrix().get(i, j).im).collect();
            if re.iter().any(|x| x.abs() > ENTRY_TOL) {
                rows.push(re);
                rhs.push(0.0);
            }
            if im.iter().any(|x| x.abs() > ENTRY_TOL) {
                rows.push(im);
                rhs.push(0.0);
            }
        }
    }
    rows.push(vec![1.0; n]);
    rhs.push(1.0);

    let (particular, nullspace) = match solve_affine(rows, rhs, n) {
        AffineSolution::Infeasible => return comparable_state_verdict(&refs),
        AffineSolution::Solved { particular, nullspace } => (particular, nullspace),
    };

    let t_star = if nullspace.is_empty() {
        particular
    } else {
        // Maximize z subject to particular + sum_f y_f basis_f >= z
        // componentwise; y and z are free variables, split into
        // nonnegative parts.
        let f = nullspace.len();
        let mut constraints = Vec::with_capacity(n);
        for k in 0..n {
            let mut coeffs = Vec::with_capacity(2 * f + 2);
            for basis in &nullspace {
                coeffs.push(-basis[k]);
            }
            for basis in &nullspace {
                coeffs.push(basis[k]);
            }
            coeffs.extend_from_slice(&[1.0, -1.0]);
            constraints.push(Constraint { coeffs, rel: Relation::Le, rhs: particular[k] });
        }
        let mut costs = vec![0.0; 2 * f];
        costs.extend_from_slice(&[-1.0, 1.0]);
        let y = match minimize(&costs, &constraints) {
            LpOutcome::Optimal { x, .. } => {
                (0..f).map(|i| x[i] - x[f + i]).collect::<Vec<f64>>()
            }
            _ => unreachable!("weight program is feasible with finite optimum"),
        };
        let mut t = particular;
        for (yf, basis) in y.iter().zip(&nullspace) {
            for (tk, bk) in t.iter_mut().zip(basis) {
                *tk += yf * bk;
            }
        }
        t
    };

    let min_weight = t_star.iter().copied().fold(f64::INFINITY, f64::min);
    if min_weight > INTERIOR_TOL {
        interior_verdict(&refs, &t_star)
    } else if min_weight < -INTERIOR_TOL {
        comparable_state_verdict(&refs)
    } else {
        boundary_verdict(&t_star)
    }
}

/// Combines the dephasing witnesses of the inputs, `sum_k a_k
/// (Delta(rho_k) - rho_k)`, with the given positive weights (uniform when
/// omitted), verifies it detects every input below `-1e-9` (failing with
/// [`Error::NotDetected`] otherwise), and validates the result. The
/// output is not normalized.
pub fn common_witness(rhos: &[DensityMatrix], weights: Option<&[f64]>) -> Result<CoherenceWitness> {
    let n = rhos.len();
    if n < 2 {
        return Err(Error::NotEnoughInputs { needed: 2, got: n });
    }
    check_dims(rhos.iter().map(|r| r.dim()))?;
    for (k, rho) in rhos.iter().enumerate() {
        if !is_coherent(rho) {
            return Err(Error::InputIncoherent(k));
        }
    }
    let own: Vec<f64>;
    let weights = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::WeightCountMismatch { expected: n, got: w.len() });
            }
            for (i, &a) in w.iter().enumerate() {
                if a <= 0.0 {
                    return Err(Error::NonPositiveWeight { index: i, value: a });
                }
            }
            w
        }
        None => {
            own = vec![1.0 / n as f64; n];
            &own
        }
    };
    let refs: Vec<&DensityMatrix> = rhos.iter().collect();
    combine_dephasing(&refs, weights)
}
