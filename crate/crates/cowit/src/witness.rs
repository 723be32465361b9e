//! Coherence witnesses: validation, construction, detection.
//!
//! A coherence witness is a Hermitian operator `W` whose diagonal is
//! nonnegative and which has at least one negative eigenvalue. The first
//! condition makes `tr(W delta) >= 0` for every incoherent `delta`, the
//! second guarantees some state is actually detected, i.e. the set
//! `{rho : tr(W rho) < 0}` is nonempty and contains only coherent states.
//! Witnesses with identically zero diagonal are *optimal*: they detect
//! every state their expectation can reach.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::{dephase, trace_pair, DensityMatrix, HermitianMatrix};

/// Diagonal entries may dip this far below zero before rejection.
const DIAGONAL_TOL: f64 = 1e-10;
/// The smallest eigenvalue must sit at or below minus this.
const NEGATIVE_EIG_TOL: f64 = 1e-9;
/// Default detection threshold: `tr(W rho) < -DETECTION_TOL` detects.
const DETECTION_TOL: f64 = 1e-9;
/// `is_optimal` allows diagonal entries up to this magnitude.
const OPTIMAL_DIAG_TOL: f64 = 1e-10;
/// A witness counts as normalized when its operator norm is 1 within this.
const NORMALIZED_TOL: f64 = 1e-9;
/// States with off-diagonal Frobenius norm squared above this are coherent.
const COHERENCE_SQ_TOL: f64 = 1e-20;

/// A validated coherence witness.
///
/// Construction goes through [`validate`] or one of the `*_witness`
/// builders, so a value of this type always satisfies both witness
/// conditions (diagonal >= -1e-10 entrywise, min eigenvalue <= -1e-9).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceWitness {
    mat: HermitianMatrix,
    min_eigenvalue: f64,
    operator_norm: f64,
    normalized: bool,
}

/// Outcome of testing a witness against a state.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    /// The expectation `tr(W rho)`.
    pub value: f64,
    /// True when `value` clears the detection threshold.
    pub detected: bool,
    /// Distance of `value` from zero.
    pub margin: f64,
}

impl CoherenceWitness {
    pub fn matrix(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Smallest eigenvalue, cached at validation time.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Largest eigenvalue magnitude, cached at validation time.
    pub fn operator_norm(&self) -> f64 {
        self.operator_norm
    }

    /// True when the operator norm is 1 within 1e-9.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// True when the diagonal vanishes (within 1e-10), i.e. the witness
    /// detects every state with `tr(W rho) != 0`.
    pub fn is_optimal(&self) -> bool {
        (0..self.dim()).all(|i| self.mat.get(i, i).re.abs() <= OPTIMAL_DIAG_TOL)
    }

    /// Rescales to unit operator norm. Positive scaling preserves both
    /// witness conditions, so no revalidation is needed.
    pub fn normalize(&self) -> CoherenceWitness {
        if self.normalized {
            return self.clone();
        }
        let factor = 1.0 / self.operator_norm;
        CoherenceWitness {
            mat: self.mat.scaled(factor),
            min_eigenvalue: self.min_eigenvalue * factor,
            operator_norm: 1.0,
            normalized: true,
        }
    }

    /// Tests `rho` with the default threshold: detected iff
    /// `tr(W rho) < -1e-9`.
    pub fn detect(&self, rho: &DensityMatrix) -> Result<DetectionReport> {
        self.detect_with_threshold(rho, DETECTION_TOL)
    }

    /// Tests `rho` with a caller-chosen threshold.
    pub fn detect_with_threshold(&self, rho: &DensityMatrix, tol: f64) -> Result<DetectionReport> {
        let value = trace_pair(&self.mat, rho.matrix())?;
        Ok(DetectionReport { value, detected: value < -tol, margin: value.abs() })
    }
}

/// Checks both witness conditions and wraps the matrix.
///
/// Fails with [`Error::NegativeDiagonal`] on the first diagonal entry below
/// -1e-10, or [`Error::NoNegativeEigenvalue`] when the smallest eigenvalue
/// exceeds -1e-9.
pub fn validate(mat: HermitianMatrix) -> Result<CoherenceWitness> {
    for i in 0..mat.dim() {
        let value = mat.get(i, i).re;
        if value < -DIAGONAL_TOL {
            return Err(Error::NegativeDiagonal { index: i, value });
        }
    }
    let eig = mat.eig();
    let min_eigenvalue = eig.min_eigenvalue();
    if min_eigenvalue > -NEGATIVE_EIG_TOL {
        return Err(Error::NoNegativeEigenvalue(min_eigenvalue));
    }
    let operator_norm = min_eigenvalue.abs().max(eig.max_eigenvalue().abs());
    let normalized = (operator_norm - 1.0).abs() <= NORMALIZED_TOL;
    Ok(CoherenceWitness { mat, min_eigenvalue, operator_norm, normalized })
}

/// Witness tailored to a pure state: `W = alpha I - psi psi^dag` with
/// `alpha = max_i |psi_i|^2`.
///
/// `alpha` is the largest expectation any incoherent state can give the
/// projector, so the diagonal of `W` is nonnegative by construction, and
/// `tr(W psi psi^dag) = alpha - 1 < 0` whenever `psi` is not a basis
/// vector. Requires `psi` normalized within 1e-10; rejects basis vectors
/// with [`Error::IncoherentInput`].
pub fn projector_witness(psi: &[Complex64]) -> Result<CoherenceWitness> {
    if psi.len() < 2 {
        return Err(Error::DimensionTooSmall(psi.len()));
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitVector(norm));
    }
    let alpha = psi.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if alpha >= 1.0 - NEGATIVE_EIG_TOL {
        // A single nonzero amplitude: the projector is incoherent and
        // alpha I - psi psi^dag is positive semidefinite.
        return Err(Error::IncoherentInput);
    }
    let mat = HermitianMatrix::identity(psi.len()).scaled(alpha).sub(&HermitianMatrix::outer(psi));
    validate(mat)
}

/// Witness from the Frobenius distance between `rho` and its diagonal:
/// `W = (Delta(rho) - rho) / ||rho - Delta(rho)||_F`.
///
/// The closest incoherent state to `rho` in Frobenius distance is exactly
/// its dephasing, and the usual trace-correction term vanishes because the
/// two agree on the diagonal. Gives `tr(W rho) = -||rho - Delta(rho)||_F`.
pub fn geometric_witness(rho: &DensityMatrix) -> Result<CoherenceWitness> {
    if !is_coherent(rho) {
        return Err(Error::IncoherentInput);
    }
    let diff = dephase(rho.matrix()).sub(rho.matrix());
    let norm = diff.frobenius_norm();
    validate(diff.scaled(1.0 / norm))
}

/// The dephasing witness `W = Delta(rho) - rho`.
///
/// Its diagonal is identically zero, so it is optimal, and
/// `tr(W rho) = -sum_{i != j} |rho_ij|^2` is strictly negative for every
/// coherent `rho`.
pub fn dephasing_witness(rho: &DensityMatrix) -> Result<CoherenceWitness> {
    if !is_coherent(rho) {
        return Err(Error::IncoherentInput);
    }
    validate(dephase(rho.matrix()).sub(rho.matrix()))
}

/// True when `rho` carries any coherence: the squared Frobenius norm of
/// its off-diagonal part exceeds 1e-20.
pub fn is_coherent(rho: &DensityMatrix) -> bool {
    rho.matrix().off_diagonal_sq_norm() > COHERENCE_SQ_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus_state() -> DensityMatrix {
        let amp = 1.0 / 2f64.sqrt();
        DensityMatrix::pure(&[r(amp), r(amp)]).unwrap()
    }

    #[test]
    fn validate_accepts_off_diagonal_witness() {
        let mat = HermitianMatrix::from_rows(&[vec![r(0.0), r(-0.5)], vec![r(-0.5), r(0.0)]]).unwrap();
        let w = validate(mat).unwrap();
        assert!((w.min_eigenvalue() + 0.5).abs() < TOL);
        assert!(w.is_optimal());
        assert!(!w.is_normalized());
    }

    #[test]
    fn validate_rejects_negative_diagonal_with_index() {
        let mat = HermitianMatrix::from_rows(&[vec![r(-0.2), r(0.5)], vec![r(0.5), r(0.3)]]).unwrap();
        assert!(matches!(validate(mat), Err(Error::NegativeDiagonal { index: 0, .. })));
    }

    #[test]
    fn validate_rejects_psd_matrices() {
        let mat = HermitianMatrix::identity(2);
        assert!(matches!(validate(mat), Err(Error::NoNegativeEigenvalue(v)) if (v - 1.0).abs() < TOL));
    }

    #[test]
    fn projector_witness_of_plus_state() {
        let amp = 1.0 / 2f64.sqrt();
        let w = projector_witness(&[r(amp), r(amp)]).unwrap();
        assert!(w.matrix().get(0, 0).norm() < 1e-12);
        assert!((w.matrix().get(0, 1).re + 0.5).abs() < 1e-12);
        assert!(w.is_optimal());
    }

    #[test]
    fn projector_witness_alpha_matches_simplex_grid_oracle() {
        // For flat psi on 3 levels, alpha = max_i |psi_i|^2 = 1/3; the
        // oracle maximizes tr(delta |psi><psi|) by brute force over the
        // probability simplex. The maximum of a linear functional sits at a
        // vertex, which the grid contains, so the scan is exact here.
        let amp = 1.0 / 3f64.sqrt();
        let psi = [r(amp), r(amp), r(amp)];
        let weights: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();

        let mut grid_max: f64 = 0.0;
        let steps = 1000usize;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let k = steps - i - j;
                let value = (i as f64 * weights[0] + j as f64 * weights[1] + k as f64 * weights[2])
                    / steps as f64;
                grid_max = grid_max.max(value);
            }
        }
        assert!((grid_max - 1.0 / 3.0).abs() < 1e-12);

        let w = projector_witness(&psi).unwrap();
        // Diagonal entries are alpha - 1/3 = 0: the witness is optimal.
        assert!(w.is_optimal());
        // Frozen from the oracle: tr(W psi psi^dag) = alpha - 1 = -2/3.
        let rho = DensityMatrix::pure(&psi).unwrap();
        let report = w.detect(&rho).unwrap();
        assert!((report.value + 2.0 / 3.0).abs() < TOL);
        assert!(report.detected);
    }

    #[test]
    fn projector_witness_rejects_bad_inputs() {
        assert!(matches!(projector_witness(&[r(1.0), r(0.0)]), Err(Error::IncoherentInput)));
        assert!(matches!(projector_witness(&[r(0.9), r(0.1)]), Err(Error::NonUnitVector(_))));
    }

    #[test]
    fn geometric_witness_of_real_qubit() {
        let rho = DensityMatrix::new(
            HermitianMatrix::from_rows(&[vec![r(0.5), r(0.1)], vec![r(0.1), r(0.5)]]).unwrap(),
        )
        .unwrap();

        // Oracle: scan diagonal states on a 1e-3 grid; the Frobenius-closest
        // one is the dephasing of rho.
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            let delta = HermitianMatrix::from_diagonal(&[p, 1.0 - p]);
            let dist = rho.matrix().sub(&delta).frobenius_norm();
            if dist < best.0 {
                best = (dist, p);
            }
        }
        assert!((best.1 - 0.5).abs() < 2e-3);

        let w = geometric_witness(&rho).unwrap();
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        assert!(w.matrix().get(0, 0).norm() < 1e-12);
        assert!((w.matrix().get(0, 1).re + inv_sqrt2).abs() < TOL);
        // tr(W rho) = -||rho - Delta(rho)||_F = -0.1 * sqrt(2).
        let report = w.detect(&rho).unwrap();
        assert!((report.value + 0.1 * 2f64.sqrt()).abs() < TOL);
    }

    #[test]
    fn geometric_witness_detects_at_minus_frobenius_distance() {
        let rho = DensityMatrix::maximally_coherent(3);
        let n = rho.matrix().sub(&dephase(rho.matrix())).frobenius_norm();
        let w = geometric_witness(&rho).unwrap();
        let report = w.detect(&rho).unwrap();
        assert!((report.value + n).abs() < TOL);
    }

    #[test]
    fn geometric_witness_rejects_incoherent_states() {
        let rho = crate::mat::IncoherentState::uniform(2).to_density();
        assert!(matches!(geometric_witness(&rho), Err(Error::IncoherentInput)));
    }

    #[test]
    fn dephasing_witness_value_is_minus_coherence_weight() {
        let rho = DensityMatrix::new(
            HermitianMatrix::from_rows(&[
                vec![r(0.5), c(0.1, -0.2)],
                vec![c(0.1, 0.2), r(0.5)],
            ])
            .unwrap(),
        )
        .unwrap();
        let w = dephasing_witness(&rho).unwrap();
        assert!(w.is_optimal());
        // -(2 * (0.1^2 + 0.2^2)) = -0.1.
        let report = w.detect(&rho).unwrap();
        assert!((report.value + 0.1).abs() < TOL);
    }

    #[test]
    fn dephasing_witness_of_maximally_coherent_state() {
        let rho = DensityMatrix::maximally_coherent(3);
        let w = dephasing_witness(&rho).unwrap();
        let report = w.detect(&rho).unwrap();
        assert!((report.value + 2.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn dephasing_witness_rejects_incoherent_states() {
        let rho = crate::mat::IncoherentState::new(vec![0.3, 0.7]).unwrap().to_density();
        assert!(matches!(dephasing_witness(&rho), Err(Error::IncoherentInput)));
    }

    #[test]
    fn optimality_depends_on_diagonal() {
        let s3 = 3f64.sqrt();
        let skewed = projector_witness(&[r(s3 / 2.0), r(0.5)]).unwrap();
        assert!(!skewed.is_optimal()); // diagonal (0, 1/2)

        let flat = projector_witness(&[r(1.0 / 2f64.sqrt()), r(1.0 / 2f64.sqrt())]).unwrap();
        assert!(flat.is_optimal());
    }

    #[test]
    fn normalize_scales_to_unit_operator_norm() {
        let rho = DensityMatrix::new(
            HermitianMatrix::from_rows(&[vec![r(0.5), r(0.1)], vec![r(0.1), r(0.5)]]).unwrap(),
        )
        .unwrap();
        let w = dephasing_witness(&rho).unwrap().normalize();
        assert!(w.is_normalized());
        assert!((w.matrix().get(0, 1).re + 1.0).abs() < TOL);
        assert!((w.min_eigenvalue() + 1.0).abs() < TOL);

        // Normalizing twice is a fixpoint.
        let again = w.normalize();
        assert_eq!(w.matrix(), again.matrix());
    }

    #[test]
    fn detection_reports_value_and_margin() {
        let w = validate(
            HermitianMatrix::from_rows(&[vec![r(0.0), r(-0.5)], vec![r(-0.5), r(0.0)]]).unwrap(),
        )
        .unwrap();

        let report = w.detect(&plus_state()).unwrap();
        assert!((report.value + 0.5).abs() < TOL);
        assert!(report.detected);
        assert!((report.margin - 0.5).abs() < TOL);

        // |-> has the opposite sign: not detected by this witness.
        let amp = 1.0 / 2f64.sqrt();
        let minus = DensityMatrix::pure(&[r(amp), r(-amp)]).unwrap();
        let report = w.detect(&minus).unwrap();
        assert!((report.value - 0.5).abs() < TOL);
        assert!(!report.detected);

        // Incoherent states sit exactly at zero: never detected.
        let mixed = crate::mat::IncoherentState::uniform(2).to_density();
        let report = w.detect(&mixed).unwrap();
        assert!(report.value.abs() < TOL);
        assert!(!report.detected);
    }

    #[test]
    fn detection_threshold_is_adjustable() {
        let w = validate(
            HermitianMatrix::from_rows(&[vec![r(0.0), r(-0.5)], vec![r(-0.5), r(0.0)]]).unwrap(),
        )
        .unwrap();
        let barely = DensityMatrix::new(
            HermitianMatrix::from_rows(&[vec![r(0.5), r(1e-10)], vec![r(1e-10), r(0.5)]]).unwrap(),
        )
        .unwrap();
        assert!(!w.detect(&barely).unwrap().detected);
        assert!(w.detect_with_threshold(&barely, 1e-12).unwrap().detected);
    }

    #[test]
    fn coherence_predicate_thresholds() {
        assert!(is_coherent(&plus_state()));
        assert!(!is_coherent(&crate::mat::IncoherentState::uniform(2).to_density()));
        let hairline = DensityMatrix::new(
            HermitianMatrix::from_rows(&[vec![r(0.5), r(1e-12)], vec![r(1e-12), r(0.5)]]).unwrap(),
        )
        .unwrap();
        assert!(!is_coherent(&hairline));
    }
}
