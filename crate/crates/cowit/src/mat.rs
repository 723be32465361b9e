//! Dense complex Hermitian linear algebra sized for small systems (d <= 64).
//!
//! Everything downstream—witness validation, comparability certificates,
//! robustness—reduces to eigendecompositions and trace pairings of small
//! Hermitian matrices, so this module owns those primitives. Hermiticity is
//! enforced at construction: inputs within `1e-12 * max(1, max |entry|)` of
//! their adjoint are symmetrized to `(A + A^dag)/2` exactly, anything worse
//! is rejected. That guarantee is what lets the rest of the crate treat
//! traces of products as real numbers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity acceptance threshold, relative to `max(1, max |entry|)`.
const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalue floor for accepting a matrix as a density matrix.
const DENSITY_PSD_TOL: f64 = 1e-9;
/// Allowed deviation of a density matrix trace from 1.
const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Allowed negative slop on incoherent-state probabilities (clamped to 0).
const PROBABILITY_TOL: f64 = 1e-10;
/// Jacobi sweep target for the off-diagonal Frobenius norm.
const JACOBI_OFF_TOL: f64 = 1e-14;
/// Hard cap on Jacobi sweeps; convergence is quadratic, ~10 suffice at d=64.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense Hermitian matrix with d >= 2, stored row-major.
///
/// Construction symmetrizes, so `get(i, j) == get(j, i).conj()` holds
/// exactly and diagonal entries have zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a `dim x dim` Hermitian matrix from row-major entries.
    ///
    /// Rejects inputs further than `1e-12 * max(1, max |entry|)` from their
    /// adjoint; accepted inputs are replaced by `(A + A^dag)/2`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::BadEntryCount { dim, expected: dim * dim, got: entries.len() });
        }
        let max_abs = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = HERMITICITY_TOL * max_abs.max(1.0);
        let mut deviation: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                deviation = deviation.max((entries[i * dim + j] - entries[j * dim + i].conj()).norm());
            }
        }
        if deviation > tol {
            return Err(Error::NonHermitianInput(deviation));
        }
        let mut data = entries;
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(data[i * dim + i].re, 0.0);
            for j in (i + 1)..dim {
                let w = (data[i * dim + j] + data[j * dim + i].conj()) * 0.5;
                data[i * dim + j] = w;
                data[j * dim + i] = w.conj();
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds from a list of rows; all rows must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::BadEntryCount { dim, expected: dim * dim, got: row.len() * dim });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    /// The `dim x dim` identity.
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    /// Diagonal matrix with the given real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            data[i * dim + i] = Complex64::new(v, 0.0);
        }
        Self { dim, data }
    }

    /// Rank-one projector `psi psi^dag` (no normalization applied).
    pub fn outer(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = psi[i] * psi[j].conj();
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Trace; real because the diagonal is real by construction.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    /// Entrywise sum. Panics on dimension mismatch (internal plumbing).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    /// Entrywise difference. Panics on dimension mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    /// Scalar multiple by a real factor (preserves hermiticity).
    pub fn scaled(&self, factor: f64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self { dim: self.dim, data }
    }

    /// Real linear combination `sum_i coeff_i * mats_i`.
    ///
    /// Panics on an empty list or mismatched dimensions.
    pub fn linear_combination(terms: &[(f64, &Self)]) -> Self {
        let dim = terms.first().expect("linear combination of no terms").1.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (coeff, mat) in terms {
            assert_eq!(mat.dim, dim, "matrix dimensions must agree");
            for (slot, z) in data.iter_mut().zip(&mat.data) {
                *slot += z * *coeff;
            }
        }
        Self { dim, data }
    }

    /// Diagonal part as a matrix: off-diagonal entries dropped, exactly.
    pub fn dephased(&self) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for i in 0..self.dim {
            data[i * self.dim + i] = self.data[i * self.dim + i];
        }
        Self { dim: self.dim, data }
    }

    /// Squared Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_sq_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    sum += self.data[i * self.dim + j].norm_sqr();
                }
            }
        }
        sum
    }

    /// Frobenius norm `sqrt(tr(A^dag A))`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator norm: the largest eigenvalue magnitude.
    pub fn operator_norm(&self) -> f64 {
        let eig = self.eig();
        let vals = eig.eigenvalues();
        vals[0].abs().max(vals[vals.len() - 1].abs())
    }

    /// True when the smallest eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.eig().min_eigenvalue() >= -tol
    }

    /// Quadratic form `<v|A|v>`, real by Hermiticity.
    ///
    /// # Panics
    ///
    /// When `v` has the wrong length.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        assert_eq!(v.len(), self.dim, "vector length must match dimension");
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += v[i].conj() * self.data[i * self.dim + j] * v[j];
            }
        }
        acc.re
    }

    /// Full eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back ascending with matching orthonormal
    /// eigenvectors; reconstruction error stays below
    /// `1e-9 * max(1, frobenius_norm)`.
    pub fn eig(&self) -> EigenDecomposition {
        jacobi_eig(self)
    }

    /// Smallest eigenvalue with a unit-norm eigenvector.
    pub fn min_eigenpair(&self) -> (f64, Vec<Complex64>) {
        let eig = self.eig();
        (eig.eigenvalues[0], eig.eigenvectors[0].clone())
    }
}

/// Diagonal part of `a` as a matrix; the map `A -> Delta(A)` is exactly
/// idempotent because entries are copied, never recomputed.
pub fn dephase(a: &HermitianMatrix) -> HermitianMatrix {
    a.dephased()
}

/// Hilbert-Schmidt pairing `tr(A B)`; real for Hermitian operands.
pub fn trace_pair(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let d = a.dim;
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            // tr(AB) = sum_ij A_ij B_ji; the imaginary parts cancel pairwise.
            sum += (a.data[i * d + j] * b.data[j * d + i]).re;
        }
    }
    Ok(sum)
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// matching orthonormal eigenvectors (columns of a unitary).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit-norm eigenvector for the k-th ascending eigenvalue.
    pub fn eigenvector(&self, k: usize) -> &[Complex64] {
        &self.eigenvectors[k]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Frobenius norm of `A - V diag(lambda) V^dag`, for invariant checks.
    pub fn reconstruction_error(&self, a: &HermitianMatrix) -> f64 {
        let d = a.dim();
        let mut err = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut rebuilt = Complex64::new(0.0, 0.0);
                for (k, lam) in self.eigenvalues.iter().enumerate() {
                    rebuilt += self.eigenvectors[k][i] * self.eigenvectors[k][j].conj() * *lam;
                }
                err += (a.get(i, j) - rebuilt).norm_sqr();
            }
        }
        err.sqrt()
    }
}

/// Cyclic Jacobi for complex Hermitian matrices.
///
/// Each rotation zeroes one off-diagonal pair: the entry's phase is folded
/// into the rotation so the remaining 2x2 problem is the classic real
/// symmetric one (`tau = (a_qq - a_pp) / 2|a_pq|`, smaller root of
/// `t^2 + 2 tau t - 1 = 0`).
fn jacobi_eig(m: &HermitianMatrix) -> EigenDecomposition {
    let d = m.dim;
    let mut a = m.data.clone();
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = Complex64::new(1.0, 0.0);
    }

    let scale = m.frobenius_norm().max(1.0);
    let stop = JACOBI_OFF_TOL * scale;
    // Rotations cheaper than this contribute nothing at f64 precision.
    let skip = 1e-18 * scale;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off_sq = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off_sq += a[p * d + q].norm_sqr();
            }
        }
        if (2.0 * off_sq).sqrt() <= stop {
            break;
        }

        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                let b = apq.norm();
                if b <= skip {
                    continue;
                }
                let omega = apq / b;
                let app = a[p * d + p].re;
                let aqq = a[q * d + q].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_omega = omega * s;

                // A <- J^dag A J with J = I except the (p,q) block
                // [[c, s*omega], [-s*conj(omega), c]].
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    let new_kp = akp * c - akq * s_omega.conj();
                    let new_kq = akp * s_omega + akq * c;
                    a[k * d + p] = new_kp;
                    a[p * d + k] = new_kp.conj();
                    a[k * d + q] = new_kq;
                    a[q * d + k] = new_kq.conj();
                }
                let app_new = app * c * c - 2.0 * c * s * b + aqq * s * s;
                let aqq_new = app * s * s + 2.0 * c * s * b + aqq * c * c;
                a[p * d + p] = Complex64::new(app_new, 0.0);
                a[q * d + q] = Complex64::new(aqq_new, 0.0);
                a[p * d + q] = Complex64::new(0.0, 0.0);
                a[q * d + p] = Complex64::new(0.0, 0.0);

                // Accumulate the rotation into the eigenvector matrix.
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = vkp * c - vkq * s_omega.conj();
                    v[k * d + q] = vkp * s_omega + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i * d + i].re.partial_cmp(&a[j * d + j].re).unwrap());

    let eigenvalues = order.iter().map(|&i| a[i * d + i].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&col| (0..d).map(|row| v[row * d + col]).collect())
        .collect();
    EigenDecomposition { eigenvalues, eigenvectors }
}

/// Unit-trace positive semidefinite Hermitian matrix.
///
/// Acceptance tolerances: smallest eigenvalue >= -1e-9, trace within 1e-10
/// of 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
}

impl DensityMatrix {
    /// Validates positivity and unit trace.
    pub fn new(mat: HermitianMatrix) -> Result<Self> {
        let trace = mat.trace();
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::TraceNotOne(trace));
        }
        let min = mat.eig().min_eigenvalue();
        if min < -DENSITY_PSD_TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(Self { mat })
    }

    /// Pure state `psi psi^dag`; `psi` must be normalized within 1e-8.
    /// The projector is built from `psi / ||psi||` so its trace is exact.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        if psi.len() < 2 {
            return Err(Error::DimensionTooSmall(psi.len()));
        }
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let norm = norm_sq.sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NonUnitVector(norm));
        }
        let mut mat = HermitianMatrix::outer(psi);
        for entry in &mut mat.data {
            *entry /= norm_sq;
        }
        Ok(Self { mat })
    }

    /// The maximally coherent state: every entry `1/d`.
    pub fn maximally_coherent(dim: usize) -> Self {
        let fill = Complex64::new(1.0 / dim as f64, 0.0);
        Self { mat: HermitianMatrix { dim, data: vec![fill; dim * dim] } }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    /// Diagonal entries, i.e. populations in the incoherent basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat.get(i, i).re).collect()
    }

    /// The incoherent state obtained by deleting all off-diagonal entries.
    pub fn dephased_state(&self) -> IncoherentState {
        IncoherentState::new(self.diagonal()).expect("diagonal of a density matrix is a distribution")
    }

    /// Extracts the state vector when this matrix is pure: returns the top
    /// eigenvector if its eigenvalue is within `tol` of 1.
    pub fn as_pure(&self, tol: f64) -> Option<Vec<Complex64>> {
        let eig = self.mat.eig();
        if (1.0 - eig.max_eigenvalue()).abs() <= tol {
            Some(eig.eigenvector(self.dim() - 1).to_vec())
        } else {
            None
        }
    }
}

/// Diagonal (incoherent) state: a probability vector on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentState {
    probs: Vec<f64>,
}

impl IncoherentState {
    /// Validates nonnegativity (slop of -1e-10 is clamped to zero) and that
    /// the entries sum to 1 within 1e-10.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::DimensionTooSmall(probs.len()));
        }
        let mut clamped = probs;
        for (i, p) in clamped.iter_mut().enumerate() {
            if *p < -PROBABILITY_TOL {
                return Err(Error::NegativeProbability { index: i, value: *p });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::ProbabilitySumNotOne(sum));
        }
        Ok(Self { probs: clamped })
    }

    /// The maximally mixed state `I/d`.
    pub fn uniform(dim: usize) -> Self {
        Self { probs: vec![1.0 / dim as f64; dim] }
    }

    /// Basis state `|i><i|` as an incoherent state.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut probs = vec![0.0; dim];
        probs[i] = 1.0;
        Self { probs }
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// The state as a diagonal Hermitian matrix.
    pub fn to_matrix(&self) -> HermitianMatrix {
        HermitianMatrix::from_diagonal(&self.probs)
    }

    /// The state as a full density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { mat: self.to_matrix() }
    }
}
