//! Robustness of coherence via cutting planes.
//!
//! The robustness of a state `rho` is the least `s >= 0` such that
//! `(rho + s tau) / (1 + s)` is incoherent for some state `tau` —
//! equivalently, the optimal value of
//!
//! ```text
//! minimize  tr(D) - 1   over diagonal D >= 0 with D - rho PSD.
//! ```
//!
//! `D - rho >= 0` is an infinite family of linear constraints
//! `sum_i |v_i|^2 D_ii >= <v|rho|v>`, one per unit vector `v`, so the
//! program is solved by cutting planes: solve the LP over the cuts
//! collected so far, then let the most negative eigenvectors of
//! `D - rho` supply new cuts. Every LP value bounds the optimum from
//! below; shifting an iterate by its eigenvalue deficit gives a feasible
//! point and an upper bound, and the two meet at the reported `gap`.
//!
//! The optimizer `D` carries everything else: `s = tr(D) - 1`, the
//! optimal mixing partner `tau = (D - rho) / s`, and the incoherent
//! landing point `delta = D / (1 + s)`.

use num_complex::Complex64;

use crate::compare::{compare_two_states, StateVerdict};
use crate::error::{Error, Result};
use crate::mat::{DensityMatrix, HermitianMatrix, IncoherentState};
use crate::simplex::{minimize, Constraint, LpOutcome, Relation};
use crate::witness::is_coherent;

/// The solver drives the certified gap below this before stopping.
const GAP_TOL: f64 = 1e-9;
/// Hard budget on cutting-plane rounds.
const MAX_ROUNDS: usize = 500;
/// Eigenvalues of `D - rho` below minus this spawn cuts.
const CUT_EIG_TOL: f64 = 1e-12;
/// Cuts idle for this many consecutive solves may be dropped.
const IDLE_LIMIT: u32 = 5;
/// `tau` is only well defined when the robustness exceeds this.
const TAU_MIN: f64 = 1e-6;
/// Mixture weights recovered alongside `tau` must match `1/(1+s)` within this.
const LINK_TOL: f64 = 1e-6;

/// Solution of the robustness program for one state.
#[derive(Debug, Clone)]
pub struct RobustnessResult {
    /// The robustness `s`: distance to incoherence under mixing.
    pub value: f64,
    /// Diagonal of the optimal (feasible) `D`.
    pub diagonal: Vec<f64>,
    /// The optimal mixing partner `(D - rho) / s`; absent when `s <= 1e-6`
    /// (the quotient degenerates as `s -> 0`).
    pub tau: Option<DensityMatrix>,
    /// The incoherent state `D / (1 + s)` that the mixture lands on.
    pub delta: IncoherentState,
    /// Certified optimality gap (upper minus lower bound).
    pub gap: f64,
    /// False when the round budget ran out before the gap closed; the
    /// reported value is still feasible, just possibly not optimal.
    pub converged: bool,
}

struct CutRow {
    coeffs: Vec<f64>,
    rhs: f64,
    idle: u32,
}

/// Computes the robustness of coherence of `rho`.
///
/// Incoherent inputs short-circuit to `s = 0`. Otherwise the reported
/// `value` always comes from a strictly feasible `D` (so `value` is an
/// upper bound on the true robustness even if `converged` is false), and
/// `gap` certifies how far it can be from optimal.
pub fn robustness(rho: &DensityMatrix) -> RobustnessResult {
    robustness_with_budget(rho, MAX_ROUNDS)
}

/// [`robustness`] with a caller-chosen cap on cutting rounds (the default
/// is 500). Tighter caps can leave `converged` false; the reported value
/// and gap stay honest either way.
pub fn robustness_with_budget(rho: &DensityMatrix, max_rounds: usize) -> RobustnessResult {
    let d = rho.dim();
    if !is_coherent(rho) {
        let diagonal = rho.diagonal();
        return RobustnessResult {
            value: 0.0,
            diagonal: diagonal.clone(),
            tau: None,
            delta: IncoherentState::new(diagonal).expect("diagonal of a state"),
            gap: 0.0,
            converged: true,
        };
    }
    let rho_diag = rho.diagonal();

    // Basis-vector cuts `D_ii >= rho_ii`, plus one phase-aligned pair cut
    // per coherent entry: for v = (e_i + w e_j)/sqrt(2) with w the phase
    // of rho_ij, the cut reads (D_ii + D_jj)/2 >= (rho_ii + rho_jj)/2 +
    // |rho_ij|. For a qubit that pair cut is already the whole program.
    let mut cuts: Vec<CutRow> = Vec::new();
    for i in 0..d {
        if rho_diag[i] > 1e-14 {
            let mut coeffs = vec![0.0; d];
            coeffs[i] = 1.0;
            cuts.push(CutRow { coeffs, rhs: rho_diag[i], idle: 0 });
        }
    }
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    for i in 0..d {
        for j in i + 1..d {
            let entry = rho.matrix().get(i, j);
            if entry.norm() <= 1e-14 {
                continue;
            }
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[i] = Complex64::new(inv_sqrt2, 0.0);
            v[j] = (entry / entry.norm()) * inv_sqrt2;
            let mut coeffs = vec![0.0; d];
            coeffs[i] = 0.5;
            coeffs[j] = 0.5;
            cuts.push(CutRow { coeffs, rhs: rho.matrix().expectation(&v), idle: 0 });
        }
    }

    // Gershgorin point: D - rho diagonally dominant, hence feasible.
    let mut best_feasible: Vec<f64> = (0..d)
        .map(|i| {
            rho_diag[i]
                + (0..d)
                    .filter(|&j| j != i)
                    .map(|j| rho.matrix().get(i, j).norm())
                    .sum::<f64>()
        })
        .collect();
    let mut ub: f64 = best_feasible.iter().sum::<f64>() - 1.0;
    let mut lb = f64::NEG_INFINITY;
    let mut converged = false;

    for _ in 0..max_rounds {
        let constraints: Vec<Constraint> = cuts
            .iter()
            .map(|c| Constraint { coeffs: c.coeffs.clone(), rel: Relation::Ge, rhs: c.rhs })
            .collect();
        let costs = vec![1.0; d];
        let hat = match minimize(&costs, &constraints) {
            LpOutcome::Optimal { x, value } => {
                // Relaxation of the full program: its value bounds below.
                // The max over rounds stays valid even after cut drops.
                lb = lb.max(value - 1.0);
                x
            }
            _ => unreachable!("cut program is feasible and bounded below by zero"),
        };

        for cut in &mut cuts {
            let slack: f64 =
                cut.coeffs.iter().zip(&hat).map(|(c, x)| c * x).sum::<f64>() - cut.rhs;
            if slack > 1e-9 {
                cut.idle += 1;
            } else {
                cut.idle = 0;
            }
        }

        let gap_matrix = HermitianMatrix::from_diagonal(&hat).sub(rho.matrix());
        let eig = gap_matrix.eig();
        let deficit = (-eig.min_eigenvalue()).max(0.0);

        // Shifting the iterate by its eigenvalue deficit restores
        // feasibility and gives the upper bound.
        let shifted_total: f64 = hat.iter().sum::<f64>() + deficit * d as f64 - 1.0;
        if shifted_total < ub {
            ub = shifted_total;
            best_feasible = hat.iter().map(|x| x + deficit).collect();
        }
        if ub - lb <= GAP_TOL {
            converged = true;
            break;
        }

        for k in 0..d {
            if eig.eigenvalues()[k] >= -CUT_EIG_TOL {
                break;
            }
            let v = eig.eigenvector(k);
            let rhs = rho.matrix().expectation(v);
            if rhs > 1e-14 {
                let coeffs: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
                cuts.push(CutRow { coeffs, rhs, idle: 0 });
            }
        }
        if cuts.len() > 4 * d * d {
            cuts.retain(|c| c.idle < IDLE_LIMIT);
        }
    }

    let s = ub;
    let tau = if s > TAU_MIN {
        let diff = HermitianMatrix::from_diagonal(&best_feasible).sub(rho.matrix());
        let trace = diff.trace();
        Some(
            DensityMatrix::new(diff.scaled(1.0 / trace))
                .expect("shifted optimizer minus the state is PSD with unit trace"),
        )
    } else {
        None
    };
    let delta = IncoherentState::new(best_feasible.iter().map(|x| x / (1.0 + s)).collect())
        .expect("feasible diagonal scaled to unit sum");
    RobustnessResult { value: s, diagonal: best_feasible, tau, delta, gap: ub - lb, converged }
}

/// Closed-form robustness of a pure state: `(sum_i |psi_i|)^2 - 1`.
/// Requires `psi` normalized within 1e-10.
pub fn pure_state_robustness(psi: &[Complex64]) -> Result<f64> {
    if psi.len() < 2 {
        return Err(Error::DimensionTooSmall(psi.len()));
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitVector(norm));
    }
    let amplitude_sum: f64 = psi.iter().map(|z| z.norm()).sum();
    Ok(amplitude_sum * amplitude_sum - 1.0)
}

/// Checks the link between robustness and comparability: the optimal
/// mixing partner `tau` must be incomparable to `rho` (their mixture at
/// weight `t = 1/(1+s)` dephases), and the recovered weight must match.
///
/// Fails with [`Error::TauUndefined`] when the robustness is too small
/// for `tau` to exist (at or below 1e-6). Returns whether both the
/// verdict and the weight check out.
pub fn verify_minimizer_incomparable(rho: &DensityMatrix) -> Result<bool> {
    let result = robustness(rho);
    let Some(tau) = result.tau else {
        return Err(Error::TauUndefined(result.value));
    };
    let report = compare_two_states(rho, &tau)?;
    if report.verdict != StateVerdict::Incomparable {
        return Ok(false);
    }
    let expected = 1.0 / (1.0 + result.value);
    let weight = report.mixture_certificate.expect("incomparable verdicts carry the mixture");
    Ok((weight.weights()[0] - expected).abs() <= LINK_TOL)
}
