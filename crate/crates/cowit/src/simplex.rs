//! Small dense linear programs via the two-phase simplex method.
//!
//! The cutting-plane solvers in [`crate::compare`] and [`crate::robustness`]
//! repeatedly solve master problems with at most a few hundred rows and a
//! few dozen variables. A dense tableau with Bland's anti-cycling rule is
//! exact enough at that scale; the terminal basis is re-solved against the
//! original data to strip accumulated pivot roundoff.

/// Row sense for [`Constraint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Le,
    Ge,
    Eq,
}

/// One linear constraint `coeffs . x REL rhs` over variables `x >= 0`.
#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    /// Minimizer over the original variables and the attained objective.
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// Pivot threshold: entries smaller than this are treated as zero.
const EPS: f64 = 1e-11;
/// Phase-1 objective above this means the program is infeasible.
const FEAS_TOL: f64 = 1e-8;

/// Minimizes `costs . x` subject to `constraints` and `x >= 0`.
pub(crate) fn minimize(costs: &[f64], constraints: &[Constraint]) -> LpOutcome {
    let n = costs.len();
    let m = constraints.len();

    // Normalize rows to nonnegative rhs; a `>=` with zero rhs flips to `<=`
    // so it gets a slack instead of an artificial.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(m);
    for con in constraints {
        assert_eq!(con.coeffs.len(), n, "constraint arity must match cost vector");
        let (mut coeffs, mut rel, mut rhs) = (con.coeffs.clone(), con.rel, con.rhs);
        if rhs < 0.0 {
            for c in &mut coeffs {
                *c = -*c;
            }
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        if rhs == 0.0 && rel == Relation::Ge {
            for c in &mut coeffs {
                *c = -*c;
            }
            rel = Relation::Le;
        }
        rows.push((coeffs, rel, rhs));
    }

    // Column layout: originals, then one slack/surplus per inequality, then
    // one artificial per `>=`/`=` row.
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ntot = n + n_slack + n_art;

    let mut tableau = vec![vec![0.0; ntot + 1]; m];
    let mut basis = vec![0usize; m];
    let mut is_artificial = vec![false; ntot];
    let mut slack_idx = n;
    let mut art_idx = n + n_slack;
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        tableau[i][..n].copy_from_slice(coeffs);
        tableau[i][ntot] = *rhs;
        match rel {
            Relation::Le => {
                tableau[i][slack_idx] = 1.0;
                basis[i] = slack_idx;
                slack_idx += 1;
            }
            Relation::Ge => {
                tableau[i][slack_idx] = -1.0;
                slack_idx += 1;
                tableau[i][art_idx] = 1.0;
                is_artificial[art_idx] = true;
                basis[i] = art_idx;
                art_idx += 1;
            }
            Relation::Eq => {
                tableau[i][art_idx] = 1.0;
                is_artificial[art_idx] = true;
                basis[i] = art_idx;
                art_idx += 1;
            }
        }
    }
    // The original standard-form system, kept for terminal refinement.
    let original: Vec<Vec<f64>> = tableau.clone();

    // Phase 1: drive artificial variables to zero.
    if n_art > 0 {
        let phase1_costs: Vec<f64> =
            (0..ntot).map(|j| if is_artificial[j] { 1.0 } else { 0.0 }).collect();
        let mut reduced = reduced_costs(&phase1_costs, &tableau, &basis);
        let blocked = vec![false; ntot];
        if run_pivots(&mut tableau, &mut reduced, &mut basis, &blocked).is_err() {
            // The phase-1 objective is bounded below by zero, so a failed
            // ratio test is a stalled degenerate vertex: the incremental
            // reduced costs have drifted to noise. Reprice from scratch
            // and push once more; the infeasibility test below decides
            // correctly from wherever the pivots stop.
            let mut repriced = reduced_costs(&phase1_costs, &tableau, &basis);
            let _ = run_pivots(&mut tableau, &mut repriced, &mut basis, &blocked);
        }
        let infeasibility: f64 =
            basis.iter().enumerate().filter(|(_, &b)| is_artificial[b]).map(|(i, _)| tableau[i][ntot]).sum();
        if infeasibility > FEAS_TOL {
            return LpOutcome::Infeasible;
        }
        // Pivot leftover artificials out of the basis where possible; rows
        // that will not budge are redundant and stay inert.
        for i in 0..m {
            if !is_artificial[basis[i]] {
                continue;
            }
            if let Some(j) = (0..ntot).find(|&j| !is_artificial[j] && tableau[i][j].abs() > EPS) {
                pivot(&mut tableau, &mut basis, i, j);
            }
        }
    }

    // Phase 2: original objective, artificial columns barred from entering.
    let mut phase2_costs = vec![0.0; ntot];
    phase2_costs[..n].copy_from_slice(costs);
    let mut reduced = reduced_costs(&phase2_costs, &tableau, &basis);
    if run_pivots(&mut tableau, &mut reduced, &mut basis, &is_artificial).is_err() {
        // Distinguish true unboundedness from a stalled degenerate
        // vertex by repricing once; only a stall that survives fresh
        // reduced costs is reported as unbounded.
        let mut repriced = reduced_costs(&phase2_costs, &tableau, &basis);
        if run_pivots(&mut tableau, &mut repriced, &mut basis, &is_artificial).is_err() {
            return LpOutcome::Unbounded;
        }
    }

    // Refine the terminal basic solution against the original data: solve
    // B x_B = b to discard roundoff accumulated across pivots.
    let mut x = vec![0.0; ntot];
    match solve_basis_system(&original, &basis) {
        Some(xb) => {
            for (i, &b) in basis.iter().enumerate() {
                x[b] = xb[i];
            }
        }
        None => {
            for (i, &b) in basis.iter().enumerate() {
                x[b] = tableau[i][ntot];
            }
        }
    }
    for v in &mut x {
        if *v < 0.0 && *v > -1e-9 {
            *v = 0.0;
        }
    }
    let value = costs.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpOutcome::Optimal { x: x[..n].to_vec(), value }
}

/// Reduced-cost row `c_j - c_B . (B^-1 A)_j` for the current basis.
fn reduced_costs(costs: &[f64], tableau: &[Vec<f64>], basis: &[usize]) -> Vec<f64> {
    let ntot = costs.len();
    let mut reduced = costs.to_vec();
    reduced.push(0.0); // objective constant term, updated by pivots
    for (i, &b) in basis.iter().enumerate() {
        let cb = costs[b];
        if cb != 0.0 {
            for j in 0..=ntot {
                reduced[j] -= cb * tableau[i][j];
            }
        }
    }
    reduced
}

/// Pivots until optimal (`Ok`) or unbounded (`Err`). Dantzig's rule first,
/// Bland's rule after a burn-in to rule out cycling.
fn run_pivots(
    tableau: &mut [Vec<f64>],
    reduced: &mut [f64],
    basis: &mut [usize],
    blocked: &[bool],
) -> Result<(), ()> {
    let m = tableau.len();
    let ntot = reduced.len() - 1;
    let bland_after = 2 * (m + ntot) + 50;
    let hard_cap = 200 * (m + ntot) + 10_000;

    for iter in 0..hard_cap {
        let bland = iter >= bland_after;
        let mut entering = None;
        let mut best = -EPS;
        for j in 0..ntot {
            if blocked[j] || reduced[j] >= -EPS {
                continue;
            }
            if bland {
                entering = Some(j);
                break;
            }
            if reduced[j] < best {
                best = reduced[j];
                entering = Some(j);
            }
        }
        let Some(j) = entering else {
            return Ok(());
        };

        let mut leaving = None;
        let mut best_ratio = f64::INFINITY;
        for (i, row) in tableau.iter().enumerate() {
            if row[j] > EPS {
                let ratio = row[ntot] / row[j];
                let better = ratio < best_ratio - EPS
                    || (ratio < best_ratio + EPS
                        && leaving.map_or(true, |l: usize| basis[i] < basis[l]));
                if better {
                    best_ratio = ratio;
                    leaving = Some(i);
                }
            }
        }
        let Some(i) = leaving else {
            return Err(());
        };

        pivot_with_reduced(tableau, reduced, basis, i, j);
    }
    panic!("simplex failed to terminate within {hard_cap} pivots");
}

fn pivot_with_reduced(
    tableau: &mut [Vec<f64>],
    reduced: &mut [f64],
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    pivot(tableau, basis, row, col);
    let factor = reduced[col];
    if factor != 0.0 {
        let ncols = reduced.len();
        for j in 0..ncols {
            reduced[j] -= factor * tableau[row][j];
        }
    }
}

fn pivot(tableau: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let ncols = tableau[row].len();
    let scale = tableau[row][col];
    for j in 0..ncols {
        tableau[row][j] /= scale;
    }
    tableau[row][col] = 1.0;
    for i in 0..tableau.len() {
        if i == row {
            continue;
        }
        let factor = tableau[i][col];
        if factor != 0.0 {
            for j in 0..ncols {
                tableau[i][j] -= factor * tableau[row][j];
            }
            tableau[i][col] = 0.0;
        }
    }
    basis[row] = col;
}

/// Solves `B x_B = b` where `B` collects the basis columns of the original
/// standard-form system. Returns `None` when `B` is singular (redundant
/// constraint rows); callers then keep the tableau values.
fn solve_basis_system(original: &[Vec<f64>], basis: &[usize]) -> Option<Vec<f64>> {
    let m = original.len();
    let rhs_col = original[0].len() - 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for (k, &b) in basis.iter().enumerate() {
            a[i][k] = original[i][b];
        }
        a[i][m] = original[i][rhs_col];
    }
    for col in 0..m {
        let pivot_row = (col..m).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        for row in (col + 1)..m {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for j in col..=m {
                    a[row][j] -= factor * a[col][j];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = a[i][m];
        for j in (i + 1)..m {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}
