//! Dense phase-1 simplex for `A x = b, x >= 0`.
//!
//! Pricing is by most negative reduced cost; after a run of degenerate pivots it falls
//! back to Bland's lowest-index rule, which cannot cycle.
//!
//! Artificial columns stay in the tableau, so on infeasibility the dual vector is read
//! off their reduced costs: with phase-1 costs 1 on artificials, `d_{n+i} = 1 - y_i`.
//! The Farkas vector `u = D y` (D = row sign flips making b >= 0) satisfies
//! `u^T A_j <= 0` for every column and `u^T b = w > 0`, where w is the optimal
//! artificial sum.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOptions {
    /// Stop as soon as the artificial sum drops below this value.
    pub feasibility_tol: f64,
    /// Entries smaller than this are treated as zero in pricing and ratio tests.
    pub pivot_tol: f64,
    /// Iteration cap is `iteration_factor * (rows + cols)`.
    pub iteration_factor: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { feasibility_tol: 1e-9, pivot_tol: 1e-11, iteration_factor: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Phase1 {
    Feasible { x: Vec<f64>, residual: f64 },
    /// `x` is the final basic solution, which misses the target by `residual` in L1.
    Infeasible { farkas: Vec<f64>, residual: f64, x: Vec<f64> },
}

/// Consecutive degenerate pivots after which pricing switches to Bland's rule.
const BLAND_AFTER: usize = 8;

/// Relative rhs perturbations tried in turn; the last (zero) is the plain method.
const PERTURBATIONS: [f64; 3] = [1e-7, 1e-10, 0.0];

/// Solves the phase-1 problem for columns given column-major in `cols` (m entries each).
///
/// Pivoting runs on a slightly perturbed right-hand side, which removes the degeneracy
/// of targets with many zero coordinates, while the unperturbed right-hand side is
/// carried along as a second column. The verdict is read from that column, which is
/// exact whenever the final basis is primal feasible for it; otherwise the solve is
/// repeated with a smaller perturbation.
pub fn phase_one(m: usize, cols: &[f64], b: &[f64], opts: &LpOptions) -> Result<Phase1> {
    if m == 0 || b.len() != m || !cols.len().is_multiple_of(m) {
        return Err(Error::invalid("inconsistent LP dimensions"));
    }
    let scale = b.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let mut last = None;
    for &eps in &PERTURBATIONS {
        match phase_one_perturbed(m, cols, b, eps * scale, opts)? {
            Some(done) => return Ok(done),
            None => last = Some(eps),
        }
    }
    Err(Error::Indeterminate(format!("no primal-feasible final basis (last perturbation {last:?})")))
}

fn phase_one_perturbed(m: usize, cols: &[f64], b: &[f64], eps: f64, opts: &LpOptions) -> Result<Option<Phase1>> {
    let n = cols.len() / m;
    let width = n + m;
    let (rp, ro) = (width, width + 1);
    let stride = width + 2;
    let mut t = vec![0.0; m * stride];
    let mut sign = vec![1.0; m];
    for i in 0..m {
        if b[i] < 0.0 {
            sign[i] = -1.0;
        }
        let row = &mut t[i * stride..(i + 1) * stride];
        for j in 0..n {
            row[j] = sign[i] * cols[j * m + i];
        }
        row[n + i] = 1.0;
        let jitter = 0.5 + (i as f64 * 0.618_033_988_749_895).fract();
        row[ro] = sign[i] * b[i];
        row[rp] = row[ro] + eps * jitter;
    }
    let mut obj = vec![0.0; stride];
    for i in 0..m {
        let row = &t[i * stride..(i + 1) * stride];
        for j in 0..n {
            obj[j] -= row[j];
        }
        obj[rp] -= row[rp];
        obj[ro] -= row[ro];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let cap = opts.iteration_factor * (m + n);
    let mut iter = 0usize;
    let mut degenerate_run = 0usize;
    loop {
        if -obj[rp] <= 0.0 {
            break;
        }
        // Dantzig pricing while the objective moves; Bland's rule during degenerate runs.
        let entering = if degenerate_run >= BLAND_AFTER {
            (0..width).find(|&j| obj[j] < -opts.pivot_tol)
        } else {
            let mut best: Option<usize> = None;
            for j in 0..width {
                if obj[j] < -opts.pivot_tol && best.is_none_or(|b| obj[j] < obj[b]) {
                    best = Some(j);
                }
            }
            best
        };
        let entering = match entering {
            Some(j) => j,
            None => break,
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = t[i * stride + entering];
            if a > opts.pivot_tol {
                let r = t[i * stride + rp] / a;
                let better = match leave {
                    None => true,
                    Some(l) => r < best - 1e-14 || (r <= best + 1e-14 && basis[i] < basis[l]),
                };
                if better {
                    best = r;
                    leave = Some(i);
                }
            }
        }
        let r = match leave {
            Some(r) => r,
            None => return Err(Error::Indeterminate("unbounded phase-1 ray".into())),
        };
        if best <= 1e-14 {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        pivot(&mut t, &mut obj, stride, r, entering);
        basis[r] = entering;
        iter += 1;
        if iter > cap {
            return Err(Error::IterationCap { cap });
        }
    }
    let neg_tol = 1e-9 * (1.0 + b.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
    if (0..m).any(|i| t[i * stride + ro] < -neg_tol) {
        return Ok(None);
    }
    let w = (-obj[ro]).max(0.0);
    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i * stride + ro].max(0.0);
        }
    }
    if w <= opts.feasibility_tol {
        Ok(Some(Phase1::Feasible { x, residual: w }))
    } else {
        let farkas = (0..m).map(|i| sign[i] * (1.0 - obj[n + i])).collect();
        Ok(Some(Phase1::Infeasible { farkas, residual: w, x }))
    }
}

fn pivot(t: &mut [f64], obj: &mut [f64], stride: usize, r: usize, c: usize) {
    let p = t[r * stride + c];
    for v in &mut t[r * stride..(r + 1) * stride] {
        *v /= p;
    }
    let (before, rest) = t.split_at_mut(r * stride);
    let (prow, after) = rest.split_at_mut(stride);
    let eliminate = |row: &mut [f64]| {
        let f = row[c];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            row[c] = 0.0;
        }
    };
    for row in before.chunks_mut(stride) {
        eliminate(row);
    }
    for row in after.chunks_mut(stride) {
        eliminate(row);
    }
    eliminate(obj);
}

/// Outcome of a convex-combination feasibility problem over a large column set.
#[derive(Clone, Debug, PartialEq)]
pub enum Combination {
    /// Nonnegative weights over all columns reproducing the target.
    Feasible { weights: Vec<f64>, residual: f64 },
    /// `u` with `u^T A_j <= 0` for every column and `u^T b = margin`; `approx` are the
    /// best weights found, missing the target by `residual` in L1.
    Infeasible { farkas: Vec<f64>, margin: f64, approx: Vec<f64>, residual: f64 },
}

/// Decides `A x = b, x >= 0` where row `sum_row` of A is all ones and `b[sum_row] = 1`.
/// Certificates are accepted once their margin exceeds `accept_margin`.
///
/// Large column sets are handled by column generation: the LP runs on a working set, and
/// the working Farkas vector is checked against every column. Shifting it along the
/// all-ones row turns it into a global certificate whenever no column violates it by more
/// than the artificial sum; otherwise the violating columns are added and the LP rerun.
pub fn convex_feasibility(
    m: usize,
    cols: &[f64],
    b: &[f64],
    sum_row: usize,
    accept_margin: f64,
    opts: &LpOptions,
) -> Result<Combination> {
    let n = cols.len() / m;
    if n <= 2 * m + 8 {
        let all: Vec<usize> = (0..n).collect();
        return solve_subset(m, cols, b, sum_row, &all, opts, n);
    }
    let mut working = initial_columns(m, cols, b, sum_row);
    let mut in_set = vec![false; n];
    for &j in &working {
        in_set[j] = true;
    }
    let all: Vec<usize> = (0..n).collect();
    let max_rounds = n / m.max(1) + 8;
    for _ in 0..max_rounds {
        match solve_subset(m, cols, b, sum_row, &working, opts, n)? {
            Combination::Infeasible { farkas, margin, .. } if margin <= accept_margin => {
                // The shifted certificate is not globally valid: pull in the columns that
                // violate the working one most.
                let value = dot(&farkas, b);
                let mut viol: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| !in_set[j])
                    .map(|j| (dot(&farkas, &cols[j * m..(j + 1) * m]), j))
                    .filter(|(v, _)| *v > value - accept_margin - 1e-12)
                    .collect();
                if viol.is_empty() {
                    return solve_subset(m, cols, b, sum_row, &all, opts, n);
                }
                viol.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                for &(_, j) in viol.iter().take(m.max(4)) {
                    in_set[j] = true;
                    working.push(j);
                }
            }
            done => return Ok(done),
        }
    }
    solve_subset(m, cols, b, sum_row, &all, opts, n)
}

/// Solves on a subset. An infeasible result carries the working Farkas vector shifted
/// along the all-ones row so that `max_j u^T A_j = 0` over *all* columns; its `margin`
/// is then `u^T b`, and a non-positive margin means the subset was too small.
fn solve_subset(
    m: usize,
    cols: &[f64],
    b: &[f64],
    sum_row: usize,
    subset: &[usize],
    opts: &LpOptions,
    n: usize,
) -> Result<Combination> {
    let mut sub = Vec::with_capacity(subset.len() * m);
    for &j in subset {
        sub.extend_from_slice(&cols[j * m..(j + 1) * m]);
    }
    match phase_one(m, &sub, b, opts)? {
        Phase1::Feasible { x, residual } => {
            let mut weights = vec![0.0; n];
            for (k, &j) in subset.iter().enumerate() {
                weights[j] = x[k];
            }
            Ok(Combination::Feasible { weights, residual })
        }
        Phase1::Infeasible { mut farkas, residual, x } => {
            let mut approx = vec![0.0; n];
            for (k, &j) in subset.iter().enumerate() {
                approx[j] = x[k];
            }
            let full_max = (0..n)
                .map(|j| dot(&farkas, &cols[j * m..(j + 1) * m]))
                .fold(f64::NEG_INFINITY, f64::max);
            farkas[sum_row] -= full_max;
            let margin = dot(&farkas, b);
            Ok(Combination::Infeasible { farkas, margin, approx, residual })
        }
    }
}

fn initial_columns(m: usize, cols: &[f64], b: &[f64], sum_row: usize) -> Vec<usize> {
    let n = cols.len() / m;
    let mut chosen: Vec<usize> = Vec::new();
    let push = |j: usize, chosen: &mut Vec<usize>| {
        if !chosen.contains(&j) {
            chosen.push(j);
        }
    };
    for i in 0..m {
        if i == sum_row {
            continue;
        }
        let (mut lo, mut hi) = (0, 0);
        for j in 1..n {
            let v = cols[j * m + i];
            if v > cols[hi * m + i] {
                hi = j;
            }
            if v < cols[lo * m + i] {
                lo = j;
            }
        }
        push(hi, &mut chosen);
        push(lo, &mut chosen);
    }
    let nearest = (0..n)
        .min_by(|&a, &c| {
            let da = linf(&cols[a * m..(a + 1) * m], b);
            let dc = linf(&cols[c * m..(c + 1) * m], b);
            da.total_cmp(&dc)
        })
        .unwrap_or(0);
    push(nearest, &mut chosen);
    chosen
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn columns(pts: &[[f64; 2]]) -> Vec<f64> {
        pts.iter().flat_map(|p| [1.0, p[0], p[1]]).collect()
    }

    #[test]
    fn triangle_member_weights_reproduce_target() {
        let cols = columns(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let b = [1.0, 0.25, 0.25];
        match phase_one(3, &cols, &b, &LpOptions::default()).unwrap() {
            Phase1::Feasible { x, .. } => {
                assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!((x[1] - 0.25).abs() < 1e-12 && (x[2] - 0.25).abs() < 1e-12);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn farkas_vector_separates() {
        let cols = columns(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let b = [1.0, 1.0, 1.0];
        match phase_one(3, &cols, &b, &LpOptions::default()).unwrap() {
            Phase1::Infeasible { farkas, residual, .. } => {
                assert!(residual > 0.0);
                for j in 0..3 {
                    assert!(dot(&farkas, &cols[j * 3..j * 3 + 3]) <= 1e-12);
                }
                assert!(dot(&farkas, &b) > 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn negative_rhs_rows_are_handled() {
        let cols = columns(&[[-1.0, -1.0], [-2.0, 0.0]]);
        let b = [1.0, -1.5, -0.5];
        assert!(matches!(
            phase_one(3, &cols, &b, &LpOptions::default()).unwrap(),
            Phase1::Feasible { .. }
        ));
    }

    #[test]
    fn column_generation_matches_full_solve() {
        let mut pts = Vec::new();
        for k in 0..200 {
            let t = k as f64 * 0.731;
            pts.push([t.cos() * (1.0 + 0.3 * (3.0 * t).sin()), t.sin()]);
        }
        let cols = columns(&pts);
        for target in [[0.1, 0.2], [1.5, 0.0], [0.0, 0.99], [-1.2, 0.5]] {
            let b = [1.0, target[0], target[1]];
            let full = phase_one(3, &cols, &b, &LpOptions::default()).unwrap();
            let cg = convex_feasibility(3, &cols, &b, 0, 1e-9, &LpOptions::default()).unwrap();
            match (full, cg) {
                (Phase1::Feasible { .. }, Combination::Feasible { weights, .. }) => {
                    for i in 0..3 {
                        let v: f64 = (0..pts.len()).map(|j| weights[j] * cols[j * 3 + i]).sum();
                        assert!((v - b[i]).abs() < 1e-8);
                    }
                }
                (Phase1::Infeasible { .. }, Combination::Infeasible { farkas, margin, .. }) => {
                    assert!(margin > 0.0);
                    for j in 0..pts.len() {
                        assert!(dot(&farkas, &cols[j * 3..j * 3 + 3]) <= 1e-9);
                    }
                    assert!(dot(&farkas, &b) >= margin - 1e-12);
                }
                (a, b) => panic!("disagreement: {a:?} vs {b:?}"),
            }
        }
    }
}
