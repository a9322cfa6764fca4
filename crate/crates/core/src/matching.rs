//! Maximum-weight perfect matching on a dense square matrix.
//!
//! The optimum value comes from the O(n^3) Hungarian method with potentials.
//! Among optimal permutations the lexicographically smallest one is returned:
//! rows are fixed one at a time to the smallest column that still admits an
//! optimal completion.

use crate::error::{Error, Result};

/// Minimum-cost assignment. Returns `row -> column` and the total cost.
fn hungarian_min(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based potentials, column 0 is a sentinel.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (assignment, total)
}

fn best_weight(weights: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| -weights[r][c]).collect())
        .collect();
    -hungarian_min(&cost).1
}

/// Permutation `perm` maximizing `sum_i weights[i][perm[i]]`, with that sum.
pub fn max_weight_perfect_matching(weights: &[Vec<f64>]) -> Result<(Vec<usize>, f64)> {
    let n = weights.len();
    for (row, w) in weights.iter().enumerate() {
        if w.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                row,
                cols: w.len(),
            });
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteWeight(row));
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let optimum = best_weight(weights, &all, &all);
    let scale: f64 = weights
        .iter()
        .flatten()
        .map(|x| x.abs())
        .fold(1.0, f64::max);
    let tol = 1e-9 * scale * (n.max(1) as f64);

    let mut perm = Vec::with_capacity(n);
    let mut free_cols = all.clone();
    let mut fixed = 0.0;
    for row in 0..n {
        let rest_rows: Vec<usize> = (row + 1..n).collect();
        let pick = free_cols
            .iter()
            .position(|&c| {
                let rest_cols: Vec<usize> = free_cols.iter().copied().filter(|&x| x != c).collect();
                fixed + weights[row][c] + best_weight(weights, &rest_rows, &rest_cols)
                    >= optimum - tol
            })
            // the optimal column is always admissible up to rounding
            .unwrap_or(0);
        let c = free_cols.remove(pick);
        fixed += weights[row][c];
        perm.push(c);
    }
    let total = perm.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
    Ok((perm, total))
}
