//! Dense tableau simplex for packing programs `max 1^T w s.t. A w <= b,
//! w >= 0` with `A > 0` and `b > 0`, so the origin is a feasible start.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone)]
pub(crate) struct PackingSolution {
    /// Optimal `w`.
    pub primal: Vec<f64>,
    /// Optimal multipliers `u` of `A w <= b`.
    pub dual: Vec<f64>,
}

/// Solves the packing program with Bland's rule, then recomputes primal and
/// dual values from the final basis by direct elimination.
pub(crate) fn solve_packing(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<PackingSolution> {
    let basis = optimal_basis(a, rows, cols, b)?;
    refine(a, rows, cols, b, &basis)
}

/// Recomputes the solution for `b` from a basis found for (possibly
/// perturbed) right-hand side.
pub(crate) fn solve_packing_with_basis_of(
    a: &[f64],
    rows: usize,
    cols: usize,
    b: &[f64],
    basis_rhs: &[f64],
) -> Result<PackingSolution> {
    let basis = optimal_basis(a, rows, cols, basis_rhs)?;
    refine(a, rows, cols, b, &basis)
}

fn optimal_basis(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<Vec<usize>> {
    let width = cols + rows + 1;
    let mut t = vec![0.0; rows * width];
    for i in 0..rows {
        t[i * width..i * width + cols].copy_from_slice(&a[i * cols..(i + 1) * cols]);
        t[i * width + cols + i] = 1.0;
        t[i * width + width - 1] = b[i];
    }
    let mut obj = vec![0.0; width];
    obj[..cols].iter_mut().for_each(|c| *c = -1.0);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..width - 1).find(|&j| obj[j] < -PIVOT_EPS) else {
            return Ok(basis);
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = t[i * width + enter];
            if coef <= PIVOT_EPS {
                continue;
            }
            let ratio = t[i * width + width - 1] / coef;
            leave = match leave {
                None => Some((i, ratio)),
                Some((li, lr)) => {
                    let tie = (ratio - lr).abs() <= PIVOT_EPS * lr.abs().max(1.0);
                    if (tie && basis[i] < basis[li]) || (!tie && ratio < lr) {
                        Some((i, ratio))
                    } else {
                        Some((li, lr))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            return Err(Error::SolverFailure { gap: f64::INFINITY });
        };
        pivot(&mut t, &mut obj, width, rows, row, enter);
        basis[row] = enter;
    }
    Err(Error::SolverFailure { gap: f64::INFINITY })
}

fn pivot(t: &mut [f64], obj: &mut [f64], width: usize, rows: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for v in &mut t[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..rows {
        if i == row {
            continue;
        }
        let factor = t[i * width + col];
        if factor != 0.0 {
            for (v, pr) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                *v -= factor * pr;
            }
        }
    }
    let factor = obj[col];
    if factor != 0.0 {
        for (v, pr) in obj.iter_mut().zip(&pivot_row) {
            *v -= factor * pr;
        }
    }
}

/// Column `j` of `[A | I]`.
fn augmented_column(a: &[f64], rows: usize, cols: usize, j: usize) -> Vec<f64> {
    if j < cols {
        (0..rows).map(|i| a[i * cols + j]).collect()
    } else {
        let mut e = vec![0.0; rows];
        e[j - cols] = 1.0;
        e
    }
}

fn refine(a: &[f64], rows: usize, cols: usize, b: &[f64], basis: &[usize]) -> Result<PackingSolution> {
    // B is rows x rows with column k = augmented column basis[k].
    let columns: Vec<Vec<f64>> = basis.iter().map(|&j| augmented_column(a, rows, cols, j)).collect();
    let mut bmat = vec![0.0; rows * rows];
    for (k, col) in columns.iter().enumerate() {
        for i in 0..rows {
            bmat[i * rows + k] = col[i];
        }
    }
    let x_b = solve_dense(&bmat, rows, b)?;
    let mut bt = vec![0.0; rows * rows];
    for i in 0..rows {
        for k in 0..rows {
            bt[k * rows + i] = bmat[i * rows + k];
        }
    }
    let c_b: Vec<f64> = basis.iter().map(|&j| if j < cols { 1.0 } else { 0.0 }).collect();
    let dual = solve_dense(&bt, rows, &c_b)?;

    let mut primal = vec![0.0; cols];
    for (k, &j) in basis.iter().enumerate() {
        if j < cols {
            primal[j] = x_b[k].max(0.0);
        }
    }
    Ok(PackingSolution { primal, dual: dual.into_iter().map(|u| u.max(0.0)).collect() })
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(m: &[f64], n: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut a = m.to_vec();
    let mut x = rhs.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .expect("nonempty range");
        if a[p * n + k].abs() < 1e-300 {
            return Err(Error::SolverFailure { gap: f64::INFINITY });
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let factor = a[i * n + k] / a[k * n + k];
            if factor == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
            x[i] -= factor * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= a[k * n + j] * x[j];
        }
        x[k] = s / a[k * n + k];
    }
    Ok(x)
}
