//! Dense least squares by column-pivoted Householder QR.
//!
//! Small systems only (hundreds of rows, tens of columns); pivoting is used
//! to detect rank deficiency and report which column caused it.

/// Minimize ‖A·x − b‖₂. `a` is column-major with `rows × cols` entries and is
/// destroyed; so is `b`. On rank deficiency returns `Err(j)` with the
/// original index of the offending column.
pub fn solve_least_squares(
    rows: usize,
    cols: usize,
    a: &mut [f64],
    b: &mut [f64],
    rank_tol: f64,
) -> Result<Vec<f64>, usize> {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    assert!(rows >= cols && cols > 0);

    let col = |j: usize| j * rows;
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut first_pivot_norm = 0.0f64;

    for k in 0..cols {
        // Pivot: the column with the largest remaining subnorm.
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..cols {
            let norm: f64 = a[col(j) + k..col(j) + rows].iter().map(|v| v * v).sum();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        if best != k {
            perm.swap(k, best);
            let (lo, hi) = (k.min(best), k.max(best));
            let (head, tail) = a.split_at_mut(col(hi));
            head[col(lo)..col(lo) + rows].swap_with_slice(&mut tail[..rows]);
        }
        let sub_norm = best_norm.max(0.0).sqrt();
        if k == 0 {
            first_pivot_norm = sub_norm;
        }
        if sub_norm <= rank_tol * first_pivot_norm || sub_norm == 0.0 {
            return Err(perm[k]);
        }

        // Householder vector for the k-th subcolumn, stored in place below
        // the diagonal; the diagonal keeps R[k][k].
        let alpha = if a[col(k) + k] >= 0.0 { -sub_norm } else { sub_norm };
        let head = a[col(k) + k] - alpha;
        a[col(k) + k] = head;
        let vnorm2: f64 = a[col(k) + k..col(k) + rows].iter().map(|v| v * v).sum();
        if vnorm2 == 0.0 {
            return Err(perm[k]);
        }
        let beta = 2.0 / vnorm2;

        // Apply I − β v vᵀ to trailing columns and the right-hand side.
        for j in k + 1..cols {
            let mut dot = 0.0;
            for i in k..rows {
                dot += a[col(k) + i] * a[col(j) + i];
            }
            let scale = beta * dot;
            for i in k..rows {
                a[col(j) + i] -= scale * a[col(k) + i];
            }
        }
        let mut dot = 0.0;
        for i in k..rows {
            dot += a[col(k) + i] * b[i];
        }
        let scale = beta * dot;
        for i in k..rows {
            b[i] -= scale * a[col(k) + i];
        }
        a[col(k) + k] = alpha;
    }

    // Back substitution on the upper triangle.
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut acc = b[k];
        for j in k + 1..cols {
            acc -= a[col(j) + k] * x[j];
        }
        x[k] = acc / a[col(k) + k];
    }

    // Undo the pivoting.
    let mut out = vec![0.0; cols];
    for (k, &j) in perm.iter().enumerate() {
        out[j] = x[k];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn recovers_exact_solution_of_square_system() {
        // 3x3 well-conditioned system.
        let rows = 3;
        let cols = 3;
        // Columns of A.
        let mut a = vec![2.0, 1.0, 0.0, /*c1*/ 1.0, 3.0, 1.0, /*c2*/ 0.0, 1.0, 4.0];
        let x_true = [1.0, -2.0, 0.5];
        let mut b = vec![0.0; 3];
        for j in 0..cols {
            for i in 0..rows {
                b[i] += a[j * rows + i] * x_true[j];
            }
        }
        let x = solve_least_squares(rows, cols, &mut a, &mut b, 1e-12).unwrap();
        for (got, want) in x.iter().zip(x_true) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn planted_overdetermined_recovery() {
        let mut rng = CounterRng::new(3, 0);
        let rows = 60;
        let cols = 7;
        let x_true: Vec<f64> = (0..cols).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let mut a = vec![0.0; rows * cols];
        for v in a.iter_mut() {
            *v = rng.uniform_in(-1.0, 1.0);
        }
        let mut b = vec![0.0; rows];
        for j in 0..cols {
            for i in 0..rows {
                b[i] += a[j * rows + i] * x_true[j];
            }
        }
        let x = solve_least_squares(rows, cols, &mut a, &mut b, 1e-12).unwrap();
        for (got, want) in x.iter().zip(&x_true) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn least_squares_minimizes_residual() {
        // Fit a line through noisy points and compare with the normal
        // equations solved by hand.
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [0.1, 0.9, 2.2, 2.8, 4.1];
        let rows = xs.len();
        let mut a = vec![0.0; rows * 2];
        for i in 0..rows {
            a[i] = 1.0;
            a[rows + i] = xs[i];
        }
        let mut b = ys.to_vec();
        let x = solve_least_squares(rows, 2, &mut a, &mut b, 1e-12).unwrap();
        // Normal equations.
        let n = rows as f64;
        let sx: f64 = xs.iter().sum();
        let sxx: f64 = xs.iter().map(|v| v * v).sum();
        let sy: f64 = ys.iter().sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(u, v)| u * v).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        assert!((x[0] - intercept).abs() < 1e-12);
        assert!((x[1] - slope).abs() < 1e-12);
    }

    #[test]
    fn duplicate_column_reports_original_index() {
        let rows = 10;
        let cols = 3;
        let mut rng = CounterRng::new(8, 0);
        let c0: Vec<f64> = (0..rows).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let mut a = Vec::new();
        a.extend_from_slice(&c0);
        a.extend(c0.iter().map(|v| 2.0 * v)); // column 1 = 2 × column 0
        a.extend((0..rows).map(|_| rng.uniform_in(-1.0, 1.0)));
        let mut b: Vec<f64> = (0..rows).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let err = solve_least_squares(rows, cols, &mut a, &mut b, 1e-10).unwrap_err();
        // Either of the two dependent columns may surface, never column 2.
        assert!(err == 0 || err == 1, "offending column: {err}");
    }
}
