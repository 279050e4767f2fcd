//! Ridge regression by explicit normal equations and by leave-one-out refits.

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(row);
            for (target, source) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *target -= f * source;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Columns scaled to zero mean and unit population variance; constant
/// columns become zero.
pub fn standardize(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, p) = (x.len(), x[0].len());
    let mut z = vec![vec![0.0; p]; n];
    for j in 0..p {
        let mean = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let sd = (x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        for i in 0..n {
            z[i][j] = if sd > 1e-12 { (x[i][j] - mean) / sd } else { 0.0 };
        }
    }
    z
}

/// Weights and intercept minimising `|y - b - z w|^2 + lambda |w|^2` over the
/// rows in `rows`, with the intercept unpenalised.
pub fn ridge_normal(z: &[Vec<f64>], y: &[f64], lambda: f64, rows: &[usize]) -> (Vec<f64>, f64) {
    let p = z[0].len();
    let aug = |i: usize, k: usize| if k == 0 { 1.0 } else { z[i][k - 1] };
    let mut a = vec![vec![0.0; p + 1]; p + 1];
    let mut b = vec![0.0; p + 1];
    for (r, (a_row, b_r)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
        for (c, cell) in a_row.iter_mut().enumerate() {
            *cell = rows.iter().map(|&i| aug(i, r) * aug(i, c)).sum();
        }
        if r > 0 {
            a_row[r] += lambda;
        }
        *b_r = rows.iter().map(|&i| aug(i, r) * y[i]).sum();
    }
    let sol = solve(a, b);
    (sol[1..].to_vec(), sol[0])
}

/// Sum of squared held-out residuals, refitting once per left-out row.
pub fn loo_sse(z: &[Vec<f64>], y: &[f64], lambda: f64) -> f64 {
    (0..z.len())
        .map(|k| {
            let rows: Vec<usize> = (0..z.len()).filter(|&i| i != k).collect();
            let (w, b) = ridge_normal(z, y, lambda, &rows);
            let pred = b + w.iter().zip(&z[k]).map(|(a, v)| a * v).sum::<f64>();
            (y[k] - pred).powi(2)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let x = solve(vec![vec![0.0, 2.0], vec![1.0, 1.0]], vec![4.0, 3.0]);
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn unpenalised_fit_interpolates_a_line() {
        let z = standardize(&[vec![0.0], vec![1.0], vec![2.0]]);
        let y = [1.0, 3.0, 5.0];
        let (w, b) = ridge_normal(&z, &y, 0.0, &[0, 1, 2]);
        assert!((b - 3.0).abs() < 1e-12);
        assert!((w[0] - 2.0 * (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
