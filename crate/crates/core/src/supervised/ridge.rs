//! Ridge regression read-out with exact leave-one-out selection of the
//! penalty.

use nalgebra::{DMatrix, DVector};

use crate::data::{ClassLabels, LabelVector};
use crate::error::{Error, Result};

/// 10 log-spaced penalties from 1e-3 to 1e3.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..10).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 9.0)).collect()
}

/// A fitted linear model on standardized features. Class models hold one
/// row of weights per class (one-vs-rest); regression models hold one row.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub lambda_selected: f64,
    pub feature_means: Vec<f64>,
    pub feature_sds: Vec<f64>,
    /// Class alphabet for classification models.
    pub classes: Option<Vec<String>>,
}

impl RidgeModel {
    pub fn n_features(&self) -> usize {
        self.feature_means.len()
    }

    fn standardize_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.feature_means.iter().zip(&self.feature_sds))
            .map(|(&x, (&m, &sd))| if sd > 0.0 { (x - m) / sd } else { 0.0 })
            .collect()
    }

    /// Per-output linear scores of one raw feature row.
    pub fn scores(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_features() {
            return Err(Error::FeatureWidth {
                expected: self.n_features(),
                found: row.len(),
            });
        }
        let z = self.standardize_row(row);
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| b + w.iter().zip(&z).map(|(a, x)| a * x).sum::<f64>())
            .collect())
    }
}

fn check_matrix(features: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n = features.len();
    let p = features.first().map_or(0, Vec::len);
    if features.iter().any(|r| r.len() != p) {
        return Err(Error::Consistency("feature rows differ in width".into()));
    }
    if features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("features must be finite"));
    }
    Ok((n, p))
}

/// Targets as an n × q matrix: ±1 one-vs-rest columns for classes.
fn target_matrix(targets: &LabelVector, n: usize) -> Result<(DMatrix<f64>, Option<Vec<String>>)> {
    targets.check_len(n)?;
    match targets {
        LabelVector::Class(c) => {
            let q = c.n_classes();
            let y = DMatrix::from_fn(n, q, |i, k| if c.codes()[i] == k { 1.0 } else { -1.0 });
            Ok((y, Some(c.alphabet().to_vec())))
        }
        LabelVector::Target(t) => {
            if t.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("targets must be finite"));
            }
            Ok((DMatrix::from_column_slice(n, 1, t), None))
        }
        LabelVector::None => Err(Error::KindMismatch("ridge needs class or target labels".into())),
    }
}

/// Leave-one-out mean squared error for each penalty, from the SVD of the
/// centred design.
fn loo_errors(u: &DMatrix<f64>, s: &DVector<f64>, yc: &DMatrix<f64>, grid: &[f64], rank_tol: f64) -> Vec<f64> {
    let n = u.nrows();
    let uty = u.transpose() * yc;
    grid.iter()
        .map(|&lambda| {
            let shrink = DVector::from_iterator(
                s.len(),
                s.iter().map(|&sk| {
                    if sk > rank_tol {
                        sk * sk / (sk * sk + lambda)
                    } else {
                        0.0
                    }
                }),
            );
            let mut scaled = uty.clone();
            for (k, mut row) in scaled.row_iter_mut().enumerate() {
                row *= shrink[k];
            }
            let fitted = u * scaled;
            let mut total = 0.0;
            for i in 0..n {
                let h = 1.0 / n as f64 + (0..s.len()).map(|k| u[(i, k)] * u[(i, k)] * shrink[k]).sum::<f64>();
                let denom = 1.0 - h;
                if denom <= 1e-12 {
                    return f64::INFINITY;
                }
                for c in 0..yc.ncols() {
                    let e = (yc[(i, c)] - fitted[(i, c)]) / denom;
                    total += e * e;
                }
            }
            let err = total / (n * yc.ncols()) as f64;
            if err.is_finite() {
                err
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// Solves `(ZᵀZ + λI) β = Zᵀ Y`. Positive penalties use a Cholesky solve of
/// the smaller of the primal and dual systems; a zero penalty uses the
/// pseudo-inverse.
fn solve(z: &DMatrix<f64>, yc: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let (n, p) = z.shape();
    if lambda > 0.0 {
        let solved = if p <= n {
            let a = z.transpose() * z + DMatrix::identity(p, p) * lambda;
            a.cholesky().map(|ch| ch.solve(&(z.transpose() * yc)))
        } else {
            let k = z * z.transpose() + DMatrix::identity(n, n) * lambda;
            k.cholesky().map(|ch| z.transpose() * ch.solve(yc))
        };
        if let Some(beta) = solved {
            return beta;
        }
    }
    let svd = z.clone().svd(true, true);
    let tol = rank_tolerance(&svd.singular_values, n, p);
    let (u, vt) = (svd.u.expect("u computed"), svd.v_t.expect("v_t computed"));
    let mut uty = u.transpose() * yc;
    for (k, mut row) in uty.row_iter_mut().enumerate() {
        let sk = svd.singular_values[k];
        row *= if sk > tol { sk / (sk * sk + lambda) } else { 0.0 };
    }
    vt.transpose() * uty
}

fn rank_tolerance(s: &DVector<f64>, n: usize, p: usize) -> f64 {
    s.max() * n.max(p) as f64 * f64::EPSILON
}

/// Fits a ridge model, choosing the penalty from `lambda_grid` by exact
/// leave-one-out error (ties to the earliest grid entry).
pub fn ridge_fit(features: &[Vec<f64>], targets: &LabelVector, lambda_grid: &[f64]) -> Result<RidgeModel> {
    let (n, p) = check_matrix(features)?;
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "ridge needs at least 2 cases, got {n}"
        )));
    }
    let (y, classes) = target_matrix(targets, n)?;
    if lambda_grid.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    let positive = classes.is_some();
    for &l in lambda_grid {
        if !l.is_finite() || l < 0.0 || (positive && l == 0.0) {
            return Err(Error::invalid(format!("penalty {l} not allowed")));
        }
    }

    let mut means = vec![0.0; p];
    let mut sds = vec![0.0; p];
    for j in 0..p {
        let m = features.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = features.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n as f64;
        means[j] = m;
        sds[j] = if var.sqrt() > 1e-12 { var.sqrt() } else { 0.0 };
    }
    let bias: Vec<f64> = y.column_iter().map(|c| c.mean()).collect();
    let mut yc = y.clone();
    for (mut col, b) in yc.column_iter_mut().zip(&bias) {
        col.add_scalar_mut(-b);
    }

    if sds.iter().all(|&s| s == 0.0) {
        // Constant features carry no signal; a regressor falls back to its mean.
        if positive {
            return Err(Error::DegenerateFeatures);
        }
        return Ok(RidgeModel {
            weights: vec![vec![0.0; p]],
            bias,
            lambda_selected: lambda_grid[0],
            feature_means: means,
            feature_sds: sds,
            classes,
        });
    }

    let z = DMatrix::from_fn(n, p, |i, j| {
        if sds[j] > 0.0 {
            (features[i][j] - means[j]) / sds[j]
        } else {
            0.0
        }
    });
    let lambda_selected = if lambda_grid.len() == 1 {
        lambda_grid[0]
    } else {
        let svd = z.clone().svd(true, false);
        let tol = rank_tolerance(&svd.singular_values, n, p);
        let errors = loo_errors(&svd.u.expect("u computed"), &svd.singular_values, &yc, lambda_grid, tol);
        let mut best = 0;
        for (i, &e) in errors.iter().enumerate() {
            if e < errors[best] {
                best = i;
            }
        }
        lambda_grid[best]
    };
    let beta = solve(&z, &yc, lambda_selected);
    let weights = beta.column_iter().map(|c| c.iter().copied().collect()).collect();
    Ok(RidgeModel {
        weights,
        bias,
        lambda_selected,
        feature_means: means,
        feature_sds: sds,
        classes,
    })
}

/// Index of the largest score; ties go to the lowest index.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn ridge_predict(model: &RidgeModel, features: &[Vec<f64>]) -> Result<LabelVector> {
    let scores = features.iter().map(|r| model.scores(r)).collect::<Result<Vec<_>>>()?;
    Ok(match &model.classes {
        Some(alphabet) => {
            let codes = scores.iter().map(|s| argmax(s)).collect();
            LabelVector::Class(ClassLabels::new(alphabet.clone(), codes)?)
        }
        None => LabelVector::Target(scores.iter().map(|s| s[0]).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn target(v: &[f64]) -> LabelVector {
        LabelVector::Target(v.to_vec())
    }

    #[test]
    fn default_grid_endpoints() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[9] - 1e3).abs() < 1e-9);
    }

    #[test]
    fn near_exact_linear_fit() {
        let m = ridge_fit(&[vec![1.0], vec![2.0]], &target(&[1.0, 2.0]), &[1e-8]).unwrap();
        let p = ridge_predict(&m, &[vec![3.0]]).unwrap();
        assert!((p.as_target().unwrap()[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn duplicate_columns_give_finite_solution() {
        let x = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![4.0, 4.0]];
        let m = ridge_fit(&x, &target(&[1.0, 0.0, 3.0]), &default_lambda_grid()).unwrap();
        assert!(m.weights[0].iter().all(|w| w.is_finite()));
    }

    #[test]
    fn zero_penalty_interpolates_and_recovers_labels() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0], vec![3.0, -1.0]];
        let labels = LabelVector::Class(ClassLabels::from_text(&["a", "b", "a", "c"]));
        let m = ridge_fit(&x, &labels, &[1e-10]).unwrap();
        assert_eq!(ridge_predict(&m, &x).unwrap(), labels);
        let t = target(&[3.0, -1.0, 2.0, 5.0]);
        let m = ridge_fit(
            &[
                vec![1.0, 0.0, 0.5],
                vec![0.0, 1.0, 2.0],
                vec![2.0, 3.0, 0.0],
                vec![5.0, 1.0, 1.0],
            ],
            &t,
            &[0.0],
        )
        .unwrap();
        let fitted = m.scores(&[1.0, 0.0, 0.5]).unwrap()[0];
        assert!((fitted - 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_row_picks_largest_bias() {
        let x = vec![vec![1.0], vec![-1.0], vec![1.0], vec![-1.0], vec![0.5]];
        let labels = LabelVector::Class(ClassLabels::from_text(&["a", "b", "b", "b", "a"]));
        let m = ridge_fit(&x, &labels, &[1.0]).unwrap();
        let at_mean = m.feature_means.clone();
        let pred = ridge_predict(&m, &[at_mean]).unwrap();
        let expected = argmax(&m.bias);
        assert_eq!(pred.as_class().unwrap().codes(), &[expected]);
        assert_eq!(expected, 1);
    }

    #[test]
    fn normal_equation_residual_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(n, p) in &[(12, 5), (6, 20)] {
            let x: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..p).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let m = ridge_fit(&x, &target(&y), &default_lambda_grid()).unwrap();
            let z = DMatrix::from_fn(n, p, |i, j| (x[i][j] - m.feature_means[j]) / m.feature_sds[j]);
            let yc = DVector::from_iterator(n, y.iter().map(|v| v - m.bias[0]));
            let beta = DVector::from_vec(m.weights[0].clone());
            let lhs = (z.transpose() * &z + DMatrix::identity(p, p) * m.lambda_selected) * beta;
            let rhs = z.transpose() * yc;
            assert!((lhs - &rhs).amax() <= 1e-8 * (1.0 + rhs.amax()));
        }
    }

    #[test]
    fn loo_matches_refitting() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 8;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lambda = 0.7;
        // brute force with the standardization held fixed at the full-data values
        let full = ridge_fit(&x, &target(&y), &[lambda]).unwrap();
        let z: Vec<Vec<f64>> = x.iter().map(|r| full.standardize_row(r)).collect();
        let mut brute = 0.0;
        for i in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let a = DMatrix::from_fn(n - 1, 4, |r, c| if c == 0 { 1.0 } else { z[keep[r]][c - 1] });
            let pen = DMatrix::from_fn(4, 4, |r, c| if r == c && r > 0 { lambda } else { 0.0 });
            let b = DVector::from_iterator(n - 1, keep.iter().map(|&k| y[k]));
            let coef = (a.transpose() * &a + pen).lu().solve(&(a.transpose() * b)).unwrap();
            let pred = coef[0] + (0..3).map(|j| coef[j + 1] * z[i][j]).sum::<f64>();
            brute += (y[i] - pred).powi(2);
        }
        brute /= n as f64;
        let zm = DMatrix::from_fn(n, 3, |i, j| z[i][j]);
        let svd = zm.clone().svd(true, false);
        let yc = DMatrix::from_iterator(n, 1, y.iter().map(|v| v - full.bias[0]));
        let loo = loo_errors(&svd.u.unwrap(), &svd.singular_values, &yc, &[lambda], 0.0)[0];
        assert!((loo - brute).abs() < 1e-10, "{loo} vs {brute}");
    }

    #[test]
    fn degenerate_features() {
        let x = vec![vec![1.0, 2.0]; 3];
        let labels = LabelVector::Class(ClassLabels::from_text(&["a", "b", "a"]));
        assert_eq!(ridge_fit(&x, &labels, &[1.0]), Err(Error::DegenerateFeatures));
        let m = ridge_fit(&x, &target(&[1.0, 2.0, 6.0]), &[1.0]).unwrap();
        assert_eq!(m.scores(&[1.0, 2.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn errors() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            ridge_fit(&x[..1], &target(&[1.0]), &[1.0]),
            Err(Error::InsufficientData(_))
        ));
        assert!(ridge_fit(&x, &target(&[1.0, 2.0]), &[]).is_err());
        let labels = LabelVector::Class(ClassLabels::from_text(&["a", "b"]));
        assert!(ridge_fit(&x, &labels, &[0.0]).is_err());
        assert!(matches!(
            ridge_fit(&x, &LabelVector::None, &[1.0]),
            Err(Error::KindMismatch(_))
        ));
        let m = ridge_fit(&x, &labels, &[1.0]).unwrap();
        assert_eq!(
            ridge_predict(&m, &[vec![1.0, 2.0]]),
            Err(Error::FeatureWidth { expected: 1, found: 2 })
        );
    }
}
