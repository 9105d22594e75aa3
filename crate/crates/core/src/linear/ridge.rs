use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use super::LinearError;
use crate::rocket::FeatureMatrix;
use crate::ClassLabel;

const MAX_ITERATIONS: usize = 100_000;

/// Ten log-spaced strengths from `1e-3` to `1e3`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..10).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 9.0)).collect()
}

/// One-vs-rest ridge classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    /// Class of each score column, ascending.
    pub classes: Vec<ClassLabel>,
    /// `n_features x n_classes`, row-major.
    pub weights: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub alpha: f64,
    pub alpha_grid: Vec<f64>,
    /// Mean squared leave-one-out residual per grid entry.
    pub loo_errors: Vec<f64>,
}

impl RidgeModel {
    pub fn n_features(&self) -> usize {
        self.weights.len() / self.classes.len()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }
}

/// Thin SVD of the column-centred design: `X_c = U diag(s) V^T`, truncated
/// to numerically non-zero singular values.
struct CentredDecomposition {
    x_mean: DVector<f64>,
    u: DMatrix<f64>,
    s2: Vec<f64>,
    /// `V` when the design is tall; wide designs recover it as `X_c^T U / s`.
    v: Option<DMatrix<f64>>,
    xc: DMatrix<f64>,
}

impl CentredDecomposition {
    fn new(x: DMatrix<f64>) -> Result<Self, LinearError> {
        let (n, f) = x.shape();
        let x_mean = DVector::from_iterator(f, x.column_iter().map(|c| c.sum() / n as f64));
        let mut xc = x;
        for (mut col, m) in xc.column_iter_mut().zip(x_mean.iter()) {
            col.add_scalar_mut(-m);
        }
        if n <= f {
            // Wide: eigenvectors of X_c X_c^T are the left singular vectors.
            let gram = &xc * xc.transpose();
            let eig = SymmetricEigen::try_new(gram, f64::EPSILON, MAX_ITERATIONS)
                .ok_or_else(|| LinearError::NumericalFailure("eigendecomposition did not converge".into()))?;
            let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            let tol = top * n.max(f) as f64 * f64::EPSILON;
            let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > tol).collect();
            let u = eig.eigenvectors.select_columns(&keep);
            let s2 = keep.iter().map(|&i| eig.eigenvalues[i]).collect();
            Ok(Self { x_mean, u, s2, v: None, xc })
        } else {
            let svd = SVD::try_new(xc.clone(), true, true, f64::EPSILON, MAX_ITERATIONS)
                .ok_or_else(|| LinearError::NumericalFailure("SVD did not converge".into()))?;
            let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^T"));
            let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            let tol = top * n.max(f) as f64 * f64::EPSILON;
            let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > tol).collect();
            let s2 = keep.iter().map(|&i| svd.singular_values[i].powi(2)).collect();
            let v = v_t.transpose().select_columns(&keep);
            Ok(Self { x_mean, u: u.select_columns(&keep), s2, v: Some(v), xc })
        }
    }

    fn n(&self) -> usize {
        self.u.nrows()
    }

    /// LOO residuals `(y_i - yhat_i) / (1 - h_ii)` of the ridge fit with an
    /// unpenalised intercept.
    fn loo_residuals(&self, yc: &DMatrix<f64>, uty: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
        let n = self.n();
        let shrink: Vec<f64> = self.s2.iter().map(|s2| s2 / (s2 + alpha)).collect();
        let mut scaled = uty.clone();
        for (mut row, d) in scaled.row_iter_mut().zip(&shrink) {
            row *= *d;
        }
        let fitted = &self.u * scaled;
        let mut out = yc - fitted;
        for i in 0..n {
            let h: f64 = self.u.row(i).iter().zip(&shrink).map(|(u, d)| u * u * d).sum::<f64>() + 1.0 / n as f64;
            out.row_mut(i).scale_mut(1.0 / (1.0 - h));
        }
        out
    }

    fn weights(&self, uty: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
        match &self.v {
            Some(v) => {
                let mut m = uty.clone();
                for (mut row, s2) in m.row_iter_mut().zip(&self.s2) {
                    row *= s2.sqrt() / (s2 + alpha);
                }
                v * m
            }
            None => {
                let mut m = uty.clone();
                for (mut row, s2) in m.row_iter_mut().zip(&self.s2) {
                    row *= 1.0 / (s2 + alpha);
                }
                self.xc.transpose() * (&self.u * m)
            }
        }
    }
}

fn centre_targets(y: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = y.nrows() as f64;
    let mean = DVector::from_iterator(y.ncols(), y.column_iter().map(|c| c.sum() / n));
    let mut yc = y.clone();
    for (mut col, m) in yc.column_iter_mut().zip(mean.iter()) {
        col.add_scalar_mut(-m);
    }
    (yc, mean)
}

/// Leave-one-out residual matrices (`n x targets`), one per alpha, for ridge
/// regression with an unpenalised intercept. One decomposition serves the
/// whole grid.
pub fn loo_residuals(x: &FeatureMatrix, y: &DMatrix<f64>, alphas: &[f64]) -> Result<Vec<DMatrix<f64>>, LinearError> {
    if x.rows() != y.nrows() {
        return Err(LinearError::ShapeMismatch { expected: x.rows(), found: y.nrows() });
    }
    if x.rows() < 3 {
        return Err(LinearError::TooFewSamples { needed: 3, found: x.rows() });
    }
    let dec = CentredDecomposition::new(x.to_dmatrix())?;
    let (yc, _) = centre_targets(y);
    let uty = dec.u.transpose() * &yc;
    Ok(alphas.iter().map(|&a| dec.loo_residuals(&yc, &uty, a)).collect())
}

/// Fits ±1 one-vs-rest targets, picks the alpha with the lowest mean squared
/// LOO residual (first one on ties) and refits on all rows.
pub fn ridge_fit(x: &FeatureMatrix, labels: &[ClassLabel], alpha_grid: &[f64]) -> Result<RidgeModel, LinearError> {
    if x.rows() != labels.len() {
        return Err(LinearError::ShapeMismatch { expected: x.rows(), found: labels.len() });
    }
    if alpha_grid.is_empty() || alpha_grid.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(LinearError::InvalidParams("alpha grid must be non-empty and positive".into()));
    }
    let mut classes: Vec<ClassLabel> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(LinearError::DegenerateLabels);
    }
    if x.rows() < 3 {
        return Err(LinearError::TooFewSamples { needed: 3, found: x.rows() });
    }
    let n = x.rows();
    let y = DMatrix::from_fn(n, classes.len(), |i, k| if labels[i] == classes[k] { 1.0 } else { -1.0 });

    let dec = CentredDecomposition::new(x.to_dmatrix())?;
    let (yc, y_mean) = centre_targets(&y);
    let uty = dec.u.transpose() * &yc;
    let loo_errors: Vec<f64> = alpha_grid
        .iter()
        .map(|&a| {
            let r = dec.loo_residuals(&yc, &uty, a);
            r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64
        })
        .collect();
    let best = loo_errors.iter().enumerate().fold(0, |best, (i, e)| if *e < loo_errors[best] { i } else { best });
    let alpha = alpha_grid[best];

    let w = dec.weights(&uty, alpha);
    let intercepts: Vec<f64> = (0..classes.len()).map(|k| y_mean[k] - dec.x_mean.dot(&w.column(k))).collect();
    if w.iter().chain(&intercepts).any(|v| !v.is_finite()) {
        return Err(LinearError::NumericalFailure("non-finite weights".into()));
    }
    let weights = (0..w.nrows()).flat_map(|r| w.row(r).iter().copied().collect::<Vec<_>>()).collect();
    Ok(RidgeModel { classes, weights, intercepts, alpha, alpha_grid: alpha_grid.to_vec(), loo_errors })
}

/// `x W + b`, one row per sample, one column per class.
pub fn predict_scores(model: &RidgeModel, x: &FeatureMatrix) -> Result<FeatureMatrix, LinearError> {
    let (f, k) = (model.n_features(), model.n_classes());
    if x.cols() != f {
        return Err(LinearError::ShapeMismatch { expected: f, found: x.cols() });
    }
    let mut out = Vec::with_capacity(x.rows() * k);
    for i in 0..x.rows() {
        let mut scores = model.intercepts.clone();
        for (v, w_row) in x.row(i).iter().zip(model.weights.chunks_exact(k)) {
            for (s, w) in scores.iter_mut().zip(w_row) {
                *s += v * w;
            }
        }
        out.extend(scores);
    }
    Ok(FeatureMatrix::from_vec(x.rows(), k, out))
}

/// Highest-scoring class per row; ties go to the lowest class index.
pub fn argmax_labels(classes: &[ClassLabel], scores: &FeatureMatrix) -> Vec<ClassLabel> {
    (0..scores.rows())
        .map(|i| {
            let row = scores.row(i);
            let best = (1..row.len()).fold(0, |b, j| if row[j] > row[b] { j } else { b });
            classes[best]
        })
        .collect()
}

pub fn predict(model: &RidgeModel, x: &FeatureMatrix) -> Result<Vec<ClassLabel>, LinearError> {
    Ok(argmax_labels(&model.classes, &predict_scores(model, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureMatrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn grid_shape() {
        let g = default_alpha_grid();
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1e-3).abs() < 1e-15 && (g[9] - 1e3).abs() < 1e-9);
    }

    #[test]
    fn vanishing_alpha_is_least_squares() {
        let x = random_matrix(40, 5, 3);
        let labels: Vec<ClassLabel> = (0..40).map(|i| ClassLabel::ALL[i % 3]).collect();
        let model = ridge_fit(&x, &labels, &[1e-12]).unwrap();
        // Independent route: normal equations on [X 1].
        let design = DMatrix::from_fn(40, 6, |i, j| if j < 5 { x.get(i, j) } else { 1.0 });
        let gram = design.transpose() * &design;
        let chol = gram.cholesky().unwrap();
        for (k, class) in model.classes.iter().enumerate() {
            let y = DVector::from_fn(40, |i, _| if labels[i] == *class { 1.0 } else { -1.0 });
            let beta = chol.solve(&(design.transpose() * y));
            for j in 0..5 {
                assert!((beta[j] - model.weights[j * 3 + k]).abs() < 1e-6);
            }
            assert!((beta[5] - model.intercepts[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn separable_clouds_are_learned() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..60 {
            let label = if i % 2 == 0 { ClassLabel::N } else { ClassLabel::Arch };
            let centre = if label == ClassLabel::N { -3.0 } else { 3.0 };
            rows.push((0..8).map(|_| centre + rng.random_range(-1.0..1.0)).collect());
            labels.push(label);
        }
        let x = FeatureMatrix::from_rows(rows);
        let model = ridge_fit(&x, &labels, &default_alpha_grid()).unwrap();
        assert_eq!(predict(&model, &x).unwrap(), labels);
        assert!(model.alpha_grid.contains(&model.alpha));
    }

    #[test]
    fn wide_design_is_deterministic() {
        let x = random_matrix(12, 200, 5);
        let labels: Vec<ClassLabel> = (0..12).map(|i| ClassLabel::ALL[i % 4]).collect();
        let a = ridge_fit(&x, &labels, &default_alpha_grid()).unwrap();
        let b = ridge_fit(&x, &labels, &default_alpha_grid()).unwrap();
        assert_eq!(a, b);
        assert!(a.weights.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn argmax_and_ties() {
        let classes = ClassLabel::ALL.to_vec();
        let scores = FeatureMatrix::from_rows(vec![vec![0.9, -0.2, 0.1, -0.5], vec![0.3, 0.7, 0.7, 0.1]]);
        assert_eq!(argmax_labels(&classes, &scores), vec![ClassLabel::N, ClassLabel::A]);
    }

    #[test]
    fn error_cases() {
        let x = random_matrix(6, 3, 0);
        assert_eq!(ridge_fit(&x, &[ClassLabel::R; 6], &[1.0]), Err(LinearError::DegenerateLabels));
        assert!(ridge_fit(&x, &[ClassLabel::R; 5], &[1.0]).is_err());
        assert!(matches!(
            ridge_fit(
                &x,
                &[ClassLabel::R, ClassLabel::N, ClassLabel::R, ClassLabel::N, ClassLabel::R, ClassLabel::N],
                &[]
            ),
            Err(LinearError::InvalidParams(_))
        ));
        let labels = [ClassLabel::N, ClassLabel::A, ClassLabel::N, ClassLabel::A, ClassLabel::N, ClassLabel::A];
        let model = ridge_fit(&x, &labels, &[1.0]).unwrap();
        assert!(matches!(
            predict(&model, &random_matrix(2, 4, 1)),
            Err(LinearError::ShapeMismatch { expected: 3, found: 4 })
        ));
    }
}
