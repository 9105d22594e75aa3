use super::LinearError;
use crate::rocket::FeatureMatrix;

/// Per-column centring and scaling learned from training features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    /// Population standard deviation; 1 for constant columns.
    pub scale: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(x: &FeatureMatrix) -> Result<Self, LinearError> {
        let n = x.rows();
        if n < 2 {
            return Err(LinearError::TooFewSamples { needed: 2, found: n });
        }
        let cols = x.cols();
        let mut mean = vec![0.0; cols];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; cols];
        for i in 0..n {
            for ((s, v), m) in var.iter_mut().zip(x.row(i)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .zip(&mean)
            .map(|(s, m)| {
                let sd = (s / n as f64).sqrt();
                if sd <= 1e-12 * m.abs().max(1.0) {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix, LinearError> {
        if x.cols() != self.n_features() {
            return Err(LinearError::ShapeMismatch { expected: self.n_features(), found: x.cols() });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.scale) {
                let centred = *v - m;
                // constant columns carry rounding noise only
                *v = if *s == 1.0 && centred.abs() <= 1e-12 * m.abs().max(1.0) { 0.0 } else { centred / s };
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_four_becomes_minus_one_one() {
        let x = FeatureMatrix::from_rows(vec![vec![2.0, 7.0], vec![4.0, 7.0]]);
        let s = FeatureScaler::fit(&x).unwrap();
        let z = s.transform(&x).unwrap();
        assert_eq!(z.row(0), &[-1.0, 0.0]);
        assert_eq!(z.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn training_columns_are_centred() {
        let rows: Vec<Vec<f64>> =
            (0..37).map(|i| vec![(i as f64 * 1.7).sin() * 300.0 + 12.0, (i % 5) as f64 / 5.0, 0.3]).collect();
        let x = FeatureMatrix::from_rows(rows);
        let z = FeatureScaler::fit(&x).unwrap().transform(&x).unwrap();
        for j in 0..3 {
            let mean: f64 = (0..37).map(|i| z.get(i, j)).sum::<f64>() / 37.0;
            assert!(mean.abs() < 1e-9);
        }
        assert!((0..37).all(|i| z.get(i, 2) == 0.0));
    }

    #[test]
    fn too_few_rows_and_wrong_width() {
        let one = FeatureMatrix::from_rows(vec![vec![1.0]]);
        assert_eq!(FeatureScaler::fit(&one), Err(LinearError::TooFewSamples { needed: 2, found: 1 }));
        let s = FeatureScaler::fit(&FeatureMatrix::from_rows(vec![vec![1.0], vec![2.0]])).unwrap();
        assert!(s.transform(&FeatureMatrix::from_rows(vec![vec![1.0, 2.0]])).is_err());
    }
}
