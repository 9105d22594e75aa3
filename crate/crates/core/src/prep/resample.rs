use super::PrepError;
use crate::MultivariateSeries;

/// Interpolating cubic spline with not-a-knot end conditions.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivative at each knot.
    m: Vec<f64>,
}

impl CubicSpline {
    /// `x` strictly increasing, at least four knots.
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self, PrepError> {
        let n = x.len();
        if y.len() != n {
            return Err(PrepError::InvalidParams(format!("{} abscissae for {} values", n, y.len())));
        }
        if n < 4 {
            return Err(PrepError::TooShort { len: n, min: 4 });
        }
        if x.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(PrepError::InvalidParams("knots must be strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Unknowns m[1..n-1]; m[0] and m[n-1] are eliminated through the
        // not-a-knot conditions, which keeps the system tridiagonal.
        let k = n - 2;
        let mut lower = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            let i = r + 1;
            lower[r] = h[i - 1];
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            upper[r] = h[i];
            rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        upper[0] -= h0 * h0 / h1;
        let (a, b) = (h[n - 3], h[n - 2]);
        diag[k - 1] += b * (a + b) / a;
        lower[k - 1] -= b * b / a;

        let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&inner);
        m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
        m[n - 1] = ((a + b) * m[n - 2] - b * m[n - 3]) / a;
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    fn eval_in(&self, i: usize, t: f64) -> f64 {
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (a, b) = (x1 - t, t - x0);
        self.m[i] * a * a * a / (6.0 * h)
            + self.m[i + 1] * b * b * b / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * a
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }

    /// Value at `t`; outside the knot range the end polynomials extrapolate.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = self.x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
        self.eval_in(i, t)
    }
}

fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

/// Fits a spline over normalised time `[0, 1]` and samples it at
/// `target_len` equally spaced points. Endpoints are copied exactly.
pub fn resample_channel(values: &[f64], target_len: usize) -> Result<Vec<f64>, PrepError> {
    if target_len < 2 {
        return Err(PrepError::InvalidParams(format!("target length {target_len} < 2")));
    }
    let n = values.len();
    if n < 4 {
        return Err(PrepError::TooShort { len: n, min: 4 });
    }
    let step = (n - 1) as f64;
    let knots: Vec<f64> = (0..n).map(|i| i as f64 / step).collect();
    let spline = CubicSpline::new(&knots, values)?;
    let out_step = (target_len - 1) as f64;
    let mut out: Vec<f64> = (0..target_len)
        .map(|j| {
            let t = j as f64 / out_step;
            let i = ((t * step) as usize).min(n - 2);
            spline.eval_in(i, t)
        })
        .collect();
    out[0] = values[0];
    out[target_len - 1] = values[n - 1];
    Ok(out)
}

/// Resamples every channel independently to `target_len` points.
pub fn resample_cubic(series: &MultivariateSeries, target_len: usize) -> Result<MultivariateSeries, PrepError> {
    let channels = series.channels().iter().map(|c| resample_channel(c, target_len)).collect::<Result<Vec<_>, _>>()?;
    MultivariateSeries::new(series.names().to_vec(), channels).map_err(|e| PrepError::InvalidParams(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_in_constant_out() {
        let out = resample_channel(&[3.5; 17], 161).unwrap();
        assert_eq!(out.len(), 161);
        assert!(out.iter().all(|v| (v - 3.5).abs() < 1e-12));
    }

    #[test]
    fn linear_ramp_is_exact() {
        let ramp: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let out = resample_channel(&ramp, 161).unwrap();
        for (j, v) in out.iter().enumerate() {
            assert!((v - j as f64 / 160.0).abs() < 1e-9);
        }
    }

    #[test]
    fn four_points_reproduce_their_cubic() {
        let f = |t: f64| 2.0 - t + 3.0 * t * t - 4.0 * t * t * t;
        let x = [0.0, 0.2, 0.7, 1.0];
        let y = x.map(f);
        let s = CubicSpline::new(&x, &y).unwrap();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert!((s.eval(t) - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn too_short_and_bad_target() {
        assert_eq!(resample_channel(&[1.0, 2.0, 3.0], 10), Err(PrepError::TooShort { len: 3, min: 4 }));
        assert!(matches!(resample_channel(&[1.0; 8], 1), Err(PrepError::InvalidParams(_))));
    }

    proptest! {
        #[test]
        fn identity_when_grids_coincide(values in proptest::collection::vec(-1000.0f64..1000.0, 4..120)) {
            let out = resample_channel(&values, values.len()).unwrap();
            for (a, b) in values.iter().zip(&out) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn endpoints_preserved(values in proptest::collection::vec(-1000.0f64..1000.0, 4..60), len in 2usize..300) {
            let out = resample_channel(&values, len).unwrap();
            prop_assert_eq!(out.len(), len);
            prop_assert_eq!(out[0], values[0]);
            prop_assert_eq!(out[len - 1], values[values.len() - 1]);
        }
    }
}
