use nalgebra::DMatrix;

use super::PrepError;

/// Least-squares projection weights for a window of `window` samples and a
/// polynomial of degree `polyorder`.
///
/// Row `r` of the returned `window x window` matrix maps the window's samples
/// to the fitted polynomial's value at window position `r`. The middle row is
/// the classic smoothing kernel; the others serve the boundary windows.
pub fn savgol_coefficients(window: usize, polyorder: usize) -> Result<DMatrix<f64>, PrepError> {
    if window.is_multiple_of(2) || window <= polyorder {
        return Err(PrepError::InvalidParams(format!(
            "window {window} must be odd and greater than polyorder {polyorder}"
        )));
    }
    let half = (window / 2) as f64;
    let scale = half.max(1.0);
    let design = DMatrix::from_fn(window, polyorder + 1, |r, k| ((r as f64 - half) / scale).powi(k as i32));
    let q = design.qr().q();
    Ok(&q * q.transpose())
}

/// Savitzky-Golay smoothing. Interior points take the centred window fit;
/// the first and last `window / 2` points are read off the polynomial fitted
/// to the first (last) full window.
pub fn smooth_savgol(x: &[f64], window: usize, polyorder: usize) -> Result<Vec<f64>, PrepError> {
    let hat = savgol_coefficients(window, polyorder)?;
    if x.len() < window {
        return Err(PrepError::TooShort { len: x.len(), min: window });
    }
    let n = x.len();
    let half = window / 2;
    let centre: Vec<f64> = hat.row(half).iter().copied().collect();
    let mut out = vec![0.0; n];
    for i in half..n - half {
        out[i] = centre.iter().zip(&x[i - half..=i + half]).map(|(c, v)| c * v).sum();
    }
    let tail = n - window;
    for r in 0..half {
        out[r] = hat.row(r).iter().zip(&x[..window]).map(|(c, v)| c * v).sum();
        let r_end = window - 1 - r;
        out[tail + r_end] = hat.row(r_end).iter().zip(&x[tail..]).map(|(c, v)| c * v).sum();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_low_degree_polynomials() {
        let x: Vec<f64> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.1;
                1.5 - 2.0 * t + 0.25 * t * t - 0.03 * t * t * t
            })
            .collect();
        let y = smooth_savgol(&x, 11, 3).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_stays_constant() {
        let y = smooth_savgol(&[4.25; 15], 7, 2).unwrap();
        assert!(y.iter().all(|v| (v - 4.25).abs() < 1e-12));
    }

    #[test]
    fn centre_kernel_matches_known_five_point_quadratic() {
        // -3, 12, 17, 12, -3 over 35
        let hat = savgol_coefficients(5, 2).unwrap();
        let expected = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|v| v / 35.0);
        for (a, b) in hat.row(2).iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(smooth_savgol(&[0.0; 20], 10, 3), Err(PrepError::InvalidParams(_))));
        assert!(matches!(smooth_savgol(&[0.0; 20], 5, 5), Err(PrepError::InvalidParams(_))));
        assert!(matches!(smooth_savgol(&[0.0; 4], 5, 2), Err(PrepError::TooShort { len: 4, min: 5 })));
    }
}
