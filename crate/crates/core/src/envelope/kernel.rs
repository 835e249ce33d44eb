use crate::error::{ensure, Error, Result};

#[inline]
pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `exp(-||x - y||² / (2σ²))`.
pub fn gaussian_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    ensure(sigma > 0.0, || format!("kernel width must be positive, got {sigma}"))?;
    Ok(rbf(x, y, 1.0 / (2.0 * sigma * sigma)))
}

/// Kernel with precomputed `1 / (2σ²)`.
#[inline]
pub(crate) fn rbf(x: &[f64], y: &[f64], inv_two_sigma2: f64) -> f64 {
    (-sq_dist(x, y) * inv_two_sigma2).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_points() {
        assert_eq!(gaussian_kernel(&[0.3, -1.0], &[0.3, -1.0], 0.5).unwrap(), 1.0);
        let s = 0.8;
        let d = s * 2f64.sqrt();
        let k = gaussian_kernel(&[0.0, 0.0], &[d, 0.0], s).unwrap();
        assert!((k - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn hand_evaluation() {
        let x = [0.12, -0.7, 1.3];
        let y = [-0.4, 0.25, 0.9];
        let d2 = 0.52f64.powi(2) + 0.95f64.powi(2) + 0.4f64.powi(2);
        let expected = (-d2 / (2.0 * 0.49)).exp();
        assert!((gaussian_kernel(&x, &y, 0.7).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(gaussian_kernel(&[0.0], &[0.0, 1.0], 1.0).is_err());
        assert!(gaussian_kernel(&[0.0], &[1.0], 0.0).is_err());
    }
}
