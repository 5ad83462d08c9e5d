//! Abel-Poisson kernel and its self-convolution (the singular integral).

use crate::error::{invalid, Result};

/// Tolerance for dot products that drift slightly outside `[-1, 1]`.
const DOT_SLACK: f64 = 1e-6;

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("kernel parameter {lambda} is outside (0, 1)")))
    }
}

pub(crate) fn clamp_dot(t: f64) -> Result<f64> {
    if !t.is_finite() || t < -1.0 - DOT_SLACK || t > 1.0 + DOT_SLACK {
        return Err(invalid(format!("dot product {t} is outside [-1, 1]")));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Closed form without domain checks. Callers guarantee `0 < lambda < 1`.
#[inline]
pub(crate) fn poisson_unchecked(t: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    let base = 1.0 - 2.0 * lambda * t + l2;
    (1.0 - l2) / (base * base.sqrt())
}

/// Abel-Poisson kernel `G(t, λ) = (1 - λ²) / (1 - 2λt + λ²)^{3/2}`.
///
/// `t` is the cosine between the sample direction and the kernel center.
pub fn poisson_kernel(t: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(poisson_unchecked(clamp_dot(t)?, lambda))
}

/// Convolution of two Abel-Poisson kernels over the sphere.
///
/// Its closed form is the Poisson kernel with parameter `λi·λj`.
pub fn singular_integral(t: f64, lambda_i: f64, lambda_j: f64) -> Result<f64> {
    check_lambda(lambda_i)?;
    check_lambda(lambda_j)?;
    Ok(poisson_unchecked(clamp_dot(t)?, lambda_i * lambda_j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_endpoints() {
        let l: f64 = 0.4;
        let top = poisson_kernel(1.0, l).unwrap();
        let bottom = poisson_kernel(-1.0, l).unwrap();
        assert!((top - (1.0 + l) / (1.0 - l).powi(2)).abs() < 1e-12);
        assert!((top - 3.888889).abs() < 1e-6);
        assert!((bottom - 0.306122).abs() < 1e-6);
    }

    #[test]
    fn kernel_at_equator() {
        // (1 - 0.16) / 1.16^1.5
        let v = poisson_kernel(0.0, 0.4).unwrap();
        assert!((v - 0.67235).abs() < 1e-4, "{v}");
    }

    #[test]
    fn singular_integral_at_one() {
        let v = singular_integral(1.0, 0.25, 0.25).unwrap();
        let p: f64 = 0.0625;
        assert!((v - (1.0 + p) / (1.0 - p).powi(2)).abs() < 1e-12);
        assert!((v - 1.208889).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_lambda() {
        for l in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(poisson_kernel(0.3, l).is_err());
            assert!(singular_integral(0.3, l, 0.5).is_err());
        }
    }

    #[test]
    fn clamps_tiny_overshoot_only() {
        let at_one = poisson_kernel(1.0, 0.3).unwrap();
        assert_eq!(poisson_kernel(1.0 + 5e-7, 0.3).unwrap(), at_one);
        assert!(poisson_kernel(1.01, 0.3).is_err());
        assert!(poisson_kernel(-1.01, 0.3).is_err());
    }

    #[test]
    fn kernel_increases_with_dot() {
        let mut prev = 0.0;
        for k in 0..=200 {
            let t = -1.0 + k as f64 / 100.0;
            let v = poisson_kernel(t, 0.6).unwrap();
            assert!(v > 0.0 && v >= prev);
            prev = v;
        }
    }
}
