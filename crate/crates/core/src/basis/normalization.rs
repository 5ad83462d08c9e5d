use glam::DVec3;
use nalgebra::{DMatrix, DVector};

use super::kernel::{check_lambda, poisson_unchecked};
use crate::error::{Error, Result};

/// Ratio of largest to smallest Gram eigenvalue beyond which inversion is refused.
const MAX_CONDITION: f64 = 1e12;
const RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Gram matrix of an SRBF center set and its inverse.
///
/// `A[i][j]` is the singular integral of the kernels at centers `i` and `j`.
#[derive(Debug, Clone)]
pub struct NormalizationMatrix {
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
}

impl NormalizationMatrix {
    pub fn build(centers: &[DVec3], lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let n = centers.len();
        if n == 0 {
            return Err(Error::DegenerateCenters("no centers".into()));
        }
        for c in centers {
            if (c.length() - 1.0).abs() > 1e-6 {
                return Err(Error::DegenerateCenters(format!("center {c} is not unit length")));
            }
        }
        let product = lambda * lambda;
        let a = DMatrix::from_fn(n, n, |i, j| {
            poisson_unchecked(centers[i].dot(centers[j]).clamp(-1.0, 1.0), product)
        });

        let eigen = a.clone().symmetric_eigen();
        let max = eigen.eigenvalues.max();
        let min = eigen.eigenvalues.min();
        if min <= 0.0 || max / min > MAX_CONDITION {
            return Err(Error::DegenerateCenters(format!(
                "Gram matrix is numerically singular (eigenvalues {min:e} .. {max:e})"
            )));
        }
        let a_inv = a
            .clone()
            .cholesky()
            .ok_or_else(|| Error::DegenerateCenters("Gram matrix is not positive definite".into()))?
            .inverse();

        let residual = (&a * &a_inv - DMatrix::identity(n, n)).amax();
        if residual > RESIDUAL_TOLERANCE {
            return Err(Error::DegenerateCenters(format!(
                "inverse residual {residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
            )));
        }
        Ok(Self { a, a_inv })
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `A⁻¹ · v`.
    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        let rhs = DVector::from_column_slice(v);
        (&self.a_inv * rhs).iter().copied().collect()
    }

    /// Max-abs element of `A · A⁻¹ - I`.
    pub fn residual(&self) -> f64 {
        let n = self.dim();
        (&self.a * &self.a_inv - DMatrix::identity(n, n)).amax()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::centers;
    use crate::basis::kernel::singular_integral;

    #[test]
    fn cube_set_diagonal_and_inverse() {
        let norm = NormalizationMatrix::build(&centers::cube_vertices(), 0.25).unwrap();
        let a = norm.gram();
        for i in 0..8 {
            assert!((a[(i, i)] - 1.208889).abs() < 1e-5);
            for j in 0..8 {
                assert_eq!(a[(i, j)], a[(j, i)]);
            }
        }
        assert!(norm.residual() < 1e-6);
    }

    #[test]
    fn antipodal_pair_off_diagonal() {
        let norm = NormalizationMatrix::build(&[DVec3::X, DVec3::NEG_X], 0.25).unwrap();
        let expected = singular_integral(-1.0, 0.25, 0.25).unwrap();
        assert!((norm.gram()[(0, 1)] - expected).abs() < 1e-12);
    }

    #[test]
    fn duplicate_centers_are_degenerate() {
        let err = NormalizationMatrix::build(&[DVec3::Z, DVec3::Z, DVec3::X], 0.3).unwrap_err();
        assert!(matches!(err, Error::DegenerateCenters(_)));
    }

    #[test]
    fn non_unit_center_rejected() {
        assert!(NormalizationMatrix::build(&[DVec3::new(0.0, 0.0, 2.0)], 0.3).is_err());
        assert!(NormalizationMatrix::build(&[], 0.3).is_err());
    }
}
