//! Floating-point cross-check of stability through the Jacobian spectrum.

use coexist_core::linalg::to_f64;
use coexist_core::model::ParameterPoint;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCheck {
    pub equilibrium: Vec<f64>,
    /// Largest real part among the eigenvalues of `−diag(x⋆)B`.
    pub abscissa: f64,
}

impl EigenCheck {
    pub fn stable(&self) -> bool {
        self.abscissa < 0.0
    }

    pub fn feasible(&self) -> bool {
        self.equilibrium.iter().all(|&x| x > 0.0)
    }

    /// Distance of the spectrum from the imaginary axis.
    pub fn margin(&self) -> f64 {
        self.abscissa.abs()
    }
}

/// Solves `Bx = a` and takes the spectrum of the Jacobian at `x`, or `None`
/// when `B` is numerically singular.
pub fn eigen_check(point: &ParameterPoint) -> Option<EigenCheck> {
    let n = point.n();
    let b = DMatrix::from_fn(n, n, |i, j| to_f64(&point.b[(i, j)]));
    let a = DVector::from_iterator(n, point.a.iter().map(to_f64));
    let x = b.clone().lu().solve(&a)?;
    let jac = -DMatrix::from_diagonal(&x) * &b;
    let abscissa = jac
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Some(EigenCheck {
        equilibrium: x.iter().copied().collect(),
        abscissa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use coexist_core::linalg::{int, Matrix};

    #[test]
    fn identity_system() {
        let p = ParameterPoint::new(vec![int(1), int(1)], Matrix::identity(2)).unwrap();
        let e = eigen_check(&p).unwrap();
        assert!(e.feasible() && e.stable());
        assert!((e.abscissa + 1.0).abs() < 1e-12);
    }

    #[test]
    fn saddle() {
        let p = ParameterPoint::new(
            vec![int(3), int(3)],
            Matrix::from_i64(2, 2, &[1, 2, 2, 1]).unwrap(),
        )
        .unwrap();
        let e = eigen_check(&p).unwrap();
        assert!(e.feasible());
        assert!(!e.stable());
    }

    #[test]
    fn singular_is_none() {
        let p = ParameterPoint::new(
            vec![int(1), int(1)],
            Matrix::from_i64(2, 2, &[1, 1, 1, 1]).unwrap(),
        )
        .unwrap();
        assert!(eigen_check(&p).is_none());
    }
}
