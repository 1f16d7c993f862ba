//! Exact feasibility and Routh–Hurwitz verification of parameter points.
//!
//! With `x̃ = adj(B)·a` the equilibrium is `x⋆ = x̃ / det B`, so feasibility is
//! `det B > 0` and `x̃ > 0`. Stability is tested on `det(λI + diag(x̃)B)`, the
//! characteristic polynomial of `−J̃` with `J̃ = −diag(x̃)B`; rescaling by the
//! positive `det B` does not move eigenvalues across the imaginary axis. All
//! inequalities are strict: a zero counts as failure.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::Matrix;
use crate::model::ParameterPoint;
use crate::Error;

/// `adj(B)`, defined for singular `B` as well.
pub fn adjugate(b: &Matrix) -> Matrix {
    b.adjugate()
}

/// `x̃ = adj(B)·a`, `det B`, and the strict feasibility verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub x_tilde: Vec<BigRational>,
    pub det_b: BigRational,
    pub feasible: bool,
}

impl FeasibilityReport {
    /// The equilibrium `x⋆ = x̃ / det B`, if `B` is nonsingular.
    pub fn equilibrium(&self) -> Option<Vec<BigRational>> {
        if self.det_b.is_zero() {
            return None;
        }
        Some(self.x_tilde.iter().map(|x| x / &self.det_b).collect())
    }

    /// True when some inequality holds with equality instead of failing outright.
    pub fn on_boundary(&self) -> bool {
        self.det_b.is_zero() || self.x_tilde.iter().any(Zero::is_zero)
    }
}

fn check_dims(a: &[BigRational], b: &Matrix) -> Result<(), Error> {
    if !b.is_square() || b.rows() != a.len() {
        return Err(Error::Dimension(alloc::format!(
            "a has length {} but B is {}x{}",
            a.len(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

pub fn feasibility_check(a: &[BigRational], b: &Matrix) -> Result<FeasibilityReport, Error> {
    check_dims(a, b)?;
    let x_tilde = b.adjugate().mul_vec(a);
    let det_b = b.determinant();
    let feasible = det_b.is_positive() && x_tilde.iter().all(Signed::is_positive);
    Ok(FeasibilityReport {
        x_tilde,
        det_b,
        feasible,
    })
}

/// Coefficients `c_0, …, c_{n−1}` of `λⁿ + c_{n−1}λ^{n−1} + … + c_0`; the leading
/// coefficient is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPolyCoeffs {
    pub c: Vec<BigRational>,
}

impl CharPolyCoeffs {
    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// `c_i` with `c_n = 1` and zero outside `0..=n`.
    pub fn get(&self, i: isize) -> BigRational {
        let n = self.c.len() as isize;
        if i == n {
            BigRational::one()
        } else if (0..n).contains(&i) {
            self.c[i as usize].clone()
        } else {
            BigRational::zero()
        }
    }

    /// The weaker necessary condition that every coefficient is positive.
    pub fn all_positive(&self) -> bool {
        self.c.iter().all(Signed::is_positive)
    }
}

/// `c_i = Σ_{|J| = n−i} (Π_{j∈J} x_j) · det B[J, J]`, the coefficients of
/// `det(λI + diag(x)B)`.
pub fn char_poly_coeffs(x: &[BigRational], b: &Matrix) -> Result<CharPolyCoeffs, Error> {
    check_dims(x, b)?;
    let n = x.len();
    let mut c = alloc::vec![BigRational::zero(); n];
    // subsets of [n] as bitmasks; the empty set contributes the leading 1
    for mask in 1u32..1 << n {
        let j: Vec<usize> = (0..n).filter(|&k| mask >> k & 1 == 1).collect();
        let weight = j.iter().fold(BigRational::one(), |acc, &k| acc * &x[k]);
        let minor = b.select(&j, &j).determinant();
        c[n - j.len()] += weight * minor;
    }
    Ok(CharPolyCoeffs { c })
}

/// Hurwitz determinants `H_1, …, H_n` and the strict stability verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HurwitzReport {
    pub h: Vec<BigRational>,
    pub stable: bool,
}

/// The `k × k` Hurwitz matrix with entry `(i, j) = c_{n−2j+i}` (1-based).
pub fn hurwitz_matrix(c: &CharPolyCoeffs, k: usize) -> Matrix {
    let n = c.n() as isize;
    let mut m = Matrix::zeros(k, k);
    for i in 1..=k as isize {
        for j in 1..=k as isize {
            m[(i as usize - 1, j as usize - 1)] = c.get(n - 2 * j + i);
        }
    }
    m
}

pub fn hurwitz_determinants(c: &CharPolyCoeffs) -> HurwitzReport {
    let h: Vec<BigRational> = (1..=c.n())
        .map(|k| hurwitz_matrix(c, k).determinant())
        .collect();
    let stable = h.iter().all(Signed::is_positive);
    HurwitzReport { h, stable }
}

/// Everything computed while deciding stratum membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumReport {
    pub feasibility: FeasibilityReport,
    pub coefficients: CharPolyCoeffs,
    pub hurwitz: HurwitzReport,
}

impl StratumReport {
    /// Feasible and Routh–Hurwitz stable.
    pub fn feasible_stable(&self) -> bool {
        self.feasibility.feasible && self.hurwitz.stable
    }
}

/// Exact membership test for the feasible-stable stratum.
pub fn is_feasible_stable(a: &[BigRational], b: &Matrix) -> Result<StratumReport, Error> {
    let feasibility = feasibility_check(a, b)?;
    let coefficients = char_poly_coeffs(&feasibility.x_tilde, b)?;
    let hurwitz = hurwitz_determinants(&coefficients);
    Ok(StratumReport {
        feasibility,
        coefficients,
        hurwitz,
    })
}

pub fn check_point(point: &ParameterPoint) -> StratumReport {
    is_feasible_stable(&point.a, &point.b).expect("parameter points are square")
}
