//! Exact rational matrices.
//!
//! Determinants are computed with Bareiss' fraction-free elimination after each
//! row has been cleared of denominators, so every intermediate value is an
//! integer and every division is exact.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(alloc::format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self, Error> {
        Self::from_rows(rows, cols, data.iter().map(|&v| int(v)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// The submatrix on the given (ordered) rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self[(r, c)].clone());
            }
        }
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "incompatible matrix product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = &self[(i, k)];
                if lhs.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += lhs * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "incompatible matrix-vector product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigRational::zero(), |acc, (m, x)| acc + m * x)
            })
            .collect()
    }

    pub fn scale(&self, k: &BigRational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// Exact determinant. The empty matrix has determinant one.
    pub fn determinant(&self) -> BigRational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigRational::one();
        }
        // Clear denominators row by row: det(A) = det(D A) / prod(D).
        let mut scale = BigInt::one();
        let mut work: Vec<BigInt> = Vec::with_capacity(n * n);
        for i in 0..n {
            let lcm = self
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            for v in self.row(i) {
                work.push(v.numer() * (&lcm / v.denom()));
            }
            scale *= lcm;
        }
        BigRational::new(bareiss_determinant(n, &mut work), scale)
    }

    /// Transpose of the cofactor matrix, so that `adj(B)·B = det(B)·I`.
    pub fn adjugate(&self) -> Matrix {
        assert!(self.is_square(), "adjugate of a non-square matrix");
        let n = self.rows;
        if n == 1 {
            return Matrix::identity(1);
        }
        let mut adj = Matrix::zeros(n, n);
        let all: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = all.iter().copied().filter(|&r| r != i).collect();
                let cols: Vec<usize> = all.iter().copied().filter(|&c| c != j).collect();
                let minor = self.select(&rows, &cols).determinant();
                // cofactor C_ij lands at position (j, i)
                adj[(j, i)] = if (i + j) % 2 == 0 { minor } else { -minor };
            }
        }
        adj
    }
}

/// Bareiss elimination on an integer matrix, consuming the scratch buffer.
fn bareiss_determinant(n: usize, m: &mut [BigInt]) -> BigInt {
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for c in 0..n {
                m.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = v / &prev;
            }
        }
        prev = m[k * n + k].clone();
    }
    sign * &m[(n - 1) * n + (n - 1)]
}

impl Index<(usize, usize)> for Matrix {
    type Output = BigRational;

    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}")?;
            }
        }
        f.write_str("]")
    }
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"-0.033"`, `"12"`, `"3/4"`, or `"1.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let bad = || Error::Number(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let mut all = String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let numer: BigInt = all.parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(if neg { -value } else { value })
}

/// Rounds a finite float to `digits` significant decimal digits, exactly.
pub fn rationalize(value: f64, digits: u32) -> BigRational {
    if value == 0.0 || !value.is_finite() {
        return BigRational::zero();
    }
    let magnitude = libm::floor(libm::log10(libm::fabs(value))) as i32;
    let shift = digits as i32 - 1 - magnitude;
    let scaled = libm::round(value * libm::pow(10.0, f64::from(shift)));
    let numer = BigInt::from(scaled as i64);
    let ten = BigInt::from(10u8);
    if shift >= 0 {
        BigRational::new(numer, num_traits::pow(ten, shift as usize))
    } else {
        BigRational::from_integer(numer * num_traits::pow(ten, (-shift) as usize))
    }
}

/// Lossy conversion used only for reporting and the float cross-checks.
pub fn to_f64(v: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators: fall back to a scaled ratio
        let n = v.numer().bits() as i64;
        let d = v.denom().bits() as i64;
        let shift = (n.max(d) - 900).max(0) as u64;
        let num = (v.numer().abs() >> shift).to_f64().unwrap_or(f64::MAX);
        let den = (v.denom() >> shift).to_f64().unwrap_or(f64::MAX);
        let r = num / den;
        if v.is_negative() {
            -r
        } else {
            r
        }
    })
}

/// Sign of an exact value as -1, 0, or 1.
pub fn signum(v: &BigRational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Laplace expansion along the first row; independent of Bareiss.
    fn cofactor_det(m: &Matrix) -> BigRational {
        let n = m.rows();
        if n == 0 {
            return BigRational::one();
        }
        let mut acc = BigRational::zero();
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let term = &m[(0, j)] * cofactor_det(&m.select(&rows, &cols));
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn lcg_matrix(n: usize, seed: u64) -> Matrix {
        let mut s = seed;
        let mut data = Vec::new();
        for _ in 0..n * n {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let num = ((s >> 33) % 19) as i64 - 9;
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let den = ((s >> 33) % 7) as i64 + 1;
            data.push(ratio(num, den));
        }
        Matrix::from_rows(n, n, data).unwrap()
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        for n in 0..=5 {
            for seed in 0..20 {
                let m = lcg_matrix(n, seed * 31 + n as u64);
                assert_eq!(m.determinant(), cofactor_det(&m), "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn determinant_needs_pivoting() {
        let m = Matrix::from_i64(3, 3, &[0, 1, 2, 1, 0, 3, 4, -3, 8]).unwrap();
        assert_eq!(m.determinant(), cofactor_det(&m));
        let singular = Matrix::from_i64(2, 2, &[1, -1, -1, 1]).unwrap();
        assert!(singular.determinant().is_zero());
    }

    #[test]
    fn adjugate_two_by_two() {
        let b = Matrix::from_i64(2, 2, &[2, 3, 5, 7]).unwrap();
        let adj = b.adjugate();
        assert_eq!(adj, Matrix::from_i64(2, 2, &[7, -3, -5, 2]).unwrap());
    }

    #[test]
    fn adjugate_of_identity() {
        for n in 1..5 {
            assert_eq!(Matrix::identity(n).adjugate(), Matrix::identity(n));
        }
    }

    #[test]
    fn adjugate_times_matrix_is_det_identity() {
        for n in 1..=5 {
            for seed in 0..10 {
                let b = lcg_matrix(n, seed + 100 * n as u64);
                let lhs = b.adjugate().mul(&b);
                let rhs = Matrix::identity(n).scale(&b.determinant());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn adjugate_matches_explicit_cofactors() {
        let b = lcg_matrix(4, 7);
        let adj = b.adjugate();
        for i in 0..4 {
            for j in 0..4 {
                let rows: Vec<usize> = (0..4).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..4).filter(|&c| c != i).collect();
                let minor = cofactor_det(&b.select(&rows, &cols));
                let expected = if (i + j) % 2 == 0 { minor } else { -minor };
                assert_eq!(adj[(i, j)], expected);
            }
        }
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("-0.033").unwrap(), ratio(-33, 1000));
        assert_eq!(parse_rational("14.834").unwrap(), ratio(14834, 1000));
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("1.5e-3").unwrap(), ratio(3, 2000));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("+2").unwrap(), int(2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn rationalize_keeps_significant_digits() {
        assert_eq!(rationalize(0.012345678, 4), ratio(1235, 100000));
        assert_eq!(rationalize(-31.4159, 3), ratio(-314, 10));
        assert_eq!(rationalize(12345.0, 2), int(12000));
    }
}
