//! Ecological sign patterns, interaction networks and parameter points.
//!
//! A sign pattern `σ = (σ_1, …, σ_n, σ_11, σ_12, …, σ_nn)` lists the signs of the
//! growth rates followed by the interaction matrix in row-major order. Its flat
//! text form is a string of `+`/`-` of length `n + n²`; spaces, commas, `|` and
//! `/` are ignored so `"-- +-/-+"` and `"--+--+"` are the same pattern.
//!
//! Predation follows the convention "species `i` predates on species `j`" ⇔
//! `b_ij < 0` and `b_ji > 0`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, Matrix};
use crate::Error;

/// A strict sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    /// `+1` or `-1`.
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl core::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl core::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl core::iter::Product for Sign {
    fn product<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Plus, |acc, s| acc * s)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Signs of the growth rates `a` and the interaction matrix `B`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignPattern {
    n: usize,
    a_signs: Vec<Sign>,
    b_signs: Vec<Sign>,
}

const SEPARATORS: [char; 4] = [' ', ',', '|', '/'];

impl SignPattern {
    /// Builds a pattern from the growth signs and the row-major matrix signs.
    pub fn new(a_signs: Vec<Sign>, b_signs: Vec<Sign>) -> Result<Self, Error> {
        let n = a_signs.len();
        if n == 0 || b_signs.len() != n * n {
            return Err(Error::MalformedPattern(n + b_signs.len()));
        }
        Ok(Self {
            n,
            a_signs,
            b_signs,
        })
    }

    /// Builds a pattern with positive diagonal from the growth signs and the
    /// off-diagonal signs listed row by row (`b_12, b_13, …, b_21, b_23, …`).
    pub fn from_off_diagonal(a_signs: Vec<Sign>, off: &[Sign]) -> Result<Self, Error> {
        let n = a_signs.len();
        if n == 0 || off.len() != n * (n - 1) {
            return Err(Error::MalformedPattern(n + off.len()));
        }
        let mut it = off.iter().copied();
        let mut b_signs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                b_signs.push(if i == j {
                    Sign::Plus
                } else {
                    it.next().unwrap()
                });
            }
        }
        Self::new(a_signs, b_signs)
    }

    /// Parses the flat `+`/`-` format, rejecting negative diagonal entries.
    pub fn parse(text: &str) -> Result<Self, Error> {
        Self::parse_with(text, false)
    }

    /// Parses the flat format; `allow_negative_diagonal` lifts the `b_ii > 0` check.
    pub fn parse_with(text: &str, allow_negative_diagonal: bool) -> Result<Self, Error> {
        let signs = parse_signs(text)?;
        let len = signs.len();
        let n = (1..=len).find(|n| n + n * n >= len).unwrap_or(0);
        if n == 0 || n + n * n != len {
            return Err(Error::MalformedPattern(len));
        }
        let b_signs = signs[n..].to_vec();
        let pattern = Self::new(signs[..n].to_vec(), b_signs)?;
        if !allow_negative_diagonal {
            pattern.check_diagonal()?;
        }
        Ok(pattern)
    }

    /// Parses the compact form used for sample tables: `n` growth signs followed by
    /// the `n(n−1)` off-diagonal signs row by row, with an implicit positive diagonal.
    pub fn parse_compact(text: &str) -> Result<Self, Error> {
        let signs = parse_signs(text)?;
        let len = signs.len();
        // n + n(n-1) = n²
        let n = (1..=len).find(|n| n * n >= len).unwrap_or(0);
        if n == 0 || n * n != len {
            return Err(Error::MalformedPattern(len));
        }
        Self::from_off_diagonal(signs[..n].to_vec(), &signs[n..])
    }

    fn check_diagonal(&self) -> Result<(), Error> {
        match (0..self.n).find(|&i| self.b(i, i) == Sign::Minus) {
            Some(i) => Err(Error::DiagonalSign { index: i + 1 }),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_signs(&self) -> &[Sign] {
        &self.a_signs
    }

    pub fn b_signs(&self) -> &[Sign] {
        &self.b_signs
    }

    /// Sign of `a_i` (0-based).
    pub fn a(&self, i: usize) -> Sign {
        self.a_signs[i]
    }

    /// Sign of `b_ij` (0-based).
    pub fn b(&self, i: usize, j: usize) -> Sign {
        self.b_signs[i * self.n + j]
    }

    /// `σ_1 ⋯ σ_n`, the orientation sign of `p_{1..n}`.
    pub fn a_product(&self) -> Sign {
        self.a_signs.iter().copied().product()
    }

    pub fn has_positive_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.b(i, i).is_plus())
    }

    /// A declining species whose row of `B` is all positive: its per-capita
    /// growth `a_i − (Bx)_i` is negative for every `x > 0`, so no feasible
    /// equilibrium exists. Returns the first such species, 0-based.
    pub fn declining_without_support(&self) -> Option<usize> {
        (0..self.n).find(|&i| !self.a(i).is_plus() && (0..self.n).all(|j| self.b(i, j).is_plus()))
    }

    /// The flattened `n + n²` sign vector.
    pub fn flat(&self) -> Vec<Sign> {
        self.a_signs.iter().chain(&self.b_signs).copied().collect()
    }

    /// Off-diagonal signs row by row.
    pub fn off_diagonal(&self) -> Vec<Sign> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1));
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.push(self.b(i, j));
                }
            }
        }
        out
    }

    /// Relabels species: the result has `a'_i = a_{π(i)}` and `b'_ij = b_{π(i)π(j)}`.
    pub fn permute(&self, perm: &[usize]) -> SignPattern {
        assert_eq!(perm.len(), self.n, "permutation length");
        let a_signs = perm.iter().map(|&p| self.a(p)).collect();
        let mut b_signs = Vec::with_capacity(self.n * self.n);
        for &pi in perm {
            for &pj in perm {
                b_signs.push(self.b(pi, pj));
            }
        }
        SignPattern {
            n: self.n,
            a_signs,
            b_signs,
        }
    }

    /// The lexicographically smallest relabelling (`+` before `-`) over all `n!`
    /// permutations, with one permutation realizing it.
    pub fn canonicalize(&self) -> (SignPattern, Vec<usize>) {
        let mut best = self.clone();
        let mut best_perm: Vec<usize> = (0..self.n).collect();
        for perm in Permutations::new(self.n) {
            let candidate = self.permute(&perm);
            if candidate.flat() < best.flat() {
                best = candidate;
                best_perm = perm;
            }
        }
        (best, best_perm)
    }

    /// The distinct relabellings of this pattern, sorted.
    pub fn orbit(&self) -> Vec<SignPattern> {
        let mut out: Vec<SignPattern> = Permutations::new(self.n)
            .map(|p| self.permute(&p))
            .collect();
        out.sort_by_key(SignPattern::flat);
        out.dedup();
        out
    }

    /// Every pattern on `n` species with positive diagonal, in lexicographic order.
    pub fn all_with_positive_diagonal(n: usize) -> impl Iterator<Item = SignPattern> {
        let free = n + n * (n - 1);
        (0u64..1 << free).map(move |bits| {
            // most significant bit first so the iteration is lexicographic with + < -
            let sign = |k: usize| Sign::from_parity(bits >> (free - 1 - k) & 1 == 1);
            let a: Vec<Sign> = (0..n).map(sign).collect();
            let off: Vec<Sign> = (n..free).map(sign).collect();
            SignPattern::from_off_diagonal(a, &off).expect("consistent sizes")
        })
    }
}

fn parse_signs(text: &str) -> Result<Vec<Sign>, Error> {
    let mut out = Vec::with_capacity(text.len());
    for (position, c) in text.chars().enumerate() {
        if SEPARATORS.contains(&c) {
            continue;
        }
        // accept the unicode minus sign as well
        let sign = match c {
            '\u{2212}' | '\u{2013}' => Some(Sign::Minus),
            c => Sign::from_char(c),
        };
        out.push(sign.ok_or(Error::IllegalCharacter { found: c, position })?);
    }
    Ok(out)
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.a_signs.iter().chain(&self.b_signs) {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        SignPattern::parse(s)
    }
}

/// All permutations of `0..n` in lexicographic order, identity first.
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Self {
            next: Some((0..n).collect()),
        }
    }
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut p = current.clone();
        let n = p.len();
        if n > 1 {
            if let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) {
                let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
                p.swap(i, j);
                p[i + 1..].reverse();
                self.next = Some(p);
            }
        }
        Some(current)
    }
}

/// Type of interaction between two species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interaction {
    /// `b_ij, b_ji > 0`
    Competition,
    /// `b_ij, b_ji < 0`
    Mutualism,
    /// The lower-indexed species of the pair predates on the higher one.
    LowerPredates,
    /// The higher-indexed species of the pair predates on the lower one.
    HigherPredates,
}

/// An interaction network: growth signs plus one interaction per unordered pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EcologicalNetwork {
    n: usize,
    growth: Vec<Sign>,
    // pairs (i, j), i < j, in lexicographic order
    edges: Vec<Interaction>,
}

impl EcologicalNetwork {
    /// A network where every pair competes.
    pub fn new(growth: Vec<Sign>) -> Self {
        let n = growth.len();
        Self {
            n,
            growth,
            edges: alloc::vec![Interaction::Competition; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn growth(&self) -> &[Sign] {
        &self.growth
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // pairs before row i, then offset within the row
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(), Error> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Network(alloc::format!(
                "invalid species pair ({}, {})",
                i + 1,
                j + 1
            )));
        }
        Ok(())
    }

    pub fn set_competition(&mut self, i: usize, j: usize) -> Result<(), Error> {
        self.check_pair(i, j)?;
        let k = self.pair_index(i, j);
        self.edges[k] = Interaction::Competition;
        Ok(())
    }

    pub fn set_mutualism(&mut self, i: usize, j: usize) -> Result<(), Error> {
        self.check_pair(i, j)?;
        let k = self.pair_index(i, j);
        self.edges[k] = Interaction::Mutualism;
        Ok(())
    }

    /// `predator` predates on `prey` (0-based species indices).
    pub fn set_predation(&mut self, predator: usize, prey: usize) -> Result<(), Error> {
        self.check_pair(predator, prey)?;
        let k = self.pair_index(predator, prey);
        self.edges[k] = if predator < prey {
            Interaction::LowerPredates
        } else {
            Interaction::HigherPredates
        };
        Ok(())
    }

    pub fn interaction(&self, i: usize, j: usize) -> Interaction {
        self.edges[self.pair_index(i, j)]
    }

    /// Compiles the network into its sign pattern (diagonal always positive).
    pub fn to_sign_pattern(&self) -> SignPattern {
        let n = self.n;
        let mut b = alloc::vec![Sign::Plus; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let (bij, bji) = match self.interaction(i, j) {
                    Interaction::Competition => (Sign::Plus, Sign::Plus),
                    Interaction::Mutualism => (Sign::Minus, Sign::Minus),
                    Interaction::LowerPredates => (Sign::Minus, Sign::Plus),
                    Interaction::HigherPredates => (Sign::Plus, Sign::Minus),
                };
                b[i * n + j] = bij;
                b[j * n + i] = bji;
            }
        }
        SignPattern::new(self.growth.clone(), b).expect("consistent sizes")
    }

    /// Recovers the network from a pattern with positive diagonal.
    pub fn from_sign_pattern(sp: &SignPattern) -> Result<Self, Error> {
        sp.check_diagonal()?;
        let mut net = EcologicalNetwork::new(sp.a_signs().to_vec());
        for i in 0..sp.n() {
            for j in i + 1..sp.n() {
                match (sp.b(i, j), sp.b(j, i)) {
                    (Sign::Plus, Sign::Plus) => net.set_competition(i, j)?,
                    (Sign::Minus, Sign::Minus) => net.set_mutualism(i, j)?,
                    (Sign::Minus, Sign::Plus) => net.set_predation(i, j)?,
                    (Sign::Plus, Sign::Minus) => net.set_predation(j, i)?,
                }
            }
        }
        Ok(net)
    }
}

/// Concrete exact parameters `(a, B)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParameterPoint {
    pub a: Vec<BigRational>,
    pub b: Matrix,
}

impl ParameterPoint {
    pub fn new(a: Vec<BigRational>, b: Matrix) -> Result<Self, Error> {
        if !b.is_square() || b.rows() != a.len() || a.is_empty() {
            return Err(Error::Dimension(alloc::format!(
                "a has length {} but B is {}x{}",
                a.len(),
                b.rows(),
                b.cols()
            )));
        }
        Ok(Self { a, b })
    }

    /// Builds a point from `a` and the off-diagonal entries of `B` listed row by
    /// row, with the given value on the diagonal.
    pub fn from_off_diagonal(
        a: Vec<BigRational>,
        off: &[BigRational],
        diagonal: &BigRational,
    ) -> Result<Self, Error> {
        let n = a.len();
        if off.len() != n * n.saturating_sub(1) {
            return Err(Error::Dimension(alloc::format!(
                "expected {} off-diagonal entries, got {}",
                n * n.saturating_sub(1),
                off.len()
            )));
        }
        let mut it = off.iter();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(if i == j {
                    diagonal.clone()
                } else {
                    it.next().unwrap().clone()
                });
            }
        }
        Self::new(a, Matrix::from_rows(n, n, data)?)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// The sign pattern of the point, or `None` if some entry is zero.
    pub fn sign_pattern(&self) -> Option<SignPattern> {
        let sign = |v: &BigRational| match linalg::signum(v) {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        };
        let a = self.a.iter().map(sign).collect::<Option<Vec<_>>>()?;
        let b = self
            .b
            .entries()
            .iter()
            .map(sign)
            .collect::<Option<Vec<_>>>()?;
        SignPattern::new(a, b).ok()
    }

    /// Checks that every entry is nonzero with the sign required by `sp`.
    pub fn check_signs(&self, sp: &SignPattern) -> Result<(), Error> {
        if sp.n() != self.n() {
            return Err(Error::Dimension(alloc::format!(
                "pattern has n = {} but point has n = {}",
                sp.n(),
                self.n()
            )));
        }
        let found = |v: &BigRational| match linalg::signum(v) {
            1 => '+',
            -1 => '-',
            _ => '0',
        };
        for i in 0..self.n() {
            let c = found(&self.a[i]);
            if c != sp.a(i).as_char() {
                return Err(Error::SignMismatch {
                    entry: alloc::format!("a_{}", i + 1),
                    expected: sp.a(i).as_char(),
                    found: c,
                });
            }
        }
        for i in 0..self.n() {
            for j in 0..self.n() {
                let c = found(&self.b[(i, j)]);
                if c != sp.b(i, j).as_char() {
                    return Err(Error::SignMismatch {
                        entry: alloc::format!("b_{}{}", i + 1, j + 1),
                        expected: sp.b(i, j).as_char(),
                        found: c,
                    });
                }
            }
        }
        Ok(())
    }

    /// Relabels species as in [`SignPattern::permute`].
    pub fn permute(&self, perm: &[usize]) -> ParameterPoint {
        let a = perm.iter().map(|&p| self.a[p].clone()).collect();
        ParameterPoint {
            a,
            b: self.b.select(perm, perm),
        }
    }
}

/// Bounds of the log-uniform magnitude distribution used for sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeRange {
    pub low: f64,
    pub high: f64,
}

impl Default for MagnitudeRange {
    fn default() -> Self {
        Self {
            low: 1e-2,
            high: 1e2,
        }
    }
}

impl MagnitudeRange {
    pub fn new(low: f64, high: f64) -> Result<Self, Error> {
        if !(low > 0.0 && high >= low && high.is_finite()) {
            return Err(Error::Number(alloc::format!(
                "magnitude range [{low}, {high}]"
            )));
        }
        Ok(Self { low, high })
    }

    /// One magnitude drawn log-uniformly.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (lo, hi) = (libm::log(self.low), libm::log(self.high));
        libm::exp(lo + rng.random::<f64>() * (hi - lo))
    }
}

/// Significant digits kept when sampled floats are turned into exact rationals.
pub const SAMPLE_DIGITS: u32 = 6;

/// Draws one σ-consistent exact point using the given generator.
pub fn sample_point_with<R: Rng + ?Sized>(
    sp: &SignPattern,
    range: &MagnitudeRange,
    rng: &mut R,
) -> ParameterPoint {
    let mut draw = |s: Sign| {
        let v = linalg::rationalize(range.draw(rng), SAMPLE_DIGITS);
        if s.is_plus() {
            v
        } else {
            -v
        }
    };
    let a: Vec<BigRational> = sp.a_signs().iter().map(|&s| draw(s)).collect();
    let b: Vec<BigRational> = sp.b_signs().iter().map(|&s| draw(s)).collect();
    ParameterPoint::new(a, Matrix::from_rows(sp.n(), sp.n(), b).expect("square"))
        .expect("consistent sizes")
}

/// Deterministic σ-consistent sample with log-uniform magnitudes.
pub fn sample_point(sp: &SignPattern, range: &MagnitudeRange, seed: u64) -> ParameterPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_point_with(sp, range, &mut rng)
}

/// Small helper for the string literals used throughout tests and tables.
pub fn signs(text: &str) -> Result<Vec<Sign>, Error> {
    parse_signs(text)
}

impl From<Sign> for char {
    fn from(s: Sign) -> char {
        s.as_char()
    }
}

/// Renders a sign slice as a `+`/`-` string.
pub fn sign_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.as_char()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    #[test]
    fn declining_species_without_support() {
        assert_eq!(
            SignPattern::parse("--++++")
                .unwrap()
                .declining_without_support(),
            Some(0)
        );
        assert_eq!(
            SignPattern::parse("+-++-+")
                .unwrap()
                .declining_without_support(),
            None
        );
        assert_eq!(
            SignPattern::parse("+-++++")
                .unwrap()
                .declining_without_support(),
            Some(1)
        );
        assert_eq!(
            SignPattern::parse("--+--+")
                .unwrap()
                .declining_without_support(),
            None
        );
    }

    use Sign::{Minus as M, Plus as P};

    #[test]
    fn parses_all_plus() {
        let sp = SignPattern::parse("++ ++++").unwrap();
        assert_eq!(sp.n(), 2);
        assert_eq!(sp.a_signs(), &[P, P]);
        assert!(sp.b_signs().iter().all(|&s| s == P));
    }

    #[test]
    fn parses_obligate_mutualism() {
        let sp = SignPattern::parse("-- +--+").unwrap();
        assert_eq!(sp.a_signs(), &[M, M]);
        assert_eq!(
            (sp.b(0, 0), sp.b(0, 1), sp.b(1, 0), sp.b(1, 1)),
            (P, M, M, P)
        );
    }

    #[test]
    fn parses_facultative_predation() {
        let sp = SignPattern::parse("+--+--++-+-+").unwrap();
        assert_eq!(sp.n(), 3);
        assert_eq!(sp.flat(), signs("+,-,-,+,-,-,+,+,-,+,-,+").unwrap());
        assert_eq!(sp.to_string(), "+--+--++-+-+");
        assert_eq!(sp.b(1, 0), P);
        assert_eq!(sp.b(2, 0), P);
        assert_eq!(sp.b(1, 2), M);
    }

    #[test]
    fn separators_are_ignored() {
        let a = SignPattern::parse("---|+--/-+-/--+").unwrap();
        let b = SignPattern::parse("---+---+---+").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(SignPattern::parse("+++"), Err(Error::MalformedPattern(3)));
        assert_eq!(SignPattern::parse(""), Err(Error::MalformedPattern(0)));
        assert!(matches!(
            SignPattern::parse("++x+++"),
            Err(Error::IllegalCharacter {
                found: 'x',
                position: 2
            })
        ));
        assert_eq!(
            SignPattern::parse("++-+++"),
            Err(Error::DiagonalSign { index: 1 })
        );
        assert!(SignPattern::parse_with("++-+++", true).is_ok());
    }

    #[test]
    fn compact_form_inserts_diagonal() {
        let sp = SignPattern::parse_compact("+--+-+-+-").unwrap();
        assert_eq!(sp.to_string(), "+--++-++-+-+");
        assert_eq!(sp.off_diagonal(), signs("+-+-+-").unwrap());
        assert!(SignPattern::parse_compact("+++++").is_err());
    }

    #[test]
    fn network_competition_pair() {
        let net = EcologicalNetwork::new(alloc::vec![P, P]);
        assert_eq!(net.to_sign_pattern().to_string(), "++++++");
    }

    #[test]
    fn network_obligate_mutualism_three() {
        let mut net = EcologicalNetwork::new(alloc::vec![M, M, M]);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            net.set_mutualism(i, j).unwrap();
        }
        assert_eq!(
            net.to_sign_pattern().flat(),
            signs("-,-,-,+,-,-,-,+,-,-,-,+").unwrap()
        );
    }

    #[test]
    fn network_predation_direction() {
        let mut net = EcologicalNetwork::new(alloc::vec![P, P]);
        net.set_predation(0, 1).unwrap();
        assert_eq!(net.to_sign_pattern().to_string(), "+++-++");
        let mut rev = EcologicalNetwork::new(alloc::vec![P, P]);
        rev.set_predation(1, 0).unwrap();
        assert_eq!(rev.to_sign_pattern().to_string(), "++++-+");
    }

    #[test]
    fn network_rejects_bad_pairs() {
        let mut net = EcologicalNetwork::new(alloc::vec![P, P]);
        assert!(net.set_mutualism(0, 0).is_err());
        assert!(net.set_predation(0, 2).is_err());
    }

    #[test]
    fn canonical_form_of_swapped_pair() {
        let x = SignPattern::parse("+-++-+").unwrap();
        let y = SignPattern::parse("-++-++").unwrap();
        assert_eq!(x.permute(&[1, 0]), y);
        let (cx, px) = x.canonicalize();
        let (cy, _) = y.canonicalize();
        assert_eq!(cx, cy);
        assert_eq!(x.permute(&px), cx);
        // brute force over S_2
        let min = [x.clone(), y.clone()]
            .into_iter()
            .min_by_key(SignPattern::flat)
            .unwrap();
        assert_eq!(cx, min);
    }

    #[test]
    fn all_plus_is_fixed() {
        let sp = SignPattern::parse("+++ +++/+++/+++").unwrap();
        let (c, perm) = sp.canonicalize();
        assert_eq!(c, sp);
        assert_eq!(perm, alloc::vec![0, 1, 2]);
    }

    #[test]
    fn ten_orbits_for_two_species() {
        let mut canon: Vec<SignPattern> = SignPattern::all_with_positive_diagonal(2)
            .map(|sp| sp.canonicalize().0)
            .collect();
        canon.sort();
        canon.dedup();
        assert_eq!(canon.len(), 10);
    }

    #[test]
    fn permutations_enumerate_sn() {
        assert_eq!(Permutations::new(4).count(), 24);
        assert_eq!(Permutations::new(1).count(), 1);
        let first = Permutations::new(3).next().unwrap();
        assert_eq!(first, alloc::vec![0, 1, 2]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let sp = SignPattern::parse("+-+--+").unwrap();
        let r = MagnitudeRange::default();
        assert_eq!(sample_point(&sp, &r, 7), sample_point(&sp, &r, 7));
        assert_ne!(sample_point(&sp, &r, 7), sample_point(&sp, &r, 8));
    }

    #[test]
    fn all_plus_samples_are_positive() {
        let sp = SignPattern::parse("++++++++++++").unwrap();
        for seed in 0..20 {
            let p = sample_point(&sp, &MagnitudeRange::default(), seed);
            assert!(p.a.iter().all(Signed::is_positive));
            assert!(p.b.entries().iter().all(Signed::is_positive));
        }
    }

    #[test]
    fn obligate_mutualism_samples_have_negative_off_diagonal() {
        let sp = SignPattern::parse("---+---+---+").unwrap();
        for seed in 0..20 {
            let p = sample_point(&sp, &MagnitudeRange::default(), seed);
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(p.b[(i, j)].is_negative(), i != j);
                }
            }
            assert_eq!(p.sign_pattern().unwrap(), sp);
        }
    }

    #[test]
    fn magnitudes_stay_in_range() {
        let sp = SignPattern::parse("++++++").unwrap();
        let r = MagnitudeRange::new(0.5, 2.0).unwrap();
        for seed in 0..50 {
            let p = sample_point(&sp, &r, seed);
            for v in p.a.iter().chain(p.b.entries()) {
                let f = linalg::to_f64(v);
                assert!((0.499..=2.001).contains(&f), "{f}");
            }
        }
        assert!(MagnitudeRange::new(0.0, 1.0).is_err());
    }

    fn pattern_strategy() -> impl Strategy<Value = SignPattern> {
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n + n * n).prop_map(move |bits| {
                let s: Vec<Sign> = bits.into_iter().map(Sign::from_parity).collect();
                SignPattern::new(s[..n].to_vec(), s[n..].to_vec()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(sp in pattern_strategy()) {
            let text = sp.to_string();
            prop_assert_eq!(SignPattern::parse_with(&text, true).unwrap(), sp);
        }

        #[test]
        fn canonical_form_is_idempotent_and_orbit_invariant(sp in pattern_strategy(), k in 0usize..24) {
            let (c, perm) = sp.canonicalize();
            prop_assert_eq!(&sp.permute(&perm), &c);
            prop_assert_eq!(&c.canonicalize().0, &c);
            let perms: Vec<Vec<usize>> = Permutations::new(sp.n()).collect();
            let other = sp.permute(&perms[k % perms.len()]);
            prop_assert_eq!(other.canonicalize().0, c);
        }

        #[test]
        fn network_round_trip(sp in pattern_strategy()) {
            if sp.has_positive_diagonal() {
                let net = EcologicalNetwork::from_sign_pattern(&sp).unwrap();
                prop_assert_eq!(net.to_sign_pattern(), sp);
            } else {
                prop_assert!(EcologicalNetwork::from_sign_pattern(&sp).is_err());
            }
        }
    }
}
