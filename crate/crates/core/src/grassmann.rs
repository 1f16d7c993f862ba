//! Plücker coordinates of `M = [diag(a) | B]` and their sign combinatorics.
//!
//! Bases are the `n`-subsets of `{1, …, 2n}`, ranked lexicographically. Columns
//! `1..=n` belong to `diag(a)`, columns `n+1..=2n` to `B`. Only sorted bases are
//! stored; alternation is accounted for when formulas are built.
//!
//! For a 4-set `a < b < c < d` disjoint from an `(n−2)`-set `S`, the 3-term
//! Grassmann–Plücker relation
//!
//! ```text
//! p[Sab]·p[Scd] − p[Sac]·p[Sbd] + p[Sad]·p[Sbc] = 0
//! ```
//!
//! holds for the sorted coordinates as written: moving the pair behind `S` into
//! place costs the same parity `g(a)+g(b)+g(c)+g(d)` in all three products, so it
//! cancels.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::linalg::{self, Matrix};
use crate::model::{ParameterPoint, Permutations, Sign, SignPattern};
use crate::Error;

/// Largest `n` supported by the bitmask basis encoding.
pub const MAX_N: usize = 8;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographic rank of a strictly increasing subset of `1..=ground`.
pub fn rank(ground: usize, elements: &[usize]) -> Result<usize, Error> {
    let k = elements.len();
    let mut prev = 0usize;
    let mut r = 0usize;
    for (i, &e) in elements.iter().enumerate() {
        if e <= prev || e > ground {
            return Err(Error::InvalidSubset { ground });
        }
        // subsets that agree so far and put a smaller value at position i
        for v in prev + 1..e {
            r += binomial(ground - v, k - 1 - i);
        }
        prev = e;
    }
    Ok(r)
}

/// Inverse of [`rank`].
pub fn unrank(ground: usize, size: usize, mut r: usize) -> Result<Vec<usize>, Error> {
    if r >= binomial(ground, size) {
        return Err(Error::RankOutOfRange {
            rank: r,
            ground,
            size,
        });
    }
    let mut out = Vec::with_capacity(size);
    let mut v = 1usize;
    for i in 0..size {
        loop {
            let block = binomial(ground - v, size - 1 - i);
            if r < block {
                break;
            }
            r -= block;
            v += 1;
        }
        out.push(v);
        v += 1;
    }
    Ok(out)
}

/// All bases of `Gr(n, 2n)` with O(1) rank lookup.
#[derive(Debug, Clone)]
pub struct BasisTable {
    n: usize,
    // element bitmask (bit e-1 for element e) per rank
    masks: Vec<u32>,
    // rank per bitmask, usize::MAX for non-bases
    lookup: Vec<usize>,
}

impl BasisTable {
    pub fn new(n: usize) -> Self {
        assert!((1..=MAX_N).contains(&n), "n must be in 1..={MAX_N}");
        let ground = 2 * n;
        let count = binomial(ground, n);
        let mut masks = Vec::with_capacity(count);
        let mut lookup = vec![usize::MAX; 1 << ground];
        for r in 0..count {
            let elems = unrank(ground, n, r).expect("in range");
            let mask = elems.iter().fold(0u32, |m, &e| m | 1 << (e - 1));
            lookup[mask as usize] = r;
            masks.push(mask);
        }
        Self { n, masks, lookup }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn mask(&self, rank: usize) -> u32 {
        self.masks[rank]
    }

    /// Rank of the basis with the given element bitmask.
    pub fn rank_of_mask(&self, mask: u32) -> Option<usize> {
        self.lookup
            .get(mask as usize)
            .copied()
            .filter(|&r| r != usize::MAX)
    }

    /// Rank of a sorted 1-based element list.
    pub fn rank_of(&self, elements: &[usize]) -> Option<usize> {
        if elements.len() != self.n {
            return None;
        }
        rank(2 * self.n, elements).ok()
    }

    /// 1-based sorted elements of the basis at `rank`.
    pub fn elements(&self, rank: usize) -> Vec<usize> {
        mask_elements(self.masks[rank])
    }

    /// Compact label such as `"146"`; elements above 9 are comma separated.
    pub fn label(&self, rank: usize) -> String {
        let elems = self.elements(rank);
        let sep = if 2 * self.n > 9 { "," } else { "" };
        let mut s = String::new();
        for (k, e) in elems.iter().enumerate() {
            if k > 0 {
                s.push_str(sep);
            }
            s.push_str(&alloc::format!("{e}"));
        }
        s
    }

    /// Rank of `{1, …, n}` (always 0).
    pub fn a_block(&self) -> usize {
        0
    }

    /// Rank of `{n+1, …, 2n}`, the coordinate equal to `det B`.
    pub fn b_block(&self) -> usize {
        self.len() - 1
    }
}

fn mask_elements(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Splits a basis into its `diag(a)` rows and its `B` columns (both 0-based),
/// together with the sign of the row matching.
///
/// `det M_S = ε · Π_{i∈A} a_i · det B[R, C]` where `A` is the `diag(a)` part,
/// `R = [n] ∖ A` and `ε` is the parity of the sequence `(A, R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSplit {
    pub a_part: Vec<usize>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub epsilon: Sign,
}

impl BlockSplit {
    pub fn new(n: usize, elements: &[usize]) -> Self {
        let a_part: Vec<usize> = elements
            .iter()
            .filter(|&&e| e <= n)
            .map(|e| e - 1)
            .collect();
        let cols: Vec<usize> = elements
            .iter()
            .filter(|&&e| e > n)
            .map(|e| e - n - 1)
            .collect();
        let rows: Vec<usize> = (0..n).filter(|i| !a_part.contains(i)).collect();
        let seq: Vec<usize> = a_part.iter().chain(&rows).copied().collect();
        Self {
            a_part,
            rows,
            cols,
            epsilon: Sign::from_parity(inversions(&seq) % 2 == 1),
        }
    }
}

/// Number of out-of-order pairs.
pub fn inversions(seq: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                count += 1;
            }
        }
    }
    count
}

/// Exact Plücker coordinates indexed by basis rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluckerVector {
    pub n: usize,
    pub p: Vec<BigRational>,
}

impl PluckerVector {
    /// Signs of all coordinates in rank order; `None` marks a zero coordinate.
    pub fn signs(&self) -> Vec<Option<Sign>> {
        self.p
            .iter()
            .map(|v| match linalg::signum(v) {
                1 => Some(Sign::Plus),
                -1 => Some(Sign::Minus),
                _ => None,
            })
            .collect()
    }

    pub fn has_zero(&self) -> bool {
        self.p.iter().any(Zero::is_zero)
    }
}

/// Evaluates every maximal minor of `[diag(a) | B]` through the block structure.
pub fn plucker_vector(point: &ParameterPoint) -> PluckerVector {
    let n = point.n();
    let table = BasisTable::new(n);
    let p = (0..table.len())
        .map(|r| {
            let split = BlockSplit::new(n, &table.elements(r));
            let mut v = point.b.select(&split.rows, &split.cols).determinant();
            for &i in &split.a_part {
                v *= &point.a[i];
            }
            if split.epsilon == Sign::Minus {
                v = -v;
            }
            v
        })
        .collect();
    PluckerVector { n, p }
}

/// The `n × 2n` parameter matrix `[diag(a) | B]`.
pub fn parameter_matrix(point: &ParameterPoint) -> Matrix {
    let n = point.n();
    let mut m = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        m[(i, i)] = point.a[i].clone();
        for j in 0..n {
            m[(i, n + j)] = point.b[(i, j)].clone();
        }
    }
    m
}

/// A sign that may still be undetermined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriSign {
    Minus,
    Unknown,
    Plus,
}

impl TriSign {
    pub fn known(self) -> Option<Sign> {
        match self {
            TriSign::Plus => Some(Sign::Plus),
            TriSign::Minus => Some(Sign::Minus),
            TriSign::Unknown => None,
        }
    }

    pub fn is_known(self) -> bool {
        self != TriSign::Unknown
    }

    pub fn as_char(self) -> char {
        match self {
            TriSign::Plus => '+',
            TriSign::Minus => '-',
            TriSign::Unknown => '?',
        }
    }

    pub fn from_char(c: char) -> Option<TriSign> {
        match c {
            '+' => Some(TriSign::Plus),
            '-' => Some(TriSign::Minus),
            '?' => Some(TriSign::Unknown),
            _ => None,
        }
    }

    /// `+1`, `0` (unknown) or `-1`.
    pub fn as_i8(self) -> i8 {
        match self {
            TriSign::Plus => 1,
            TriSign::Unknown => 0,
            TriSign::Minus => -1,
        }
    }
}

impl From<Sign> for TriSign {
    fn from(s: Sign) -> TriSign {
        match s {
            Sign::Plus => TriSign::Plus,
            Sign::Minus => TriSign::Minus,
        }
    }
}

impl core::ops::Mul<Sign> for TriSign {
    type Output = TriSign;

    fn mul(self, rhs: Sign) -> TriSign {
        match self.known() {
            Some(s) => (s * rhs).into(),
            None => TriSign::Unknown,
        }
    }
}

/// Sign of `det B[rows, cols]` implied by the entry signs alone: known when all
/// Leibniz monomials agree, unknown otherwise.
pub fn minor_sign_under_pattern(rows: &[usize], cols: &[usize], sp: &SignPattern) -> TriSign {
    assert_eq!(rows.len(), cols.len(), "minor must be square");
    let k = rows.len();
    if k == 0 {
        return TriSign::Plus;
    }
    let mut seen: Option<Sign> = None;
    for tau in Permutations::new(k) {
        let mut s = Sign::from_parity(inversions(&tau) % 2 == 1);
        for t in 0..k {
            s = s * sp.b(rows[t], cols[tau[t]]);
        }
        match seen {
            None => seen = Some(s),
            Some(prev) if prev != s => return TriSign::Unknown,
            _ => {}
        }
    }
    seen.map_or(TriSign::Unknown, TriSign::from)
}

/// Which bases a partial chirotope fixes before any search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initialization {
    /// Every basis whose Leibniz monomials agree in sign.
    #[default]
    Generalized,
    /// Only `p_{1..n}` and the `n²` bases with a single `B` column.
    TrivialOnly,
}

/// Signs on the bases of `Gr(n, 2n)`, oriented by `sign p_{1..n} = σ_1⋯σ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialChirotope {
    pub n: usize,
    pub chi: Vec<TriSign>,
}

impl PartialChirotope {
    pub fn unknown(n: usize) -> Self {
        Self {
            n,
            chi: vec![TriSign::Unknown; binomial(2 * n, n)],
        }
    }

    pub fn unknown_count(&self) -> usize {
        self.chi.iter().filter(|s| !s.is_known()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.chi.iter().all(|s| s.is_known())
    }

    /// Full sign vector, if every basis is known.
    pub fn to_signs(&self) -> Option<Vec<Sign>> {
        self.chi.iter().map(|s| s.known()).collect()
    }

    pub fn from_signs(n: usize, signs: &[Sign]) -> Self {
        Self {
            n,
            chi: signs.iter().map(|&s| s.into()).collect(),
        }
    }

    /// Parses a rank-ordered string over `+`, `-`, `?`.
    pub fn parse(n: usize, text: &str) -> Result<Self, Error> {
        let chi = text
            .chars()
            .enumerate()
            .map(|(position, c)| {
                TriSign::from_char(c).ok_or(Error::IllegalCharacter { found: c, position })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if chi.len() != binomial(2 * n, n) {
            return Err(Error::Dimension(alloc::format!(
                "chirotope for n = {n} needs {} signs, got {}",
                binomial(2 * n, n),
                chi.len()
            )));
        }
        Ok(Self { n, chi })
    }

    /// Does `self` agree with `other` wherever `other` is known?
    pub fn extends(&self, other: &PartialChirotope) -> bool {
        self.chi
            .iter()
            .zip(&other.chi)
            .all(|(a, b)| !b.is_known() || a == b)
    }
}

impl PartialChirotope {
    /// The chirotope of the relabelled pattern `σ∘π` (see
    /// [`SignPattern::permute`]), with `π` given 0-based.
    ///
    /// Relabelling permutes the rows of `[diag(a) | B]` by `π` and both column
    /// blocks by the same `π`, so `χ'(S) = sgn(π) · sgn(sort τS) · χ(sort τS)`.
    pub fn relabel(&self, perm: &[usize]) -> PartialChirotope {
        let n = self.n;
        assert_eq!(perm.len(), n, "permutation length must equal n");
        let table = BasisTable::new(n);
        let row_sign = Sign::from_parity(inversions(perm) % 2 == 1);
        let chi = (0..table.len())
            .map(|r| {
                let image: Vec<usize> = table
                    .elements(r)
                    .iter()
                    .map(|&e| {
                        if e <= n {
                            perm[e - 1] + 1
                        } else {
                            n + perm[e - n - 1] + 1
                        }
                    })
                    .collect();
                let sort_sign = Sign::from_parity(inversions(&image) % 2 == 1);
                let mask = image.iter().fold(0u32, |m, &e| m | 1 << (e - 1));
                let source = table.rank_of_mask(mask).expect("n-subset");
                self.chi[source] * (row_sign * sort_sign)
            })
            .collect();
        PartialChirotope { n, chi }
    }
}

impl fmt::Display for PartialChirotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.chi {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// The partial sign assignment induced by `σ`.
pub fn partial_chirotope(sp: &SignPattern) -> PartialChirotope {
    partial_chirotope_with(sp, Initialization::Generalized)
}

pub fn partial_chirotope_with(sp: &SignPattern, init: Initialization) -> PartialChirotope {
    let n = sp.n();
    let table = BasisTable::new(n);
    let chi = (0..table.len())
        .map(|r| {
            let split = BlockSplit::new(n, &table.elements(r));
            if init == Initialization::TrivialOnly && split.cols.len() > 1 {
                return TriSign::Unknown;
            }
            let a_sign: Sign = split.a_part.iter().map(|&i| sp.a(i)).product();
            minor_sign_under_pattern(&split.rows, &split.cols, sp) * (a_sign * split.epsilon)
        })
        .collect();
    PartialChirotope { n, chi }
}

/// One 3-term relation `X − Y + Z = 0` with `X = p[Sab]p[Scd]`,
/// `Y = p[Sac]p[Sbd]`, `Z = p[Sad]p[Sbc]` on sorted coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpRelation {
    /// The common `(n−2)`-set, 1-based sorted.
    pub common: Vec<usize>,
    /// `a < b < c < d`, 1-based.
    pub quad: [usize; 4],
    /// Basis ranks of the pairs `(Sab, Scd)`, `(Sac, Sbd)`, `(Sad, Sbc)`.
    pub products: [(usize, usize); 3],
}

/// Coefficients of the three products in a relation.
pub const GP_COEFFICIENTS: [Sign; 3] = [Sign::Plus, Sign::Minus, Sign::Plus];

impl GpRelation {
    /// The six bases, product by product.
    pub fn bases(&self) -> [usize; 6] {
        let [(a, b), (c, d), (e, f)] = self.products;
        [a, b, c, d, e, f]
    }

    /// Evaluates the relation on exact coordinates.
    pub fn residual(&self, p: &PluckerVector) -> BigRational {
        let term = |(l, r): (usize, usize)| &p.p[l] * &p.p[r];
        term(self.products[0]) - term(self.products[1]) + term(self.products[2])
    }
}

/// Every 3-term relation for `Gr(n, 2n)`, ordered by `(S, quad)` lexicographically.
pub fn enumerate_gp_relations(table: &BasisTable) -> Vec<GpRelation> {
    let n = table.n();
    let ground = 2 * n;
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(ground, n - 2) * binomial(n + 2, 4));
    for s_rank in 0..binomial(ground, n - 2) {
        let common = unrank(ground, n - 2, s_rank).expect("in range");
        let s_mask = common.iter().fold(0u32, |m, &e| m | 1 << (e - 1));
        let rest: Vec<usize> = (1..=ground)
            .filter(|e| s_mask >> (e - 1) & 1 == 0)
            .collect();
        for q_rank in 0..binomial(rest.len(), 4) {
            let q = unrank(rest.len(), 4, q_rank).expect("in range");
            let quad = [
                rest[q[0] - 1],
                rest[q[1] - 1],
                rest[q[2] - 1],
                rest[q[3] - 1],
            ];
            let basis = |x: usize, y: usize| {
                table
                    .rank_of_mask(s_mask | 1 << (x - 1) | 1 << (y - 1))
                    .expect("n-subset")
            };
            let [a, b, c, d] = quad;
            out.push(GpRelation {
                common: common.clone(),
                quad,
                products: [
                    (basis(a, b), basis(c, d)),
                    (basis(a, c), basis(b, d)),
                    (basis(a, d), basis(b, c)),
                ],
            });
        }
    }
    out
}

/// Checks every 3-term relation exactly.
pub fn verify_gp(p: &PluckerVector) -> bool {
    let table = BasisTable::new(p.n);
    enumerate_gp_relations(&table)
        .iter()
        .all(|rel| rel.residual(p).is_zero())
}

/// Outcome of the sign test on one relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationStatus {
    /// All six signs known and all three terms share a sign.
    Violated,
    /// All six signs known and consistent.
    Satisfied,
    /// Exactly one basis unknown and its sign is forced.
    Forces(usize, Sign),
    /// Anything else.
    Open,
}

/// Sign test of `X − Y + Z = 0` over nonzero reals: the three signed terms must
/// not all share one sign.
pub fn relation_status(rel: &GpRelation, chi: &[TriSign]) -> RelationStatus {
    let mut terms = [0i8; 3];
    let mut missing: Option<(usize, usize, Sign)> = None;
    let mut unknown = 0;
    for (k, &(l, r)) in rel.products.iter().enumerate() {
        let (sl, sr) = (chi[l], chi[r]);
        match (sl.known(), sr.known()) {
            (Some(x), Some(y)) => terms[k] = (x * y * GP_COEFFICIENTS[k]).as_i8(),
            (None, Some(y)) => {
                unknown += 1;
                missing = Some((k, l, y));
            }
            (Some(x), None) => {
                unknown += 1;
                missing = Some((k, r, x));
            }
            (None, None) => unknown += 2,
        }
    }
    match (unknown, missing) {
        (0, _) => {
            if terms[0] == terms[1] && terms[1] == terms[2] {
                RelationStatus::Violated
            } else {
                RelationStatus::Satisfied
            }
        }
        (1, Some((k, basis, partner))) => {
            let others: Vec<i8> = (0..3).filter(|&j| j != k).map(|j| terms[j]).collect();
            if others[0] == others[1] {
                // the missing term must take the opposite sign
                let needed = Sign::from_parity(others[0] > 0);
                RelationStatus::Forces(basis, needed * GP_COEFFICIENTS[k] * partner)
            } else {
                RelationStatus::Open
            }
        }
        _ => RelationStatus::Open,
    }
}
