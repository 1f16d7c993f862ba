//! Feasibility and stability inequalities as signed sums of Plücker coordinates.

use alloc::vec::Vec;
use core::fmt;

use crate::grassmann::{binomial, inversions, unrank, BasisTable, TriSign};
use crate::model::{Sign, SignPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    /// `x̃_i > 0`, species `i` is 1-based.
    Feasibility(usize),
    /// `c_i > 0` for the characteristic coefficient `c_i`, `i` in `0..n`.
    Stability(usize),
    /// `det B > 0`, the orientation under which `x̃ = adj(B)a` is used.
    Normalization,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintKind::Feasibility(i) => write!(f, "feasibility[{i}]"),
            ConstraintKind::Stability(i) => write!(f, "stability[c{i}]"),
            ConstraintKind::Normalization => f.write_str("det-b"),
        }
    }
}

/// `Σ_k ε_k · p_{B_k} > 0` with all coordinates nonzero and magnitudes free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignConstraint {
    pub kind: ConstraintKind,
    /// `(basis rank, ε_k)`, bases distinct.
    pub terms: Vec<(usize, Sign)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintStatus {
    /// Every term is known and negative.
    Violated,
    /// The only unknown term must be positive.
    Forces(usize, Sign),
    SatisfiedPossible,
}

impl SignConstraint {
    pub fn status(&self, chi: &[TriSign]) -> ConstraintStatus {
        constraint_status(self, chi)
    }

    /// Evaluates the constraint on exact coordinates.
    pub fn evaluate(&self, p: &[num_rational::BigRational]) -> num_rational::BigRational {
        let mut sum = num_rational::BigRational::from_integer(0.into());
        for &(basis, eps) in &self.terms {
            match eps {
                Sign::Plus => sum += &p[basis],
                Sign::Minus => sum -= &p[basis],
            }
        }
        sum
    }
}

/// A sum of nonzero terms with free magnitudes can be made positive iff some
/// term can be positive.
pub fn constraint_status(c: &SignConstraint, chi: &[TriSign]) -> ConstraintStatus {
    let mut unknown = None;
    for &(basis, eps) in &c.terms {
        match chi[basis].known() {
            Some(s) if s * eps == Sign::Plus => return ConstraintStatus::SatisfiedPossible,
            Some(_) => {}
            None if unknown.is_some() => return ConstraintStatus::SatisfiedPossible,
            None => unknown = Some((basis, eps)),
        }
    }
    match unknown {
        None => ConstraintStatus::Violated,
        Some((basis, eps)) => ConstraintStatus::Forces(basis, eps),
    }
}

/// `p_{n+1..2n} = det B > 0`.
pub fn build_normalization_constraint(n: usize) -> SignConstraint {
    let table = BasisTable::new(n);
    SignConstraint {
        kind: ConstraintKind::Normalization,
        terms: alloc::vec![(table.b_block(), Sign::Plus)],
    }
}

/// For species `i` with `S_i = {n+1, …, 2n} ∖ {n+i}`:
/// `(−1)^{i+1} Σ_j p_{{j} ∪ S_i} > 0`.
pub fn build_feasibility_constraints(n: usize) -> Vec<SignConstraint> {
    let table = BasisTable::new(n);
    (1..=n)
        .map(|i| {
            let eps = Sign::from_parity(i % 2 == 0);
            let s_mask = (n + 1..=2 * n)
                .filter(|&e| e != n + i)
                .fold(0u32, |m, e| m | 1 << (e - 1));
            let terms = (1..=n)
                .map(|j| {
                    let basis = table.rank_of_mask(s_mask | 1 << (j - 1)).expect("n-subset");
                    (basis, eps)
                })
                .collect();
            SignConstraint {
                kind: ConstraintKind::Feasibility(i),
                terms,
            }
        })
        .collect()
}

/// For `i` in `0..n`: `c_i = Σ_{|J| = n−i} (Π_{j∈J} x⋆_j) det B[J, J]`, written
/// through `(−1)^{π(J)} p_{J^c ∪ (n+J)} = Π_{j∉J} a_j · det B[J, J]`. Dividing
/// by `p_{1..n} = Π a_j` and dropping positive factors leaves the coefficient
/// `(−1)^{π(J)} · Π_{j∈J} σ_j · σ_1⋯σ_n`.
pub fn build_stability_constraints(sp: &SignPattern) -> Vec<SignConstraint> {
    let n = sp.n();
    let table = BasisTable::new(n);
    let total = sp.a_product();
    (0..n)
        .map(|i| {
            let size = n - i;
            let terms = (0..binomial(n, size))
                .map(|r| {
                    let j = unrank(n, size, r).expect("in range");
                    let complement: Vec<usize> = (1..=n).filter(|e| !j.contains(e)).collect();
                    let seq: Vec<usize> = complement.iter().chain(&j).copied().collect();
                    let mask = complement
                        .iter()
                        .copied()
                        .chain(j.iter().map(|&e| e + n))
                        .fold(0u32, |m, e| m | 1 << (e - 1));
                    let basis = table.rank_of_mask(mask).expect("n-subset");
                    let a_sign: Sign = j.iter().map(|&e| sp.a(e - 1)).product();
                    let eps = Sign::from_parity(inversions(&seq) % 2 == 1) * a_sign * total;
                    (basis, eps)
                })
                .collect();
            SignConstraint {
                kind: ConstraintKind::Stability(i),
                terms,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::plucker_vector;
    use crate::linalg::int;
    use crate::model::{sample_point, MagnitudeRange, ParameterPoint};
    use crate::stability::{char_poly_coeffs, feasibility_check};
    use alloc::vec;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn labelled(table: &BasisTable, c: &SignConstraint) -> Vec<(alloc::string::String, char)> {
        c.terms
            .iter()
            .map(|&(b, s)| (table.label(b), s.as_char()))
            .collect()
    }

    fn pairs(v: &[(&str, char)]) -> Vec<(alloc::string::String, char)> {
        v.iter().map(|&(l, s)| (l.into(), s)).collect()
    }

    #[test]
    fn feasibility_three_species() {
        let table = BasisTable::new(3);
        let cs = build_feasibility_constraints(3);
        assert_eq!(
            labelled(&table, &cs[2]),
            pairs(&[("145", '+'), ("245", '+'), ("345", '+')])
        );
        assert_eq!(
            labelled(&table, &cs[1]),
            pairs(&[("146", '-'), ("246", '-'), ("346", '-')])
        );
        assert_eq!(
            labelled(&table, &cs[0]),
            pairs(&[("156", '+'), ("256", '+'), ("356", '+')])
        );
    }

    #[test]
    fn feasibility_two_species() {
        let table = BasisTable::new(2);
        let cs = build_feasibility_constraints(2);
        assert_eq!(labelled(&table, &cs[0]), pairs(&[("14", '+'), ("24", '+')]));
        assert_eq!(labelled(&table, &cs[1]), pairs(&[("13", '-'), ("23", '-')]));
    }

    #[test]
    fn stability_three_species_layout() {
        let sp = SignPattern::parse("---+---+---+").unwrap();
        let table = BasisTable::new(3);
        let cs = build_stability_constraints(&sp);
        assert_eq!(cs[0].kind, ConstraintKind::Stability(0));
        assert_eq!(labelled(&table, &cs[0]), pairs(&[("456", '+')]));
        let trace: Vec<_> = labelled(&table, &cs[2])
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        assert_eq!(trace, ["234", "135", "126"]);
        // J = {1}: π = 2, ε = σ_1 · σ_1σ_2σ_3 = +
        assert_eq!(cs[2].terms[0].1, Sign::Plus);
        assert_eq!(cs[1].terms.len(), 3);
    }

    #[test]
    fn stability_two_species() {
        let table = BasisTable::new(2);
        for text in ["+++-++", "--+--+", "+-+-++"] {
            let sp = SignPattern::parse(text).unwrap();
            let cs = build_stability_constraints(&sp);
            let (s1, s2) = (sp.a(0), sp.a(1));
            assert_eq!(labelled(&table, &cs[0]), pairs(&[("34", '+')]));
            assert_eq!(
                labelled(&table, &cs[1]),
                pairs(&[("23", (-s2).as_char()), ("14", s1.as_char())])
            );
        }
    }

    #[test]
    fn status_rules() {
        let c = SignConstraint {
            kind: ConstraintKind::Feasibility(3),
            terms: vec![(0, Sign::Plus), (1, Sign::Plus), (2, Sign::Plus)],
        };
        let m = TriSign::Minus;
        let u = TriSign::Unknown;
        let p = TriSign::Plus;
        assert_eq!(c.status(&[m, m, m]), ConstraintStatus::Violated);
        assert_eq!(
            c.status(&[m, u, m]),
            ConstraintStatus::Forces(1, Sign::Plus)
        );
        assert_eq!(c.status(&[p, m, u]), ConstraintStatus::SatisfiedPossible);
        assert_eq!(c.status(&[u, m, u]), ConstraintStatus::SatisfiedPossible);
        let neg = SignConstraint {
            kind: ConstraintKind::Feasibility(2),
            terms: vec![(0, Sign::Minus), (1, Sign::Minus)],
        };
        assert_eq!(
            neg.status(&[p, u]),
            ConstraintStatus::Forces(1, Sign::Minus)
        );
        let single = SignConstraint {
            kind: ConstraintKind::Stability(0),
            terms: vec![(5, Sign::Plus)],
        };
        assert_eq!(
            single.status(&[u; 6]),
            ConstraintStatus::Forces(5, Sign::Plus)
        );
    }

    fn point_for(n: usize, bits: u64, seed: u64) -> ParameterPoint {
        let sp = SignPattern::all_with_positive_diagonal(n)
            .nth((bits % (1 << (n * n))) as usize)
            .unwrap();
        sample_point(&sp, &MagnitudeRange::default(), seed)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // (−1)^{i+1} Σ_j p_{j∪S_i} equals x̃_i up to the sign of a_i's orientation:
        // both sides agree in sign whenever det B > 0.
        #[test]
        fn feasibility_terms_track_equilibrium(n in 2usize..=4, bits in any::<u64>(), seed in any::<u64>()) {
            let pt = point_for(n, bits, seed);
            let p = plucker_vector(&pt).p;
            let rep = feasibility_check(&pt.a, &pt.b).unwrap();
            for c in build_feasibility_constraints(n) {
                let ConstraintKind::Feasibility(i) = c.kind else { unreachable!() };
                prop_assert_eq!(c.evaluate(&p), rep.x_tilde[i - 1].clone());
            }
        }

        // (−1)^{π(J)} p_{J^c ∪ (n+J)} / p_{1..n} · Π_{j∈J}(a_j x_j) summed over J gives c_i,
        // and its sign is ε times the sign of the coordinate.
        #[test]
        fn stability_terms_track_coefficients(
            n in 2usize..=4,
            bits in any::<u64>(),
            seed in any::<u64>(),
            xs in proptest::collection::vec(1i64..50, 4),
        ) {
            let pt = point_for(n, bits, seed);
            let sp = pt.sign_pattern().unwrap();
            let p = plucker_vector(&pt).p;
            let x: Vec<_> = xs[..n].iter().map(|&v| int(v)).collect();
            let coeffs = char_poly_coeffs(&x, &pt.b).unwrap();
            let table = BasisTable::new(n);
            for c in build_stability_constraints(&sp) {
                let ConstraintKind::Stability(i) = c.kind else { unreachable!() };
                let mut sum = int(0);
                for &(basis, eps) in &c.terms {
                    let elems = table.elements(basis);
                    let j: Vec<usize> = elems.iter().filter(|&&e| e > n).map(|e| e - n).collect();
                    let comp: Vec<usize> = elems.iter().filter(|&&e| e <= n).copied().collect();
                    let seq: Vec<usize> = comp.iter().chain(&j).copied().collect();
                    let mut w = p[basis].clone() / &p[0];
                    if inversions(&seq) % 2 == 1 {
                        w = -w;
                    }
                    for &k in &j {
                        w *= &pt.a[k - 1] * &x[k - 1];
                    }
                    if !p[basis].is_zero() {
                        let coord = if p[basis].is_positive() { Sign::Plus } else { Sign::Minus };
                        let term = if w.is_positive() { Sign::Plus } else { Sign::Minus };
                        prop_assert_eq!(term, eps * coord);
                    }
                    sum += w;
                }
                prop_assert_eq!(sum, coeffs.c[i].clone());
            }
        }
    }

    use num_traits::Zero;
}
