//! Sign propagation through 3-term relations and ecological constraints.

use alloc::vec;
use alloc::vec::Vec;

use crate::grassmann::{
    binomial, enumerate_gp_relations, rank, relation_status, BasisTable, GpRelation,
    PartialChirotope, RelationStatus, TriSign,
};
use crate::model::Sign;

use super::constraints::{constraint_status, ConstraintStatus, SignConstraint};

/// What made a propagation fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conflict {
    /// Index into the relation list.
    Relation(usize),
    /// Index into the constraint list.
    Constraint(usize),
    /// Two relations forced opposite signs on the same basis.
    Disagreement(usize),
}

/// Outcome of [`propagate_basis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisInference {
    Inferred(Sign),
    Conflict,
    None,
}

fn mask_of(elems: &[usize]) -> u32 {
    elems.iter().fold(0u32, |m, &e| m | 1 << (e - 1))
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// The relation on the `(n−2)`-set `common` and the 4-set `quad`, both as masks.
fn relation_on(table: &BasisTable, common: u32, quad: u32) -> GpRelation {
    let q = bits(quad);
    let basis = |x: usize, y: usize| {
        table
            .rank_of_mask(common | 1 << (x - 1) | 1 << (y - 1))
            .expect("n-subset")
    };
    let (a, b, c, d) = (q[0], q[1], q[2], q[3]);
    GpRelation {
        common: bits(common),
        quad: [a, b, c, d],
        products: [
            (basis(a, b), basis(c, d)),
            (basis(a, c), basis(b, d)),
            (basis(a, d), basis(b, c)),
        ],
    }
}

/// Infers the sign of the unknown basis `b_u` from every relation pairing it
/// with a known basis `B_c`.
///
/// For each 2-subset `Y ⊆ B_u` and each known `B_c ⊇ B_u ∖ Y` disjoint from
/// `Y`, the relation on `S = B_u ∖ Y` and the quad `Y ∪ (B_c ∖ S)` contains
/// `p[B_u]·p[B_c]` as one product. When the other two products are known and
/// agree in signed value, that product must take the opposite sign.
pub fn propagate_basis(table: &BasisTable, chi: &[TriSign], b_u: usize) -> BasisInference {
    debug_assert!(
        !chi[b_u].is_known(),
        "propagate_basis expects an unknown basis"
    );
    let n = table.n();
    let ground_mask = (1u32 << (2 * n)) - 1;
    let u_mask = table.mask(b_u);
    let u_elems = bits(u_mask);
    let outside = bits(ground_mask & !u_mask);
    let mut found: Option<Sign> = None;
    for i in 0..u_elems.len() {
        for j in i + 1..u_elems.len() {
            let y = 1u32 << (u_elems[i] - 1) | 1 << (u_elems[j] - 1);
            let s = u_mask & !y;
            for k in 0..outside.len() {
                for l in k + 1..outside.len() {
                    let z = 1u32 << (outside[k] - 1) | 1 << (outside[l] - 1);
                    let b_c = table.rank_of_mask(s | z).expect("n-subset");
                    if !chi[b_c].is_known() {
                        continue;
                    }
                    let rel = relation_on(table, s, y | z);
                    if let RelationStatus::Forces(basis, sign) = relation_status(&rel, chi) {
                        debug_assert_eq!(basis, b_u);
                        match found {
                            None => found = Some(sign),
                            Some(prev) if prev != sign => return BasisInference::Conflict,
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    found.map_or(BasisInference::None, BasisInference::Inferred)
}

/// Result of running propagation to a fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixpoint {
    pub chi: PartialChirotope,
    pub conflict: Option<Conflict>,
    pub inferences: u64,
}

/// Round-based propagation: [`propagate_basis`] over every unknown, then
/// constraint forcing, until nothing changes.
///
/// This is the direct reading of the procedure and serves as the reference for
/// the incremental [`Propagator`].
pub fn propagate_rounds(
    chi: &PartialChirotope,
    relations: &[GpRelation],
    constraints: &[SignConstraint],
) -> Fixpoint {
    let table = BasisTable::new(chi.n);
    let mut chi = chi.clone();
    let mut inferences = 0;
    loop {
        if let Some(conflict) = first_violation(&chi.chi, relations, constraints) {
            return Fixpoint {
                chi,
                conflict: Some(conflict),
                inferences,
            };
        }
        let before = chi.unknown_count();
        for b in 0..chi.chi.len() {
            if chi.chi[b].is_known() {
                continue;
            }
            match propagate_basis(&table, &chi.chi, b) {
                BasisInference::Inferred(s) => {
                    chi.chi[b] = s.into();
                    inferences += 1;
                }
                BasisInference::Conflict => {
                    return Fixpoint {
                        chi,
                        conflict: Some(Conflict::Disagreement(b)),
                        inferences,
                    }
                }
                BasisInference::None => {}
            }
        }
        for c in constraints {
            if let ConstraintStatus::Forces(b, s) = constraint_status(c, &chi.chi) {
                chi.chi[b] = s.into();
                inferences += 1;
            }
        }
        if chi.unknown_count() == before {
            let conflict = first_violation(&chi.chi, relations, constraints);
            return Fixpoint {
                chi,
                conflict,
                inferences,
            };
        }
    }
}

fn first_violation(
    chi: &[TriSign],
    relations: &[GpRelation],
    constraints: &[SignConstraint],
) -> Option<Conflict> {
    if let Some(i) = relations
        .iter()
        .position(|r| relation_status(r, chi) == RelationStatus::Violated)
    {
        return Some(Conflict::Relation(i));
    }
    constraints
        .iter()
        .position(|c| constraint_status(c, chi) == ConstraintStatus::Violated)
        .map(Conflict::Constraint)
}

/// Runs the incremental propagator once over the given tables.
pub fn propagate_fixpoint(
    chi: &PartialChirotope,
    relations: &[GpRelation],
    constraints: &[SignConstraint],
) -> Fixpoint {
    let prop = Propagator::with_relations(chi.n, relations.to_vec(), constraints.to_vec());
    let mut out = chi.clone();
    let mut inferences = 0;
    let conflict = prop.propagate_all(&mut out.chi, &mut inferences).err();
    Fixpoint {
        chi: out,
        conflict,
        inferences,
    }
}

/// Relation and constraint tables with per-basis incidence lists.
#[derive(Debug, Clone)]
pub struct Propagator {
    n: usize,
    table: BasisTable,
    relations: Vec<GpRelation>,
    constraints: Vec<SignConstraint>,
    // item ids: relations first, then constraints
    incidence: Vec<Vec<usize>>,
}

impl Propagator {
    pub fn new(n: usize, constraints: Vec<SignConstraint>) -> Self {
        let table = BasisTable::new(n);
        let relations = enumerate_gp_relations(&table);
        Self::build(table, relations, constraints)
    }

    pub fn with_relations(
        n: usize,
        relations: Vec<GpRelation>,
        constraints: Vec<SignConstraint>,
    ) -> Self {
        Self::build(BasisTable::new(n), relations, constraints)
    }

    fn build(
        table: BasisTable,
        relations: Vec<GpRelation>,
        constraints: Vec<SignConstraint>,
    ) -> Self {
        let mut incidence = vec![Vec::new(); table.len()];
        for (i, rel) in relations.iter().enumerate() {
            let mut bases = rel.bases();
            bases.sort_unstable();
            for (k, &b) in bases.iter().enumerate() {
                if k == 0 || bases[k - 1] != b {
                    incidence[b].push(i);
                }
            }
        }
        for (i, c) in constraints.iter().enumerate() {
            for &(b, _) in &c.terms {
                incidence[b].push(relations.len() + i);
            }
        }
        Self {
            n: table.n(),
            table,
            relations,
            constraints,
            incidence,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &BasisTable {
        &self.table
    }

    pub fn relations(&self) -> &[GpRelation] {
        &self.relations
    }

    pub fn constraints(&self) -> &[SignConstraint] {
        &self.constraints
    }

    /// Relation and constraint ids touching `basis`; ids at or above
    /// `relations().len()` are constraints.
    pub fn incident(&self, basis: usize) -> &[usize] {
        &self.incidence[basis]
    }

    /// Propagates from scratch, checking every relation and constraint.
    pub fn propagate_all(&self, chi: &mut [TriSign], inferences: &mut u64) -> Result<(), Conflict> {
        let items: Vec<usize> = (0..self.relations.len() + self.constraints.len()).collect();
        self.run(chi, items, inferences)
    }

    /// Propagates after `basis` was assigned.
    pub fn propagate_from(
        &self,
        chi: &mut [TriSign],
        basis: usize,
        inferences: &mut u64,
    ) -> Result<(), Conflict> {
        self.run(chi, self.incidence[basis].clone(), inferences)
    }

    fn run(
        &self,
        chi: &mut [TriSign],
        mut stack: Vec<usize>,
        inferences: &mut u64,
    ) -> Result<(), Conflict> {
        let nrel = self.relations.len();
        let mut queued = vec![false; nrel + self.constraints.len()];
        for &i in &stack {
            queued[i] = true;
        }
        stack.reverse();
        while let Some(item) = stack.pop() {
            queued[item] = false;
            let forced = if item < nrel {
                match relation_status(&self.relations[item], chi) {
                    RelationStatus::Violated => return Err(Conflict::Relation(item)),
                    RelationStatus::Forces(b, s) => Some((b, s)),
                    _ => None,
                }
            } else {
                match constraint_status(&self.constraints[item - nrel], chi) {
                    ConstraintStatus::Violated => return Err(Conflict::Constraint(item - nrel)),
                    ConstraintStatus::Forces(b, s) => Some((b, s)),
                    ConstraintStatus::SatisfiedPossible => None,
                }
            };
            if let Some((b, s)) = forced {
                chi[b] = s.into();
                *inferences += 1;
                for &next in &self.incidence[b] {
                    if !queued[next] {
                        queued[next] = true;
                        stack.push(next);
                    }
                }
            }
        }
        Ok(())
    }

    /// True when every relation passes the sign test and no constraint is
    /// violated on a fully known assignment.
    pub fn validate(&self, chi: &[TriSign]) -> bool {
        chi.iter().all(|s| s.is_known())
            && self
                .relations
                .iter()
                .all(|r| relation_status(r, chi) == RelationStatus::Satisfied)
            && self
                .constraints
                .iter()
                .all(|c| constraint_status(c, chi) != ConstraintStatus::Violated)
    }
}

/// Index of the relation on `common` and `quad` in [`enumerate_gp_relations`] order.
pub fn relation_index(n: usize, common: &[usize], quad: [usize; 4]) -> Option<usize> {
    let ground = 2 * n;
    let s_rank = rank(ground, common).ok()?;
    let common_mask = mask_of(common);
    let rest: Vec<usize> = (1..=ground)
        .filter(|e| common_mask >> (e - 1) & 1 == 0)
        .collect();
    let local: Option<Vec<usize>> = quad
        .iter()
        .map(|q| rest.iter().position(|r| r == q).map(|p| p + 1))
        .collect();
    let q_rank = rank(rest.len(), &local?).ok()?;
    Some(s_rank * binomial(n + 2, 4) + q_rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::constraints::{
        build_feasibility_constraints, build_stability_constraints,
    };
    use crate::grassmann::{partial_chirotope, plucker_vector};
    use crate::linalg::{int, ratio};
    use crate::model::{sample_point, MagnitudeRange, ParameterPoint, SignPattern};
    use crate::stability::check_point;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn constraints_for(sp: &SignPattern) -> Vec<SignConstraint> {
        let mut c = build_feasibility_constraints(sp.n());
        c.extend(build_stability_constraints(sp));
        c
    }

    fn obligate_mutualism() -> (SignPattern, PartialChirotope) {
        let sp = SignPattern::parse("---+---+---+").unwrap();
        let chi = partial_chirotope(&sp);
        (sp, chi)
    }

    #[test]
    fn relation_index_matches_enumeration() {
        for n in 2..=4 {
            let table = BasisTable::new(n);
            for (i, rel) in enumerate_gp_relations(&table).iter().enumerate() {
                assert_eq!(relation_index(n, &rel.common, rel.quad), Some(i));
                assert_eq!(
                    &relation_on(&table, mask_of(&rel.common), mask_of(&rel.quad)),
                    rel
                );
            }
        }
    }

    #[test]
    fn obligate_mutualism_partial_table() {
        let (_, chi) = obligate_mutualism();
        assert_eq!(chi.to_string(), "---++-+-+?+---?-?+-?");
    }

    #[test]
    fn obligate_mutualism_inferences_after_det_b() {
        let (_, mut chi) = obligate_mutualism();
        let table = BasisTable::new(3);
        let b456 = table.b_block();
        chi.chi[b456] = TriSign::Plus;
        let rank = |l: &[usize]| table.rank_of(l).unwrap();
        // every det B > 0 point of this pattern has all 2x2 principal minors positive
        assert_eq!(
            propagate_basis(&table, &chi.chi, rank(&[1, 5, 6])),
            BasisInference::Inferred(Sign::Minus)
        );
        assert_eq!(
            propagate_basis(&table, &chi.chi, rank(&[2, 4, 6])),
            BasisInference::Inferred(Sign::Plus)
        );
        assert_eq!(
            propagate_basis(&table, &chi.chi, rank(&[3, 4, 5])),
            BasisInference::Inferred(Sign::Minus)
        );
    }

    #[test]
    fn obligate_mutualism_conflicts_on_feasibility() {
        let (sp, chi) = obligate_mutualism();
        let table = BasisTable::new(3);
        let relations = enumerate_gp_relations(&table);
        let constraints = constraints_for(&sp);
        let fix = propagate_rounds(&chi, &relations, &constraints);
        assert!(fix.chi.is_complete(), "{}", fix.chi);
        assert!(fix.conflict.is_some());
        assert!(propagate_fixpoint(&chi, &relations, &constraints)
            .conflict
            .is_some());
        // GP inference alone after det B > 0 already empties the third feasibility row
        let mut chi = chi;
        chi.chi[table.b_block()] = TriSign::Plus;
        let gp_only = propagate_fixpoint(&chi, &relations, &[]);
        assert_eq!(gp_only.conflict, None);
        assert_eq!(gp_only.chi.to_string(), "---++-+-+-+---+--+-+");
        let row = constraints
            .iter()
            .find(|c| c.kind == crate::completion::constraints::ConstraintKind::Feasibility(3))
            .unwrap();
        assert_eq!(row.status(&gp_only.chi.chi), ConstraintStatus::Violated);
    }

    #[test]
    fn two_species_single_inference() {
        // ranks 12, 13, 14, 23, 24, 34
        let chi = PartialChirotope::parse(2, "++?--+").unwrap();
        let table = BasisTable::new(2);
        let got = propagate_basis(&table, &chi.chi, 2);
        // realized by a = (1, 1), B = [[2, 1], [1, 3]]
        let mut pt =
            ParameterPoint::from_off_diagonal(vec![int(1), int(1)], &[int(1), int(1)], &int(2))
                .unwrap();
        pt.b[(1, 1)] = int(3);
        let p = plucker_vector(&pt);
        let realized = PartialChirotope {
            n: 2,
            chi: p
                .signs()
                .iter()
                .map(|s| TriSign::from(s.unwrap()))
                .collect(),
        };
        assert!(realized.extends(&chi));
        assert_eq!(got, BasisInference::Inferred(Sign::Plus));
        assert_eq!(realized.chi[2], TriSign::Plus);
    }

    #[test]
    fn no_compatible_known_basis() {
        let chi = PartialChirotope::unknown(3);
        let table = BasisTable::new(3);
        assert_eq!(propagate_basis(&table, &chi.chi, 7), BasisInference::None);
    }

    #[test]
    fn complete_consistent_input_is_unchanged() {
        let sp = SignPattern::parse("++++++++++++").unwrap();
        let pt = ParameterPoint::from_off_diagonal(
            vec![int(1), int(1), int(1)],
            &[
                ratio(1, 10),
                ratio(1, 5),
                ratio(1, 7),
                ratio(1, 3),
                ratio(1, 9),
                ratio(1, 4),
            ],
            &int(1),
        )
        .unwrap();
        assert!(check_point(&pt).feasible_stable());
        let p = plucker_vector(&pt);
        assert!(!p.has_zero());
        let chi = PartialChirotope {
            n: 3,
            chi: p
                .signs()
                .iter()
                .map(|s| TriSign::from(s.unwrap()))
                .collect(),
        };
        let table = BasisTable::new(3);
        let fix = propagate_fixpoint(&chi, &enumerate_gp_relations(&table), &constraints_for(&sp));
        assert_eq!(fix.conflict, None);
        assert_eq!(fix.chi, chi);
        assert_eq!(fix.inferences, 0);
    }

    #[test]
    fn empty_tables_change_nothing() {
        let (_, chi) = obligate_mutualism();
        let fix = propagate_fixpoint(&chi, &[], &[]);
        assert_eq!(fix.chi, chi);
        assert_eq!(fix.conflict, None);
    }

    fn pattern_for(n: usize, bits: u64) -> SignPattern {
        SignPattern::all_with_positive_diagonal(n)
            .nth((bits % (1 << (n * n))) as usize)
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn queue_and_rounds_reach_the_same_fixpoint(n in 2usize..=4, bits in any::<u64>(), checks in 0u8..3, extra in any::<u64>()) {
            let sp = pattern_for(n, bits);
            let mut chi = partial_chirotope(&sp);
            // pin a few extra unknowns to explore more states
            let unknowns: Vec<usize> = (0..chi.chi.len()).filter(|&b| !chi.chi[b].is_known()).collect();
            for (k, &b) in unknowns.iter().enumerate().take(3) {
                if extra >> k & 1 == 1 {
                    chi.chi[b] = if extra >> (k + 8) & 1 == 1 { TriSign::Plus } else { TriSign::Minus };
                }
            }
            let table = BasisTable::new(n);
            let relations = enumerate_gp_relations(&table);
            let constraints = match checks {
                0 => Vec::new(),
                1 => build_feasibility_constraints(n),
                _ => constraints_for(&sp),
            };
            let a = propagate_rounds(&chi, &relations, &constraints);
            let b = propagate_fixpoint(&chi, &relations, &constraints);
            prop_assert_eq!(a.conflict.is_some(), b.conflict.is_some());
            if a.conflict.is_none() {
                prop_assert_eq!(&a.chi, &b.chi);
                // idempotent
                let again = propagate_fixpoint(&b.chi, &relations, &constraints);
                prop_assert_eq!(again.chi, b.chi);
                prop_assert_eq!(again.inferences, 0);
            }
        }

        // Propagation from the partial table never contradicts a realizing point.
        #[test]
        fn propagation_respects_realized_signs(n in 2usize..=3, bits in any::<u64>(), seed in any::<u64>()) {
            let sp = pattern_for(n, bits);
            let pt = sample_point(&sp, &MagnitudeRange::default(), seed);
            let p = plucker_vector(&pt);
            prop_assume!(!p.has_zero());
            let realized: Vec<TriSign> = p.signs().iter().map(|s| TriSign::from(s.unwrap())).collect();
            let table = BasisTable::new(n);
            let relations = enumerate_gp_relations(&table);
            let mut constraints = Vec::new();
            if check_point(&pt).feasible_stable() {
                constraints = constraints_for(&sp);
            }
            let fix = propagate_fixpoint(&partial_chirotope(&sp), &relations, &constraints);
            prop_assert_eq!(fix.conflict, None);
            for (got, want) in fix.chi.chi.iter().zip(&realized) {
                if got.is_known() {
                    prop_assert_eq!(got, want);
                }
            }
        }
    }
}
