//! Field-of-moduli ramification indices and vertical inertia of G-covers
//! given by branch cycle descriptions.
//!
//! The ramification index of the field of moduli over the base field is
//! the least N ≥ 1 such that the N-th iterate of the δ-action returns the
//! branch cycle description to its uniform conjugacy class. The search is
//! bounded by exp(Inn(G)): scaling every thickness by that exponent makes
//! every evaluated conjugator central, so the bound is also a self-check
//! of the action code.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::action::delta_action;
use crate::groups::{
    apply_to_entries, uniform_conjugators_of, GroupTuple, Permutation,
};
use crate::tree::{build_tree, MarkedTree, PPoint};
use crate::{Error, Result};

/// The least N ≥ 1 such that applying the δ-action N times to the tuple
/// yields a uniformly conjugate tuple. Always terminates within
/// exp(Inn(G)) and divides it.
///
/// Tuple entries are matched to the tree's niceorder labels: entry i is
/// the image of the generator carrying niceorder label i. The tree's
/// `order` field maps those labels back to the caller's input points.
pub fn ramification_index(tree: &MarkedTree, t: &GroupTuple) -> Result<u64> {
    if t.rank() != tree.rank() {
        return Err(Error::RankMismatch(t.rank(), tree.rank()));
    }
    let group = t.group().clone();
    let bound = group.inn_exponent()?;
    let action = delta_action(tree).to_images();
    let original = t.entries().to_vec();
    let mut current = original.clone();
    for n in 1..=bound {
        current = apply_to_entries(&action, &group, &current)?;
        if !uniform_conjugators_of(&group, &original, &current)?.is_empty() {
            assert!(
                bound % n == 0,
                "ramification index {n} does not divide exp(Inn(G)) = {bound}"
            );
            return Ok(n);
        }
    }
    Err(Error::RamificationBoundViolation { bound })
}

/// The coset {h ∈ G : δ(gᵢ) = h gᵢ h⁻¹ for all i}. The element h
/// generates the inertia of a divisor above the vertical divisor; the
/// coset is a left coset of Z(G). Errors when the cover does not descend
/// (the set is empty).
pub fn vertical_inertia(tree: &MarkedTree, t: &GroupTuple) -> Result<Vec<Permutation>> {
    if t.rank() != tree.rank() {
        return Err(Error::RankMismatch(t.rank(), tree.rank()));
    }
    let group = t.group().clone();
    let action = delta_action(tree).to_images();
    let image = apply_to_entries(&action, &group, t.entries())?;
    let coset = uniform_conjugators_of(&group, t.entries(), &image)?;
    if coset.is_empty() {
        return Err(Error::NotDefinedOverK);
    }
    Ok(coset)
}

/// Caveats attached to a per-prime report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReportFlags {
    /// The tame analysis only covers primes not dividing |G|;
    /// when this flag is set the numbers are exploratory.
    pub p_divides_group_order: bool,
    /// Pairwise distinct residues: the action is trivial outright.
    pub non_coalescing: bool,
}

/// The per-prime outcome: the reduction tree, the ramification index of
/// the field of moduli, and the exp(Inn(G)) bound it divides.
#[derive(Debug, Clone)]
pub struct RamificationReport {
    pub prime: u64,
    pub tree: MarkedTree,
    pub index: u64,
    pub bound: u64,
    pub flags: ReportFlags,
}

impl RamificationReport {
    pub fn divides(&self) -> bool {
        self.index >= 1 && self.bound % self.index == 0
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "prime": self.prime,
            "index": self.index,
            "bound": self.bound,
            "divides": self.divides(),
            "flags": serde_json::to_value(self.flags).expect("flags serialize"),
            "tree": self.tree.to_json_value(),
        })
    }
}

/// Build the tree and compute the ramification index of one cover at each
/// requested prime. Local indices computed here equal the global
/// ramification indices of the field of moduli at those primes.
pub fn global_report(
    points: &[PPoint],
    t: &GroupTuple,
    primes: &BTreeSet<u64>,
) -> Result<BTreeMap<u64, RamificationReport>> {
    let order = t.group().order()?;
    let bound = t.group().inn_exponent()?;
    let mut out = BTreeMap::new();
    for &p in primes {
        let tree = build_tree(points, p)?;
        let index = ramification_index(&tree, t)?;
        let flags = ReportFlags {
            p_divides_group_order: order as u64 % p == 0,
            non_coalescing: tree.is_single_vertex(),
        };
        out.insert(p, RamificationReport { prime: p, tree, index, bound, flags });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::samples::{cyclic, quaternion8, sym};
    use crate::groups::parse_permutation;
    use crate::tree::parse_point;

    fn pts(values: &[&str]) -> Vec<PPoint> {
        values.iter().map(|s| parse_point(s).unwrap()).collect()
    }

    fn s3_tuple(entries: &[&str]) -> GroupTuple {
        let group = sym(3);
        GroupTuple::new(
            group,
            entries.iter().map(|s| parse_permutation(s, 3).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_vertex_tree_has_index_one() {
        let tree = build_tree(&pts(&["0", "1", "2", "3"]), 7).unwrap();
        let t = s3_tuple(&["(1 2)", "(1 2)", "(1 2 3)", "(1 3 2)"]);
        assert_eq!(ramification_index(&tree, &t).unwrap(), 1);
    }

    #[test]
    fn index_matches_exhaustive_oracle() {
        // Oracle: iterate the action by hand and search conjugators with
        // a double loop over S3, independently of uniform_conjugators.
        let tree = build_tree(&pts(&["0", "3", "1", "2"]), 3).unwrap();
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2)", "(2 3)"]);
        let group = t.group().clone();
        let action = delta_action(&tree).to_images();
        let elements = group.elements().unwrap();
        let mut expected = None;
        let mut current = t.entries().to_vec();
        'outer: for n in 1..=6u64 {
            current = apply_to_entries(&action, &group, &current).unwrap();
            for h in elements.iter() {
                if t.entries()
                    .iter()
                    .zip(&current)
                    .all(|(a, b)| h.mul(a).unwrap().mul(&h.inv()).unwrap() == *b)
                {
                    expected = Some(n);
                    break 'outer;
                }
            }
        }
        assert_eq!(expected, Some(3));
        assert_eq!(ramification_index(&tree, &t).unwrap(), 3);
    }

    #[test]
    fn commuting_conjugators_fix_the_tuple() {
        // g1 g2 = 1 makes the evaluated conjugator trivial.
        let tree = build_tree(&pts(&["0", "3", "1", "2"]), 3).unwrap();
        let t = s3_tuple(&["(1 2)", "(1 2)", "(1 2 3)", "(1 3 2)"]);
        assert_eq!(ramification_index(&tree, &t).unwrap(), 1);
    }

    #[test]
    fn inertia_trivial_for_centerless_non_coalescing() {
        let tree = build_tree(&pts(&["0", "1", "2", "3"]), 7).unwrap();
        let t = s3_tuple(&["(1 2)", "(1 2)", "(1 2 3)", "(1 3 2)"]);
        assert_eq!(
            vertical_inertia(&tree, &t).unwrap(),
            vec![Permutation::identity(3)]
        );
    }

    #[test]
    fn inertia_is_center_for_identity_action() {
        let c6 = cyclic(6);
        let g = parse_permutation("(1 2 3 4 5 6)", 6).unwrap();
        let t = GroupTuple::new(
            c6.clone(),
            vec![g.clone(), g.clone(), g.clone(), g.mul(&g).unwrap().mul(&g).unwrap().inv()],
        )
        .unwrap();
        let tree = build_tree(&pts(&["0", "1", "2", "3"]), 7).unwrap();
        let coset = vertical_inertia(&tree, &t).unwrap();
        assert_eq!(coset.len(), 6); // all of the abelian group
    }

    #[test]
    fn inertia_detects_nontrivial_generator() {
        // g1 g2 = (1 2 3) is regular, and the action conjugates the pair
        // by it while fixing the 3-cycles, so h = (1 2 3) works.
        let tree = build_tree(&pts(&["0", "3", "1", "2"]), 3).unwrap();
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2 3)", "(1 2 3)"]);
        let coset = vertical_inertia(&tree, &t).unwrap();
        assert_eq!(coset, vec![parse_permutation("(1 2 3)", 3).unwrap()]);
    }

    #[test]
    fn inertia_errors_when_cover_does_not_descend() {
        let tree = build_tree(&pts(&["0", "3", "1", "2"]), 3).unwrap();
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2)", "(2 3)"]); // index 3
        assert_eq!(vertical_inertia(&tree, &t), Err(Error::NotDefinedOverK));
    }

    #[test]
    fn inertia_coset_with_central_conjugator() {
        let q8 = quaternion8();
        let i = parse_permutation("(1 3 2 4)(5 7 6 8)", 8).unwrap();
        let j = parse_permutation("(1 5 2 6)(3 8 4 7)", 8).unwrap();
        let t = GroupTuple::new(q8.clone(), vec![i.clone(), i, j.clone(), j]).unwrap();
        // g1 g2 = -1 is central, so the action fixes the tuple and the
        // inertia coset is the center.
        let tree = build_tree(&pts(&["0", "3", "1", "2"]), 3).unwrap();
        let coset = vertical_inertia(&tree, &t).unwrap();
        let center = q8.center().unwrap();
        assert_eq!(coset.len(), 2);
        for h in &coset {
            assert!(center.contains(h));
        }
    }

    #[test]
    fn nested_twists_commute_on_tuples() {
        // Twists around nested interval blocks commute: conjugating a
        // block by its own product fixes every enclosing ascending
        // product, so the two orders agree word for word, hence on every
        // evaluated tuple. Checked exhaustively over S3.
        use crate::action::dehn_twist;
        use crate::groups::apply_action;
        use std::collections::BTreeSet;
        let group = sym(3);
        let elements = group.elements().unwrap();
        let outer = dehn_twist(&BTreeSet::from([1, 2, 3]), 4).unwrap().to_images();
        for inner_set in [BTreeSet::from([1, 2]), BTreeSet::from([2, 3])] {
            let inner = dehn_twist(&inner_set, 4).unwrap().to_images();
            let ab = outer.compose(&inner).unwrap();
            let ba = inner.compose(&outer).unwrap();
            assert_eq!(ab, ba);
            for i in 0..elements.len() {
                for j in 0..elements.len() {
                    for k in 0..elements.len() {
                        let mut entries = vec![
                            elements[i].clone(),
                            elements[j].clone(),
                            elements[k].clone(),
                        ];
                        let mut product = group.identity();
                        for g in &entries {
                            product = product.mul(g).unwrap();
                        }
                        entries.push(product.inv());
                        let Ok(t) = GroupTuple::new(group.clone(), entries) else {
                            continue;
                        };
                        assert_eq!(
                            apply_action(&ab, &t).unwrap(),
                            apply_action(&ba, &t).unwrap()
                        );
                    }
                }
            }
        }

        // Conjugating a non-interval set by its ascending product is not
        // an automorphism of the surface quotient (that is what the
        // niceorder relabeling is for), and the revalidation inside
        // apply_action catches it.
        let skew = dehn_twist(&BTreeSet::from([1, 3]), 4).unwrap().to_images();
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2 3)", "(1 2 3)"]);
        assert_eq!(apply_action(&skew, &t), Err(Error::NotAnAutomorphism));
    }

    #[test]
    fn entry_conjugacy_classes_are_preserved() {
        let tree = build_tree(&pts(&["0", "27", "3", "1", "2"]), 3).unwrap();
        let action = delta_action(&tree).to_images();
        let group = sym(4);
        let mut entries: Vec<Permutation> = ["(1 2)", "(1 2 3 4)", "(1 3)", "(2 4)"]
            .iter()
            .map(|s| parse_permutation(s, 4).unwrap())
            .collect();
        let mut product = group.identity();
        for g in &entries {
            product = product.mul(g).unwrap();
        }
        entries.push(product.inv());
        let t = GroupTuple::new(group.clone(), entries).unwrap();
        let image = crate::groups::apply_action(&action, &t).unwrap();
        let elements = group.elements().unwrap();
        for (g, h) in t.entries().iter().zip(image.entries()) {
            assert!(
                elements.iter().any(|u| g.conjugate_by(u).unwrap() == *h),
                "{g} and {h} must be conjugate"
            );
        }
    }

    #[test]
    fn global_report_flags_and_indices() {
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2)", "(2 3)"]);
        let report = global_report(
            &pts(&["0", "25", "1", "2"]),
            &t,
            &BTreeSet::from([5, 7]),
        )
        .unwrap();
        let at5 = &report[&5];
        assert_eq!(at5.index, 3);
        assert_eq!(at5.bound, 6);
        assert!(at5.divides());
        assert!(!at5.flags.non_coalescing);
        assert!(!at5.flags.p_divides_group_order);
        let at7 = &report[&7];
        assert_eq!(at7.index, 1);
        assert!(at7.flags.non_coalescing);

        // p = 3 divides |S3| = 6: flagged, still computed.
        let report =
            global_report(&pts(&["0", "25", "1", "2"]), &t, &BTreeSet::from([3])).unwrap();
        assert!(report[&3].flags.p_divides_group_order);
    }

    #[test]
    fn tuples_are_read_in_niceorder_labels() {
        // Points (0, 1, 5, 2): the cluster is {0, 5} and the niceorder is
        // (1, 3, 2, 4). Tuple entries are matched to the niceorder labels
        // directly, so entries 1 and 2 get conjugated by g1 g2; the order
        // field is the caller's dictionary back to input points.
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2)", "(2 3)"]);
        let tree = build_tree(&pts(&["0", "1", "5", "2"]), 5).unwrap();
        assert_eq!(tree.order(), &[1, 3, 2, 4]);
        let seven_three = build_tree(&pts(&["0", "5", "1", "2"]), 5).unwrap();
        assert_eq!(
            ramification_index(&tree, &t).unwrap(),
            ramification_index(&seven_three, &t).unwrap()
        );
    }
}
