//! The action of the tame Galois generator δ on the bouquet generators,
//! computed from a stable marked reduction tree.
//!
//! Two routes are provided and must agree word for word: the closed form
//! (every generator is conjugated by an explicit product of cluster
//! products read off its chain to the root) and the composition of one
//! Dehn twist per node, each raised to the node's thickness. The closed
//! form also feeds symbolic presentations of the prime-to-p fundamental
//! group of the punctured line over the base field.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::tree::MarkedTree;
use crate::words::{ConjugatorAction, TupleAutomorphism, Word};
use crate::{Error, Result};

/// The conjugator q_J = ∏_{j ∈ J} α_j, ascending.
fn cluster_product(rank: usize, set: &BTreeSet<usize>) -> Word {
    Word::ascending_product(rank, set.iter().copied()).expect("labels in range")
}

/// The δ-action on the bouquet, in niceorder labels: α_i ↦ q α_i q⁻¹ with
/// q = q_{I_{N−1}}^{θ_{N−1}} ⋯ q_{I_1}^{θ_1}, the chain of mark i read
/// innermost first. Marks on the original component are fixed.
pub fn delta_action(tree: &MarkedTree) -> ConjugatorAction {
    let rank = tree.rank();
    let conjugators = (1..=rank)
        .map(|i| {
            let mut q = Word::empty(rank);
            // Outermost chain entry leftmost.
            for (set, theta) in tree.chain(i).into_iter().rev() {
                let factor = cluster_product(rank, &set).pow(theta as i64);
                q = q.mul(&factor).expect("equal ranks");
            }
            q
        })
        .collect();
    ConjugatorAction::new(conjugators).expect("uniform rank")
}

/// The Dehn twist along a curve enclosing the marks I: conjugates α_i by
/// q_I for i ∈ I and fixes the rest.
pub fn dehn_twist(marks: &BTreeSet<usize>, rank: usize) -> Result<ConjugatorAction> {
    if marks.is_empty() {
        return Err(Error::Parse("a Dehn twist needs a nonempty mark set".into()));
    }
    for &i in marks {
        if i == 0 || i > rank {
            return Err(Error::GeneratorOutOfRange { index: i, rank });
        }
    }
    let q = cluster_product(rank, marks);
    let conjugators = (1..=rank)
        .map(|i| if marks.contains(&i) { q.clone() } else { Word::empty(rank) })
        .collect();
    ConjugatorAction::new(conjugators)
}

/// The product ∏ D_v^{θ_v} over all nodes, composed so that along each
/// root-to-leaf path the vertex nearest the root acts first; incomparable
/// subtrees are ordered by their least mark. Must agree with
/// [`delta_action`] on every generator.
pub fn compose_twists(tree: &MarkedTree) -> TupleAutomorphism {
    let rank = tree.rank();
    let mut vertices: Vec<(usize, usize)> = (1..tree.vertex_count())
        .map(|v| {
            let mut depth = 0;
            let mut w = v;
            while let Some((u, _)) = tree.parent_edge(w) {
                depth += 1;
                w = u;
            }
            (v, depth)
        })
        .collect();
    vertices.sort_by_key(|&(v, depth)| {
        let least = *tree.subtree_marks(v).iter().next().expect("clusters hold marks");
        (depth, least)
    });
    let mut total = TupleAutomorphism::identity(rank);
    for (v, _) in vertices {
        let marks = tree.subtree_marks(v);
        let theta = tree.parent_edge(v).expect("non-root").1;
        let twist: TupleAutomorphism = dehn_twist(&marks, rank)
            .expect("valid cluster")
            .to_images()
            .power(theta);
        // Later vertices act after earlier ones.
        total = twist.compose(&total).expect("equal ranks");
    }
    total
}

/// [`delta_action`] on the tree with every thickness multiplied by n.
pub fn scaled_action(tree: &MarkedTree, n: u64) -> ConjugatorAction {
    delta_action(&tree.scale_thicknesses(n))
}

/// A symbolic presentation of the prime-to-p fundamental group of the
/// punctured line over the base field: the surface relation plus one
/// relation δ α_i δ⁻¹ = β_i per mark, with each β_i a conjugate of α_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    rank: usize,
    prime: u64,
    betas: Vec<Word>,
}

/// The presentation attached to a reduction tree: β_i = q_i α_i q_i⁻¹
/// from the δ-action.
pub fn presentation(tree: &MarkedTree, p: u64) -> Presentation {
    let action = delta_action(tree);
    Presentation {
        rank: tree.rank(),
        prime: p,
        betas: (1..=tree.rank()).map(|i| action.image(i)).collect(),
    }
}

impl Presentation {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn beta(&self, i: usize) -> &Word {
        &self.betas[i - 1]
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.rank).map(|i| format!("a{i}")).collect();
        names.push("d".into());
        names
    }

    pub fn annotation(&self) -> String {
        format!(
            "maximal prime-to-{} quotient of profinite completion",
            self.prime
        )
    }

    /// The relations as strings: the surface relation first, then
    /// `d a<i> d^-1 = <beta_i>` for each mark.
    pub fn relation_strings(&self) -> Vec<String> {
        let product: Vec<String> = (1..=self.rank).map(|i| format!("a{i}")).collect();
        let mut out = vec![format!("{} = 1", product.join(" "))];
        for (i, beta) in self.betas.iter().enumerate() {
            out.push(format!("d a{} d^-1 = {}", i + 1, beta));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("generators: {}\n", self.generator_names().join(", ")));
        out.push_str("relations:\n");
        for rel in self.relation_strings() {
            out.push_str(&format!("  {rel}\n"));
        }
        out.push_str(&format!("annotation: {}\n", self.annotation()));
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct PresentationJson {
            generators: Vec<String>,
            relations: Vec<String>,
            annotation: String,
        }
        serde_json::to_value(PresentationJson {
            generators: self.generator_names(),
            relations: self.relation_strings(),
            annotation: self.annotation(),
        })
        .expect("presentation serializes")
    }
}
