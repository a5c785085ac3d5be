//! Stable marked reduction trees of the projective line at a prime p.
//!
//! A configuration of r ≥ 3 distinct rational points is first normalized
//! by a Möbius change of coordinate until the marks occupy at least three
//! residue directions (so the original component of the reduction is
//! stable), then the laminar family of clusters is read off the pairwise
//! intersection numbers. The resulting rooted tree carries edge
//! thicknesses, mark placement, and the relabeling permutation that makes
//! every cluster an interval of consecutive indices.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, val_p};
use crate::{Error, Result};

/// A point of the projective line over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PPoint {
    Finite(BigRational),
    Infinity,
}

impl PPoint {
    pub fn from_integer(n: i64) -> PPoint {
        PPoint::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            PPoint::Finite(q) => Some(q),
            PPoint::Infinity => None,
        }
    }

    /// Finite with nonnegative valuation (zero counts as integral).
    fn is_integral(&self, p: u64) -> bool {
        match self {
            PPoint::Finite(q) => q.is_zero() || val_p(q, p).expect("nonzero") >= 0,
            PPoint::Infinity => false,
        }
    }

    /// The image under z ↦ 1/z, with 0 ↦ ∞ and ∞ ↦ 0.
    fn reciprocal(&self) -> PPoint {
        match self {
            PPoint::Finite(q) if q.is_zero() => PPoint::Infinity,
            PPoint::Finite(q) => PPoint::Finite(q.recip()),
            PPoint::Infinity => PPoint::Finite(BigRational::zero()),
        }
    }
}

impl fmt::Display for PPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PPoint::Finite(q) => write!(f, "{}", arith::format_rational(q)),
            PPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Parse `"inf"` or a rational `"n/d"`.
pub fn parse_point(s: &str) -> Result<PPoint> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(PPoint::Infinity);
    }
    Ok(PPoint::Finite(arith::parse_rational(s)?))
}

/// An invertible fractional-linear map z ↦ (az + b)/(cz + d) over the
/// rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mobius {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Mobius {
    pub fn identity() -> Mobius {
        Mobius {
            a: BigRational::one(),
            b: BigRational::zero(),
            c: BigRational::zero(),
            d: BigRational::one(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.c.is_zero() && self.b.is_zero() && self.a == self.d && !self.a.is_zero()
    }

    fn determinant(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<Mobius> {
        let m = Mobius { a, b, c, d };
        if m.determinant().is_zero() {
            return Err(Error::Parse("möbius map must be invertible".into()));
        }
        Ok(m)
    }

    /// z ↦ (z − shift)/scale.
    fn shift_scale(shift: &BigRational, scale: &BigRational) -> Mobius {
        Mobius {
            a: BigRational::one(),
            b: -shift.clone(),
            c: BigRational::zero(),
            d: scale.clone(),
        }
    }

    fn inversion() -> Mobius {
        Mobius {
            a: BigRational::zero(),
            b: BigRational::one(),
            c: BigRational::one(),
            d: BigRational::zero(),
        }
    }

    /// Matrix product; `self.compose(&g)` is the map z ↦ self(g(z)).
    pub fn compose(&self, g: &Mobius) -> Mobius {
        Mobius {
            a: &self.a * &g.a + &self.b * &g.c,
            b: &self.a * &g.b + &self.b * &g.d,
            c: &self.c * &g.a + &self.d * &g.c,
            d: &self.c * &g.b + &self.d * &g.d,
        }
    }

    pub fn apply(&self, z: &PPoint) -> PPoint {
        match z {
            PPoint::Finite(q) => {
                let num = &self.a * q + &self.b;
                let den = &self.c * q + &self.d;
                if den.is_zero() {
                    PPoint::Infinity
                } else {
                    PPoint::Finite(num / den)
                }
            }
            PPoint::Infinity => {
                if self.c.is_zero() {
                    PPoint::Infinity
                } else {
                    PPoint::Finite(&self.a / &self.c)
                }
            }
        }
    }
}

/// The intersection number of two distinct points on the model of the
/// projective line at p: how deep into the special fiber their reductions
/// agree. Both p-integral: computed from the valuation of the difference;
/// both in the disc at infinity: computed in the chart z ↦ 1/z; one of
/// each: the reductions are distinct, so 0.
pub fn intersection_number(a: &PPoint, b: &PPoint, p: u64) -> Result<u64> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a == b {
        return Err(Error::CoincidentPoints(format!("{a} appears twice")));
    }
    match (a.is_integral(p), b.is_integral(p)) {
        (true, true) => {
            let (qa, qb) = (a.rational().unwrap(), b.rational().unwrap());
            let diff = qa - qb;
            Ok(val_p(&diff, p)?.max(0) as u64)
        }
        (false, false) => {
            let (wa, wb) = (a.reciprocal(), b.reciprocal());
            let qa = wa.rational().expect("reciprocal of non-integral is finite");
            let qb = wb.rational().expect("reciprocal of non-integral is finite");
            let diff = qa - qb;
            Ok(val_p(&diff, p)?.max(0) as u64)
        }
        _ => Ok(0),
    }
}

/// The residue direction a point reduces to: a residue class of the
/// special fiber, or the disc at infinity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Direction {
    Residue(BigInt),
    InfiniteDisc,
}

fn direction(z: &PPoint, p: u64) -> Direction {
    if !z.is_integral(p) {
        return Direction::InfiniteDisc;
    }
    let q = z.rational().expect("integral points are finite");
    if q.is_zero() {
        return Direction::Residue(BigInt::zero());
    }
    let m = BigInt::from(p);
    let inv = arith::mod_inverse(q.denom(), &m).expect("denominator coprime to p");
    Direction::Residue((q.numer() * inv).mod_floor(&m))
}

fn count_directions(points: &[PPoint], p: u64) -> usize {
    let set: BTreeSet<Direction> = points.iter().map(|z| direction(z, p)).collect();
    set.len()
}

/// Pivot and cluster choices for [`normalize_with`]. Every choice yields a
/// valid normalization; the default is the lexicographically first one.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalizeChoice {
    /// Which splittable residue direction to open up, counted among the
    /// multi-point directions in ascending order of their least mark.
    pub cluster_rank: usize,
    /// Which mark of the chosen direction to use as the pivot, in
    /// ascending index order.
    pub pivot_rank: usize,
}

/// Apply Möbius changes of coordinate until the marks occupy at least
/// three residue directions, so that the original component of the
/// reduction is stable. Returns the composed map and the transformed
/// points; the identity when the input already qualifies.
pub fn normalize(points: &[PPoint], p: u64) -> Result<(Mobius, Vec<PPoint>)> {
    normalize_with(points, p, NormalizeChoice::default())
}

/// [`normalize`] with an explicit choice of splittable cluster and pivot
/// at every step. Distinct choices are distinct valid normalizations of
/// the same configuration.
pub fn normalize_with(
    points: &[PPoint],
    p: u64,
    choice: NormalizeChoice,
) -> Result<(Mobius, Vec<PPoint>)> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if points.len() < 3 {
        return Err(Error::TooFewMarks);
    }
    check_distinct(points)?;

    let mut current: Vec<PPoint> = points.to_vec();
    let mut total = Mobius::identity();
    // Each split strictly reduces the total cluster depth below the split
    // point, so the loop terminates; the bound is generous.
    for _ in 0..64 {
        if count_directions(&current, p) >= 3 {
            return Ok((total, current));
        }
        // Splittable finite directions, ordered by least mark index.
        let mut splittable: Vec<Vec<usize>> = Vec::new();
        let mut seen: BTreeSet<Direction> = BTreeSet::new();
        for i in 0..current.len() {
            let dir = direction(&current[i], p);
            if dir == Direction::InfiniteDisc || !seen.insert(dir.clone()) {
                continue;
            }
            let members: Vec<usize> = (0..current.len())
                .filter(|&j| direction(&current[j], p) == dir)
                .collect();
            if members.len() >= 2 {
                splittable.push(members);
            }
        }
        let step = if splittable.is_empty() {
            // Only the disc at infinity holds more than one mark; turn it
            // into a finite disc first.
            Mobius::inversion()
        } else {
            let cluster = &splittable[choice.cluster_rank % splittable.len()];
            let pivot = &current[cluster[choice.pivot_rank % cluster.len()]];
            let depth = cluster_depth(&current, cluster, p)?;
            let scale = BigRational::from_integer(BigInt::from(p).pow(depth as u32));
            Mobius::shift_scale(pivot.rational().expect("finite direction"), &scale)
        };
        current = current.iter().map(|z| step.apply(z)).collect();
        total = step.compose(&total);
    }
    Err(Error::BadNormalization)
}

fn cluster_depth(points: &[PPoint], members: &[usize], p: u64) -> Result<u64> {
    let mut depth = u64::MAX;
    for (k, &i) in members.iter().enumerate() {
        for &j in &members[k + 1..] {
            depth = depth.min(intersection_number(&points[i], &points[j], p)?);
        }
    }
    Ok(depth)
}

fn check_distinct(points: &[PPoint]) -> Result<()> {
    for (k, a) in points.iter().enumerate() {
        for b in &points[k + 1..] {
            if a == b {
                return Err(Error::CoincidentPoints(format!("{a} appears twice")));
            }
        }
    }
    Ok(())
}

/// The stable marked reduction tree. Vertex 0 is the root (the original
/// component); every other vertex is a cluster of marks. Mark labels are
/// the niceorder relabeling under which every cluster is an interval;
/// `order` maps them back to the caller's indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedTree {
    /// `parent[v]` is `(parent vertex, edge thickness)`; `None` exactly
    /// for the root. Parents precede children.
    parent: Vec<Option<(usize, u64)>>,
    /// `marks[k]` is the vertex carrying niceorder mark k+1.
    marks: Vec<usize>,
    /// `order[k]` is the original 1-based index of niceorder mark k+1.
    order: Vec<usize>,
    normalization: Mobius,
}

impl MarkedTree {
    /// Assemble a tree from explicit parts. Vertex ids must be
    /// topologically sorted (every parent before its child, root 0).
    pub fn from_parts(
        parent: Vec<Option<(usize, u64)>>,
        marks: Vec<usize>,
        order: Vec<usize>,
        normalization: Mobius,
    ) -> Result<MarkedTree> {
        if parent.is_empty() || parent[0].is_some() {
            return Err(Error::InvalidTree("vertex 0 must be the root".into()));
        }
        for (v, entry) in parent.iter().enumerate().skip(1) {
            match entry {
                None => return Err(Error::InvalidTree(format!("vertex {v} has no parent"))),
                Some((u, theta)) => {
                    if *u >= v {
                        return Err(Error::InvalidTree(format!(
                            "vertex {v} has parent {u}; parents must precede children"
                        )));
                    }
                    if *theta == 0 {
                        return Err(Error::InvalidTree(format!(
                            "edge {v} -> {u} has thickness 0"
                        )));
                    }
                }
            }
        }
        for (k, &v) in marks.iter().enumerate() {
            if v >= parent.len() {
                return Err(Error::InvalidTree(format!(
                    "mark {} placed at missing vertex {v}",
                    k + 1
                )));
            }
        }
        let r = marks.len();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if order.len() != r || sorted != (1..=r).collect::<Vec<_>>() {
            return Err(Error::InvalidTree(
                "order must be a permutation of 1..=r".into(),
            ));
        }
        Ok(MarkedTree { parent, marks, order, normalization })
    }

    /// A tree with identity relabeling and no coordinate change, the shape
    /// local data comes in.
    pub fn from_local_shape(
        parent: Vec<Option<(usize, u64)>>,
        marks: Vec<usize>,
    ) -> Result<MarkedTree> {
        let order = (1..=marks.len()).collect();
        MarkedTree::from_parts(parent, marks, order, Mobius::identity())
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Number of marks.
    pub fn rank(&self) -> usize {
        self.marks.len()
    }

    pub fn parent_edge(&self, v: usize) -> Option<(usize, u64)> {
        self.parent[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, entry)| entry.map(|(u, theta)| (v, u, theta)))
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        self.edges().filter(|&(_, u, _)| u == v).map(|(c, _, _)| c).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children(v).len() + usize::from(self.parent[v].is_some())
    }

    /// The vertex carrying niceorder mark i (1-based).
    pub fn mark_vertex(&self, i: usize) -> usize {
        self.marks[i - 1]
    }

    /// Niceorder labels of the marks sitting on vertex v.
    pub fn marks_at(&self, v: usize) -> Vec<usize> {
        (1..=self.rank()).filter(|&i| self.marks[i - 1] == v).collect()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn normalization(&self) -> &Mobius {
        &self.normalization
    }

    /// Niceorder labels of the marks in the subtree rooted at v.
    pub fn subtree_marks(&self, v: usize) -> BTreeSet<usize> {
        let mut in_subtree = vec![false; self.vertex_count()];
        in_subtree[v] = true;
        for w in v + 1..self.vertex_count() {
            if let Some((u, _)) = self.parent[w] {
                in_subtree[w] = in_subtree[u];
            }
        }
        (1..=self.rank()).filter(|&i| in_subtree[self.marks[i - 1]]).collect()
    }

    /// Walk from the vertex holding mark i up to the root. The l-th entry
    /// is the set of marks below the l-th edge together with that edge's
    /// thickness, innermost first; empty when the mark sits on the root.
    pub fn chain(&self, i: usize) -> Vec<(BTreeSet<usize>, u64)> {
        let mut out = Vec::new();
        let mut v = self.mark_vertex(i);
        while let Some((u, theta)) = self.parent[v] {
            out.push((self.subtree_marks(v), theta));
            v = u;
        }
        out
    }

    /// Non-coalescing configurations reduce to the bare original
    /// component.
    pub fn is_single_vertex(&self) -> bool {
        self.vertex_count() == 1
    }

    /// Structural violations: stability requires every vertex to carry at
    /// least 3 edges plus marks.
    pub fn stability_violations(&self) -> Vec<Violation> {
        (0..self.vertex_count())
            .filter(|&v| self.degree(v) + self.marks_at(v).len() < 3)
            .map(|vertex| Violation::BelowStabilityBound { vertex })
            .collect()
    }

    /// A copy with every edge thickness multiplied by n ≥ 1.
    pub fn scale_thicknesses(&self, n: u64) -> MarkedTree {
        assert!(n >= 1, "thickness scale must be positive");
        MarkedTree {
            parent: self
                .parent
                .iter()
                .map(|entry| entry.map(|(u, theta)| (u, theta * n)))
                .collect(),
            marks: self.marks.clone(),
            order: self.order.clone(),
            normalization: self.normalization.clone(),
        }
    }

    /// Original 1-based mark indices at vertex v (through `order`).
    fn original_marks_at(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.marks_at(v).into_iter().map(|i| self.order[i - 1]).collect();
        out.sort_unstable();
        out
    }

    fn canonical_signature(&self, v: usize) -> CanonSig {
        let mut children: Vec<(u64, CanonSig)> = self
            .children(v)
            .into_iter()
            .map(|c| (self.parent[c].unwrap().1, self.canonical_signature(c)))
            .collect();
        children.sort();
        CanonSig { marks: self.original_marks_at(v), children }
    }

    /// Rooted isomorphism preserving original mark indices and edge
    /// thicknesses.
    pub fn isomorphic(&self, other: &MarkedTree) -> bool {
        self.rank() == other.rank()
            && self.canonical_signature(0) == other.canonical_signature(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct CanonSig {
    marks: Vec<usize>,
    children: Vec<(u64, CanonSig)>,
}

/// A structural defect reported by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BelowStabilityBound { vertex: usize },
    AboveDegreeBound { vertex: usize, p: u64 },
    NotPrime { p: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BelowStabilityBound { vertex } => {
                write!(f, "vertex {vertex} below stability bound (needs degree + marks >= 3)")
            }
            Violation::AboveDegreeBound { vertex, p } => {
                write!(f, "vertex {vertex} above p+1 bound (degree + marks > {})", p + 1)
            }
            Violation::NotPrime { p } => write!(f, "{p} is not prime"),
        }
    }
}

/// Abstract local data: a reduction tree shape together with the prime it
/// is to be realized at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub tree: MarkedTree,
    pub prime: u64,
}

/// Check the tree axioms and the degree bound 3 ≤ deg(v) + marks(v) ≤ p+1
/// for every vertex. An empty list means the data is valid.
pub fn validate_local_data(ld: &LocalData) -> Vec<Violation> {
    let mut out = Vec::new();
    if !arith::is_prime(ld.prime) {
        out.push(Violation::NotPrime { p: ld.prime });
    }
    for v in 0..ld.tree.vertex_count() {
        let weight = ld.tree.degree(v) + ld.tree.marks_at(v).len();
        if weight < 3 {
            out.push(Violation::BelowStabilityBound { vertex: v });
        }
        if ld.prime >= 2 && weight as u64 > ld.prime + 1 {
            out.push(Violation::AboveDegreeBound { vertex: v, p: ld.prime });
        }
    }
    out
}

/// Build the stable marked reduction tree of a configuration at p.
pub fn build_tree(points: &[PPoint], p: u64) -> Result<MarkedTree> {
    build_tree_with(points, p, NormalizeChoice::default())
}

/// [`build_tree`] under an explicit normalization choice.
pub fn build_tree_with(
    points: &[PPoint],
    p: u64,
    choice: NormalizeChoice,
) -> Result<MarkedTree> {
    let (mobius, pts) = normalize_with(points, p, choice)?;
    let r = pts.len();

    let mut e = vec![vec![0u64; r]; r];
    for i in 0..r {
        for j in i + 1..r {
            let n = intersection_number(&pts[i], &pts[j], p)?;
            e[i][j] = n;
            e[j][i] = n;
        }
    }

    // Clusters are the balls of the intersection matrix: proper subsets of
    // size >= 2 whose internal depth exceeds that of any superset.
    let mut clusters: Vec<BTreeSet<usize>> = Vec::new();
    for i in 0..r {
        let mut radii: Vec<u64> = e[i].iter().copied().filter(|&d| d >= 1).collect();
        radii.sort_unstable();
        radii.dedup();
        for d in radii {
            let ball: BTreeSet<usize> = (0..r).filter(|&j| j == i || e[i][j] >= d).collect();
            if ball.len() >= 2 && ball.len() < r && !clusters.contains(&ball) {
                clusters.push(ball);
            }
        }
    }
    let depth_of = |s: &BTreeSet<usize>| -> u64 {
        let members: Vec<usize> = s.iter().copied().collect();
        let mut depth = u64::MAX;
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                depth = depth.min(e[i][j]);
            }
        }
        depth
    };
    // Shallow, large clusters first so that ids are topologically sorted.
    clusters.sort_by_key(|s| (depth_of(s), std::cmp::Reverse(s.len()), s.iter().copied().collect::<Vec<_>>()));

    // Vertex 0 is the root; cluster k becomes vertex k+1.
    let mut parent: Vec<Option<(usize, u64)>> = vec![None];
    for (k, cluster) in clusters.iter().enumerate() {
        let mut best: Option<(usize, u64)> = None; // (cluster idx, depth)
        for (m, candidate) in clusters.iter().enumerate() {
            if m != k && candidate.is_superset(cluster) && candidate.len() > cluster.len() {
                let d = depth_of(candidate);
                if best.map_or(true, |(_, bd)| d > bd) {
                    best = Some((m, d));
                }
            }
        }
        let (parent_vertex, parent_depth) = match best {
            Some((m, d)) => (m + 1, d),
            None => (0, 0),
        };
        let thickness = depth_of(cluster) - parent_depth;
        debug_assert!(thickness >= 1);
        parent.push(Some((parent_vertex, thickness)));
    }

    // Each mark sits on its smallest containing cluster, or the root.
    let vertex_of_mark: Vec<usize> = (0..r)
        .map(|i| {
            clusters
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contains(&i))
                .max_by_key(|(_, s)| depth_of(s))
                .map(|(k, _)| k + 1)
                .unwrap_or(0)
        })
        .collect();

    // The niceorder relabeling: depth-first, visiting the marks and child
    // clusters of each vertex in ascending order of their least original
    // mark, so that every cluster becomes an interval of consecutive
    // labels.
    let mut order: Vec<usize> = Vec::with_capacity(r);
    fn visit(
        v: usize,
        r: usize,
        vertex_of_mark: &[usize],
        clusters: &[BTreeSet<usize>],
        parent: &[Option<(usize, u64)>],
        order: &mut Vec<usize>,
    ) {
        enum Item {
            Mark(usize),
            Child(usize),
        }
        let mut items: Vec<(usize, Item)> = Vec::new();
        for i in 0..r {
            if vertex_of_mark[i] == v {
                items.push((i, Item::Mark(i)));
            }
        }
        for (w, entry) in parent.iter().enumerate() {
            if let Some((u, _)) = entry {
                if *u == v {
                    let least = *clusters[w - 1].iter().next().expect("nonempty");
                    items.push((least, Item::Child(w)));
                }
            }
        }
        items.sort_by_key(|&(key, _)| key);
        for (_, item) in items {
            match item {
                Item::Mark(i) => order.push(i),
                Item::Child(w) => visit(w, r, vertex_of_mark, clusters, parent, order),
            }
        }
    }
    visit(0, r, &vertex_of_mark, &clusters, &parent, &mut order);
    debug_assert_eq!(order.len(), r);

    // order[k] = original 0-based mark of new label k+1; marks[k] = vertex
    // of new label k+1.
    let marks: Vec<usize> = order.iter().map(|&orig| vertex_of_mark[orig]).collect();
    let order: Vec<usize> = order.into_iter().map(|orig| orig + 1).collect();

    let tree = MarkedTree::from_parts(parent, marks, order, mobius)?;
    debug_assert!(tree.stability_violations().is_empty());
    debug_assert!(clusters_are_intervals(&tree));
    Ok(tree)
}

fn clusters_are_intervals(tree: &MarkedTree) -> bool {
    (1..tree.vertex_count()).all(|v| {
        let marks = tree.subtree_marks(v);
        let (min, max) = (*marks.iter().next().unwrap(), *marks.iter().last().unwrap());
        max - min + 1 == marks.len()
    })
}

// ---------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct MobiusJson {
    a: String,
    b: String,
    c: String,
    d: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeJson {
    child: usize,
    parent: usize,
    thickness: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TreeJson {
    root: usize,
    vertices: Vec<usize>,
    edges: Vec<EdgeJson>,
    marks: std::collections::BTreeMap<String, usize>,
    order: Vec<usize>,
    normalization: MobiusJson,
}

impl MarkedTree {
    pub fn to_json_value(&self) -> serde_json::Value {
        let json = TreeJson {
            root: 0,
            vertices: (0..self.vertex_count()).collect(),
            edges: self
                .edges()
                .map(|(child, parent, thickness)| EdgeJson { child, parent, thickness })
                .collect(),
            marks: (1..=self.rank())
                .map(|i| (i.to_string(), self.mark_vertex(i)))
                .collect(),
            order: self.order.clone(),
            normalization: MobiusJson {
                a: arith::format_rational(&self.normalization.a),
                b: arith::format_rational(&self.normalization.b),
                c: arith::format_rational(&self.normalization.c),
                d: arith::format_rational(&self.normalization.d),
            },
        };
        serde_json::to_value(json).expect("tree schema serializes")
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<MarkedTree> {
        let json: TreeJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("invalid tree json: {e}")))?;
        if !json.vertices.contains(&json.root) {
            return Err(Error::InvalidTree("root is not a vertex".into()));
        }
        let mut ids = json.vertices.clone();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != json.vertices.len() {
            return Err(Error::InvalidTree("duplicate vertex ids".into()));
        }
        // Remap arbitrary vertex ids onto 0..n in breadth-first order from
        // the root so that parents precede children.
        let mut raw_parent: std::collections::BTreeMap<usize, (usize, u64)> =
            std::collections::BTreeMap::new();
        for edge in &json.edges {
            if !json.vertices.contains(&edge.child) || !json.vertices.contains(&edge.parent) {
                return Err(Error::InvalidTree(format!(
                    "edge {} -> {} uses an unknown vertex",
                    edge.child, edge.parent
                )));
            }
            if edge.child == json.root {
                return Err(Error::InvalidTree("root cannot have a parent".into()));
            }
            if raw_parent.insert(edge.child, (edge.parent, edge.thickness)).is_some() {
                return Err(Error::InvalidTree(format!(
                    "vertex {} has two parents",
                    edge.child
                )));
            }
        }
        let mut canonical: std::collections::BTreeMap<usize, usize> =
            std::collections::BTreeMap::new();
        canonical.insert(json.root, 0);
        let mut frontier = vec![json.root];
        while let Some(v) = frontier.pop() {
            let mut kids: Vec<usize> = raw_parent
                .iter()
                .filter_map(|(&c, &(u, _))| (u == v).then_some(c))
                .collect();
            kids.sort_unstable();
            for c in kids.into_iter().rev() {
                if !canonical.contains_key(&c) {
                    canonical.insert(c, canonical.len());
                    frontier.push(c);
                }
            }
        }
        if canonical.len() != json.vertices.len() {
            return Err(Error::InvalidTree(
                "graph is not a tree rooted at the declared root".into(),
            ));
        }
        let mut parent: Vec<Option<(usize, u64)>> = vec![None; canonical.len()];
        for (&child, &(par, theta)) in &raw_parent {
            parent[canonical[&child]] = Some((canonical[&par], theta));
        }
        // Breadth-first ids can still place a parent after a child when
        // sibling subtrees interleave; renumber by a topological pass.
        let n = parent.len();
        let mut topo: Vec<usize> = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        while topo.len() < n {
            let before = topo.len();
            for v in 0..n {
                if placed[v] {
                    continue;
                }
                match parent[v] {
                    None => {
                        topo.push(v);
                        placed[v] = true;
                    }
                    Some((u, _)) if placed[u] => {
                        topo.push(v);
                        placed[v] = true;
                    }
                    _ => {}
                }
            }
            if topo.len() == before {
                return Err(Error::InvalidTree("cycle among edges".into()));
            }
        }
        let mut rename = vec![0usize; n];
        for (new, &old) in topo.iter().enumerate() {
            rename[old] = new;
        }
        let mut sorted_parent: Vec<Option<(usize, u64)>> = vec![None; n];
        for v in 0..n {
            sorted_parent[rename[v]] = parent[v].map(|(u, theta)| (rename[u], theta));
        }

        let r = json.marks.len();
        let mut marks = vec![0usize; r];
        for (key, &vertex) in &json.marks {
            let i: usize = key
                .parse()
                .map_err(|_| Error::InvalidTree(format!("bad mark key {key:?}")))?;
            if i == 0 || i > r {
                return Err(Error::InvalidTree(format!(
                    "mark keys must be 1..={r}, got {key:?}"
                )));
            }
            let canon = canonical
                .get(&vertex)
                .ok_or_else(|| Error::InvalidTree(format!("mark {i} at unknown vertex")))?;
            marks[i - 1] = rename[*canon];
        }
        let order = if json.order.is_empty() {
            (1..=r).collect()
        } else {
            json.order.clone()
        };
        let normalization = Mobius::new(
            arith::parse_rational(&json.normalization.a)?,
            arith::parse_rational(&json.normalization.b)?,
            arith::parse_rational(&json.normalization.c)?,
            arith::parse_rational(&json.normalization.d)?,
        )?;
        MarkedTree::from_parts(sorted_parent, marks, order, normalization)
    }
}
