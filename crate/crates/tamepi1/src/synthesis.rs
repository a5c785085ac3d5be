//! Realize prescribed local data at finitely many primes by rational
//! points.
//!
//! At one prime, points are built digit by digit: each edge and mark gets
//! a residue color (siblings distinct, marks distinct from the edges at
//! their vertex), and the digits along the root-to-mark path spell out a
//! p-adic expansion. A root that already uses all p finite residue
//! directions banishes one subtree to the direction at infinity. Across
//! several primes the per-prime points are glued entrywise by the Chinese
//! remainder theorem: agreeing modulo p^{M_p} with M_p past the deepest
//! pairwise valuation leaves the reduction tree unchanged.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{crt, mod_inverse, val_p};
use crate::groups::PermGroup;
use crate::tree::{build_tree, validate_local_data, LocalData, MarkedTree, PPoint};
use crate::{Error, Result};

/// Residue colors for the edges and marks of a local-data tree: sibling
/// edges get distinct colors, marks at one vertex are distinct from each
/// other and from the edge colors out of that vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringChoice {
    /// Keyed by the child vertex of the colored edge.
    pub edge_colors: BTreeMap<usize, u64>,
    /// Keyed by mark label.
    pub mark_colors: BTreeMap<usize, u64>,
}

/// The lexicographically least valid coloring of the whole tree: colors
/// are assigned vertex by vertex, child edges first (in id order), then
/// marks (in label order), each taking the least color still allowed.
pub fn coloring(tree: &MarkedTree, p: u64) -> Result<ColoringChoice> {
    let region = vec![true; tree.vertex_count()];
    color_region(tree, p, &region, &[])
}

fn color_region(
    tree: &MarkedTree,
    p: u64,
    region: &[bool],
    skip_marks: &[usize],
) -> Result<ColoringChoice> {
    let mut edge_colors = BTreeMap::new();
    let mut mark_colors = BTreeMap::new();
    for v in 0..tree.vertex_count() {
        if !region[v] {
            continue;
        }
        let mut used: Vec<u64> = Vec::new();
        for child in tree.children(v) {
            if !region[child] {
                continue;
            }
            let color = least_missing(&used);
            if color >= p {
                return Err(Error::InvalidLocalData(format!(
                    "vertex {v} needs more than {p} residue directions"
                )));
            }
            used.push(color);
            edge_colors.insert(child, color);
        }
        for mark in tree.marks_at(v) {
            if skip_marks.contains(&mark) {
                continue;
            }
            let color = least_missing(&used);
            if color >= p {
                return Err(Error::InvalidLocalData(format!(
                    "vertex {v} needs more than {p} residue directions"
                )));
            }
            used.push(color);
            mark_colors.insert(mark, color);
        }
    }
    Ok(ColoringChoice { edge_colors, mark_colors })
}

fn least_missing(used: &[u64]) -> u64 {
    let mut c = 0;
    while used.contains(&c) {
        c += 1;
    }
    c
}

fn subtree_membership(tree: &MarkedTree, root: usize) -> Vec<bool> {
    let mut member = vec![false; tree.vertex_count()];
    member[root] = true;
    for v in root + 1..tree.vertex_count() {
        if let Some((u, _)) = tree.parent_edge(v) {
            member[v] = member[u];
        }
    }
    member
}

/// Digit expansions for the marks inside one region of the tree: the
/// region root's digits come first, and each mark ends with its own color
/// one level below its vertex.
fn digit_points(
    tree: &MarkedTree,
    p: u64,
    region_root: usize,
    skip_child: Option<usize>,
) -> Result<BTreeMap<usize, BigRational>> {
    let mut region = subtree_membership(tree, region_root);
    if let Some(skip) = skip_child {
        for (v, s) in subtree_membership(tree, skip).iter().enumerate() {
            if *s {
                region[v] = false;
            }
        }
    }
    let colors = color_region(tree, p, &region, &[])?;
    let big_p = BigInt::from(p);
    let mut out = BTreeMap::new();
    for mark in 1..=tree.rank() {
        let v = tree.mark_vertex(mark);
        if !region[v] {
            continue;
        }
        // Path of edges from the region root down to v.
        let mut path: Vec<usize> = Vec::new();
        let mut w = v;
        while w != region_root {
            path.push(w);
            w = tree.parent_edge(w).expect("region below its root").0;
        }
        path.reverse();
        let mut value = BigInt::zero();
        let mut exponent = 0u64;
        for child in &path {
            let digit = colors.edge_colors[child];
            value += BigInt::from(digit) * big_p.pow(exponent as u32);
            exponent += tree.parent_edge(*child).expect("non-root").1;
        }
        let digit = colors.mark_colors[&mark];
        value += BigInt::from(digit) * big_p.pow(exponent as u32);
        out.insert(mark, BigRational::from_integer(value));
    }
    Ok(out)
}

/// Rational points inducing the given local data at its prime. Valid data
/// always succeeds; the result is round-trip checked against the tree.
pub fn synthesize_one(ld: &LocalData) -> Result<Vec<BigRational>> {
    let violations = validate_local_data(ld);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::InvalidLocalData(msgs.join("; ")));
    }
    let tree = &ld.tree;
    let p = ld.prime;
    let root_children = tree.children(0);
    let root_items = root_children.len() + tree.marks_at(0).len();

    let mut values: BTreeMap<usize, BigRational>;
    if root_items <= p as usize {
        values = digit_points(tree, p, 0, None)?;
    } else if let Some(&split) = root_children
        .iter()
        .max_by_key(|&&c| tree.subtree_marks(c).into_iter().min())
    {
        // All p finite residue directions plus one more: the subtree with
        // the largest leading mark moves to the direction at infinity.
        // Sending u to 1/(p^eta (u + 1)) keeps every pairwise depth of the
        // subtree, shifted by the thickness eta of the split edge.
        let eta = tree.parent_edge(split).expect("root child").1;
        values = digit_points(tree, p, 0, Some(split))?;
        let second = digit_points(tree, p, split, None)?;
        let scale = BigRational::from_integer(BigInt::from(p).pow(eta as u32));
        for (mark, a) in second {
            let w = &scale * (a + BigRational::one());
            values.insert(mark, w.recip());
        }
    } else {
        // p + 1 marks on a bare root: banish the largest to infinity's
        // direction as 1/p.
        let banished = tree
            .marks_at(0)
            .into_iter()
            .max()
            .expect("root has marks in this branch");
        let colors = color_region(tree, p, &vec![true; tree.vertex_count()], &[banished])?;
        values = colors
            .mark_colors
            .iter()
            .map(|(&m, &c)| (m, BigRational::from_integer(BigInt::from(c))))
            .collect();
        values.insert(
            banished,
            BigRational::new(BigInt::one(), BigInt::from(p)),
        );
    }

    let points: Vec<BigRational> =
        (1..=tree.rank()).map(|m| values[&m].clone()).collect();
    let ppoints: Vec<PPoint> = points.iter().cloned().map(PPoint::Finite).collect();
    let rebuilt = build_tree(&ppoints, p)?;
    assert!(
        rebuilt.isomorphic(tree),
        "synthesized points fail to induce the prescribed local data at p = {p}"
    );
    Ok(points)
}

/// 1 + the largest pairwise valuation of differences (clamped at 0 per
/// pair). Configurations agreeing entrywise modulo p^{M_p} induce the
/// same reduction tree.
pub fn congruence_modulus(points: &[BigRational], p: u64) -> Result<u64> {
    let mut max_v = 0i64;
    for (k, a) in points.iter().enumerate() {
        for b in &points[k + 1..] {
            let diff = a - b;
            if diff.is_zero() {
                return Err(Error::CoincidentPoints(format!(
                    "{} appears twice",
                    crate::arith::format_rational(a)
                )));
            }
            max_v = max_v.max(val_p(&diff, p)?.max(0));
        }
    }
    Ok(1 + max_v as u64)
}

/// Solve x ≡ value_p (mod p^{m_p}) in the p-adic sense (valuation of the
/// difference at least m_p) simultaneously for all listed primes.
fn solve_congruences(targets: &[(BigRational, u64, u64)]) -> BigRational {
    // Common denominator soaking up every negative valuation.
    let mut common = BigInt::one();
    for (value, p, _) in targets {
        let f = if value.is_zero() {
            0
        } else {
            (-val_p(value, *p).expect("nonzero")).max(0)
        };
        common *= BigInt::from(*p).pow(f as u32);
    }
    let mut pairs: Vec<(BigInt, BigInt)> = Vec::new();
    for (value, p, m) in targets {
        let scaled = value * BigRational::from_integer(common.clone());
        let f = if value.is_zero() {
            0
        } else {
            (-val_p(value, *p).expect("nonzero")).max(0) as u64
        };
        let modulus = BigInt::from(*p).pow((m + f) as u32);
        // scaled is p-integral: its reduced denominator is coprime to p.
        let inv = mod_inverse(scaled.denom(), &modulus)
            .expect("denominator coprime to the modulus");
        let residue = (scaled.numer() * inv).mod_floor(&modulus);
        pairs.push((residue, modulus));
    }
    let n = crt(&pairs).expect("prime-power moduli are coprime");
    BigRational::new(n, common)
}

/// Rational points inducing every prescribed local datum simultaneously.
/// Keys of the map are the primes; each datum must carry the same prime
/// and the same number of marks.
pub fn synthesize_multi(specs: &BTreeMap<u64, LocalData>) -> Result<Vec<BigRational>> {
    if specs.is_empty() {
        return Err(Error::InvalidLocalData("no primes given".into()));
    }
    let mut rank = None;
    for (&p, ld) in specs {
        if ld.prime != p {
            return Err(Error::InvalidLocalData(format!(
                "local data at key {p} carries prime {}",
                ld.prime
            )));
        }
        match rank {
            None => rank = Some(ld.tree.rank()),
            Some(r) if r != ld.tree.rank() => {
                return Err(Error::RankMismatch(r, ld.tree.rank()))
            }
            _ => {}
        }
    }
    let r = rank.expect("nonempty");

    let mut per_prime: BTreeMap<u64, (Vec<BigRational>, u64)> = BTreeMap::new();
    for (&p, ld) in specs {
        let points = synthesize_one(ld)?;
        let modulus = congruence_modulus(&points, p)?;
        per_prime.insert(p, (points, modulus));
    }
    if per_prime.len() == 1 {
        let (points, _) = per_prime.into_values().next().expect("one entry");
        return Ok(points);
    }

    let mut combined = Vec::with_capacity(r);
    for i in 0..r {
        let targets: Vec<(BigRational, u64, u64)> = per_prime
            .iter()
            .map(|(&p, (points, m))| (points[i].clone(), p, *m))
            .collect();
        combined.push(solve_congruences(&targets));
    }

    let ppoints: Vec<PPoint> = combined.iter().cloned().map(PPoint::Finite).collect();
    for (&p, ld) in specs {
        let rebuilt = build_tree(&ppoints, p)?;
        assert!(
            rebuilt.isomorphic(&ld.tree),
            "combined points fail to induce the prescribed local data at p = {p}"
        );
    }
    Ok(combined)
}

/// The default local-data shape realizing thickness-n edges: a single
/// vertex when the action is trivial anyway, otherwise one child holding
/// marks {1, 2} behind an edge of thickness n.
pub fn default_shape(r: usize, p: u64, n: u64) -> Result<MarkedTree> {
    if r < 3 {
        return Err(Error::TooFewMarks);
    }
    let one_vertex_fits = r as u64 <= p + 1;
    if (n == 1 || r == 3) && one_vertex_fits {
        return MarkedTree::from_local_shape(vec![None], vec![0; r]);
    }
    if r >= 4 && r as u64 - 1 <= p + 1 {
        let parent = vec![None, Some((0, n))];
        let mut marks = vec![1, 1];
        marks.extend(std::iter::repeat(0).take(r - 2));
        return MarkedTree::from_local_shape(parent, marks);
    }
    Err(Error::NoLocalDataShape { r, p })
}

/// Rational branch points over which every G-cover has a field of moduli
/// unramified at all primes of the given set: each local datum has all
/// thicknesses equal to exp(Inn(G)), so every evaluated conjugator is
/// central and the δ-action fixes every branch cycle description.
pub fn synthesize_unramified(
    group: &PermGroup,
    r: usize,
    primes: &std::collections::BTreeSet<u64>,
) -> Result<Vec<BigRational>> {
    if r < 3 {
        return Err(Error::TooFewMarks);
    }
    if primes.is_empty() {
        return Err(Error::InvalidLocalData("no primes given".into()));
    }
    let order = group.order()?;
    let n = group.inn_exponent()?;
    let mut specs = BTreeMap::new();
    for &p in primes {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if order as u64 % p == 0 {
            return Err(Error::PrimeDividesOrder { p, order });
        }
        let tree = default_shape(r, p, n)?;
        specs.insert(p, LocalData { tree, prime: p });
    }
    synthesize_multi(&specs)
}
