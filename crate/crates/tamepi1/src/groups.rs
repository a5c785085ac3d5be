//! Brute-force finite permutation group engine.
//!
//! Groups are given by permutation generators and enumerated by
//! breadth-first closure up to a configurable cap. Everything downstream
//! (centers, exponents, uniform-conjugacy searches) is a plain loop over
//! the element list; at desk scale that is both fast enough and obviously
//! correct.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::words::{ConjugatorAction, TupleAutomorphism, Word};
use crate::{Error, Result};

/// Default enumeration cap.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// A permutation of {1..n}, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Permutation {
        Permutation { images: (0..degree).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Parse("images do not form a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Pad with fixed points up to a larger degree.
    pub fn extended(&self, degree: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend(images.len()..degree);
        Permutation { images }
    }

    /// Product convention: `a.mul(&b)` applies `a` first, then `b`, so a
    /// branch cycle description multiplies out left to right.
    pub fn mul(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        })
    }

    pub fn inv(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// h g h⁻¹ where `self` = g.
    pub fn conjugate_by(&self, h: &Permutation) -> Result<Permutation> {
        h.mul(self)?.mul(&h.inv())
    }

    pub fn order(&self) -> u64 {
        let mut pow = self.clone();
        let mut n = 1;
        while !pow.is_identity() {
            pow = pow.mul(self).expect("same degree");
            n += 1;
        }
        n
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.mul(other).ok() == other.mul(self).ok()
    }

    /// Disjoint cycle decomposition, fixed points omitted, 1-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation `"(1 2 3)(4 5)"`; the identity prints as `"()"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (k, i) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Largest point accepted by the cycle-notation parser. Degrees past this
/// have no business in a brute-force engine, and the cap keeps untrusted
/// input from allocating giant image tables.
pub const MAX_PARSED_DEGREE: usize = 4096;

/// Parse cycle notation `"(1 2 3)(4 5)"`. Points are 1-based; `"()"` is
/// the identity. The degree is the largest point mentioned unless a larger
/// `min_degree` is requested.
pub fn parse_permutation(s: &str, min_degree: usize) -> Result<Permutation> {
    let s = s.trim();
    let bad = |msg: &str| Error::Parse(format!("invalid permutation {s:?}: {msg}"));
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = s;
    if rest.is_empty() {
        return Err(bad("empty string"));
    }
    while !rest.is_empty() {
        let rest_trim = rest.trim_start();
        let Some(after) = rest_trim.strip_prefix('(') else {
            return Err(bad("expected '('"));
        };
        let Some(close) = after.find(')') else {
            return Err(bad("unbalanced parenthesis"));
        };
        let body = &after[..close];
        let mut cycle = Vec::new();
        for token in body.split_whitespace() {
            let i: usize = token.parse().map_err(|_| bad("cycle entries must be integers"))?;
            if i == 0 {
                return Err(bad("points are 1-based"));
            }
            if i > MAX_PARSED_DEGREE {
                return Err(bad("point exceeds the supported degree"));
            }
            cycle.push(i - 1);
        }
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = &after[close + 1..];
    }
    let degree = cycles
        .iter()
        .flatten()
        .map(|&i| i + 1)
        .max()
        .unwrap_or(0)
        .max(min_degree);
    let mut images: Vec<usize> = (0..degree).collect();
    for cycle in &cycles {
        let mut seen = HashSet::new();
        for &i in cycle {
            if !seen.insert(i) {
                return Err(bad("repeated point in cycle"));
            }
        }
        for k in 0..cycle.len() {
            let from = cycle[k];
            let to = cycle[(k + 1) % cycle.len()];
            if images[from] != from && images[from] != to {
                return Err(bad("cycles are not disjoint"));
            }
            images[from] = to;
        }
    }
    // Overlapping cycles can still sneak through when they agree on one
    // image; a final bijectivity check catches the rest.
    Permutation::from_images(images).map_err(|_| bad("cycles are not disjoint"))
}

/// A finite permutation group with a lazily enumerated element list. The
/// first enumeration wins and is cached; concurrent first access is safe.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    cap: usize,
    elements: OnceLock<std::result::Result<Arc<Vec<Permutation>>, Error>>,
}

impl PermGroup {
    pub fn new(generators: Vec<Permutation>) -> Result<Arc<PermGroup>> {
        PermGroup::with_cap(generators, DEFAULT_ENUM_CAP)
    }

    pub fn with_cap(generators: Vec<Permutation>, cap: usize) -> Result<Arc<PermGroup>> {
        if generators.is_empty() {
            return Err(Error::Parse("a group needs at least one generator".into()));
        }
        let degree = generators.iter().map(|g| g.degree()).max().unwrap_or(1).max(1);
        let generators: Vec<Permutation> =
            generators.iter().map(|g| g.extended(degree)).collect();
        Ok(Arc::new(PermGroup { degree, generators, cap, elements: OnceLock::new() }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    /// The full element list by breadth-first closure; errors if the cap
    /// is exceeded.
    pub fn elements(&self) -> Result<Arc<Vec<Permutation>>> {
        self.elements
            .get_or_init(|| closure(&self.generators, self.degree, self.cap).map(Arc::new))
            .clone()
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Ok(false);
        }
        Ok(self.elements()?.contains(g))
    }

    /// Z(G), by checking commutation with the generators.
    pub fn center(&self) -> Result<Vec<Permutation>> {
        Ok(self
            .elements()?
            .iter()
            .filter(|g| self.generators.iter().all(|h| g.commutes_with(h)))
            .cloned()
            .collect())
    }

    /// exp(Inn(G)) = exp(G/Z(G)): the least N with gᴺ central for all g.
    pub fn inn_exponent(&self) -> Result<u64> {
        let center: HashSet<Permutation> = self.center()?.into_iter().collect();
        let mut exponent = 1u64;
        for g in self.elements()?.iter() {
            let mut pow = g.clone();
            let mut n = 1u64;
            while !center.contains(&pow) {
                pow = pow.mul(g).expect("same degree");
                n += 1;
            }
            exponent = lcm(exponent, n);
        }
        Ok(exponent)
    }
}

fn closure(
    generators: &[Permutation],
    degree: usize,
    cap: usize,
) -> std::result::Result<Vec<Permutation>, Error> {
    let mut elements = vec![Permutation::identity(degree)];
    let mut seen: HashSet<Permutation> = elements.iter().cloned().collect();
    let mut frontier = 0;
    while frontier < elements.len() {
        let g = elements[frontier].clone();
        frontier += 1;
        for h in generators {
            let gh = g.mul(h).expect("uniform degree");
            if seen.insert(gh.clone()) {
                if elements.len() >= cap {
                    return Err(Error::EnumerationCap { cap, found: elements.len() });
                }
                elements.push(gh);
            }
        }
    }
    Ok(elements)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A branch cycle description: group elements (g₁,...,g_r) with
/// g₁⋯g_r = 1 that generate the whole group.
#[derive(Debug, Clone)]
pub struct GroupTuple {
    group: Arc<PermGroup>,
    entries: Vec<Permutation>,
}

impl GroupTuple {
    pub fn new(group: Arc<PermGroup>, entries: Vec<Permutation>) -> Result<GroupTuple> {
        let entries: Vec<Permutation> =
            entries.iter().map(|g| g.extended(group.degree())).collect();
        for g in &entries {
            if g.degree() != group.degree() {
                return Err(Error::DegreeMismatch(group.degree(), g.degree()));
            }
            if !group.contains(g)? {
                return Err(Error::Parse(format!("{g} is not an element of the group")));
            }
        }
        let tuple = GroupTuple { group, entries };
        tuple.validate()?;
        Ok(tuple)
    }

    fn validate(&self) -> Result<()> {
        let mut prod = self.group.identity();
        for g in &self.entries {
            prod = prod.mul(g)?;
        }
        if !prod.is_identity() {
            return Err(Error::TupleProductNotOne);
        }
        let generated = closure(&self.entries, self.group.degree(), usize::MAX)?;
        if generated.len() != self.group.order()? {
            return Err(Error::TupleDoesNotGenerate);
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Permutation] {
        &self.entries
    }
}

impl PartialEq for GroupTuple {
    fn eq(&self, other: &GroupTuple) -> bool {
        self.entries == other.entries
    }
}

/// Evaluate a word at a tuple: substitute gᵢ for αᵢ and multiply left to
/// right.
pub fn evaluate(w: &Word, t: &GroupTuple) -> Result<Permutation> {
    evaluate_at(w, t.group(), t.entries())
}

pub(crate) fn evaluate_at(
    w: &Word,
    group: &PermGroup,
    entries: &[Permutation],
) -> Result<Permutation> {
    if w.rank() != entries.len() {
        return Err(Error::RankMismatch(w.rank(), entries.len()));
    }
    let mut out = group.identity();
    for letter in w.letters() {
        let g = &entries[letter.index - 1];
        let factor = if letter.inverse { g.inv() } else { g.clone() };
        out = out.mul(&factor)?;
    }
    Ok(out)
}

/// The evaluated image tuple of an automorphism, revalidated: the output
/// must again have product 1 and generate the group, otherwise the input
/// was not an automorphism of the quotient.
pub fn apply_action(action: &TupleAutomorphism, t: &GroupTuple) -> Result<GroupTuple> {
    let entries = apply_to_entries(action, t.group(), t.entries())?;
    let out = GroupTuple { group: t.group.clone(), entries };
    out.validate().map_err(|_| Error::NotAnAutomorphism)?;
    Ok(out)
}

/// Variant of [`apply_action`] for conjugator actions.
pub fn apply_conjugator_action(action: &ConjugatorAction, t: &GroupTuple) -> Result<GroupTuple> {
    apply_action(&action.to_images(), t)
}

pub(crate) fn apply_to_entries(
    action: &TupleAutomorphism,
    group: &PermGroup,
    entries: &[Permutation],
) -> Result<Vec<Permutation>> {
    if action.rank() != entries.len() {
        return Err(Error::RankMismatch(action.rank(), entries.len()));
    }
    (1..=action.rank())
        .map(|i| evaluate_at(action.image(i), group, entries))
        .collect()
}

/// All h ∈ G with t2ᵢ = h t1ᵢ h⁻¹ for every i: empty, or a left coset of
/// the center.
pub fn uniform_conjugators(t1: &GroupTuple, t2: &GroupTuple) -> Result<Vec<Permutation>> {
    if !Arc::ptr_eq(&t1.group, &t2.group) && t1.group.generators() != t2.group.generators() {
        return Err(Error::Parse("tuples live in different groups".into()));
    }
    if t1.rank() != t2.rank() {
        return Err(Error::RankMismatch(t1.rank(), t2.rank()));
    }
    uniform_conjugators_of(&t1.group, t1.entries(), t2.entries())
}

pub(crate) fn uniform_conjugators_of(
    group: &PermGroup,
    t1: &[Permutation],
    t2: &[Permutation],
) -> Result<Vec<Permutation>> {
    Ok(group
        .elements()?
        .iter()
        .filter(|h| {
            t1.iter()
                .zip(t2)
                .all(|(a, b)| a.conjugate_by(h).expect("same degree") == *b)
        })
        .cloned()
        .collect())
}

/// Standard small groups, handy in tests and examples.
pub mod samples {
    use super::*;

    pub fn sym(n: usize) -> Arc<PermGroup> {
        let transposition = parse_permutation("(1 2)", n).unwrap();
        let cycle_body: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let cycle = parse_permutation(&format!("({})", cycle_body.join(" ")), n).unwrap();
        PermGroup::new(vec![transposition, cycle]).unwrap()
    }

    pub fn alt4() -> Arc<PermGroup> {
        let a = parse_permutation("(1 2 3)", 4).unwrap();
        let b = parse_permutation("(2 3 4)", 4).unwrap();
        PermGroup::new(vec![a, b]).unwrap()
    }

    pub fn dihedral4() -> Arc<PermGroup> {
        let rot = parse_permutation("(1 2 3 4)", 4).unwrap();
        let flip = parse_permutation("(1 3)", 4).unwrap();
        PermGroup::new(vec![rot, flip]).unwrap()
    }

    /// Q₈ in its regular representation inside S₈, points ordered
    /// (1, −1, i, −i, j, −j, k, −k); generators are left multiplication
    /// by i and j.
    pub fn quaternion8() -> Arc<PermGroup> {
        let i = parse_permutation("(1 3 2 4)(5 7 6 8)", 8).unwrap();
        let j = parse_permutation("(1 5 2 6)(3 8 4 7)", 8).unwrap();
        PermGroup::new(vec![i, j]).unwrap()
    }

    pub fn cyclic(n: usize) -> Arc<PermGroup> {
        let body: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let cycle = parse_permutation(&format!("({})", body.join(" ")), n).unwrap();
        PermGroup::new(vec![cycle]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;
    use crate::words::parse_word;

    #[test]
    fn permutation_parsing_and_display() {
        let g = parse_permutation("(1 2 3)(4 5)", 0).unwrap();
        assert_eq!(g.to_string(), "(1 2 3)(4 5)");
        assert_eq!(parse_permutation("()", 3).unwrap(), Permutation::identity(3));
        assert_eq!(parse_permutation("()", 0).unwrap().to_string(), "()");
        assert!(parse_permutation("(1 1)", 0).is_err());
        assert!(parse_permutation("(1 2", 0).is_err());
        assert!(parse_permutation("(0 1)", 0).is_err());
        assert!(parse_permutation("1 2", 0).is_err());
        assert!(parse_permutation("(1 2)(2 3)", 0).is_err());
    }

    #[test]
    fn product_applies_left_factor_first() {
        let a = parse_permutation("(1 2)", 3).unwrap();
        let b = parse_permutation("(1 3)", 3).unwrap();
        // 1 -> 2 under a, then 2 -> 2 under b.
        assert_eq!(a.mul(&b).unwrap().apply(0), 1);
        assert_eq!(a.mul(&b).unwrap().to_string(), "(1 2 3)");
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(sym(3).order().unwrap(), 6);
        assert_eq!(sym(4).order().unwrap(), 24);
        assert_eq!(alt4().order().unwrap(), 12);
        assert_eq!(dihedral4().order().unwrap(), 8);
        assert_eq!(quaternion8().order().unwrap(), 8);
        let trivial = PermGroup::new(vec![Permutation::identity(1)]).unwrap();
        assert_eq!(trivial.order().unwrap(), 1);
    }

    #[test]
    fn enumeration_cap_is_an_error() {
        let g = PermGroup::with_cap(sym(4).generators().to_vec(), 10).unwrap();
        match g.order() {
            Err(Error::EnumerationCap { cap: 10, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn centers() {
        assert_eq!(sym(3).center().unwrap(), vec![Permutation::identity(3)]);
        let q8 = quaternion8();
        let center = q8.center().unwrap();
        assert_eq!(center.len(), 2);
        assert!(center.contains(&Permutation::identity(8)));
        let c6 = cyclic(6);
        assert_eq!(c6.center().unwrap().len(), 6);
    }

    #[test]
    fn inn_exponents() {
        assert_eq!(sym(3).inn_exponent().unwrap(), 6);
        assert_eq!(sym(4).inn_exponent().unwrap(), 12);
        assert_eq!(alt4().inn_exponent().unwrap(), 6);
        assert_eq!(dihedral4().inn_exponent().unwrap(), 2);
        assert_eq!(quaternion8().inn_exponent().unwrap(), 2);
        assert_eq!(cyclic(6).inn_exponent().unwrap(), 1);
    }

    fn s3_tuple(entries: &[&str]) -> GroupTuple {
        let group = sym(3);
        let entries = entries
            .iter()
            .map(|s| parse_permutation(s, 3).unwrap())
            .collect();
        GroupTuple::new(group, entries).unwrap()
    }

    #[test]
    fn tuple_validation() {
        // Product (1 2)(1 2)(1 2 3)(1 3 2) = 1 and the entries generate.
        s3_tuple(&["(1 2)", "(1 2)", "(1 2 3)", "(1 3 2)"]);
        let group = sym(3);
        let bad_product = vec![
            parse_permutation("(1 2)", 3).unwrap(),
            parse_permutation("(1 2 3)", 3).unwrap(),
        ];
        assert_eq!(
            GroupTuple::new(group.clone(), bad_product).unwrap_err(),
            Error::TupleProductNotOne
        );
        let no_generation = vec![
            parse_permutation("(1 2)", 3).unwrap(),
            parse_permutation("(1 2)", 3).unwrap(),
        ];
        assert_eq!(
            GroupTuple::new(group, no_generation).unwrap_err(),
            Error::TupleDoesNotGenerate
        );
    }

    #[test]
    fn word_evaluation() {
        let t = s3_tuple(&["(1 2)", "(1 2)", "(1 2 3)", "(1 3 2)"]);
        let w = parse_word(4, "a1 a2").unwrap();
        assert!(evaluate(&w, &t).unwrap().is_identity());
        assert!(evaluate(&Word::empty(4), &t).unwrap().is_identity());
        let full = parse_word(4, "a1 a2 a3 a4").unwrap();
        assert!(evaluate(&full, &t).unwrap().is_identity());
        let w = parse_word(4, "a3 a1").unwrap();
        assert_eq!(
            evaluate(&w, &t).unwrap(),
            parse_permutation("(1 2 3)", 3)
                .unwrap()
                .mul(&parse_permutation("(1 2)", 3).unwrap())
                .unwrap()
        );
    }

    #[test]
    fn action_application_and_full_twist() {
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2 3)", "(1 2 3)"]);
        let identity = TupleAutomorphism::identity(4);
        assert_eq!(apply_action(&identity, &t).unwrap(), t);

        // Conjugating every generator by the full product is the identity
        // on product-one tuples.
        let q = parse_word(4, "a1 a2 a3 a4").unwrap();
        let full = ConjugatorAction::new(vec![q.clone(), q.clone(), q.clone(), q]).unwrap();
        assert_eq!(apply_conjugator_action(&full, &t).unwrap(), t);
    }

    #[test]
    fn uniform_conjugator_cosets() {
        let t = s3_tuple(&["(1 2)", "(1 3)", "(1 2 3)", "(1 2 3)"]);
        // Against itself: exactly the center (trivial for S3).
        let same = uniform_conjugators(&t, &t).unwrap();
        assert_eq!(same, vec![Permutation::identity(3)]);

        // Against a uniformly conjugated copy: the conjugator's coset.
        let h = parse_permutation("(1 2 3)", 3).unwrap();
        let conj = GroupTuple::new(
            t.group().clone(),
            t.entries()
                .iter()
                .map(|g| g.conjugate_by(&h).unwrap())
                .collect(),
        )
        .unwrap();
        assert_eq!(uniform_conjugators(&t, &conj).unwrap(), vec![h]);

        // Tuples in different classes: empty.
        let other = s3_tuple(&["(1 2)", "(1 2)", "(1 2 3)", "(1 3 2)"]);
        assert!(uniform_conjugators(&t, &other).unwrap().is_empty());
    }

    #[test]
    fn uniform_conjugators_form_center_coset() {
        let q8 = quaternion8();
        let i = parse_permutation("(1 3 2 4)(5 7 6 8)", 8).unwrap();
        let j = parse_permutation("(1 5 2 6)(3 8 4 7)", 8).unwrap();
        // (i, i, j, j) has product i²j² = (−1)(−1) = 1.
        let t = GroupTuple::new(q8.clone(), vec![i.clone(), i, j.clone(), j]).unwrap();
        let center = q8.center().unwrap();
        let same = uniform_conjugators(&t, &t).unwrap();
        assert_eq!(same.len(), center.len());
        for h in &same {
            assert!(center.contains(h));
        }
    }
}
