//! Freely reduced words in the bouquet generators α₁..α_r and
//! automorphisms of the free group of rank r.
//!
//! Automorphisms come in two flavors: [`ConjugatorAction`], which sends
//! every generator to a conjugate of itself (the shape the tame generator
//! always takes), and the general by-images record [`TupleAutomorphism`].
//! Words live in the plain free group; the surface relation α₁⋯α_r = 1 is
//! only imposed when words are evaluated into finite groups.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A single letter: a 1-based generator index and an exponent sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    fn inv(self) -> Letter {
        Letter { index: self.index, inverse: !self.inverse }
    }

    fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }
}

/// A freely reduced word in the generators `a1..a<rank>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty(rank: usize) -> Word {
        Word { rank, letters: Vec::new() }
    }

    /// The generator α_i (1-based).
    pub fn generator(rank: usize, index: usize) -> Result<Word> {
        if index == 0 || index > rank {
            return Err(Error::GeneratorOutOfRange { index, rank });
        }
        Ok(Word { rank, letters: vec![Letter { index, inverse: false }] })
    }

    /// Freely reduce an arbitrary letter sequence.
    pub fn from_letters<I>(rank: usize, letters: I) -> Result<Word>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut reduced: Vec<Letter> = Vec::new();
        for letter in letters {
            if letter.index == 0 || letter.index > rank {
                return Err(Error::GeneratorOutOfRange { index: letter.index, rank });
            }
            match reduced.last() {
                Some(&last) if last.cancels(letter) => {
                    reduced.pop();
                }
                _ => reduced.push(letter),
            }
        }
        Ok(Word { rank, letters: reduced })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &Word) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    /// Reduced concatenation `self · other`.
    pub fn mul(&self, other: &Word) -> Result<Word> {
        self.check_rank(other)?;
        Word::from_letters(self.rank, self.letters.iter().chain(&other.letters).copied())
    }

    /// The inverse word: reversed letters with flipped exponents.
    pub fn inv(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// The conjugate `u · self · u⁻¹`.
    pub fn conj(&self, u: &Word) -> Result<Word> {
        self.check_rank(u)?;
        u.mul(self)?.mul(&u.inv())
    }

    /// `self^n` for any integer n.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut out = Word::empty(self.rank);
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base).expect("equal ranks");
        }
        out
    }

    /// Ascending product `∏_{j ∈ J} α_j` over a set of generator indices.
    pub fn ascending_product<I>(rank: usize, indices: I) -> Result<Word>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut sorted: Vec<usize> = indices.into_iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        Word::from_letters(
            rank,
            sorted.into_iter().map(|index| Letter { index, inverse: false }),
        )
    }
}

impl fmt::Display for Word {
    /// `"a1 a2^-1 a1"`; the empty word prints as `"1"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for letter in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "a{}", letter.index)?;
            if letter.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// Parse the [`fmt::Display`] form of a word: space-separated `a<i>` or
/// `a<i>^-1` tokens, or `"1"` for the empty word.
pub fn parse_word(rank: usize, s: &str) -> Result<Word> {
    let s = s.trim();
    if s == "1" {
        return Ok(Word::empty(rank));
    }
    let mut letters = Vec::new();
    for token in s.split_whitespace() {
        let (body, inverse) = match token.strip_suffix("^-1") {
            Some(body) => (body, true),
            None => (token, false),
        };
        let index: usize = body
            .strip_prefix('a')
            .and_then(|digits| digits.parse().ok())
            .ok_or_else(|| Error::Parse(format!("invalid word token {token:?}")))?;
        letters.push(Letter { index, inverse });
    }
    Word::from_letters(rank, letters)
}

/// An automorphism sending α_i ↦ q_i α_i q_i⁻¹.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugatorAction {
    rank: usize,
    conjugators: Vec<Word>,
}

impl ConjugatorAction {
    pub fn new(conjugators: Vec<Word>) -> Result<ConjugatorAction> {
        let rank = conjugators.len();
        for q in &conjugators {
            if q.rank() != rank {
                return Err(Error::RankMismatch(rank, q.rank()));
            }
        }
        Ok(ConjugatorAction { rank, conjugators })
    }

    pub fn identity(rank: usize) -> ConjugatorAction {
        ConjugatorAction { rank, conjugators: vec![Word::empty(rank); rank] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn conjugators(&self) -> &[Word] {
        &self.conjugators
    }

    pub fn conjugator(&self, i: usize) -> &Word {
        &self.conjugators[i - 1]
    }

    /// The image q_i α_i q_i⁻¹ of the generator α_i.
    pub fn image(&self, i: usize) -> Word {
        let alpha = Word::generator(self.rank, i).expect("index validated");
        alpha.conj(&self.conjugators[i - 1]).expect("equal ranks")
    }

    pub fn is_identity(&self) -> bool {
        self.conjugators.iter().enumerate().all(|(i, q)| {
            // q = α_i^k conjugates α_i trivially.
            q.is_empty() || q.letters().iter().all(|l| l.index == i + 1)
        })
    }

    pub fn to_images(&self) -> TupleAutomorphism {
        TupleAutomorphism {
            rank: self.rank,
            images: (1..=self.rank).map(|i| self.image(i)).collect(),
        }
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.to_images().apply(w)
    }
}

/// A general endomorphism-by-images record. Callers assert automorphy only
/// through finite-quotient evaluation, never at the word level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleAutomorphism {
    rank: usize,
    images: Vec<Word>,
}

impl TupleAutomorphism {
    pub fn new(images: Vec<Word>) -> Result<TupleAutomorphism> {
        let rank = images.len();
        for w in &images {
            if w.rank() != rank {
                return Err(Error::RankMismatch(rank, w.rank()));
            }
        }
        Ok(TupleAutomorphism { rank, images })
    }

    pub fn identity(rank: usize) -> TupleAutomorphism {
        TupleAutomorphism {
            rank,
            images: (1..=rank)
                .map(|i| Word::generator(rank, i).expect("in range"))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Word {
        &self.images[i - 1]
    }

    /// Substitute each generator of `w` by its image and reduce.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch(self.rank, w.rank()));
        }
        let mut out = Word::empty(self.rank);
        for letter in w.letters() {
            let image = &self.images[letter.index - 1];
            let factor = if letter.inverse { image.inv() } else { image.clone() };
            out = out.mul(&factor)?;
        }
        Ok(out)
    }

    /// Composition with `self` applied after `other`:
    /// `compose(a, b)(w) = a(b(w))`.
    pub fn compose(&self, other: &TupleAutomorphism) -> Result<TupleAutomorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        let images = other
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(TupleAutomorphism { rank: self.rank, images })
    }

    /// N-fold self-composition; `power(a, 0)` is the identity.
    pub fn power(&self, n: u64) -> TupleAutomorphism {
        let mut out = TupleAutomorphism::identity(self.rank);
        for _ in 0..n {
            out = self.compose(&out).expect("equal ranks");
        }
        out
    }
}

impl From<ConjugatorAction> for TupleAutomorphism {
    fn from(a: ConjugatorAction) -> TupleAutomorphism {
        a.to_images()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(rank: usize, s: &str) -> Word {
        parse_word(rank, s).unwrap()
    }

    #[test]
    fn reduction() {
        assert_eq!(w(2, "a1 a1^-1"), Word::empty(2));
        assert_eq!(w(3, "a1 a2 a2^-1 a3"), w(3, "a1 a3"));
        let reduced = w(3, "a1 a2 a3");
        assert_eq!(
            Word::from_letters(3, reduced.letters().to_vec()).unwrap(),
            reduced
        );
    }

    #[test]
    fn mul_inv_conj() {
        assert_eq!(w(1, "a1").mul(&w(1, "a1^-1")).unwrap(), Word::empty(1));
        assert_eq!(w(2, "a1 a2").inv(), w(2, "a2^-1 a1^-1"));
        assert_eq!(w(3, "a1 a2").mul(&w(3, "a2^-1 a3")).unwrap(), w(3, "a1 a3"));
        assert_eq!(w(2, "a2").conj(&w(2, "a1")).unwrap(), w(2, "a1 a2 a1^-1"));
        assert_eq!(w(2, "a1 a2").conj(&Word::empty(2)).unwrap(), w(2, "a1 a2"));
        assert_eq!(w(1, "a1").conj(&w(1, "a1")).unwrap(), w(1, "a1"));
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        assert!(w(2, "a1").mul(&w(3, "a1")).is_err());
        assert!(Word::generator(2, 3).is_err());
        assert!(parse_word(2, "a3").is_err());
    }

    #[test]
    fn conjugator_action_applies() {
        let identity = ConjugatorAction::identity(3);
        let word = w(3, "a1 a2^-1 a3");
        assert_eq!(identity.apply(&word).unwrap(), word);

        // q1 = a2, all other conjugators trivial.
        let action = ConjugatorAction::new(vec![w(2, "a2"), Word::empty(2)]).unwrap();
        assert_eq!(action.apply(&w(2, "a1")).unwrap(), w(2, "a2 a1 a2^-1"));

        // The (0, p, 1, 2) action: conjugate a1, a2 by a1 a2.
        let q = w(4, "a1 a2");
        let action =
            ConjugatorAction::new(vec![q.clone(), q, Word::empty(4), Word::empty(4)]).unwrap();
        assert_eq!(action.apply(&w(4, "a1")).unwrap(), w(4, "a1 a2 a1 a2^-1 a1^-1"));
    }

    #[test]
    fn compose_with_identity() {
        let q = w(4, "a1 a2");
        let a = ConjugatorAction::new(vec![q.clone(), q, Word::empty(4), Word::empty(4)])
            .unwrap()
            .to_images();
        let id = TupleAutomorphism::identity(4);
        assert_eq!(a.compose(&id).unwrap(), a);
        assert_eq!(id.compose(&a).unwrap(), a);
        assert_eq!(a.power(0), id);
        assert_eq!(a.power(1), a);
    }

    #[test]
    fn compose_order_is_left_after_right() {
        // a: α1 ↦ α2 α1 α2⁻¹; b: α2 ↦ α1 α2 α1⁻¹. Then compose(a, b) applies
        // b first, so α2 ↦ a(α1 α2 α1⁻¹).
        let a = ConjugatorAction::new(vec![w(2, "a2"), Word::empty(2)]).unwrap().to_images();
        let b = ConjugatorAction::new(vec![Word::empty(2), w(2, "a1")]).unwrap().to_images();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.image(2), &a.apply(&w(2, "a1 a2 a1^-1")).unwrap());
    }

    #[test]
    fn word_strings_round_trip() {
        for s in ["1", "a1", "a1 a2^-1 a1", "a3 a3 a1^-1"] {
            assert_eq!(w(3, s).to_string(), s);
        }
    }

    fn letters(max_rank: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(
            (1..=max_rank, any::<bool>())
                .prop_map(|(index, inverse)| Letter { index, inverse }),
            0..24,
        )
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_shortening(ls in letters(4)) {
            let word = Word::from_letters(4, ls.clone()).unwrap();
            prop_assert!(word.len() <= ls.len());
            prop_assert_eq!(&Word::from_letters(4, word.letters().to_vec()).unwrap(), &word);
        }

        #[test]
        fn group_laws(a in letters(4), b in letters(4), c in letters(4)) {
            let a = Word::from_letters(4, a).unwrap();
            let b = Word::from_letters(4, b).unwrap();
            let c = Word::from_letters(4, c).unwrap();
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.inv().inv(), a.clone());
            prop_assert_eq!(a.mul(&a.inv()).unwrap(), Word::empty(4));
        }
    }
}
