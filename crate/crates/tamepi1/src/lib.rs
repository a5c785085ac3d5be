//! Exact computation of the tame Galois action on prime-to-p fundamental
//! groups of punctured projective lines over strictly henselian fields.
//!
//! Given marked rational points on the projective line and a residue
//! characteristic p, this crate builds the stable marked reduction tree
//! (a cluster picture with edge thicknesses), turns it into an explicit
//! free-group automorphism describing how the canonical tame generator
//! acts on a bouquet of loops, and evaluates that action in finite
//! permutation groups to obtain field-of-moduli ramification indices and
//! vertical inertia generators of branched Galois covers. Going the other
//! way, it synthesizes rational branch loci realizing prescribed reduction
//! trees at several primes at once by digit expansions and the Chinese
//! remainder theorem.
//!
//! All arithmetic is exact (arbitrary-precision rationals); no floating
//! point is used anywhere.
//!
//! The modules mirror the pipeline:
//!
//! - [`arith`]: p-adic valuations and CRT over exact rationals
//! - [`words`]: freely reduced words and free-group automorphisms
//! - [`tree`]: stable marked reduction trees of point configurations
//! - [`action`]: the tame generator's action and fundamental-group
//!   presentations
//! - [`groups`]: brute-force finite permutation group engine
//! - [`moduli`]: ramification indices and vertical inertia of covers
//! - [`synthesis`]: rational points realizing prescribed local data
//! - [`cli`]: the command-line interface

pub mod action;
pub mod arith;
pub mod cli;
pub mod groups;
pub mod moduli;
pub mod synthesis;
pub mod tree;
pub mod words;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("valuation of zero is infinite")]
    ValuationOfZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("crt requires a nonempty sequence of congruences")]
    EmptyCrt,
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(String, String),
    #[error("modulus {0} is not positive")]
    NonPositiveModulus(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("points must be pairwise distinct: {0}")]
    CoincidentPoints(String),
    #[error("stable marked reduction requires at least 3 marks")]
    TooFewMarks,
    #[error("normalization does not separate the marks into 3 residue directions")]
    BadNormalization,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid local data: {0}")]
    InvalidLocalData(String),
    #[error("permutation degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("group enumeration cap {cap} exceeded ({found} elements found so far)")]
    EnumerationCap { cap: usize, found: usize },
    #[error("tuple product is not the identity")]
    TupleProductNotOne,
    #[error("tuple entries do not generate the group")]
    TupleDoesNotGenerate,
    #[error("image tuple failed revalidation; the action is not an automorphism of the quotient")]
    NotAnAutomorphism,
    #[error(
        "no exponent up to exp(Inn(G)) = {bound} returns the tuple to its uniform conjugacy class; this bound is guaranteed, so the action code is broken"
    )]
    RamificationBoundViolation { bound: u64 },
    #[error("tuple not defined over K: the cover does not descend, so it has no vertical inertia generator")]
    NotDefinedOverK,
    #[error("prime {p} divides the group order {order}")]
    PrimeDividesOrder { p: u64, order: usize },
    #[error("no valid local-data shape for r = {r} marks at p = {p}")]
    NoLocalDataShape { r: usize, p: u64 },
    #[error("{0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
