//! Exact arbitrary-precision rational arithmetic: p-adic valuations and
//! Chinese-remainder combination.
//!
//! Everything here is over [`BigRational`] / [`BigInt`]. There is no
//! fixed-width fast path: thicknesses enter exponents, so the numbers
//! involved outgrow 64 bits almost immediately.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Deterministic primality test by trial division. Primes in this crate
/// are residue characteristics; they stay small enough that anything
/// fancier would be noise.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The exponent of the prime `p` in the nonzero rational `q` (negative for
/// denominators). Zero is rejected: a silent infinite valuation would
/// corrupt every tree construction downstream, so callers must handle
/// coincident points themselves.
pub fn val_p(q: &BigRational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let p = BigInt::from(p);
    Ok(int_val(q.numer(), &p) - int_val(q.denom(), &p))
}

fn int_val(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0i64;
    loop {
        let (quot, rem) = n.div_rem(p);
        if !rem.is_zero() {
            return v;
        }
        n = quot;
        v += 1;
    }
}

/// Solve a system of congruences `x ≡ rᵢ (mod mᵢ)` with pairwise coprime
/// positive moduli. Returns the unique representative in `[0, ∏ mᵢ)`.
pub fn crt(pairs: &[(BigInt, BigInt)]) -> Result<BigInt> {
    if pairs.is_empty() {
        return Err(Error::EmptyCrt);
    }
    for (_, m) in pairs {
        if !m.is_positive() {
            return Err(Error::NonPositiveModulus(m.to_string()));
        }
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let g = pairs[i].1.gcd(&pairs[j].1);
            if !g.is_one() {
                return Err(Error::NonCoprimeModuli(
                    pairs[i].1.to_string(),
                    pairs[j].1.to_string(),
                ));
            }
        }
    }
    let mut x = pairs[0].0.mod_floor(&pairs[0].1);
    let mut modulus = pairs[0].1.clone();
    for (r, m) in &pairs[1..] {
        // x + modulus * t ≡ r (mod m), so t ≡ (r - x) / modulus (mod m).
        let inv = mod_inverse(&modulus, m).expect("moduli checked coprime");
        let t = ((r - &x) * inv).mod_floor(m);
        x += &modulus * t;
        modulus *= m;
    }
    Ok(x.mod_floor(&modulus))
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm; `None`
/// when `gcd(a, m) ≠ 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (mut old_r, mut r) = (a.mod_floor(m), m.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let tmp_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp_r);
        let tmp_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, tmp_s);
    }
    if old_r.is_one() {
        Some(old_s.mod_floor(m))
    } else {
        None
    }
}

/// Render a rational as `"n/d"`, or `"n"` when the denominator is 1. The
/// sign sits on the numerator.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `"n"` or `"n/d"` with an optional leading sign on the numerator.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}
