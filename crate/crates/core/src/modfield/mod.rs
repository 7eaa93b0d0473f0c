//! Modular number theory over prime fields, plus small extension fields GF(p^k).
//!
//! Everything here is exact integer arithmetic. Primes in scope are small
//! (field sizes up to about 2^20 by default), so primality testing and the
//! factorization of p-1 are done by plain trial division.

mod ext;

pub use ext::{ExtElement, ExtField, DEFAULT_FIELD_SIZE_BOUND};

use crate::error::{Error, Result};

/// Deterministic primality test by trial division up to sqrt(n).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Rejects non-prime moduli with [`Error::NonPrimeModulus`].
pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NonPrimeModulus(p))
    }
}

/// `a * b mod m` without overflow for any `u64` modulus.
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `a^e mod m` by square-and-multiply. Uses the convention `0^0 = 1`.
///
/// The modulus is not required to be prime; callers that quantify over
/// primes perform their own [`check_prime`].
pub fn mod_pow(a: u64, e: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    if m == 1 {
        return 0;
    }
    let mut base = a % m;
    let mut exp = e;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of `a` modulo `p` via the extended Euclidean
/// algorithm. Fails with [`Error::ZeroInverse`] when `a ≡ 0 (mod p)`
/// (or, for robustness, whenever `gcd(a, p) != 1`).
pub fn mod_inv(a: u64, p: u64) -> Result<u64> {
    let a = a % p;
    if a == 0 {
        return Err(Error::ZeroInverse(p));
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::ZeroInverse(p));
    }
    Ok(t0.rem_euclid(p as i128) as u64)
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// ascending order of prime.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0u32;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of `a` in `(Z/pZ)^*`.
///
/// Computed by factoring `p - 1` and descending through its divisors:
/// start from `m = p - 1` and strip every prime factor q while
/// `a^(m/q) ≡ 1` still holds.
pub fn mult_order(a: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    let a = a % p;
    if a == 0 {
        return Err(Error::ZeroArgument(p));
    }
    let mut m = p - 1;
    for (q, _) in factorize(p - 1) {
        while m.is_multiple_of(q) && mod_pow(a, m / q, p) == 1 {
            m /= q;
        }
    }
    Ok(m)
}

/// True iff `a` generates the whole group `(Z/pZ)^*`.
pub fn is_primitive_root(a: u64, p: u64) -> Result<bool> {
    Ok(mult_order(a, p)? == p - 1)
}

/// True iff `n` is a power of two (including `2^0 = 1`).
pub fn is_two_primary(n: u64) -> bool {
    n >= 1 && n & (n - 1) == 0
}

/// For a Fermat prime `p = 2^k + 1` returns `k >= 1`; otherwise `None`.
pub fn fermat_exponent(p: u64) -> Result<Option<u32>> {
    check_prime(p)?;
    let m = p - 1;
    if m >= 2 && is_two_primary(m) {
        Ok(Some(m.trailing_zeros()))
    } else {
        Ok(None)
    }
}

/// All primes in the inclusive range `[lo, hi]`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}
