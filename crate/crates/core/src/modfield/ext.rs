//! Small extension fields GF(p^k), built as F_p[t] modulo a monic
//! irreducible of degree k.
//!
//! Elements are coefficient vectors of length k, constant term first. When
//! no modulus is supplied the field picks the canonical one: candidates are
//! ordered by the integer whose base-p digits are the non-leading
//! coefficients (degree k-1 digit most significant) and the first
//! irreducible wins, so every run and every machine agrees on the
//! representation. For GF(4) that is t^2 + t + 1.

use std::fmt;

use crate::error::{Error, Result};
use crate::modfield::{check_prime, mul_mod};
use crate::poly::Polynomial;

/// Fields larger than this are refused: the dynamics code enumerates all
/// q^n points, so 2^20 elements is already generous.
pub const DEFAULT_FIELD_SIZE_BOUND: u64 = 1 << 20;

/// GF(p^k) with an explicit monic modulus of degree k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    p: u64,
    k: usize,
    /// Length k+1, constant first, `modulus[k] == 1`.
    modulus: Vec<u64>,
}

impl ExtField {
    /// Builds GF(p^k). `modulus` must be monic of degree k and irreducible
    /// over F_p; pass `None` for the canonical choice. Size capped by
    /// [`DEFAULT_FIELD_SIZE_BOUND`].
    pub fn new(p: u64, k: usize, modulus: Option<Vec<u64>>) -> Result<Self> {
        Self::with_bound(p, k, modulus, DEFAULT_FIELD_SIZE_BOUND)
    }

    /// [`ExtField::new`] with an explicit size cap.
    pub fn with_bound(p: u64, k: usize, modulus: Option<Vec<u64>>, bound: u64) -> Result<Self> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be at least 1".into()));
        }
        let size = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if size > bound as u128 {
            return Err(Error::SizeBoundExceeded { size, bound: bound as u128 });
        }
        let modulus = match modulus {
            Some(mut m) => {
                if m.len() != k + 1 {
                    return Err(Error::InvalidInput(format!(
                        "modulus must have degree {k} (got {} coefficients, expected {})",
                        m.len(),
                        k + 1
                    )));
                }
                for c in m.iter_mut() {
                    *c %= p;
                }
                if m[k] != 1 {
                    return Err(Error::InvalidInput("modulus must be monic".into()));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::ReduciblePolynomial(p));
                }
                m
            }
            None => canonical_irreducible(p, k),
        };
        Ok(Self { p, k, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Modulus coefficients, constant first, length k+1.
    pub fn modulus_coeffs(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of field elements, p^k.
    pub fn size(&self) -> u64 {
        (0..self.k).fold(1u64, |acc, _| acc * self.p)
    }

    /// Element from coefficients (constant first). Shorter vectors are
    /// zero-padded; longer ones are rejected rather than reduced.
    pub fn element(&self, coeffs: Vec<u64>) -> Result<ExtElement> {
        if coeffs.len() > self.k {
            return Err(Error::InvalidInput(format!(
                "element needs at most {} coefficients, got {}",
                self.k,
                coeffs.len()
            )));
        }
        let mut c: Vec<u64> = coeffs.into_iter().map(|v| v % self.p).collect();
        c.resize(self.k, 0);
        Ok(ExtElement { coeffs: c, field: self.clone() })
    }

    pub fn zero(&self) -> ExtElement {
        ExtElement { coeffs: vec![0; self.k], field: self.clone() }
    }

    pub fn one(&self) -> ExtElement {
        let mut coeffs = vec![0; self.k];
        coeffs[0] = 1;
        ExtElement { coeffs, field: self.clone() }
    }

    /// The residue class of t. For k = 1 this is a base-field constant.
    pub fn generator(&self) -> ExtElement {
        if self.k == 1 {
            // t ≡ -modulus[0]
            let mut coeffs = vec![0; 1];
            coeffs[0] = (self.p - self.modulus[0] % self.p) % self.p;
            return ExtElement { coeffs, field: self.clone() };
        }
        let mut coeffs = vec![0; self.k];
        coeffs[1] = 1;
        ExtElement { coeffs, field: self.clone() }
    }

    /// Enumeration index of an element: its coefficients read as base-p
    /// digits, constant term least significant.
    pub fn value(&self, e: &ExtElement) -> Result<u64> {
        self.check_same(e)?;
        Ok(e.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c))
    }

    /// Inverse of [`ExtField::value`].
    pub fn from_value(&self, v: u64) -> Result<ExtElement> {
        if v >= self.size() {
            return Err(Error::IndexOutOfRange { index: v, size: self.size() });
        }
        let mut coeffs = vec![0u64; self.k];
        let mut v = v;
        for c in coeffs.iter_mut() {
            *c = v % self.p;
            v /= self.p;
        }
        Ok(ExtElement { coeffs, field: self.clone() })
    }

    pub fn add(&self, a: &ExtElement, b: &ExtElement) -> Result<ExtElement> {
        self.check_same(a)?;
        self.check_same(b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        Ok(ExtElement { coeffs, field: self.clone() })
    }

    pub fn sub(&self, a: &ExtElement, b: &ExtElement) -> Result<ExtElement> {
        self.check_same(a)?;
        self.check_same(b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        Ok(ExtElement { coeffs, field: self.clone() })
    }

    pub fn mul(&self, a: &ExtElement, b: &ExtElement) -> Result<ExtElement> {
        self.check_same(a)?;
        self.check_same(b)?;
        Ok(ExtElement { coeffs: self.mul_raw(&a.coeffs, &b.coeffs), field: self.clone() })
    }

    pub fn pow(&self, a: &ExtElement, e: u64) -> Result<ExtElement> {
        self.check_same(a)?;
        let mut acc = self.one().coeffs;
        let mut base = a.coeffs.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_raw(&base, &base);
            }
        }
        Ok(ExtElement { coeffs: acc, field: self.clone() })
    }

    /// Evaluates an integer polynomial at a point with extension-field
    /// coordinates; integer coefficients embed through reduction mod p.
    pub fn eval_poly(&self, f: &Polynomial, point: &[ExtElement]) -> Result<ExtElement> {
        if point.len() != f.num_vars() {
            return Err(Error::DimensionMismatch { expected: f.num_vars(), got: point.len() });
        }
        for c in point {
            self.check_same(c)?;
        }
        let mut acc = self.zero().coeffs;
        for term in f.terms() {
            let c = term.coefficient.rem_euclid(self.p as i64) as u64;
            let mut v = self.one().coeffs;
            v[0] = c;
            for (coord, &e) in point.iter().zip(&term.exponents) {
                if v.iter().all(|&x| x == 0) {
                    break;
                }
                let powed = self.pow(coord, e as u64)?;
                v = self.mul_raw(&v, &powed.coeffs);
            }
            for (a, b) in acc.iter_mut().zip(&v) {
                *a = (*a + b) % self.p;
            }
        }
        Ok(ExtElement { coeffs: acc, field: self.clone() })
    }

    /// Schoolbook product followed by reduction; fine at these sizes.
    fn mul_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut prod = vec![0u64; 2 * self.k.max(1) - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        // Reduce degree ≥ k terms with t^k = -(modulus - t^k).
        for d in (self.k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for j in 0..self.k {
                let m = self.modulus[j];
                if m == 0 {
                    continue;
                }
                let sub = mul_mod(c, m, p);
                prod[d - self.k + j] = (prod[d - self.k + j] + p - sub) % p;
            }
        }
        prod.truncate(self.k);
        prod
    }

    fn check_same(&self, e: &ExtElement) -> Result<()> {
        if e.field == *self {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }
}

impl fmt::Display for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}^{}) with modulus {}",
            self.p,
            self.k,
            poly_in_t(&self.modulus)
        )
    }
}

/// An element of a specific [`ExtField`]. Carries its field so mixed-field
/// arithmetic is caught at run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElement {
    coeffs: Vec<u64>,
    field: ExtField,
}

impl ExtElement {
    /// Coefficients on 1, t, .., t^(k-1).
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&poly_in_t(&self.coeffs))
    }
}

/// Prints a coefficient vector (constant first) as a polynomial in t,
/// highest degree first: "t^2+t+1", "2t+1", "0".
fn poly_in_t(coeffs: &[u64]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (d, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let part = match (d, c) {
            (0, _) => c.to_string(),
            (1, 1) => "t".into(),
            (1, _) => format!("{c}t"),
            (_, 1) => format!("t^{d}"),
            (_, _) => format!("{c}t^{d}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Remainder of `a` modulo monic `b` over F_p; both constant-first.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let mut r: Vec<u64> = a.to_vec();
    while r.len() > db {
        let lead = *r.last().unwrap();
        let d = r.len() - 1;
        if lead != 0 {
            for j in 0..db {
                let sub = mul_mod(lead, b[j], p);
                r[d - db + j] = (r[d - db + j] + p - sub) % p;
            }
        }
        r.pop();
    }
    while r.len() > 1 && *r.last().unwrap() == 0 {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree 1..=k/2.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    for d in 1..=k / 2 {
        let count = (p as u128).pow(d as u32);
        for v in 0..count {
            let mut div = vec![0u64; d + 1];
            let mut v = v;
            for c in div.iter_mut().take(d) {
                *c = (v % p as u128) as u64;
                v /= p as u128;
            }
            div[d] = 1;
            let r = poly_rem(m, &div, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

/// First irreducible monic of degree k in the canonical candidate order.
fn canonical_irreducible(p: u64, k: usize) -> Vec<u64> {
    let count = (p as u128).pow(k as u32);
    for v in 0..count {
        let mut m = vec![0u64; k + 1];
        let mut v = v;
        for c in m.iter_mut().take(k) {
            *c = (v % p as u128) as u64;
            v /= p as u128;
        }
        m[k] = 1;
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("an irreducible of every degree exists over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    #[test]
    fn gf4_canonical_modulus_and_arithmetic() {
        let f = ExtField::new(2, 2, None).unwrap();
        assert_eq!(f.modulus_coeffs(), &[1, 1, 1]); // t^2 + t + 1
        assert_eq!(f.size(), 4);
        let w = f.generator();
        let w2 = f.mul(&w, &w).unwrap();
        assert_eq!(w2.coeffs(), &[1, 1]); // ω^2 = ω + 1
        assert!(f.add(&w, &w).unwrap().is_zero()); // characteristic 2
        let w3 = f.mul(&w2, &w).unwrap();
        assert_eq!(w3, f.one()); // ω^3 = 1
    }

    #[test]
    fn gf4_poly_evaluation() {
        let f = ExtField::new(2, 2, None).unwrap();
        let v = parse("x^2*y + x*y^2", 2).unwrap();
        let w = f.generator();
        // v(1, ω) = ω + ω^2 = 1 in GF(4).
        let out = f.eval_poly(&v, &[f.one(), w]).unwrap();
        assert_eq!(out, f.one());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 + 1 = (t+1)^2 over F_2.
        let err = ExtField::new(2, 2, Some(vec![1, 0, 1]));
        assert!(matches!(err, Err(Error::ReduciblePolynomial(2))));
        // t^2 - 1 over F_3 factors too.
        let err = ExtField::new(3, 2, Some(vec![2, 0, 1]));
        assert!(matches!(err, Err(Error::ReduciblePolynomial(3))));
    }

    #[test]
    fn degree_one_field_is_prime_field() {
        let f = ExtField::new(3, 1, None).unwrap();
        assert_eq!(f.modulus_coeffs(), &[0, 1]); // canonical modulus t
        assert_eq!(f.size(), 3);
        let two = f.element(vec![2]).unwrap();
        assert_eq!(f.mul(&two, &two).unwrap(), f.one());
    }

    #[test]
    fn non_monic_and_wrong_degree_rejected() {
        assert!(matches!(
            ExtField::new(2, 2, Some(vec![1, 1, 0])),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            ExtField::new(2, 2, Some(vec![1, 1])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn size_bound_and_primality_enforced() {
        assert!(matches!(
            ExtField::new(2, 21, None),
            Err(Error::SizeBoundExceeded { .. })
        ));
        assert!(matches!(
            ExtField::new(6, 2, None),
            Err(Error::NonPrimeModulus(6))
        ));
    }

    #[test]
    fn field_mismatch_detected() {
        let f1 = ExtField::new(2, 2, None).unwrap();
        let f2 = ExtField::new(3, 2, None).unwrap();
        let a = f1.one();
        let b = f2.one();
        assert!(matches!(f1.add(&a, &b), Err(Error::FieldMismatch)));
    }

    #[test]
    fn value_round_trip_and_group_order() {
        let f = ExtField::new(3, 2, None).unwrap();
        assert_eq!(f.size(), 9);
        for v in 0..9 {
            let e = f.from_value(v).unwrap();
            assert_eq!(f.value(&e).unwrap(), v);
        }
        // Every nonzero element has order dividing 8.
        for v in 1..9 {
            let e = f.from_value(v).unwrap();
            assert_eq!(f.pow(&e, 8).unwrap(), f.one());
        }
        assert!(matches!(
            f.from_value(9),
            Err(Error::IndexOutOfRange { index: 9, size: 9 })
        ));
    }

    #[test]
    fn display_forms() {
        let f = ExtField::new(2, 2, None).unwrap();
        assert_eq!(f.to_string(), "GF(2^2) with modulus t^2+t+1");
        assert_eq!(f.zero().to_string(), "0");
        assert_eq!(f.one().to_string(), "1");
        assert_eq!(f.generator().to_string(), "t");
        let w2 = f.mul(&f.generator(), &f.generator()).unwrap();
        assert_eq!(w2.to_string(), "t+1");
    }

    #[test]
    fn gf8_has_seven_element_multiplicative_group() {
        let f = ExtField::new(2, 3, None).unwrap();
        // Canonical cubic irreducible over F_2 is t^3 + t + 1.
        assert_eq!(f.modulus_coeffs(), &[1, 1, 0, 1]);
        let g = f.generator();
        let mut seen = vec![f.one()];
        let mut cur = f.one();
        loop {
            cur = f.mul(&cur, &g).unwrap();
            if cur == f.one() {
                break;
            }
            seen.push(cur.clone());
        }
        assert_eq!(seen.len(), 7); // t generates GF(8)^*
    }
}
