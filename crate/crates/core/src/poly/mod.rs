//! Sparse multivariate integer polynomials and polynomial maps.
//!
//! Polynomials are kept exact over Z (the maps live over the integers);
//! reduction modulo a prime happens only at evaluation time. Canonical form:
//! terms sorted by descending graded-lexicographic order on exponent
//! vectors, no duplicate exponent vectors, no zero coefficients. The zero
//! polynomial has an empty term list and degree 0 by convention.

mod parse;

pub use parse::{parse, parse_with_limit};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modfield::mul_mod;

/// Default bound on coefficient magnitude: 2^31 - 1.
pub const DEFAULT_COEFF_LIMIT: i64 = i32::MAX as i64;

/// One term: an exponent vector and a nonzero integer coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    /// One exponent per ambient variable.
    pub exponents: Vec<u32>,
    /// Exact signed coefficient, nonzero in canonical form.
    pub coefficient: i64,
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Graded-lexicographic comparison: total degree first, then lexicographic
/// on the exponent vector.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Sparse multivariate polynomial in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    num_vars: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    /// Builds the canonical form from arbitrary `(exponents, coefficient)`
    /// pairs: like terms are combined, zero coefficients dropped, and the
    /// result sorted by descending graded-lex order. Coefficients (including
    /// combined ones) must stay within `limit` in magnitude.
    pub fn new_with_limit(
        num_vars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, i64)>,
        limit: i64,
    ) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidInput(
                "polynomial needs at least one variable".into(),
            ));
        }
        let mut collected: Vec<Monomial> = Vec::new();
        for (exponents, coefficient) in terms {
            if exponents.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    got: exponents.len(),
                });
            }
            check_coeff(coefficient, limit)?;
            collected.push(Monomial {
                exponents,
                coefficient,
            });
        }
        collected.sort_by(|a, b| grlex_cmp(&b.exponents, &a.exponents));
        let mut canonical: Vec<Monomial> = Vec::with_capacity(collected.len());
        for term in collected {
            match canonical.last_mut() {
                Some(last) if last.exponents == term.exponents => {
                    let sum = last
                        .coefficient
                        .checked_add(term.coefficient)
                        .ok_or(Error::CoefficientOverflow { limit })?;
                    check_coeff(sum, limit)?;
                    last.coefficient = sum;
                    if last.coefficient == 0 {
                        canonical.pop();
                    }
                }
                _ => {
                    if term.coefficient != 0 {
                        canonical.push(term);
                    }
                }
            }
        }
        Ok(Self {
            num_vars,
            terms: canonical,
        })
    }

    /// [`Polynomial::new_with_limit`] with the default coefficient bound.
    pub fn new(num_vars: usize, terms: impl IntoIterator<Item = (Vec<u32>, i64)>) -> Result<Self> {
        Self::new_with_limit(num_vars, terms, DEFAULT_COEFF_LIMIT)
    }

    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Canonical terms, descending graded-lex.
    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial by convention.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// True iff every term shares one total degree (vacuously true for 0).
    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some(first) => {
                let d = first.total_degree();
                self.terms.iter().all(|t| t.total_degree() == d)
            }
        }
    }

    /// Exact sum, coefficients checked against `limit`.
    pub fn checked_add(&self, other: &Self, limit: i64) -> Result<Self> {
        self.dims_match(other)?;
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|t| (t.exponents.clone(), t.coefficient));
        Self::new_with_limit(self.num_vars, terms, limit)
    }

    /// Exact product, coefficients checked against `limit`.
    pub fn checked_mul(&self, other: &Self, limit: i64) -> Result<Self> {
        self.dims_match(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let exps: Vec<u32> = a
                    .exponents
                    .iter()
                    .zip(&b.exponents)
                    .map(|(&x, &y)| x.checked_add(y))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::InvalidInput("exponent overflow".into()))?;
                let coeff = a
                    .coefficient
                    .checked_mul(b.coefficient)
                    .ok_or(Error::CoefficientOverflow { limit })?;
                terms.push((exps, coeff));
            }
        }
        Self::new_with_limit(self.num_vars, terms, limit)
    }

    pub fn checked_neg(&self, limit: i64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| (t.exponents.clone(), -t.coefficient));
        Self::new_with_limit(self.num_vars, terms, limit)
    }

    /// `self^e` by square-and-multiply over exact polynomial arithmetic.
    pub fn checked_pow(&self, e: u32, limit: i64) -> Result<Self> {
        let one = Self::new_with_limit(self.num_vars, [(vec![0; self.num_vars], 1)], limit)?;
        let mut acc = one;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base, limit)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base, limit)?;
            }
        }
        Ok(acc)
    }

    /// Value of the polynomial at `point`, fully reduced into `[0, p)`.
    /// The point's modulus is trusted to be prime by the caller.
    pub fn evaluate_mod(&self, point: &Point) -> Result<u64> {
        if point.coords.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: point.coords.len(),
            });
        }
        let p = point.modulus;
        let mut acc = 0u64;
        for term in &self.terms {
            let mut v = term.coefficient.rem_euclid(p as i64) as u64;
            for (&c, &e) in point.coords.iter().zip(&term.exponents) {
                if v == 0 {
                    break;
                }
                v = mul_mod(v, pow_mod_small(c, e, p), p);
            }
            acc = (acc + v) % p;
        }
        Ok(acc)
    }

    /// Exact integer evaluation over Z in 128-bit arithmetic.
    pub fn evaluate_int(&self, point: &[i64]) -> Result<i128> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        let mut acc: i128 = 0;
        for term in &self.terms {
            let mut v: i128 = term.coefficient as i128;
            for (&c, &e) in point.iter().zip(&term.exponents) {
                for _ in 0..e {
                    v = v.checked_mul(c as i128).ok_or(Error::ExactRangeExceeded)?;
                }
            }
            acc = acc.checked_add(v).ok_or(Error::ExactRangeExceeded)?;
        }
        Ok(acc)
    }

    fn dims_match(&self, other: &Self) -> Result<()> {
        if self.num_vars == other.num_vars {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            })
        }
    }
}

fn check_coeff(c: i64, limit: i64) -> Result<()> {
    if c.checked_abs().is_none_or(|a| a > limit) {
        Err(Error::CoefficientOverflow { limit })
    } else {
        Ok(())
    }
}

/// `base^e mod p` for small exponents in the evaluation hot path.
fn pow_mod_small(base: u64, e: u32, p: u64) -> u64 {
    let mut acc = 1 % p;
    let mut b = base % p;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Variable display name: `x, y` for up to two variables, `x1..xn` beyond.
fn var_name(index: usize, num_vars: usize) -> String {
    if num_vars <= 2 {
        if index == 0 { "x".into() } else { "y".into() }
    } else {
        format!("x{}", index + 1)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let c = term.coefficient;
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.unsigned_abs();
            let mut factors: Vec<String> = Vec::new();
            if mag != 1 || term.total_degree() == 0 {
                factors.push(mag.to_string());
            }
            for (j, &e) in term.exponents.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(var_name(j, self.num_vars)),
                    _ => factors.push(format!("{}^{}", var_name(j, self.num_vars), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An n-tuple of polynomials in n variables; the object being iterated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    num_vars: usize,
    components: Vec<Polynomial>,
    name: Option<String>,
}

impl PolyMap {
    pub fn new(components: Vec<Polynomial>, name: Option<String>) -> Result<Self> {
        let num_vars = components.len();
        if num_vars == 0 {
            return Err(Error::InvalidInput("map needs at least one component".into()));
        }
        for c in &components {
            if c.num_vars() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    got: c.num_vars(),
                });
            }
        }
        Ok(Self {
            num_vars,
            components,
            name,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Display name: the label if present, else the printed tuple.
    pub fn display_name(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => self.to_string(),
        }
    }

    /// Componentwise [`Polynomial::evaluate_mod`]; the output keeps the
    /// input's modulus.
    pub fn evaluate(&self, point: &Point) -> Result<Point> {
        let coords = self
            .components
            .iter()
            .map(|c| c.evaluate_mod(point))
            .collect::<Result<Vec<u64>>>()?;
        Ok(Point {
            coords,
            modulus: point.modulus,
        })
    }

    /// Exact integer image of an integer point.
    pub fn evaluate_int(&self, point: &[i64]) -> Result<Vec<i128>> {
        self.components
            .iter()
            .map(|c| c.evaluate_int(point))
            .collect()
    }

    /// True iff every component is homogeneous and all nonzero components
    /// share one total degree. Zero components are homogeneous of every
    /// degree and never spoil the check.
    pub fn is_homogeneous(&self) -> bool {
        if !self.components.iter().all(Polynomial::is_homogeneous) {
            return false;
        }
        let mut shared: Option<u32> = None;
        for c in &self.components {
            if c.is_zero() {
                continue;
            }
            match shared {
                None => shared = Some(c.degree()),
                Some(d) if d == c.degree() => {}
                Some(_) => return false,
            }
        }
        true
    }

    /// Common total degree of a homogeneous map (0 for the zero map).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        if !self.is_homogeneous() {
            return None;
        }
        Some(
            self.components
                .iter()
                .filter(|c| !c.is_zero())
                .map(Polynomial::degree)
                .next()
                .unwrap_or(0),
        )
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for PolyMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.components.iter())
    }
}

/// A point of `F_p^n` with fully reduced coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<u64>,
    modulus: u64,
}

impl Point {
    /// Reduces every coordinate into `[0, p)`.
    pub fn new(coords: Vec<u64>, modulus: u64) -> Self {
        debug_assert!(modulus >= 1);
        let coords = coords.into_iter().map(|c| c % modulus).collect();
        Self { coords, modulus }
    }

    pub fn origin(num_vars: usize, modulus: u64) -> Self {
        Self {
            coords: vec![0; num_vars],
            modulus,
        }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The three builtin trap maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinMap {
    AdditiveTrap,
    MultiplicativeTrap,
    PowerTrap,
}

impl BuiltinMap {
    pub const ALL: [BuiltinMap; 3] = [
        BuiltinMap::AdditiveTrap,
        BuiltinMap::MultiplicativeTrap,
        BuiltinMap::PowerTrap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinMap::AdditiveTrap => "additive_trap",
            BuiltinMap::MultiplicativeTrap => "multiplicative_trap",
            BuiltinMap::PowerTrap => "power_trap",
        }
    }

    /// The exact map, expanded to canonical form:
    /// additive `(x^2*y, x^2*y + x*y^2)`,
    /// multiplicative `(x^2*y*(x-y), 2*x*y^2*(x-y))`,
    /// power `(x^3*y*(x-y), x*y^3*(x-y))`.
    pub fn map(self) -> PolyMap {
        let (u, v) = match self {
            BuiltinMap::AdditiveTrap => ("x^2*y", "x^2*y + x*y^2"),
            BuiltinMap::MultiplicativeTrap => ("x^2*y*(x - y)", "2*x*y^2*(x - y)"),
            BuiltinMap::PowerTrap => ("x^3*y*(x - y)", "x*y^3*(x - y)"),
        };
        let components = vec![
            parse(u, 2).expect("builtin component parses"),
            parse(v, 2).expect("builtin component parses"),
        ];
        PolyMap::new(components, Some(self.name().to_string())).expect("builtin map is square")
    }
}

impl FromStr for BuiltinMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive_trap" | "at" => Ok(BuiltinMap::AdditiveTrap),
            "multiplicative_trap" | "mt" => Ok(BuiltinMap::MultiplicativeTrap),
            "power_trap" | "pt" => Ok(BuiltinMap::PowerTrap),
            other => Err(Error::UnknownBuiltin(other.to_string())),
        }
    }
}

impl fmt::Display for BuiltinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Looks up a builtin map by name.
pub fn builtin(name: &str) -> Result<PolyMap> {
    Ok(name.parse::<BuiltinMap>()?.map())
}
