//! Exhaustive dynamics of three integer polynomial maps — an additive,
//! a multiplicative and a power "trap" — reduced modulo primes.
//!
//! The additive trap `(x, y) -> (x^2*y, x^2*y + x*y^2)` shifts the ratio
//! y/x by one, so mod p every point falls into (0,0) after at most p steps.
//! The multiplicative trap doubles the ratio and traps exactly the points
//! whose ratio lies in the subgroup generated by 2; the power trap squares
//! it and traps the ratios of two-power order. This crate provides:
//!
//! - [`poly`]: exact sparse polynomials, parsing/printing, the builtin maps;
//! - [`modfield`]: prime-field number theory and small extensions GF(p^k);
//! - [`dynamics`]: orbits, full functional graphs, nilpotency indices;
//! - [`traps`]: per-prime verification reports for the three claims;
//! - [`search`]: a bounded enumeration looking for a degree-lowering
//!   "sorting" map, the open question the power trap suggests.

pub mod dynamics;
pub mod error;
pub mod modfield;
pub mod poly;
pub mod search;
pub mod traps;

pub use error::{Error, Result};
pub use poly::{builtin, BuiltinMap, Point, PolyMap, Polynomial};
