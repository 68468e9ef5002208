//! Exact weighted-basket calculus for minimal projective 3-folds of general
//! type.
//!
//! A *basket* is a finite multiset of terminal quotient singularities
//! `(1/r)(1, -1, b)`, recorded as coprime pairs `(b, r)`.  Together with the
//! second plurigenus `P_2` and the Euler characteristic `chi(O)`, a basket
//! determines the canonical volume `K^3` and every plurigenus `P_m` (m >= 2)
//! through Reid's Riemann-Roch formula.  This crate provides:
//!
//! * [`basket`] — the exact types and the Riemann-Roch arithmetic;
//! * [`packing`] — Farey-mediant packing/unpacking and dominance searches;
//! * [`filters`] — geometric-admissibility predicates and volume floors;
//! * [`bounds`] — the iterative inequality cascade producing certified lower
//!   bounds for `xi` and `K^3`, plus closed-form and composite bounds;
//! * [`classifier`] — basket enumeration and data-driven table verification;
//! * [`notation`] — the text notation for baskets and dataset rows.
//!
//! All arithmetic is exact: arbitrary-precision integers and rationals,
//! no floating point anywhere.

pub mod basket;
pub mod bounds;
pub mod classifier;
pub mod filters;
pub mod notation;
pub mod packing;

pub use basket::{Basket, BasketError, BasketPoint, PluriProfile, WeightedBasket};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number used throughout the crate.
pub type Rat = BigRational;

/// Builds an exact rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an exact integer rational.
pub fn int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}
