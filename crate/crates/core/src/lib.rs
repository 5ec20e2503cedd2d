//! Finite-depth construction and verification toolkit for digit-restriction
//! fractal sets, their j-fold sumsets `A_j`, the midpoint-convex unions
//! `E = ∪ A_j / j`, and dyadic measures supported on them.
//!
//! Everything is exact: cell indices are integers, masses are dyadic
//! rationals, and every dimension-type inequality is decided by comparing
//! integer powers.

pub mod error;
pub mod exact;
pub mod positions;

pub mod convexity;
pub mod dimension;
pub mod dyadic;
pub mod measures;
pub mod schedule;
pub mod sumset;
pub mod suite;

mod bits;

pub use error::{Budget, Error, Result};
pub use exact::{Dyadic, Q};
pub use positions::PositionSet;

pub use dyadic::{
    CellCover, DigitSpec, DigitString, DyadicCell, Exactness, RuleUnion, SpecBlock, ZeroForcedRule,
};
