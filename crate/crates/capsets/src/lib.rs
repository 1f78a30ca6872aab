//! Capsets in F_3^n defined by algebraic equations over extensions of F_3.
//!
//! A capset is a subset of F_3^n with no three distinct points on a line,
//! equivalently no three distinct points summing to zero; it is complete if
//! no strictly larger capset contains it. This crate provides:
//!
//! - [`field`]: exact arithmetic in F_{3^m} with quadratic character,
//!   Frobenius, square roots and subfield embedding;
//! - [`trivec`]: packed points of F_3^n, the flattening of F_q^d onto
//!   F_3^(dm), and the capset text format;
//! - [`verify`]: certified capset/completeness checks with explicit,
//!   re-checkable witnesses;
//! - [`construct`]: the two-parabola capsets, complete capsets of size
//!   O(sqrt(3^n)) for every n, and the elliptic quadric;
//! - [`parabolas`]: multi-parabola coefficient families, the character
//!   condition on coefficient triples, and triple-class counting;
//! - [`search`]: exhaustive, random and Frobenius-orbit searches for large
//!   parabola families.

pub mod construct;
pub mod error;
pub mod field;
pub mod parabolas;
pub mod search;
mod ternary;
pub mod trivec;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldParams, SubfieldEmbedding};
pub use trivec::{CapSet, Point};
