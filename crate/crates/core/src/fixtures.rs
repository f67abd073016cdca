//! Reference polynomials shipped with the crate.

use crate::error::Result;
use crate::poly::MultiPoly;

/// Printed form of the degree-16 component for discriminant 12.
pub const H12_TEXT: &str = include_str!("../fixtures/h12.txt");

pub fn h12() -> Result<MultiPoly> {
    MultiPoly::parse(H12_TEXT)
}
