//! Exact computation of Humbert surface components in Rosenhain invariants.
//!
//! The pipeline expands the even theta constants on a Humbert surface as
//! power series in two variables, forms the Rosenhain triple, and finds the
//! polynomial relation among its three coordinates by exact linear algebra.
//! S6 orbits and stabilizers of the result, the degree formulas, and a
//! floating-point oracle are provided alongside.
//!
//! ```
//! use humbert::relation::{find_relation, FindOptions};
//!
//! let report = find_relation(4, 2, &FindOptions::default()).unwrap();
//! assert_eq!(report.polynomial.unwrap().print(), "e_1*e_2 - e_3");
//! ```

pub mod cli;
pub mod degrees;
pub mod error;
pub mod fixtures;
pub mod numeric;
pub mod poly;
pub mod relation;
pub mod rosenhain;
pub mod s6;
pub mod series;
pub mod theta;

pub use error::{Error, Result};
pub use poly::MultiPoly;
pub use rosenhain::{rosenhain_triple, RosenhainSeries};
pub use series::TruncatedSeries;
pub use theta::{humbert_params, Discriminant, ThetaChar};
