//! Gaudry's Rosenhain triple as restricted Fourier expansions.
//!
//! ```text
//! e1 = t1^2 t3^2 / (t2^2 t4^2)
//! e2 = t3^2 t8^2 / (t4^2 t10^2)
//! e3 = t1^2 t8^2 / (t2^2 t10^2)
//! ```
//!
//! `t8` and `t10` both lie in the ideal generated by `p^(1+k) q^(k+l-1)`.
//! Their squares are expanded with enough headroom that, after cancelling
//! the common monomial, the quotient `t8^2 / t10^2` is exact through the
//! working precision.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{SeriesRecord, TruncatedSeries};
use crate::theta::{
    humbert_params, restricted_theta, Discriminant, THETA1, THETA10, THETA2, THETA3, THETA4, THETA8,
};

pub const ROSENHAIN_SCHEMA: &str = "humbert.rosenhain.v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RosenhainSeries {
    pub e1: TruncatedSeries,
    pub e2: TruncatedSeries,
    pub e3: TruncatedSeries,
    pub disc: Discriminant,
    pub precision: u32,
}

impl RosenhainSeries {
    pub fn components(&self) -> [&TruncatedSeries; 3] {
        [&self.e1, &self.e2, &self.e3]
    }

    /// Constant terms 1, integer coefficients, and pairwise distinct,
    /// non-unit series at the working precision.
    pub fn check_invariants(&self) -> bool {
        let one = TruncatedSeries::one(self.precision);
        let es = self.components();
        es.iter()
            .all(|e| e.is_integral() && e.constant_term().is_one())
            && es.iter().all(|e| !(*e - &one).is_zero())
            && !(&self.e1 - &self.e2).is_zero()
            && !(&self.e1 - &self.e3).is_zero()
            && !(&self.e2 - &self.e3).is_zero()
    }

    pub fn to_record(&self) -> RosenhainRecord {
        RosenhainRecord {
            schema: ROSENHAIN_SCHEMA.to_string(),
            delta: self.disc.delta(),
            k: self.disc.k(),
            ell: self.disc.ell(),
            precision: self.precision,
            e1: self.e1.to_record(),
            e2: self.e2.to_record(),
            e3: self.e3.to_record(),
        }
    }

    pub fn from_record(rec: &RosenhainRecord) -> Result<Self> {
        if rec.schema != ROSENHAIN_SCHEMA {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("unexpected rosenhain schema {:?}", rec.schema),
            });
        }
        let disc = humbert_params(rec.delta as i64)?;
        if disc.k() != rec.k || disc.ell() != rec.ell {
            return Err(Error::Parse {
                pos: 0,
                msg: "inconsistent (k, ell) metadata".into(),
            });
        }
        Ok(RosenhainSeries {
            e1: TruncatedSeries::from_record(&rec.e1)?,
            e2: TruncatedSeries::from_record(&rec.e2)?,
            e3: TruncatedSeries::from_record(&rec.e3)?,
            disc,
            precision: rec.precision,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosenhainRecord {
    pub schema: String,
    pub delta: u64,
    pub k: u64,
    pub ell: u64,
    pub precision: u32,
    pub e1: SeriesRecord,
    pub e2: SeriesRecord,
    pub e3: SeriesRecord,
}

/// `t8^2 / t10^2` at precision `n`, computed from expansions with headroom.
pub fn odd_square_ratio(disc: Discriminant, n: u32) -> Result<TruncatedSeries> {
    let (si, sj) = disc.odd_pair_shift();
    let headroom = 2 * si.max(sj);
    let wide = n + headroom;
    let (t8, t10) = rayon::join(
        || restricted_theta(THETA8, disc, wide).square(),
        || restricted_theta(THETA10, disc, wide).square(),
    );
    Ok(t8.exact_ratio(&t10)?.truncate(n))
}

/// Expansions of `(e1, e2, e3)` on the Humbert surface of discriminant
/// `disc`, truncated at precision `n`.
pub fn rosenhain_triple(disc: Discriminant, n: u32) -> Result<RosenhainSeries> {
    if disc.delta() < 4 {
        return Err(Error::Unsupported(
            disc.delta(),
            "the odd-pair cancellation degenerates for discriminant 1",
        ));
    }
    if n < 4 {
        return Err(Error::Config(format!(
            "precision {n} is below the minimum of 4"
        )));
    }
    let ((t1, t2), (t3, t4)) = rayon::join(
        || {
            rayon::join(
                || restricted_theta(THETA1, disc, n).square(),
                || restricted_theta(THETA2, disc, n).square(),
            )
        },
        || {
            rayon::join(
                || restricted_theta(THETA3, disc, n).square(),
                || restricted_theta(THETA4, disc, n).square(),
            )
        },
    );
    let ratio = odd_square_ratio(disc, n)?;
    let (inv2, inv4) = (t2.inverse()?, t4.inverse()?);

    let e1 = &(&t1 * &t3) * &(&inv2 * &inv4);
    let e2 = &(&t3 * &ratio) * &inv4;
    let e3 = &(&t1 * &ratio) * &inv2;

    for (name, e) in [("e1", &e1), ("e2", &e2), ("e3", &e3)] {
        if let Some((i, j)) = e.first_non_integral() {
            return Err(Error::IntegralityViolation { series: name, i, j });
        }
    }
    let out = RosenhainSeries {
        e1,
        e2,
        e3,
        disc,
        precision: n,
    };
    if !out.check_invariants() {
        return Err(Error::Unsupported(
            disc.delta(),
            "Rosenhain series are not distinct at this precision",
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_terms_are_one() {
        let r = rosenhain_triple(humbert_params(12).unwrap(), 16).unwrap();
        for e in r.components() {
            assert!(e.constant_term().is_one());
        }
    }

    #[test]
    fn e2_and_e3_differ_at_5() {
        let r = rosenhain_triple(humbert_params(5).unwrap(), 12).unwrap();
        assert!(!(&r.e2 - &r.e3).is_zero());
    }

    #[test]
    fn rejects_discriminant_one_and_tiny_precision() {
        assert!(matches!(
            rosenhain_triple(humbert_params(1).unwrap(), 20),
            Err(Error::Unsupported(1, _))
        ));
        assert!(rosenhain_triple(humbert_params(5).unwrap(), 3).is_err());
    }

    #[test]
    fn definition_unwinds() {
        let disc = humbert_params(8).unwrap();
        let n = 24;
        let r = rosenhain_triple(disc, n).unwrap();
        let sq = |ch| restricted_theta(ch, disc, n).square();
        let (t1, t2, t3, t4) = (sq(THETA1), sq(THETA2), sq(THETA3), sq(THETA4));
        assert_eq!(&r.e1 * &(&t2 * &t4), &t1 * &t3);
        let ratio = odd_square_ratio(disc, n).unwrap();
        assert_eq!(&r.e2 * &t4, &t3 * &ratio);
        assert_eq!(&r.e3 * &t2, &t1 * &ratio);
    }

    #[test]
    fn record_round_trip() {
        let r = rosenhain_triple(humbert_params(5).unwrap(), 12).unwrap();
        let rec = r.to_record();
        let text = serde_json::to_string(&rec).unwrap();
        let back: RosenhainRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(RosenhainSeries::from_record(&back).unwrap(), r);
    }
}
