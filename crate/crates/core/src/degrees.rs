//! Degrees of the Humbert components in the Rosenhain invariants.
//!
//! The component count `m(delta)` depends only on `delta mod 8`. The total
//! `a_delta` is a divisor sum, and the degree of the primitive part
//! `F*_delta` follows by Moebius-style inversion over square divisors.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::humbert_params;

/// Number of components of the Humbert surface in Rosenhain coordinates.
pub fn m_components(delta: u64) -> Result<u64> {
    humbert_params(delta as i64)?;
    Ok(match delta % 8 {
        1 => 10,
        5 => 6,
        _ => 15,
    })
}

/// Sum of divisors with the convention `sigma1(0) = 0`.
pub fn sigma1(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut total = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += d;
            if d * d != n {
                total += n / d;
            }
        }
        d += 1;
    }
    total
}

fn square_root(n: u64) -> Option<u64> {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// `24 * sum sigma1((delta - x^2)/4) + (12 delta - 2 if delta is a square)`,
/// the sum running over all integers `x` with `x^2 <= delta` and
/// `x^2 = delta mod 4`.
pub fn a_delta(delta: u64) -> Result<u64> {
    humbert_params(delta as i64)?;
    let mut sum = 0u64;
    let mut x: i64 = 0;
    while (x * x) as u64 <= delta {
        let r = delta - (x * x) as u64;
        if r.is_multiple_of(4) {
            let s = sigma1(r / 4);
            sum += if x == 0 { s } else { 2 * s };
        }
        x += 1;
    }
    let mut a = 24 * sum;
    if square_root(delta).is_some() {
        a += 12 * delta - 2;
    }
    Ok(a)
}

fn cache() -> &'static RwLock<HashMap<u64, u64>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, u64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Degree of `F*_delta`, from `a_delta = sum_x m(delta/x^2) deg F*(delta/x^2)`.
pub fn deg_fstar(delta: u64) -> Result<u64> {
    humbert_params(delta as i64)?;
    if let Some(v) = cache().read().expect("degree cache").get(&delta) {
        return Ok(*v);
    }
    let mut rest = a_delta(delta)? as i128;
    let mut x = 2u64;
    while x * x <= delta {
        if delta.is_multiple_of(x * x) {
            let sub = delta / (x * x);
            if humbert_params(sub as i64).is_ok() {
                rest -= (m_components(sub)? * deg_fstar(sub)?) as i128;
            }
        }
        x += 1;
    }
    let m = m_components(delta)? as i128;
    if rest < 0 || rest % m != 0 {
        return Err(Error::NonIntegralDegree(delta));
    }
    let v = (rest / m) as u64;
    cache().write().expect("degree cache").insert(delta, v);
    Ok(v)
}

/// Conjectural degree of the affine equation: equal to `deg F*` for
/// non-squares, reduced by the factor `1 - 1/n` for `delta = n^2`.
pub fn deg_conjectured(delta: u64) -> Result<u64> {
    let f = deg_fstar(delta)?;
    match square_root(delta) {
        Some(1) => Err(Error::SpecialCase),
        Some(n) => {
            let num = f * (n - 1);
            if num % n != 0 {
                return Err(Error::NonIntegralDegree(delta));
            }
            Ok(num / n)
        }
        None => Ok(f),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub delta: u64,
    pub m: u64,
    pub a_delta: u64,
    pub deg_fstar: u64,
    /// `None` for the special case `delta = 1`.
    pub deg_conjectured: Option<u64>,
}

pub fn degree_record(delta: u64) -> Result<DegreeRecord> {
    Ok(DegreeRecord {
        delta,
        m: m_components(delta)?,
        a_delta: a_delta(delta)?,
        deg_fstar: deg_fstar(delta)?,
        deg_conjectured: match deg_conjectured(delta) {
            Ok(v) => Some(v),
            Err(Error::SpecialCase) => None,
            Err(e) => return Err(e),
        },
    })
}

/// Rows for every admissible discriminant up to `max`.
pub fn degree_table(max: u64) -> Result<Vec<DegreeRecord>> {
    (1..=max)
        .filter(|d| matches!(d % 4, 0 | 1))
        .map(degree_record)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_values() {
        assert_eq!(sigma1(0), 0);
        assert_eq!(sigma1(1), 1);
        assert_eq!(sigma1(6), 12);
        assert_eq!(sigma1(9), 13);
    }

    #[test]
    fn small_a_delta() {
        // delta = 5: x = +-1, sigma1(1) = 1
        assert_eq!(a_delta(5).unwrap(), 48);
        // delta = 1: x = +-1 gives sigma1(0) = 0, plus 12 - 2
        assert_eq!(a_delta(1).unwrap(), 10);
    }

    #[test]
    fn special_case() {
        assert_eq!(deg_fstar(1).unwrap(), 1);
        assert_eq!(deg_conjectured(1), Err(Error::SpecialCase));
        assert_eq!(deg_conjectured(4).unwrap(), 2);
        assert!(m_components(7).is_err());
    }
}
