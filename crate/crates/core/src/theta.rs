//! Even theta constants restricted to a Humbert surface, as power series.
//!
//! On the locus `tau_3 = k tau_1 + l tau_2` the theta constant
//! `theta_abcd` expands as
//!
//! ```text
//! sum_{x1,x2} (-1)^(x1 c + x2 d) p^((2x1+a)^2 + k(2x2+b)^2)
//!                                q^((2x1+a+2x2+b)^2 + (k+l-1)(2x2+b)^2)
//! ```
//!
//! with `p = exp(2 pi i (tau_1 - tau_2)/8)` and `q = exp(2 pi i tau_2/8)`.
//! This expansion drops the constant phase `i^(ac+bd)` of the full
//! definition, so it differs from the analytic theta constant by a sign for
//! `theta_1111` and agrees exactly for the other five characteristics.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// An admissible discriminant `delta = 4k + l` with `l` in `{0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Discriminant {
    delta: u64,
    k: u64,
    ell: u64,
}

impl Discriminant {
    pub fn new(delta: i64) -> Result<Self> {
        humbert_params(delta)
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Exponents `(1 + k, k + l - 1)` of the monomial dividing theta_8 and
    /// theta_10.
    pub fn odd_pair_shift(&self) -> (u32, u32) {
        ((1 + self.k) as u32, (self.k + self.ell - 1) as u32)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 4*{} + {}", self.delta, self.k, self.ell)
    }
}

/// Decomposes an admissible discriminant as `4k + l`.
pub fn humbert_params(delta: i64) -> Result<Discriminant> {
    if delta <= 0 || !matches!(delta.rem_euclid(4), 0 | 1) {
        return Err(Error::NotAdmissible(delta));
    }
    let ell = (delta % 4) as u64;
    let delta = delta as u64;
    Ok(Discriminant {
        delta,
        k: (delta - ell) / 4,
        ell,
    })
}

/// A half-integral characteristic `(a, b, c, d)`, restricted to the six even
/// characteristics used for the Rosenhain triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaChar {
    pub a: u8,
    pub b: u8,
    pub c: u8,
    pub d: u8,
}

pub const THETA1: ThetaChar = ThetaChar {
    a: 0,
    b: 0,
    c: 0,
    d: 0,
};
pub const THETA2: ThetaChar = ThetaChar {
    a: 0,
    b: 0,
    c: 1,
    d: 1,
};
pub const THETA3: ThetaChar = ThetaChar {
    a: 0,
    b: 0,
    c: 1,
    d: 0,
};
pub const THETA4: ThetaChar = ThetaChar {
    a: 0,
    b: 0,
    c: 0,
    d: 1,
};
pub const THETA8: ThetaChar = ThetaChar {
    a: 1,
    b: 1,
    c: 0,
    d: 0,
};
pub const THETA10: ThetaChar = ThetaChar {
    a: 1,
    b: 1,
    c: 1,
    d: 1,
};

impl ThetaChar {
    pub const ALL: [ThetaChar; 6] = [THETA1, THETA2, THETA3, THETA4, THETA8, THETA10];

    pub fn new(a: u8, b: u8, c: u8, d: u8) -> Result<Self> {
        let ch = ThetaChar { a, b, c, d };
        if Self::ALL.contains(&ch) {
            Ok(ch)
        } else {
            Err(Error::UnsupportedCharacteristic(format!("{a}{b}{c}{d}")))
        }
    }

    /// Conventional label (1, 2, 3, 4, 8 or 10).
    pub fn label(&self) -> u8 {
        match (self.a, self.b, self.c, self.d) {
            (0, 0, 0, 0) => 1,
            (0, 0, 1, 1) => 2,
            (0, 0, 1, 0) => 3,
            (0, 0, 0, 1) => 4,
            (1, 1, 0, 0) => 8,
            _ => 10,
        }
    }

    /// `ac + bd`; the analytic theta constant equals `i^(ac+bd)` times the
    /// restricted expansion.
    pub fn phase_quarter_turns(&self) -> u8 {
        (self.a * self.c + self.b * self.d) % 4
    }
}

impl fmt::Display for ThetaChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for ThetaChar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::UnsupportedCharacteristic(s.to_string())),
            })
            .collect::<Result<_>>()?;
        match bits[..] {
            [a, b, c, d] => ThetaChar::new(a, b, c, d),
            _ => Err(Error::UnsupportedCharacteristic(s.to_string())),
        }
    }
}

/// A single lattice point contributing to a restricted theta expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeTerm {
    pub x1: i64,
    pub x2: i64,
    pub sign: i8,
    pub p_exp: u64,
    pub q_exp: u64,
}

/// All lattice points whose term survives truncation at precision `n`,
/// ordered by `(x1, x2)`.
pub fn enumerate_lattice(ch: ThetaChar, disc: Discriminant, n: u32) -> Vec<LatticeTerm> {
    let n = n as i64;
    let (a, b, c, d) = (ch.a as i64, ch.b as i64, ch.c as i64, ch.d as i64);
    let k = disc.k as i64;
    let kl1 = disc.k as i64 + disc.ell as i64 - 1;

    // |u| with u^2 < n, for u = 2x + parity
    let isqrt_below = |m: i64| -> i64 {
        if m <= 0 {
            return -1;
        }
        let mut r = (m as f64).sqrt() as i64 + 1;
        while r * r >= m {
            r -= 1;
        }
        r
    };
    // x such that |2x + par| <= bound
    let range = |par: i64, bound: i64| -> std::ops::RangeInclusive<i64> {
        (-bound - par).div_euclid(2)..=(bound - par).div_euclid(2)
    };

    let mut out = Vec::new();
    let u_bound = isqrt_below(n);
    for x1 in range(a, u_bound) {
        let u = 2 * x1 + a;
        if u * u >= n {
            continue;
        }
        let x2_range = if k >= 1 {
            range(b, isqrt_below((n + k - 1) / k))
        } else {
            // k = 0: the p-exponent does not see x2, the q-exponent does.
            let w = isqrt_below(n);
            (-w - u - b).div_euclid(2)..=(w - u - b).div_euclid(2)
        };
        for x2 in x2_range {
            let v = 2 * x2 + b;
            let p_exp = u * u + k * v * v;
            let q_exp = (u + v) * (u + v) + kl1 * v * v;
            if p_exp < n && q_exp < n {
                let sign = if (x1 * c + x2 * d).rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                };
                out.push(LatticeTerm {
                    x1,
                    x2,
                    sign,
                    p_exp: p_exp as u64,
                    q_exp: q_exp as u64,
                });
            }
        }
    }
    out
}

/// Restricted Fourier expansion of `theta_ch` on the Humbert surface of
/// discriminant `disc`, truncated at precision `n`.
pub fn restricted_theta(ch: ThetaChar, disc: Discriminant, n: u32) -> TruncatedSeries {
    TruncatedSeries::from_terms(
        n,
        enumerate_lattice(ch, disc, n).into_iter().map(|t| {
            (
                (t.p_exp as u32, t.q_exp as u32),
                BigRational::from_integer(BigInt::from(t.sign)),
            )
        }),
    )
}
