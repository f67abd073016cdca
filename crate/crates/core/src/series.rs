//! Truncated bivariate power series over the rationals.
//!
//! A [`TruncatedSeries`] is a residue class in `Q[[p,q]] / (p^N, q^N)`. The
//! truncation is per variable: a term `p^i q^j` survives iff `i < N` and
//! `j < N`. Coefficients are exact rationals; integrality is a predicate
//! ([`TruncatedSeries::is_integral`]) rather than a separate type.
//!
//! Binary operations accept operands of different precision and truncate
//! the result to the smaller one.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent pair `(i, j)` of the monomial `p^i q^j`.
pub type Exponent = (u32, u32);

/// Schema tag written into every serialized series.
pub const SERIES_SCHEMA: &str = "humbert.series.v1";

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    precision: u32,
    terms: BTreeMap<Exponent, BigRational>,
}

impl TruncatedSeries {
    /// The zero series at precision `n`.
    pub fn zero(precision: u32) -> Self {
        assert!(precision >= 1, "precision must be positive");
        TruncatedSeries {
            precision,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(precision: u32) -> Self {
        Self::constant(BigRational::one(), precision)
    }

    pub fn constant(c: BigRational, precision: u32) -> Self {
        Self::monomial(0, 0, c, precision)
    }

    /// `c * p^i q^j`, or zero when the monomial lies in the truncation ideal.
    pub fn monomial(i: u32, j: u32, c: BigRational, precision: u32) -> Self {
        let mut s = Self::zero(precision);
        if i < precision && j < precision && !c.is_zero() {
            s.terms.insert((i, j), c);
        }
        s
    }

    /// Builds a series from arbitrary terms. Repeated exponents are summed;
    /// zero coefficients and exponents outside the truncation box are dropped.
    pub fn from_terms<I>(precision: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let mut s = Self::zero(precision);
        for ((i, j), c) in terms {
            if i >= precision || j >= precision {
                continue;
            }
            let entry = s.terms.entry((i, j)).or_insert_with(BigRational::zero);
            *entry += c;
        }
        s.terms.retain(|_, c| !c.is_zero());
        s
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_int_terms<I>(precision: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, i64)>,
    {
        Self::from_terms(
            precision,
            terms
                .into_iter()
                .map(|(e, c)| (e, BigRational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in `(i, j)` lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(0, 0)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// First term whose coefficient is not an integer, if any.
    pub fn first_non_integral(&self) -> Option<Exponent> {
        self.terms
            .iter()
            .find(|(_, c)| !c.is_integer())
            .map(|(e, _)| *e)
    }

    /// The lexicographically smallest term `(i, j, c)`.
    pub fn lowest_term(&self) -> Option<(Exponent, &BigRational)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    /// Largest monomial `p^i q^j` dividing every term. `None` for zero.
    pub fn monomial_content(&self) -> Option<Exponent> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        Some(it.fold(first, |(a, b), &(i, j)| (a.min(i), b.min(j))))
    }

    /// Reduces to a smaller precision. Requests above the current precision
    /// leave the series unchanged.
    pub fn truncate(&self, precision: u32) -> Self {
        let n = precision.min(self.precision);
        TruncatedSeries {
            precision: n,
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| *i < n && *j < n)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.precision);
        }
        TruncatedSeries {
            precision: self.precision,
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.precision);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Multiplicative inverse in the truncated ring.
    ///
    /// Solves `f * g = 1` coefficient by coefficient in lexicographic
    /// exponent order. The result agrees with the geometric series
    /// `f(0,0)^-1 * sum_n (1 - f/f(0,0))^n`, which terminates after at most
    /// `2N - 1` terms in this ring.
    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::NotAUnit);
        }
        let n = self.precision as usize;
        let rest: Vec<(usize, usize, &BigRational)> = self
            .terms
            .iter()
            .filter(|(e, _)| **e != (0, 0))
            .map(|((i, j), v)| (*i as usize, *j as usize, v))
            .collect();

        let unit = self.is_integral() && c.abs().is_one();
        let out = if unit {
            // f(0,0) = +-1 with integer coefficients: stay in Z.
            let sign = c.to_integer();
            let ints: Vec<(usize, usize, BigInt)> = rest
                .iter()
                .map(|(i, j, v)| (*i, *j, v.to_integer()))
                .collect();
            let mut g = vec![BigInt::zero(); n * n];
            g[0] = sign.clone();
            for i in 0..n {
                for j in 0..n {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let mut s = BigInt::zero();
                    for (a, b, v) in &ints {
                        if *a <= i && *b <= j {
                            let prev = &g[(i - a) * n + (j - b)];
                            if !prev.is_zero() {
                                s += v * prev;
                            }
                        }
                    }
                    if !s.is_zero() {
                        // g_ij = -(1/c) s with c = sign
                        g[i * n + j] = -(s * &sign);
                    }
                }
            }
            g.into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| {
                    (
                        ((k / n) as u32, (k % n) as u32),
                        BigRational::from_integer(v),
                    )
                })
                .collect()
        } else {
            let cinv = c.recip();
            let mut g = vec![BigRational::zero(); n * n];
            g[0] = cinv.clone();
            for i in 0..n {
                for j in 0..n {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let mut s = BigRational::zero();
                    for (a, b, v) in &rest {
                        if *a <= i && *b <= j {
                            let prev = &g[(i - a) * n + (j - b)];
                            if !prev.is_zero() {
                                s += *v * prev;
                            }
                        }
                    }
                    if !s.is_zero() {
                        g[i * n + j] = -(s * &cinv);
                    }
                }
            }
            g.into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (((k / n) as u32, (k % n) as u32), v))
                .collect()
        };
        let r = TruncatedSeries {
            precision: self.precision,
            terms: out,
        };
        debug_assert!(r.check_invariants());
        Ok(r)
    }

    /// Exact quotient by `p^i q^j`.
    ///
    /// The precision is left unchanged. Coefficients whose exponents lie in
    /// the top `i` (resp. `j`) band are only correct when the input was
    /// computed with that much headroom; callers that need the full box
    /// should expand with extra precision and [`truncate`](Self::truncate)
    /// afterwards.
    pub fn divide_monomial(&self, i: u32, j: u32) -> Result<Self> {
        if let Some(((a, b), _)) = self.terms.iter().find(|((a, b), _)| *a < i || *b < j) {
            return Err(Error::NotDivisible {
                i: *a,
                j: *b,
                di: i,
                dj: j,
            });
        }
        Ok(TruncatedSeries {
            precision: self.precision,
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| ((a - i, b - j), c.clone()))
                .collect(),
        })
    }

    /// `self / other` after cancelling the largest monomial common to both.
    ///
    /// Fails with [`Error::NotAUnit`] when the reduced denominator still has
    /// zero constant term (including when `other` is zero).
    pub fn exact_ratio(&self, other: &Self) -> Result<Self> {
        let gm = other.monomial_content().ok_or(Error::NotAUnit)?;
        let common = match self.monomial_content() {
            Some(fm) => (fm.0.min(gm.0), fm.1.min(gm.1)),
            None => gm,
        };
        let num = self.divide_monomial(common.0, common.1)?;
        let den = other.divide_monomial(common.0, common.1)?;
        Ok(&num * &den.inverse()?)
    }

    /// Evaluates the truncated series at complex `(p, q)`.
    pub fn evaluate(&self, p: Complex64, q: Complex64) -> Complex64 {
        let n = self.precision as usize;
        let mut pp = Vec::with_capacity(n);
        let mut qp = Vec::with_capacity(n);
        let (mut a, mut b) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        for _ in 0..n {
            pp.push(a);
            qp.push(b);
            a *= p;
            b *= q;
        }
        self.terms
            .iter()
            .map(|((i, j), c)| pp[*i as usize] * qp[*j as usize] * ratio_to_f64(c))
            .sum()
    }

    /// Structural invariants: no zero coefficients, all exponents in range.
    pub fn check_invariants(&self) -> bool {
        self.terms
            .iter()
            .all(|((i, j), c)| *i < self.precision && *j < self.precision && !c.is_zero())
    }

    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            schema: SERIES_SCHEMA.to_string(),
            precision: self.precision,
            terms: self
                .terms
                .iter()
                .map(|((i, j), c)| (*i, *j, format!("{}/{}", c.numer(), c.denom())))
                .collect(),
        }
    }

    pub fn from_record(rec: &SeriesRecord) -> Result<Self> {
        if rec.schema != SERIES_SCHEMA {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("unexpected series schema {:?}", rec.schema),
            });
        }
        if rec.precision == 0 {
            return Err(Error::Parse {
                pos: 0,
                msg: "precision must be positive".into(),
            });
        }
        let mut terms = Vec::with_capacity(rec.terms.len());
        for (k, (i, j, c)) in rec.terms.iter().enumerate() {
            let v = parse_rational(c).ok_or_else(|| Error::Parse {
                pos: k,
                msg: format!("bad coefficient {c:?}"),
            })?;
            terms.push(((*i, *j), v));
        }
        Ok(Self::from_terms(rec.precision, terms))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("series record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: SeriesRecord = serde_json::from_str(text)?;
        Self::from_record(&rec)
    }

    /// Splits into a common positive denominator and integer numerators
    /// grouped by p-exponent (each row sorted by q-exponent).
    fn integer_rows(&self, n: usize) -> (BigInt, Vec<Vec<(usize, BigInt)>>) {
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut rows = vec![Vec::new(); n];
        for ((i, j), c) in &self.terms {
            let (i, j) = (*i as usize, *j as usize);
            if i < n && j < n {
                let scaled = c.numer() * (&den / c.denom());
                rows[i].push((j, scaled));
            }
        }
        (den, rows)
    }
}

fn ratio_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
    })
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}

/// Serialized form: terms sorted by `(i, j)`, coefficients as `"num/den"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub schema: String,
    pub precision: u32,
    pub terms: Vec<(u32, u32, String)>,
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.precision.min(rhs.precision);
        let mut out = self.truncate(n);
        for ((i, j), c) in &rhs.terms {
            if *i >= n || *j >= n {
                continue;
            }
            let entry = out.terms.entry((*i, *j)).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(&(*i, *j));
            }
        }
        debug_assert!(out.check_invariants());
        out
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            precision: self.precision,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    /// Sparse convolution over integer numerators, one output row (fixed
    /// p-exponent) per task. Summation order inside a row is fixed, so the
    /// result does not depend on scheduling.
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.precision.min(rhs.precision);
        let nu = n as usize;
        if self.is_zero() || rhs.is_zero() {
            return TruncatedSeries::zero(n);
        }
        let (da, ra) = self.integer_rows(nu);
        let (db, rb) = rhs.integer_rows(nu);
        let den = da * db;
        let unit_den = den.is_one();

        let rows: Vec<Vec<(Exponent, BigRational)>> = (0..nu)
            .into_par_iter()
            .map(|i| {
                let mut acc: Vec<BigInt> = vec![BigInt::zero(); nu];
                let mut touched = false;
                for i1 in 0..=i {
                    let (r1, r2) = (&ra[i1], &rb[i - i1]);
                    if r1.is_empty() || r2.is_empty() {
                        continue;
                    }
                    touched = true;
                    for (j1, c1) in r1 {
                        for (j2, c2) in r2 {
                            let j = j1 + j2;
                            if j >= nu {
                                break;
                            }
                            acc[j] += c1 * c2;
                        }
                    }
                }
                if !touched {
                    return Vec::new();
                }
                acc.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| {
                        let c = if unit_den {
                            BigRational::from_integer(v)
                        } else {
                            BigRational::new(v, den.clone())
                        };
                        ((i as u32, j as u32), c)
                    })
                    .collect()
            })
            .collect();
        let out = TruncatedSeries {
            precision: n,
            terms: rows.into_iter().flatten().collect(),
        };
        debug_assert!(out.check_invariants());
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O(p^{0}, q^{0})", self.precision);
        }
        for (k, ((i, j), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = [("p", *i), ("q", *j)]
                .iter()
                .filter(|(_, e)| *e > 0)
                .map(|(v, e)| {
                    if *e == 1 {
                        v.to_string()
                    } else {
                        format!("{v}^{e}")
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        write!(f, " + O(p^{0}, q^{0})", self.precision)
    }
}
