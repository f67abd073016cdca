//! Integer polynomials in the Rosenhain coordinates `e1, e2, e3`.
//!
//! [`MultiPoly`] is a plain ring element: arithmetic never normalizes.
//! Component equations are kept in canonical form (see
//! [`MultiPoly::normalize`]): content 1 and a positive coefficient on the
//! graded-lexicographically greatest monomial.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rosenhain::RosenhainSeries;
use crate::series::TruncatedSeries;

pub const POLY_SCHEMA: &str = "humbert.poly.v1";

/// Exponent vector of `e1^a e2^b e3^c`, ordered graded-lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    // ascending graded-lex; no zero coefficients
    terms: BTreeMap<Monomial, BigInt>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_terms([([0, 0, 0], c)])
    }

    /// The variable `e_{i+1}` for `i` in `0..3`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::from_terms([(e, BigInt::one())])
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ([u32; 3], BigInt)>,
    {
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            *out.entry(Monomial(e)).or_insert_with(BigInt::zero) += c;
        }
        out.retain(|_, c: &mut BigInt| !c.is_zero());
        MultiPoly { terms: out }
    }

    pub fn from_i64_terms(terms: &[([u32; 3], i64)]) -> Self {
        Self::from_terms(terms.iter().map(|(e, c)| (*e, BigInt::from(*c))))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: [u32; 3]) -> BigInt {
        self.terms.get(&Monomial(e)).cloned().unwrap_or_default()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Canonical representative of `self` up to a nonzero rational scalar.
    pub fn normalize(&self) -> Result<MultiPoly> {
        let (_, lc) = self.leading().ok_or(Error::ZeroPolynomial)?;
        let mut g = self.content();
        if lc.is_negative() {
            g = -g;
        }
        Ok(MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c / &g)).collect(),
        })
    }

    pub fn is_canonical(&self) -> bool {
        match self.leading() {
            None => false,
            Some((_, lc)) => lc.is_positive() && self.content().is_one(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Swaps two variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut e = m.0;
            e.swap(i, j);
            (e, c.clone())
        }))
    }

    /// Exact quotient `self / divisor` over the integers, or `None` when the
    /// divisor does not divide.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        let (dm, dc) = divisor.leading()?;
        let (dm, dc) = (*dm, dc.clone());
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while let Some((rm, rc)) = rem.leading() {
            if (0..3).any(|k| rm.0[k] < dm.0[k]) {
                return None;
            }
            let e: [u32; 3] = std::array::from_fn(|k| rm.0[k] - dm.0[k]);
            let (q, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            let step = MultiPoly::from_terms([(e, q.clone())]);
            rem = &rem - &(&step * divisor);
            quot.insert(Monomial(e), q);
        }
        Some(MultiPoly { terms: quot })
    }

    /// Evaluates in nested Horner form (e1 outermost, e3 innermost).
    pub fn eval_complex(&self, z: [Complex64; 3]) -> Complex64 {
        // group by e1 exponent, then e2 exponent; each group descending
        let mut nested: BTreeMap<u32, BTreeMap<u32, BTreeMap<u32, f64>>> = BTreeMap::new();
        for (m, c) in &self.terms {
            nested
                .entry(m.0[0])
                .or_default()
                .entry(m.0[1])
                .or_default()
                .insert(m.0[2], c.to_f64().unwrap_or(f64::NAN));
        }
        fn horner<T, F: Fn(&T) -> Complex64>(
            groups: &BTreeMap<u32, T>,
            x: Complex64,
            inner: F,
        ) -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut last: Option<u32> = None;
            for (e, g) in groups.iter().rev() {
                if let Some(l) = last {
                    acc *= x.powu(l - e);
                }
                acc += inner(g);
                last = Some(*e);
            }
            if let Some(l) = last {
                acc *= x.powu(l);
            }
            acc
        }
        horner(&nested, z[0], |by_b| {
            horner(by_b, z[1], |by_c| {
                horner(by_c, z[2], |c| Complex64::new(*c, 0.0))
            })
        })
    }

    /// Exact evaluation at the Rosenhain series in the truncated ring.
    ///
    /// Powers of each `e_i` are built incrementally; terms sharing
    /// `(a, b)` are combined as a linear combination of `e3` powers before
    /// a single multiplication by `e1^a e2^b`.
    pub fn eval_on_series(&self, r: &RosenhainSeries) -> TruncatedSeries {
        self.eval_on(&r.e1, &r.e2, &r.e3)
    }

    pub fn eval_on(
        &self,
        e1: &TruncatedSeries,
        e2: &TruncatedSeries,
        e3: &TruncatedSeries,
    ) -> TruncatedSeries {
        let n = e1.precision().min(e2.precision()).min(e3.precision());
        if self.is_zero() {
            return TruncatedSeries::zero(n);
        }
        let powers = |e: &TruncatedSeries, d: u32| {
            let mut v = vec![TruncatedSeries::one(n)];
            for k in 1..=d {
                let next = &v[k as usize - 1] * e;
                v.push(next);
            }
            v
        };
        let p1 = powers(e1, self.degree_in(0));
        let p2 = powers(e2, self.degree_in(1));
        let p3 = powers(e3, self.degree_in(2));

        let mut by_ab: BTreeMap<(u32, u32), Vec<(u32, &BigInt)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            by_ab.entry((m.0[0], m.0[1])).or_default().push((m.0[2], c));
        }
        let mut acc = TruncatedSeries::zero(n);
        for ((a, b), cs) in by_ab {
            let mut inner = TruncatedSeries::zero(n);
            for (c, coef) in cs {
                inner = &inner + &p3[c as usize].scale(&BigRational::from_integer(coef.clone()));
            }
            let outer = match (a, b) {
                (0, 0) => inner,
                (a, 0) => &p1[a as usize] * &inner,
                (0, b) => &p2[b as usize] * &inner,
                (a, b) => &(&p1[a as usize] * &p2[b as usize]) * &inner,
            };
            acc = &acc + &outer;
        }
        acc
    }

    /// Plain text: graded-lex descending, `*` between factors.
    pub fn print(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<MultiPoly> {
        Parser::new(text).parse()
    }

    pub fn to_record(&self) -> PolyRecord {
        PolyRecord {
            schema: POLY_SCHEMA.to_string(),
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| (m.0[0], m.0[1], m.0[2], c.to_string()))
                .collect(),
        }
    }

    pub fn from_record(rec: &PolyRecord) -> Result<MultiPoly> {
        if rec.schema != POLY_SCHEMA {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("unexpected polynomial schema {:?}", rec.schema),
            });
        }
        let mut terms = Vec::with_capacity(rec.terms.len());
        for (k, (a, b, c, v)) in rec.terms.iter().enumerate() {
            let coef: BigInt = v.parse().map_err(|_| Error::Parse {
                pos: k,
                msg: format!("bad coefficient {v:?}"),
            })?;
            terms.push(([*a, *b, *c], coef));
        }
        Ok(MultiPoly::from_terms(terms))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("polynomial record serializes")
    }

    pub fn from_json(text: &str) -> Result<MultiPoly> {
        Self::from_record(&serde_json::from_str(text)?)
    }

    /// Reads either the JSON record or the text notation.
    pub fn read_any(text: &str) -> Result<MultiPoly> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse(text)
        }
    }
}

/// Structured form: terms `[a, b, c, "coeff"]`, graded-lex descending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub schema: String,
    pub terms: Vec<(u32, u32, u32, String)>,
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.terms.clone();
        for (m, c) in &rhs.terms {
            let e = out.entry(*m).or_insert_with(BigInt::zero);
            *e += c;
            if e.is_zero() {
                out.remove(m);
            }
        }
        MultiPoly { terms: out }
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        if self.is_zero() || rhs.is_zero() {
            return MultiPoly::zero();
        }
        let mut acc: HashMap<[u32; 3], BigInt> =
            HashMap::with_capacity(self.len().max(rhs.len()) * 2);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let e = [m1.0[0] + m2.0[0], m1.0[1] + m2.0[1], m1.0[2] + m2.0[2]];
                *acc.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        MultiPoly {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (Monomial(e), c))
                .collect(),
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let vars: Vec<String> = (0..3)
                .filter(|&i| m.0[i] > 0)
                .map(|i| match m.0[i] {
                    1 => format!("e_{}", i + 1),
                    e => format!("e_{}^{}", i + 1, e),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => {
                self.pos -= c.len_utf8();
                self.err(format!("expected {want:?}, found {c:?}"))
            }
            None => self.err(format!("expected {want:?}, found end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        Ok(self.src[start..self.pos].parse().expect("digits parse"))
    }

    fn small(&mut self) -> Result<u32> {
        let braced = self.peek() == Some('{');
        if braced {
            self.bump();
        }
        let at = self.pos;
        let v = self.integer()?;
        if braced {
            self.expect('}')?;
        }
        v.to_u32().ok_or(Error::Parse {
            pos: at,
            msg: "exponent too large".into(),
        })
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn variable(&mut self) -> Result<usize> {
        self.expect('e')?;
        if self.peek() == Some('_') {
            self.bump();
        }
        let at = self.pos;
        let idx = self.small()?;
        if !(1..=3).contains(&idx) {
            self.pos = at;
            return self.err(format!("unknown variable e_{idx}"));
        }
        Ok(idx as usize - 1)
    }

    fn term(&mut self) -> Result<([u32; 3], BigInt)> {
        let mut coef = BigInt::one();
        let mut exps = [0u32; 3];
        let mut saw = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coef = self.integer()?;
            saw = true;
        }
        loop {
            match self.peek() {
                Some('*') if saw => {
                    self.bump();
                    if self.peek() != Some('e') {
                        return self.err("expected a variable after '*'");
                    }
                }
                Some('e') => {
                    let v = self.variable()?;
                    let mut e = 1;
                    if self.peek() == Some('^') {
                        self.bump();
                        e = self.small()?;
                    }
                    exps[v] += e;
                    saw = true;
                }
                _ => break,
            }
        }
        if !saw {
            return match self.peek() {
                Some(c) => self.err(format!("unexpected {c:?}")),
                None => self.err("unexpected end of input"),
            };
        }
        Ok((exps, coef))
    }

    fn parse(mut self) -> Result<MultiPoly> {
        let mut terms = Vec::new();
        let mut neg = self.sign().unwrap_or(false);
        loop {
            let (e, c) = self.term()?;
            terms.push((e, if neg { -c } else { c }));
            if self.peek().is_none() {
                break;
            }
            match self.sign() {
                Some(n) => neg = n,
                None => {
                    let c = self.peek().unwrap();
                    return self.err(format!("expected '+' or '-', found {c:?}"));
                }
            }
        }
        Ok(MultiPoly::from_terms(terms))
    }
}

/// A triple of rational functions `(num_i / den_i)` in `e1, e2, e3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalTriple {
    pub parts: [(MultiPoly, MultiPoly); 3],
}

impl RationalTriple {
    pub fn new(parts: [(MultiPoly, MultiPoly); 3]) -> Self {
        assert!(
            parts.iter().all(|(_, d)| !d.is_zero()),
            "denominators must be nonzero"
        );
        RationalTriple { parts }
    }

    pub fn identity() -> Self {
        Self::new([0, 1, 2].map(|i| (MultiPoly::var(i), MultiPoly::one())))
    }

    /// Evaluates each coordinate at a complex point.
    pub fn eval_complex(&self, z: [Complex64; 3]) -> [Complex64; 3] {
        self.parts
            .each_ref()
            .map(|(n, d)| n.eval_complex(z) / d.eval_complex(z))
    }
}

/// The nine polynomials whose vanishing makes two Weierstrass points
/// collide: `e_i`, `e_i - 1`, `e_i - e_j`.
pub fn degenerate_factors() -> Vec<MultiPoly> {
    let v = |i| MultiPoly::var(i);
    let one = MultiPoly::one();
    let mut out: Vec<MultiPoly> = (0..3).map(v).collect();
    out.extend((0..3).map(|i| &v(i) - &one));
    out.push(&v(0) - &v(1));
    out.push(&v(0) - &v(2));
    out.push(&v(1) - &v(2));
    out
}

/// Divides out every degenerate-locus factor to full multiplicity and
/// normalizes what remains.
pub fn strip_degenerate_factors(f: &MultiPoly) -> Result<MultiPoly> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut g = f.clone();
    for fac in degenerate_factors() {
        while let Some(q) = g.div_exact(&fac) {
            g = q;
        }
    }
    if g.is_constant() {
        return Err(Error::DegenerateOnly);
    }
    g.normalize()
}

/// `prod_i den_i^{deg_i F} * F(phi)` without normalization or stripping.
pub fn clear_substitution(f: &MultiPoly, phi: &RationalTriple) -> MultiPoly {
    let degs = [f.degree_in(0), f.degree_in(1), f.degree_in(2)];
    // weights[i][t] = num_i^t * den_i^(D_i - t)
    let weights: Vec<Vec<MultiPoly>> = (0..3)
        .map(|i| {
            let (num, den) = &phi.parts[i];
            let d = degs[i];
            let mut np = vec![MultiPoly::one()];
            let mut dp = vec![MultiPoly::one()];
            for t in 1..=d as usize {
                np.push(&np[t - 1] * num);
                dp.push(&dp[t - 1] * den);
            }
            (0..=d as usize)
                .map(|t| &np[t] * &dp[d as usize - t])
                .collect()
        })
        .collect();

    // terms bucketed by the exponent of e3, then of e2
    type Buckets<'a> = BTreeMap<u32, BTreeMap<u32, Vec<(u32, &'a BigInt)>>>;
    let mut grouped: Buckets = BTreeMap::new();
    for (m, c) in f.terms() {
        grouped
            .entry(m.0[2])
            .or_default()
            .entry(m.0[1])
            .or_default()
            .push((m.0[0], c));
    }
    let mut total = MultiPoly::zero();
    for (c, by_b) in grouped {
        let mut outer = MultiPoly::zero();
        for (b, by_a) in by_b {
            let mut inner = MultiPoly::zero();
            for (a, coef) in by_a {
                inner = &inner + &weights[0][a as usize].scale(coef);
            }
            outer = &outer + &(&inner * &weights[1][b as usize]);
        }
        total = &total + &(&outer * &weights[2][c as usize]);
    }
    total
}

/// Pulls `f` back along `phi`, clears denominators with per-variable
/// degrees, strips degenerate factors and normalizes.
pub fn substitute_rational(f: &MultiPoly, phi: &RationalTriple) -> Result<MultiPoly> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let cleared = clear_substitution(f, phi);
    if cleared.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    strip_degenerate_factors(&cleared)
}
