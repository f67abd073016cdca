//! The S6 action on Rosenhain coordinates.
//!
//! A permutation of the six Weierstrass points `(0, 1, inf, e1, e2, e3)` is
//! followed by the Moebius map sending the new first three points back to
//! `(0, 1, inf)`; the images of the last three are the new coordinates.
//! Points are kept as projective pairs so that `inf = (1 : 0)` never needs a
//! numeric stand-in.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{substitute_rational, MultiPoly, RationalTriple};
use crate::rosenhain::RosenhainSeries;
use crate::theta::humbert_params;

/// One of the six Weierstrass points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    Inf,
    E1,
    E2,
    E3,
}

impl Symbol {
    pub const ALL: [Symbol; 6] = [
        Symbol::Zero,
        Symbol::One,
        Symbol::Inf,
        Symbol::E1,
        Symbol::E2,
        Symbol::E3,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Symbol {
        Self::ALL[i]
    }

    /// The point as a projective pair `(numerator, denominator)`.
    pub fn projective(self) -> (MultiPoly, MultiPoly) {
        match self {
            Symbol::Zero => (MultiPoly::zero(), MultiPoly::one()),
            Symbol::One => (MultiPoly::one(), MultiPoly::one()),
            Symbol::Inf => (MultiPoly::one(), MultiPoly::zero()),
            Symbol::E1 => (MultiPoly::var(0), MultiPoly::one()),
            Symbol::E2 => (MultiPoly::var(1), MultiPoly::one()),
            Symbol::E3 => (MultiPoly::var(2), MultiPoly::one()),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Inf => "inf",
            Symbol::E1 => "e1",
            Symbol::E2 => "e2",
            Symbol::E3 => "e3",
        })
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Symbol> {
        Ok(match s.trim() {
            "0" => Symbol::Zero,
            "1" => Symbol::One,
            "inf" | "∞" | "oo" => Symbol::Inf,
            "e1" | "e_1" => Symbol::E1,
            "e2" | "e_2" => Symbol::E2,
            "e3" | "e_3" => Symbol::E3,
            other => {
                return Err(Error::InvalidPermutation(format!(
                    "unknown symbol {other:?}"
                )))
            }
        })
    }
}

/// A permutation of the six symbols; `images[i]` is the image of symbol `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm6 {
    images: [u8; 6],
}

impl Perm6 {
    pub fn identity() -> Perm6 {
        Perm6 {
            images: [0, 1, 2, 3, 4, 5],
        }
    }

    pub fn from_images(images: [u8; 6]) -> Result<Perm6> {
        let mut seen = [false; 6];
        for &i in &images {
            if i >= 6 || seen[i as usize] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
            seen[i as usize] = true;
        }
        Ok(Perm6 { images })
    }

    /// Permutation with the given disjoint or overlapping cycles, composed
    /// right to left.
    pub fn from_cycles(cycles: &[&[Symbol]]) -> Result<Perm6> {
        cycles.iter().rev().try_fold(Perm6::identity(), |acc, cyc| {
            let mut images = [0, 1, 2, 3, 4, 5];
            let mut seen = BTreeSet::new();
            for (k, s) in cyc.iter().enumerate() {
                if !seen.insert(*s) {
                    return Err(Error::InvalidPermutation(format!(
                        "repeated symbol {s} in cycle"
                    )));
                }
                images[s.index()] = cyc[(k + 1) % cyc.len()].index() as u8;
            }
            Ok(Perm6 { images }.compose(&acc))
        })
    }

    pub fn apply(&self, s: Symbol) -> Symbol {
        Symbol::from_index(self.images[s.index()] as usize)
    }

    pub fn images(&self) -> [u8; 6] {
        self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm6) -> Perm6 {
        Perm6 {
            images: other.images.map(|i| self.images[i as usize]),
        }
    }

    pub fn inverse(&self) -> Perm6 {
        let mut images = [0u8; 6];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u8;
        }
        Perm6 { images }
    }

    pub fn is_identity(&self) -> bool {
        *self == Perm6::identity()
    }

    /// All 720 permutations in lexicographic order of their image arrays.
    pub fn all() -> Vec<Perm6> {
        let mut out = Vec::with_capacity(720);
        let mut cur = [0u8, 1, 2, 3, 4, 5];
        loop {
            out.push(Perm6 { images: cur });
            // next lexicographic permutation
            let Some(i) = (0..5).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..6)
                .rev()
                .find(|&j| cur[j] > cur[i])
                .expect("successor exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// Disjoint cycles of length at least two, each starting at its
    /// smallest symbol.
    pub fn cycles(&self) -> Vec<Vec<Symbol>> {
        let mut seen = [false; 6];
        let mut out = Vec::new();
        for start in 0..6 {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(Symbol::from_index(i));
                i = self.images[i] as usize;
            }
            out.push(cyc);
        }
        out
    }

    pub fn order(&self) -> usize {
        let mut p = *self;
        let mut n = 1;
        while !p.is_identity() {
            p = p.compose(self);
            n += 1;
        }
        n
    }
}

impl fmt::Display for Perm6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let names: Vec<String> = c.iter().map(|s| s.to_string()).collect();
            write!(f, "({})", names.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for Perm6 {
    type Err = Error;

    /// Cycle notation such as `(0,e1,e3,inf,e2,1)(e1,e2)`; `()` or `id` is
    /// the identity. Commas or spaces separate symbols.
    fn from_str(s: &str) -> Result<Perm6> {
        let t = s.trim();
        if t.is_empty() || t == "id" {
            return Ok(Perm6::identity());
        }
        let mut cycles: Vec<Vec<Symbol>> = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::InvalidPermutation(format!("expected '(' in {s:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::InvalidPermutation(format!("unclosed cycle in {s:?}")))?;
            let syms = body[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|w| !w.is_empty())
                .map(Symbol::from_str)
                .collect::<Result<Vec<_>>>()?;
            cycles.push(syms);
            rest = body[close + 1..].trim_start();
        }
        let refs: Vec<&[Symbol]> = cycles.iter().map(|c| c.as_slice()).collect();
        Perm6::from_cycles(&refs)
    }
}

impl Serialize for Perm6 {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Perm6 {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The coordinate change induced by `sigma`.
///
/// The moved tuple is `u_i = sigma(s_i)`, which makes [`act`] a left
/// action: `act(sigma ∘ tau, F) = act(sigma, act(tau, F))`.
pub fn induced_map(sigma: &Perm6) -> RationalTriple {
    let u: Vec<(MultiPoly, MultiPoly)> = Symbol::ALL
        .iter()
        .map(|s| sigma.apply(*s).projective())
        .collect();
    // mu(x) = (x - u1)(u2 - u3) / ((x - u3)(u2 - u1)) on projective pairs;
    // every denominator of the affine form cancels
    let minor =
        |a: &(MultiPoly, MultiPoly), b: &(MultiPoly, MultiPoly)| &(&a.0 * &b.1) - &(&b.0 * &a.1);
    let c23 = minor(&u[1], &u[2]);
    let c21 = minor(&u[1], &u[0]);
    let image = |x: &(MultiPoly, MultiPoly)| {
        let num = &minor(x, &u[0]) * &c23;
        let den = &minor(x, &u[2]) * &c21;
        reduce_pair(num, den)
    };
    RationalTriple::new([image(&u[3]), image(&u[4]), image(&u[5])])
}

/// Removes a common scalar and, when one side divides the other, the
/// common polynomial factor.
fn reduce_pair(num: MultiPoly, den: MultiPoly) -> (MultiPoly, MultiPoly) {
    if let Some(q) = num.div_exact(&den) {
        return (q, MultiPoly::one());
    }
    if let Some(q) = den.div_exact(&num) {
        return (MultiPoly::one(), q);
    }
    (num, den)
}

/// `F` pulled back along the induced map, stripped and normalized.
pub fn act(sigma: &Perm6, f: &MultiPoly) -> Result<MultiPoly> {
    if sigma.is_identity() {
        return crate::poly::strip_degenerate_factors(f);
    }
    substitute_rational(f, &induced_map(sigma))
}

/// `(0 1)` and `(0 1 inf e1 e2 e3)` generate S6.
pub fn s6_generators() -> [Perm6; 2] {
    [
        Perm6::from_images([1, 0, 2, 3, 4, 5]).expect("transposition"),
        Perm6::from_images([1, 2, 3, 4, 5, 0]).expect("six-cycle"),
    ]
}

/// Every element of S6 as `gen ∘ parent`, in breadth-first order from the
/// identity.
fn s6_tree() -> Vec<(Perm6, Option<(usize, usize)>)> {
    let gens = s6_generators();
    let mut out = vec![(Perm6::identity(), None)];
    let mut index: HashMap<Perm6, usize> = HashMap::from([(Perm6::identity(), 0)]);
    let mut k = 0;
    while k < out.len() {
        let cur = out[k].0;
        for (g, gen) in gens.iter().enumerate() {
            let next = gen.compose(&cur);
            if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(next) {
                slot.insert(out.len());
                out.push((next, Some((g, k))));
            }
        }
        k += 1;
    }
    out
}

/// An orbit with the action of the S6 generators on it.
#[derive(Clone, Debug)]
pub struct Orbit {
    /// Canonical polynomials; `elements[0]` is the starting component.
    pub elements: Vec<MultiPoly>,
    /// `generator_images[i][g]` is the index of `act(gen_g, elements[i])`.
    pub generator_images: Vec<[usize; 2]>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of `act(sigma, elements[0])` for every `sigma` in S6.
    pub fn image_indices(&self) -> HashMap<Perm6, usize> {
        let tree = s6_tree();
        let mut img: Vec<usize> = vec![0; tree.len()];
        let mut out = HashMap::with_capacity(tree.len());
        for (k, (sigma, parent)) in tree.iter().enumerate() {
            if let Some((g, p)) = parent {
                img[k] = self.generator_images[img[*p]][*g];
            }
            out.insert(*sigma, img[k]);
        }
        out
    }
}

/// Orbit of `f` under S6, found by breadth-first search over the two
/// generators. Each element costs two exact substitutions.
pub fn orbit_table(f: &MultiPoly) -> Result<Orbit> {
    let gens = s6_generators();
    let start = crate::poly::strip_degenerate_factors(f)?;
    let mut elements = vec![start.clone()];
    let mut index: HashMap<MultiPoly, usize> = HashMap::from([(start, 0)]);
    let mut generator_images = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let cur = elements[i].clone();
        let imgs: Vec<MultiPoly> = gens
            .par_iter()
            .map(|g| act(g, &cur))
            .collect::<Result<_>>()?;
        let mut row = [0usize; 2];
        for (g, img) in imgs.into_iter().enumerate() {
            row[g] = match index.get(&img) {
                Some(&j) => j,
                None => {
                    let j = elements.len();
                    index.insert(img.clone(), j);
                    elements.push(img);
                    queue.push_back(j);
                    j
                }
            };
        }
        if generator_images.len() <= i {
            generator_images.resize(i + 1, [0, 0]);
        }
        generator_images[i] = row;
    }
    Ok(Orbit {
        elements,
        generator_images,
    })
}

/// The orbit as a set of canonical polynomials.
pub fn orbit(f: &MultiPoly) -> Result<BTreeSet<String>> {
    Ok(orbit_table(f)?.elements.iter().map(|p| p.print()).collect())
}

/// The first orbit element of `f` (in breadth-first order) that vanishes
/// identically on `r`, with the smallest permutation carrying `f` to it.
pub fn vanishing_conjugate(f: &MultiPoly, r: &RosenhainSeries) -> Result<Option<(Perm6, MultiPoly)>> {
    let table = orbit_table(f)?;
    let mut reps: Vec<Option<Perm6>> = vec![None; table.len()];
    for (sigma, i) in table.image_indices() {
        if reps[i].is_none_or(|s| sigma < s) {
            reps[i] = Some(sigma);
        }
    }
    let hit = table
        .elements
        .par_iter()
        .position_first(|g| g.eval_on_series(r).is_zero());
    Ok(hit.map(|i| (reps[i].expect("every orbit element is reached"), table.elements[i].clone())))
}

/// The orbit computed by acting with all 720 permutations directly.
pub fn orbit_direct(f: &MultiPoly) -> Result<Vec<MultiPoly>> {
    let images: Vec<MultiPoly> = Perm6::all()
        .par_iter()
        .map(|s| act(s, f))
        .collect::<Result<_>>()?;
    let mut seen = std::collections::HashSet::new();
    Ok(images
        .into_iter()
        .filter(|p| seen.insert(p.clone()))
        .collect())
}

/// Stabilizer of `f`, sorted; closure under composition is checked.
pub fn fixed_group(f: &MultiPoly) -> Result<Vec<Perm6>> {
    let table = orbit_table(f)?;
    let mut group: Vec<Perm6> = table
        .image_indices()
        .into_iter()
        .filter(|(_, i)| *i == 0)
        .map(|(s, _)| s)
        .collect();
    group.sort();
    let set: BTreeSet<Perm6> = group.iter().copied().collect();
    for a in &group {
        for b in &group {
            if !set.contains(&a.compose(b)) {
                return Err(Error::InvalidPermutation(
                    "stabilizer is not closed under composition".into(),
                ));
            }
        }
    }
    Ok(group)
}

/// Stabilizer by direct substitution over all of S6.
pub fn fixed_group_direct(f: &MultiPoly) -> Result<Vec<Perm6>> {
    let base = crate::poly::strip_degenerate_factors(f)?;
    let hits: Vec<Option<Perm6>> = Perm6::all()
        .par_iter()
        .map(|s| Ok((act(s, f)? == base).then_some(*s)))
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// Subgroup generated by `gens`, sorted.
pub fn closure(gens: &[Perm6]) -> Vec<Perm6> {
    let mut set: BTreeSet<Perm6> = BTreeSet::from([Perm6::identity()]);
    let mut queue = VecDeque::from([Perm6::identity()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if set.insert(y) {
                queue.push_back(y);
            }
        }
    }
    set.into_iter().collect()
}

fn parse_all(cycles: &[&str]) -> Vec<Perm6> {
    cycles
        .iter()
        .map(|c| c.parse().expect("literal generator"))
        .collect()
}

/// Generators of the order-48 group for even discriminants with odd `k`.
pub fn group_g() -> Vec<Perm6> {
    parse_all(&["(0,e1,e3,inf,e2,1)", "(e1,e2)", "(1,e1,e3,e2)"])
}

/// The conjugating element `(1,inf)(e1,e2,e3)`.
pub fn conjugator() -> Perm6 {
    "(1,inf)(e1,e2,e3)".parse().expect("literal conjugator")
}

/// The conjugate `x^g = g^-1 x g` with products read left to right (first
/// `g^-1`, then `x`, then `g`); as a composition of maps this is
/// `g ∘ x ∘ g^-1`.
pub fn conjugate(x: &Perm6, g: &Perm6) -> Perm6 {
    g.compose(x).compose(&g.inverse())
}

/// Literal generator sets of the fixed groups by congruence class.
pub fn stabilizer_generators(delta: u64) -> Result<Vec<Perm6>> {
    let disc = humbert_params(delta as i64)?;
    if delta == 1 {
        return Err(Error::SpecialCase);
    }
    Ok(match delta % 8 {
        0 | 4 => {
            let g = group_g();
            if disc.k() % 2 == 1 {
                g
            } else {
                let c = conjugator();
                g.iter().map(|x| conjugate(x, &c)).collect()
            }
        }
        1 => parse_all(&["(0,e1)(1,e2)(inf,e3)", "(1,inf)", "(e1,e2)", "(e2,e3)"]),
        _ => parse_all(&["(0,e1)(1,e2)(inf,e3)", "(1,e3,e2,e1,inf)", "(inf,e1,e3,e2)"]),
    })
}
