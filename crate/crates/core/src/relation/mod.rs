//! Finding the polynomial relation satisfied by the Rosenhain series.
//!
//! Every monomial of degree at most `d` in `e1, e2, e3` is expanded in the
//! truncated ring; a linear dependency among those expansions is a candidate
//! component equation. With a variable-swap symmetry the unknowns are the
//! shared coefficients of swap orbits, which roughly halves the row count.

pub mod linalg;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::rosenhain::{rosenhain_triple, RosenhainSeries};
use crate::series::{Exponent, TruncatedSeries};
use crate::theta::{humbert_params, Discriminant};

pub use linalg::{kernel, kernel_exact, SparseMatrix};

pub const REPORT_SCHEMA: &str = "humbert.relation.v1";

/// Extra precision used by the confirmation pass.
pub const RECHECK_MARGIN: u32 = 8;

/// A transposition of two of the variables `e1, e2, e3` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSwap(pub usize, pub usize);

impl VarSwap {
    pub const E1E2: VarSwap = VarSwap(0, 1);

    pub fn apply(&self, m: [u32; 3]) -> [u32; 3] {
        let mut out = m;
        out.swap(self.0, self.1);
        out
    }

    pub fn parse(s: &str) -> Result<VarSwap> {
        let idx = |c: char| match c {
            '1' => Some(0),
            '2' => Some(1),
            '3' => Some(2),
            _ => None,
        };
        let t: Vec<char> = s
            .chars()
            .filter(|c| !matches!(c, 'e' | '_' | ','))
            .collect();
        match t[..] {
            [a, b] => match (idx(a), idx(b)) {
                (Some(i), Some(j)) if i != j => Ok(VarSwap(i.min(j), i.max(j))),
                _ => Err(Error::Config(format!("bad symmetry {s:?}"))),
            },
            _ => Err(Error::Config(format!("bad symmetry {s:?}"))),
        }
    }
}

/// One unknown of the linear system: a monomial, or a swap orbit of two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialClass {
    pub rep: [u32; 3],
    pub members: Vec<[u32; 3]>,
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Monomials of degree at most `d` in graded-lex order; with a symmetry,
/// one class per orbit represented by the member with the larger exponent
/// in the first swapped variable.
pub fn monomial_basis(d: u32, symmetry: Option<VarSwap>) -> Vec<MonomialClass> {
    let mut all = Vec::new();
    for t in 0..=d {
        // graded-lex ascending within degree t
        for a in 0..=t {
            for b in 0..=(t - a) {
                all.push([a, b, t - a - b]);
            }
        }
    }
    all.sort_by_key(|m| crate::poly::Monomial(*m));
    match symmetry {
        None => all
            .into_iter()
            .map(|m| MonomialClass {
                rep: m,
                members: vec![m],
            })
            .collect(),
        Some(s) => all
            .into_iter()
            .filter(|m| m[s.0] >= m[s.1])
            .map(|m| {
                let t = s.apply(m);
                MonomialClass {
                    rep: m,
                    members: if t == m { vec![m] } else { vec![m, t] },
                }
            })
            .collect(),
    }
}

/// Evaluation matrix with its column labels.
#[derive(Clone, Debug)]
pub struct RelationMatrix {
    pub matrix: SparseMatrix,
    pub columns: Vec<Exponent>,
}

/// Expands every monomial of the basis in the Rosenhain series.
///
/// Monomials are produced degree by degree, each from a neighbour of one
/// lower degree times a single `e_i`, so every expansion costs one series
/// product.
pub fn monomial_series(
    r: &RosenhainSeries,
    monomials: &BTreeSet<[u32; 3]>,
) -> HashMap<[u32; 3], TruncatedSeries> {
    let n = r.precision;
    let es = r.components();
    let max_deg = monomials
        .iter()
        .map(|m| m.iter().sum::<u32>())
        .max()
        .unwrap_or(0);

    // everything needed: requested monomials and their ladder predecessors
    let mut needed: BTreeSet<[u32; 3]> = BTreeSet::new();
    for m in monomials {
        let mut cur = *m;
        while needed.insert(cur) {
            match (0..3).find(|&i| cur[i] > 0) {
                Some(i) => cur[i] -= 1,
                None => break,
            }
        }
    }
    let mut done: HashMap<[u32; 3], TruncatedSeries> = HashMap::new();
    done.insert([0, 0, 0], TruncatedSeries::one(n));
    for t in 1..=max_deg {
        let level: Vec<[u32; 3]> = needed
            .iter()
            .filter(|m| m.iter().sum::<u32>() == t)
            .copied()
            .collect();
        let computed: Vec<([u32; 3], TruncatedSeries)> = level
            .par_iter()
            .map(|m| {
                let i = (0..3).find(|&i| m[i] > 0).expect("positive degree");
                let mut prev = *m;
                prev[i] -= 1;
                (*m, &done[&prev] * es[i])
            })
            .collect();
        done.extend(computed);
    }
    done.retain(|m, _| monomials.contains(m));
    done
}

pub fn build_matrix(r: &RosenhainSeries, basis: &[MonomialClass]) -> RelationMatrix {
    assert!(!basis.is_empty(), "basis must be nonempty");
    let wanted: BTreeSet<[u32; 3]> = basis
        .iter()
        .flat_map(|c| c.members.iter().copied())
        .collect();
    let series = monomial_series(r, &wanted);
    let rows: Vec<TruncatedSeries> = basis
        .iter()
        .map(|c| {
            let mut it = c.members.iter();
            let first = series[it.next().expect("class has a member")].clone();
            it.fold(first, |acc, m| &acc + &series[m])
        })
        .collect();
    let columns: Vec<Exponent> = rows
        .iter()
        .flat_map(|s| s.terms().map(|(e, _)| e))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<Exponent, usize> =
        columns.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let mut matrix = SparseMatrix::new(columns.len());
    for s in &rows {
        matrix.push_row(s.terms().map(|(e, c)| (index[&e], c.clone())).collect());
    }
    RelationMatrix { matrix, columns }
}

/// `4 * ceil(sqrt(C(d+3, 3))) + 8`.
pub fn default_precision(d: u32) -> u32 {
    let m = binomial(d as u64 + 3, 3);
    let mut s = (m as f64).sqrt().ceil() as u64;
    while s * s < m {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= m {
        s -= 1;
    }
    (4 * s + 8) as u32
}

#[derive(Clone, Debug, Default)]
pub struct FindOptions {
    pub precision: Option<u32>,
    pub symmetry: Option<VarSwap>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub disc: Discriminant,
    pub degree: u32,
    pub precision: u32,
    pub kernel_dim: usize,
    pub polynomial: Option<MultiPoly>,
    pub monomial_count: usize,
    pub column_count: usize,
    pub symmetry_used: bool,
    /// `(precision, passed)` for each exact re-evaluation of the relation.
    pub residual_checks: Vec<(u32, bool)>,
}

impl RelationReport {
    pub fn confirmed(&self) -> bool {
        self.polynomial.is_some() && self.residual_checks.iter().all(|(_, ok)| *ok)
    }

    pub fn to_record(&self) -> ReportRecord {
        ReportRecord {
            schema: REPORT_SCHEMA.to_string(),
            delta: self.disc.delta(),
            degree: self.degree,
            precision: self.precision,
            kernel_dim: self.kernel_dim,
            monomial_count: self.monomial_count,
            column_count: self.column_count,
            symmetry_used: self.symmetry_used,
            residual_checks: self.residual_checks.clone(),
            polynomial: self.polynomial.as_ref().map(|p| p.to_record()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub schema: String,
    pub delta: u64,
    pub degree: u32,
    pub precision: u32,
    pub kernel_dim: usize,
    pub monomial_count: usize,
    pub column_count: usize,
    pub symmetry_used: bool,
    pub residual_checks: Vec<(u32, bool)>,
    pub polynomial: Option<crate::poly::PolyRecord>,
}

/// Assembles the polynomial `sum_k v_k * (sum of class k members)`.
pub fn relation_polynomial(basis: &[MonomialClass], v: &[BigInt]) -> MultiPoly {
    MultiPoly::from_terms(
        basis
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .flat_map(|(cls, c)| cls.members.iter().map(move |m| (*m, c.clone()))),
    )
}

/// Runs the search against precomputed series and reports whatever kernel
/// it finds. No confirmation pass.
pub fn search_in(
    r: &RosenhainSeries,
    d: u32,
    symmetry: Option<VarSwap>,
) -> (RelationReport, Vec<MonomialClass>) {
    assert!(d >= 1, "degree must be positive");
    let basis = monomial_basis(d, symmetry);
    let m = build_matrix(r, &basis);
    let ker = kernel(&m.matrix);
    let polynomial = if ker.len() == 1 {
        relation_polynomial(&basis, &ker[0]).normalize().ok()
    } else {
        None
    };
    let report = RelationReport {
        disc: r.disc,
        degree: d,
        precision: r.precision,
        kernel_dim: ker.len(),
        polynomial,
        monomial_count: basis.len(),
        column_count: m.columns.len(),
        symmetry_used: symmetry.is_some(),
        residual_checks: Vec::new(),
    };
    (report, basis)
}

/// Number of times the default precision is raised when the kernel is
/// still ambiguous.
pub const MAX_ESCALATIONS: usize = 4;

/// Next precision tried after an ambiguous kernel: `5N/4` rounded up to a
/// multiple of 4.
pub fn escalate(n: u32) -> u32 {
    (5 * n).div_ceil(16) * 4
}

/// Search plus the confirmation pass, returning the report for any kernel
/// dimension. Without an explicit precision the search starts at
/// [`default_precision`] and escalates while the kernel has dimension > 1
/// or the candidate fails the confirmation pass.
pub fn run_relation_search(delta: i64, d: u32, opts: &FindOptions) -> Result<RelationReport> {
    run_relation_search_with(delta, d, opts, &rosenhain_triple)
}

/// As [`run_relation_search`], obtaining every series triple (including the
/// one for the confirmation pass) from `provider`.
pub fn run_relation_search_with(
    delta: i64,
    d: u32,
    opts: &FindOptions,
    provider: &(dyn Fn(Discriminant, u32) -> Result<RosenhainSeries> + Sync),
) -> Result<RelationReport> {
    let disc = humbert_params(delta)?;
    if disc.delta() < 4 {
        return Err(Error::Unsupported(
            disc.delta(),
            "relation search needs delta >= 4",
        ));
    }
    if d == 0 {
        return Err(Error::Config("degree must be positive".into()));
    }
    let mut n = opts.precision.unwrap_or_else(|| default_precision(d));
    let mut attempts = 0;
    loop {
        let r = provider(disc, n)?;
        let (mut report, _) = search_in(&r, d, opts.symmetry);
        if let Some(f) = &report.polynomial {
            let n2 = n + RECHECK_MARGIN;
            let fresh = provider(disc, n2)?;
            report
                .residual_checks
                .push((n2, f.eval_on_series(&fresh).is_zero()));
        }
        // an ambiguous kernel or a relation that only vanishes because of
        // truncation both mean the precision was too low
        let settled = report.kernel_dim == 0 || (report.kernel_dim == 1 && report.confirmed());
        if settled || opts.precision.is_some() || attempts == MAX_ESCALATIONS {
            return Ok(report);
        }
        attempts += 1;
        n = escalate(n);
    }
}

/// Finds the unique relation of degree `d`, failing with
/// [`Error::NoRelation`] or [`Error::AmbiguousKernel`] otherwise.
pub fn find_relation(delta: i64, d: u32, opts: &FindOptions) -> Result<RelationReport> {
    into_unique(run_relation_search(delta, d, opts)?)
}

pub fn into_unique(report: RelationReport) -> Result<RelationReport> {
    match report.kernel_dim {
        0 => Err(Error::NoRelation {
            degree: report.degree,
        }),
        1 => match report.residual_checks.iter().find(|(_, ok)| !ok) {
            Some((n, _)) => Err(Error::ConfirmationFailed { precision: *n }),
            None => Ok(report),
        },
        dim => Err(Error::AmbiguousKernel {
            dim,
            monomials: report.monomial_count,
        }),
    }
}

/// Tries each degree in turn and returns the first unique relation.
pub fn search_degrees(delta: i64, degrees: &[u32], opts: &FindOptions) -> Result<RelationReport> {
    let mut last = Err(Error::NoRelation { degree: 0 });
    for &d in degrees {
        last = find_relation(delta, d, opts);
        if last.is_ok() {
            break;
        }
    }
    last
}

/// Coefficient vector of a series over the given column labels.
pub fn coefficient_vector(s: &TruncatedSeries, columns: &[Exponent]) -> Vec<BigRational> {
    let map: BTreeMap<Exponent, &BigRational> = s.terms().collect();
    columns
        .iter()
        .map(|e| {
            map.get(e)
                .map(|c| (*c).clone())
                .unwrap_or_else(BigRational::zero)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(monomial_basis(4, None).len(), 35);
        assert_eq!(monomial_basis(16, None).len(), 969);
        assert_eq!(monomial_basis(2, Some(VarSwap::E1E2)).len(), 7);
        for d in 1..10 {
            assert_eq!(
                monomial_basis(d, None).len() as u64,
                binomial(d as u64 + 3, 3)
            );
        }
    }

    #[test]
    fn basis_is_graded_lex() {
        let b = monomial_basis(3, None);
        for w in b.windows(2) {
            assert!(crate::poly::Monomial(w[0].rep) < crate::poly::Monomial(w[1].rep));
        }
        assert_eq!(b[0].rep, [0, 0, 0]);
    }

    #[test]
    fn default_precision_policy() {
        assert_eq!(default_precision(16), 136);
        assert_eq!(default_precision(4), 32);
        assert_eq!(default_precision(8), 60);
        assert_eq!(escalate(60), 76);
        assert_eq!(escalate(136), 172);
    }

    #[test]
    fn constant_row_and_linear_rank() {
        let disc = humbert_params(12).unwrap();
        let r = rosenhain_triple(disc, 20).unwrap();
        let basis = vec![MonomialClass {
            rep: [0, 0, 0],
            members: vec![[0, 0, 0]],
        }];
        let m = build_matrix(&r, &basis);
        assert_eq!(m.columns, vec![(0, 0)]);
        let lin = build_matrix(&r, &monomial_basis(1, None));
        assert_eq!(lin.matrix.nrows(), 4);
        assert!(lin.columns.len() <= 400);
        assert!(kernel(&lin.matrix).is_empty());
    }

    #[test]
    fn swap_parse() {
        assert_eq!(VarSwap::parse("e1e2").unwrap(), VarSwap(0, 1));
        assert_eq!(VarSwap::parse("e_3,e_1").unwrap(), VarSwap(0, 2));
        assert!(VarSwap::parse("e1e1").is_err());
    }
}
