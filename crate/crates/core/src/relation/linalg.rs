//! Exact left nullspaces of sparse rational matrices.
//!
//! [`kernel`] works modulo a sequence of word-size primes, lifts the
//! reduced-row-echelon kernel basis by CRT and rational reconstruction, and
//! accepts the lift only after checking `v * M = 0` exactly over the
//! rationals. [`kernel_exact`] is plain Gauss-Jordan over `Q`, used as the
//! reference on small inputs and as the fallback when lifting does not
//! converge.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

/// Row-major sparse matrix with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    ncols: usize,
    rows: Vec<Vec<(usize, BigRational)>>,
}

impl SparseMatrix {
    pub fn new(ncols: usize) -> Self {
        SparseMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    /// Appends a row given as `(column, value)` pairs; zeros are dropped and
    /// entries are kept sorted by column.
    pub fn push_row(&mut self, mut row: Vec<(usize, BigRational)>) {
        row.retain(|(c, v)| {
            assert!(*c < self.ncols, "column {c} out of range");
            !v.is_zero()
        });
        row.sort_by_key(|(c, _)| *c);
        self.rows.push(row);
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::new(ncols);
        for r in rows {
            m.push_row(
                r.iter()
                    .enumerate()
                    .map(|(c, v)| (c, BigRational::from_integer((*v).into())))
                    .collect(),
            );
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<(usize, BigRational)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `v * M` over the rationals.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.nrows());
        let mut acc = vec![BigRational::zero(); self.ncols];
        for (x, row) in v.iter().zip(&self.rows) {
            if x.is_zero() {
                continue;
            }
            for (c, m) in row {
                acc[*c] += m * x;
            }
        }
        acc
    }

    fn is_left_null(&self, v: &[BigInt]) -> bool {
        if self.rows.iter().flatten().all(|(_, m)| m.is_integer()) {
            let mut acc = vec![BigInt::zero(); self.ncols];
            for (x, row) in v.iter().zip(&self.rows) {
                if x.is_zero() {
                    continue;
                }
                for (c, m) in row {
                    acc[*c] += m.numer() * x;
                }
            }
            acc.iter().all(Zero::is_zero)
        } else {
            self.left_apply(v).iter().all(Zero::is_zero)
        }
    }

    /// Transposed matrix reduced modulo `p`, or `None` if some denominator
    /// vanishes mod `p`.
    fn transpose_mod(&self, p: u64) -> Option<Vec<Vec<u64>>> {
        let mut out = vec![vec![0u64; self.nrows()]; self.ncols];
        let pb = BigInt::from(p);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                let num = reduce(v.numer(), &pb);
                let den = reduce(v.denom(), &pb);
                if den == 0 {
                    return None;
                }
                out[*c][r] = mul_mod(num, inv_mod(den, p), p);
            }
        }
        Some(out)
    }
}

fn reduce(x: &BigInt, p: &BigInt) -> u64 {
    x.mod_floor(p).to_u64().expect("residue fits")
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // deterministic for n < 3_215_031_751
    'witness: for a in [2u64, 3, 5, 7] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^31` in descending order.
pub fn word_primes() -> impl Iterator<Item = u64> {
    (1u64 << 20..(1u64 << 31)).rev().filter(|&n| is_prime(n))
}

/// Kernel of a matrix over `F_p` in RREF form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModKernel {
    pub prime: u64,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    /// One vector per free column; entry `free[i]` of vector `i` is 1.
    pub basis: Vec<Vec<u64>>,
}

/// Solves `A x = 0` modulo `p` by Gauss-Jordan elimination, where `a` has
/// `n` columns.
pub fn right_kernel_mod(mut a: Vec<Vec<u64>>, n: usize, p: u64) -> ModKernel {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = inv_mod(a[rank][col], p);
        for x in a[rank][col..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let (head, tail) = a.split_at_mut(rank);
        let (prow, tail) = tail.split_first_mut().expect("pivot row");
        let prow: &[u64] = prow;
        let eliminate = |row: &mut Vec<u64>| {
            let f = row[col];
            if f != 0 {
                let f = p - f;
                for (x, y) in row[col..].iter_mut().zip(&prow[col..]) {
                    if *y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        };
        head.par_iter_mut().for_each(eliminate);
        tail.par_iter_mut().for_each(eliminate);
        pivots.push(col);
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    let is_pivot = {
        let mut v = vec![false; n];
        pivots.iter().for_each(|&c| v[c] = true);
        v
    };
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                let x = a[i][f];
                v[pc] = if x == 0 { 0 } else { p - x };
            }
            v
        })
        .collect();
    ModKernel {
        prime: p,
        pivots,
        free,
        basis,
    }
}

/// Left kernel of `m` modulo `p`, or `None` when `p` divides a denominator.
pub fn left_kernel_mod(m: &SparseMatrix, p: u64) -> Option<ModKernel> {
    Some(right_kernel_mod(m.transpose_mod(p)?, m.nrows(), p))
}

/// Smallest-height rational congruent to `a` modulo `m`, if one exists with
/// numerator and denominator below `sqrt(m / 2)`.
pub fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let r = BigRational::new(r1, t1);
    if r.denom().gcd(m).is_one() {
        Some(r)
    } else {
        None
    }
}

/// Scales a rational vector to coprime integers, keeping sign.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

const MAX_PRIMES: usize = 48;

/// Basis of `{v : v M = 0}` as coprime integer vectors, in the reduced
/// echelon normalization (each vector has a distinguished coordinate where
/// it is positive and the others vanish).
pub fn kernel(m: &SparseMatrix) -> Vec<Vec<BigInt>> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut primes = word_primes();
    let mut best: Option<ModKernel> = None;
    let mut modulus = BigInt::one();
    let mut lifted: Vec<Vec<BigInt>> = Vec::new();
    let mut previous: Option<Vec<Vec<BigRational>>> = None;

    for _ in 0..MAX_PRIMES {
        let p = primes.next().expect("enough word primes");
        let Some(k) = left_kernel_mod(m, p) else {
            continue;
        };
        if k.free.is_empty() {
            // rank over F_p is full, so the rational kernel is trivial
            return Vec::new();
        }
        let restart = match &best {
            None => true,
            Some(b) => {
                // a lucky prime has the smallest kernel and the
                // lexicographically earliest pivot columns
                k.free.len() < b.free.len() || (k.free.len() == b.free.len() && k.pivots < b.pivots)
            }
        };
        if restart {
            modulus = BigInt::from(p);
            lifted = k
                .basis
                .iter()
                .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            best = Some(k);
            previous = None;
        } else if best.as_ref().is_some_and(|b| b.pivots == k.pivots) {
            let pb = BigInt::from(p);
            let inv = BigInt::from(inv_mod(reduce(&modulus, &pb), p));
            for (acc, v) in lifted.iter_mut().zip(&k.basis) {
                for (x, &r) in acc.iter_mut().zip(v) {
                    // x + modulus * ((r - x) / modulus mod p)
                    let t = ((BigInt::from(r) - &*x) * &inv).mod_floor(&pb);
                    *x += &modulus * t;
                }
            }
            modulus *= &pb;
        } else {
            continue;
        }

        let candidate: Option<Vec<Vec<BigRational>>> = lifted
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| rational_reconstruction(x, &modulus))
                    .collect()
            })
            .collect();
        let Some(candidate) = candidate else {
            continue;
        };
        if previous.as_ref() == Some(&candidate) {
            let ints: Vec<Vec<BigInt>> = candidate
                .iter()
                .map(|v| primitive_integer_vector(v))
                .collect();
            if ints.par_iter().all(|v| m.is_left_null(v)) {
                return ints;
            }
        }
        previous = Some(candidate);
    }
    kernel_exact(m)
}

/// Gauss-Jordan left kernel over the rationals.
pub fn kernel_exact(m: &SparseMatrix) -> Vec<Vec<BigInt>> {
    let n = m.nrows();
    let mut a = vec![vec![BigRational::zero(); n]; m.ncols()];
    for (r, row) in m.rows().iter().enumerate() {
        for (c, v) in row {
            a[*c][r] = v.clone();
        }
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = a[rank][col].recip();
        for x in a[rank][col..].iter_mut() {
            *x *= &inv;
        }
        let prow = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row[col..].iter_mut().zip(&prow[col..]) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][f].clone();
            }
            primitive_integer_vector(&v)
        })
        .collect()
}

/// Rank of the row space spanned by integer vectors (exact).
pub fn rank_of(vectors: &[Vec<BigInt>]) -> usize {
    let Some(len) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let mut m = SparseMatrix::new(len);
    for v in vectors {
        m.push_row(
            v.iter()
                .enumerate()
                .map(|(c, x)| (c, BigRational::from_integer(x.clone())))
                .collect(),
        );
    }
    vectors.len() - kernel_exact(&m).len()
}

/// Sign of the first nonzero entry; helpers for tests and callers that
/// want a sign convention independent of the echelon form.
pub fn leading_sign(v: &[BigInt]) -> Sign {
    v.iter()
        .find(|x| !x.is_zero())
        .map_or(Sign::NoSign, |x| x.sign())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn primes_descend_from_2_31() {
        let ps: Vec<u64> = word_primes().take(3).collect();
        assert_eq!(ps, vec![2147483647, 2147483629, 2147483587]);
    }

    #[test]
    fn full_rank_has_empty_kernel() {
        let m = SparseMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(kernel(&m).is_empty());
        assert!(kernel_exact(&m).is_empty());
    }

    #[test]
    fn duplicated_row() {
        let m = SparseMatrix::from_dense(&[vec![1, 2, 3], vec![1, 2, 3], vec![0, 1, 5]]);
        let k = kernel(&m);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!(v == &ints(&[1, -1, 0]) || v == &ints(&[-1, 1, 0]));
        assert_eq!(kernel_exact(&m), k);
    }

    #[test]
    fn zero_rows_and_rational_entries() {
        let mut m = SparseMatrix::new(2);
        m.push_row(vec![(0, BigRational::new(1.into(), 3.into()))]);
        m.push_row(vec![]);
        m.push_row(vec![(0, BigRational::new(2.into(), 7.into()))]);
        let k = kernel(&m);
        assert_eq!(k, kernel_exact(&m));
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.left_apply(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn reconstruction() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(999_983u64);
        let inv113 = BigInt::from(113).extended_gcd(&m).x.mod_floor(&m);
        let a = (BigInt::from(-355) * inv113).mod_floor(&m);
        assert_eq!(
            rational_reconstruction(&a, &m),
            Some(BigRational::new((-355).into(), 113.into()))
        );
        // brute-force oracle over a small modulus: a residue reconstructs
        // exactly when it has a preimage r/s with |r|, |s| <= sqrt(m/2)
        let m = BigInt::from(101);
        for a in 0..101 {
            let a = BigInt::from(a);
            let mut expect = None;
            for s in 1..=7i64 {
                for r in -7..=7i64 {
                    if (BigInt::from(r) - &a * s).mod_floor(&m).is_zero() {
                        expect.get_or_insert(BigRational::new(r.into(), s.into()));
                    }
                }
            }
            assert_eq!(rational_reconstruction(&a, &m), expect, "a = {a}");
        }
    }

    #[test]
    fn large_entries_need_several_primes() {
        let big: i64 = 3_000_000_007;
        let m = SparseMatrix::from_dense(&[vec![big, 1], vec![1, 0], vec![0, 1]]);
        let k = kernel(&m);
        assert_eq!(k, vec![ints(&[-1, big, 1])]);
        assert_eq!(kernel_exact(&m), k);
    }
}
