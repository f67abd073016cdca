use std::collections::BTreeMap;

use humbert::theta::{restricted_theta, ThetaChar, THETA10, THETA8};
use humbert::{humbert_params, rosenhain_triple, Discriminant};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

// The theta constant as a Laurent series in r = e^{2 pi i tau1/8} and q,
// with tau3 = k tau1 + l tau2: the term of n = (u/2, v/2) contributes
// r^(u^2 + k v^2) q^(2uv + l v^2). Substituting r = pq must reproduce the
// restricted expansion.
fn via_rq(ch: ThetaChar, disc: Discriminant, n: i64) -> BTreeMap<(u32, u32), BigInt> {
    let (k, l) = (disc.k() as i64, disc.ell() as i64);
    let mut rq: BTreeMap<(i64, i64), BigInt> = BTreeMap::new();
    let r = 2 * n;
    for x1 in -r..=r {
        for x2 in -r..=r {
            let u = 2 * x1 + ch.a as i64;
            let v = 2 * x2 + ch.b as i64;
            let sign = if (x1 * ch.c as i64 + x2 * ch.d as i64).rem_euclid(2) == 0 {
                1
            } else {
                -1
            };
            *rq.entry((u * u + k * v * v, 2 * u * v + l * v * v))
                .or_default() += sign;
        }
    }
    let mut out = BTreeMap::new();
    for ((a, b), c) in rq {
        // r^a q^b = p^a q^(a + b)
        let (pi, qj) = (a, a + b);
        assert!(qj >= 0, "negative q-exponent after substitution");
        if pi < n && qj < n && !c.is_zero() {
            out.insert((pi as u32, qj as u32), c);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn matches_rq_substitution(delta_idx in 0usize..12, ch_idx in 0usize..6, n in 1i64..24) {
        let deltas = [4, 5, 8, 9, 12, 13, 16, 17, 20, 21, 24, 1];
        let disc = humbert_params(deltas[delta_idx]).unwrap();
        let ch = ThetaChar::ALL[ch_idx];
        let got: BTreeMap<(u32, u32), BigInt> = restricted_theta(ch, disc, n as u32)
            .terms()
            .map(|(e, c)| (e, c.to_integer()))
            .collect();
        prop_assert_eq!(got, via_rq(ch, disc, n));
    }
}

#[test]
fn odd_pair_lies_in_shifted_ideal() {
    for delta in [4, 5, 8, 9, 12, 13, 16, 17, 20, 21, 24] {
        let disc = humbert_params(delta).unwrap();
        let (si, sj) = disc.odd_pair_shift();
        for ch in [THETA8, THETA10] {
            let t = restricted_theta(ch, disc, 40);
            for ((i, j), _) in t.terms() {
                assert!(
                    i >= si && j >= sj,
                    "delta {delta}: term p^{i} q^{j} below shift"
                );
            }
            assert!(t.divide_monomial(si, sj).is_ok());
        }
    }
}

#[test]
fn rosenhain_series_are_integral_in_fourth_powers() {
    for delta in [4, 5, 8, 12, 13] {
        let r = rosenhain_triple(humbert_params(delta).unwrap(), 40).unwrap();
        for e in r.components() {
            assert!(e.is_integral());
            assert!(e.constant_term().is_one());
            for ((i, j), _) in e.terms() {
                assert!(i % 4 == 0 && j % 4 == 0, "delta {delta}: p^{i} q^{j}");
            }
        }
    }
}

#[test]
fn rosenhain_truncation_is_consistent() {
    let disc = humbert_params(8).unwrap();
    let big = rosenhain_triple(disc, 48).unwrap();
    let small = rosenhain_triple(disc, 28).unwrap();
    for (b, s) in big.components().iter().zip(small.components()) {
        assert_eq!(b.truncate(28), *s);
    }
}
