use std::f64::consts::PI;

use humbert::numeric::{
    box_bound, expansion_vs_direct, rosenhain_numeric, rosenhain_vs_series, sample_humbert_point,
    theta_box, theta_direct, verify_component, SiegelPoint, THETA_TOL,
};
use humbert::theta::{THETA1, THETA10};
use humbert::{fixtures, humbert_params, Error, MultiPoly, ThetaChar};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// One-variable sums for a diagonal period matrix diag(i t, i t).
fn theta_even(t: f64) -> f64 {
    (-60..=60)
        .map(|n: i64| (-PI * t * (n * n) as f64).exp())
        .sum()
}

fn theta_half_alternating(t: f64) -> Complex64 {
    // sum over n in Z + 1/2 of exp(pi i n^2 (i t)) exp(pi i n)
    (-60..=60)
        .map(|m: i64| {
            let n = m as f64 + 0.5;
            c(0.0, PI * n).exp() * (-PI * t * n * n).exp()
        })
        .sum()
}

#[test]
fn split_point_factorizes() {
    let pt = SiegelPoint::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 1.0)).unwrap();
    let v = theta_direct(&pt, THETA1, 1e-15).unwrap();
    let expect = theta_even(1.0).powi(2);
    assert!((v - expect).norm() < 1e-13);

    let t = 1.3;
    let pt = SiegelPoint::new(c(0.0, t), c(0.0, 0.0), c(0.0, t)).unwrap();
    let v = theta_direct(&pt, THETA10, 1e-15).unwrap();
    let one = theta_half_alternating(t);
    assert!((v - one * one).norm() < 1e-13);
}

#[test]
fn doubling_the_box_is_stable() {
    for seed in 0..10 {
        let pt =
            sample_humbert_point(humbert_params(5 + 4 * (seed % 3) as i64).unwrap(), seed).unwrap();
        let b = box_bound(pt.min_eigenvalue(), 1e-12) as i64;
        for ch in ThetaChar::ALL {
            let v = theta_direct(&pt, ch, 1e-12).unwrap();
            let w = theta_box(&pt, ch, 2 * b);
            assert!((v - w).norm() < 1e-12, "seed {seed} {ch}");
        }
    }
}

#[test]
fn non_positive_imaginary_part_is_rejected() {
    let bad = SiegelPoint {
        tau1: c(0.0, 1.0),
        tau2: c(0.0, 2.0),
        tau3: c(0.0, 1.0),
    };
    assert_eq!(theta_direct(&bad, THETA1, 1e-10), Err(Error::NonConvergent));
}

#[test]
fn truncation_error_decreases() {
    let disc = humbert_params(12).unwrap();
    let pt = sample_humbert_point(disc, 3).unwrap();
    for ch in ThetaChar::ALL {
        let coarse = expansion_vs_direct(disc, ch, &pt, 4).unwrap();
        let fine = expansion_vs_direct(disc, ch, &pt, 60).unwrap();
        assert!(fine < coarse, "{ch}: {fine} vs {coarse}");
        assert!(fine < 1e-6);
    }
}

#[test]
fn rosenhain_values_are_generic_and_reflect() {
    for delta in [4, 5, 12] {
        let pt = sample_humbert_point(humbert_params(delta).unwrap(), 11).unwrap();
        let e = rosenhain_numeric(&pt, THETA_TOL).unwrap();
        for i in 0..3 {
            assert!(e[i].norm() > 1e-8 && (e[i] - 1.0).norm() > 1e-10);
            for j in 0..i {
                assert!((e[i] - e[j]).norm() > 1e-8);
            }
        }
        let r = rosenhain_numeric(&pt.reflect(), THETA_TOL).unwrap();
        for i in 0..3 {
            assert!((r[i] - e[i].conj()).norm() < 1e-10 * e[i].norm());
        }
    }
}

#[test]
fn exact_series_agree_with_direct_sums() {
    for delta in [4, 5, 12] {
        let disc = humbert_params(delta).unwrap();
        let pt = sample_humbert_point(disc, 5).unwrap();
        assert!(rosenhain_vs_series(disc, &pt, 200).unwrap() < 1e-6);
    }
}

#[test]
fn golden_polynomial_positive_and_negative_control() {
    let h = fixtures::h12().unwrap();
    let on = verify_component(&h, humbert_params(12).unwrap(), 20, 1e-6, 1).unwrap();
    assert!(on.passed && on.max_residual < 1e-12);
    let off = verify_component(&h, humbert_params(5).unwrap(), 20, 1e-6, 1).unwrap();
    assert!(!off.passed);
    assert_eq!(
        verify_component(&MultiPoly::zero(), humbert_params(12).unwrap(), 1, 1e-6, 0).unwrap_err(),
        Error::ZeroPolynomial
    );
}

#[test]
fn verification_is_deterministic() {
    let f = MultiPoly::parse("e_1*e_2 - e_3").unwrap();
    let a = verify_component(&f, humbert_params(4).unwrap(), 5, 1e-6, 9).unwrap();
    let b = verify_component(&f, humbert_params(4).unwrap(), 5, 1e-6, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.passed);
}
