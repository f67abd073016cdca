//! Floating-point evaluation of theta constants, used as an independent
//! check on the exact series.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::rosenhain::{rosenhain_triple, RosenhainSeries};
use crate::theta::{
    restricted_theta, Discriminant, ThetaChar, THETA1, THETA10, THETA2, THETA3, THETA4, THETA8,
};

/// Upper bound on rejected samples per point.
pub const MAX_RESAMPLES: usize = 1000;

/// Denominator thetas below this modulus are treated as vanishing.
pub const DENOMINATOR_FLOOR: f64 = 1e-10;

/// Default absolute tolerance for [`theta_direct`].
pub const THETA_TOL: f64 = 1e-15;

/// A point `tau = [[tau1, tau2], [tau2, tau3]]` of the Siegel upper half
/// space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiegelPoint {
    pub tau1: Complex64,
    pub tau2: Complex64,
    pub tau3: Complex64,
}

impl SiegelPoint {
    pub fn new(tau1: Complex64, tau2: Complex64, tau3: Complex64) -> Result<SiegelPoint> {
        let p = SiegelPoint { tau1, tau2, tau3 };
        if p.min_eigenvalue() <= 0.0 {
            return Err(Error::NonConvergent);
        }
        Ok(p)
    }

    pub fn det_imag(&self) -> f64 {
        self.tau1.im * self.tau3.im - self.tau2.im * self.tau2.im
    }

    /// Smallest eigenvalue of `Im tau`.
    pub fn min_eigenvalue(&self) -> f64 {
        let (a, b, c) = (self.tau1.im, self.tau2.im, self.tau3.im);
        let mean = (a + c) / 2.0;
        let r = (((a - c) / 2.0).powi(2) + b * b).sqrt();
        mean - r
    }

    /// Entrywise complex conjugate of `-tau`, the reflection that negates
    /// real parts.
    pub fn reflect(&self) -> SiegelPoint {
        let f = |z: Complex64| Complex64::new(-z.re, z.im);
        SiegelPoint {
            tau1: f(self.tau1),
            tau2: f(self.tau2),
            tau3: f(self.tau3),
        }
    }

    /// `(p, q) = (e^{2 pi i (tau1 - tau2)/8}, e^{2 pi i tau2/8})`.
    pub fn pq(&self) -> (Complex64, Complex64) {
        let e = |z: Complex64| (Complex64::i() * 2.0 * PI * z / 8.0).exp();
        (e(self.tau1 - self.tau2), e(self.tau2))
    }
}

/// Box radius `B` such that lattice points of max-norm above `B` contribute
/// less than `tol`, using `|term| <= exp(-pi lambda |n|^2)` and
/// `|n| >= r - 1/2` on the shell of max-norm `r`, which has `8r` points.
pub fn box_bound(lambda: f64, tol: f64) -> usize {
    let shell = |r: usize| 8.0 * r as f64 * (-PI * lambda * (r as f64 - 0.5).powi(2)).exp();
    // shells shrink monotonically beyond this radius
    let peak = (0.5 + 1.0 / (2.0 * PI * lambda).sqrt()).ceil() as usize;
    let tail = |b: usize| {
        let mut sum = 0.0;
        let mut r = b + 1;
        loop {
            let t = shell(r);
            sum += t;
            if r > peak && t < tol * 1e-6 {
                return sum;
            }
            r += 1;
        }
    };
    let mut b = 1;
    while tail(b) >= tol {
        b += 1;
    }
    b
}

/// Lattice points of max-norm exactly `r` in a fixed order.
fn shell(r: i64) -> Vec<(i64, i64)> {
    if r == 0 {
        return vec![(0, 0)];
    }
    let mut out = Vec::with_capacity(8 * r as usize);
    for x in -r..=r {
        out.push((x, -r));
    }
    for y in -r + 1..=r {
        out.push((r, y));
    }
    for x in (-r..r).rev() {
        out.push((x, r));
    }
    for y in (-r + 1..r).rev() {
        out.push((-r, y));
    }
    out
}

/// The theta constant with characteristic `ch` at `tau`, summed over the
/// box of radius [`box_bound`] shell by shell.
pub fn theta_direct(pt: &SiegelPoint, ch: ThetaChar, tol: f64) -> Result<Complex64> {
    let lambda = pt.min_eigenvalue();
    if lambda.is_nan() || lambda <= 0.0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::NonConvergent);
    }
    let b = box_bound(lambda, tol) as i64;
    Ok(theta_box(pt, ch, b))
}

/// Sum over `|x_i| <= b`.
pub fn theta_box(pt: &SiegelPoint, ch: ThetaChar, b: i64) -> Complex64 {
    let (a, bb, c, d) = (ch.a as f64, ch.b as f64, ch.c as f64, ch.d as f64);
    let i = Complex64::i();
    let mut sum = Complex64::new(0.0, 0.0);
    for r in 0..=b {
        for (x1, x2) in shell(r) {
            let n1 = x1 as f64 + a / 2.0;
            let n2 = x2 as f64 + bb / 2.0;
            let quad = pt.tau1 * n1 * n1 + pt.tau2 * 2.0 * n1 * n2 + pt.tau3 * n2 * n2;
            let lin = n1 * c / 2.0 + n2 * d / 2.0;
            sum += (i * PI * quad + i * 2.0 * PI * lin).exp();
        }
    }
    sum
}

/// A random point on the Humbert surface `tau3 = k tau1 + l tau2`.
pub fn sample_humbert_point(disc: Discriminant, seed: u64) -> Result<SiegelPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, l) = (disc.k() as f64, disc.ell() as f64);
    for _ in 0..MAX_RESAMPLES {
        let x1 = rng.gen_range(-0.5..0.5);
        let x2 = rng.gen_range(-0.5..0.5);
        let y1 = rng.gen_range(1.5..2.5);
        let y2 = rng.gen_range(0.2..0.6);
        let tau1 = Complex64::new(x1, y1);
        let tau2 = Complex64::new(x2, y2);
        let tau3 = tau1 * k + tau2 * l;
        let pt = SiegelPoint { tau1, tau2, tau3 };
        if y1 > y2 && y2 > 0.0 && pt.det_imag() > 0.0 && pt.min_eigenvalue() > 0.0 {
            return Ok(pt);
        }
    }
    Err(Error::SamplingExhausted(MAX_RESAMPLES))
}

/// `(e1, e2, e3)` from directly summed theta constants.
pub fn rosenhain_numeric(pt: &SiegelPoint, tol: f64) -> Result<[Complex64; 3]> {
    let th = |ch| theta_direct(pt, ch, tol);
    let (t1, t2, t3, t4) = (th(THETA1)?, th(THETA2)?, th(THETA3)?, th(THETA4)?);
    let (t8, t10) = (th(THETA8)?, th(THETA10)?);
    for (name, t) in [("theta_2", t2), ("theta_4", t4), ("theta_10", t10)] {
        if t.norm() < DENOMINATOR_FLOOR {
            return Err(Error::NearVanishingDenominator(name));
        }
    }
    let sq = |z: Complex64| z * z;
    Ok([
        sq(t1) * sq(t3) / (sq(t2) * sq(t4)),
        sq(t3) * sq(t8) / (sq(t4) * sq(t10)),
        sq(t1) * sq(t8) / (sq(t2) * sq(t10)),
    ])
}

/// Relative error between the truncated restricted expansion at
/// `(p, q)` and the direct sum. The expansion omits the phase
/// `i^(ac+bd)`, which is restored here.
pub fn expansion_vs_direct(
    disc: Discriminant,
    ch: ThetaChar,
    pt: &SiegelPoint,
    n: u32,
) -> Result<f64> {
    let direct = theta_direct(pt, ch, THETA_TOL)?;
    let (p, q) = pt.pq();
    let phase = Complex64::i().powu(ch.phase_quarter_turns() as u32);
    let series = phase * restricted_theta(ch, disc, n).evaluate(p, q);
    Ok((series - direct).norm() / direct.norm())
}

/// Largest relative difference between the exact Rosenhain series at
/// precision `n`, evaluated at `(p, q)`, and [`rosenhain_numeric`].
pub fn rosenhain_vs_series(disc: Discriminant, pt: &SiegelPoint, n: u32) -> Result<f64> {
    rosenhain_vs_triple(&rosenhain_triple(disc, n)?, pt)
}

/// As [`rosenhain_vs_series`] with the series already computed.
pub fn rosenhain_vs_triple(r: &RosenhainSeries, pt: &SiegelPoint) -> Result<f64> {
    let (p, q) = pt.pq();
    let num = rosenhain_numeric(pt, THETA_TOL)?;
    Ok(r.components()
        .iter()
        .zip(num)
        .map(|(s, z)| (s.evaluate(p, q) - z).norm() / z.norm())
        .fold(0.0, f64::max))
}

/// `|F(e)| / (sum |c| * max(1, |e|)^deg F)`.
pub fn relative_residual(f: &MultiPoly, e: [Complex64; 3]) -> f64 {
    let scale_base = e.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mass: f64 = f
        .terms()
        .map(|(_, c)| c.to_f64().unwrap_or(f64::MAX).abs())
        .sum();
    let scale = mass * scale_base.powi(f.degree() as i32);
    f.eval_complex(e).norm() / scale
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub seed: u64,
    /// `(re, im)` of `tau1, tau2, tau3`.
    pub tau: [(f64, f64); 3],
    pub e: [(f64, f64); 3],
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub delta: u64,
    pub trials: usize,
    pub tol: f64,
    pub max_residual: f64,
    pub passed: bool,
    pub points: Vec<SamplePoint>,
}

pub const VERIFY_SCHEMA: &str = "humbert.verify.v1";

/// Seed of the `i`-th attempt for trial `t`; disjoint across trials.
fn trial_seed(seed: u64, t: usize, attempt: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((t as u64) << 20)
        .wrapping_add(attempt as u64)
}

/// Samples `trials` points of the surface and checks that `f` nearly
/// vanishes at each of their Rosenhain values.
pub fn verify_component(
    f: &MultiPoly,
    disc: Discriminant,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VerifyReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let points: Vec<SamplePoint> = (0..trials)
        .into_par_iter()
        .map(|t| {
            for attempt in 0..MAX_RESAMPLES {
                let s = trial_seed(seed, t, attempt);
                let pt = sample_humbert_point(disc, s)?;
                match rosenhain_numeric(&pt, THETA_TOL) {
                    Ok(e) => {
                        let pair = |z: Complex64| (z.re, z.im);
                        return Ok(SamplePoint {
                            seed: s,
                            tau: [pair(pt.tau1), pair(pt.tau2), pair(pt.tau3)],
                            e: e.map(pair),
                            residual: relative_residual(f, e),
                        });
                    }
                    Err(Error::NearVanishingDenominator(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::SamplingExhausted(MAX_RESAMPLES))
        })
        .collect::<Result<_>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(VerifyReport {
        schema: VERIFY_SCHEMA.to_string(),
        delta: disc.delta(),
        trials,
        tol,
        max_residual,
        passed: max_residual < tol,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::humbert_params;

    #[test]
    fn shells_cover_box() {
        let mut all: Vec<(i64, i64)> = (0..=3).flat_map(shell).collect();
        assert_eq!(all.len(), 49);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 49);
    }

    #[test]
    fn sampler_geometry() {
        let d = humbert_params(12).unwrap();
        let pt = sample_humbert_point(d, 7).unwrap();
        assert_eq!(pt.tau3, pt.tau1 * 3.0);
        let d5 = humbert_params(5).unwrap();
        let pt = sample_humbert_point(d5, 7).unwrap();
        assert_eq!(pt.tau3, pt.tau1 + pt.tau2);
        assert!(pt.det_imag() > 0.0);
        assert_eq!(sample_humbert_point(d5, 7).unwrap(), pt);
    }

    #[test]
    fn rejects_degenerate_point() {
        let z = Complex64::new(0.0, 1.0);
        assert_eq!(SiegelPoint::new(z, z, z), Err(Error::NonConvergent));
    }

    #[test]
    fn residual_scale() {
        let f = MultiPoly::parse("e_1 - 2").unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!((relative_residual(&f, [one * 2.0, one, one]) - 0.0).abs() < 1e-15);
        // |1 - 2| / (3 * 1)
        assert!((relative_residual(&f, [one, one, one]) - 1.0 / 3.0).abs() < 1e-15);
    }
}
