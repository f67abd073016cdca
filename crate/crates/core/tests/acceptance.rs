//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one PASS or FAIL line; the process exits
//! non-zero if any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use humbert::degrees::{a_delta, deg_fstar, degree_table, m_components};
use humbert::numeric::{
    expansion_vs_direct, rosenhain_vs_triple, sample_humbert_point, verify_component,
};
use humbert::relation::{find_relation, FindOptions, VarSwap};
use humbert::s6::{
    act, closure, conjugate, conjugator, fixed_group, group_g, orbit, stabilizer_generators, Perm6,
};
use humbert::series::TruncatedSeries;
use humbert::theta::{restricted_theta, THETA1, THETA10, THETA2, THETA3, THETA4, THETA8};
use humbert::{fixtures, humbert_params, rosenhain_triple, MultiPoly, ThetaChar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

// Pinned thresholds.
const DEGREE_TABLE_LIMIT: Duration = Duration::from_secs(1);
const SIEGEL_LIMIT: Duration = Duration::from_secs(1);
const THETA_LIMIT: Duration = Duration::from_secs(5);
const GOLDEN_LIMIT: Duration = Duration::from_secs(600);
const SMALL_RELATION_LIMIT: Duration = Duration::from_secs(600);
const DELTA12_LIMIT: Duration = Duration::from_secs(3600);
const FIXED_GROUP_LIMIT: Duration = Duration::from_secs(600);
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const GOLDEN_PRECISION: u32 = 100;
const VERIFY_TRIALS: usize = 20;
const VERIFY_TOL: f64 = 1e-6;
const VERIFY_SEED: u64 = 0;
const THETA_PRECISION: u32 = 60;
const ORACLE_TOL: f64 = 1e-6;
const ORACLE_SAMPLES: u64 = 5;
// the Rosenhain quotients converge more slowly in q than the thetas
const ROSENHAIN_PRECISION: u32 = 200;
const PROPERTY_CASES: u32 = 200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type RelationCache = Vec<((i64, u32), Result<MultiPoly, String>)>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t <= limit, format!("took {t:.2?}, limit {limit:?}"))
}

static RELATIONS: Mutex<RelationCache> = Mutex::new(Vec::new());

fn relation(delta: i64, d: u32) -> Result<MultiPoly, String> {
    if let Some((_, r)) = RELATIONS
        .lock()
        .unwrap()
        .iter()
        .find(|(k, _)| *k == (delta, d))
    {
        return r.clone();
    }
    let r = find_relation(delta, d, &FindOptions::default())
        .map_err(|e| e.to_string())
        .and_then(|rep| {
            check(
                rep.kernel_dim == 1,
                format!("kernel dimension {}", rep.kernel_dim),
            )?;
            rep.polynomial.ok_or_else(|| "no polynomial".to_string())
        });
    RELATIONS.lock().unwrap().push(((delta, d), r.clone()));
    r
}

fn degree_table_matches() -> Outcome {
    let start = Instant::now();
    let rows = degree_table(24).map_err(|e| e.to_string())?;
    within(start, DEGREE_TABLE_LIMIT)?;
    let deltas: Vec<u64> = rows.iter().map(|r| r.delta).collect();
    let degs: Vec<u64> = rows.iter().map(|r| r.deg_fstar).collect();
    check(
        deltas == [1, 4, 5, 8, 9, 12, 13, 16, 17, 20, 21, 24],
        format!("discriminants {deltas:?}"),
    )?;
    check(
        degs == [1, 4, 8, 8, 24, 16, 40, 32, 48, 32, 80, 48],
        format!("degrees {degs:?}"),
    )?;
    for r in &rows {
        let m = match r.delta % 8 {
            1 => 10,
            5 => 6,
            _ => 15,
        };
        check(r.m == m, format!("m({}) = {}", r.delta, r.m))?;
    }
    Ok(format!("{} rows in {:.2?}", rows.len(), start.elapsed()))
}

fn siegel_consistency() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for delta in (1..=200u64).filter(|d| d % 4 <= 1) {
        let direct = a_delta(delta).map_err(|e| e.to_string())?;
        let mut recursed = 0;
        let mut x = 1;
        while x * x <= delta {
            let sub = delta / (x * x);
            if delta % (x * x) == 0 && sub % 4 <= 1 {
                recursed += m_components(sub).unwrap() * deg_fstar(sub).unwrap();
            }
            x += 1;
        }
        check(
            direct == recursed,
            format!("delta {delta}: {direct} vs {recursed}"),
        )?;
        count += 1;
    }
    within(start, SIEGEL_LIMIT)?;
    Ok(format!("{count} discriminants in {:.2?}", start.elapsed()))
}

fn theta_leading_terms() -> Outcome {
    let start = Instant::now();
    let two = BigRational::from_integer(BigInt::from(2));
    for delta in [4, 5, 8, 12, 13] {
        let disc = humbert_params(delta).unwrap();
        let (k, l) = (disc.k() as u32, disc.ell() as u32);
        let (i0, j0) = (1 + k, k + l - 1);
        let n = 24;
        for (ch, sign) in [(THETA8, two.clone()), (THETA10, -two.clone())] {
            let t = restricted_theta(ch, disc, n);
            check(
                t.coeff(i0, j0) == sign,
                format!(
                    "delta {delta} {ch}: p^{i0} q^{j0} coefficient {}",
                    t.coeff(i0, j0)
                ),
            )?;
            check(
                t.terms().all(|((i, j), _)| i >= i0 && j >= j0),
                format!("delta {delta} {ch}: term below p^{i0} q^{j0}"),
            )?;
        }
        for ch in [THETA1, THETA2, THETA3, THETA4] {
            let t = restricted_theta(ch, disc, n);
            check(
                t.constant_term() == BigRational::from_integer(1.into()),
                format!("delta {delta} {ch}: constant term"),
            )?;
        }
    }
    within(start, THETA_LIMIT)?;
    Ok(format!("five discriminants in {:.2?}", start.elapsed()))
}

fn golden_fixture() -> Outcome {
    let start = Instant::now();
    let h = fixtures::h12().map_err(|e| e.to_string())?;
    let r = rosenhain_triple(humbert_params(12).unwrap(), GOLDEN_PRECISION)
        .map_err(|e| e.to_string())?;
    let value = h.eval_on_series(&r);
    check(
        value.is_zero(),
        format!("{} non-zero terms remain", value.len()),
    )?;
    within(start, GOLDEN_LIMIT)?;
    Ok(format!(
        "{} terms vanish to precision {GOLDEN_PRECISION} in {:.2?}",
        h.len(),
        start.elapsed()
    ))
}

fn small_relations() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (delta, d, size) in [(4i64, 4u32, 15usize), (8, 8, 15), (5, 8, 6)] {
        let start = Instant::now();
        let res = (|| -> Result<String, String> {
            let f = relation(delta, d)?;
            within(start, SMALL_RELATION_LIMIT)?;
            let disc = humbert_params(delta).unwrap();
            let rep = verify_component(&f, disc, VERIFY_TRIALS, VERIFY_TOL, VERIFY_SEED)
                .map_err(|e| e.to_string())?;
            check(rep.passed, format!("max residual {:.2e}", rep.max_residual))?;
            let orb = orbit(&f).map_err(|e| e.to_string())?;
            check(orb.len() == size, format!("orbit size {}", orb.len()))?;
            check(
                size as u64 == m_components(delta as u64).unwrap(),
                "m mismatch",
            )?;
            Ok(format!(
                "delta {delta} d {d}: {} terms, residual {:.1e}, orbit {}",
                f.len(),
                rep.max_residual,
                orb.len()
            ))
        })();
        match res {
            Ok(s) => notes.push(s),
            Err(e) => failures.push(format!("delta {delta} d {d}: {e}")),
        }
    }
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!(
            "{} [passed: {}]",
            failures.join("; "),
            notes.join("; ")
        ))
    }
}

fn delta12_relation() -> Outcome {
    let start = Instant::now();
    let opts = FindOptions {
        precision: None,
        symmetry: Some(VarSwap::E1E2),
    };
    let rep = find_relation(12, 16, &opts).map_err(|e| e.to_string())?;
    within(start, DELTA12_LIMIT)?;
    let f = rep.polynomial.ok_or("no polynomial")?;
    let h = fixtures::h12().unwrap().normalize().unwrap();
    check(f == h, "found relation differs from the fixture")?;
    Ok(format!(
        "{} classes, precision {}, {:.2?}",
        rep.monomial_count,
        rep.precision,
        start.elapsed()
    ))
}

fn fixed_groups() -> Outcome {
    let start = Instant::now();
    let h12 = fixtures::h12().unwrap();
    let g12 = fixed_group(&h12).map_err(|e| e.to_string())?;
    check(
        g12.len() == 48,
        format!("order of Fix(h12) is {}", g12.len()),
    )?;
    check(
        group_g().iter().all(|x| g12.contains(x)),
        "Fix(h12) misses a generator of G",
    )?;

    let h5 = relation(5, 8)?;
    let g5 = fixed_group(&h5).map_err(|e| e.to_string())?;
    check(g5.len() == 120, format!("order of Fix(h5) is {}", g5.len()))?;

    let h8 = relation(8, 8)?;
    let g8: BTreeSet<Perm6> = fixed_group(&h8)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    let c = conjugator();
    let conj: BTreeSet<Perm6> = closure(&group_g())
        .iter()
        .map(|x| conjugate(x, &c))
        .collect();
    check(
        g8 == conj,
        format!(
            "Fix(h8) has order {} and is not the conjugate of G",
            g8.len()
        ),
    )?;

    let mut orders = HashMap::new();
    for delta in [4u64, 8, 12, 16, 9, 17, 5, 13] {
        let n = closure(&stabilizer_generators(delta).unwrap()).len();
        let expected = match delta % 8 {
            1 => 72,
            5 => 120,
            _ => 48,
        };
        check(
            n == expected,
            format!("closure for delta {delta} has order {n}"),
        )?;
        orders.insert(delta % 8, n);
    }
    within(start, FIXED_GROUP_LIMIT)?;
    Ok(format!(
        "48 / 120 / conjugate 48, closures {:?}, {:.2?}",
        {
            let mut v: Vec<_> = orders.into_iter().collect();
            v.sort();
            v
        },
        start.elapsed()
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst_theta = 0.0f64;
    let mut worst_rosenhain = 0.0f64;
    for delta in [4, 5, 12] {
        let disc = humbert_params(delta).unwrap();
        let triple = rosenhain_triple(disc, ROSENHAIN_PRECISION).map_err(|e| e.to_string())?;
        for seed in 0..ORACLE_SAMPLES {
            let pt = sample_humbert_point(disc, seed).map_err(|e| e.to_string())?;
            for ch in ThetaChar::ALL {
                let err = expansion_vs_direct(disc, ch, &pt, THETA_PRECISION)
                    .map_err(|e| e.to_string())?;
                check(
                    err < ORACLE_TOL,
                    format!("delta {delta} seed {seed} {ch}: {err:.2e}"),
                )?;
                worst_theta = worst_theta.max(err);
            }
            let err = rosenhain_vs_triple(&triple, &pt).map_err(|e| e.to_string())?;
            check(
                err < ORACLE_TOL,
                format!("delta {delta} seed {seed} rosenhain: {err:.2e}"),
            )?;
            worst_rosenhain = worst_rosenhain.max(err);
        }
    }
    within(start, ORACLE_LIMIT)?;
    Ok(format!(
        "theta worst {worst_theta:.1e}, rosenhain worst {worst_rosenhain:.1e}, {:.2?}",
        start.elapsed()
    ))
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

fn series(n: u32) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec((0..n, 0..n, -1000i64..=1000), 0..10).prop_map(move |ts| {
        TruncatedSeries::from_int_terms(n, ts.into_iter().map(|(i, j, c)| ((i, j), c)))
    })
}

fn poly(max_deg: u32, terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(
        ((0..=max_deg, 0..=max_deg, 0..=max_deg), -20i64..=20),
        1..terms,
    )
    .prop_map(|ts| {
        MultiPoly::from_terms(
            ts.into_iter()
                .map(|((a, b, c), k)| ([a, b, c], BigInt::from(k))),
        )
    })
}

fn component() -> impl Strategy<Value = MultiPoly> {
    poly(1, 5).prop_filter_map("non-degenerate", |f| {
        humbert::poly::strip_degenerate_factors(&f).ok()
    })
}

fn perm() -> impl Strategy<Value = Perm6> {
    (0usize..720).prop_map(|i| Perm6::all()[i])
}

fn property_suites() -> Outcome {
    let n = 8;
    let mut done = Vec::new();
    let mut run = |name: &str, r: Result<(), String>| -> Result<(), String> {
        r.map_err(|e| format!("{name}: {e}"))?;
        done.push(name.to_string());
        Ok(())
    };
    run(
        "ring axioms",
        runner()
            .run(&(series(n), series(n), series(n)), |(a, b, c)| {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a + &b, &b + &a);
                prop_assert_eq!(&a * &TruncatedSeries::one(n), a.clone());
                prop_assert!((&a + &(-&a)).is_zero());
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "inverse",
        runner()
            .run(
                &(series(n), prop_oneof![Just(1i64), Just(-1), Just(3)]),
                |(a, c0)| {
                    let u = &a.truncate(n)
                        + &TruncatedSeries::constant(BigRational::from_integer(c0.into()), n);
                    prop_assume!(!u.constant_term().eq(&BigRational::from_integer(0.into())));
                    let inv = u.inverse().unwrap();
                    prop_assert_eq!(&u * &inv, TruncatedSeries::one(n));
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;
    run(
        "monomial division",
        runner()
            .run(&(series(n), 0u32..4, 0u32..4), |(a, i, j)| {
                let m = TruncatedSeries::monomial(i, j, BigRational::from_integer(1.into()), n + 4);
                let lifted =
                    TruncatedSeries::from_terms(n + 4, a.terms().map(|(e, c)| (e, c.clone())));
                let back = (&lifted * &m).divide_monomial(i, j).unwrap().truncate(n);
                prop_assert_eq!(back, a);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "normalize idempotence",
        runner()
            .run(&(poly(4, 10), -5i64..=5), |(f, s)| {
                prop_assume!(!f.is_zero() && s != 0);
                let g = f.normalize().unwrap();
                prop_assert_eq!(g.normalize().unwrap(), g.clone());
                prop_assert_eq!(f.scale(&BigInt::from(s)).normalize().unwrap(), g);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "S6 action laws",
        runner()
            .run(&(component(), perm(), perm()), |(f, a, b)| {
                let f = f.normalize().unwrap();
                prop_assert_eq!(act(&Perm6::identity(), &f).unwrap(), f.clone());
                let lhs = act(&a.compose(&b), &f).unwrap();
                prop_assert_eq!(lhs, act(&a, &act(&b, &f).unwrap()).unwrap());
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "orbit-stabilizer",
        runner()
            .run(&component(), |f| {
                let orb = humbert::s6::orbit_table(&f).unwrap();
                let stab = orb
                    .image_indices()
                    .into_iter()
                    .filter(|(_, i)| *i == 0)
                    .count();
                prop_assert_eq!(orb.len() * stab, 720);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    Ok(format!(
        "{} suites x {PROPERTY_CASES} cases: {}",
        done.len(),
        done.join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("degree table", degree_table_matches),
        ("Siegel consistency", siegel_consistency),
        ("theta leading terms", theta_leading_terms),
        ("golden fixture", golden_fixture),
        ("small-discriminant relations", small_relations),
        ("delta 12 relation", delta12_relation),
        ("fixed groups", fixed_groups),
        ("oracle equivalence", oracle_equivalence),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
