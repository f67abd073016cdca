//! Checks that the shipped degree-16 polynomial for discriminant 12 vanishes
//! identically on the Rosenhain series.

use std::time::Instant;

use humbert::s6::vanishing_conjugate;
use humbert::{fixtures, humbert_params, rosenhain_triple};

fn main() -> humbert::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(100);
    let f = fixtures::h12()?;
    println!(
        "{} terms, degree {}, canonical: {}",
        f.len(),
        f.degree(),
        f.is_canonical()
    );
    println!("symmetric in e1, e2: {}", f.swap_vars(0, 1) == f);

    let start = Instant::now();
    let r = rosenhain_triple(humbert_params(12)?, n)?;
    let value = f.eval_on_series(&r);
    println!(
        "F(e1, e2, e3) = {} mod (p^{n}, q^{n})  [{:.2?}]",
        if value.is_zero() {
            "0".to_string()
        } else {
            value.to_string()
        },
        start.elapsed()
    );
    if !value.is_zero() {
        // the triple may sit on another component of the same orbit
        match vanishing_conjugate(&f, &r)? {
            Some((sigma, g)) => println!("vanishes instead: act({sigma}, F), {} terms", g.len()),
            None => println!("no orbit element vanishes"),
        }
        std::process::exit(1);
    }
    Ok(())
}
