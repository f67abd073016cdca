//! Finds the component equation for a discriminant by exact linear algebra.
//!
//! ```text
//! cargo run --release --example find_relation -- 8 8
//! cargo run --release --example find_relation -- 12 16 sym
//! ```

use std::time::Instant;

use humbert::relation::{find_relation, FindOptions, VarSwap};

fn main() -> humbert::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let delta = args.first().and_then(|a| a.parse().ok()).unwrap_or(5);
    let degree = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let opts = FindOptions {
        precision: None,
        symmetry: args.iter().any(|a| a == "sym").then_some(VarSwap::E1E2),
    };

    let start = Instant::now();
    let report = find_relation(delta, degree, &opts)?;
    let f = report.polynomial.as_ref().expect("unique relation");
    println!(
        "delta {delta}, degree {degree}: precision {}, {} unknowns, {} columns, {:.2?}",
        report.precision,
        report.monomial_count,
        report.column_count,
        start.elapsed()
    );
    println!("confirmed at {:?}", report.residual_checks);
    println!("{} terms", f.len());
    if f.len() <= 40 {
        println!("{f}");
    }
    Ok(())
}
