//! Prints component counts and degrees for small discriminants and checks
//! the divisor-sum identity behind them.

use humbert::degrees::{a_delta, deg_fstar, degree_table, m_components};

fn main() -> humbert::Result<()> {
    println!(
        "{:>5} {:>3} {:>8} {:>7} {:>6}",
        "delta", "m", "a_delta", "deg F*", "deg F"
    );
    for row in degree_table(40)? {
        let affine = row.deg_conjectured.map_or("-".into(), |d| d.to_string());
        println!(
            "{:>5} {:>3} {:>8} {:>7} {:>6}",
            row.delta, row.m, row.a_delta, row.deg_fstar, affine
        );
    }

    // a_delta is recovered from the primitive degrees of delta / x^2
    let delta = 36;
    let mut total = 0;
    for x in 1..=6u64 {
        let sub = delta / (x * x);
        if delta % (x * x) == 0 && matches!(sub % 4, 0 | 1) {
            total += m_components(sub)? * deg_fstar(sub)?;
        }
    }
    assert_eq!(total, a_delta(delta)?);
    println!("a_36 = {total} from the recursion");
    Ok(())
}
