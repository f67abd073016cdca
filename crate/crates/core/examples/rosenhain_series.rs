//! The Rosenhain triple as exact series, with a JSON round trip.

use humbert::rosenhain::RosenhainSeries;
use humbert::{humbert_params, rosenhain_triple};

fn main() -> humbert::Result<()> {
    let args: Vec<i64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let delta = args.first().copied().unwrap_or(5);
    let n = args.get(1).copied().unwrap_or(20) as u32;

    let r = rosenhain_triple(humbert_params(delta)?, n)?;
    println!("e1 = {}", r.e1);
    println!("e2 = {}", r.e2);
    println!("e3 = {}", r.e3);

    let text = serde_json::to_string(&r.to_record())?;
    let back = RosenhainSeries::from_record(&serde_json::from_str(&text)?)?;
    assert_eq!(back, r);
    println!("record: {} bytes, round trip ok", text.len());
    Ok(())
}
