//! Restricted theta expansions on a Humbert surface and their leading terms.

use humbert::humbert_params;
use humbert::theta::{enumerate_lattice, restricted_theta, ThetaChar, THETA8};

fn main() -> humbert::Result<()> {
    let disc = humbert_params(12)?;
    println!("delta {disc}");
    for ch in ThetaChar::ALL {
        let t = restricted_theta(ch, disc, 16);
        println!("theta_{:<2} [{ch}] = {t}", ch.label());
    }

    // theta_8 and theta_10 start at p^(1+k) q^(k+l-1)
    let (i, j) = disc.odd_pair_shift();
    let lead = restricted_theta(THETA8, disc, 16);
    println!(
        "lowest term of theta_8: {:?}, expected exponent ({i}, {j})",
        lead.lowest_term()
    );

    println!("lattice points behind theta_8 below precision 12:");
    for pt in enumerate_lattice(THETA8, disc, 12) {
        println!(
            "  x = ({:>2}, {:>2})  sign {:>2}  p^{} q^{}",
            pt.x1, pt.x2, pt.sign, pt.p_exp, pt.q_exp
        );
    }
    Ok(())
}
