//! Compares the exact series against directly summed theta constants at
//! random points of a Humbert surface.

use humbert::numeric::{
    expansion_vs_direct, rosenhain_numeric, sample_humbert_point, verify_component, THETA_TOL,
};
use humbert::{fixtures, humbert_params, ThetaChar};

fn main() -> humbert::Result<()> {
    let disc = humbert_params(12)?;
    let pt = sample_humbert_point(disc, 2024)?;
    let (p, q) = pt.pq();
    println!(
        "tau1 = {:.4}, tau2 = {:.4}, |p| = {:.3}, |q| = {:.3}",
        pt.tau1,
        pt.tau2,
        p.norm(),
        q.norm()
    );

    for ch in ThetaChar::ALL {
        let err = expansion_vs_direct(disc, ch, &pt, 60)?;
        println!("theta_{:<2} relative error {err:.2e}", ch.label());
    }
    let e = rosenhain_numeric(&pt, THETA_TOL)?;
    println!("e = ({:.6}, {:.6}, {:.6})", e[0], e[1], e[2]);

    let h12 = fixtures::h12()?;
    for delta in [12, 5] {
        let rep = verify_component(&h12, humbert_params(delta)?, 20, 1e-6, 1)?;
        println!(
            "h12 at delta {delta}: max residual {:.2e}, pass {}",
            rep.max_residual, rep.passed
        );
    }
    Ok(())
}
