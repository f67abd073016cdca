//! Orbits and stabilizers of components under the S6 action.

use humbert::relation::{find_relation, FindOptions};
use humbert::s6::{act, closure, fixed_group, orbit_table, stabilizer_generators, Perm6};

fn main() -> humbert::Result<()> {
    let f = find_relation(4, 2, &FindOptions::default())?
        .polynomial
        .expect("unique relation");
    println!("component for delta 4: {f}");

    let sigma: Perm6 = "(0,1)".parse()?;
    println!("(0,1) sends it to {}", act(&sigma, &f)?);

    let orbit = orbit_table(&f)?;
    println!("orbit of size {}:", orbit.len());
    for g in &orbit.elements {
        println!("  {g}");
    }

    let stab = fixed_group(&f)?;
    println!("stabilizer of order {}", stab.len());
    let gens = stabilizer_generators(4)?;
    let generated = closure(&gens);
    println!(
        "generated by {} ({} elements): {}",
        gens.iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        generated.len(),
        generated == stab
    );
    Ok(())
}
