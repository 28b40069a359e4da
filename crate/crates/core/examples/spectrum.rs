//! Factor the characteristic polynomial at the coexistence equilibrium into a
//! real root and a quadratic, and compare with the `A, B, C` reduction that
//! holds when all removal rates coincide.
//!
//! Run with `cargo run --example spectrum`.

use chemostat::cubic;
use chemostat::{presets, stability};

fn main() -> chemostat::Result<()> {
    let p = presets::holling2_equal_removal().with_mu(0.65)?;
    let c = stability::char_coeffs_e2(&p)?;
    let (a1, a2, a3) = c.routh_hurwitz_symbols();
    println!("a1 = {a1:.6}, a2 = {a2:.6}, a3 = {a3:.6}, a1 a2 - a3 = {:.3e}", a1 * a2 - a3);
    println!("Routh-Hurwitz: {:?}", cubic::routh_hurwitz(&c)?);

    for z in cubic::eigenvalues(&c) {
        println!("  eigenvalue {:.10} {:+.10}i", z.re, z.im);
    }

    let f = cubic::factorize(&c)?;
    println!(
        "(alpha - x)(beta - gamma x + x^2): alpha = {:.10}, beta = {:.10}, gamma = {:.10}",
        f.alpha, f.beta, f.gamma
    );
    println!("pair real part gamma/2 = {:.10}", f.pair_real_part());

    let r = stability::abc_equal_removal(&p)?;
    println!(
        "reduction: A = {:.10}, -BC = {:.10}, A' = {:.10}",
        r.a,
        -r.b * r.c,
        r.a_prime
    );
    println!("gamma - A = {:.3e}, beta + BC = {:.3e}", f.gamma - r.a, f.beta + r.b * r.c);
    Ok(())
}
