//! Break-even levels, thresholds and the equilibria present at a few feed
//! concentrations, each with its eigenvalues and stability.
//!
//! Run with `cargo run --example equilibria`.

use chemostat::{presets, stability};

fn main() -> chemostat::Result<()> {
    let base = presets::holling2_equal_removal();
    for mu in [0.1, 0.3, 0.5, 0.7] {
        let a = stability::analyze(&base.with_mu(mu)?)?;
        println!(
            "mu = {mu}: lambda_P = {}, lambda_Z = {}, mu_c1 = {}",
            a.lambda_p, a.lambda_z, a.mu_c1
        );
        for e in &a.equilibria {
            let s = e.state;
            println!(
                "  {} = ({:.6}, {:.6}, {:.6}) {:?}, eigenvalues {:?}",
                e.name, s.n, s.p, s.z, e.stability, e.eigenvalues
            );
        }
    }
    Ok(())
}
