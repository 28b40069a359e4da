//! Simulate just below and just above the Hopf point and classify the
//! long-run behaviour: a damped spiral into the coexistence state before the
//! crossing, a limit cycle after it.
//!
//! Run with `cargo run --release --example cycle_emergence`.

use chemostat::dynamics::{self, CycleConfig, SimulationOptions};
use chemostat::{hopf, presets};

fn main() -> chemostat::Result<()> {
    let opts = SimulationOptions {
        t_end: 3000.0,
        ..Default::default()
    };
    let cfg = CycleConfig::default();
    let sets = [
        ("Holling II, D1 = D2 = 1", presets::holling2_equal_removal()),
        ("Holling II, D1 = 1.2, D2 = 1.3", presets::holling2_unequal_removal()),
    ];
    for (name, p) in sets {
        let cert = hopf::find_hopf(&p, hopf::default_bracket(&p)?)?;
        println!("{name}: mu_c2 = {:.6}", cert.mu_c2);
        let mus = [cert.mu_c2 - 0.05, cert.mu_c2 + 0.05];
        let rows = dynamics::cycle_sweep(&p, &mus, |q| dynamics::near_coexistence(q, 0.1), &opts, &cfg)?;
        for (mu, r) in rows {
            println!(
                "  mu = {mu:.4}: {:?}, amplitude {:.3e}, period {}, crossings {}",
                r.classification,
                r.amplitude,
                r.period.map_or("-".to_string(), |t| format!("{t:.4}")),
                r.crossings
            );
        }
    }
    Ok(())
}
