//! Lyapunov descent on the two invariant planes: towards washout on `P = 0`
//! and towards the single-species state on `Z = 0` (Hsu's function).
//!
//! Run with `cargo run --release --example lyapunov`.

use chemostat::dynamics::{self, HsuFunction, SimulationOptions};
use chemostat::{equilibria, presets, State};

fn main() -> chemostat::Result<()> {
    let p = presets::holling2_equal_removal().with_mu(0.65)?;
    let opts = SimulationOptions {
        t_end: 60.0,
        ..Default::default()
    };

    let on_p0 = dynamics::integrate(&p, State::new(0.05, 0.0, 1.5), &opts)?;
    let d0 = dynamics::lyapunov_monitor_e0(&on_p0)?;
    println!(
        "P = 0: L from {:.6} to {:.3e}, largest step increase {:.3e}, descending: {}",
        d0.values[0],
        d0.values.last().unwrap(),
        d0.max_increase,
        d0.descending
    );

    let e1 = equilibria::single_species(&p)?.expect("mu above lambda_P");
    let on_z0 = dynamics::integrate(&p, State::new(e1.n, 2.0 * e1.p, 0.0), &opts)?;
    let d1 = dynamics::lyapunov_monitor_e1(&on_z0)?;
    println!(
        "Z = 0: L from {:.6} to {:.3e}, largest step increase {:.3e}, descending: {}",
        d1.values[0],
        d1.values.last().unwrap(),
        d1.max_increase,
        d1.descending
    );

    let h = HsuFunction::new(&p)?;
    for n in [0.05, 0.1, 0.2, 0.4, 0.6] {
        println!("  dL/dt at N = {n}: {:+.6}", h.derivative(n)?);
    }
    Ok(())
}
