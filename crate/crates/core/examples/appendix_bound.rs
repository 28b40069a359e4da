//! Compare the slope of the complex pair's real part for unequal removal rates
//! with the equal-rate reference `A'(mu)` on shrinking circles around (D, D).
//!
//! Run with `cargo run --release --example appendix_bound`.

use chemostat::hopf;
use chemostat::presets;

fn main() -> chemostat::Result<()> {
    let p = presets::holling2_equal_removal();
    let radii = [0.1, 0.05, 0.025];
    let report = hopf::appendix_bound_check(&p, &radii, 16, (0.55, 0.65), 11)?;

    println!("{:>8} {:>12} {:>14}   argmax (D1, D2, mu)", "radius", "max ratio", "max |diff|");
    for row in &report.rows {
        let (d1, d2, mu) = row.argmax;
        println!(
            "{:>8.3} {:>12.6} {:>14.6e}   ({d1:.4}, {d2:.4}, {mu:.3})",
            row.radius, row.max_ratio, row.max_difference
        );
    }
    println!(
        "ratio spread {:.4} -> {}",
        report.ratio_spread,
        if report.is_bounded() { "bounded" } else { "not bounded" }
    );
    Ok(())
}
