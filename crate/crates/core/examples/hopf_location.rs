//! Trace the real part of the complex eigenvalue pair along `mu`, then locate
//! and certify the crossing for the three reference parameter sets.
//!
//! Run with `cargo run --release --example hopf_location`.

use chemostat::{hopf, presets};

fn main() -> chemostat::Result<()> {
    let sets = [
        ("Holling II, D1 = D2 = 1", presets::holling2_equal_removal(), (0.35, 0.9)),
        ("Holling II, D1 = 1.2, D2 = 1.3", presets::holling2_unequal_removal(), (0.55, 1.2)),
        ("Holling III, D1 = 1.2, D2 = 1.1", presets::holling3_unequal_removal(), (5.5, 8.5)),
    ];
    for (name, p, (lo, hi)) in sets {
        println!("{name}");
        let curve = hopf::real_part_curve(&p, lo, hi, 12)?;
        for c in &curve.points {
            println!("  mu = {:.4}  Re = {:+.5}  Im = {:.5}  alpha = {:.5}", c.mu, c.re_pair, c.im_pair, c.alpha);
        }
        let bracket = curve.sign_changes()[0];
        let cert = hopf::find_hopf(&p, bracket)?;
        println!(
            "  crossing at mu_c2 = {:.10}, dRe/dmu = {:.6}, omega = {:.6}",
            cert.mu_c2, cert.re_slope, cert.imag_at_crossing
        );
        let h = cert.hypotheses;
        println!(
            "  secant gap {:.6} (condition {}), f1'' < 0 at crossing: {:?}, f1 concave everywhere: {}",
            h.secant_gap, h.concavity_condition, h.f1_second_negative_at_crossing, h.f1_globally_concave
        );
        if let Some(eq) = cert.equal_removal {
            println!("  zero of A at {:.10}, omega^2 = {:.10} vs -BC = {:.10}", eq.a_root, cert.imag_at_crossing.powi(2), eq.minus_bc);
        }
    }
    Ok(())
}
