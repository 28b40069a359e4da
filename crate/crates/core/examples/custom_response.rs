//! Plug in a user-supplied functional response: an Ivlev-type saturating
//! exponential `f(x) = m (1 - exp(-x / s))` for the predator, with its first
//! three derivatives.
//!
//! Run with `cargo run --release --example custom_response`.

use std::sync::Arc;

use chemostat::response::Curve;
use chemostat::{hopf, stability, Parameters, Response};

fn main() -> chemostat::Result<()> {
    let (m, s) = (2.0, 0.4);
    let derivatives: Vec<Curve> = vec![
        Arc::new(move |x: f64| m * (1.0 - (-x / s).exp())),
        Arc::new(move |x: f64| m / s * (-x / s).exp()),
        Arc::new(move |x: f64| -m / (s * s) * (-x / s).exp()),
        Arc::new(move |x: f64| m / (s * s * s) * (-x / s).exp()),
    ];
    let ivlev = Response::custom("ivlev", derivatives, m)?;
    let p = Parameters::new(Response::holling2(1.0, 0.2)?, 2.0, ivlev, 1.5, 1.0)?;

    let flags = hopf::hypothesis_predicates(&p, None)?;
    println!("secant gap at lambda_Z: {:.6} (condition {})", flags.secant_gap, flags.concavity_condition);

    let bracket = hopf::default_bracket(&p)?;
    let cert = hopf::find_hopf(&p, bracket)?;
    println!("Hopf point at mu = {:.8}, omega = {:.6}", cert.mu_c2, cert.imag_at_crossing);
    for mu in [cert.mu_c2 - 0.05, cert.mu_c2 + 0.05] {
        let a = stability::analyze(&p.with_mu(mu)?)?;
        let e2 = a.equilibria.last().unwrap();
        println!("  mu = {mu:.4}: {} {:?}", e2.name, e2.stability);
    }
    Ok(())
}
