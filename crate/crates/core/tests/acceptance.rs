//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use chemostat::cubic::{self, CubicCoeffs, Stability};
use chemostat::dynamics::{self, CycleClass, CycleConfig, SimulationOptions};
use chemostat::{equilibria, hopf, presets, stability, Parameters, State};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

type Criterion = fn() -> Result<Outcome, String>;

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

// Holling II closed forms used as oracles
struct H2 {
    m: f64,
    a: f64,
}

impl H2 {
    fn f(&self, x: f64) -> f64 {
        self.m * x / (self.a + x)
    }
    fn df(&self, x: f64) -> f64 {
        self.m * self.a / (self.a + x).powi(2)
    }
    fn break_even(&self, gamma: f64, rate: f64) -> f64 {
        self.a * rate / (gamma * self.m - rate)
    }
}

const F1: H2 = H2 { m: 1.0, a: 0.2 };
const F2: H2 = H2 { m: 2.0, a: 0.5 };
const G1: f64 = 2.0;
const G2: f64 = 1.5;

/// Coexistence state of the equal-removal Holling II set from the quadratic
/// `(mu - N)(a1 + N) D = lambda_Z m1 N`.
fn e2_closed_form(mu: f64, d: f64) -> (f64, f64, f64) {
    let lz = F2.break_even(G2, d);
    let b = F1.a + lz * F1.m / d - mu;
    let n = 0.5 * (-b + (b * b + 4.0 * mu * F1.a).sqrt());
    let z = G2 / d * lz * (G1 * F1.f(n) - d);
    (n, lz, z)
}

fn match_roots(a: &[Complex64], b: &[Complex64]) -> f64 {
    // small sets: try all assignments
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|p| (0..3).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Durand-Kerner iteration for `x^3 + a1 x^2 + a2 x + a3`, the monic form of
/// the characteristic polynomial.
fn durand_kerner(c: &CubicCoeffs) -> [Complex64; 3] {
    let (a1, a2, a3) = c.routh_hurwitz_symbols();
    let poly = |x: Complex64| ((x + a1) * x + a2) * x + a3;
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [Complex64::new(1.0, 0.0), seed, seed * seed];
    for _ in 0..500 {
        let prev = r;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if j != i {
                    den *= r[i] - r[j];
                }
            }
            r[i] -= poly(r[i]) / den;
        }
        if (0..3).all(|i| (r[i] - prev[i]).norm() < 1e-15 * (1.0 + r[i].norm())) {
            break;
        }
    }
    r
}

fn c1_hopf_holling2_equal() -> Result<Outcome, String> {
    let p = presets::holling2_equal_removal();
    let (cert, t) = timed(|| hopf::find_hopf(&p, (0.5, 0.7)));
    let cert = cert.map_err(err)?;
    let ok = (0.55..=0.65).contains(&cert.mu_c2) && cert.re_slope > 0.0 && t < Duration::from_secs(1);
    Ok(outcome(
        ok,
        format!("mu_c2 = {:.8} in [0.55, 0.65], slope {:.4} > 0, {t:.2?} < 1 s", cert.mu_c2, cert.re_slope),
    ))
}

fn c2_hopf_holling2_unequal() -> Result<Outcome, String> {
    let p = presets::holling2_unequal_removal();
    let bracket = (0.7, 1.1);
    let (r, t) = timed(|| -> chemostat::Result<_> {
        let cert = hopf::find_hopf(&p, bracket)?;
        let curve = hopf::real_part_curve(&p, bracket.0, bracket.1, 101)?;
        Ok((cert, curve))
    });
    let (cert, curve) = r.map_err(err)?;
    let max_alpha = curve.alpha_track().into_iter().fold(f64::NEG_INFINITY, f64::max);
    let ok = (0.85..=0.95).contains(&cert.mu_c2) && max_alpha < 0.0 && t < Duration::from_secs(1);
    Ok(outcome(
        ok,
        format!("mu_c2 = {:.8} in [0.85, 0.95], max real eigenvalue {max_alpha:.4} < 0 on bracket, {t:.2?} < 1 s", cert.mu_c2),
    ))
}

fn c3_hopf_holling3() -> Result<Outcome, String> {
    let p = presets::holling3_unequal_removal();
    let (r, t) = timed(|| -> chemostat::Result<_> {
        let bracket = hopf::default_bracket(&p)?;
        hopf::find_hopf(&p, bracket)
    });
    let cert = r.map_err(err)?;
    // secant condition at lambda_Z(D), evaluated directly
    let (m2, a2, d): (f64, f64, f64) = (1.6, 0.9, 1.0);
    let g2: f64 = 0.9;
    let lz = (a2 * d / (g2 * m2 - d)).sqrt();
    let f2p = 2.0 * m2 * a2 * lz / (a2 + lz * lz).powi(2);
    let secant = d / (g2 * lz) > f2p;
    let ok = (7.0..=7.5).contains(&cert.mu_c2)
        && secant
        && cert.hypotheses.concavity_condition
        && t < Duration::from_secs(2);
    Ok(outcome(
        ok,
        format!(
            "mu_c2 = {:.8} in [7.0, 7.5], D/(gamma2 lambda_Z) = {:.4} > f2'(lambda_Z) = {f2p:.4}, {t:.2?} < 2 s",
            cert.mu_c2,
            d / (g2 * lz)
        ),
    ))
}

fn c4_factorization_oracle() -> Result<Outcome, String> {
    let d = 1.0;
    let base = presets::holling2_equal_removal();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let mu = 0.35 + 0.55 * k as f64 / 49.0;
        let p = base.with_mu(mu).map_err(err)?;
        let solver = cubic::eigenvalues(&stability::char_coeffs_e2(&p).map_err(err)?);
        let (n, lz, z) = e2_closed_form(mu, d);
        let a = z * (d / (G2 * lz) - F2.df(lz)) - lz * F1.df(n);
        let b = -(lz * F1.df(n) + d) / G2;
        let c = G2 * z * F2.df(lz);
        let disc = Complex64::new(a * a + 4.0 * b * c, 0.0).sqrt();
        let oracle = [
            Complex64::new(-d, 0.0),
            (Complex64::new(a, 0.0) + disc) / 2.0,
            (Complex64::new(a, 0.0) - disc) / 2.0,
        ];
        worst = worst.max(match_roots(&solver, &oracle));
    }
    Ok(outcome(worst <= 1e-9, format!("50 mu values on [0.35, 0.9], max |eigenvalue - oracle| = {worst:.2e} <= 1e-9")))
}

fn c5_routh_hurwitz_vs_spectrum() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    let mut marginal = 0;
    for _ in 0..1000 {
        let a1 = rng.gen_range(-4.0..4.0);
        let a2 = rng.gen_range(-4.0..4.0);
        let a3 = rng.gen_range(0.01..4.0);
        let c = CubicCoeffs::from_routh_hurwitz(a1, a2, a3);
        let max_re = durand_kerner(&c).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        match cubic::routh_hurwitz(&c).map_err(err)? {
            Stability::Stable if max_re < 0.0 => {}
            Stability::Unstable if max_re > 0.0 => {}
            Stability::Marginal => marginal += 1,
            _ => bad += 1,
        }
    }
    Ok(outcome(
        bad == 0 && marginal == 0,
        format!("1000 random cubics with a3 > 0: {bad} disagreements, {marginal} marginal"),
    ))
}

fn c6_break_even_closed_forms() -> Result<Outcome, String> {
    let p = presets::holling2_equal_removal();
    let lp = equilibria::lambda_p(&p).map_err(err)?;
    let lz = equilibria::lambda_z(&p).map_err(err)?;
    let (ep, ez) = (F1.break_even(G1, 1.0), F2.break_even(G2, 1.0));
    let dev = (lp - 0.2).abs().max((lz - 0.25).abs()).max((lp - ep).abs()).max((lz - ez).abs());
    Ok(outcome(dev <= 1e-12, format!("lambda_P = {lp}, lambda_Z = {lz} vs 0.2, 0.25: max deviation {dev:.1e} <= 1e-12")))
}

fn c7_monotonicity() -> Result<Outcome, String> {
    let p = presets::holling2_equal_removal();
    let c1 = equilibria::mu_c1(&p).map_err(err)?;
    let lz = F2.break_even(G2, 1.0);
    let sup_bound = G2 / 1.0 * lz * (G1 * F1.m - 1.0);
    let mut prev: Option<State> = None;
    let mut ok = true;
    let mut max_z: f64 = 0.0;
    for k in 1..=200 {
        let mu = c1 + 5.0 * k as f64 / 200.0;
        let e2 = equilibria::coexistence(&p.with_mu(mu).map_err(err)?).map_err(err)?.ok_or("missing E2")?;
        if let Some(q) = prev {
            ok &= e2.n > q.n && e2.z > q.z;
        }
        ok &= e2.z < sup_bound;
        max_z = max_z.max(e2.z);
        prev = Some(e2);
    }
    Ok(outcome(
        ok,
        format!("200 points on ({c1}, {}]: N*, Z* strictly increasing, max Z* {max_z:.5} < {sup_bound}", c1 + 5.0),
    ))
}

fn c8_trajectory_invariants() -> Result<Outcome, String> {
    let p = presets::holling2_equal_removal().with_mu(0.65).map_err(err)?;
    let opts = SimulationOptions {
        t_end: 200.0,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inits: Vec<State> = (0..100)
        .map(|_| State::new(rng.gen_range(0.01..2.0), rng.gen_range(0.01..2.0), rng.gen_range(0.01..2.0)))
        .collect();
    let (r, t) = timed(|| -> Result<(f64, f64), String> {
        let mut min_component = f64::INFINITY;
        let mut worst_excess = f64::NEG_INFINITY;
        for init in &inits {
            let traj = dynamics::integrate(&p, *init, &opts).map_err(err)?;
            let u0 = init.n + init.p / G1 + init.z / (G1 * G2);
            let envelope = u0.max(1.0 * 0.65 / 1.0);
            for s in &traj.states {
                min_component = min_component.min(s.n).min(s.p).min(s.z);
                let u = s.n + s.p / G1 + s.z / (G1 * G2);
                worst_excess = worst_excess.max(u - envelope);
            }
        }
        Ok((min_component, worst_excess))
    });
    let (min_component, worst_excess) = r?;
    let ok = min_component >= -1e-9 && worst_excess <= 1e-6 && t < Duration::from_secs(30);
    Ok(outcome(
        ok,
        format!("100 starts at mu = 0.65: min component {min_component:.2e} >= -1e-9, max U - envelope {worst_excess:.2e} <= 1e-6, {t:.2?} < 30 s"),
    ))
}

/// Hsu's function for Holling II in closed form.
fn hsu_closed_form(p: &Parameters, n: f64, prey: f64) -> f64 {
    let lp = F1.break_even(G1, p.d1());
    let fl = F1.f(lp);
    let ps = (p.mu() - lp) * p.d() / fl;
    let integral = (n - lp) - fl / F1.m * (F1.a * (n / lp).ln() + (n - lp));
    integral + (prey - ps - ps * (prey / ps).ln()) / G1
}

fn c9_lyapunov_descent() -> Result<Outcome, String> {
    let p = presets::holling2_equal_removal().with_mu(0.65).map_err(err)?;
    let opts = SimulationOptions {
        t_end: 60.0,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst0, mut worst1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut lib_ok, mut oracle_gap) = (true, 0.0f64);
    for _ in 0..20 {
        let init = State::new(rng.gen_range(0.01..2.0), 0.0, rng.gen_range(0.01..2.0));
        let traj = dynamics::integrate(&p, init, &opts).map_err(err)?;
        let l: Vec<f64> = traj.states.iter().map(|s| 0.5 * (0.65 - s.n).powi(2) + 0.5 * s.z * s.z).collect();
        worst0 = worst0.max(l.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
        lib_ok &= dynamics::lyapunov_monitor_e0(&traj).map_err(err)?.descending;
    }
    for _ in 0..20 {
        let init = State::new(rng.gen_range(0.01..2.0), rng.gen_range(0.01..2.0), 0.0);
        let traj = dynamics::integrate(&p, init, &opts).map_err(err)?;
        let l: Vec<f64> = traj.states.iter().map(|s| hsu_closed_form(&p, s.n, s.p)).collect();
        worst1 = worst1.max(l.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
        let report = dynamics::lyapunov_monitor_e1(&traj).map_err(err)?;
        lib_ok &= report.descending;
        oracle_gap = oracle_gap.max(report.values.iter().zip(&l).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    let ok = worst0 <= 1e-8 && worst1 <= 1e-7 && lib_ok && oracle_gap < 1e-8;
    Ok(outcome(
        ok,
        format!(
            "20 starts per plane: max increase {worst0:.1e} <= 1e-8 (P = 0), {worst1:.1e} <= 1e-7 (Z = 0), quadrature vs closed form {oracle_gap:.1e}"
        ),
    ))
}

fn c10_cycle_emergence() -> Result<Outcome, String> {
    let opts = SimulationOptions {
        t_end: 3000.0,
        ..Default::default()
    };
    let cfg = CycleConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, p, bracket) in [
        ("equal", presets::holling2_equal_removal(), (0.5, 0.7)),
        ("perturbed", presets::holling2_unequal_removal(), (0.7, 1.1)),
    ] {
        let mu_c2 = hopf::find_hopf(&p, bracket).map_err(err)?.mu_c2;
        let rows = dynamics::cycle_sweep(
            &p,
            &[mu_c2 - 0.05, mu_c2 + 0.05],
            |q| dynamics::near_coexistence(q, 0.1),
            &opts,
            &cfg,
        )
        .map_err(err)?;
        let (below, above) = (&rows[0].1, &rows[1].1);
        ok &= below.classification == CycleClass::Equilibrium
            && above.classification == CycleClass::LimitCycle
            && above.amplitude > 1e-3;
        parts.push(format!(
            "{name}: {:?} below, {:?} above (amplitude {:.3})",
            below.classification, above.classification, above.amplitude
        ));
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn c11_ratio_bound() -> Result<Outcome, String> {
    let p = presets::holling2_equal_removal();
    let (r, t) = timed(|| hopf::appendix_bound_check(&p, &[0.1, 0.05, 0.025], 16, (0.55, 0.65), 11));
    let rep = r.map_err(err)?;
    let ratios: Vec<String> = rep.rows.iter().map(|r| format!("{:.4}", r.max_ratio)).collect();
    let ok = rep.ratio_spread < 2.0 && t < Duration::from_secs(60);
    Ok(outcome(
        ok,
        format!("max ratios [{}] across radii 0.1, 0.05, 0.025: spread {:.4} < 2, {t:.2?} < 60 s", ratios.join(", "), rep.ratio_spread),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("Hopf location, Holling II equal removal", c1_hopf_holling2_equal),
        ("Hopf location, Holling II perturbed removal", c2_hopf_holling2_unequal),
        ("Hopf location, Holling III", c3_hopf_holling3),
        ("factorization oracle", c4_factorization_oracle),
        ("Routh-Hurwitz vs spectrum", c5_routh_hurwitz_vs_spectrum),
        ("break-even closed forms", c6_break_even_closed_forms),
        ("monotonicity and boundedness", c7_monotonicity),
        ("trajectory invariants", c8_trajectory_invariants),
        ("Lyapunov descent", c9_lyapunov_descent),
        ("cycle emergence", c10_cycle_emergence),
        ("removal-rate ratio bound", c11_ratio_bound),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.ok {
            failed += 1;
        }
        println!("criterion {:>2} {}  {name}: {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
