//! Self-check suite: each check exercises one qualitative property of the
//! model and reports pass, fail, or skipped instead of erroring out.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, VerifySpec};
use crate::cubic::{self, CubicCoeffs, Stability};
use crate::dynamics::{self, SimulationOptions, PERSISTENCE_FLOOR};
use crate::equilibria;
use crate::error::Result;
use crate::hopf::{self, AppendixReport};
use crate::integrate::Tolerances;
use crate::params::{Parameters, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            name,
            status: Status::Skipped,
            detail: detail.into(),
        }
    }

    fn from_result(name: &'static str, r: Result<Check>) -> Self {
        r.unwrap_or_else(|e| Check::new(name, false, e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub mu: f64,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub appendix: Option<AppendixReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

/// `gamma f(lambda) = rate` at both break-even levels.
pub fn check_break_even(p: &Parameters) -> Result<Check> {
    let lp = equilibria::lambda_p(p)?;
    let lz = equilibria::lambda_z(p)?;
    let rp = (p.gamma1() * p.f1().eval(lp, 0)? - p.d1()).abs() / p.d1();
    let rz = (p.gamma2() * p.f2().eval(lz, 0)? - p.d2()).abs() / p.d2();
    Ok(Check::new(
        "break_even",
        rp.max(rz) <= 1e-12,
        format!("lambda_P = {lp}, lambda_Z = {lz}, relative residuals {rp:.1e}, {rz:.1e}"),
    ))
}

/// `N*(mu)` and `Z*(mu)` strictly increase on `points` values in
/// `(mu_c1, mu_c1 + 10 (mu_c1 - lambda_P)]`, and `Z*` stays below its bound.
pub fn check_monotonicity(p: &Parameters, points: usize) -> Result<Check> {
    let c1 = equilibria::mu_c1(p)?;
    let span = 10.0 * (c1 - equilibria::lambda_p(p)?);
    let bound = equilibria::predator_bound(p)?;
    let mut prev: Option<State> = None;
    for k in 1..=points {
        let mu = c1 + span * k as f64 / points as f64;
        let e2 = equilibria::coexistence(&p.with_mu(mu)?)?.expect("mu above threshold");
        if let Some(q) = prev {
            if !(e2.n > q.n && e2.z > q.z) {
                return Ok(Check::new("monotonicity", false, format!("not increasing at mu = {mu}")));
            }
        }
        if !(e2.z < bound) {
            return Ok(Check::new(
                "monotonicity",
                false,
                format!("Z* = {} reaches the bound {bound} at mu = {mu}", e2.z),
            ));
        }
        prev = Some(e2);
    }
    Ok(Check::new(
        "monotonicity",
        true,
        format!("{points} points on ({c1}, {}], Z* < {bound}", c1 + span),
    ))
}

/// Random `(a1, a2, a3)` with `a3 > 0`: Routh-Hurwitz agrees with the sign of
/// the largest eigenvalue real part. Returns the number of disagreements.
pub fn routh_hurwitz_disagreements(rng: &mut impl Rng, samples: usize) -> Result<usize> {
    let mut bad = 0;
    for _ in 0..samples {
        let a1 = rng.gen_range(-5.0..5.0);
        let a2 = rng.gen_range(-5.0..5.0);
        let a3 = rng.gen_range(1e-3..5.0);
        let c = CubicCoeffs::from_routh_hurwitz(a1, a2, a3);
        let rh = cubic::routh_hurwitz(&c)?;
        let max_re = cubic::eigenvalues(&c)
            .iter()
            .map(|z: &Complex64| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let agree = match rh {
            Stability::Stable => max_re < 0.0,
            Stability::Unstable => max_re > 0.0,
            Stability::Marginal => max_re.abs() < 1e-6,
        };
        if !agree {
            bad += 1;
        }
    }
    Ok(bad)
}

fn random_state(rng: &mut ChaCha8Rng, scale: f64, p_on: bool, z_on: bool) -> State {
    let mut draw = |on: bool| if on { scale * rng.gen_range(0.01..2.0) } else { 0.0 };
    let n = draw(true);
    let pr = draw(p_on);
    let z = draw(z_on);
    State::new(n, pr, z)
}

/// Run the whole suite. Parameter errors become a failed `parameters` check.
pub fn run_suite(cfg: &RunConfig) -> SuiteReport {
    let v: &VerifySpec = &cfg.verify;
    let mu = cfg.representative_mu();
    let mut checks = Vec::new();
    let mut appendix = None;
    let p = match cfg.validate().and_then(|_| cfg.parameters_at(mu)) {
        Ok(p) => {
            checks.push(Check::new("parameters", true, "constructor invariants hold"));
            p
        }
        Err(e) => {
            checks.push(Check::new("parameters", false, e.to_string()));
            return SuiteReport {
                mu,
                seed: v.seed,
                checks,
                appendix,
            };
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(v.seed);

    checks.push(Check::from_result("break_even", check_break_even(&p)));
    checks.push(Check::from_result(
        "monotonicity",
        check_monotonicity(&p, v.monotonicity_points),
    ));
    checks.push(Check::from_result(
        "routh_hurwitz_vs_spectrum",
        routh_hurwitz_disagreements(&mut rng, v.random_cubics).map(|bad| {
            Check::new(
                "routh_hurwitz_vs_spectrum",
                bad == 0,
                format!("{bad} disagreements in {} random cubics", v.random_cubics),
            )
        }),
    ));

    let opts = SimulationOptions {
        t_end: v.t_end,
        tol: Tolerances {
            rel: cfg.simulate.rel_tol,
            abs: cfg.simulate.abs_tol,
        },
        ..Default::default()
    };
    let scale = mu.max(1.0);
    let interior: Vec<State> = (0..v.random_starts).map(|_| random_state(&mut rng, scale, true, true)).collect();
    let plane_p0: Vec<State> = (0..v.random_starts).map(|_| random_state(&mut rng, scale, false, true)).collect();
    let plane_z0: Vec<State> = (0..v.random_starts).map(|_| random_state(&mut rng, scale, true, false)).collect();

    let runs: Vec<Result<dynamics::Trajectory>> = interior.par_iter().map(|s| dynamics::integrate(&p, *s, &opts)).collect();
    let failures: Vec<String> = runs.iter().filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
    checks.push(Check::new(
        "trajectory_invariants",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} interior starts: nonnegative and inside the mass envelope", interior.len())
        } else {
            failures[0].clone()
        },
    ));

    let c1 = equilibria::mu_c1(&p).unwrap_or(f64::INFINITY);
    if mu > c1 && failures.is_empty() {
        let worst = runs
            .iter()
            .flatten()
            .map(|t| dynamics::persistence_check(t, PERSISTENCE_FLOOR))
            .map(|r| r.min_n.min(r.min_p).min(r.min_z))
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::new(
            "persistence",
            worst > PERSISTENCE_FLOOR,
            format!("smallest trailing-half component {worst:.3e}"),
        ));
    } else {
        checks.push(Check::skipped("persistence", format!("needs mu > mu_c1 = {c1}")));
    }

    let e0: Vec<Result<bool>> = plane_p0
        .par_iter()
        .map(|s| Ok(dynamics::lyapunov_monitor_e0(&dynamics::integrate(&p, *s, &opts)?)?.descending))
        .collect();
    checks.push(descent_check("lyapunov_e0", e0));

    let lp = equilibria::lambda_p(&p).unwrap_or(f64::INFINITY);
    if mu > lp {
        let e1: Vec<Result<bool>> = plane_z0
            .par_iter()
            .map(|s| Ok(dynamics::lyapunov_monitor_e1(&dynamics::integrate(&p, *s, &opts)?)?.descending))
            .collect();
        checks.push(descent_check("lyapunov_e1", e1));
    } else {
        checks.push(Check::skipped("lyapunov_e1", format!("needs mu > lambda_P = {lp}")));
    }

    if p.has_equal_removal() {
        let r = (|| -> Result<(Check, AppendixReport)> {
            let interval = match v.mu_interval {
                Some(iv) => iv,
                None => {
                    let c = hopf::find_hopf(&p, hopf::default_bracket(&p)?)?;
                    (c.mu_c2 - 0.05, c.mu_c2 + 0.05)
                }
            };
            let rep = hopf::appendix_bound_check(&p, &v.radii, v.samples_per_circle, interval, v.mu_points)?;
            let check = Check::new(
                "appendix_ratio",
                rep.is_bounded(),
                format!(
                    "mu in [{}, {}], max ratios {:?}, spread {:.4}",
                    interval.0,
                    interval.1,
                    rep.rows.iter().map(|r| r.max_ratio).collect::<Vec<_>>(),
                    rep.ratio_spread
                ),
            );
            Ok((check, rep))
        })();
        match r {
            Ok((c, rep)) => {
                checks.push(c);
                appendix = Some(rep);
            }
            Err(e) => checks.push(Check::new("appendix_ratio", false, e.to_string())),
        }
    } else {
        checks.push(Check::skipped("appendix_ratio", "needs D1 = D2 = D"));
    }

    SuiteReport {
        mu,
        seed: v.seed,
        checks,
        appendix,
    }
}

fn descent_check(name: &'static str, results: Vec<Result<bool>>) -> Check {
    let total = results.len();
    if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
        return Check::new(name, false, e.to_string());
    }
    let bad = results.iter().filter(|r| matches!(r, Ok(false))).count();
    Check::new(name, bad == 0, format!("{} of {total} starts non-increasing", total - bad))
}
