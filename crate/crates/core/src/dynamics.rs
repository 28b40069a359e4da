//! Trajectories of the chemostat system and the qualitative checks run on
//! them: nonnegativity and the total-mass envelope, Lyapunov descent on the
//! invariant planes, persistence, and limit-cycle detection.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria;
use crate::error::{Error, Result};
use crate::integrate::{self, IntegratorStats, Tolerances};
use crate::params::{Parameters, State};
use crate::quad;

/// Slack allowed above the total-mass envelope.
pub const ENVELOPE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct SimulationOptions {
    pub t_end: f64,
    pub tol: Tolerances,
    /// Spacing of the recorded samples.
    pub sample_dt: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            t_end: 200.0,
            tol: Tolerances::default(),
            sample_dt: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub params: Parameters,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn final_state(&self) -> State {
        *self.states.last().expect("trajectory has at least the initial sample")
    }

    /// Index of the first sample at or after `fraction` of the time span.
    pub fn tail_start(&self, fraction: f64) -> usize {
        let (t0, t1) = (self.times[0], *self.times.last().unwrap());
        let cut = t0 + fraction * (t1 - t0);
        self.times.partition_point(|&t| t < cut)
    }

    /// Write `t,N,P,Z` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,N,P,Z")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(w, "{t},{},{},{}", s.n, s.p, s.z)?;
        }
        Ok(())
    }
}

/// Upper bound on `N + P/gamma1 + Z/(gamma1 gamma2)` along a trajectory
/// started from `init`.
pub fn mass_envelope(p: &Parameters, init: &State) -> f64 {
    p.total_mass(init).max(p.d() * p.mu() / p.min_rate())
}

/// Integrate from `init` to `opts.t_end`, sampling every `opts.sample_dt`.
pub fn integrate(p: &Parameters, init: State, opts: &SimulationOptions) -> Result<Trajectory> {
    let a = init.to_array();
    if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "init",
            reason: format!("initial state {a:?} must be finite and nonnegative"),
        });
    }
    if !(init.n > 0.0) {
        return Err(Error::InvalidParameter {
            name: "init.N",
            reason: format!("initial nutrient must be positive, got {}", init.n),
        });
    }
    if !(opts.t_end > 0.0 && opts.sample_dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_end/sample_dt",
            reason: format!("both must be positive, got {} and {}", opts.t_end, opts.sample_dt),
        });
    }
    let n = (opts.t_end / opts.sample_dt).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=n).map(|i| opts.t_end * i as f64 / n as f64).collect();
    let bound = mass_envelope(p, &init) + ENVELOPE_SLACK;
    let (ys, stats) = integrate::dopri5(
        |_, y: &[f64; 3]| p.rhs(&State::from_array(*y)).to_array(),
        0.0,
        a,
        &times,
        opts.tol,
        |t, y| {
            let u = p.total_mass(&State::from_array(*y));
            if u > bound {
                return Err(Error::ModelViolation {
                    t,
                    detail: format!("total mass {u} exceeds envelope {bound}"),
                });
            }
            Ok(())
        },
    )?;
    Ok(Trajectory {
        times,
        states: ys.into_iter().map(State::from_array).collect(),
        params: p.clone(),
        stats,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DescentReport {
    pub values: Vec<f64>,
    /// Largest increase between consecutive samples (negative if strictly decreasing).
    pub max_increase: f64,
    pub tolerance: f64,
    pub descending: bool,
}

impl DescentReport {
    fn from_values(values: Vec<f64>, tolerance: f64) -> Self {
        let max_increase = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        Self {
            descending: !(max_increase > tolerance),
            values,
            max_increase,
            tolerance,
        }
    }
}

pub const E0_DESCENT_TOL: f64 = 1e-8;
pub const E1_DESCENT_TOL: f64 = 1e-7;
const PLANE_TOL: f64 = 1e-12;

/// `(mu - N)^2 / 2 + Z^2 / 2`, a Lyapunov function for the washout state on
/// the plane `P = 0`.
pub fn lyapunov_e0(p: &Parameters, s: &State) -> f64 {
    0.5 * (p.mu() - s.n).powi(2) + 0.5 * s.z * s.z
}

/// Evaluate [`lyapunov_e0`] along a trajectory lying in `P = 0`.
pub fn lyapunov_monitor_e0(traj: &Trajectory) -> Result<DescentReport> {
    if let Some(s) = traj.states.iter().find(|s| s.p.abs() > PLANE_TOL) {
        return Err(Error::Contract(format!(
            "trajectory leaves the plane P = 0 (P = {:e})",
            s.p
        )));
    }
    let values = traj.states.iter().map(|s| lyapunov_e0(&traj.params, s)).collect();
    Ok(DescentReport::from_values(values, E0_DESCENT_TOL))
}

/// Hsu's Lyapunov function for the single-species equilibrium on the plane
/// `Z = 0`:
///
/// ```text
/// L = int_{lambda_P}^{N} (f1(n) - f1(lambda_P)) / f1(n) dn
///     + (P - P* - P* ln(P / P*)) / gamma1
/// ```
#[derive(Debug, Clone)]
pub struct HsuFunction {
    params: Parameters,
    lambda_p: f64,
    p_star: f64,
    f_lambda: f64,
}

impl HsuFunction {
    pub fn new(p: &Parameters) -> Result<Self> {
        let e1 = equilibria::single_species(p)?.ok_or(Error::Existence {
            what: "single-species equilibrium",
            mu: p.mu(),
            threshold: equilibria::lambda_p(p)?,
        })?;
        Ok(Self {
            params: p.clone(),
            lambda_p: e1.n,
            p_star: e1.p,
            f_lambda: p.f1().eval(e1.n, 0)?,
        })
    }

    pub fn eval(&self, n: f64, prey: f64) -> Result<f64> {
        if !(prey > 0.0) || !(n > 0.0) {
            return Err(Error::Domain {
                what: "Hsu function needs N > 0 and P > 0",
                value: if n > 0.0 { prey } else { n },
            });
        }
        let f1 = self.params.f1();
        let integral = quad::adaptive_simpson(
            |x| 1.0 - self.f_lambda / f1.eval(x, 0).unwrap_or(f64::NAN),
            self.lambda_p,
            n,
            1e-11,
        )?;
        let ps = self.p_star;
        Ok(integral + (prey - ps - ps * (prey / ps).ln()) / self.params.gamma1())
    }

    /// Time derivative along the flow at `(N, P, 0)`, in the factored form
    ///
    /// ```text
    /// (f1(N) - f1(lambda_P)) ((mu - N)/(mu - lambda_P) - f1(N)/f1(lambda_P)) (mu - lambda_P) D / f1(N)
    /// ```
    ///
    /// It depends on `N` only and is negative for `N != lambda_P`.
    pub fn derivative(&self, n: f64) -> Result<f64> {
        let p = &self.params;
        let fx = p.f1().eval(n, 0)?;
        let gap = p.mu() - self.lambda_p;
        Ok((fx - self.f_lambda) * ((p.mu() - n) / gap - fx / self.f_lambda) * gap * p.d() / fx)
    }
}

/// Evaluate Hsu's function along a trajectory lying in `Z = 0` with `P > 0`.
pub fn lyapunov_monitor_e1(traj: &Trajectory) -> Result<DescentReport> {
    if let Some(s) = traj.states.iter().find(|s| s.z.abs() > PLANE_TOL) {
        return Err(Error::Contract(format!(
            "trajectory leaves the plane Z = 0 (Z = {:e})",
            s.z
        )));
    }
    let h = HsuFunction::new(&traj.params)?;
    let values = traj
        .states
        .par_iter()
        .map(|s| h.eval(s.n, s.p))
        .collect::<Result<Vec<_>>>()?;
    Ok(DescentReport::from_values(values, E1_DESCENT_TOL))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CycleClass {
    Equilibrium,
    LimitCycle,
    Undetermined,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CycleConfig {
    /// Leading fraction of the trajectory discarded as transient.
    pub transient_fraction: f64,
    pub min_crossings: usize,
    /// Peak-to-peak `P` amplitude separating equilibria from cycles.
    pub amp_floor: f64,
    /// Relative spread of return times and amplitudes required for a cycle.
    pub spread_tol: f64,
    /// Number of trailing cycles compared.
    pub window_cycles: usize,
    /// A cycle needs a span of at least this many periods.
    pub min_periods: f64,
}

impl Default for CycleConfig {
    fn default() -> Self {
        Self {
            transient_fraction: 0.5,
            min_crossings: 4,
            amp_floor: 1e-3,
            spread_tol: 1e-3,
            window_cycles: 5,
            min_periods: 50.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    pub classification: CycleClass,
    /// Peak-to-peak `P` over the trailing window.
    pub amplitude: f64,
    /// Mean return time to the section, when at least two crossings were seen.
    pub period: Option<f64>,
    /// Relative spread of the trailing return times and per-cycle amplitudes.
    pub spread: Option<f64>,
    pub crossings: usize,
    /// Section level `P = lambda_Z(D2)`.
    pub section: f64,
}

fn peak_to_peak(v: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

fn relative_spread(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if mean == 0.0 {
        f64::INFINITY
    } else {
        (hi - lo) / mean.abs()
    }
}

/// Classify the attractor reached by `traj` from upward crossings of the
/// section `P = lambda_Z(D2)` in the trailing part of the run.
///
/// A small amplitude classifies as `Equilibrium` even when there are too few
/// crossings to measure a period.
pub fn detect_cycle(traj: &Trajectory, cfg: &CycleConfig) -> Result<CycleReport> {
    let section = equilibria::lambda_z(&traj.params)?;
    let start = traj.tail_start(cfg.transient_fraction);
    let (ts, ss) = (&traj.times[start..], &traj.states[start..]);

    let mut crossings = Vec::new();
    let mut idx = Vec::new();
    for i in 1..ss.len() {
        let (a, b) = (ss[i - 1].p - section, ss[i].p - section);
        if a < 0.0 && b >= 0.0 {
            let w = a / (a - b);
            crossings.push(ts[i - 1] + w * (ts[i] - ts[i - 1]));
            idx.push(i);
        }
    }

    let k = cfg.window_cycles.min(crossings.len().saturating_sub(1));
    let window_start = if k >= 1 { idx[idx.len() - 1 - k] } else { 0 };
    let window_end = if k >= 1 { idx[idx.len() - 1] } else { ss.len() };
    let amplitude = peak_to_peak(ss[window_start..window_end].iter().map(|s| s.p));

    let (period, spread) = if k >= 1 {
        let c = &crossings[crossings.len() - 1 - k..];
        let i = &idx[idx.len() - 1 - k..];
        let returns: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
        let amps: Vec<f64> = i
            .windows(2)
            .map(|w| peak_to_peak(ss[w[0]..w[1]].iter().map(|s| s.p)))
            .collect();
        let period = returns.iter().sum::<f64>() / returns.len() as f64;
        (Some(period), Some(relative_spread(&returns).max(relative_spread(&amps))))
    } else {
        (None, None)
    };

    let span = traj.times.last().unwrap() - traj.times[0];
    let classification = if amplitude < cfg.amp_floor {
        CycleClass::Equilibrium
    } else if crossings.len() < cfg.min_crossings {
        CycleClass::Undetermined
    } else if spread.is_some_and(|s| s < cfg.spread_tol)
        && period.is_some_and(|t| span >= cfg.min_periods * t)
    {
        CycleClass::LimitCycle
    } else {
        CycleClass::Undetermined
    };
    Ok(CycleReport {
        classification,
        amplitude,
        period,
        spread,
        crossings: crossings.len(),
        section,
    })
}

pub const PERSISTENCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PersistenceReport {
    /// True when the initial state has `P0 = 0` or `Z0 = 0`, so no claim applies.
    pub skipped: bool,
    pub min_n: f64,
    pub min_p: f64,
    pub min_z: f64,
    pub floor: f64,
    pub persistent: bool,
}

/// Minimum of each component over the trailing half of the run.
pub fn persistence_check(traj: &Trajectory, floor: f64) -> PersistenceReport {
    let init = traj.states[0];
    let tail = &traj.states[traj.tail_start(0.5)..];
    let min = |g: fn(&State) -> f64| tail.iter().map(g).fold(f64::INFINITY, f64::min);
    let (min_n, min_p, min_z) = (min(|s| s.n), min(|s| s.p), min(|s| s.z));
    let skipped = init.p <= 0.0 || init.z <= 0.0;
    PersistenceReport {
        skipped,
        min_n,
        min_p,
        min_z,
        floor,
        persistent: !skipped && min_n > floor && min_p > floor && min_z > floor,
    }
}

/// Simulate and classify at each `mu`, in parallel. Rows come back in the
/// order of `mus`.
pub fn cycle_sweep(
    p: &Parameters,
    mus: &[f64],
    init: impl Fn(&Parameters) -> Result<State> + Sync,
    opts: &SimulationOptions,
    cfg: &CycleConfig,
) -> Result<Vec<(f64, CycleReport)>> {
    mus.par_iter()
        .map(|&mu| {
            let q = p.with_mu(mu)?;
            let traj = integrate(&q, init(&q)?, opts)?;
            Ok((mu, detect_cycle(&traj, cfg)?))
        })
        .collect()
}

/// The coexistence equilibrium scaled componentwise by `1 + offset`, a
/// convenient interior starting point.
pub fn near_coexistence(p: &Parameters, offset: f64) -> Result<State> {
    let e2 = equilibria::coexistence(p)?.ok_or(Error::Existence {
        what: "coexistence equilibrium",
        mu: p.mu(),
        threshold: equilibria::mu_c1(p)?,
    })?;
    Ok(State::new(
        e2.n * (1.0 + offset),
        e2.p * (1.0 + offset),
        e2.z * (1.0 + offset),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::presets;

    fn opts(t_end: f64) -> SimulationOptions {
        SimulationOptions {
            t_end,
            ..Default::default()
        }
    }

    #[test]
    fn prey_free_plane_goes_to_washout() {
        let p = presets::holling2_equal_removal().with_mu(0.5).unwrap();
        let traj = integrate(&p, State::new(0.1, 0.0, 2.0), &opts(60.0)).unwrap();
        let end = traj.final_state();
        assert!(end.distance(&State::new(0.5, 0.0, 0.0)) < 1e-8);
        assert!(traj.states.iter().all(|s| s.p == 0.0));
        let d = lyapunov_monitor_e0(&traj).unwrap();
        assert!(d.descending);
        // strictly decreasing until rounding takes over
        let head: Vec<f64> = d.values.iter().copied().take_while(|&v| v > 1e-12).collect();
        assert!(head.len() > 100 && head.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn predator_free_plane_goes_to_single_species() {
        let p = presets::holling2_equal_removal().with_mu(0.6).unwrap();
        let e1 = equilibria::single_species(&p).unwrap().unwrap();
        let traj = integrate(&p, State::new(e1.n, 2.0 * e1.p, 0.0), &opts(80.0)).unwrap();
        assert!(traj.final_state().distance(&e1) < 1e-7);
        assert!(traj.states.iter().all(|s| s.z == 0.0));
        assert!(lyapunov_monitor_e1(&traj).unwrap().descending);
    }

    #[test]
    fn hsu_function_vanishes_at_equilibrium() {
        let p = presets::holling2_equal_removal().with_mu(0.6).unwrap();
        let h = HsuFunction::new(&p).unwrap();
        let e1 = equilibria::single_species(&p).unwrap().unwrap();
        assert!(h.eval(e1.n, e1.p).unwrap().abs() < 1e-14);
        assert!(h.eval(0.3, e1.p).unwrap() > 0.0);
        assert!(matches!(h.eval(0.3, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn hsu_derivative_is_negative_off_break_even() {
        let p = presets::holling2_equal_removal().with_mu(0.6).unwrap();
        let h = HsuFunction::new(&p).unwrap();
        for k in 1..200 {
            let n = 0.6 * k as f64 / 100.0;
            if (n - 0.2).abs() > 1e-9 {
                assert!(h.derivative(n).unwrap() < 0.0, "N = {n}");
            }
        }
        // matches the chain rule on the unfactored form
        let (n, prey) = (0.35, 0.4);
        let s = p.rhs(&State::new(n, prey, 0.0));
        let eps = 1e-6;
        let dl = (h.eval(n + eps * s.n, prey + eps * s.p).unwrap()
            - h.eval(n - eps * s.n, prey - eps * s.p).unwrap())
            / (2.0 * eps);
        assert!((dl - h.derivative(n).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn spiral_into_coexistence_before_hopf() {
        let p = presets::holling2_equal_removal().with_mu(0.55).unwrap();
        let e2 = equilibria::coexistence(&p).unwrap().unwrap();
        let traj = integrate(&p, near_coexistence(&p, 0.2).unwrap(), &opts(1500.0)).unwrap();
        assert!(traj.final_state().distance(&e2) < 1e-6);
    }

    #[test]
    fn pinned_equilibrium_has_zero_amplitude() {
        let p = presets::holling2_equal_removal().with_mu(0.5).unwrap();
        let e2 = equilibria::coexistence(&p).unwrap().unwrap();
        let traj = integrate(&p, e2, &opts(100.0)).unwrap();
        let r = detect_cycle(&traj, &CycleConfig::default()).unwrap();
        assert_eq!(r.classification, CycleClass::Equilibrium);
        assert!(r.amplitude < 1e-9);
    }

    #[test]
    fn persistence_skipped_without_predator() {
        let p = presets::holling2_equal_removal().with_mu(0.65).unwrap();
        let traj = integrate(&p, State::new(0.3, 0.3, 0.0), &opts(20.0)).unwrap();
        let r = persistence_check(&traj, PERSISTENCE_FLOOR);
        assert!(r.skipped && !r.persistent);
    }

    #[test]
    fn rejects_bad_initial_state() {
        let p = presets::holling2_equal_removal().with_mu(0.65).unwrap();
        assert!(integrate(&p, State::new(0.0, 0.3, 0.3), &opts(1.0)).is_err());
        assert!(integrate(&p, State::new(0.3, -0.1, 0.3), &opts(1.0)).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = presets::holling2_equal_removal().with_mu(0.65).unwrap();
        let traj = integrate(&p, State::new(0.3, 0.3, 0.3), &SimulationOptions { t_end: 1.0, sample_dt: 0.5, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,N,P,Z");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0.3,"));
    }
}
