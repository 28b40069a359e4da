//! Break-even concentrations and the three equilibria.
//!
//! * `E0 = (mu, 0, 0)` always exists.
//! * `E1 = (lambda_P(D1), P1, 0)` exists for `mu > lambda_P(D1)`.
//! * `E2 = (N*, lambda_Z(D2), Z*)` exists for `mu > mu_c1(D1, D2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{Parameters, State};
use crate::response::Response;
use crate::roots;

/// Whether an equilibrium is reported exactly at its existence threshold,
/// where it coalesces with the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Strict inequality: absent at the threshold.
    Exclude,
    /// Closed: present (on the boundary of the positive cone) at the threshold.
    Include,
}

impl Boundary {
    fn admits(self, mu: f64, threshold: f64) -> bool {
        match self {
            Boundary::Exclude => mu > threshold,
            Boundary::Include => mu >= threshold,
        }
    }
}

/// Unique `lambda` with `gamma * f(lambda) = rate`.
pub fn break_even(r: &Response, gamma: f64, rate: f64) -> Result<f64> {
    let ceiling = gamma * r.supremum();
    if !(rate > 0.0) || rate >= ceiling {
        return Err(Error::NoBreakEven { rate, ceiling });
    }
    let mut hi = 1.0;
    while gamma * r.value(hi) <= rate {
        hi *= 2.0;
        if !hi.is_finite() || hi > 1e300 {
            return Err(Error::NoBreakEven { rate, ceiling });
        }
    }
    let g = |x: f64| (gamma * r.value(x) - rate, gamma * r.slope(x));
    let mut lambda = roots::newton_bisect(g, 0.0, hi, 1e-15 * hi)?;
    // one polishing Newton step from the bracketed estimate
    let (res, der) = g(lambda);
    if der > 0.0 {
        let polished = lambda - res / der;
        if polished > 0.0 && g(polished).0.abs() < res.abs() {
            lambda = polished;
        }
    }
    Ok(lambda)
}

/// Derivative of the break-even concentration with respect to its removal
/// rate, `1 / (gamma f'(lambda))`.
pub fn lambda_prime(r: &Response, gamma: f64, lambda: f64) -> Result<f64> {
    let slope = r.eval(lambda, 1)?;
    if !(slope > 0.0) {
        return Err(Error::Contract(format!(
            "break-even derivative needs f'(lambda) > 0, got {slope}"
        )));
    }
    Ok(1.0 / (gamma * slope))
}

/// `lambda_P(D1)`, the prey break-even nutrient level.
pub fn lambda_p(p: &Parameters) -> Result<f64> {
    break_even(p.f1(), p.gamma1(), p.d1())
}

/// `lambda_Z(D2)`, the predator break-even prey level.
pub fn lambda_z(p: &Parameters) -> Result<f64> {
    break_even(p.f2(), p.gamma2(), p.d2())
}

/// Feed concentration above which the coexistence equilibrium exists:
/// `lambda_P(D1) + D1 lambda_Z(D2) / (D gamma1)`.
pub fn mu_c1(p: &Parameters) -> Result<f64> {
    Ok(lambda_p(p)? + p.d1() * lambda_z(p)? / (p.d() * p.gamma1()))
}

/// Upper bound `(gamma2/D2) lambda_Z (gamma1 sup f1 - D1)` on the predator
/// level of `E2` over all `mu`.
pub fn predator_bound(p: &Parameters) -> Result<f64> {
    let lz = lambda_z(p)?;
    Ok(p.gamma2() / p.d2() * lz * (p.gamma1() * p.f1().supremum() - p.d1()))
}

/// Washout equilibrium `(mu, 0, 0)`.
pub fn washout(p: &Parameters) -> State {
    State::new(p.mu(), 0.0, 0.0)
}

/// Prey-only equilibrium, present iff `mu > lambda_P(D1)`.
pub fn single_species(p: &Parameters) -> Result<Option<State>> {
    single_species_with(p, Boundary::Exclude)
}

pub fn single_species_with(p: &Parameters, boundary: Boundary) -> Result<Option<State>> {
    let lp = lambda_p(p)?;
    if !boundary.admits(p.mu(), lp) {
        return Ok(None);
    }
    let prey = ((p.mu() - lp) * p.d() * p.gamma1() / p.d1()).max(0.0);
    Ok(Some(State::new(lp, prey, 0.0)))
}

/// Residual of the nutrient balance at coexistence,
/// `(mu - N) D - lambda_Z f1(N)`, and its derivative in `N`.
fn nutrient_balance(p: &Parameters, lz: f64, n: f64) -> (f64, f64) {
    (
        (p.mu() - n) * p.d() - lz * p.f1().value(n),
        -p.d() - lz * p.f1().slope(n),
    )
}

/// Coexistence equilibrium, present iff `mu > mu_c1(D1, D2)`.
pub fn coexistence(p: &Parameters) -> Result<Option<State>> {
    coexistence_with(p, Boundary::Exclude)
}

pub fn coexistence_with(p: &Parameters, boundary: Boundary) -> Result<Option<State>> {
    let lz = lambda_z(p)?;
    let threshold = mu_c1(p)?;
    if !boundary.admits(p.mu(), threshold) {
        return Ok(None);
    }
    let mu = p.mu();
    let (g0, _) = nutrient_balance(p, lz, 0.0);
    let (gmu, _) = nutrient_balance(p, lz, mu);
    // strictly decreasing in N, positive at 0, negative at mu
    if !(g0 > 0.0 && gmu < 0.0) {
        return Err(Error::Contract(format!(
            "nutrient balance has no sign change on [0, {mu}]: {g0:e}, {gmu:e}"
        )));
    }
    let n = roots::newton_bisect(|n| nutrient_balance(p, lz, n), 0.0, mu, 1e-12)?;
    let z = (p.gamma2() / p.d2() * lz * (p.gamma1() * p.f1().value(n) - p.d1())).max(0.0);
    Ok(Some(State::new(n, lz, z)))
}

/// Scaled residuals of the two coexistence conditions at `s`: the nutrient
/// balance divided by `mu D` and the prey balance divided by `D1 lambda_Z`.
pub fn coexistence_residuals(p: &Parameters, s: &State) -> (f64, f64) {
    let f1 = p.f1().value(s.n);
    let f2 = p.f2().value(s.p);
    let r1 = ((p.mu() - s.n) * p.d() - s.p * f1) / (p.mu() * p.d()).max(f64::MIN_POSITIVE);
    let r2 = (p.gamma1() * s.p * f1 - p.d1() * s.p - s.z * f2) / (p.d1() * s.p);
    (r1, r2)
}

/// `mu`-derivatives `(N'(mu), Z'(mu))` of the coexistence coordinates from
/// the implicit relations `N' (D + lambda_Z f1'(N)) = D` and
/// `Z' = (gamma1 gamma2 / D2) lambda_Z f1'(N) N'`.
pub fn coexistence_mu_derivatives(p: &Parameters, e2: &State) -> (f64, f64) {
    let lz = e2.p;
    let f1p = p.f1().slope(e2.n);
    let dn = p.d() / (p.d() + lz * f1p);
    let dz = p.gamma1() * p.gamma2() / p.d2() * lz * f1p * dn;
    (dn, dz)
}

/// All equilibria present at the parameters' `mu`, with the thresholds that
/// govern their existence.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSet {
    pub mu: f64,
    pub e0: State,
    pub e1: Option<State>,
    pub e2: Option<State>,
    pub lambda_p: f64,
    pub lambda_z: f64,
    pub mu_c1: f64,
}

impl EquilibriumSet {
    pub fn compute(p: &Parameters) -> Result<Self> {
        Ok(Self {
            mu: p.mu(),
            e0: washout(p),
            e1: single_species(p)?,
            e2: coexistence(p)?,
            lambda_p: lambda_p(p)?,
            lambda_z: lambda_z(p)?,
            mu_c1: mu_c1(p)?,
        })
    }
}
