//! Linearization at the equilibria: Jacobian, characteristic coefficients at
//! the coexistence equilibrium, and the `A, B, C` reduction that applies when
//! all removal rates equal `D`.

use num_complex::Complex64;
use serde::Serialize;

use crate::cubic::{CubicCoeffs, Stability};
use crate::equilibria::{self, Boundary};
use crate::error::{Error, Result};
use crate::params::{Parameters, State};

pub type Matrix3 = [[f64; 3]; 3];

/// Jacobian of the vector field at `at`.
pub fn jacobian(p: &Parameters, at: &State) -> Matrix3 {
    let (f1, f1p) = (p.f1().value(at.n), p.f1().slope(at.n));
    let (f2, f2p) = (p.f2().value(at.p), p.f2().slope(at.p));
    [
        [-p.d() - at.p * f1p, -f1, 0.0],
        [
            p.gamma1() * at.p * f1p,
            p.gamma1() * f1 - p.d1() - at.z * f2p,
            -f2,
        ],
        [0.0, p.gamma2() * at.z * f2p, p.gamma2() * f2 - p.d2()],
    ]
}

/// Characteristic polynomial `det(m - x I)` from trace, principal minors and
/// determinant.
pub fn characteristic(m: &Matrix3) -> CubicCoeffs {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2]
        - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    CubicCoeffs::new(det, -minors, tr)
}

fn require_e2(p: &Parameters) -> Result<State> {
    equilibria::coexistence(p)?.ok_or(Error::Existence {
        what: "coexistence equilibrium",
        mu: p.mu(),
        threshold: equilibria::mu_c1(p)?,
    })
}

/// Routh-Hurwitz symbols `(a1, a2, a3)` at a coexistence point `e2`.
pub fn routh_hurwitz_symbols_at(p: &Parameters, e2: &State) -> (f64, f64, f64) {
    let lz = e2.p;
    let z = e2.z;
    let f1 = p.f1().value(e2.n);
    let f1p = p.f1().slope(e2.n);
    let f2p = p.f2().slope(lz);
    let (d, d1, d2, g1) = (p.d(), p.d1(), p.d2(), p.gamma1());
    let a1 = z * f2p + lz * f1p - g1 * f1 + d1 + d;
    let a2 = lz * z * f1p * f2p + d2 * z * f2p + d * z * f2p + d1 * lz * f1p - d * g1 * f1
        + d * d1;
    let a3 = d2 * z * f2p * (d + lz * f1p);
    (a1, a2, a3)
}

/// Characteristic coefficients of the Jacobian at the coexistence equilibrium,
/// evaluated from the closed Routh-Hurwitz expressions.
pub fn char_coeffs_e2(p: &Parameters) -> Result<CubicCoeffs> {
    let e2 = require_e2(p)?;
    let (a1, a2, a3) = routh_hurwitz_symbols_at(p, &e2);
    Ok(CubicCoeffs::from_routh_hurwitz(a1, a2, a3))
}

/// Classification by the sign of the largest real part, with a `tol`
/// band reported as marginal.
pub fn classify_spectrum(eigs: &[Complex64], tol: f64) -> Stability {
    let max_re = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re < -tol {
        Stability::Stable
    } else if max_re > tol {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// `D / (gamma2 lambda_Z(D)) - f2'(lambda_Z(D))`: positive when the secant of
/// `f2` through the origin and the break-even point is steeper than the
/// tangent there.
pub fn secant_tangent_gap(p: &Parameters) -> Result<f64> {
    let lz = equilibria::break_even(p.f2(), p.gamma2(), p.d())?;
    Ok(p.d() / (p.gamma2() * lz) - p.f2().slope(lz))
}

/// Quantities of the reduced characteristic polynomial
/// `(-D - x)(x^2 - A x - B C)` valid when `D1 = D2 = D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbcReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `dA/dmu` from the implicit derivatives of `N` and `Z`.
    pub a_prime: f64,
}

impl AbcReport {
    /// Discriminant `A^2 + 4 B C` of the quadratic factor.
    pub fn discriminant(&self) -> f64 {
        self.a * self.a + 4.0 * self.b * self.c
    }
}

fn require_equal_removal(p: &Parameters) -> Result<()> {
    if p.has_equal_removal() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "D1/D2",
            reason: format!(
                "the A, B, C reduction needs D1 = D2 = D, got D = {}, D1 = {}, D2 = {}",
                p.d(),
                p.d1(),
                p.d2()
            ),
        })
    }
}

/// `A, B, C` and `A'(mu)` at the coexistence equilibrium, equal removal rates.
pub fn abc_equal_removal(p: &Parameters) -> Result<AbcReport> {
    abc_equal_removal_with(p, Boundary::Exclude)
}

pub fn abc_equal_removal_with(p: &Parameters, boundary: Boundary) -> Result<AbcReport> {
    require_equal_removal(p)?;
    let e2 = equilibria::coexistence_with(p, boundary)?.ok_or(Error::Existence {
        what: "coexistence equilibrium",
        mu: p.mu(),
        threshold: equilibria::mu_c1(p)?,
    })?;
    Ok(abc_at(p, &e2))
}

fn abc_at(p: &Parameters, e2: &State) -> AbcReport {
    let d = p.d();
    let lz = e2.p;
    let z = e2.z;
    let f1p = p.f1().slope(e2.n);
    let f1pp = p
        .f1()
        .eval(e2.n, 2)
        .expect("A' needs the second derivative of f1");
    let f2p = p.f2().slope(lz);
    let gap = d / (p.gamma2() * lz) - f2p;
    let a = z * gap - lz * f1p;
    let b = -(lz * f1p + d) / p.gamma2();
    let c = p.gamma2() * z * f2p;
    let (dn, dz) = equilibria::coexistence_mu_derivatives(p, e2);
    let a_prime = dz * gap - lz * f1pp * dn;
    AbcReport { a, b, c, a_prime }
}

/// One equilibrium with its spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumStability {
    pub name: &'static str,
    pub state: State,
    /// `[re, im]` pairs.
    pub eigenvalues: Vec<[f64; 2]>,
    pub stability: Stability,
}

/// Thresholds and every equilibrium present at the parameters' `mu`, each
/// classified. The coexistence state is classified by Routh-Hurwitz, the
/// boundary states by the spectrum of their Jacobian.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub mu: f64,
    pub lambda_p: f64,
    pub lambda_z: f64,
    pub mu_c1: f64,
    pub equilibria: Vec<EquilibriumStability>,
}

pub fn analyze(p: &Parameters) -> Result<Analysis> {
    let set = equilibria::EquilibriumSet::compute(p)?;
    let entry = |name: &'static str, s: State| -> Result<EquilibriumStability> {
        let coeffs = if name == "E2" {
            let (a1, a2, a3) = routh_hurwitz_symbols_at(p, &s);
            CubicCoeffs::from_routh_hurwitz(a1, a2, a3)
        } else {
            characteristic(&jacobian(p, &s))
        };
        let eigs = crate::cubic::eigenvalues(&coeffs);
        let stability = if name == "E2" {
            crate::cubic::routh_hurwitz(&coeffs)?
        } else {
            classify_spectrum(&eigs, crate::cubic::MARGINAL_TOL)
        };
        Ok(EquilibriumStability {
            name,
            state: s,
            eigenvalues: eigs.iter().map(|z| [z.re, z.im]).collect(),
            stability,
        })
    };
    let mut list = vec![entry("E0", set.e0)?];
    if let Some(e1) = set.e1 {
        list.push(entry("E1", e1)?);
    }
    if let Some(e2) = set.e2 {
        list.push(entry("E2", e2)?);
    }
    Ok(Analysis {
        mu: set.mu,
        lambda_p: set.lambda_p,
        lambda_z: set.lambda_z,
        mu_c1: set.mu_c1,
        equilibria: list,
    })
}
