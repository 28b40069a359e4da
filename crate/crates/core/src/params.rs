//! Model parameterization and the vector field of the nutrient-prey-predator
//! chemostat
//!
//! ```text
//! N' = (mu - N) D - P f1(N)
//! P' = gamma1 P f1(N) - D1 P - Z f2(P)
//! Z' = gamma2 Z f2(P) - D2 Z
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::response::Response;

/// A point `(N, P, Z)` in state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub n: f64,
    pub p: f64,
    pub z: f64,
}

impl State {
    pub const fn new(n: f64, p: f64, z: f64) -> Self {
        Self { n, p, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.n, self.p, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn distance(&self, other: &State) -> f64 {
        let (dn, dp, dz) = (self.n - other.n, self.p - other.p, self.z - other.z);
        (dn * dn + dp * dp + dz * dz).sqrt()
    }
}

/// Validated model parameters. Construct with [`Parameters::new`] and adjust
/// with the `with_*` methods, which re-validate.
#[derive(Debug, Clone)]
pub struct Parameters {
    mu: f64,
    d: f64,
    d1: f64,
    d2: f64,
    gamma1: f64,
    gamma2: f64,
    f1: Response,
    f2: Response,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and positive, got {v}"),
        })
    }
}

impl Parameters {
    /// Equal removal rates `D1 = D2 = D` and `mu = 0`.
    pub fn new(f1: Response, gamma1: f64, f2: Response, gamma2: f64, d: f64) -> Result<Self> {
        let p = Self {
            mu: 0.0,
            d,
            d1: d,
            d2: d,
            gamma1,
            gamma2,
            f1,
            f2,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        positive("D", self.d)?;
        positive("D1", self.d1)?;
        positive("D2", self.d2)?;
        positive("gamma1", self.gamma1)?;
        positive("gamma2", self.gamma2)?;
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("feed concentration must be finite and nonnegative, got {}", self.mu),
            });
        }
        let ceiling1 = self.gamma1 * self.f1.supremum();
        if ceiling1 <= self.d1 {
            return Err(Error::InvalidParameter {
                name: "D1",
                reason: format!(
                    "prey washes out: gamma1*sup(f1) = {ceiling1} must exceed D1 = {}",
                    self.d1
                ),
            });
        }
        let ceiling2 = self.gamma2 * self.f2.supremum();
        if ceiling2 <= self.d2 {
            return Err(Error::InvalidParameter {
                name: "D2",
                reason: format!(
                    "predator washes out: gamma2*sup(f2) = {ceiling2} must exceed D2 = {}",
                    self.d2
                ),
            });
        }
        Ok(())
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        let mut p = self.clone();
        p.mu = mu;
        p.validate()?;
        Ok(p)
    }

    pub fn with_removal_rates(&self, d1: f64, d2: f64) -> Result<Self> {
        let mut p = self.clone();
        p.d1 = d1;
        p.d2 = d2;
        p.validate()?;
        Ok(p)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn d1(&self) -> f64 {
        self.d1
    }
    pub fn d2(&self) -> f64 {
        self.d2
    }
    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }
    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }
    pub fn f1(&self) -> &Response {
        &self.f1
    }
    pub fn f2(&self) -> &Response {
        &self.f2
    }

    /// True when `D1 = D2 = D` up to rounding.
    pub fn has_equal_removal(&self) -> bool {
        let tol = 1e-12 * self.d;
        (self.d1 - self.d).abs() <= tol && (self.d2 - self.d).abs() <= tol
    }

    /// `min{D, D1, D2}`.
    pub fn min_rate(&self) -> f64 {
        self.d.min(self.d1).min(self.d2)
    }

    /// Right-hand side of the model at `s`.
    pub fn rhs(&self, s: &State) -> State {
        let f1 = self.f1.value(s.n);
        let f2 = self.f2.value(s.p);
        State {
            n: (self.mu - s.n) * self.d - s.p * f1,
            p: self.gamma1 * s.p * f1 - self.d1 * s.p - s.z * f2,
            z: self.gamma2 * s.z * f2 - self.d2 * s.z,
        }
    }

    /// Total biomass in nutrient units, `N + P/gamma1 + Z/(gamma1 gamma2)`.
    pub fn total_mass(&self, s: &State) -> f64 {
        s.n + s.p / self.gamma1 + s.z / (self.gamma1 * self.gamma2)
    }
}

/// The three parameter sets used to illustrate the Hopf bifurcation.
pub mod presets {
    use super::Parameters;
    use crate::response::Response;

    /// Holling II uptake, `m1 = 1, alpha1 = 0.2, gamma1 = 2, m2 = 2,
    /// alpha2 = 0.5, gamma2 = 1.5`, `D = D1 = D2 = 1`.
    pub fn holling2_equal_removal() -> Parameters {
        Parameters::new(
            Response::holling2(1.0, 0.2).unwrap(),
            2.0,
            Response::holling2(2.0, 0.5).unwrap(),
            1.5,
            1.0,
        )
        .unwrap()
    }

    /// Same uptake as [`holling2_equal_removal`] with `D1 = 1.2, D2 = 1.3`.
    pub fn holling2_unequal_removal() -> Parameters {
        holling2_equal_removal()
            .with_removal_rates(1.2, 1.3)
            .unwrap()
    }

    /// Holling III uptake, `m1 = 1.7, alpha1 = 0.8, m2 = 1.6, alpha2 = 0.9,
    /// gamma1 = 0.8, gamma2 = 0.9`, `D = 1, D1 = 1.2, D2 = 1.1`.
    pub fn holling3_unequal_removal() -> Parameters {
        Parameters::new(
            Response::holling3(1.7, 0.8).unwrap(),
            0.8,
            Response::holling3(1.6, 0.9).unwrap(),
            0.9,
            1.0,
        )
        .unwrap()
        .with_removal_rates(1.2, 1.1)
        .unwrap()
    }
}
