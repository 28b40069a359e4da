//! JSON run configuration shared by the command-line subcommands.
//!
//! ```json
//! {
//!   "parameters": {
//!     "mu": {"lo": 0.35, "hi": 0.9, "n": 111},
//!     "D": 1.0, "D1": 1.0, "D2": 1.0,
//!     "gamma1": 2.0, "gamma2": 1.5,
//!     "f1": {"kind": "holling2", "m": 1.0, "alpha": 0.2},
//!     "f2": {"kind": "holling2", "m": 2.0, "alpha": 0.5}
//!   },
//!   "hopf": {"bracket": [0.5, 0.7]},
//!   "simulate": {"init": [0.3, 0.3, 0.3], "t_end": 3000.0},
//!   "verify": {"seed": 7}
//! }
//! ```
//!
//! Only `parameters` is required. See `configs/README.md` for every field.

use std::path::Path;

use serde::Deserialize;

use crate::dynamics::CycleConfig;
use crate::error::Error;
use crate::params::{Parameters, State};
use crate::response::Response;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MuSpec {
    Scalar(f64),
    Range { lo: f64, hi: f64, n: usize },
}

impl MuSpec {
    /// Grid values; a scalar is a one-point grid.
    pub fn grid(&self) -> Vec<f64> {
        match *self {
            MuSpec::Scalar(mu) => vec![mu],
            MuSpec::Range { lo, hi, n } => crate::hopf::linspace(lo, hi, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ResponseSpec {
    Holling2 { m: f64, alpha: f64 },
    Holling3 { m: f64, alpha: f64 },
}

impl ResponseSpec {
    pub fn build(&self) -> crate::Result<Response> {
        match *self {
            ResponseSpec::Holling2 { m, alpha } => Response::holling2(m, alpha),
            ResponseSpec::Holling3 { m, alpha } => Response::holling3(m, alpha),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    pub mu: MuSpec,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "D1")]
    pub d1: Option<f64>,
    #[serde(rename = "D2")]
    pub d2: Option<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub f1: ResponseSpec,
    pub f2: ResponseSpec,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfSpec {
    pub bracket: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitSpec {
    State([f64; 3]),
    /// `{"near_coexistence": 0.1}` scales the coexistence state by `1 + offset`.
    NearCoexistence { near_coexistence: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSpec {
    pub init: InitSpec,
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sample_dt: f64,
    pub transient_fraction: f64,
    pub min_crossings: usize,
    pub amp_floor: f64,
    pub spread_tol: f64,
}

impl Default for SimulateSpec {
    fn default() -> Self {
        let c = CycleConfig::default();
        Self {
            init: InitSpec::NearCoexistence {
                near_coexistence: 0.1,
            },
            t_end: 3000.0,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            sample_dt: 0.05,
            transient_fraction: c.transient_fraction,
            min_crossings: c.min_crossings,
            amp_floor: c.amp_floor,
            spread_tol: c.spread_tol,
        }
    }
}

impl SimulateSpec {
    pub fn cycle_config(&self) -> CycleConfig {
        CycleConfig {
            transient_fraction: self.transient_fraction,
            min_crossings: self.min_crossings,
            amp_floor: self.amp_floor,
            spread_tol: self.spread_tol,
            ..CycleConfig::default()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    pub seed: u64,
    /// Random initial conditions per trajectory check.
    pub random_starts: usize,
    pub t_end: f64,
    pub random_cubics: usize,
    pub radii: Vec<f64>,
    pub samples_per_circle: usize,
    /// Defaults to `mu_c2 -/+ 0.05` when absent.
    pub mu_interval: Option<(f64, f64)>,
    pub mu_points: usize,
    pub monotonicity_points: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            seed: 20240601,
            random_starts: 20,
            t_end: 200.0,
            random_cubics: 1000,
            radii: vec![0.1, 0.05, 0.025],
            samples_per_circle: 16,
            mu_interval: None,
            mu_points: 11,
            monotonicity_points: 200,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub parameters: ParameterSpec,
    #[serde(default)]
    pub hopf: HopfSpec,
    #[serde(default)]
    pub simulate: SimulateSpec,
    #[serde(default)]
    pub verify: VerifySpec,
}

/// A configuration problem with the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn param_path(e: &Error) -> String {
    match e {
        Error::InvalidParameter { name, .. } => format!("parameters.{name}"),
        _ => "parameters".into(),
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::new(path.display().to_string(), e.to_string()))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg = Self::from_json_unvalidated(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse without semantic validation; pair with [`RunConfig::validate`].
    pub fn from_json_unvalidated(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&read(path)?)
    }

    pub fn from_path_unvalidated(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json_unvalidated(&read(path)?)
    }

    /// Check ranges and parameter invariants at every requested `mu`.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let MuSpec::Range { lo, hi, n } = self.parameters.mu {
            if !(lo < hi) {
                return Err(ConfigError::new("parameters.mu", format!("range needs lo < hi, got lo = {lo}, hi = {hi}")));
            }
            if n < 2 {
                return Err(ConfigError::new("parameters.mu.n", format!("range needs n >= 2, got {n}")));
            }
        }
        // parameter invariants at every requested mu
        for mu in self.parameters.mu.grid() {
            self.parameters_at(mu)?;
        }
        if let Some((lo, hi)) = self.hopf.bracket {
            if !(lo < hi) {
                return Err(ConfigError::new("hopf.bracket", format!("need lo < hi, got ({lo}, {hi})")));
            }
        }
        let s = &self.simulate;
        if let InitSpec::State(init) = s.init {
            if init.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(init[0] > 0.0) {
                return Err(ConfigError::new("simulate.init", format!("need N > 0 and P, Z >= 0, got {init:?}")));
            }
        }
        for (name, v) in [
            ("simulate.t_end", s.t_end),
            ("simulate.rel_tol", s.rel_tol),
            ("simulate.abs_tol", s.abs_tol),
            ("simulate.sample_dt", s.sample_dt),
            ("simulate.amp_floor", s.amp_floor),
            ("simulate.spread_tol", s.spread_tol),
            ("verify.t_end", self.verify.t_end),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::new(name, format!("must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&s.transient_fraction) {
            return Err(ConfigError::new("simulate.transient_fraction", "must lie in [0, 1)"));
        }
        let v = &self.verify;
        if v.radii.iter().any(|r| !(*r > 0.0)) || v.radii.is_empty() {
            return Err(ConfigError::new("verify.radii", "need at least one positive radius"));
        }
        if v.mu_points < 2 || v.monotonicity_points < 2 || v.samples_per_circle == 0 {
            return Err(ConfigError::new("verify", "mu_points and monotonicity_points need >= 2, samples_per_circle >= 1"));
        }
        Ok(())
    }

    /// Parameters at feed concentration `mu`.
    pub fn parameters_at(&self, mu: f64) -> Result<Parameters, ConfigError> {
        let s = &self.parameters;
        let f1 = s.f1.build().map_err(|e| ConfigError::new("parameters.f1", e.to_string()))?;
        let f2 = s.f2.build().map_err(|e| ConfigError::new("parameters.f2", e.to_string()))?;
        let wrap = |e: Error| ConfigError::new(param_path(&e), e.to_string());
        Parameters::new(f1, s.gamma1, f2, s.gamma2, s.d)
            .and_then(|p| p.with_removal_rates(s.d1.unwrap_or(s.d), s.d2.unwrap_or(s.d)))
            .and_then(|p| p.with_mu(mu))
            .map_err(wrap)
    }

    /// Parameters at the scalar `mu`; errors for a range.
    pub fn scalar_parameters(&self) -> Result<Parameters, ConfigError> {
        match self.parameters.mu {
            MuSpec::Scalar(mu) => self.parameters_at(mu),
            MuSpec::Range { .. } => Err(ConfigError::new("parameters.mu", "this command needs a scalar mu")),
        }
    }

    /// Parameters with `mu` unset (zero); for commands that pick `mu` themselves.
    pub fn base_parameters(&self) -> Result<Parameters, ConfigError> {
        self.parameters_at(0.0)
    }

    /// Representative `mu`: the scalar, or the midpoint of a range.
    pub fn representative_mu(&self) -> f64 {
        match self.parameters.mu {
            MuSpec::Scalar(mu) => mu,
            MuSpec::Range { lo, hi, .. } => 0.5 * (lo + hi),
        }
    }

    pub fn initial_state(&self, p: &Parameters) -> crate::Result<State> {
        match self.simulate.init {
            InitSpec::State([n, pr, z]) => Ok(State::new(n, pr, z)),
            InitSpec::NearCoexistence { near_coexistence } => {
                crate::dynamics::near_coexistence(p, near_coexistence)
            }
        }
    }
}
