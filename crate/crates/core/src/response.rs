//! Functional responses: per-capita uptake curves `f(x)` with `f(0) = 0`,
//! strictly increasing and bounded above.
//!
//! The Holling families carry closed-form derivatives up to third order.
//! Custom responses supply their own derivative closures and a declared
//! supremum.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Highest derivative order exposed by [`Response::eval`].
pub const MAX_ORDER: u8 = 3;

/// One derivative of a response function, order given by position.
pub type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Response {
    /// `m x / (alpha + x)`
    HollingII { m: f64, alpha: f64 },
    /// `m x^2 / (alpha + x^2)`
    HollingIII { m: f64, alpha: f64 },
    Custom(CustomResponse),
}

#[derive(Clone)]
pub struct CustomResponse {
    name: String,
    // derivatives[k] is the k-th derivative; derivatives[0] is the value.
    derivatives: Vec<Curve>,
    sup: f64,
}

impl fmt::Debug for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::HollingII { m, alpha } => write!(f, "HollingII(m={m}, alpha={alpha})"),
            Response::HollingIII { m, alpha } => write!(f, "HollingIII(m={m}, alpha={alpha})"),
            Response::Custom(c) => write!(
                f,
                "Custom({}, orders<={}, sup={})",
                c.name,
                c.derivatives.len() - 1,
                c.sup
            ),
        }
    }
}

fn check_holling(m: f64, alpha: f64) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: format!("maximal uptake rate must be positive, got {m}"),
        });
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("half-saturation constant must be positive, got {alpha}"),
        });
    }
    Ok(())
}

impl Response {
    pub fn holling2(m: f64, alpha: f64) -> Result<Self> {
        check_holling(m, alpha)?;
        Ok(Response::HollingII { m, alpha })
    }

    pub fn holling3(m: f64, alpha: f64) -> Result<Self> {
        check_holling(m, alpha)?;
        Ok(Response::HollingIII { m, alpha })
    }

    /// Builds a user-supplied response from its value and derivative closures
    /// (`derivatives[0]` is the value, `derivatives[k]` the k-th derivative).
    ///
    /// The shape assumptions are checked on a log-spaced sample grid:
    /// `f(0) = 0`, `f' > 0` away from the origin, and `f <= sup`.
    pub fn custom(
        name: impl Into<String>,
        derivatives: Vec<Curve>,
        sup: f64,
    ) -> Result<Self> {
        let name = name.into();
        if derivatives.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "derivatives",
                reason: "a custom response needs at least the value and first derivative".into(),
            });
        }
        if derivatives.len() > MAX_ORDER as usize + 1 {
            return Err(Error::InvalidParameter {
                name: "derivatives",
                reason: format!("at most {} derivative orders are used", MAX_ORDER),
            });
        }
        if !(sup.is_finite() && sup > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sup",
                reason: format!("supremum must be finite and positive, got {sup}"),
            });
        }
        let value = &derivatives[0];
        let slope = &derivatives[1];
        let f0 = value(0.0);
        if f0.abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "derivatives",
                reason: format!("response must vanish at zero, f(0) = {f0}"),
            });
        }
        let mut prev = f0;
        for k in 0..=128 {
            let x = 1e-6 * 10f64.powf(k as f64 / 16.0);
            let fx = value(x);
            if !(slope(x) > 0.0) || fx < prev {
                return Err(Error::InvalidParameter {
                    name: "derivatives",
                    reason: format!("response is not strictly increasing near x = {x}"),
                });
            }
            if fx > sup {
                return Err(Error::InvalidParameter {
                    name: "sup",
                    reason: format!("f({x}) = {fx} reaches the declared supremum {sup}"),
                });
            }
            prev = fx;
        }
        Ok(Response::Custom(CustomResponse {
            name,
            derivatives,
            sup,
        }))
    }

    /// Value (`order = 0`) or derivative of order 1..=3 at `x >= 0`.
    pub fn eval(&self, x: f64, order: u8) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain {
                what: "response argument",
                value: x,
            });
        }
        if order > MAX_ORDER {
            return Err(Error::Capability { order });
        }
        match self {
            Response::HollingII { m, alpha } => Ok(holling2(*m, *alpha, x, order)),
            Response::HollingIII { m, alpha } => Ok(holling3(*m, *alpha, x, order)),
            Response::Custom(c) => c
                .derivatives
                .get(order as usize)
                .map(|d| d(x))
                .ok_or(Error::Capability { order }),
        }
    }

    /// Value at `x`, panicking only on programmer error. For internal callers
    /// that have already established `x >= 0`.
    pub(crate) fn value(&self, x: f64) -> f64 {
        self.eval(x.max(0.0), 0).expect("order 0 is always available")
    }

    pub(crate) fn slope(&self, x: f64) -> f64 {
        self.eval(x.max(0.0), 1).expect("order 1 is always available")
    }

    /// `lim_{x -> inf} f(x)`.
    pub fn supremum(&self) -> f64 {
        match self {
            Response::HollingII { m, .. } | Response::HollingIII { m, .. } => *m,
            Response::Custom(c) => c.sup,
        }
    }

    /// Highest derivative order this response can evaluate.
    pub fn max_order(&self) -> u8 {
        match self {
            Response::Custom(c) => (c.derivatives.len() - 1) as u8,
            _ => MAX_ORDER,
        }
    }
}

fn holling2(m: f64, a: f64, x: f64, order: u8) -> f64 {
    let s = a + x;
    match order {
        0 => m * x / s,
        1 => m * a / (s * s),
        2 => -2.0 * m * a / (s * s * s),
        _ => 6.0 * m * a / (s * s * s * s),
    }
}

fn holling3(m: f64, a: f64, x: f64, order: u8) -> f64 {
    // f = m - m a g with g = 1 / (a + x^2)
    let g = 1.0 / (a + x * x);
    match order {
        0 => m * x * x * g,
        1 => 2.0 * m * a * x * g * g,
        2 => 2.0 * m * a * (a - 3.0 * x * x) * g * g * g,
        _ => -m * a * (24.0 * x * g * g * g - 48.0 * x * x * x * g * g * g * g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holling2_half_saturation() {
        let r = Response::holling2(1.0, 0.2).unwrap();
        assert!((r.eval(0.2, 0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn holling3_at_sqrt_alpha_is_half_max() {
        let r = Response::holling3(1.6, 0.9).unwrap();
        assert!((r.eval(0.9f64.sqrt(), 0).unwrap() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn vanishes_at_zero() {
        for r in [
            Response::holling2(2.0, 0.5).unwrap(),
            Response::holling3(1.7, 0.8).unwrap(),
        ] {
            assert_eq!(r.eval(0.0, 0).unwrap(), 0.0);
        }
    }

    #[test]
    fn supremum_is_max_rate() {
        assert_eq!(Response::holling2(2.0, 0.5).unwrap().supremum(), 2.0);
        assert_eq!(Response::holling3(1.7, 0.8).unwrap().supremum(), 1.7);
        let c = Response::custom(
            "saturating-exp",
            vec![
                Arc::new(|x: f64| 3.5 * (1.0 - (-x).exp())),
                Arc::new(|x: f64| 3.5 * (-x).exp()),
            ],
            3.5,
        )
        .unwrap();
        assert_eq!(c.supremum(), 3.5);
    }

    #[test]
    fn negative_argument_is_domain_error() {
        let r = Response::holling2(1.0, 0.2).unwrap();
        assert!(matches!(r.eval(-1e-3, 0), Err(Error::Domain { .. })));
    }

    #[test]
    fn custom_missing_order_is_capability_error() {
        let c = Response::custom(
            "linear-sat",
            vec![
                Arc::new(|x: f64| x / (1.0 + x)),
                Arc::new(|x: f64| 1.0 / ((1.0 + x) * (1.0 + x))),
            ],
            1.0,
        )
        .unwrap();
        assert!(c.eval(1.0, 1).is_ok());
        assert!(matches!(c.eval(1.0, 2), Err(Error::Capability { order: 2 })));
        assert!(matches!(c.eval(1.0, 4), Err(Error::Capability { order: 4 })));
    }

    #[test]
    fn decreasing_custom_is_rejected() {
        let err = Response::custom(
            "decreasing",
            vec![
                Arc::new(|x: f64| -x / (1.0 + x)),
                Arc::new(|x: f64| -1.0 / ((1.0 + x) * (1.0 + x))),
            ],
            1.0,
        );
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn nonpositive_holling_parameters_rejected() {
        assert!(Response::holling2(-1.0, 0.2).is_err());
        assert!(Response::holling3(1.0, 0.0).is_err());
    }
}
