use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} must be nonnegative, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("response does not provide a derivative of order {order}")]
    Capability { order: u8 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no break-even concentration: rate {rate} is not below gamma*sup(f) = {ceiling}")]
    NoBreakEven { rate: f64, ceiling: f64 },

    #[error("{what} does not exist at mu = {mu} (threshold {threshold})")]
    Existence {
        what: &'static str,
        mu: f64,
        threshold: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("cannot factor the characteristic polynomial{}: {reason}", at_mu(.mu))]
    FactorizationDomain { mu: Option<f64>, reason: String },

    #[error("no sign change of the real part on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("transversality fails at mu = {mu}: slope {slope:e} is not positive")]
    Transversality { mu: f64, slope: f64 },

    #[error("complex pair collides on the real axis at mu = {mu} (discriminant {discriminant:e})")]
    PairCollision { mu: f64, discriminant: f64 },

    #[error("step size underflow at t = {t} (h = {h:e}); the problem looks stiff")]
    Stiffness { t: f64, h: f64 },

    #[error("model invariant violated at t = {t}: {detail}")]
    ModelViolation { t: f64, detail: String },

    #[error("root finder did not converge: {0}")]
    NoConvergence(String),
}

fn at_mu(mu: &Option<f64>) -> String {
    match mu {
        Some(m) => format!(" at mu = {m}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach the offending bifurcation parameter to a factorization error.
    pub(crate) fn at(self, mu: f64) -> Self {
        match self {
            Error::FactorizationDomain { reason, .. } => Error::FactorizationDomain {
                mu: Some(mu),
                reason,
            },
            other => other,
        }
    }
}
