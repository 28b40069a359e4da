//! Cubic characteristic polynomials `p(x) = p0 + p1 x + p2 x^2 - x^3`, their
//! roots, and the factorization `p(x) = (alpha - x)(beta - gamma x + x^2)`
//! into a negative linear factor and a quadratic factor.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficients of `p0 + p1 x + p2 x^2 - x^3`.
///
/// The Routh-Hurwitz symbols of `x^3 + a1 x^2 + a2 x + a3` are
/// `a1 = -p2`, `a2 = -p1`, `a3 = -p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicCoeffs {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl CubicCoeffs {
    pub fn new(p0: f64, p1: f64, p2: f64) -> Self {
        Self { p0, p1, p2 }
    }

    pub fn from_routh_hurwitz(a1: f64, a2: f64, a3: f64) -> Self {
        Self::new(-a3, -a2, -a1)
    }

    /// `-prod (x - r_i)` for the given roots.
    pub fn from_roots(r: [Complex64; 3]) -> Self {
        let e1 = r[0] + r[1] + r[2];
        let e2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let e3 = r[0] * r[1] * r[2];
        Self::new(e3.re, -e2.re, e1.re)
    }

    /// `(a1, a2, a3)`.
    pub fn routh_hurwitz_symbols(&self) -> (f64, f64, f64) {
        (-self.p2, -self.p1, -self.p0)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        ((-x + self.p2) * x + self.p1) * x + self.p0
    }

    fn derivative(&self, x: Complex64) -> Complex64 {
        (x * -3.0 + 2.0 * self.p2) * x + self.p1
    }

    /// Magnitude of the terms of `p(x)`, used to scale residuals.
    pub fn term_scale(&self, x: Complex64) -> f64 {
        let a = x.norm();
        self.p0.abs() + self.p1.abs() * a + self.p2.abs() * a * a + a * a * a
    }

    fn scale(&self) -> f64 {
        1.0 + self.p0.abs().cbrt() + self.p1.abs().sqrt() + self.p2.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

/// Relative tolerance on `a1 a2 - a3` for the marginal (Hopf) boundary.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Routh-Hurwitz classification of a cubic with `a3 > 0`.
pub fn routh_hurwitz(c: &CubicCoeffs) -> Result<Stability> {
    let (a1, a2, a3) = c.routh_hurwitz_symbols();
    if !(a3 > 0.0) {
        return Err(Error::Contract(format!(
            "Routh-Hurwitz classification requires a3 > 0, got {a3:e}"
        )));
    }
    let tol = MARGINAL_TOL * (a1 * a2).abs().max(a3);
    let h = a1 * a2 - a3;
    if a1 > 0.0 && h.abs() <= tol {
        Ok(Stability::Marginal)
    } else if a1 > 0.0 && h > tol {
        Ok(Stability::Stable)
    } else {
        Ok(Stability::Unstable)
    }
}

fn newton_polish(c: &CubicCoeffs, mut x: Complex64) -> Complex64 {
    let mut res = c.eval(x).norm();
    for _ in 0..3 {
        if res == 0.0 {
            break;
        }
        let d = c.derivative(x);
        if d.norm() == 0.0 {
            break;
        }
        let next = x - c.eval(x) / d;
        let next_res = c.eval(next).norm();
        if !(next_res < res) {
            break;
        }
        x = next;
        res = next_res;
    }
    x
}

/// The three roots of `p`, from the closed-form (Cardano or trigonometric)
/// solution followed by a guarded Newton polish of each root.
///
/// Ordering: real roots ascending, then a complex pair with the
/// positive-imaginary member first. Complex roots come as exact conjugates.
pub fn eigenvalues(c: &CubicCoeffs) -> [Complex64; 3] {
    // monic form x^3 + b x^2 + cc x + d
    let (b, cc, d) = (-c.p2, -c.p1, -c.p0);
    let shift = b / 3.0;
    let pd = cc - b * b / 3.0;
    let qd = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
    let disc = (qd / 2.0) * (qd / 2.0) + (pd / 3.0) * (pd / 3.0) * (pd / 3.0);
    let re = |x: f64| Complex64::new(x, 0.0);

    let mut roots = if pd == 0.0 && qd == 0.0 {
        [re(-shift); 3]
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let a = -qd.signum() * (qd.abs() / 2.0 + s).cbrt();
        let bb = if a != 0.0 { -pd / (3.0 * a) } else { 0.0 };
        let real = a + bb - shift;
        let cre = -(a + bb) / 2.0 - shift;
        let cim = 3f64.sqrt() / 2.0 * (a - bb).abs();
        [
            re(real),
            Complex64::new(cre, cim),
            Complex64::new(cre, -cim),
        ]
    } else {
        let r = 2.0 * (-pd / 3.0).sqrt();
        let arg = (3.0 * qd / (pd * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [
            re(r * phi.cos() - shift),
            re(r * (phi - tau).cos() - shift),
            re(r * (phi - 2.0 * tau).cos() - shift),
        ]
    };

    let complex_pair = roots[1].im != 0.0;
    if complex_pair {
        roots[0] = re(newton_polish(c, roots[0]).re);
        let z = newton_polish(c, roots[1]);
        let z = Complex64::new(z.re, z.im.abs());
        roots[1] = z;
        roots[2] = z.conj();
    } else {
        for r in roots.iter_mut() {
            *r = re(newton_polish(c, *r).re);
        }
        roots.sort_by(|x, y| x.re.total_cmp(&y.re));
    }
    roots
}

/// Factorization `p(x) = (alpha - x)(beta - gamma x + x^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumFactorization {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(skip)]
    pub eigenvalues: [Complex64; 3],
    /// `gamma^2 - 4 beta`; negative when the quadratic factor has a complex pair.
    pub discriminant: f64,
}

impl SpectrumFactorization {
    /// Real part of the quadratic factor's root pair, `gamma / 2`.
    pub fn pair_real_part(&self) -> f64 {
        self.gamma / 2.0
    }

    /// Imaginary part magnitude of the pair, zero when the pair is real.
    pub fn pair_imag_part(&self) -> f64 {
        (-self.discriminant).max(0.0).sqrt() / 2.0
    }

    pub fn has_complex_pair(&self) -> bool {
        self.discriminant < 0.0
    }

    /// Coefficients recovered through the multiplication map
    /// `(alpha, beta, gamma) -> (alpha beta, -alpha gamma - beta, alpha + gamma)`.
    pub fn reconstruct(&self) -> CubicCoeffs {
        CubicCoeffs::new(
            self.alpha * self.beta,
            -self.alpha * self.gamma - self.beta,
            self.alpha + self.gamma,
        )
    }
}

fn is_real(z: Complex64, scale: f64) -> bool {
    z.im.abs() < 1e-8 * scale
}

/// Factor `p` with the linear factor taken at `roots[alpha_idx]`.
fn factor_at(c: &CubicCoeffs, roots: [Complex64; 3], alpha_idx: usize) -> Result<SpectrumFactorization> {
    let alpha = roots[alpha_idx].re;
    if !(alpha < 0.0) {
        return Err(Error::FactorizationDomain {
            mu: None,
            reason: format!("selected real root {alpha:e} is not negative"),
        });
    }
    let others: Vec<Complex64> = (0..3)
        .filter(|&i| i != alpha_idx)
        .map(|i| roots[i])
        .collect();
    let gamma = c.p2 - alpha;
    let beta = if alpha.abs() > 1e-3 {
        c.p0 / alpha
    } else {
        (others[0] * others[1]).re
    };
    Ok(SpectrumFactorization {
        alpha,
        beta,
        gamma,
        eigenvalues: roots,
        discriminant: gamma * gamma - 4.0 * beta,
    })
}

/// Factor `p` taking `alpha` as the real root with the most negative real
/// part. Three real roots with a tie for the most negative one are rejected
/// rather than resolved arbitrarily.
pub fn factorize(c: &CubicCoeffs) -> Result<SpectrumFactorization> {
    let roots = eigenvalues(c);
    let scale = c.scale();
    let real: Vec<usize> = (0..3).filter(|&i| is_real(roots[i], scale)).collect();
    match real.len() {
        0 => Err(Error::FactorizationDomain {
            mu: None,
            reason: "no real root".into(),
        }),
        1 => factor_at(c, roots, real[0]),
        _ => {
            let mut sorted = real.clone();
            sorted.sort_by(|&i, &j| roots[i].re.total_cmp(&roots[j].re));
            let gap = roots[sorted[1]].re - roots[sorted[0]].re;
            if gap <= 1e-8 * scale {
                return Err(Error::FactorizationDomain {
                    mu: None,
                    reason: format!(
                        "ambiguous linear factor: repeated most-negative real root {}",
                        roots[sorted[0]].re
                    ),
                });
            }
            factor_at(c, roots, sorted[0])
        }
    }
}

/// Factor `p` taking `alpha` as the real root nearest `hint`. Used to follow
/// the linear factor continuously along a parameter sweep.
pub fn factorize_near(c: &CubicCoeffs, hint: f64) -> Result<SpectrumFactorization> {
    let roots = eigenvalues(c);
    let scale = c.scale();
    let idx = (0..3)
        .filter(|&i| is_real(roots[i], scale))
        .min_by(|&i, &j| (roots[i].re - hint).abs().total_cmp(&(roots[j].re - hint).abs()))
        .ok_or_else(|| Error::FactorizationDomain {
            mu: None,
            reason: "no real root".into(),
        })?;
    factor_at(c, roots, idx)
}
