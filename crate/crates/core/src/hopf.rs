//! Locating the Hopf point: the value of `mu` where the complex eigenvalue
//! pair of the Jacobian at the coexistence equilibrium crosses the imaginary
//! axis, together with the checks that make the crossing a Hopf bifurcation
//! (negative real eigenvalue, nonzero crossing speed, complex pair).

use rayon::prelude::*;
use serde::Serialize;

use crate::cubic::{self, CubicCoeffs, SpectrumFactorization, Stability};
use crate::equilibria;
use crate::error::{Error, Result};
use crate::params::{Parameters, State};
use crate::roots;
use crate::stability;

/// Spectrum of the coexistence equilibrium at one value of `mu`.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumAt {
    pub e2: State,
    pub coeffs: CubicCoeffs,
    pub factors: SpectrumFactorization,
}

fn coexistence_coeffs(p: &Parameters, mu: f64) -> Result<(State, CubicCoeffs)> {
    let q = p.with_mu(mu)?;
    let e2 = equilibria::coexistence(&q)?.ok_or(Error::Existence {
        what: "coexistence equilibrium",
        mu,
        threshold: equilibria::mu_c1(&q)?,
    })?;
    let (a1, a2, a3) = stability::routh_hurwitz_symbols_at(&q, &e2);
    Ok((e2, CubicCoeffs::from_routh_hurwitz(a1, a2, a3)))
}

/// Factor the characteristic polynomial at the coexistence equilibrium for
/// feed concentration `mu`, taking the most negative real root as the linear
/// factor.
pub fn spectrum_at(p: &Parameters, mu: f64) -> Result<SpectrumAt> {
    let (e2, coeffs) = coexistence_coeffs(p, mu)?;
    let factors = cubic::factorize(&coeffs).map_err(|e| e.at(mu))?;
    Ok(SpectrumAt { e2, coeffs, factors })
}

/// Real part `gamma/2` of the complex pair, failing if the pair has become
/// real.
fn pair_real_part(p: &Parameters, mu: f64) -> Result<f64> {
    let s = spectrum_at(p, mu)?;
    if !s.factors.has_complex_pair() {
        return Err(Error::PairCollision {
            mu,
            discriminant: s.factors.discriminant,
        });
    }
    Ok(s.factors.pair_real_part())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint {
    pub mu: f64,
    pub n: f64,
    pub z: f64,
    /// `gamma / 2`, the real part of the quadratic factor's roots.
    pub re_pair: f64,
    pub im_pair: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub discriminant: f64,
    pub stability: Stability,
}

/// Eigenvalue data of the coexistence equilibrium along a `mu` grid.
#[derive(Debug, Clone, Serialize)]
pub struct RealPartCurve {
    pub points: Vec<CurvePoint>,
}

impl RealPartCurve {
    pub fn mu_grid(&self) -> Vec<f64> {
        self.points.iter().map(|c| c.mu).collect()
    }

    pub fn re_pair(&self) -> Vec<f64> {
        self.points.iter().map(|c| c.re_pair).collect()
    }

    pub fn alpha_track(&self) -> Vec<f64> {
        self.points.iter().map(|c| c.alpha).collect()
    }

    pub fn discriminants(&self) -> Vec<f64> {
        self.points.iter().map(|c| c.discriminant).collect()
    }

    /// Grid intervals on which the pair's real part changes sign while the
    /// pair is complex at both ends. Each is a candidate Hopf bracket.
    pub fn sign_changes(&self) -> Vec<(f64, f64)> {
        self.points
            .windows(2)
            .filter(|w| {
                w[0].discriminant < 0.0
                    && w[1].discriminant < 0.0
                    && (w[0].re_pair < 0.0) != (w[1].re_pair < 0.0)
            })
            .map(|w| (w[0].mu, w[1].mu))
            .collect()
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Real part of the complex pair (and the rest of the factorization) on an
/// `n`-point grid over `[mu_lo, mu_hi]`. See [`real_part_curve_on`].
pub fn real_part_curve(p: &Parameters, mu_lo: f64, mu_hi: f64, n: usize) -> Result<RealPartCurve> {
    if n < 2 || !(mu_lo < mu_hi) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("need mu_lo < mu_hi and n >= 2, got [{mu_lo}, {mu_hi}], n = {n}"),
        });
    }
    real_part_curve_on(p, &linspace(mu_lo, mu_hi, n))
}

/// Real part of the complex pair on an ascending `mu` grid. The linear
/// factor is followed by continuity: at each grid point the real root closest
/// to the previous point's `alpha` is taken.
pub fn real_part_curve_on(p: &Parameters, grid: &[f64]) -> Result<RealPartCurve> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "must be nonempty and strictly ascending".into(),
        });
    }
    let threshold = equilibria::mu_c1(p)?;
    if !(grid[0] > threshold) {
        return Err(Error::Existence {
            what: "coexistence equilibrium",
            mu: grid[0],
            threshold,
        });
    }
    let raw: Vec<(f64, State, CubicCoeffs)> = grid
        .par_iter()
        .map(|&mu| coexistence_coeffs(p, mu).map(|(e2, c)| (mu, e2, c)))
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(grid.len());
    let mut hint: Option<f64> = None;
    for (mu, e2, coeffs) in raw {
        let f = match hint {
            None => cubic::factorize(&coeffs),
            Some(h) => cubic::factorize_near(&coeffs, h),
        }
        .map_err(|e| e.at(mu))?;
        hint = Some(f.alpha);
        points.push(CurvePoint {
            mu,
            n: e2.n,
            z: e2.z,
            re_pair: f.pair_real_part(),
            im_pair: f.pair_imag_part(),
            alpha: f.alpha,
            beta: f.beta,
            gamma: f.gamma,
            discriminant: f.discriminant,
            stability: cubic::routh_hurwitz(&coeffs)?,
        });
    }
    Ok(RealPartCurve { points })
}

/// Hypotheses behind the existence and transversality of the crossing.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HypothesisFlags {
    /// `D / (gamma2 lambda_Z(D)) - f2'(lambda_Z(D))`.
    pub secant_gap: f64,
    /// `secant_gap > 0`.
    pub concavity_condition: bool,
    /// `f1''(N(mu_c2)) < 0`, when a crossing was supplied.
    pub f1_second_negative_at_crossing: Option<bool>,
    /// `f1'' < 0` on a sampled grid of nutrient levels; implies a unique crossing.
    pub f1_globally_concave: bool,
}

/// Evaluate the hypothesis predicates, optionally at a located crossing.
pub fn hypothesis_predicates(p: &Parameters, crossing: Option<f64>) -> Result<HypothesisFlags> {
    let secant_gap = stability::secant_tangent_gap(p)?;
    let f1_second_negative_at_crossing = match crossing {
        Some(mu) => {
            let e2 = equilibria::coexistence_with(&p.with_mu(mu)?, equilibria::Boundary::Include)?
                .ok_or(Error::Existence {
                    what: "coexistence equilibrium",
                    mu,
                    threshold: equilibria::mu_c1(p)?,
                })?;
            Some(p.f1().eval(e2.n, 2)? < 0.0)
        }
        None => None,
    };
    let mut f1_globally_concave = true;
    for k in 0..=200 {
        let x = 1e-4 * 10f64.powf(k as f64 / 25.0);
        if !(p.f1().eval(x, 2)? < 0.0) {
            f1_globally_concave = false;
            break;
        }
    }
    Ok(HypothesisFlags {
        secant_gap,
        concavity_condition: secant_gap > 0.0,
        f1_second_negative_at_crossing,
        f1_globally_concave,
    })
}

/// Extra consistency data available when `D1 = D2 = D`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EqualRemovalCheck {
    /// Zero of `A(mu)` found independently by bisection.
    pub a_root: f64,
    /// `A` at the certified crossing.
    pub a_at_crossing: f64,
    pub a_prime: f64,
    /// `-B C`, which equals `omega^2` at the crossing.
    pub minus_bc: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfCertificate {
    pub mu_c2: f64,
    pub bracket: (f64, f64),
    /// Real part of the pair at `mu_c2` (should vanish).
    pub re_at_crossing: f64,
    /// `d Re / d mu` at `mu_c2`.
    pub re_slope: f64,
    /// `omega > 0`, the imaginary part of the pair at the crossing.
    pub imag_at_crossing: f64,
    pub alpha_at_crossing: f64,
    pub discriminant_at_crossing: f64,
    pub hypotheses: HypothesisFlags,
    pub equal_removal: Option<EqualRemovalCheck>,
}

/// Tolerance on the real part at the certified crossing.
pub const CROSSING_TOL: f64 = 1e-10;

/// Locate and certify the crossing of the complex pair inside `bracket`.
pub fn find_hopf(p: &Parameters, bracket: (f64, f64)) -> Result<HopfCertificate> {
    let (lo, hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    let threshold = equilibria::mu_c1(p)?;
    if !(lo > threshold) {
        return Err(Error::Existence {
            what: "coexistence equilibrium",
            mu: lo,
            threshold,
        });
    }
    // the pair must stay complex across the bracket
    for mu in linspace(lo, hi, 17) {
        let s = spectrum_at(p, mu)?;
        if !s.factors.has_complex_pair() {
            return Err(Error::PairCollision {
                mu,
                discriminant: s.factors.discriminant,
            });
        }
    }
    let (re_lo, re_hi) = (pair_real_part(p, lo)?, pair_real_part(p, hi)?);
    if (re_lo < 0.0) == (re_hi < 0.0) {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo: re_lo,
            f_hi: re_hi,
        });
    }
    let mu_c2 = roots::bisect_secant(|mu| pair_real_part(p, mu), lo, hi, 1e-13)?;
    let at = spectrum_at(p, mu_c2)?;
    let re_at_crossing = at.factors.pair_real_part();
    if re_at_crossing.abs() > CROSSING_TOL {
        return Err(Error::NoConvergence(format!(
            "real part {re_at_crossing:e} at mu = {mu_c2} exceeds {CROSSING_TOL:e}"
        )));
    }
    let h = 1e-6 * (hi - lo);
    let re_slope = (pair_real_part(p, mu_c2 + h)? - pair_real_part(p, mu_c2 - h)?) / (2.0 * h);
    if !(re_slope > 0.0) {
        return Err(Error::Transversality {
            mu: mu_c2,
            slope: re_slope,
        });
    }
    if !(at.factors.alpha < 0.0) {
        return Err(Error::FactorizationDomain {
            mu: Some(mu_c2),
            reason: "real eigenvalue is not negative at the crossing".into(),
        });
    }

    let equal_removal = if p.has_equal_removal() {
        let a_of = |mu: f64| -> f64 {
            p.with_mu(mu)
                .and_then(|q| stability::abc_equal_removal(&q))
                .map(|r| r.a)
                .unwrap_or(f64::NAN)
        };
        let a_root = roots::bisect(a_of, lo, hi, 1e-14)?;
        let r = stability::abc_equal_removal(&p.with_mu(mu_c2)?)?;
        if (a_root - mu_c2).abs() > 1e-8 {
            return Err(Error::Contract(format!(
                "zero of A at {a_root} disagrees with the factorization crossing {mu_c2}"
            )));
        }
        Some(EqualRemovalCheck {
            a_root,
            a_at_crossing: r.a,
            a_prime: r.a_prime,
            minus_bc: -r.b * r.c,
        })
    } else {
        None
    };

    Ok(HopfCertificate {
        mu_c2,
        bracket: (lo, hi),
        re_at_crossing,
        re_slope,
        imag_at_crossing: at.factors.pair_imag_part(),
        alpha_at_crossing: at.factors.alpha,
        discriminant_at_crossing: at.factors.discriminant,
        hypotheses: hypothesis_predicates(p, Some(mu_c2))?,
        equal_removal,
    })
}

/// Heuristic search bracket: scan `[1.05 mu_c1, mu_c1 + 10 (mu_c1 - lambda_P)]`
/// on a 201-point grid and return the first interval where the complex pair's
/// real part changes sign.
pub fn default_bracket(p: &Parameters) -> Result<(f64, f64)> {
    let c1 = equilibria::mu_c1(p)?;
    let lp = equilibria::lambda_p(p)?;
    let (lo, hi) = (1.05 * c1, c1 + 10.0 * (c1 - lp));
    let curve = real_part_curve(p, lo, hi, 201)?;
    curve
        .sign_changes()
        .first()
        .copied()
        .ok_or(Error::Bracket {
            lo,
            hi,
            f_lo: curve.points[0].re_pair,
            f_hi: curve.points[curve.points.len() - 1].re_pair,
        })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AppendixRow {
    pub radius: f64,
    /// `max |gamma'(D1, D2)(mu) - A'(mu)| / dist` over the circle and `mu` grid.
    pub max_ratio: f64,
    pub max_difference: f64,
    /// `(D1, D2, mu)` attaining the maximum ratio.
    pub argmax: (f64, f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub rows: Vec<AppendixRow>,
    /// Largest over smallest `max_ratio` across radii.
    pub ratio_spread: f64,
}

impl AppendixReport {
    /// Ratios vary by less than a factor of two across radii.
    pub fn is_bounded(&self) -> bool {
        self.ratio_spread < 2.0
    }
}

/// `d gamma / d mu` for the removal rates of `p`, by central difference with
/// step `1e-5 max(mu, 1)`.
pub fn gamma_slope(p: &Parameters, mu: f64) -> Result<f64> {
    let h = 1e-5 * mu.abs().max(1.0);
    let g = |m: f64| -> Result<f64> {
        let s = spectrum_at(p, m)?;
        if !s.factors.has_complex_pair() {
            return Err(Error::FactorizationDomain {
                mu: Some(m),
                reason: format!(
                    "complex pair lost (discriminant {:e})",
                    s.factors.discriminant
                ),
            });
        }
        Ok(s.factors.gamma)
    };
    Ok((g(mu + h)? - g(mu - h)?) / (2.0 * h))
}

/// Compare the `mu`-slope of the quadratic factor's `gamma` for removal rates
/// `(D1, D2)` on circles around `(D, D)` with `A'(mu)` at `(D, D)`.
///
/// `p` must have `D1 = D2 = D`. For each radius, `samples_per_circle`
/// equally spaced angles and `mu_points` grid values in `mu_interval` are
/// evaluated.
pub fn appendix_bound_check(
    p: &Parameters,
    radii: &[f64],
    samples_per_circle: usize,
    mu_interval: (f64, f64),
    mu_points: usize,
) -> Result<AppendixReport> {
    if !p.has_equal_removal() {
        return Err(Error::InvalidParameter {
            name: "D1/D2",
            reason: "the reference curve needs D1 = D2 = D".into(),
        });
    }
    if radii.is_empty() || samples_per_circle == 0 || mu_points < 2 {
        return Err(Error::InvalidParameter {
            name: "radii/samples/mu_points",
            reason: "need at least one radius, one sample per circle and two mu points".into(),
        });
    }
    let mus = linspace(mu_interval.0, mu_interval.1, mu_points);
    let reference: Vec<f64> = mus
        .iter()
        .map(|&mu| stability::abc_equal_removal(&p.with_mu(mu)?).map(|r| r.a_prime))
        .collect::<Result<_>>()?;
    let d = p.d();

    let mut rows = Vec::with_capacity(radii.len());
    for &radius in radii {
        let samples: Vec<(f64, f64, f64, f64)> = (0..samples_per_circle)
            .into_par_iter()
            .map(|k| -> Result<Vec<(f64, f64, f64, f64)>> {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / samples_per_circle as f64;
                let (d1, d2) = (d + radius * theta.cos(), d + radius * theta.sin());
                let q = p.with_removal_rates(d1, d2)?;
                mus.iter()
                    .zip(&reference)
                    .map(|(&mu, &a_prime)| {
                        let diff = (gamma_slope(&q, mu)? - a_prime).abs();
                        Ok((d1, d2, mu, diff))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let worst = samples
            .iter()
            .copied()
            .max_by(|a, b| a.3.total_cmp(&b.3))
            .expect("nonempty sample set");
        rows.push(AppendixRow {
            radius,
            max_ratio: worst.3 / radius,
            max_difference: worst.3,
            argmax: (worst.0, worst.1, worst.2),
        });
    }
    let max = rows.iter().map(|r| r.max_ratio).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.max_ratio).fold(f64::MAX, f64::min);
    Ok(AppendixReport {
        rows,
        ratio_spread: max / min,
    })
}
