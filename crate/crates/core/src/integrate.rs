//! Dormand-Prince 5(4) with PI step-size control and continuous output.

use serde::Serialize;

use crate::error::{Error, Result};

/// Components in `[-NEGATIVE_FLOOR, 0)` are clipped to zero; anything below
/// aborts the integration.
pub const NEGATIVE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected_steps: usize,
    /// Largest local error estimate (max-norm) over accepted steps.
    pub max_error_estimate: f64,
    /// Sum of local error estimates over accepted steps.
    pub accumulated_error: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: usize = 50_000_000;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn error_norm<const N: usize>(e: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: Tolerances) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = tol.abs + tol.rel * y0[i].abs().max(y1[i].abs());
            (e[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn floor_check<const N: usize>(t: f64, y: &mut [f64; N]) -> Result<()> {
    for (i, v) in y.iter_mut().enumerate() {
        if *v < -NEGATIVE_FLOOR || !v.is_finite() {
            return Err(Error::ModelViolation {
                t,
                detail: format!("component {i} = {v:e} below the nonnegativity floor"),
            });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

fn initial_step<const N: usize, F>(f: &mut F, t0: f64, y0: &[f64; N], f0: &[f64; N], span: f64, tol: Tolerances) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let scaled = |v: &[f64; N]| -> f64 {
        let s: f64 = (0..N)
            .map(|i| (v[i] / (tol.abs + tol.rel * y0[i].abs())).powi(2))
            .sum();
        (s / N as f64).sqrt()
    };
    let (d0, d1) = (scaled(y0), scaled(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = combine(y0, h0, &[(1.0, f0)]);
    let f1 = f(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = scaled(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrate `y' = f(t, y)` from `(t0, y0)` and return the solution at each
/// of `sample_times` (ascending, all `>= t0`).
///
/// Every accepted step and every sample is passed through the nonnegativity
/// floor. `on_sample` sees each sample as it is produced and may abort the
/// run by returning an error.
pub fn dopri5<const N: usize, F, M>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    sample_times: &[f64],
    tol: Tolerances,
    mut on_sample: M,
) -> Result<(Vec<[f64; N]>, IntegratorStats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    M: FnMut(f64, &[f64; N]) -> Result<()>,
{
    if !(tol.rel > 0.0 && tol.abs > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerances",
            reason: format!("rel = {}, abs = {} must both be positive", tol.rel, tol.abs),
        });
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) || sample_times.first().is_some_and(|&s| s < t0) {
        return Err(Error::InvalidParameter {
            name: "sample_times",
            reason: "must be ascending and not before the initial time".into(),
        });
    }
    let mut stats = IntegratorStats::default();
    let mut out = Vec::with_capacity(sample_times.len());
    let mut y = y0;
    floor_check(t0, &mut y)?;
    let mut next = 0;
    while next < sample_times.len() && sample_times[next] <= t0 {
        on_sample(t0, &y)?;
        out.push(y);
        next += 1;
    }
    let Some(&t_end) = sample_times.last() else {
        return Ok((out, stats));
    };
    if next == sample_times.len() {
        return Ok((out, stats));
    }

    let mut t = t0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&mut f, t, &y, &k1, t_end - t0, tol);
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while next < sample_times.len() {
        if stats.steps + stats.rejected_steps >= MAX_STEPS {
            return Err(Error::Stiffness { t, h });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness { t, h });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y_new);
        let mut e = [0.0; N];
        for i in 0..N {
            e[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = error_norm(&e, &y, &y_new, tol);
        if !err.is_finite() {
            h *= FAC_MIN;
            stats.rejected_steps += 1;
            last_rejected = true;
            continue;
        }
        let fac11 = err.powf(EXPO);
        if err <= 1.0 {
            let t_new = if t + h >= t_end { t_end } else { t + h };
            // continuous extension on [t, t_new]
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                let bspl = h * k1[i] - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - h * k7[i] - bspl;
                r[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            while next < sample_times.len() && sample_times[next] <= t_new {
                let ts = sample_times[next];
                let th = ((ts - t) / h).clamp(0.0, 1.0);
                let th1 = 1.0 - th;
                let mut ys = [0.0; N];
                for i in 0..N {
                    ys[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
                }
                floor_check(ts, &mut ys)?;
                on_sample(ts, &ys)?;
                out.push(ys);
                next += 1;
            }
            let local = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            stats.steps += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(local);
            stats.accumulated_error += local;

            t = t_new;
            y = y_new;
            floor_check(t, &mut y)?;
            k1 = if y == y_new { k7 } else { f(t, &y) };

            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = err.max(1e-4);
            last_rejected = false;
            h = h_new;
        } else {
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            stats.rejected_steps += 1;
            last_rejected = true;
        }
    }
    Ok((out, stats))
}
