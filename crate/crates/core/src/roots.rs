//! Scalar root finding on a sign-changing bracket.

use crate::error::{Error, Result};

fn different_signs(a: f64, b: f64) -> bool {
    (a < 0.0) != (b < 0.0)
}

/// Newton iteration safeguarded by bisection on `[lo, hi]`.
///
/// `f` returns `(value, derivative)`. A Newton step is taken only when it
/// lands strictly inside the current bracket and shrinks the residual
/// estimate; otherwise the bracket is bisected. Stops when the bracket is
/// narrower than `xtol` or the residual is exactly zero.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !different_signs(fa, fb) {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let neg_at_a = fa < 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        if b - a <= xtol {
            return Ok(0.5 * (a + b));
        }
        let newton = x - fx / dfx;
        let step_ok = dfx != 0.0 && newton > a && newton < b;
        let prev = x;
        x = if step_ok { newton } else { 0.5 * (a + b) };
        if step_ok && (x - prev).abs() <= 0.25 * xtol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(format!(
        "newton/bisection stalled on [{a}, {b}]"
    )))
}

/// Plain bisection to bracket width `xtol`. Used as an independent cross-check
/// of [`newton_bisect`].
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !different_signs(fa, fb) {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let neg_at_a = fa < 0.0;
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection followed by a bracket-preserving secant (Illinois) polish.
///
/// Bisects until the bracket has shrunk by `1e-3`, then switches to false
/// position with the Illinois weight adjustment. Returns the final iterate
/// once `|f| <= ftol` or the bracket collapses.
pub fn bisect_secant<F>(mut f: F, lo: f64, hi: f64, ftol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa.abs() <= ftol {
        return Ok(a);
    }
    if fb.abs() <= ftol {
        return Ok(b);
    }
    if !different_signs(fa, fb) {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let width = b - a;
    while b - a > 1e-3 * width {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm.abs() <= ftol {
            return Ok(m);
        }
        if different_signs(fa, fm) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    // 0 = last update moved a, 1 = moved b
    let mut side = 2u8;
    for _ in 0..200 {
        let x = (a * fb - b * fa) / (fb - fa);
        let x = if x > a && x < b { x } else { 0.5 * (a + b) };
        let fx = f(x)?;
        if fx.abs() <= ftol || b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            return Ok(x);
        }
        if different_signs(fa, fx) {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = x;
            fa = fx;
            if side == 0 {
                fb *= 0.5;
            }
            side = 0;
        }
    }
    Err(Error::NoConvergence(format!(
        "secant polish did not reach |f| <= {ftol:e} on [{a}, {b}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_finds_sqrt2() {
        let r = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn newton_bisect_survives_bad_derivative() {
        // derivative lies: Newton steps are rejected and bisection takes over
        let r = newton_bisect(|x| (x.powi(3) - 0.125, 0.0), 0.0, 1.0, 1e-13).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_bracket_error() {
        assert!(matches!(
            newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12),
            Err(Error::Bracket { .. })
        ));
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn bisect_secant_converges_on_cos() {
        let r = bisect_secant(|x| Ok(x.cos()), 1.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }
}
