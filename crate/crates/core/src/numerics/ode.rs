//! Scalar Dormand–Prince 5(4) integrator with local error control.

use crate::{Error, Result};

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

// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 1_000_000;

/// `y(t1)` for `y' = rhs(t, y)`, `y(t0) = y0`.
///
/// Local errors are held below `tol · max(1, |y|)` per step.
pub fn integrate_ode(
    rhs: impl FnMut(f64, f64) -> f64,
    t0: f64,
    t1: f64,
    y0: f64,
    tol: f64,
) -> Result<f64> {
    integrate_ode_observed(rhs, t0, t1, y0, tol, |_, _, _| {})
}

/// Like [`integrate_ode`], calling `observer(t, y, y')` at the initial point
/// and after every accepted step.
pub fn integrate_ode_observed(
    mut rhs: impl FnMut(f64, f64) -> f64,
    t0: f64,
    t1: f64,
    y0: f64,
    tol: f64,
    mut observer: impl FnMut(f64, f64, f64),
) -> Result<f64> {
    if !(t1 > t0) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "integrate_ode needs t0 < t1 and tol > 0 (t0 = {t0}, t1 = {t1}, tol = {tol})"
        )));
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, y);
    observer(t, y, k1);
    let mut h = initial_step(&mut rhs, t0, y0, k1, tol).min(span);
    let min_step = 1e-14 * span.max(t0.abs());

    for _ in 0..MAX_STEPS {
        if t1 - t <= 1e-15 * span {
            return Ok(y);
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let k2 = rhs(t + C2 * h, y + h * A21 * k1);
        let k3 = rhs(t + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = rhs(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = rhs(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = rhs(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = rhs(t + h, y_new);
        let err_abs = (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        let scale = tol * y.abs().max(y_new.abs()).max(1.0);
        let err = err_abs / scale;

        if !err.is_finite() {
            h *= 0.1;
        } else if err <= 1.0 {
            let last = h == t1 - t;
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k7;
            observer(t, y, k1);
            if last {
                return Ok(y);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < min_step {
            return Err(Error::StepUnderflow { t, step: h });
        }
    }
    Err(Error::StepUnderflow { t, step: h })
}

fn initial_step(rhs: &mut impl FnMut(f64, f64) -> f64, t0: f64, y0: f64, f0: f64, tol: f64) -> f64 {
    let sc = tol * y0.abs().max(1.0);
    let d0 = y0.abs() / sc;
    let d1 = f0.abs() / sc;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let f1 = rhs(t0 + h0, y0 + h0 * f0);
    let d2 = (f1 - f0).abs() / sc / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2};

    #[test]
    fn exponential_growth() {
        let tol = 1e-10;
        let y = integrate_ode(|_, y| y, 0.0, 1.0, 1.0, tol).unwrap();
        assert!((y - E).abs() < 10.0 * tol, "{}", y - E);
    }

    #[test]
    fn cosine_quadrature() {
        let tol = 1e-11;
        let y = integrate_ode(|t, _| t.cos(), 0.0, FRAC_PI_2, 0.0, tol).unwrap();
        assert!((y - 1.0).abs() < 10.0 * tol);
    }

    #[test]
    fn observer_sees_every_accepted_step() {
        let mut ts = Vec::new();
        integrate_ode_observed(|_, y| -y, 0.0, 3.0, 1.0, 1e-9, |t, _, _| ts.push(t)).unwrap();
        assert_eq!(ts[0], 0.0);
        assert_eq!(*ts.last().unwrap(), 3.0);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn singular_rhs_underflows() {
        // y' = 1/(1-t) blows up at t = 1.
        let err = integrate_ode(|t, _| 1.0 / (1.0 - t), 0.0, 2.0, 0.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }), "{err:?}");
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate_ode(|_, y| y, 1.0, 0.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn halving_tolerance_is_stable() {
        let f = |t: f64, y: f64| (t * y).sin() + 0.5 * y.cos();
        for tol in [1e-6, 1e-8, 1e-10] {
            let a = integrate_ode(f, 0.0, 4.0, 0.3, tol).unwrap();
            let b = integrate_ode(f, 0.0, 4.0, 0.3, tol / 2.0).unwrap();
            assert!((a - b).abs() <= 100.0 * tol, "tol {tol}: {}", (a - b).abs());
        }
    }

    #[test]
    fn deterministic() {
        let f = |t: f64, y: f64| (t - y).sin();
        let a = integrate_ode(f, 0.0, 5.0, 1.0, 1e-11).unwrap();
        let b = integrate_ode(f, 0.0, 5.0, 1.0, 1e-11).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
