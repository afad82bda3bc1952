//! Jacobi elliptic functions and the complete elliptic integral of the first
//! kind, for real argument and modulus `0 ≤ k < 1`.

use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

/// Upper bound on AGM steps; convergence is quadratic so this is never hit
/// for `k < 1`.
const MAX_AGM_STEPS: usize = 40;

/// A modulus together with its complement and both quarter periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    pub k: f64,
    pub k_prime: f64,
    /// `K(k)`.
    pub quarter_period: f64,
    /// `K'(k) = K(k')`; infinite at `k = 0`.
    pub quarter_period_prime: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        check_modulus(k)?;
        let k_prime = (1.0 - k * k).sqrt();
        Ok(Self {
            k,
            k_prime,
            quarter_period: FRAC_PI_2 / agm(1.0, k_prime),
            quarter_period_prime: if k == 0.0 { f64::INFINITY } else { FRAC_PI_2 / agm(1.0, k) },
        })
    }

    /// Builds the modulus from `k²`, which is how it usually arises.
    pub fn from_k2(k2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k2) {
            return Err(Error::InvalidArgument(format!("k² must lie in [0, 1), got {k2}")));
        }
        let mut m = Self::new(k2.sqrt())?;
        m.k_prime = (1.0 - k2).sqrt();
        Ok(m)
    }

    /// The modulus with `k` and `k'` exchanged.
    pub fn complement(&self) -> Result<Self> {
        Self::from_k2(self.k_prime * self.k_prime)
    }
}

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!("elliptic modulus must lie in [0, 1), got {k}")));
    }
    Ok(())
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `K(k) = ∫₀^{π/2} (1 − k² sin²θ)^{-1/2} dθ` via the arithmetic–geometric mean.
pub fn complete_elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    Ok(FRAC_PI_2 / agm(1.0, (1.0 - k * k).sqrt()))
}

/// Amplitude `φ` with `sn = sin φ`, `cn = cos φ`, plus `dn`, for any real `t`.
///
/// Descending Landen sequence `a_{j+1} = (a_j + b_j)/2`, `b_{j+1} = √(a_j b_j)`,
/// `c_{j+1} = (a_j − b_j)/2` from `(1, k', k)`, then the backward recurrence
/// `φ_{j−1} = (φ_j + asin((c_j/a_j) sin φ_j))/2` from `φ_N = 2ᴺ a_N t`.
/// `dn ≥ k'` is bounded away from zero, so `√(1 − k² sn²)` loses nothing.
fn amplitude_and_dn(t: f64, k: f64) -> (f64, f64) {
    if k == 0.0 {
        return (t, 1.0);
    }
    let mut ratios = [0.0f64; MAX_AGM_STEPS + 1];
    let (mut a, mut b, mut c) = (1.0, (1.0 - k * k).sqrt(), k);
    let mut steps = 0;
    while c.abs() > f64::EPSILON * a && steps < MAX_AGM_STEPS {
        steps += 1;
        let next = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = next;
        ratios[steps] = c / a;
    }
    let mut phi = 2f64.powi(steps as i32) * a * t;
    for j in (1..=steps).rev() {
        phi = 0.5 * (phi + (ratios[j] * phi.sin()).asin());
    }
    // The Landen quotient cos φ₀ / cos(φ₁ − φ₀) degenerates to 0/0 at odd
    // multiples of K, so dn comes from the modulus identity instead.
    let dn = (1.0 - (k * phi.sin()).powi(2)).sqrt();
    (phi, dn)
}

/// `(sn, cn, dn)` of `(t, k)` evaluated together.
pub fn jacobi_sn_cn_dn(t: f64, k: f64) -> Result<(f64, f64, f64)> {
    check_modulus(k)?;
    let (phi, dn) = amplitude_and_dn(t, k);
    let (sn, cn) = phi.sin_cos();
    Ok((sn, cn, dn))
}

/// [`jacobi_sn_cn_dn`] for a modulus already known to be valid.
pub(crate) fn sn_cn_dn(t: f64, k: f64) -> (f64, f64, f64) {
    debug_assert!((0.0..1.0).contains(&k));
    let (phi, dn) = amplitude_and_dn(t, k);
    let (sn, cn) = phi.sin_cos();
    (sn, cn, dn)
}

/// Amplitude `am(t, k)` on `0 ≤ t ≤ K(k)`, where it equals `asin(sn)`.
pub fn jacobi_am(t: f64, k: f64) -> Result<f64> {
    let quarter = complete_elliptic_k(k)?;
    let slack = 1e-12 * quarter;
    if !(t >= -slack && t <= quarter + slack) {
        return Err(Error::InvalidArgument(format!("amplitude needs 0 ≤ t ≤ K = {quarter}, got {t}")));
    }
    Ok(amplitude_and_dn(t.clamp(0.0, quarter), k).0.clamp(0.0, FRAC_PI_2))
}
