//! Prüfer-angle shooting for one separated equation at fixed `λ`.
//!
//! Writing `w = r sin θ`, `w'/ρ = r cos θ` turns `(w'/ρ)' + ρ(h − λ m² sn²)w = 0`
//! into the scalar equation
//!
//! ```text
//! θ' = ρ (cos²θ + (h − λ m² sn²(x, m)) sin²θ)
//! ```
//!
//! started at `θ(0) = (1 − κ_left)π/2`. The `n`-th eigenvalue is the `h` for
//! which `θ(X) = (1 + κ_right)π/2 + nπ`, where `X = K(m)`. The angle is never
//! reduced modulo `π`, so the winding directly counts zeros.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::elliptic::sn_cn_dn;
use crate::galerkin::{swap_for_s_equation, CoefficientSet};
use crate::numerics::{integrate_ode, integrate_ode_observed, try_find_root, RootBracket};
use crate::{Ellipsoid, Error, Parity, Result};

/// Local error tolerance of the angle integration.
pub const DEFAULT_TOLERANCE: f64 = 1e-11;
/// Bracket growth gives up beyond this `|h|`.
pub const BRACKET_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruferProblem {
    pub coeffs: CoefficientSet,
    pub kappa_left: u8,
    pub kappa_right: u8,
    pub tol: f64,
}

impl PruferProblem {
    pub fn new(coeffs: CoefficientSet, kappa_left: u8, kappa_right: u8) -> Result<Self> {
        if kappa_left > 1 || kappa_right > 1 {
            return Err(Error::InvalidArgument(format!(
                "boundary bits must be 0 or 1, got ({kappa_left}, {kappa_right})"
            )));
        }
        Ok(Self { coeffs, kappa_left, kappa_right, tol: DEFAULT_TOLERANCE })
    }

    /// The `t`-equation with bits `(κ₁, κ₂)`.
    pub fn t_equation(e: &Ellipsoid, parity: Parity) -> Self {
        Self::new(CoefficientSet::t_equation(e), parity.kappa1(), parity.kappa2()).expect("parity bits are valid")
    }

    /// The `s`-equation with bits `(κ₃, κ₂)`, in the swapped form whose
    /// eigenvalue is `λ − H`.
    pub fn s_equation(e: &Ellipsoid, parity: Parity) -> Self {
        Self::new(swap_for_s_equation(e), parity.kappa3(), parity.kappa2()).expect("parity bits are valid")
    }

    pub fn endpoint(&self) -> f64 {
        self.coeffs.endpoint()
    }

    pub fn theta_start(&self) -> f64 {
        (1.0 - self.kappa_left as f64) * FRAC_PI_2
    }

    /// `θ(X)` for the `n`-th eigenvalue.
    pub fn theta_target(&self, n: usize) -> f64 {
        (1.0 + self.kappa_right as f64) * FRAC_PI_2 + n as f64 * PI
    }

    fn rhs(&self, lambda: f64, h: f64) -> impl Fn(f64, f64) -> f64 {
        let coeffs = self.coeffs;
        let m2 = coeffs.k2();
        move |x: f64, theta: f64| {
            let (sn, cn, _) = sn_cn_dn(x, coeffs.modulus_k);
            let rho = (coeffs.axis_major.powi(2) * cn * cn + coeffs.axis_mid.powi(2) * sn * sn).sqrt();
            let (s, c) = theta.sin_cos();
            rho * (c * c + (h - lambda * m2 * sn * sn) * s * s)
        }
    }

    pub fn theta_at_end(&self, lambda: f64, h: f64) -> Result<f64> {
        if !(lambda.is_finite() && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("λ and h must be finite, got ({lambda}, {h})")));
        }
        integrate_ode(self.rhs(lambda, h), 0.0, self.endpoint(), self.theta_start(), self.tol)
    }

    /// The `h` whose solution hits the `n`-th target angle.
    ///
    /// With an estimate the search starts from `estimate ± max(1, 0.1|estimate|)`;
    /// otherwise it grows outward from `h = 0` by doubling.
    pub fn shoot_h(&self, lambda: f64, n: usize, estimate: Option<f64>) -> Result<f64> {
        let target = self.theta_target(n);
        let miss = |h: f64| -> Result<f64> { Ok(self.theta_at_end(lambda, h)? - target) };
        let bracket = match estimate {
            Some(center) if center.is_finite() => {
                let mut width = (0.1 * center.abs()).max(1.0);
                loop {
                    let (lo, hi) = (center - width, center + width);
                    let (f_lo, f_hi) = (miss(lo)?, miss(hi)?);
                    if f_lo == 0.0 {
                        return Ok(lo);
                    }
                    if f_hi == 0.0 {
                        return Ok(hi);
                    }
                    if f_lo < 0.0 && f_hi > 0.0 {
                        break RootBracket::new(lo, hi, f_lo, f_hi)?;
                    }
                    width *= 2.0;
                    if width > BRACKET_LIMIT {
                        return Err(Error::BracketGrowth { limit: BRACKET_LIMIT });
                    }
                }
            }
            _ => {
                let f0 = miss(0.0)?;
                if f0 == 0.0 {
                    return Ok(0.0);
                }
                let direction = if f0 < 0.0 { 1.0 } else { -1.0 };
                let (mut near, mut f_near) = (0.0, f0);
                let mut step = 1.0;
                loop {
                    let far = direction * step;
                    let f_far = miss(far)?;
                    if f_far == 0.0 {
                        return Ok(far);
                    }
                    if f_far.signum() != f_near.signum() {
                        let (lo, hi, f_lo, f_hi) =
                            if direction > 0.0 { (near, far, f_near, f_far) } else { (far, near, f_far, f_near) };
                        break RootBracket::new(lo, hi, f_lo, f_hi)?;
                    }
                    near = far;
                    f_near = f_far;
                    step *= 2.0;
                    if step > BRACKET_LIMIT {
                        return Err(Error::BracketGrowth { limit: BRACKET_LIMIT });
                    }
                }
            }
        };
        try_find_root(miss, bracket, 1e-13)
    }

    /// Whether `θ' > 0` at the start and after every accepted step.
    pub fn theta_derivative_positivity(&self, lambda: f64, h: f64) -> Result<bool> {
        let mut positive = true;
        integrate_ode_observed(self.rhs(lambda, h), 0.0, self.endpoint(), self.theta_start(), self.tol, |_, _, dy| {
            positive &= dy > 0.0;
        })?;
        Ok(positive)
    }

    /// Number of multiples of `π` strictly between `θ(0)` and `θ(X)`: the
    /// interior zeros of the solution.
    pub fn zero_count(&self, lambda: f64, h: f64) -> Result<usize> {
        let (start, end) = (self.theta_start(), self.theta_at_end(lambda, h)?);
        let slack = 1e-9;
        let first = (start / PI + slack).floor() as i64 + 1;
        let last = (end / PI - slack).ceil() as i64 - 1;
        Ok((last - first + 1).max(0) as usize)
    }
}
