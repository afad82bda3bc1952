//! The sphere limit and first-order perturbation away from it.
//!
//! On the unit sphere the separated equations become Lamé equations with a
//! free modulus `k`, and `λ_{m,n,κ} = ℓ(ℓ+1)` with `ℓ = 2m + 2n + |κ|`
//! regardless of `k`. The family of ellipsoids with semi-axes
//! `(√(1+k²ε), 1, √(1−k'²ε))` keeps the modulus `k` fixed, and
//!
//! ```text
//! λ'(0) = −(∂H/∂ε − ∂h/∂ε) / (∂H/∂λ − ∂h/∂λ)
//! ```
//!
//! where the four partial derivatives at `(Λ, 0)` are Rayleigh-type
//! quotients of the sphere eigenfunctions.

use crate::eigencurves::{CurveFamily, EigencurveId, Eigencurves};
use crate::elliptic::sn_cn_dn;
use crate::galerkin::{assemble, basis_for, swap_for_s_equation, CoefficientSet, Eigenfunction};
use crate::numerics::{gauss_legendre, integrate};
use crate::spectrum::intersect;
use crate::{Ellipsoid, Error, Parity, Result, DEFAULT_TRUNCATION};

pub use crate::spectrum::lambda_sphere;

/// Panels of the order-32 rule used for the perturbation integrals.
const QUADRATURE_PANELS: usize = 8;

/// The ellipsoids `E(ε)` through the unit sphere at fixed modulus `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereFamily {
    pub k2: f64,
    pub epsilon: f64,
}

impl SphereFamily {
    pub fn new(k2: f64, epsilon: f64) -> Result<Self> {
        Ellipsoid::sphere_family(k2, epsilon)?;
        Ok(Self { k2, epsilon })
    }

    /// `(a, b, c)`; increasing rather than decreasing when `ε < 0`.
    pub fn axes(&self) -> (f64, f64, f64) {
        ((1.0 + self.k2 * self.epsilon).sqrt(), 1.0, (1.0 - (1.0 - self.k2) * self.epsilon).sqrt())
    }

    /// `λ_{m,n,κ}(ε)`.
    ///
    /// For `ε < 0` the axes are relabelled in decreasing order `(c, b, a)`.
    /// Exchanging the `x` and `z` axes turns the modulus into `k'`, swaps the
    /// roles of the two equations and reverses the parity, so the state
    /// `(m, n, κ)` becomes `(n, m, (κ₃, κ₂, κ₁))`.
    pub fn lambda(&self, m: usize, n: usize, parity: Parity, truncation: usize) -> Result<f64> {
        let (a, b, c) = self.axes();
        if self.epsilon == 0.0 {
            let curves = Eigencurves::new(Ellipsoid::sphere(self.k2)?, truncation)?;
            return Ok(intersect(&curves, m, n, parity)?.lambda);
        }
        if self.epsilon > 0.0 {
            let curves = Eigencurves::new(Ellipsoid::new(a, b, c)?, truncation)?;
            Ok(intersect(&curves, m, n, parity)?.lambda)
        } else {
            let curves = Eigencurves::new(Ellipsoid::new(c, b, a)?, truncation)?;
            Ok(intersect(&curves, n, m, parity.reversed())?.lambda)
        }
    }

    /// `λ_{m,n,κ}(ε)` computed in the family's own (possibly unordered) axes,
    /// without relabelling.
    pub fn lambda_unrelabelled(&self, m: usize, n: usize, parity: Parity, truncation: usize) -> Result<f64> {
        let curves = Eigencurves::new(Ellipsoid::sphere_family(self.k2, self.epsilon)?, truncation)?;
        Ok(intersect(&curves, m, n, parity)?.lambda)
    }
}

fn check_state(k2: f64) -> Result<()> {
    if !(k2 > 0.0 && k2 < 1.0) {
        return Err(Error::InvalidArgument(format!("k² must lie in (0, 1), got {k2}")));
    }
    Ok(())
}

/// The four partial derivatives at `(Λ, 0)` and the resulting `λ'(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationTerms {
    pub dh_upper_dlambda: f64,
    pub dh_upper_depsilon: f64,
    pub dh_lower_dlambda: f64,
    pub dh_lower_depsilon: f64,
}

impl PerturbationTerms {
    /// `∂H/∂λ − ∂h/∂λ`, positive for every state.
    pub fn denominator(&self) -> f64 {
        self.dh_upper_dlambda - self.dh_lower_dlambda
    }

    pub fn derivative(&self) -> f64 {
        -(self.dh_upper_depsilon - self.dh_lower_depsilon) / self.denominator()
    }
}

/// `(∫ weight·g², ∫ cn·g·(cn·g')', ∫ g²)` over `[0, K(modulus)]`, where
/// `weight` is `dn²` or `k² sn²`.
fn eigenfunction_integrals(f: &Eigenfunction, endpoint: f64, use_dn: bool) -> Result<(f64, f64, f64)> {
    let rule = gauss_legendre(32);
    let k = f.modulus_k;
    let mut failure = None;
    let mut sample = |x: f64| -> (f64, f64, f64) {
        match f.eval_t(x) {
            Ok(values) => values,
            Err(e) => {
                failure.get_or_insert(e);
                (0.0, 0.0, 0.0)
            }
        }
    };
    let weighted = integrate(
        |x| {
            let (sn, _, dn) = sn_cn_dn(x, k);
            let w = sample(x).0;
            let weight = if use_dn { dn * dn } else { k * k * sn * sn };
            weight * w * w
        },
        0.0,
        endpoint,
        QUADRATURE_PANELS,
        &rule,
    );
    let stretched = integrate(
        |x| {
            let (sn, cn, dn) = sn_cn_dn(x, k);
            let (w, d1, d2) = sample(x);
            cn * w * (cn * d2 - sn * dn * d1)
        },
        0.0,
        endpoint,
        QUADRATURE_PANELS,
        &rule,
    );
    let norm = integrate(|x| sample(x).0.powi(2), 0.0, endpoint, QUADRATURE_PANELS, &rule);
    match failure {
        Some(e) => Err(e),
        None => Ok((weighted, stretched, norm)),
    }
}

/// Sphere eigenfunctions of both equations at `λ = Λ_{m,n,κ}`: `(v, w)`.
fn sphere_eigenfunctions(k2: f64, m: usize, n: usize, parity: Parity) -> Result<(Eigenfunction, Eigenfunction)> {
    let sphere = Ellipsoid::sphere(k2)?;
    let lambda = lambda_sphere(m, n, parity);
    let upper = EigencurveId::new(CurveFamily::S, m, parity);
    let lower = EigencurveId::new(CurveFamily::T, n, parity);
    let s_set = swap_for_s_equation(&sphere);
    let t_set = CoefficientSet::t_equation(&sphere);
    let (sl, sr) = upper.boundary_bits();
    let (tl, tr) = lower.boundary_bits();
    let v = assemble(&s_set, basis_for(sl, sr), DEFAULT_TRUNCATION)?.eigenfunction(lambda, m)?;
    let w = assemble(&t_set, basis_for(tl, tr), DEFAULT_TRUNCATION)?.eigenfunction(lambda, n)?;
    Ok((v, w))
}

/// The partial derivatives by Gauss–Legendre quadrature of the sphere
/// eigenfunctions (Galerkin, `N = 32`).
pub fn perturbation_terms(k2: f64, m: usize, n: usize, parity: Parity) -> Result<PerturbationTerms> {
    check_state(k2)?;
    let sphere = Ellipsoid::sphere(k2)?;
    let (v, w) = sphere_eigenfunctions(k2, m, n, parity)?;
    let (dn2_v, stretch_v, norm_v) = eigenfunction_integrals(&v, sphere.quarter_period_prime(), true)?;
    let (sn2_w, stretch_w, norm_w) = eigenfunction_integrals(&w, sphere.quarter_period(), false)?;
    Ok(PerturbationTerms {
        dh_upper_dlambda: dn2_v / norm_v,
        dh_upper_depsilon: (1.0 - k2) * stretch_v / norm_v,
        dh_lower_dlambda: sn2_w / norm_w,
        dh_lower_depsilon: k2 * stretch_w / norm_w,
    })
}

/// `λ'_{m,n,κ}(0)` from the quadrature route.
pub fn perturbation_derivative_quadrature(k2: f64, m: usize, n: usize, parity: Parity) -> Result<f64> {
    Ok(perturbation_terms(k2, m, n, parity)?.derivative())
}

/// `(λ(step) − λ(−step)) / (2·step)` with full intersections on `E(±step)`.
pub fn perturbation_derivative_fd(k2: f64, m: usize, n: usize, parity: Parity, step: f64) -> Result<f64> {
    check_state(k2)?;
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::InvalidArgument(format!("finite-difference step must lie in (0, 0.01], got {step}")));
    }
    let plus = SphereFamily::new(k2, step)?.lambda(m, n, parity, DEFAULT_TRUNCATION)?;
    let minus = SphereFamily::new(k2, -step)?.lambda(m, n, parity, DEFAULT_TRUNCATION)?;
    Ok((plus - minus) / (2.0 * step))
}

/// Closed form of `λ'(0)` for the two `ℓ = 2` states of parity `(0,0,0)`:
/// `2 − 4k² − (8/7)√(1 − k²k'²)` for `(0,1)` and `2 − 4k² + (8/7)√(1 − k²k'²)`
/// for `(1,0)`.
pub fn closed_form_derivative(k2: f64, m: usize, n: usize, parity: Parity) -> Option<f64> {
    if parity != Parity::NEUMANN {
        return None;
    }
    let root = (1.0 - k2 * (1.0 - k2)).sqrt();
    match (m, n) {
        (0, 1) => Some(2.0 - 4.0 * k2 - 8.0 / 7.0 * root),
        (1, 0) => Some(2.0 - 4.0 * k2 + 8.0 / 7.0 * root),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LameBranch {
    Plus,
    Minus,
}

/// `w(t) = sn²(t,k) − A` with `3k²A² − 2(1+k²)A + 1 = 0`, a Lamé polynomial
/// for `λ = 6` and `h = 2/A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LamePolynomialL2 {
    pub k2: f64,
    pub branch: LameBranch,
    pub shift: f64,
}

impl LamePolynomialL2 {
    pub fn new(k2: f64, branch: LameBranch) -> Result<Self> {
        check_state(k2)?;
        let root = (1.0 - k2 * (1.0 - k2)).sqrt();
        let signed = match branch {
            LameBranch::Plus => root,
            LameBranch::Minus => -root,
        };
        Ok(Self { k2, branch, shift: (1.0 + k2 + signed) / (3.0 * k2) })
    }

    /// `2/A`, the `h` eigenvalue this polynomial belongs to.
    pub fn h(&self) -> f64 {
        2.0 / self.shift
    }

    /// Index `n` of the `t`-equation eigenvalue: the plus branch has
    /// `A > 1` and no zeros in `(0, K)`; the minus branch has one.
    pub fn t_index(&self) -> usize {
        match self.branch {
            LameBranch::Plus => 0,
            LameBranch::Minus => 1,
        }
    }

    /// The sphere state `(m, n)` of parity `(0,0,0)` this polynomial is the
    /// `t`-factor of.
    pub fn state(&self) -> (usize, usize) {
        (1 - self.t_index(), self.t_index())
    }

    /// `(w, w'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (sn, _, _) = sn_cn_dn(t, self.k2.sqrt());
        let s2 = sn * sn;
        (s2 - self.shift, 2.0 - 4.0 * (1.0 + self.k2) * s2 + 6.0 * self.k2 * s2 * s2)
    }

    /// `sup |w'' + (h − 6k² sn²) w| / sup |w|` over 1000 points of `[0, K]`,
    /// with `h` from the sphere Galerkin solve.
    pub fn residual(&self) -> Result<f64> {
        let sphere = Ellipsoid::sphere(self.k2)?;
        let op = assemble(&CoefficientSet::t_equation(&sphere), basis_for(0, 0), DEFAULT_TRUNCATION)?;
        let h = op.eigenvalue(6.0, self.t_index())?;
        let quarter = sphere.quarter_period();
        let (mut worst, mut size) = (0.0f64, 0.0f64);
        for i in 0..1000 {
            let t = quarter * i as f64 / 999.0;
            let (w, w2) = self.eval(t);
            let (sn, _, _) = sn_cn_dn(t, sphere.k());
            worst = worst.max((w2 + (h - 6.0 * self.k2 * sn * sn) * w).abs());
            size = size.max(w.abs());
        }
        Ok(worst / size)
    }
}
