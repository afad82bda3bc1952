//! Trigonometric Galerkin discretization of the separated equations.
//!
//! With `τ = π/2 − am(t, k)` (so `sn t = cos τ`, `cn t = sin τ`) the
//! `t`-equation becomes `D w + λ C w = h B w` on `[0, π/2]` with
//!
//! ```text
//! D w = −(a² sin²τ + b² cos²τ)(1 − k² cos²τ) w'' − c² k² cos τ sin τ w'
//! C w = k² cos²τ (a² sin²τ + b² cos²τ)² w
//! B w = (a² sin²τ + b² cos²τ)² w
//! ```
//!
//! Every coefficient is a short cosine series in `2τ`, so the action of each
//! operator on `cos(ντ)` or `sin(ντ)` is computed exactly by product-to-sum
//! identities. The `s`-equation is the same problem with the roles of `a`
//! and `c` exchanged, `k` replaced by `k'` and `h` replaced by `λ − h`.
//!
//! `τ = 0` corresponds to `t = K` and `τ = π/2` to `t = 0`.

use std::f64::consts::FRAC_PI_2;

use crate::elliptic::{jacobi_am, sn_cn_dn};
use crate::numerics::{inverse_iteration_eigenvector, real_generalized_eigenvalues, DenseMatrix};
use crate::{Ellipsoid, Error, Result};

/// Smallest truncation accepted by [`assemble`].
pub const MIN_TRUNCATION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    /// `cos(2jτ)`, `j = 0..=N`.
    CosEven,
    /// `sin(2jτ)`, `j = 1..=N`.
    SinEven,
    /// `cos((2j+1)τ)`, `j = 0..=N`.
    CosOdd,
    /// `sin((2j+1)τ)`, `j = 0..=N`.
    SinOdd,
}

impl BasisFamily {
    pub fn is_sine(self) -> bool {
        matches!(self, BasisFamily::SinEven | BasisFamily::SinOdd)
    }

    pub fn dimension(self, truncation: usize) -> usize {
        match self {
            BasisFamily::SinEven => truncation,
            _ => truncation + 1,
        }
    }

    /// Harmonic `ν` of the `j`-th basis function.
    pub fn frequency(self, j: usize) -> usize {
        match self {
            BasisFamily::CosEven => 2 * j,
            BasisFamily::SinEven => 2 * j + 2,
            BasisFamily::CosOdd | BasisFamily::SinOdd => 2 * j + 1,
        }
    }

    fn index_of(self, frequency: usize, dimension: usize) -> Option<usize> {
        let index = match self {
            BasisFamily::CosEven => frequency / 2,
            BasisFamily::SinEven => (frequency / 2).checked_sub(1)?,
            BasisFamily::CosOdd | BasisFamily::SinOdd => (frequency - 1) / 2,
        };
        (index < dimension).then_some(index)
    }

    /// `(φ, φ', φ'')` of the `j`-th basis function at `τ`.
    pub fn evaluate(self, j: usize, tau: f64) -> (f64, f64, f64) {
        let nu = self.frequency(j) as f64;
        let (s, c) = (nu * tau).sin_cos();
        if self.is_sine() {
            (s, nu * c, -nu * nu * s)
        } else {
            (c, -nu * s, -nu * nu * c)
        }
    }
}

/// Basis matching the boundary conditions of one equation.
///
/// `left` is the parity bit at the origin of the equation's own variable
/// (`κ₁` at `t = 0`, `κ₃` at `s = 0`) and `right` is `κ₂` at the far end. The
/// far end is `τ = 0`, so `right` chooses sine or cosine, and the harmonics
/// are odd exactly when the two conditions differ.
pub fn basis_for(left: u8, right: u8) -> BasisFamily {
    match (left & 1, right & 1) {
        (0, 0) => BasisFamily::CosEven,
        (1, 1) => BasisFamily::SinEven,
        (1, 0) => BasisFamily::CosOdd,
        _ => BasisFamily::SinOdd,
    }
}

/// The constants of one separated equation in trigonometric form.
///
/// For the `t`-equation these are `(a, b, c, k)`; for the `s`-equation
/// `(c, b, a, k')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub axis_major: f64,
    pub axis_mid: f64,
    pub axis_minor: f64,
    pub modulus_k: f64,
}

impl CoefficientSet {
    pub fn new(axis_major: f64, axis_mid: f64, axis_minor: f64, modulus_k: f64) -> Result<Self> {
        let axes_ok = [axis_major, axis_mid, axis_minor].iter().all(|x| x.is_finite() && *x > 0.0);
        if !axes_ok {
            return Err(Error::InvalidArgument(format!(
                "coefficient axes must be positive, got ({axis_major}, {axis_mid}, {axis_minor})"
            )));
        }
        if !(0.0..1.0).contains(&modulus_k) {
            return Err(Error::InvalidArgument(format!("modulus must lie in [0, 1), got {modulus_k}")));
        }
        Ok(Self { axis_major, axis_mid, axis_minor, modulus_k })
    }

    pub fn t_equation(e: &Ellipsoid) -> Self {
        Self { axis_major: e.a(), axis_mid: e.b(), axis_minor: e.c(), modulus_k: e.k() }
    }

    pub fn k2(&self) -> f64 {
        self.modulus_k * self.modulus_k
    }

    /// `ρ(x) = √(major² cn²(x) + mid² sn²(x))`, the coefficient `q` or `p`.
    pub fn rho(&self, x: f64) -> f64 {
        let (sn, cn, _) = sn_cn_dn(x, self.modulus_k);
        (self.axis_major.powi(2) * cn * cn + self.axis_mid.powi(2) * sn * sn).sqrt()
    }

    /// Length of the interval the equation lives on, `K(modulus)`.
    pub fn endpoint(&self) -> f64 {
        crate::elliptic::complete_elliptic_k(self.modulus_k).expect("modulus validated on construction")
    }
}

/// Coefficients of the `s`-equation: `(c, b, a, k')`.
pub fn swap_for_s_equation(e: &Ellipsoid) -> CoefficientSet {
    CoefficientSet { axis_major: e.c(), axis_mid: e.b(), axis_minor: e.a(), modulus_k: e.k_prime() }
}

/// Cosine series `Σ coeffs[f] cos(fτ)`.
#[derive(Debug, Clone, PartialEq)]
struct CosineSeries(Vec<f64>);

impl CosineSeries {
    fn product(&self, other: &CosineSeries) -> CosineSeries {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (f1, c1) in self.0.iter().enumerate() {
            for (f2, c2) in other.0.iter().enumerate() {
                let half = 0.5 * c1 * c2;
                out[f1.abs_diff(f2)] += half;
                out[f1 + f2] += half;
            }
        }
        CosineSeries(out)
    }

    fn scale(mut self, factor: f64) -> CosineSeries {
        self.0.iter_mut().for_each(|x| *x *= factor);
        self
    }
}

/// `(P, C, B)` coefficient series of the operators.
fn operator_series(coeffs: &CoefficientSet) -> (CosineSeries, CosineSeries, CosineSeries) {
    let (a2, b2, k2) = (coeffs.axis_major.powi(2), coeffs.axis_mid.powi(2), coeffs.k2());
    // a² sin²τ + b² cos²τ and 1 − k² cos²τ.
    let q2 = CosineSeries(vec![0.5 * (a2 + b2), 0.0, 0.5 * (b2 - a2)]);
    let dn2 = CosineSeries(vec![1.0 - 0.5 * k2, 0.0, -0.5 * k2]);
    let cos2 = CosineSeries(vec![0.5, 0.0, 0.5]);
    let principal = q2.product(&dn2);
    let b = q2.product(&q2);
    let c = cos2.product(&b).scale(k2);
    (principal, c, b)
}

/// Adds `value · φ_g` to a column, where `φ_g` is `cos(gτ)` or `sin(gτ)` for
/// a signed harmonic `g`, folded back onto the basis.
fn deposit(column: &mut [f64], family: BasisFamily, harmonic: i64, value: f64) {
    let frequency = harmonic.unsigned_abs() as usize;
    let signed = if family.is_sine() {
        if harmonic == 0 {
            return;
        }
        value * harmonic.signum() as f64
    } else {
        value
    };
    if let Some(row) = family.index_of(frequency, column.len()) {
        column[row] += signed;
    }
}

/// Adds `series · φ_ν` to a column.
fn deposit_product(column: &mut [f64], family: BasisFamily, series: &CosineSeries, nu: i64, factor: f64) {
    for (f, &coef) in series.0.iter().enumerate() {
        if coef == 0.0 {
            continue;
        }
        let half = 0.5 * factor * coef;
        deposit(column, family, nu - f as i64, half);
        deposit(column, family, nu + f as i64, half);
    }
}

/// Matrices of `D`, `C`, `B` in one basis at one truncation.
///
/// Entry `(j, n)` is the coefficient of the `j`-th basis function in the
/// operator applied to the `n`-th basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinOperator {
    truncation: usize,
    basis: BasisFamily,
    coeffs: CoefficientSet,
    d: DenseMatrix,
    c: DenseMatrix,
    b: DenseMatrix,
}

/// Assembles `(D_N, C_N, B_N)` for `N ≥ 4`.
pub fn assemble(coeffs: &CoefficientSet, basis: BasisFamily, truncation: usize) -> Result<GalerkinOperator> {
    if truncation < MIN_TRUNCATION {
        return Err(Error::InvalidArgument(format!(
            "Galerkin truncation must be at least {MIN_TRUNCATION}, got {truncation}"
        )));
    }
    let dim = basis.dimension(truncation);
    let (principal, c_series, b_series) = operator_series(coeffs);
    let first_order = coeffs.axis_minor.powi(2) * coeffs.k2();
    let (mut d, mut c, mut b) = (DenseMatrix::zeros(dim, dim), DenseMatrix::zeros(dim, dim), DenseMatrix::zeros(dim, dim));
    let mut column = vec![0.0; dim];
    for n in 0..dim {
        let nu = basis.frequency(n) as i64;
        let nu_f = nu as f64;

        column.iter_mut().for_each(|x| *x = 0.0);
        // −P φ'' = ν² P φ.
        deposit_product(&mut column, basis, &principal, nu, nu_f * nu_f);
        // −(c²k²/2) sin 2τ φ' = (c²k²ν/4)(φ_{ν−2} − φ_{ν+2}) for both sin and cos.
        deposit(&mut column, basis, nu - 2, 0.25 * first_order * nu_f);
        deposit(&mut column, basis, nu + 2, -0.25 * first_order * nu_f);
        for (j, v) in column.iter().enumerate() {
            d[(j, n)] = *v;
        }

        column.iter_mut().for_each(|x| *x = 0.0);
        deposit_product(&mut column, basis, &c_series, nu, 1.0);
        for (j, v) in column.iter().enumerate() {
            c[(j, n)] = *v;
        }

        column.iter_mut().for_each(|x| *x = 0.0);
        deposit_product(&mut column, basis, &b_series, nu, 1.0);
        for (j, v) in column.iter().enumerate() {
            b[(j, n)] = *v;
        }
    }
    Ok(GalerkinOperator { truncation, basis, coeffs: *coeffs, d, c, b })
}

impl GalerkinOperator {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn basis(&self) -> BasisFamily {
        self.basis
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coeffs
    }

    pub fn d(&self) -> &DenseMatrix {
        &self.d
    }

    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    /// Indices `n < converged_len()` are trusted; the rest is the unconverged
    /// tail of the truncated spectrum.
    pub fn converged_len(&self) -> usize {
        self.truncation / 2 + 1
    }

    fn pencil(&self, lambda: f64) -> DenseMatrix {
        self.d.add_scaled(lambda, &self.c)
    }

    /// Approximations `ĥ_{0,N}(λ) < ĥ_{1,N}(λ) < …`, including the tail.
    pub fn eigenvalues_h(&self, lambda: f64) -> Result<Vec<f64>> {
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("λ must be finite, got {lambda}")));
        }
        real_generalized_eigenvalues(&self.pencil(lambda), &self.b)
    }

    /// `ĥ_n(λ)`, refusing indices in the unconverged tail.
    pub fn eigenvalue(&self, lambda: f64, n: usize) -> Result<f64> {
        let available = self.converged_len();
        if n >= available {
            return Err(Error::EigenvalueIndex { index: n, available });
        }
        let values = self.eigenvalues_h(lambda)?;
        values.get(n).copied().ok_or(Error::EigenvalueIndex { index: n, available: values.len() })
    }

    /// `n`-th eigenpair at `λ` with unit-norm coefficients.
    pub fn eigenfunction(&self, lambda: f64, n: usize) -> Result<Eigenfunction> {
        let h = self.eigenvalue(lambda, n)?;
        let pair = inverse_iteration_eigenvector(&self.pencil(lambda), &self.b, h)?;
        Ok(Eigenfunction { h, basis: self.basis, modulus_k: self.coeffs.modulus_k, coefficients: pair.vector })
    }
}

/// A Galerkin eigenfunction `w(τ) = Σ u_j φ_j(τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub h: f64,
    pub basis: BasisFamily,
    pub modulus_k: f64,
    pub coefficients: Vec<f64>,
}

impl Eigenfunction {
    /// `(w, dw/dτ, d²w/dτ²)`.
    pub fn eval_tau(&self, tau: f64) -> (f64, f64, f64) {
        self.coefficients.iter().enumerate().fold((0.0, 0.0, 0.0), |acc, (j, u)| {
            let (v, d1, d2) = self.basis.evaluate(j, tau);
            (acc.0 + u * v, acc.1 + u * d1, acc.2 + u * d2)
        })
    }

    /// `(w, dw/dt, d²w/dt²)` at `0 ≤ t ≤ K`, using `dτ/dt = −dn(t)`.
    pub fn eval_t(&self, t: f64) -> Result<(f64, f64, f64)> {
        let tau = FRAC_PI_2 - jacobi_am(t, self.modulus_k)?;
        let (w, w_tau, w_tautau) = self.eval_tau(tau);
        let (sn, cn, dn) = sn_cn_dn(t, self.modulus_k);
        let k2 = self.modulus_k * self.modulus_k;
        Ok((w, -dn * w_tau, dn * dn * w_tautau + k2 * sn * cn * w_tau))
    }

    /// Sign changes of `w` on a uniform grid of `samples` interior points of `(0, π/2)`.
    pub fn sign_changes(&self, samples: usize) -> usize {
        let mut changes = 0;
        let mut last = 0.0f64;
        for i in 1..=samples {
            let tau = FRAC_PI_2 * i as f64 / (samples + 1) as f64;
            let w = self.eval_tau(tau).0;
            if w != 0.0 {
                if last != 0.0 && w.signum() != last.signum() {
                    changes += 1;
                }
                last = w;
            }
        }
        changes
    }

    /// `max |w|` over a uniform `τ` grid.
    pub fn sup_norm(&self, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| self.eval_tau(FRAC_PI_2 * i as f64 / samples as f64).0.abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_checked;
    use std::f64::consts::PI;

    fn reference() -> Ellipsoid {
        Ellipsoid::new(3.0, 2.0, 1.0).unwrap()
    }

    fn sphere_set(k2: f64) -> CoefficientSet {
        CoefficientSet::new(1.0, 1.0, 1.0, k2.sqrt()).unwrap()
    }

    #[test]
    fn basis_table() {
        assert_eq!(basis_for(0, 0), BasisFamily::CosEven);
        assert_eq!(basis_for(1, 1), BasisFamily::SinEven);
        assert_eq!(basis_for(0, 1), BasisFamily::SinOdd);
        assert_eq!(basis_for(1, 0), BasisFamily::CosOdd);
        assert_eq!(BasisFamily::SinEven.dimension(7), 7);
        assert_eq!(BasisFamily::CosOdd.dimension(7), 8);
    }

    #[test]
    fn basis_satisfies_its_boundary_conditions() {
        for (left, right) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let family = basis_for(left, right);
            for j in 0..5 {
                // t = 0 is τ = π/2, t = K is τ = 0.
                let (v_left, d_left, _) = family.evaluate(j, FRAC_PI_2);
                let (v_right, d_right, _) = family.evaluate(j, 0.0);
                let at_left = if left == 1 { v_left } else { d_left };
                let at_right = if right == 1 { v_right } else { d_right };
                assert!(at_left.abs() < 1e-12 && at_right.abs() < 1e-12, "{family:?} j={j}");
            }
        }
    }

    #[test]
    fn b4_matches_closed_form() {
        let (a, b) = (3.0f64, 2.0f64);
        let set = CoefficientSet::new(a, b, 1.0, 0.625f64.sqrt()).unwrap();
        let op = assemble(&set, BasisFamily::CosEven, 4).unwrap();
        let b0 = (3.0 * a.powi(4) + 2.0 * a * a * b * b + 3.0 * b.powi(4)) / 8.0;
        let b1 = (b.powi(4) - a.powi(4)) / 4.0;
        let b2 = (a * a - b * b).powi(2) / 16.0;
        #[rustfmt::skip]
        let expected = [
            b0, b1, b2, 0.0, 0.0,
            2.0 * b1, b0 + b2, b1, b2, 0.0,
            2.0 * b2, b1, b0, b1, b2,
            0.0, b2, b1, b0, b1,
            0.0, 0.0, b2, b1, b0,
        ];
        for (got, want) in op.b().entries().iter().zip(expected) {
            assert!((got - want).abs() < 1e-13 * b0, "{got} vs {want}");
        }
    }

    #[test]
    fn d_and_c_match_closed_forms() {
        let (a, b, c) = (3.0f64, 2.0f64, 1.0f64);
        let k2 = 0.625f64;
        let set = CoefficientSet::new(a, b, c, k2.sqrt()).unwrap();
        let op = assemble(&set, BasisFamily::CosEven, 8).unwrap();
        let (a2, b2) = (a * a, b * b);
        let n = 3usize;
        let nf = n as f64;
        let d_diag = nf * nf * (2.0 * (a2 + b2) - 0.5 * k2 * (a2 + 3.0 * b2));
        let d_near = nf * nf * (b2 - a2 - b2 * k2);
        let d_far = 0.25 * nf * nf * k2 * (a2 - b2);
        let d_first = 0.5 * nf * c * c * k2;
        assert!((op.d()[(n, n)] - d_diag).abs() < 1e-12);
        assert!((op.d()[(n - 1, n)] - (d_near + d_first)).abs() < 1e-12);
        assert!((op.d()[(n + 1, n)] - (d_near - d_first)).abs() < 1e-12);
        assert!((op.d()[(n - 2, n)] - d_far).abs() < 1e-12);
        assert!((op.d()[(n + 2, n)] - d_far).abs() < 1e-12);

        let c_diag = k2 * (a2 * a2 + 2.0 * a2 * b2 + 5.0 * b2 * b2) / 16.0;
        let c1 = k2 * (15.0 * b2 * b2 + 2.0 * a2 * b2 - a2 * a2) / 64.0;
        let c2 = k2 * (b2 - a2) * (a2 + 3.0 * b2) / 32.0;
        let c3 = k2 * (a2 - b2).powi(2) / 64.0;
        for (offset, want) in [(0, c_diag), (1, c1), (2, c2), (3, c3)] {
            assert!((op.c()[(n + offset, n)] - want).abs() < 1e-12);
            assert!((op.c()[(n - offset, n)] - want).abs() < 1e-12);
        }
        assert_eq!(op.b().bandwidth(), (2, 2));
        assert_eq!(op.c().bandwidth(), (3, 3));
        assert_eq!(op.d().bandwidth(), (2, 2));
    }

    #[test]
    fn sine_and_cosine_variants_differ_only_in_the_corner() {
        let set = CoefficientSet::t_equation(&reference());
        let cos_even = assemble(&set, BasisFamily::CosEven, 10).unwrap();
        let sin_even = assemble(&set, BasisFamily::SinEven, 10).unwrap();
        for (cm, sm) in [(cos_even.d(), sin_even.d()), (cos_even.c(), sin_even.c()), (cos_even.b(), sin_even.b())] {
            for i in 0..10 {
                for j in 0..10 {
                    if (i + j) >= 2 {
                        assert!((cm[(i + 1, j + 1)] - sm[(i, j)]).abs() < 1e-12, "({i},{j})");
                    }
                }
            }
        }
        let cos_odd = assemble(&set, BasisFamily::CosOdd, 10).unwrap();
        let sin_odd = assemble(&set, BasisFamily::SinOdd, 10).unwrap();
        let corner = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
        for (cm, sm) in [(cos_odd.d(), sin_odd.d()), (cos_odd.c(), sin_odd.c()), (cos_odd.b(), sin_odd.b())] {
            for i in 0..11 {
                for j in 0..11 {
                    if !corner.contains(&(i, j)) {
                        assert!((cm[(i, j)] - sm[(i, j)]).abs() < 1e-12, "({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_d_annihilates_constants() {
        let op = assemble(&sphere_set(0.3), BasisFamily::CosEven, 6).unwrap();
        assert_eq!(op.d()[(0, 0)], 0.0);
        assert!((0..7).all(|j| op.d()[(j, 0)] == 0.0));
    }

    #[test]
    fn rejects_small_truncation() {
        let set = CoefficientSet::t_equation(&reference());
        assert!(assemble(&set, BasisFamily::CosEven, 3).is_err());
        assert!(CoefficientSet::new(1.0, 0.0, 1.0, 0.5).is_err());
        assert!(CoefficientSet::new(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn neumann_values_at_lambda_zero() {
        let e = reference();
        let op = assemble(&CoefficientSet::t_equation(&e), BasisFamily::CosEven, 32).unwrap();
        let h = op.eigenvalues_h(0.0).unwrap();
        assert!(h[0].abs() < 1e-10);
        let length = integrate_checked(|t| e.coefficient_q(t), 0.0, e.quarter_period(), 1e-14).unwrap().value;
        assert!((h[1] - (PI / length).powi(2)).abs() < 1e-8);
    }

    #[test]
    fn mixed_condition_example_value() {
        let op = assemble(&CoefficientSet::t_equation(&reference()), basis_for(0, 1), 24).unwrap();
        let h0 = op.eigenvalue(5.0, 0).unwrap();
        assert!((h0 - 0.558216).abs() < 5e-6, "{h0}");
        let w = op.eigenfunction(5.0, 0).unwrap();
        assert_eq!(w.sign_changes(2000), 0);
    }

    #[test]
    fn swap_rule() {
        let set = swap_for_s_equation(&reference());
        assert_eq!((set.axis_major, set.axis_mid, set.axis_minor), (1.0, 2.0, 3.0));
        assert!((set.k2() - 0.375).abs() < 1e-15);
        let sphere = Ellipsoid::sphere(0.3).unwrap();
        let swapped = swap_for_s_equation(&sphere);
        assert_eq!((swapped.axis_major, swapped.axis_mid, swapped.axis_minor), (1.0, 1.0, 1.0));
        assert!((swapped.k2() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn constant_eigenfunction_at_lambda_zero() {
        let op = assemble(&CoefficientSet::t_equation(&reference()), BasisFamily::CosEven, 16).unwrap();
        let w = op.eigenfunction(0.0, 0).unwrap();
        assert!((w.coefficients[0] - 1.0).abs() < 1e-10);
        assert!(w.coefficients[1..].iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn sphere_eigenfunctions_oscillate_by_index() {
        let op = assemble(&sphere_set(0.5), BasisFamily::CosEven, 12).unwrap();
        for n in 0..3 {
            let w = op.eigenfunction(6.0, n).unwrap();
            assert_eq!(w.sign_changes(2000), n);
        }
    }

    #[test]
    fn t_derivatives_match_finite_differences() {
        let e = reference();
        let op = assemble(&CoefficientSet::t_equation(&e), BasisFamily::CosEven, 24).unwrap();
        let w = op.eigenfunction(3.0, 2).unwrap();
        let step = 1e-5;
        for i in 1..10 {
            let t = e.quarter_period() * i as f64 / 10.0;
            let (_, d1, d2) = w.eval_t(t).unwrap();
            let (lo, hi) = (w.eval_t(t - step).unwrap(), w.eval_t(t + step).unwrap());
            assert!(((hi.0 - lo.0) / (2.0 * step) - d1).abs() < 1e-6);
            assert!(((hi.1 - lo.1) / (2.0 * step) - d2).abs() < 1e-5);
        }
    }

    #[test]
    fn eigenfunction_solves_the_t_equation() {
        // Residual of (w'/q)' + q(h − λk² sn²)w, written as
        // w'' − (q'/q) w' + q²(h − λk² sn²) w.
        let e = reference();
        let lambda = 4.0;
        let op = assemble(&CoefficientSet::t_equation(&e), BasisFamily::SinOdd, 32).unwrap();
        let w = op.eigenfunction(lambda, 1).unwrap();
        let scale = w.sup_norm(200);
        for i in 1..20 {
            let t = e.quarter_period() * i as f64 / 20.0;
            let (v, d1, d2) = w.eval_t(t).unwrap();
            let (sn, _, _) = sn_cn_dn(t, e.k());
            let q = e.coefficient_q(t);
            let dq = (e.coefficient_q(t + 1e-6) - e.coefficient_q(t - 1e-6)) / 2e-6;
            let r = d2 - dq / q * d1 + q * q * (w.h - lambda * e.k2() * sn * sn) * v;
            assert!(r.abs() < 1e-6 * scale * 10.0, "t={t} r={r}");
        }
    }

    #[test]
    fn unconverged_tail_is_refused() {
        let op = assemble(&CoefficientSet::t_equation(&reference()), BasisFamily::CosEven, 8).unwrap();
        assert!(matches!(op.eigenvalue(1.0, 5), Err(Error::EigenvalueIndex { .. })));
        assert!(op.eigenvalue(1.0, 4).is_ok());
    }
}
