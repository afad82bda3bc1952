//! Eigencurves `H_m(λ)` and `h_n(λ)` with a uniform interface over both
//! backends.
//!
//! `h_n` is the `n`-th eigenvalue of the `t`-equation. `H_m` is `λ − h̃_m(λ)`
//! where `h̃_m` is the `m`-th eigenvalue of the swapped `s`-equation, so `H_m`
//! decreases in `m` and `m` counts zeros in `(0, K')`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::galerkin::{assemble, basis_for, swap_for_s_equation, CoefficientSet, GalerkinOperator};
use crate::numerics::integrate_checked;
use crate::prufer::PruferProblem;
use crate::{Ellipsoid, Error, Parity, Result, DEFAULT_TRUNCATION};

/// Truncation used for large-`λ` evaluations.
pub const ASYMPTOTIC_TRUNCATION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveFamily {
    /// `H_m(λ)`, from the `s`-equation.
    S,
    /// `h_n(λ)`, from the `t`-equation.
    T,
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveFamily::S => "H",
            CurveFamily::T => "h",
        })
    }
}

impl FromStr for CurveFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(CurveFamily::S),
            "h" => Ok(CurveFamily::T),
            _ => Err(Error::InvalidArgument(format!("curve family must be H or h, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Galerkin,
    Prufer,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Galerkin => "galerkin",
            Backend::Prufer => "prufer",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EigencurveId {
    pub family: CurveFamily,
    pub index: usize,
    pub parity: Parity,
}

impl EigencurveId {
    pub fn new(family: CurveFamily, index: usize, parity: Parity) -> Self {
        Self { family, index, parity }
    }

    /// `(left, right)` boundary bits: `(κ₃, κ₂)` for `H`, `(κ₁, κ₂)` for `h`.
    pub fn boundary_bits(&self) -> (u8, u8) {
        match self.family {
            CurveFamily::S => (self.parity.kappa3(), self.parity.kappa2()),
            CurveFamily::T => (self.parity.kappa1(), self.parity.kappa2()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigencurveSample {
    pub lambda: f64,
    pub value: f64,
    pub backend: Backend,
    /// Galerkin: `|ĥ_N − ĥ_{3N/4}|`. Prüfer: `|θ(X) − target|` at the root.
    pub residual: f64,
}

type CacheKey = (CurveFamily, u8, u8, u64);

/// Eigencurves of one ellipsoid at one truncation, with the Galerkin
/// operators assembled once and eigenvalue lists cached per exact `λ`.
#[derive(Debug)]
pub struct Eigencurves {
    ellipsoid: Ellipsoid,
    truncation: usize,
    operators: HashMap<(CurveFamily, u8, u8), (GalerkinOperator, GalerkinOperator)>,
    cache: Mutex<HashMap<CacheKey, Vec<f64>>>,
}

impl Eigencurves {
    pub fn new(ellipsoid: Ellipsoid, truncation: usize) -> Result<Self> {
        let coarse = (3 * truncation / 4).max(crate::galerkin::MIN_TRUNCATION);
        let mut operators = HashMap::new();
        for family in [CurveFamily::S, CurveFamily::T] {
            let coeffs = coefficient_set(&ellipsoid, family);
            for left in 0..2 {
                for right in 0..2 {
                    let basis = basis_for(left, right);
                    let ops = (assemble(&coeffs, basis, truncation)?, assemble(&coeffs, basis, coarse)?);
                    operators.insert((family, left, right), ops);
                }
            }
        }
        Ok(Self { ellipsoid, truncation, operators, cache: Mutex::new(HashMap::new()) })
    }

    pub fn with_default_truncation(ellipsoid: Ellipsoid) -> Result<Self> {
        Self::new(ellipsoid, DEFAULT_TRUNCATION)
    }

    pub fn ellipsoid(&self) -> &Ellipsoid {
        &self.ellipsoid
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn operator_pair(&self, id: &EigencurveId) -> &(GalerkinOperator, GalerkinOperator) {
        let (left, right) = id.boundary_bits();
        &self.operators[&(id.family, left, right)]
    }

    /// Operator whose eigenvalues are `h_n` (family `T`) or `h̃_m` (family `S`).
    pub fn operator(&self, id: &EigencurveId) -> &GalerkinOperator {
        &self.operator_pair(id).0
    }

    fn raw_values(&self, id: &EigencurveId, lambda: f64) -> Result<Vec<f64>> {
        let (left, right) = id.boundary_bits();
        let key = (id.family, left, right, lambda.to_bits());
        if let Some(values) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(values.clone());
        }
        let values = self.operator(id).eigenvalues_h(lambda)?;
        self.cache.lock().expect("cache lock").insert(key, values.clone());
        Ok(values)
    }

    fn raw_eigenvalue(&self, id: &EigencurveId, lambda: f64) -> Result<f64> {
        let available = self.operator(id).converged_len();
        if id.index >= available {
            return Err(Error::EigenvalueIndex { index: id.index, available });
        }
        let values = self.raw_values(id, lambda)?;
        values.get(id.index).copied().ok_or(Error::EigenvalueIndex { index: id.index, available: values.len() })
    }

    /// Galerkin value of the curve at `λ`.
    pub fn value(&self, id: &EigencurveId, lambda: f64) -> Result<f64> {
        Ok(to_curve(id.family, lambda, self.raw_eigenvalue(id, lambda)?))
    }

    pub fn evaluate(&self, id: &EigencurveId, lambda: f64, backend: Backend) -> Result<EigencurveSample> {
        match backend {
            Backend::Galerkin => {
                let fine = self.raw_eigenvalue(id, lambda)?;
                let coarse_op = &self.operator_pair(id).1;
                let coarse = coarse_op.eigenvalues_h(lambda)?;
                let residual = coarse.get(id.index).map_or(f64::INFINITY, |c| (c - fine).abs());
                Ok(EigencurveSample { lambda, value: to_curve(id.family, lambda, fine), backend, residual })
            }
            Backend::Prufer => self.prufer_sample(id, lambda, None),
        }
    }

    /// Prüfer value, optionally warm-started from an estimate of the curve value.
    pub fn prufer_sample(&self, id: &EigencurveId, lambda: f64, estimate: Option<f64>) -> Result<EigencurveSample> {
        let problem = prufer_problem(&self.ellipsoid, id);
        let hint = estimate.map(|v| to_curve(id.family, lambda, v));
        let raw = problem.shoot_h(lambda, id.index, hint)?;
        let residual = (problem.theta_at_end(lambda, raw)? - problem.theta_target(id.index)).abs();
        Ok(EigencurveSample { lambda, value: to_curve(id.family, lambda, raw), backend: Backend::Prufer, residual })
    }

    /// Central difference with step `10⁻⁴ · max(1, |λ|)`.
    pub fn slope(&self, id: &EigencurveId, lambda: f64) -> Result<f64> {
        let step = 1e-4 * lambda.abs().max(1.0);
        Ok((self.value(id, lambda + step)? - self.value(id, lambda - step)?) / (2.0 * step))
    }
}

/// `h` is its own curve value; the `s`-equation eigenvalue `h̃` maps to `λ − h̃`.
/// The map is an involution, so it also converts curve values back.
fn to_curve(family: CurveFamily, lambda: f64, raw: f64) -> f64 {
    match family {
        CurveFamily::S => lambda - raw,
        CurveFamily::T => raw,
    }
}

fn coefficient_set(e: &Ellipsoid, family: CurveFamily) -> CoefficientSet {
    match family {
        CurveFamily::S => swap_for_s_equation(e),
        CurveFamily::T => CoefficientSet::t_equation(e),
    }
}

/// The Prüfer problem behind a curve.
pub fn prufer_problem(e: &Ellipsoid, id: &EigencurveId) -> PruferProblem {
    match id.family {
        CurveFamily::S => PruferProblem::s_equation(e, id.parity),
        CurveFamily::T => PruferProblem::t_equation(e, id.parity),
    }
}

/// `value(λ)/λ` at truncation 64, for `λ ≥ 100`.
pub fn asymptotic_ratio(e: &Ellipsoid, id: &EigencurveId, lambda_large: f64) -> Result<f64> {
    if !(lambda_large >= 100.0) {
        return Err(Error::InvalidArgument(format!("asymptotic ratio needs λ ≥ 100, got {lambda_large}")));
    }
    let (left, right) = id.boundary_bits();
    let op = assemble(&coefficient_set(e, id.family), basis_for(left, right), ASYMPTOTIC_TRUNCATION)?;
    Ok(to_curve(id.family, lambda_large, op.eigenvalue(lambda_large, id.index)?) / lambda_large)
}

/// Closed forms at `λ = 0` for the all-Neumann parity: `h_n(0) = n²π²/(∫₀ᴷ q)²`
/// and `H_m(0) = −m²π²/(∫₀^{K'} p)²`, with the integrals from checked quadrature.
pub fn neumann_value_at_zero(e: &Ellipsoid, family: CurveFamily, index: usize) -> Result<f64> {
    let (length, sign) = match family {
        CurveFamily::T => (integrate_checked(|t| e.coefficient_q(t), 0.0, e.quarter_period(), 1e-14)?.value, 1.0),
        CurveFamily::S => {
            (integrate_checked(|s| e.coefficient_p(s), 0.0, e.quarter_period_prime(), 1e-14)?.value, -1.0)
        }
    };
    let n = index as f64;
    Ok(sign * (n * std::f64::consts::PI / length).powi(2))
}
