//! Shared numerical kernels: bracketing root finder, Gauss–Legendre
//! quadrature, an adaptive Runge–Kutta integrator and a small dense
//! eigensolver for the Galerkin pencils.
//!
//! Everything here is a pure function of its inputs.

mod linalg;
mod ode;
mod quadrature;
mod roots;

pub use linalg::{
    eigenvalues, inverse_iteration_eigenvector, real_generalized_eigenvalues, ComplexEigenvalue,
    DenseMatrix, EigenPair, LuFactorization,
};
pub use ode::{integrate_ode, integrate_ode_observed};
pub use quadrature::{
    gauss_legendre, integrate, integrate_checked, QuadratureEstimate, QuadratureRule,
    DEFAULT_ORDER, DEFAULT_PANELS,
};
pub use roots::{find_root, try_find_root, RootBracket};
