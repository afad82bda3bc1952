//! Spectrum of the Laplace–Beltrami operator on a triaxial ellipsoid.
//!
//! In transcendental ellipsoidal coordinates `(s, t)` the eigenvalue problem
//! `-Δu = λu` separates into a pair of regular Sturm–Liouville equations that
//! share the spectral parameter `λ` and a separation constant `h`:
//!
//! ```text
//! (v'/p)' + p (-h + λ dn²(s,k')) v = 0,   0 ≤ s ≤ K'
//! (w'/q)' + q ( h - λ k² sn²(t,k)) w = 0,   0 ≤ t ≤ K
//! ```
//!
//! For fixed `λ` each equation has an ordered sequence of eigenvalues, the
//! eigencurves `H_m(λ)` (s-equation, decreasing in `m`) and `h_n(λ)`
//! (t-equation, increasing in `n`). Every eigenvalue of the surface operator is
//! the `λ` of an intersection `H_m(λ) = h_n(λ)` for one of the eight reflection
//! parities of the eigenfunction.
//!
//! Eigencurves are computed by two independent routes: a trigonometric Galerkin
//! matrix pencil ([`galerkin`]) and Prüfer-angle shooting ([`prufer`]).
//! [`spectrum`] locates intersections and enumerates the spectrum,
//! [`sphere_perturbation`] handles the sphere limit and first-order
//! perturbation around it, and [`verify`] bundles the end-to-end checks.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigencurves;
pub mod elliptic;
pub mod galerkin;
pub mod geometry;
pub mod numerics;
pub mod prufer;
pub mod spectrum;
pub mod sphere_perturbation;
pub mod verify;

mod error;

pub use error::{Error, Result};
pub use geometry::{Ellipsoid, Parity};

/// Truncation used everywhere a Galerkin size is not given explicitly.
pub const DEFAULT_TRUNCATION: usize = 32;
