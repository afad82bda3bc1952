//! Ellipsoid parameters, the transcendental `(s, t)` chart and the
//! coefficient functions of the separated equations.
//!
//! The chart is
//!
//! ```text
//! x = a dn(s,k') sn(t,k),  y = b cn(s,k') cn(t,k),  z = c sn(s,k') dn(t,k)
//! ```
//!
//! with `k² = (a²−b²)/(a²−c²)` and `k'² = (b²−c²)/(a²−c²)`.

use std::fmt;
use std::str::FromStr;

use crate::elliptic::{sn_cn_dn, EllipticModulus};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    a: f64,
    b: f64,
    c: f64,
    k2: f64,
    modulus: EllipticModulus,
}

impl Ellipsoid {
    /// Triaxial ellipsoid with semi-axes `a > b > c > 0`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("semi-axes must be finite, got ({a}, {b}, {c})")));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("semi-axes must satisfy c > 0, got c = {c}")));
        }
        if !(a > b) {
            return Err(Error::InvalidArgument(format!("semi-axes must satisfy a > b, got a = {a}, b = {b}")));
        }
        if !(b > c) {
            return Err(Error::InvalidArgument(format!("semi-axes must satisfy b > c, got b = {b}, c = {c}")));
        }
        let (a2, b2, c2) = (a * a, b * b, c * c);
        let k2 = (a2 - b2) / (a2 - c2);
        let mut modulus = EllipticModulus::from_k2(k2)?;
        modulus.k_prime = ((b2 - c2) / (a2 - c2)).sqrt();
        Ok(Self { a, b, c, k2, modulus })
    }

    /// The unit sphere in sphero-conal coordinates with a free modulus.
    pub fn sphere(k2: f64) -> Result<Self> {
        if !(k2 > 0.0 && k2 < 1.0) {
            return Err(Error::InvalidArgument(format!("sphere modulus needs 0 < k² < 1, got {k2}")));
        }
        Ok(Self { a: 1.0, b: 1.0, c: 1.0, k2, modulus: EllipticModulus::from_k2(k2)? })
    }

    /// Member `ε` of the family through the unit sphere with fixed modulus:
    /// semi-axes `(√(1+k²ε), 1, √(1−k'²ε))` for `−k⁻² < ε < k'⁻²`.
    ///
    /// The chart modulus stays `k` for every `ε`. For `ε < 0` the axes come out
    /// in increasing order, so `a > b > c` holds only for `ε > 0`; the
    /// separated equations remain valid either way.
    pub fn sphere_family(k2: f64, epsilon: f64) -> Result<Self> {
        let sphere = Self::sphere(k2)?;
        let k_prime2 = 1.0 - k2;
        if !(epsilon > -1.0 / k2 && epsilon < 1.0 / k_prime2) {
            return Err(Error::InvalidArgument(format!(
                "ε must lie in (−k⁻², k'⁻²) = ({}, {}), got {epsilon}",
                -1.0 / k2,
                1.0 / k_prime2
            )));
        }
        if epsilon == 0.0 {
            return Ok(sphere);
        }
        Ok(Self {
            a: (1.0 + k2 * epsilon).sqrt(),
            b: 1.0,
            c: (1.0 - k_prime2 * epsilon).sqrt(),
            ..sphere
        })
    }

    /// Same shape with every axis multiplied by `r > 0`.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {r}")));
        }
        if self.is_sphere() {
            return Err(Error::InvalidArgument("scaling a sphere changes its radius away from 1".into()));
        }
        Self::new(r * self.a, r * self.b, r * self.c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_sphere(&self) -> bool {
        self.a == self.c
    }

    /// Whether the axes are in the usual order `a > b > c`.
    pub fn is_ordered(&self) -> bool {
        self.a > self.b && self.b > self.c
    }

    pub fn modulus(&self) -> &EllipticModulus {
        &self.modulus
    }

    pub fn k(&self) -> f64 {
        self.modulus.k
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn k_prime(&self) -> f64 {
        self.modulus.k_prime
    }

    pub fn k_prime2(&self) -> f64 {
        self.modulus.k_prime * self.modulus.k_prime
    }

    /// `K(k)`, the range of the `t` coordinate.
    pub fn quarter_period(&self) -> f64 {
        self.modulus.quarter_period
    }

    /// `K'(k) = K(k')`, the range of the `s` coordinate.
    pub fn quarter_period_prime(&self) -> f64 {
        self.modulus.quarter_period_prime
    }

    /// Singular point `d = a²/(a²−b²)` of the algebraic form; infinite for the sphere.
    pub fn d_singularity(&self) -> f64 {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        if a2 == b2 {
            f64::INFINITY
        } else {
            a2 / (a2 - b2)
        }
    }

    /// `p(s) = √(c² cn²(s,k') + b² sn²(s,k'))`.
    pub fn coefficient_p(&self, s: f64) -> f64 {
        let (sn, cn, _) = sn_cn_dn(s, self.k_prime());
        (self.c * self.c * cn * cn + self.b * self.b * sn * sn).sqrt()
    }

    /// `q(t) = √(a² cn²(t,k) + b² sn²(t,k))`.
    pub fn coefficient_q(&self, t: f64) -> f64 {
        let (sn, cn, _) = sn_cn_dn(t, self.k());
        (self.a * self.a * cn * cn + self.b * self.b * sn * sn).sqrt()
    }

    /// `dn²(s,k') − k² sn²(t,k)`, the factor shared by the metric and `D`.
    fn separation_factor(&self, s: f64, t: f64) -> f64 {
        let (_, _, dn_s) = sn_cn_dn(s, self.k_prime());
        let (sn_t, _, _) = sn_cn_dn(t, self.k());
        (dn_s * dn_s - self.k2 * sn_t * sn_t).max(0.0)
    }

    pub fn chart(&self, s: f64, t: f64) -> SurfacePoint {
        let (sn_s, cn_s, dn_s) = sn_cn_dn(s, self.k_prime());
        let (sn_t, cn_t, dn_t) = sn_cn_dn(t, self.k());
        SurfacePoint {
            s,
            t,
            x: self.a * dn_s * sn_t,
            y: self.b * cn_s * cn_t,
            z: self.c * sn_s * dn_t,
        }
    }

    /// `x²/a² + y²/b² + z²/c² − 1`.
    pub fn surface_residual(&self, p: &SurfacePoint) -> f64 {
        (p.x / self.a).powi(2) + (p.y / self.b).powi(2) + (p.z / self.c).powi(2) - 1.0
    }

    /// Diagonal metric coefficients `(g₁, g₂)` of `ds²` and `dt²`.
    pub fn metric(&self, s: f64, t: f64) -> (f64, f64) {
        let f = self.separation_factor(s, t);
        let (p, q) = (self.coefficient_p(s), self.coefficient_q(t));
        (p * p * f, q * q * f)
    }

    /// `D(s,t) = p(s) q(t) (dn²(s,k') − k² sn²(t,k))`.
    pub fn weight_d(&self, s: f64, t: f64) -> f64 {
        self.coefficient_p(s) * self.coefficient_q(t) * self.separation_factor(s, t)
    }

    /// `(μ, ν) = (k⁻² dn²(s,k'), sn²(t,k))`.
    pub fn algebraic_coords(&self, s: f64, t: f64) -> (f64, f64) {
        let (_, _, dn_s) = sn_cn_dn(s, self.k_prime());
        let (sn_t, _, _) = sn_cn_dn(t, self.k());
        (dn_s * dn_s / self.k2, sn_t * sn_t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub s: f64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Reflection parity `(κ₁, κ₂, κ₃)` of an eigenfunction.
///
/// `κ₁` governs the `t`-equation at `t = 0`, `κ₃` the `s`-equation at `s = 0`,
/// and `κ₂` both equations at their far end. A zero bit means a Neumann
/// condition, a one bit a Dirichlet condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parity {
    bits: [u8; 3],
}

impl Parity {
    pub fn new(k1: u8, k2: u8, k3: u8) -> Result<Self> {
        if k1 > 1 || k2 > 1 || k3 > 1 {
            return Err(Error::InvalidArgument(format!("parity bits must be 0 or 1, got ({k1}, {k2}, {k3})")));
        }
        Ok(Self { bits: [k1, k2, k3] })
    }

    pub const NEUMANN: Parity = Parity { bits: [0, 0, 0] };

    /// All eight parities in increasing binary order.
    pub fn all() -> [Parity; 8] {
        std::array::from_fn(|i| Parity::from_binary(i as u8))
    }

    fn from_binary(v: u8) -> Self {
        Self { bits: [(v >> 2) & 1, (v >> 1) & 1, v & 1] }
    }

    pub fn kappa1(&self) -> u8 {
        self.bits[0]
    }

    pub fn kappa2(&self) -> u8 {
        self.bits[1]
    }

    pub fn kappa3(&self) -> u8 {
        self.bits[2]
    }

    /// `|κ| = κ₁ + κ₂ + κ₃`.
    pub fn weight(&self) -> u8 {
        self.bits.iter().sum()
    }

    /// `4κ₁ + 2κ₂ + κ₃`.
    pub fn binary(&self) -> u8 {
        4 * self.bits[0] + 2 * self.bits[1] + self.bits[2]
    }

    /// `(κ₁, 1, κ₃)`.
    pub fn with_kappa2_set(&self) -> Self {
        Self { bits: [self.bits[0], 1, self.bits[2]] }
    }

    /// `(κ₃, κ₂, κ₁)`: the parity seen after exchanging the `x` and `z` axes.
    pub fn reversed(&self) -> Self {
        Self { bits: [self.bits[2], self.bits[1], self.bits[0]] }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.bits[0], self.bits[1], self.bits[2])
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(()),
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("parity must be three binary digits, got {s:?}")))?;
        if bits.len() != 3 {
            return Err(Error::InvalidArgument(format!("parity must be three binary digits, got {s:?}")));
        }
        Parity::new(bits[0], bits[1], bits[2])
    }
}
