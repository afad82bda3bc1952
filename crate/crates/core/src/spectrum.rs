//! Intersections of eigencurves and enumeration of the surface spectrum.
//!
//! For each parity `κ` and indices `(m, n)` the function
//! `g(λ) = H_m(λ) − h_n(λ)` is strictly increasing and has exactly one root
//! `λ_{m,n,κ}`, an eigenvalue of the Laplace–Beltrami operator. Every
//! eigenvalue arises this way.

use std::ops::Range;

use rayon::prelude::*;

use crate::eigencurves::{prufer_problem, Backend, CurveFamily, EigencurveId, Eigencurves};
use crate::numerics::{try_find_root, RootBracket};
use crate::{Ellipsoid, Error, Parity, Result};

/// Relative tolerance on `λ` for intersections.
pub const LAMBDA_RTOL: f64 = 1e-10;
/// Largest tolerated gap between the two backends at a computed root.
pub const BACKEND_TOLERANCE: f64 = 1e-6;
/// Eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
/// `g(0)` this close to zero means the intersection sits at `λ = 0`.
const ZERO_ROOT_TOLERANCE: f64 = 1e-10;
const BRACKET_DOUBLINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub m: usize,
    pub n: usize,
    pub parity: Parity,
    pub lambda: f64,
    /// Common value `H_m(λ) = h_n(λ)`.
    pub h: f64,
    /// `|H_m(λ) − h_n(λ)|` from the Galerkin backend.
    pub residual_galerkin: f64,
    /// `|H_m(λ) − h_n(λ)|` from Prüfer shooting at the same `λ`.
    pub residual_prufer: f64,
    /// Interior zeros of the `s` and `t` factors, from the Prüfer angle.
    pub zero_counts: (usize, usize),
}

impl SpectrumEntry {
    /// Degree `ℓ = 2m + 2n + |κ|` of the spherical harmonic this state
    /// continues in the sphere limit.
    pub fn sphere_label(&self) -> usize {
        2 * self.m + 2 * self.n + self.parity.weight() as usize
    }

    fn tie_key(&self) -> (u8, u8, usize, usize) {
        (self.parity.weight(), self.parity.binary(), self.m, self.n)
    }
}

/// `Λ_{m,n,κ} = ℓ(ℓ+1)` with `ℓ = 2m + 2n + |κ|`.
pub fn lambda_sphere(m: usize, n: usize, parity: Parity) -> f64 {
    let l = (2 * m + 2 * n + parity.weight() as usize) as f64;
    l * (l + 1.0)
}

fn curve_ids(m: usize, n: usize, parity: Parity) -> (EigencurveId, EigencurveId) {
    (EigencurveId::new(CurveFamily::S, m, parity), EigencurveId::new(CurveFamily::T, n, parity))
}

/// Root of an increasing `g` on `[0, ∞)`, starting from `[0, hi]` and doubling.
fn increasing_root(mut g: impl FnMut(f64) -> Result<f64>, hi: f64) -> Result<f64> {
    let g0 = g(0.0)?;
    if g0.abs() <= ZERO_ROOT_TOLERANCE {
        return Ok(0.0);
    }
    if g0 > 0.0 {
        return Err(Error::InvalidBracket { lo: 0.0, hi, f_lo: g0, f_hi: f64::NAN });
    }
    let (mut lo, mut f_lo, mut hi) = (0.0, g0, hi);
    for _ in 0..BRACKET_DOUBLINGS {
        let f_hi = g(hi)?;
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_hi > 0.0 {
            return try_find_root(&mut g, RootBracket::new(lo, hi, f_lo, f_hi)?, LAMBDA_RTOL);
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
    }
    Err(Error::BracketGrowth { limit: hi })
}

fn initial_upper(e: &Ellipsoid, m: usize, n: usize) -> f64 {
    let j = (2 * m + 2 * n) as f64;
    (j + 3.0) * (j + 4.0) / (e.c() * e.c()) + 1.0
}

/// `λ_{m,n,κ}` by the Galerkin backend, cross-checked by Prüfer shooting.
pub fn intersect(curves: &Eigencurves, m: usize, n: usize, parity: Parity) -> Result<SpectrumEntry> {
    intersect_with(curves, m, n, parity, Backend::Galerkin)
}

/// `λ_{m,n,κ}` with the root found by the chosen backend.
///
/// Whichever backend locates the root, both are evaluated there; if either
/// curve differs by more than [`BACKEND_TOLERANCE`] between them the result
/// is rejected.
pub fn intersect_with(
    curves: &Eigencurves,
    m: usize,
    n: usize,
    parity: Parity,
    backend: Backend,
) -> Result<SpectrumEntry> {
    let (upper, lower) = curve_ids(m, n, parity);
    let hi = initial_upper(curves.ellipsoid(), m, n);
    let lambda = match backend {
        Backend::Galerkin => {
            increasing_root(|l| Ok(curves.value(&upper, l)? - curves.value(&lower, l)?), hi)?
        }
        Backend::Prufer => increasing_root(
            |l| {
                let big = curves.prufer_sample(&upper, l, None)?.value;
                let small = curves.prufer_sample(&lower, l, None)?.value;
                Ok(big - small)
            },
            hi,
        )?,
    };
    let (big_g, small_g) = (curves.value(&upper, lambda)?, curves.value(&lower, lambda)?);
    let big_p = curves.prufer_sample(&upper, lambda, Some(big_g))?.value;
    let small_p = curves.prufer_sample(&lower, lambda, Some(small_g))?.value;
    let gap = (big_g - big_p).abs().max((small_g - small_p).abs());
    if !(gap <= BACKEND_TOLERANCE) {
        let (galerkin, prufer) =
            if (big_g - big_p).abs() >= (small_g - small_p).abs() { (big_g, big_p) } else { (small_g, small_p) };
        return Err(Error::BackendDisagreement { lambda, galerkin, prufer });
    }
    let e = curves.ellipsoid();
    let zero_s = prufer_problem(e, &upper).zero_count(lambda, lambda - big_p)?;
    let zero_t = prufer_problem(e, &lower).zero_count(lambda, small_p)?;
    Ok(SpectrumEntry {
        m,
        n,
        parity,
        lambda,
        h: 0.5 * (big_g + small_g),
        residual_galerkin: (big_g - small_g).abs(),
        residual_prufer: (big_p - small_p).abs(),
        zero_counts: (zero_s, zero_t),
    })
}

/// Lower bound on `λ_{m,n,κ}` implied by the sphere comparison, if any.
fn lower_bound(e: &Ellipsoid, m: usize, n: usize, parity: Parity) -> Option<f64> {
    let a2 = e.a() * e.a();
    if parity.kappa2() == 1 {
        Some(lambda_sphere(m, n, parity) / a2)
    } else if m >= 1 && n >= 1 {
        Some(lambda_sphere(m - 1, n - 1, parity.with_kappa2_set()) / a2)
    } else {
        None
    }
}

/// Eigenvalues of one parity up to `lambda_max`, scanning `m` and then `n`
/// and stopping each scan once `λ` exceeds the limit (`λ_{m,n}` increases in
/// both indices).
fn enumerate_parity(curves: &Eigencurves, parity: Parity, lambda_max: f64, backend: Backend) -> Result<Vec<SpectrumEntry>> {
    let e = curves.ellipsoid();
    let mut out = Vec::new();
    for m in 0.. {
        let mut row_empty = true;
        for n in 0.. {
            if lower_bound(e, m, n, parity).is_some_and(|b| b > lambda_max) {
                break;
            }
            let entry = intersect_with(curves, m, n, parity, backend)?;
            if entry.lambda > lambda_max {
                break;
            }
            row_empty = false;
            out.push(entry);
        }
        if row_empty {
            break;
        }
    }
    Ok(out)
}

/// All eigenvalues `λ ≤ lambda_max` over the given parities, ascending.
///
/// Entries whose eigenvalues agree within [`DEGENERACY_TOLERANCE`] are ordered
/// by `(|κ|, κ as binary, m, n)`.
pub fn enumerate_parities(curves: &Eigencurves, parities: &[Parity], lambda_max: f64) -> Result<Vec<SpectrumEntry>> {
    enumerate_with(curves, parities, lambda_max, Backend::Galerkin)
}

/// Like [`enumerate_parities`], with every root located by `backend`.
pub fn enumerate_with(
    curves: &Eigencurves,
    parities: &[Parity],
    lambda_max: f64,
    backend: Backend,
) -> Result<Vec<SpectrumEntry>> {
    if !(lambda_max >= 0.0) {
        return Err(Error::InvalidArgument(format!("λ_max must be non-negative, got {lambda_max}")));
    }
    let per_parity: Vec<Vec<SpectrumEntry>> =
        parities.par_iter().map(|&p| enumerate_parity(curves, p, lambda_max, backend)).collect::<Result<_>>()?;
    let mut entries: Vec<SpectrumEntry> = per_parity.into_iter().flatten().collect();
    entries.sort_by(|x, y| x.lambda.total_cmp(&y.lambda).then(x.tie_key().cmp(&y.tie_key())));
    for range in degenerate_clusters(&entries) {
        entries[range].sort_by_key(SpectrumEntry::tie_key);
    }
    Ok(entries)
}

/// [`enumerate_parities`] over all eight parities.
pub fn enumerate(curves: &Eigencurves, lambda_max: f64) -> Result<Vec<SpectrumEntry>> {
    enumerate_parities(curves, &Parity::all(), lambda_max)
}

/// Maximal runs of a sorted listing in which consecutive eigenvalues differ by
/// less than [`DEGENERACY_TOLERANCE`]; only runs of two or more are returned.
pub fn degenerate_clusters(entries: &[SpectrumEntry]) -> Vec<Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=entries.len() {
        let split = i == entries.len() || entries[i].lambda - entries[i - 1].lambda >= DEGENERACY_TOLERANCE;
        if split {
            if i - start >= 2 {
                clusters.push(start..i);
            }
            start = i;
        }
    }
    clusters
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub bound: f64,
    /// Signed distance to the bound, positive when the inequality holds.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Checks the sphere-comparison bounds that apply to an entry.
///
/// * `κ₂ = 1`: `a⁻² Λ_{m,n,κ} < λ < c⁻² Λ_{m,n,κ}`.
/// * `κ₂ = 0`: `λ < c⁻² Λ_{m,n,κ̂}` and, for `m, n ≥ 1`,
///   `a⁻² Λ_{m−1,n−1,κ̂} < λ`, with `κ̂ = (κ₁, 1, κ₃)`.
///
/// For the sphere the two sides of the first pair coincide and the check
/// becomes `|λ − Λ| ≤ 10⁻⁸`.
pub fn validate_bounds(entry: &SpectrumEntry, e: &Ellipsoid) -> BoundsReport {
    let (a2, c2) = (e.a() * e.a(), e.c() * e.c());
    let (m, n, parity, lambda) = (entry.m, entry.n, entry.parity, entry.lambda);
    let strict_below = |name, bound: f64| BoundCheck { name, bound, margin: bound - lambda, holds: lambda < bound };
    let strict_above = |name, bound: f64| BoundCheck { name, bound, margin: lambda - bound, holds: lambda > bound };
    let mut checks = Vec::new();
    if parity.kappa2() == 1 {
        let big = lambda_sphere(m, n, parity);
        if e.is_sphere() {
            let margin = 1e-8 - (lambda - big).abs();
            checks.push(BoundCheck { name: "sphere equality", bound: big, margin, holds: margin >= 0.0 });
        } else {
            checks.push(strict_above("a^-2 Lambda lower", big / a2));
            checks.push(strict_below("c^-2 Lambda upper", big / c2));
        }
    } else {
        let hat = parity.with_kappa2_set();
        checks.push(strict_below("c^-2 Lambda-hat upper", lambda_sphere(m, n, hat) / c2));
        if m >= 1 && n >= 1 {
            checks.push(strict_above("a^-2 Lambda-hat lower", lambda_sphere(m - 1, n - 1, hat) / a2));
        }
    }
    BoundsReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_curves() -> Eigencurves {
        Eigencurves::with_default_truncation(Ellipsoid::new(3.0, 2.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn quartet_on_the_reference_ellipsoid() {
        let curves = reference_curves();
        let p = Parity::NEUMANN;
        assert_eq!(intersect(&curves, 0, 0, p).unwrap().lambda, 0.0);
        for (m, n, want) in [(0, 1, 1.074471), (1, 0, 2.134154), (1, 1, 5.029767)] {
            let entry = intersect(&curves, m, n, p).unwrap();
            assert!((entry.lambda - want).abs() < 5e-6, "({m},{n}) {}", entry.lambda);
            assert_eq!(entry.zero_counts, (m, n));
            assert!(entry.residual_galerkin < 1e-8 && entry.residual_prufer < 1e-6);
            assert!(validate_bounds(&entry, curves.ellipsoid()).all_hold());
        }
    }

    #[test]
    fn sphere_multiplets() {
        let curves = Eigencurves::with_default_truncation(Ellipsoid::sphere(0.5).unwrap()).unwrap();
        let entries = enumerate(&curves, 6.5).unwrap();
        let counts: Vec<usize> = [0.0, 2.0, 6.0]
            .iter()
            .map(|l| entries.iter().filter(|e| (e.lambda - l).abs() < 1e-8).count())
            .collect();
        assert_eq!(counts, vec![1, 3, 5]);
        assert_eq!(entries.len(), 9);
        let clusters = degenerate_clusters(&entries);
        assert_eq!(clusters, vec![1..4, 4..9]);
        for e in &entries {
            assert!(validate_bounds(e, curves.ellipsoid()).all_hold());
        }
        // Tie-break order inside the ℓ = 1 triplet: binary parity 001, 010, 100.
        let labels: Vec<String> = entries[1..4].iter().map(|e| e.parity.to_string()).collect();
        assert_eq!(labels, vec!["001", "010", "100"]);
    }

    #[test]
    fn small_limits_on_the_reference_ellipsoid() {
        let curves = reference_curves();
        let entries = enumerate(&curves, 0.3).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!((entries[0].m, entries[0].n, entries[0].parity, entries[0].lambda), (0, 0, Parity::NEUMANN, 0.0));

        // u = x is odd in x only, and its Rayleigh quotient on this ellipsoid is
        // 0.35378…, so parity (1,0,0) must have an eigenvalue below that.
        let entries = enumerate(&curves, 0.5).unwrap();
        assert_eq!(entries.len(), 2);
        let odd_x = &entries[1];
        assert_eq!((odd_x.m, odd_x.n, odd_x.parity.to_string()), (0, 0, "100".to_string()));
        assert!(odd_x.lambda > 0.3 && odd_x.lambda < 0.35378);
        let shot = intersect_with(&curves, 0, 0, odd_x.parity, Backend::Prufer).unwrap();
        assert!((shot.lambda - odd_x.lambda).abs() < 1e-7);
    }

    #[test]
    fn worked_bound_example() {
        let curves = reference_curves();
        let entry = intersect(&curves, 1, 1, Parity::NEUMANN).unwrap();
        let report = validate_bounds(&entry, curves.ellipsoid());
        assert_eq!(report.checks.len(), 2);
        assert!((report.checks[0].bound - 30.0).abs() < 1e-12);
        assert!((report.checks[1].bound - 2.0 / 9.0).abs() < 1e-12);
        assert!(report.all_hold());
    }

    #[test]
    fn sphere_values_follow_the_degree() {
        assert_eq!(lambda_sphere(0, 0, Parity::NEUMANN), 0.0);
        assert_eq!(lambda_sphere(0, 1, Parity::NEUMANN), 6.0);
        assert_eq!(lambda_sphere(0, 0, "111".parse().unwrap()), 12.0);
    }

    #[test]
    fn negative_limit_is_rejected() {
        assert!(enumerate(&reference_curves(), -1.0).is_err());
    }
}
