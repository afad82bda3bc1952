//! End-to-end checks with pinned tolerances, runnable from the library, the
//! CLI and the test suite.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigencurves::{neumann_value_at_zero, Backend, CurveFamily, EigencurveId, Eigencurves};
use crate::elliptic::{complete_elliptic_k, jacobi_sn_cn_dn};
use crate::galerkin::{assemble, basis_for, swap_for_s_equation, CoefficientSet};
use crate::prufer::PruferProblem;
use crate::spectrum::{enumerate, intersect, validate_bounds};
use crate::sphere_perturbation::{closed_form_derivative, perturbation_derivative_fd, perturbation_derivative_quadrature};
use crate::{Ellipsoid, Error, Parity, Result};

/// The values printed for the reference ellipsoid `(3, 2, 1)`, parity `(0,0,0)`.
pub const QUARTET: [(usize, usize, f64); 3] = [(0, 1, 1.074471), (1, 0, 2.134154), (1, 1, 5.029767)];
/// `h₀` at `λ = 5` for boundary bits `(0, 1)` on the reference ellipsoid.
pub const MIXED_EXAMPLE_H: f64 = 0.558216;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Criteria 1 and 10.
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(Error::InvalidArgument(format!("verification level must be quick or full, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// The worst measured quantity (an error, or a margin for bound checks).
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: measured {:.3e}, tolerance {:.1e}; {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

fn reference() -> Ellipsoid {
    Ellipsoid::new(3.0, 2.0, 1.0).expect("reference ellipsoid is valid")
}

fn failed(id: u8, name: &'static str, tolerance: f64, err: Error) -> CheckResult {
    CheckResult { id, name, passed: false, measured: f64::NAN, tolerance, detail: format!("error: {err}") }
}

/// Runs an error-returning check body, turning an error into a failed result.
fn guarded(id: u8, name: &'static str, tolerance: f64, body: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    body().unwrap_or_else(|err| failed(id, name, tolerance, err))
}

/// Criterion 1: `λ₀₀ = 0` and the three printed values at `N = 32`, in under 10 s.
pub fn check_quartet() -> CheckResult {
    const NAME: &str = "reference quartet at N=32";
    const TOL: f64 = 5e-6;
    guarded(1, NAME, TOL, || {
        let start = Instant::now();
        let curves = Eigencurves::new(reference(), 32)?;
        let ground = intersect(&curves, 0, 0, Parity::NEUMANN)?.lambda;
        let mut worst = 0.0f64;
        let mut values = Vec::new();
        for (m, n, want) in QUARTET {
            let got = intersect(&curves, m, n, Parity::NEUMANN)?.lambda;
            worst = worst.max((got - want).abs());
            values.push(format!("{got:.9}"));
        }
        let seconds = start.elapsed().as_secs_f64();
        Ok(CheckResult {
            id: 1,
            name: NAME,
            passed: ground.abs() < 1e-9 && worst < TOL && seconds < 10.0,
            measured: worst,
            tolerance: TOL,
            detail: format!("lambda_00 = {ground:.1e}, values [{}], {seconds:.2} s", values.join(", ")),
        })
    })
}

/// Criterion 2: the mixed-condition value from both backends independently.
pub fn check_mixed_example() -> CheckResult {
    const NAME: &str = "mixed-condition h0 at lambda=5, both backends";
    const TOL: f64 = 5e-6;
    guarded(2, NAME, TOL, || {
        let e = reference();
        let set = CoefficientSet::t_equation(&e);
        let galerkin = assemble(&set, basis_for(0, 1), 32)?.eigenvalue(5.0, 0)?;
        let prufer = PruferProblem::new(set, 0, 1)?.shoot_h(5.0, 0, None)?;
        let worst = (galerkin - MIXED_EXAMPLE_H).abs().max((prufer - MIXED_EXAMPLE_H).abs());
        Ok(CheckResult {
            id: 2,
            name: NAME,
            passed: worst < TOL,
            measured: worst,
            tolerance: TOL,
            detail: format!("galerkin {galerkin:.9}, prufer {prufer:.9}"),
        })
    })
}

/// Criterion 3: sphere eigenvalues `ℓ(ℓ+1)` with multiplicity `2ℓ+1`, `ℓ ≤ 6`.
pub fn check_sphere_limit() -> CheckResult {
    const NAME: &str = "sphere limit, l <= 6, k2 in {0.3, 0.5, 0.7}";
    const TOL: f64 = 1e-8;
    guarded(3, NAME, TOL, || {
        let mut worst = 0.0f64;
        let mut multiplicities_ok = true;
        for k2 in [0.3, 0.5, 0.7] {
            let curves = Eigencurves::new(Ellipsoid::sphere(k2)?, 32)?;
            let entries = enumerate(&curves, 42.5)?;
            let mut counts = [0usize; 7];
            for entry in &entries {
                let l = entry.sphere_label();
                if l > 6 {
                    multiplicities_ok = false;
                    continue;
                }
                counts[l] += 1;
                worst = worst.max((entry.lambda - (l * (l + 1)) as f64).abs());
            }
            multiplicities_ok &= counts.iter().enumerate().all(|(l, &c)| c == 2 * l + 1);
        }
        Ok(CheckResult {
            id: 3,
            name: NAME,
            passed: worst < TOL && multiplicities_ok,
            measured: worst,
            tolerance: TOL,
            detail: format!("multiplicities 2l+1: {multiplicities_ok}"),
        })
    })
}

/// Criterion 4: Galerkin against shooting on 160 (λ, n, bits, equation) cases.
pub fn check_cross_oracle() -> CheckResult {
    const NAME: &str = "galerkin vs prufer, 160 cases";
    const TOL: f64 = 1e-7;
    guarded(4, NAME, TOL, || {
        let e = reference();
        let mut worst = 0.0f64;
        let mut cases = 0;
        for set in [CoefficientSet::t_equation(&e), swap_for_s_equation(&e)] {
            for (left, right) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let op = assemble(&set, basis_for(left, right), 32)?;
                let problem = PruferProblem::new(set, left, right)?;
                for lambda in [0.0, 1.0, 5.0, 10.0, 25.0] {
                    let values = op.eigenvalues_h(lambda)?;
                    for (n, &g) in values.iter().enumerate().take(4) {
                        let shot = problem.shoot_h(lambda, n, Some(g))?;
                        worst = worst.max((g - shot).abs());
                        cases += 1;
                    }
                }
            }
        }
        Ok(CheckResult {
            id: 4,
            name: NAME,
            passed: worst < TOL && cases == 160,
            measured: worst,
            tolerance: TOL,
            detail: format!("{cases} comparisons"),
        })
    })
}

/// Criterion 5: `0 < h'_n < k² < H'_m < 1` at λ ∈ {0, 2, 5, 10}, indices ≤ 2, all parities.
pub fn check_slopes() -> CheckResult {
    const NAME: &str = "eigencurve slope bounds";
    guarded(5, NAME, 0.0, || {
        let curves = Eigencurves::new(reference(), 32)?;
        let k2 = curves.ellipsoid().k2();
        let mut margin = f64::INFINITY;
        let mut count = 0;
        for parity in Parity::all() {
            for index in 0..=2 {
                for lambda in [0.0, 2.0, 5.0, 10.0] {
                    let lower = curves.slope(&EigencurveId::new(CurveFamily::T, index, parity), lambda)?;
                    let upper = curves.slope(&EigencurveId::new(CurveFamily::S, index, parity), lambda)?;
                    margin = margin.min(lower).min(k2 - lower).min(upper - k2).min(1.0 - upper);
                    count += 2;
                }
            }
        }
        Ok(CheckResult {
            id: 5,
            name: NAME,
            passed: margin > 0.0,
            measured: margin,
            tolerance: 0.0,
            detail: format!("{count} slopes, smallest margin to a bound shown"),
        })
    })
}

/// Criterion 6: `h_n(0) = n²π²/(∫q)²` and `H_m(0) = −m²π²/(∫p)²` for parity (0,0,0).
pub fn check_lambda_zero() -> CheckResult {
    const NAME: &str = "lambda=0 closed forms, both backends";
    const TOL: f64 = 1e-8;
    guarded(6, NAME, TOL, || {
        let e = reference();
        let curves = Eigencurves::new(e, 32)?;
        let mut worst = 0.0f64;
        for family in [CurveFamily::S, CurveFamily::T] {
            for index in 0..=3 {
                let exact = neumann_value_at_zero(&e, family, index)?;
                let id = EigencurveId::new(family, index, Parity::NEUMANN);
                for backend in [Backend::Galerkin, Backend::Prufer] {
                    let value = curves.evaluate(&id, 0.0, backend)?.value;
                    worst = worst.max((value - exact).abs());
                }
            }
        }
        Ok(CheckResult {
            id: 6,
            name: NAME,
            passed: worst < TOL,
            measured: worst,
            tolerance: TOL,
            detail: "m, n <= 3".into(),
        })
    })
}

/// Criterion 7: every eigenvalue `λ ≤ 60` of `(3, 2, 1)` satisfies its bounds strictly.
pub fn check_inequalities() -> CheckResult {
    const NAME: &str = "sphere-comparison bounds, lambda <= 60";
    guarded(7, NAME, 0.0, || {
        let curves = Eigencurves::new(reference(), 32)?;
        let entries = enumerate(&curves, 60.0)?;
        let mut margin = f64::INFINITY;
        let mut violations = 0;
        let mut checks = 0;
        for entry in &entries {
            for check in validate_bounds(entry, curves.ellipsoid()).checks {
                checks += 1;
                margin = margin.min(check.margin);
                violations += usize::from(!check.holds);
            }
        }
        Ok(CheckResult {
            id: 7,
            name: NAME,
            passed: violations == 0 && !entries.is_empty(),
            measured: margin,
            tolerance: 0.0,
            detail: format!("{} eigenvalues, {checks} bounds, {violations} violated", entries.len()),
        })
    })
}

/// Criterion 8: `λ'(0) = −3/2` and `+1/2` at `k² = 5/8` by quadrature and by differences.
pub fn check_perturbation() -> CheckResult {
    const NAME: &str = "near-sphere derivative at k2=5/8";
    const TOL: f64 = 1e-4;
    guarded(8, NAME, TOL, || {
        let k2 = 0.625;
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for (m, n) in [(0, 1), (1, 0)] {
            let exact = closed_form_derivative(k2, m, n, Parity::NEUMANN).expect("l = 2 state");
            let quad = perturbation_derivative_quadrature(k2, m, n, Parity::NEUMANN)?;
            let fd = perturbation_derivative_fd(k2, m, n, Parity::NEUMANN, 1e-3)?;
            worst = worst.max((quad - exact).abs()).max((fd - exact).abs());
            parts.push(format!("({m},{n}): exact {exact:+.6}, quadrature {quad:+.8}, differences {fd:+.8}"));
        }
        Ok(CheckResult {
            id: 8,
            name: NAME,
            passed: worst < TOL,
            measured: worst,
            tolerance: TOL,
            detail: parts.join("; "),
        })
    })
}

/// Criterion 9: `|ĥ_{n,32} − ĥ_{n,64}| < 10⁻⁹` for `n ≤ 4`, and the printed digits already at `N = 7`.
pub fn check_convergence() -> CheckResult {
    const NAME: &str = "galerkin convergence, N=32 vs 64 and N=7 digits";
    const TOL: f64 = 1e-9;
    guarded(9, NAME, TOL, || {
        let e = reference();
        let mut worst = 0.0f64;
        for set in [CoefficientSet::t_equation(&e), swap_for_s_equation(&e)] {
            for (left, right) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let coarse = assemble(&set, basis_for(left, right), 32)?;
                let fine = assemble(&set, basis_for(left, right), 64)?;
                for lambda in [0.0, 1.0, 5.0, 10.0, 25.0] {
                    let (a, b) = (coarse.eigenvalues_h(lambda)?, fine.eigenvalues_h(lambda)?);
                    for n in 0..=4 {
                        worst = worst.max((a[n] - b[n]).abs());
                    }
                }
            }
        }
        let curves = Eigencurves::new(e, 7)?;
        let mut digits_ok = true;
        let mut shown = Vec::new();
        for (m, n, want) in QUARTET {
            let got = intersect(&curves, m, n, Parity::NEUMANN)?.lambda;
            digits_ok &= (got * 1e6).floor() == (want * 1e6).round();
            shown.push(format!("{got:.9}"));
        }
        Ok(CheckResult {
            id: 9,
            name: NAME,
            passed: worst < TOL && digits_ok,
            measured: worst,
            tolerance: TOL,
            detail: format!("N=7 values [{}], six digits match: {digits_ok}", shown.join(", ")),
        })
    })
}

/// Criterion 10: elliptic identities, periods, symmetry and the `k = 0` limit
/// on 10⁴ seeded random samples.
pub fn check_elliptic() -> CheckResult {
    const NAME: &str = "elliptic function identities, 10^4 samples";
    const TOL: f64 = 1e-12;
    guarded(10, NAME, TOL, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let t: f64 = rng.gen_range(-10.0..10.0);
            let k: f64 = rng.gen_range(0.0..0.99);
            let quarter = complete_elliptic_k(k)?;
            let (sn, cn, dn) = jacobi_sn_cn_dn(t, k)?;
            let (sn4, cn4, _) = jacobi_sn_cn_dn(t + 4.0 * quarter, k)?;
            let (_, _, dn2) = jacobi_sn_cn_dn(t + 2.0 * quarter, k)?;
            let (snm, cnm, dnm) = jacobi_sn_cn_dn(-t, k)?;
            let (s0, c0, d0) = jacobi_sn_cn_dn(t, 0.0)?;
            let errors = [
                sn * sn + cn * cn - 1.0,
                dn * dn + k * k * sn * sn - 1.0,
                sn4 - sn,
                cn4 - cn,
                dn2 - dn,
                sn + snm,
                cn - cnm,
                dn - dnm,
                s0 - t.sin(),
                c0 - t.cos(),
                d0 - 1.0,
            ];
            worst = errors.iter().fold(worst, |acc, x| acc.max(x.abs()));
        }
        Ok(CheckResult {
            id: 10,
            name: NAME,
            passed: worst < TOL,
            measured: worst,
            tolerance: TOL,
            detail: "sn^2+cn^2, dn^2+k^2 sn^2, 4K/2K periods, symmetry, k=0".into(),
        })
    })
}

/// All checks of a level, in criterion order.
pub fn run(level: Level) -> Vec<CheckResult> {
    match level {
        Level::Quick => vec![check_quartet(), check_elliptic()],
        Level::Full => vec![
            check_quartet(),
            check_mixed_example(),
            check_sphere_limit(),
            check_cross_oracle(),
            check_slopes(),
            check_lambda_zero(),
            check_inequalities(),
            check_perturbation(),
            check_convergence(),
            check_elliptic(),
        ],
    }
}
