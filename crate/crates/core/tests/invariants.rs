use ellipsoid_spectra::eigencurves::{CurveFamily, EigencurveId, Eigencurves};
use ellipsoid_spectra::numerics::{integrate_ode, integrate_ode_observed};
use ellipsoid_spectra::spectrum::{intersect, lambda_sphere};
use ellipsoid_spectra::{Ellipsoid, Parity};
use proptest::prelude::*;
use rayon::prelude::*;

fn reference() -> Ellipsoid {
    Ellipsoid::new(3.0, 2.0, 1.0).unwrap()
}

fn rk4(f: impl Fn(f64, f64) -> f64, t0: f64, t1: f64, y0: f64, steps: usize) -> f64 {
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, y + h * k1 / 2.0);
        let k3 = f(t + h / 2.0, y + h * k2 / 2.0);
        let k4 = f(t + h, y + h * k3);
        y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    y
}

#[test]
fn adaptive_integrator_matches_fixed_step_rk4_on_a_prufer_like_equation() {
    let e = reference();
    let rhs = |t: f64, y: f64| e.coefficient_q(t) * y.cos().powi(2);
    let adaptive = integrate_ode(rhs, 0.0, e.quarter_period(), 0.3, 1e-12).unwrap();
    let fixed = rk4(rhs, 0.0, e.quarter_period(), 0.3, 100_000);
    assert!((adaptive - fixed).abs() < 1e-9, "{adaptive} vs {fixed}");
}

#[test]
fn observer_sees_the_whole_interval() {
    let mut first = None;
    let mut last = 0.0;
    let end = integrate_ode_observed(|_, y| -y, 0.0, 2.0, 1.0, 1e-10, |t, _, _| {
        first.get_or_insert(t);
        last = t;
    })
    .unwrap();
    assert_eq!(first, Some(0.0));
    assert!((last - 2.0).abs() < 1e-12);
    assert!((end - (-2.0f64).exp()).abs() < 1e-9);
}

#[test]
fn eigenvalues_scale_with_inverse_square_of_size() {
    let base = Eigencurves::new(reference(), 32).unwrap();
    for r in [0.5, 2.0] {
        let scaled = Eigencurves::new(reference().scaled(r).unwrap(), 32).unwrap();
        for (m, n) in [(0, 1), (1, 0), (1, 1)] {
            for parity in [Parity::NEUMANN, Parity::new(1, 0, 1).unwrap()] {
                let want = intersect(&base, m, n, parity).unwrap().lambda / (r * r);
                let got = intersect(&scaled, m, n, parity).unwrap().lambda;
                assert!((got - want).abs() < 1e-8 * want.max(1.0), "r={r} ({m},{n},{parity}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn sphere_eigenvalues_do_not_depend_on_the_modulus() {
    for k2 in [0.2, 0.45, 0.8] {
        let curves = Eigencurves::new(Ellipsoid::sphere(k2).unwrap(), 32).unwrap();
        for parity in Parity::all() {
            for (m, n) in [(0, 0), (1, 0), (0, 2), (1, 1)] {
                let got = intersect(&curves, m, n, parity).unwrap().lambda;
                let want = lambda_sphere(m, n, parity);
                assert!((got - want).abs() < 1e-8, "k2={k2} ({m},{n},{parity}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn cached_values_do_not_depend_on_query_order() {
    let fresh = Eigencurves::new(reference(), 32).unwrap();
    let shared = Eigencurves::new(reference(), 32).unwrap();
    let ids: Vec<EigencurveId> = Parity::all()
        .into_iter()
        .flat_map(|p| [EigencurveId::new(CurveFamily::S, 1, p), EigencurveId::new(CurveFamily::T, 2, p)])
        .collect();
    let lambdas = [0.0, 0.7, 3.0, 11.5];
    let parallel: Vec<f64> = ids
        .par_iter()
        .flat_map_iter(|id| lambdas.iter().rev().map(|&l| shared.value(id, l).unwrap()).collect::<Vec<_>>())
        .collect();
    let serial: Vec<f64> = ids
        .iter()
        .flat_map(|id| lambdas.iter().rev().map(|&l| fresh.value(id, l).unwrap()).collect::<Vec<_>>())
        .collect();
    assert_eq!(parallel.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), serial.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curves_interlace_in_lambda(lambda in 0.0f64..30.0, bits in 0u8..8) {
        let parity = Parity::all()[bits as usize];
        let curves = Eigencurves::new(reference(), 32).unwrap();
        let k2 = curves.ellipsoid().k2();
        let h0 = curves.value(&EigencurveId::new(CurveFamily::T, 0, parity), lambda).unwrap();
        let h1 = curves.value(&EigencurveId::new(CurveFamily::T, 1, parity), lambda).unwrap();
        let big_h = curves.value(&EigencurveId::new(CurveFamily::S, 0, parity), lambda).unwrap();
        prop_assert!(h0 < h1);
        prop_assert!(h0 >= -1e-9 && big_h <= lambda + 1e-9);
        // Both Neumann curves start at 0 with slopes on either side of k².
        if parity == Parity::NEUMANN {
            prop_assert!(h0 <= k2 * lambda + 1e-9 && big_h >= k2 * lambda - 1e-9);
        }
    }

    #[test]
    fn parity_text_round_trips(bits in 0u8..8) {
        let parity = Parity::all()[bits as usize];
        prop_assert_eq!(parity.to_string().parse::<Parity>().unwrap(), parity);
    }
}

#[test]
fn prufer_located_spectrum_matches_galerkin() {
    use ellipsoid_spectra::eigencurves::Backend;
    use ellipsoid_spectra::spectrum::enumerate_with;
    let curves = Eigencurves::new(reference(), 32).unwrap();
    let parities = [Parity::NEUMANN, Parity::new(0, 1, 1).unwrap()];
    let galerkin = enumerate_with(&curves, &parities, 8.0, Backend::Galerkin).unwrap();
    let prufer = enumerate_with(&curves, &parities, 8.0, Backend::Prufer).unwrap();
    assert_eq!(galerkin.len(), prufer.len());
    for (g, p) in galerkin.iter().zip(&prufer) {
        assert_eq!((g.m, g.n, g.parity), (p.m, p.n, p.parity));
        assert!((g.lambda - p.lambda).abs() < 1e-7, "{} vs {}", g.lambda, p.lambda);
    }
}
