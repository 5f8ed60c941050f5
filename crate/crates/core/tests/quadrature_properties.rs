use std::f64::consts::PI;

use heatline::{DecayEnvelope, GridSpec, Quadrature, RealPoint, TestFunction};
use num_complex::Complex64;
use proptest::prelude::*;

/// `C exp(-c |x|^2)` with integral `C (pi/c)^(n/2)`.
fn gaussian(dim: usize, c: f64, amp: f64) -> (TestFunction, f64) {
    let f = TestFunction::new("gaussian", dim, DecayEnvelope::gaussian(c, amp), Some(amp), move |x| {
        Complex64::new(amp * (-c * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    })
    .unwrap();
    (f, amp * (PI / c).powf(dim as f64 / 2.0))
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn oracle_agreement(
        dim in 1usize..=2,
        c in 0.5f64..20.0,
        amp in 0.1f64..10.0,
        radius in prop::sample::select(vec![3.0, 4.0, 6.0]),
        points in prop::sample::select(vec![64usize, 128, 256]),
    ) {
        let (f, exact) = gaussian(dim, c, amp);
        let r = Quadrature::default().integrate(&f, &GridSpec::new(radius, points, dim).unwrap()).unwrap();
        let err = (r.value - exact).norm();
        prop_assert!(err <= r.disc_error_est + r.tail_bound + 1e-12, "err {err:e} vs {r:?}");
    }

    /// The product of two Gaussians is a Gaussian with the summed rate.
    #[test]
    fn oracle_agreement_on_products(a in 0.5f64..5.0, b in 0.5f64..5.0, points in prop::sample::select(vec![128usize, 256])) {
        let (g1, _) = gaussian(1, a, 1.0);
        let (g2, _) = gaussian(1, b, 1.0);
        let prod = TestFunction::new("product", 1, DecayEnvelope::gaussian(a + b, 1.0), Some(1.0), move |x| {
            g1.eval(x) * g2.eval(x)
        })
        .unwrap();
        let exact = (PI / (a + b)).sqrt();
        let r = Quadrature::default().integrate(&prod, &GridSpec::new(4.0, points, 1).unwrap()).unwrap();
        prop_assert!((r.value - exact).norm() <= r.disc_error_est + r.tail_bound + 1e-12);
    }

    #[test]
    fn monotone_refinement(dim in 1usize..=2, c in 1.0f64..40.0, k in 0usize..3) {
        let (f, exact) = gaussian(dim, c, 1.0);
        let q = Quadrature::default();
        let n = 16usize << k;
        let coarse = q.integrate(&f, &GridSpec::new(4.0, n, dim).unwrap()).unwrap();
        let fine = q.integrate(&f, &GridSpec::new(4.0, 2 * n, dim).unwrap()).unwrap();
        let (e_coarse, e_fine) = ((coarse.value - exact).norm(), (fine.value - exact).norm());
        prop_assert!(e_fine <= e_coarse + fine.disc_error_est, "{e_fine:e} > {e_coarse:e} + {:e}", fine.disc_error_est);
    }

    #[test]
    fn linearity(
        c1 in 0.5f64..10.0,
        c2 in 0.5f64..10.0,
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let (g1, _) = gaussian(1, c1, 1.0);
        let (g2, _) = gaussian(1, c2, 1.0);
        let (h1, h2) = (g1.clone(), g2.clone());
        let combo = TestFunction::new(
            "combination",
            1,
            DecayEnvelope::gaussian(c1.min(c2), a.abs() + b.abs()),
            Some(a.abs() + b.abs()),
            move |x| h1.eval(x) * a + h2.eval(x) * b,
        )
        .unwrap();
        let q = Quadrature::default();
        let grid = GridSpec::new(6.0, 256, 1).unwrap();
        let (r, r1, r2) = (
            q.integrate(&combo, &grid).unwrap(),
            q.integrate(&g1, &grid).unwrap(),
            q.integrate(&g2, &grid).unwrap(),
        );
        let combined = r.error_bound() + a.abs() * r1.error_bound() + b.abs() * r2.error_bound();
        let lhs = r.value;
        let rhs = r1.value * a + r2.value * b;
        prop_assert!((lhs - rhs).norm() <= combined + 1e-13 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn translation_invariance(dim in 1usize..=2, c in 0.5f64..10.0, s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let (f, _) = gaussian(dim, c, 1.0);
        // |a| <= sqrt 2, at most half the smallest radius of the ladder
        let shift = RealPoint::from_slice(&[s, t][..dim]).unwrap();
        let g = f.translated(&shift).unwrap();
        let q = Quadrature::default();
        let tol = 1e-8;
        let (r0, r1) = (q.integrate_auto(&f, tol).unwrap(), q.integrate_auto(&g, tol).unwrap());
        prop_assert!((r0.value - r1.value).norm() <= r0.error_bound() + r1.error_bound() + 1e-12);
    }
}
