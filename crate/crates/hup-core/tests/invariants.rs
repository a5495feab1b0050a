//! Cross-module invariants: property-based checks of the exponent arithmetic
//! and point maps, plus quadrature-backed identities too slow for proptest.

use hup_core::density::{Density, InterpOrder, SampleTable};
use hup_core::extension::{extension_quadrature, EvalPoint, ParabolaMeasure};
use hup_core::symmetry::{pseudo_conformal_point, MoebiusParams};
use hup_core::uniqueness::{
    c_lemma, decay_slope_fit, lambda_points, power_admissible, power_witness, region_a_contains,
    ExponentPair, LambdaBranch, LambdaSpec, Line,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn region_membership_is_symmetric(a in -0.5f64..1.5, b in -0.5f64..1.5) {
        let p = ExponentPair::new(a, b);
        prop_assert_eq!(region_a_contains(p), region_a_contains(p.swapped()));
    }

    #[test]
    fn c_lemma_symmetric_and_positive(a in 0.01f64..0.95, b in 0.01f64..0.95) {
        prop_assume!(a + b < 0.99);
        let c1 = c_lemma(ExponentPair::new(a, b)).unwrap();
        let c2 = c_lemma(ExponentPair::new(b, a)).unwrap();
        prop_assert_eq!(c1, c2);
        prop_assert!(c1 >= 1);
    }

    #[test]
    fn c_lemma_at_most_two_inside_region_a(a in 0.001f64..0.999, b in 0.001f64..0.999) {
        prop_assume!(region_a_contains(ExponentPair::new(a, b)));
        let c = c_lemma(ExponentPair::new(a, b)).unwrap();
        prop_assert!(c <= 2, "C = {} at ({}, {})", c, a, b);
    }

    #[test]
    fn power_admissibility_matches_witness_search(a in 0.01f64..1.2, b in 0.01f64..1.2) {
        let p = ExponentPair::new(a, b);
        prop_assert_eq!(power_admissible(p), power_witness(p).is_some());
    }

    #[test]
    fn moebius_point_map_inverts(
        a in 0.3f64..2.0,
        b in -1.0f64..1.0,
        c in -1.0f64..1.0,
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
    ) {
        // Complete (a, b, c) to determinant one.
        let d = (1.0 + b * c) / a;
        let m = MoebiusParams::new(a, b, c, d).unwrap();
        prop_assume!((m.a + m.b * y).abs() > 0.05);
        let q = pseudo_conformal_point(EvalPoint::new(x, y), &m).unwrap();
        prop_assume!((m.inverse().a + m.inverse().b * q.eta).abs() > 0.05);
        let r = pseudo_conformal_point(q, &m.inverse()).unwrap();
        prop_assert!((r.xi - x).abs() < 1e-9 * (1.0 + x.abs()));
        prop_assert!((r.eta - y).abs() < 1e-9 * (1.0 + y.abs()));
    }

    #[test]
    fn lambda_points_never_panic_and_dedupe(
        c1 in 0.1f64..3.0,
        e1 in -0.9f64..0.9,
        h in -2.0f64..2.0,
        n in 1u32..12,
    ) {
        let spec = LambdaSpec::new(vec![
            LambdaBranch { line: Line::Horizontal { height: h }, c: c1, exponent: e1.abs(), start_index: 0 },
            LambdaBranch { line: Line::ThroughOrigin { slope: 1.0 + h * h }, c: c1, exponent: e1, start_index: 1 },
        ]);
        let pts = lambda_points(&spec, n).unwrap();
        // Deduplication really is exact.
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                prop_assert!(pts[i].xi != pts[j].xi || pts[i].eta != pts[j].eta);
            }
        }
    }

    #[test]
    fn slope_fit_recovers_exact_power_laws(slope in -4.0f64..1.0, scale in 0.1f64..10.0) {
        let samples: Vec<(f64, f64)> = (0..16)
            .map(|i| {
                let x = 0.3 * 1.5f64.powi(i);
                (x, scale * x.powf(slope))
            })
            .collect();
        let fitted = decay_slope_fit(&samples).unwrap();
        prop_assert!((fitted - slope).abs() < 1e-9);
    }
}

/// Transforming twice reproduces an even real density: F(F(g))(x) = g(-x) = g(x).
#[test]
fn double_transform_reproduces_even_density() {
    let tol = 1e-8;
    let g = Density::smooth_bump(0.0, 0.6);
    let m = ParabolaMeasure::new(g.clone(), "bump");
    let (ghat, cache_err) = m.ghat_density().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..64 {
        let x: f64 = rng.gen_range(-0.7..0.7);
        let double = ghat.fourier_transform_1d(x, tol).unwrap();
        let direct = g.evaluate(x);
        let err = (double.value - direct).norm();
        assert!(
            err <= 2.0 * tol + 10.0 * cache_err,
            "x={x}: |F²g - g| = {err:.2e}"
        );
    }
}

/// The measure invariant: a deserialized cached ĝ must agree with the direct
/// transform at its grid points.
#[test]
fn cached_ghat_agreement_invariant_after_round_trip() {
    let m = ParabolaMeasure::new(Density::odd_bump(0.5), "odd");
    let (ghat, _) = m.ghat_density().unwrap().clone();
    let tol = 1e-9;
    if let hup_core::DensityKind::SampleTable(table) = &ghat.kind {
        for idx in [0usize, 101, 1007, table.len() - 1] {
            let xi = table.grid()[idx];
            let direct = m.density.fourier_transform_1d(xi, tol).unwrap();
            let diff = (table.values()[idx] - direct.value).norm();
            assert!(diff <= 10.0 * tol, "xi={xi}: {diff:.2e}");
        }
    } else {
        panic!("odd bump cache should be a sample table");
    }
}

/// Quadrature boundedness: |μ̂(p)| ≤ I₀ + tol across densities and points.
#[test]
fn extension_bounded_by_mass_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let densities = [
        Density::unit_gaussian(),
        Density::gaussian(0.7, 0.5, -0.4),
        Density::smooth_bump(0.2, 0.4),
        Density::hermite(4),
    ];
    for d in densities {
        let mass = d.moment(0, 1e-9).value;
        let m = ParabolaMeasure::new(d, "any");
        for _ in 0..8 {
            let p = EvalPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0));
            let v = extension_quadrature(&m, p, 1e-9).unwrap();
            assert!(v.value.norm() <= mass + 1e-7);
        }
    }
}

/// A user-assembled sample table goes through the full pipeline: serialization,
/// transform, extension.
#[test]
fn sample_table_measures_are_first_class() {
    let n = 4001;
    let step = 12.0 / (n - 1) as f64;
    let values: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = -6.0 + step * i as f64;
            Complex64::new((-std::f64::consts::PI * t * t).exp(), 0.0)
        })
        .collect();
    let table = SampleTable::from_uniform(-6.0, step, values, InterpOrder::Cubic).unwrap();
    let d = Density::sample_table(table);
    let json = serde_json::to_string(&d).unwrap();
    let back: Density = serde_json::from_str(&json).unwrap();
    let m = ParabolaMeasure::new(back, "tabulated gaussian");
    // The tabulated gaussian behaves like the analytic one to interpolation error.
    let v = extension_quadrature(&m, EvalPoint::new(0.5, 0.5), 1e-8).unwrap();
    let exact = hup_core::extension_gaussian_closed_form(1.0, EvalPoint::new(0.5, 0.5));
    assert!(
        (v.value - exact).norm() < 1e-6,
        "{:.2e}",
        (v.value - exact).norm()
    );
}
