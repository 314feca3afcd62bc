use std::sync::Arc;

use cusp_core::bieberbach::{analyze, catalog, catalog_names};
use cusp_core::exactlin::{to_f64, Rational};
use cusp_core::shapes::{best_rational, is_arithmetic_shape, rationalize, shape_distance, RealForm};
use num::{BigInt, Signed};
use proptest::prelude::*;

/// Best approximation by direct search over every denominator.
fn scan(x: f64, bound: u64) -> f64 {
    (1..=bound)
        .map(|q| {
            let p = (x * q as f64).round();
            (x - p / q as f64).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

fn spd(n: usize) -> impl Strategy<Value = RealForm> {
    proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |a| {
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = (0..n).map(|k| a[k * n + i] * a[k * n + j]).sum::<f64>();
            }
            g[i * n + i] += 0.5;
        }
        RealForm::new(n, g).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn best_rational_is_optimal(x in -20.0f64..20.0, bound in 1u64..200) {
        let r = best_rational(x, bound).unwrap();
        prop_assert!(r.denom() <= &BigInt::from(bound));
        let err = (x - to_f64(&r)).abs();
        prop_assert!(err <= scan(x, bound) + 1e-12);
        prop_assert!(err <= 0.5 / bound as f64 + 1e-12 || bound == 1);
    }

    #[test]
    fn best_rational_improves_with_bound(x in -5.0f64..5.0, b in 1u64..500, extra in 0u64..500) {
        let e1 = (x - to_f64(&best_rational(x, b).unwrap())).abs();
        let e2 = (x - to_f64(&best_rational(x, b + extra).unwrap())).abs();
        prop_assert!(e2 <= e1);
    }

    #[test]
    fn best_rational_is_odd(x in 0.0f64..10.0, bound in 1u64..100) {
        let pos = best_rational(x, bound).unwrap();
        let neg = best_rational(-x, bound).unwrap();
        prop_assert_eq!(pos.abs(), neg.abs());
    }

    #[test]
    fn rationalize_is_idempotent_and_invariant((idx, target) in (0usize..13).prop_flat_map(|i| {
        let n = catalog(&catalog_names()[i]).unwrap().dim();
        (Just(i), spd(n))
    }), bound in prop::sample::select(vec![10u64, 100, 1000])) {
        let g = Arc::new(analyze(catalog(&catalog_names()[idx]).unwrap(), 1024).unwrap());
        if let Ok(shape) = rationalize(&target, &g, bound) {
            prop_assert!(is_arithmetic_shape(shape.form(), &g.holonomy));
            let again = rationalize(&RealForm::from_form(shape.form()), &g, bound).unwrap();
            prop_assert_eq!(again.form(), shape.form());
            let averaged = target.theta_average(&g.holonomy).unwrap();
            let n = g.dim() as f64;
            prop_assert!(shape_distance(&averaged, shape.form()).unwrap() <= n * n / bound as f64);
        }
    }

    #[test]
    fn distance_is_a_similarity_invariant(a in spd(3), b in spd(3), s in 0.1f64..10.0) {
        let d = shape_distance(&a, &b).unwrap();
        prop_assert!((d - shape_distance(&b, &a).unwrap()).abs() < 1e-12);
        let scaled = RealForm::new(3, a.entries().iter().map(|x| x * s).collect()).unwrap();
        prop_assert!(shape_distance(&a, &scaled).unwrap() < 1e-9);
        prop_assert!(d >= 0.0);
    }
}

#[test]
fn exact_rational_is_its_own_approximation() {
    let x: Rational = Rational::new(355.into(), 113.into());
    assert_eq!(best_rational(to_f64(&x), 113), Some(x));
}
