use proptest::prelude::*;
use srgm::models::{failure_intensity, mean_value};
use srgm::{ModelKind, Params};

fn kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

fn params() -> impl Strategy<Value = Params> {
    (1e-3f64..5e3, 1e-3f64..2.0).prop_map(|(a, b)| Params { a, b })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn starts_at_zero(k in kind(), p in params()) {
        prop_assert_eq!(mean_value(k, p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn non_decreasing(k in kind(), p in params(), t1 in 0.0f64..500.0, dt in 0.0f64..500.0) {
        let lo = mean_value(k, p, t1).unwrap();
        let hi = mean_value(k, p, t1 + dt).unwrap();
        prop_assert!(hi >= lo, "{k} {p:?}: mu({}) = {hi} < mu({t1}) = {lo}", t1 + dt);
    }

    #[test]
    fn intensity_is_the_derivative(k in kind(), p in params(), t in 0.05f64..200.0) {
        let h = 1e-5 * t.max(1.0);
        let fd = (mean_value(k, p, t + h).unwrap() - mean_value(k, p, t - h).unwrap()) / (2.0 * h);
        let lambda = failure_intensity(k, p, t).unwrap();
        // central differences lose digits to cancellation when mu is large
        let mu = mean_value(k, p, t + h).unwrap();
        let tol = 1e-6 * lambda.max(1.0) + 4.0 * f64::EPSILON * mu / h;
        prop_assert!((lambda - fd).abs() <= tol, "{k} {p:?} t={t}: {lambda} vs {fd}");
    }

    #[test]
    fn bounded_models_saturate_below_a(k in prop::sample::select(vec![ModelKind::GoExponential, ModelKind::DelayedSShaped]),
                                       p in params(), extra in 0.0f64..50.0) {
        let t = (20.0 + extra) / p.b;
        let mu = mean_value(k, p, t).unwrap();
        prop_assert!(mu > 0.999 * p.a && mu <= p.a);
    }
}

#[test]
fn unbounded_models_keep_growing() {
    let p = Params { a: 10.0, b: 0.5 };
    // POW: a t^b doubles when t grows by 2^{1/b}
    let pow = |t| mean_value(ModelKind::Power, p, t).unwrap();
    assert!((pow(16.0) / pow(4.0) - 2.0).abs() < 1e-12);
    // M-O: a ln(1 + b t) doubles from t to (1 + b t)² - 1 over b
    let mo = |t| mean_value(ModelKind::MusaOkumoto, p, t).unwrap();
    let t = 6.0;
    let t2 = ((1.0f64 + 0.5 * t).powi(2) - 1.0) / 0.5;
    assert!((mo(t2) / mo(t) - 2.0).abs() < 1e-12);
    assert!(mo(1e12) > mo(1e6));
}
