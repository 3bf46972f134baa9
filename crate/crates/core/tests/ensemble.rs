//! End-to-end checks of the sampler against the analytic characteristic
//! functions, plus reproducibility and serialization.

use stable_lab::charfn::{cf_m, cf_m_with_drift, cf_infinity, Drift, HaarSample};
use stable_lab::matrix::{empirical_cf_matrix, sample_y_m_batch, EnsembleSpec, HermitianMatrix};
use stable_lab::presets;
use stable_lab::stable::StabilityIndex;
use stable_lab::verify::gaussian::gaussian_closed_form_cf;

fn alpha(a: f64) -> StabilityIndex {
    StabilityIndex::new(a).unwrap()
}

fn test_matrix() -> HermitianMatrix {
    HermitianMatrix::from_triangle(2, &[0.6, 0.0, -0.2, 0.25, 0.3, 0.0]).unwrap()
}

#[test]
fn traceless_gaussian_ensemble_matches_closed_form() {
    // α = 2 with atoms ±(e₁−e₂)/√2 of weight 1/2 gives X = x·(1, −1), x ~ N(0, 1).
    let n = 40_000;
    for m in [1, 3, 10] {
        let spec = EnsembleSpec::new(2, alpha(2.0), presets::traceless_pair(2).unwrap(), 0.0, m).unwrap();
        let samples = sample_y_m_batch(&spec, n, 11 + m as u64);
        for s in [0.5, 1.0, 1.7] {
            let est = empirical_cf_matrix(&samples, &HermitianMatrix::from_diagonal(&[s, -s])).unwrap();
            let want = gaussian_closed_form_cf(s, m);
            assert!(
                (est.value.re - want).abs() < 5.0 / (n as f64).sqrt() && est.value.im.abs() < 5.0 / (n as f64).sqrt(),
                "m={m} s={s}: {} vs {want}",
                est.value
            );
        }
    }
}

#[test]
fn sampled_cf_matches_analytic_cf_m() {
    let haar = HaarSample::generate(2, 40_000, 5).unwrap();
    let s = test_matrix();
    for (a, t) in [(0.7, 0.3), (1.0, 0.25), (1.5, 0.6)] {
        let measure = presets::orbital(t, 2).unwrap();
        let m = 4;
        let spec = EnsembleSpec::new(2, alpha(a), measure.clone(), 0.0, m).unwrap();
        let samples = sample_y_m_batch(&spec, 40_000, 7);
        let emp = empirical_cf_matrix(&samples, &s).unwrap();
        let exact = cf_m(&s, m, &measure, alpha(a), &haar).unwrap();
        let se = (emp.std_error.powi(2) + exact.std_error.powi(2)).sqrt();
        assert!((emp.value - exact.value).norm() < 5.0 * se, "alpha={a}: {} vs {}", emp.value, exact.value);
    }
}

#[test]
fn cauchy_drift_is_needed_for_the_sampled_law() {
    // Moderate m so the α = 1 drift phase is well above the noise.
    let haar = HaarSample::generate(2, 40_000, 6).unwrap();
    let measure = presets::orbital(1.0, 2).unwrap();
    let m = 64;
    let s = HermitianMatrix::from_diagonal(&[0.8, 0.3]);
    let spec = EnsembleSpec::new(2, alpha(1.0), measure.clone(), 0.0, m).unwrap();
    let emp = empirical_cf_matrix(&sample_y_m_batch(&spec, 40_000, 8), &s).unwrap();
    let with = cf_m_with_drift(&s, m, &measure, alpha(1.0), &haar, Drift::Included).unwrap();
    let without = cf_m_with_drift(&s, m, &measure, alpha(1.0), &haar, Drift::Omitted).unwrap();
    let se = (emp.std_error.powi(2) + with.std_error.powi(2)).sqrt();
    assert!((emp.value - with.value).norm() < 5.0 * se);
    assert!((emp.value - without.value).norm() > 20.0 * se);
}

#[test]
fn large_m_approaches_the_stable_limit() {
    let haar = HaarSample::generate(2, 20_000, 9).unwrap();
    let measure = presets::orbital(0.4, 2).unwrap();
    let s = test_matrix();
    let a = alpha(1.3);
    let limit = cf_infinity(&s, &measure, a, &haar).unwrap().value;
    let d = |m| (cf_m(&s, m, &measure, a, &haar).unwrap().value - limit).norm();
    assert!(d(4000) < d(40) / 50.0, "{} vs {}", d(4000), d(40));
}

#[test]
fn batches_are_reproducible_across_thread_counts() {
    let spec = EnsembleSpec::new(3, alpha(0.9), presets::orbital(0.5, 3).unwrap(), 0.5, 5).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_y_m_batch(&spec, 200, 42))
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a, b);
    let c = sample_y_m_batch(&spec, 200, 43);
    assert_ne!(a, c);
}

#[test]
fn ensemble_spec_round_trips_through_json() {
    let spec = EnsembleSpec::new(3, alpha(1.7), presets::full_basis(3).unwrap(), -0.25, 12).unwrap();
    let text = serde_json::to_string(&spec).unwrap();
    assert!(text.contains("\"N\":3"));
    let back: EnsembleSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
    let x = &sample_y_m_batch(&spec, 1, 1)[0];
    let back: HermitianMatrix = serde_json::from_str(&serde_json::to_string(x).unwrap()).unwrap();
    assert_eq!(&back, x);
}

#[test]
fn invalid_alpha_is_rejected_in_json() {
    let spec = EnsembleSpec::new(2, alpha(1.5), presets::axis(2).unwrap(), 0.0, 1).unwrap();
    let text = serde_json::to_string(&spec).unwrap().replace("1.5", "2.5");
    assert!(serde_json::from_str::<EnsembleSpec>(&text).is_err());
}
