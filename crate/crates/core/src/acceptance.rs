//! The acceptance suite: ten end-to-end checks, each reporting the measured
//! quantity, its tolerance and a verdict.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfn::{
    haar_mean_w, m_h_estimate, random_probability_measure, w_alpha, w_alpha_abs_bound, Drift, HaarSample,
};
use crate::matrix::{classify_support, random_hermitian, sample_y_m_batch, EnsembleSpec, HermitianMatrix, SupportTag};
use crate::rng;
use crate::stable::{
    empirical_cf_scalar, empirical_cf_vector, sample_skewed_stables, sample_stable_vectors, SpectralMeasureEig,
    StabilityIndex, StableVectorSpec,
};
use crate::verify::asymptotics::d_asymptotics_on;
use crate::verify::gaussian::gaussian_oracle_experiment;
use crate::verify::moments::u_moment_variance;
use crate::verify::optimality::{estimate_i_epsilon, extrapolate_to_zero, i_epsilon_limit};
use crate::verify::rate::{cf_distances, curve_from_distances, doubling_m_list, ExperimentConfig, DEFAULT_RADII, SLOPE_WINDOW};
use crate::{presets, Result};

const SEED: u64 = 20_240_611;
const N_CF: usize = 100_000;
const N_HAAR: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    /// Worst-case value of the checked quantity.
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} [{}] {}: measured {:.6e}, tolerance {:.6e}; {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

fn alpha(a: f64) -> StabilityIndex {
    StabilityIndex::new(a).expect("valid stability index")
}

fn result(id: u8, name: &str, measured: f64, tolerance: f64, passed: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name: name.to_string(),
        measured,
        tolerance,
        passed,
        detail,
    }
}

pub type Criterion = fn() -> Result<CriterionResult>;

pub const CRITERIA: [(u8, &str, Criterion); 10] = [
    (1, "gaussian closed form", gaussian_oracle),
    (2, "rate law", rate_law),
    (3, "m·D asymptotics", d_asymptotics),
    (4, "cauchy drift", cauchy_drift),
    (5, "support classification", support_classification),
    (6, "w_alpha bound", bound_suite),
    (7, "m_H positivity", positivity_suite),
    (8, "optimality probe", optimality_probe),
    (9, "haar moment variances", haar_moment_variances),
    (10, "sampler CF conformance", sampler_conformance),
];

pub fn run(id: u8) -> Option<Result<CriterionResult>> {
    CRITERIA.iter().find(|(i, _, _)| *i == id).map(|(_, _, f)| f())
}

/// Runs every criterion; errors become failed results.
pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|(id, name, f)| f().unwrap_or_else(|e| result(*id, name, f64::NAN, f64::NAN, false, format!("error: {e}"))))
        .collect()
}

/// Empirical CF of the `N = 2`, `α = 2` traceless construction against the
/// closed form, `m ∈ {1,4,16,64}`, `s ∈ {0,½,1,2}`, `10⁵` samples each.
pub fn gaussian_oracle() -> Result<CriterionResult> {
    let rep = gaussian_oracle_experiment(&[1, 4, 16, 64], &[0.0, 0.5, 1.0, 2.0], N_CF, SEED)?;
    let worst = rep
        .rows
        .iter()
        .max_by(|a, b| a.deviation.total_cmp(&b.deviation))
        .expect("non-empty grid");
    Ok(result(
        1,
        "gaussian closed form",
        rep.max_deviation(),
        rep.tolerance,
        rep.passed(),
        format!("16 grid points, worst at m={} s={}", worst.m, worst.s),
    ))
}

fn rate_config(a: f64, t: f64) -> Result<ExperimentConfig> {
    let spec = EnsembleSpec::new(2, alpha(a), presets::orbital(t, 2)?, 0.0, 1)?;
    ExperimentConfig::with_default_grid(spec, doubling_m_list(8, 512), &DEFAULT_RADII, N_HAAR, 0, SEED)
}

/// CF-distance slope for `α ∈ {½, 1, 3/2, 2}`, orbital `t = 0.3`, `N = 2`.
pub fn rate_law() -> Result<CriterionResult> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut passed = true;
    for a in [0.5, 1.0, 1.5, 2.0] {
        let config = rate_config(a, 0.3)?;
        let haar = config.haar_sample()?;
        let curve = curve_from_distances(config.m_list.clone(), cf_distances(&config, &haar, Drift::Included)?)?;
        let ok = curve.slope_within(SLOPE_WINDOW.0, SLOPE_WINDOW.1);
        passed &= ok;
        worst = worst.max((curve.slope + 1.0).abs());
        parts.push(format!("alpha={a}: slope {:.4} ± {:.4}", curve.slope, curve.slope_stderr));
    }
    Ok(result(2, "rate law", worst, 0.3, passed, format!("|slope + 1| worst; {}", parts.join(", "))))
}

/// `|m·D(S₀) − 1/1440|` at `m = 10⁴`, `N = 2`, `α = 2`, orbital measure.
pub fn d_asymptotics() -> Result<CriterionResult> {
    let haar = HaarSample::generate(2, N_HAAR, SEED)?;
    let s0 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
    let measure = presets::orbital(0.5, 2)?;
    let rep = d_asymptotics_on(&s0, &[100, 1000, 10_000], &measure, alpha(2.0), &haar)?;
    let last = &rep.largest().scaled_d;
    let target = Complex64::new(1.0 / 1440.0, 0.0);
    let deviation = (last.value - target).norm();
    let tolerance = (5.0 * last.std_error).max(1e-5);
    Ok(result(
        3,
        "m·D asymptotics",
        deviation,
        tolerance,
        deviation < tolerance,
        format!(
            "m·D = {:.6e} (se {:.2e}), v/2 on the same sample = {:.6e}",
            last.value.re, last.std_error, rep.half_variance.value.re
        ),
    ))
}

/// `α = 1`, `t = 1`: the drift-corrected CF distance decays at the rate law;
/// the uncorrected one stays at least ten times larger at `m = 512`.
pub fn cauchy_drift() -> Result<CriterionResult> {
    let config = rate_config(1.0, 1.0)?;
    let haar = config.haar_sample()?;
    let with = curve_from_distances(config.m_list.clone(), cf_distances(&config, &haar, Drift::Included)?)?;
    let without = cf_distances(&config, &haar, Drift::Omitted)?;
    let last_with = *with.distances.last().expect("non-empty");
    let last_without = *without.last().expect("non-empty");
    let ratio = last_without / last_with;
    let slope_ok = with.slope_within(SLOPE_WINDOW.0, SLOPE_WINDOW.1);
    Ok(result(
        4,
        "cauchy drift",
        ratio,
        10.0,
        slope_ok && ratio > 10.0,
        format!(
            "slope with drift {:.4}; d(512) with drift {:.3e}, without {:.3e}",
            with.slope, last_with, last_without
        ),
    ))
}

/// The four presets classify as full / traceless / identity line / degenerate,
/// and `Y_m` sampled from the traceless preset is traceless.
pub fn support_classification() -> Result<CriterionResult> {
    let n = 2;
    let cases = [
        (presets::orbital(0.3, n)?, SupportTag::FullHerm, false),
        (presets::traceless_pair(n)?, SupportTag::TracelessHyperplane, false),
        (presets::identity_line(n)?, SupportTag::IdentityLine, false),
        (presets::axis(n)?, SupportTag::FullHerm, true),
    ];
    let mut passed = true;
    let mut tags = Vec::new();
    for (measure, tag, degenerate) in &cases {
        let case = classify_support(measure);
        passed &= case.tag == *tag && case.degenerate == *degenerate;
        tags.push(format!("{}{}", case.tag, if case.degenerate { " (degenerate)" } else { "" }));
    }
    let mut max_trace: f64 = 0.0;
    for a in [0.5, 1.0, 1.5, 2.0] {
        let spec = EnsembleSpec::new(n, alpha(a), presets::traceless_pair(n)?, 0.0, 32)?;
        for y in sample_y_m_batch(&spec, 2000, SEED) {
            max_trace = max_trace.max(y.trace().abs());
        }
    }
    passed &= max_trace < 1e-9;
    Ok(result(5, "support classification", max_trace, 1e-9, passed, tags.join(" / ")))
}

/// `|w_α(X)| ≤ bound` on `10³` random triples with probability measures.
pub fn bound_suite() -> Result<CriterionResult> {
    let mut r = rng::master(SEED);
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..1000 {
        use rand::Rng;
        let n = 2 + i % 4;
        let a = if i % 10 == 0 { 1.0 } else { 2.0 * (1.0 - r.random::<f64>()) };
        let k = 1 + r.random_range(0..6);
        let measure = random_probability_measure(n, k, &mut r);
        let scale = 10f64.powf(4.0 * r.random::<f64>() - 2.0);
        let x = random_hermitian(n, &mut r).scale(scale);
        let w = w_alpha(&x, &measure, alpha(a))?.norm();
        let bound = w_alpha_abs_bound(&x, alpha(a));
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(w / bound);
        }
        if w > bound * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Ok(result(
        6,
        "w_alpha bound",
        worst_ratio,
        1.0,
        violations == 0,
        format!("{violations} violations in 1000 triples; worst |w|/bound shown"),
    ))
}

/// `m̂_H > 10⁻³` on full-span presets; the identity direction gives exactly
/// zero on traceless atoms.
pub fn positivity_suite() -> Result<CriterionResult> {
    let n = 2;
    let haar = HaarSample::generate(n, 20_000, SEED)?;
    let mut smallest = f64::INFINITY;
    for measure in [presets::orbital(0.3, n)?, presets::orbital(0.5, n)?, presets::full_basis(n)?] {
        let case = classify_support(&measure);
        for a in [0.5, 1.0, 1.5, 2.0] {
            smallest = smallest.min(m_h_estimate(&measure, alpha(a), &case, 16, &haar)?);
        }
    }
    let identity = HermitianMatrix::identity(n).scale(1.0 / (n as f64).sqrt());
    let traceless = presets::traceless_pair(n)?;
    let mut identity_zero = true;
    for a in [0.5, 1.0, 1.5, 2.0] {
        let v = haar_mean_w(&identity, &traceless, alpha(a), &haar)?;
        identity_zero &= v.value == Complex64::new(0.0, 0.0);
    }
    Ok(result(
        7,
        "m_H positivity",
        smallest,
        1e-3,
        smallest > 1e-3 && identity_zero,
        format!("smallest m_H over presets and alphas; identity direction exactly zero: {identity_zero}"),
    ))
}

/// `I_ε` at `ε = 0.1` is resolved from zero, and the extrapolation over
/// `ε ∈ {0.025, 0.0125, 0.00625}` meets `c̃ e^{−⟨w(S₀)⟩} v(S₀)` within 10%.
/// The expansion in `ε` carries an `ε^{1+α}` term, so the nodes must sit
/// well inside the window scale; at `ε = 0.1` the integral is still far
/// from its limit.
pub fn optimality_probe() -> Result<CriterionResult> {
    let haar = HaarSample::generate(2, 20_000, SEED)?;
    let mut worst_rel: f64 = 0.0;
    let mut passed = true;
    let mut parts = Vec::new();
    for (a, t) in [(0.5, 0.3), (2.0, 0.0)] {
        let probe = estimate_i_epsilon(0.1, t, alpha(a), 2, 2000, &haar, SEED)?;
        passed &= probe.value.norm() > 3.0 * probe.std_error;
        parts.push(format!(
            "alpha={a} t={t}: |I_0.1| = {:.4e} (se {:.1e})",
            probe.value.norm(),
            probe.std_error
        ));
        let mut points = Vec::new();
        for eps in [0.025, 0.0125, 0.00625] {
            let est = estimate_i_epsilon(eps, t, alpha(a), 2, 2000, &haar, SEED)?;
            points.push((eps, est.value));
        }
        let extrapolated = extrapolate_to_zero(&points);
        let limit = i_epsilon_limit(t, alpha(a), &haar)?;
        let rel = (extrapolated - limit).norm() / limit.norm();
        worst_rel = worst_rel.max(rel);
        parts.push(format!("limit {limit:.4e}, extrapolated {extrapolated:.4e}"));
    }
    passed &= worst_rel < 0.1;
    Ok(result(8, "optimality probe", worst_rel, 0.1, passed, parts.join("; ")))
}

/// `Var A = 1/45` for `N = 2`, `α = 2`; `Var B > 0` for `N ∈ {2, 3}`.
pub fn haar_moment_variances() -> Result<CriterionResult> {
    let v2 = u_moment_variance(2, alpha(2.0), N_HAAR, SEED)?;
    let dev = (v2.var_a - 1.0 / 45.0).abs();
    let mut passed = dev < 5.0 * v2.se_a;
    let mut parts = vec![format!("Var A = {:.6e} (se {:.1e})", v2.var_a, v2.se_a)];
    for n in [2, 3] {
        let v = u_moment_variance(n, alpha(2.0), N_HAAR, SEED + n as u64)?;
        passed &= v.var_b > 5.0 * v.se_b;
        parts.push(format!("N={n}: Var B = {:.4e} (se {:.1e})", v.var_b, v.se_b));
    }
    Ok(result(9, "haar moment variances", dev, 5.0 * v2.se_a, passed, parts.join(", ")))
}

/// Univariate and vector samplers against their target CFs at 20 points,
/// `α ∈ {½, 1, 3/2, 2}`, `n = 10⁵`.
pub fn sampler_conformance() -> Result<CriterionResult> {
    let tolerance = 4.0 / (N_CF as f64).sqrt();
    let grid: Vec<f64> = (0..20).map(|i| -5.0 + 10.0 * i as f64 / 19.0).collect();
    let measure = SpectralMeasureEig::from_directions(
        2,
        vec![vec![1.0, 0.0], vec![0.3, 1.0], vec![-1.0, -0.4]],
        vec![0.5, 0.3, 0.2],
    )?;
    let shift = vec![0.2, -0.1];
    let mut worst: f64 = 0.0;
    for (k, a) in [0.5, 1.0, 1.5, 2.0].into_iter().enumerate() {
        let idx = alpha(a);
        let draws = sample_skewed_stables(idx, N_CF, SEED + k as u64);
        for &u in &grid {
            let est = empirical_cf_scalar(&draws, u)?;
            let target = (-crate::stable::nu_alpha(u, idx)).exp();
            worst = worst.max((est.value - target).norm());
        }
        let spec = StableVectorSpec::new(idx, measure.clone(), shift.clone())?;
        let vectors = sample_stable_vectors(&spec, N_CF, SEED + 100 + k as u64);
        for (i, &u) in grid.iter().enumerate() {
            let angle = 0.7 * i as f64;
            let xi = [u * angle.cos(), u * angle.sin()];
            let est = empirical_cf_vector(&vectors, &xi)?;
            worst = worst.max((est.value - spec.cf(&xi)).norm());
        }
    }
    Ok(result(
        10,
        "sampler CF conformance",
        worst,
        tolerance,
        worst < tolerance,
        "max |empirical − target| over 4 alphas × 20 points × {scalar, vector}".into(),
    ))
}
