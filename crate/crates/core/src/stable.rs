//! Scalar and vector α-stable machinery.
//!
//! Parametrisation: the standard totally skewed variable `Z` has
//! `E e^{iuZ} = exp(−ν_α(u))`, and a stable vector with discrete spectral
//! measure `Σ_k w_k δ_{r_k}` and shift `μ` has
//! `E e^{iξ·X} = exp(−Σ_k w_k ν_α(r_k·ξ) + iξ·μ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{mean_estimate, CfEstimate};
use crate::rng;
use crate::{Error, Result};

/// Tolerance on the unit norm of spectral measure atoms.
pub const ATOM_NORM_TOL: f64 = 1e-12;

/// Distance from ±π/2 kept by the uniform angle of the CMS sampler.
const ANGLE_GUARD: f64 = 1e-12;

/// Stability index α ∈ (0, 2].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StabilityIndex(f64);

impl StabilityIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The logarithmic case α = 1.
    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for StabilityIndex {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<StabilityIndex> for f64 {
    fn from(alpha: StabilityIndex) -> f64 {
        alpha.0
    }
}

/// `ν_α(u)`, with principal branches; `ν_α(0) = 0` for every α.
pub fn nu_alpha(u: f64, alpha: StabilityIndex) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = alpha.value();
    let abs_u = u.abs();
    let sgn = u.signum();
    if alpha.is_one() {
        Complex64::new(abs_u, abs_u * 2.0 / PI * sgn * abs_u.ln())
    } else {
        let mag = abs_u.powf(a);
        Complex64::new(mag, -mag * sgn * (PI * a / 2.0).tan())
    }
}

/// One draw of the totally skewed (β = 1) standard stable law,
/// `E e^{iuZ} = exp(−ν_α(u))`, by the Chambers–Mallows–Stuck method.
pub fn sample_skewed_stable<R: Rng + ?Sized>(alpha: StabilityIndex, rng: &mut R) -> f64 {
    let lim = FRAC_PI_2 - ANGLE_GUARD;
    let v = (rng.random::<f64>() - 0.5) * PI;
    let v = v.clamp(-lim, lim);
    let w: f64 = Exp1.sample(rng);
    let a = alpha.value();

    if alpha.is_one() {
        let lead = FRAC_PI_2 + v;
        2.0 / PI * (lead * v.tan() - (FRAC_PI_2 * w * v.cos() / lead).ln())
    } else {
        let zeta = (PI * a / 2.0).tan();
        let b = zeta.atan() / a;
        let s = (1.0 + zeta * zeta).powf(1.0 / (2.0 * a));
        let shifted = a * (v + b);
        s * shifted.sin() / v.cos().powf(1.0 / a)
            * ((v - shifted).cos() / w).powf((1.0 - a) / a)
    }
}

/// Discrete eigenvalue-level spectral measure `Σ_k w_k δ_{r_k}` on the unit
/// sphere of `R^N`. The total weight is the scale σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct SpectralMeasureEig {
    dim: usize,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    #[serde(rename = "N")]
    n: usize,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<MeasureRepr> for SpectralMeasureEig {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        Self::new(r.n, r.atoms, r.weights)
    }
}

impl From<SpectralMeasureEig> for MeasureRepr {
    fn from(m: SpectralMeasureEig) -> Self {
        MeasureRepr {
            n: m.dim,
            atoms: m.atoms,
            weights: m.weights,
        }
    }
}

impl SpectralMeasureEig {
    pub fn new(dim: usize, atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension N must be positive".into()));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("atom list is empty".into()));
        }
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        for (k, (atom, &w)) in atoms.iter().zip(&weights).enumerate() {
            if atom.len() != dim {
                return Err(Error::InvalidMeasure(format!(
                    "atom {k} has length {}, expected N = {dim}",
                    atom.len()
                )));
            }
            let norm = atom.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > ATOM_NORM_TOL {
                return Err(Error::InvalidMeasure(format!(
                    "atom {k} has norm {norm}, expected unit norm"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "weight {k} is {w}, expected a positive number"
                )));
            }
        }
        Ok(Self {
            dim,
            atoms,
            weights,
        })
    }

    /// Builds a measure from arbitrary non-zero directions, normalising each.
    pub fn from_directions(dim: usize, directions: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let atoms = directions
            .into_iter()
            .map(|d| {
                let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                d.into_iter().map(|x| x / norm).collect()
            })
            .collect();
        Self::new(dim, atoms, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass σ.
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.atoms.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// The same directions rescaled to total mass `sigma`.
    pub fn with_total_mass(&self, sigma: f64) -> Result<Self> {
        let scale = sigma / self.total_mass();
        Self::new(
            self.dim,
            self.atoms.clone(),
            self.weights.iter().map(|w| w * scale).collect(),
        )
    }

    /// `Σ_k w_k ν_α(r_k·ξ)`, minus the log-CF of the zero-shift vector law.
    pub fn log_cf_exponent(&self, xi: &[f64], alpha: StabilityIndex) -> Complex64 {
        self.iter()
            .map(|(r, w)| w * nu_alpha(dot(r, xi), alpha))
            .sum()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The mirror-symmetrised measure: each atom `r` with weight `w` contributes
/// `w/2` to both `r` and `−r`. Coinciding atoms are merged.
pub fn symmetrize_measure(measure: &SpectralMeasureEig) -> SpectralMeasureEig {
    let mut atoms: Vec<Vec<f64>> = Vec::with_capacity(2 * measure.len());
    let mut weights: Vec<f64> = Vec::with_capacity(2 * measure.len());
    let mut push = |atom: Vec<f64>, w: f64| {
        let existing = atoms.iter().position(|a| {
            a.iter()
                .zip(&atom)
                .all(|(x, y)| (x - y).abs() <= ATOM_NORM_TOL)
        });
        match existing {
            Some(i) => weights[i] += w,
            None => {
                atoms.push(atom);
                weights.push(w);
            }
        }
    };
    for (r, w) in measure.iter() {
        push(r.to_vec(), w / 2.0);
        push(r.iter().map(|x| -x).collect(), w / 2.0);
    }
    SpectralMeasureEig {
        dim: measure.dim,
        atoms,
        weights,
    }
}

/// Stable vector law `S(α, H_eig, shift)` with a discrete spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableVectorSpec {
    pub index: StabilityIndex,
    pub measure: SpectralMeasureEig,
    pub shift: Vec<f64>,
}

impl StableVectorSpec {
    pub fn new(index: StabilityIndex, measure: SpectralMeasureEig, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != measure.dim() {
            return Err(Error::DimensionMismatch {
                expected: measure.dim(),
                found: shift.len(),
            });
        }
        Ok(Self {
            index,
            measure,
            shift,
        })
    }

    pub fn centered(index: StabilityIndex, measure: SpectralMeasureEig) -> Self {
        let shift = vec![0.0; measure.dim()];
        Self {
            index,
            measure,
            shift,
        }
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    /// The exact characteristic function at `xi`.
    pub fn cf(&self, xi: &[f64]) -> Complex64 {
        let exponent = -self.measure.log_cf_exponent(xi, self.index)
            + Complex64::new(0.0, dot(xi, &self.shift));
        exponent.exp()
    }
}

/// One draw from `S(α, H_eig, shift)` via the finite-atom series
/// representation. For α = 1 each atom carries the deterministic
/// `(2/π) log w_k` correction that absorbs the ν₁ scaling anomaly.
pub fn sample_stable_vector<R: Rng + ?Sized>(spec: &StableVectorSpec, rng: &mut R) -> Vec<f64> {
    let mut x = spec.shift.clone();
    let alpha = spec.index;
    for (r, w) in spec.measure.iter() {
        let z = sample_skewed_stable(alpha, rng);
        let coeff = if alpha.is_one() {
            w * (z + 2.0 / PI * w.ln())
        } else {
            w.powf(1.0 / alpha.value()) * z
        };
        for (xj, rj) in x.iter_mut().zip(r) {
            *xj += coeff * rj;
        }
    }
    x
}

/// `n` independent draws; draw `i` uses substream `(seed, i)`.
pub fn sample_stable_vectors(spec: &StableVectorSpec, n: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, i as u64);
            sample_stable_vector(spec, &mut rng)
        })
        .collect()
}

/// `n` independent skewed stable draws; draw `i` uses substream `(seed, i)`.
pub fn sample_skewed_stables(alpha: StabilityIndex, n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, i as u64);
            sample_skewed_stable(alpha, &mut rng)
        })
        .collect()
}

/// Empirical characteristic function `(1/n) Σ_j e^{iξ·X_j}`.
pub fn empirical_cf_vector(samples: &[Vec<f64>], xi: &[f64]) -> Result<CfEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let phases: Vec<Complex64> = samples
        .iter()
        .map(|x| Complex64::from_polar(1.0, dot(xi, x)))
        .collect();
    mean_estimate(&phases)
}

/// Empirical characteristic function of scalar samples at `u`.
pub fn empirical_cf_scalar(samples: &[f64], u: f64) -> Result<CfEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let phases: Vec<Complex64> = samples
        .iter()
        .map(|x| Complex64::from_polar(1.0, u * x))
        .collect();
    mean_estimate(&phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::E;

    fn alpha(a: f64) -> StabilityIndex {
        StabilityIndex::new(a).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn stability_index_bounds() {
        assert!(StabilityIndex::new(0.0).is_err());
        assert!(StabilityIndex::new(2.5).is_err());
        assert!(StabilityIndex::new(f64::NAN).is_err());
        assert!(StabilityIndex::new(2.0).is_ok());
        assert!(StabilityIndex::new(1e-3).is_ok());
    }

    #[test]
    fn nu_alpha_examples() {
        assert!(close(nu_alpha(3.0, alpha(2.0)), Complex64::new(9.0, 0.0), 1e-12));
        assert_eq!(nu_alpha(1.0, alpha(1.0)), Complex64::new(1.0, 0.0));
        assert!(close(nu_alpha(-1.0, alpha(0.5)), Complex64::new(1.0, 1.0), 1e-12));
        assert!(close(
            nu_alpha(E, alpha(1.0)),
            Complex64::new(E, 2.0 * E / PI),
            1e-12
        ));
        for a in [0.3, 1.0, 1.7, 2.0] {
            assert_eq!(nu_alpha(0.0, alpha(a)), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn nu_alpha_matches_principal_power_form() {
        // (−iu)^α / cos(πα/2) and (2iu/π) log(−iu) with principal branches.
        for &a in &[0.4, 0.9, 1.3, 1.9] {
            for &u in &[-2.5, -0.3, 0.7, 4.0] {
                let z = Complex64::new(0.0, -u).powf(a) / (PI * a / 2.0).cos();
                assert!(close(nu_alpha(u, alpha(a)), z, 1e-10), "a={a} u={u}");
            }
        }
        for &u in &[-2.5, -0.3, 0.7, 4.0] {
            let z = Complex64::new(0.0, 2.0 * u / PI) * Complex64::new(0.0, -u).ln();
            assert!(close(nu_alpha(u, alpha(1.0)), z, 1e-12));
        }
    }

    proptest! {
        #[test]
        fn nu_alpha_scaling_law(c in 1e-3f64..1e3, u in -50.0f64..50.0, a in 0.05f64..2.0) {
            let al = alpha(a);
            let lhs = nu_alpha(c * u, al);
            let rhs = if al.is_one() {
                c * nu_alpha(u, al) + Complex64::new(0.0, 2.0 / PI * c * u * c.ln())
            } else {
                c.powf(a) * nu_alpha(u, al)
            };
            let scale = 1.0 + lhs.norm();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }

        #[test]
        fn nu_one_scaling_law(c in 1e-3f64..1e3, u in -50.0f64..50.0) {
            let al = alpha(1.0);
            let lhs = nu_alpha(c * u, al);
            let rhs = c * nu_alpha(u, al) + Complex64::new(0.0, 2.0 / PI * c * u * c.ln());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }

        #[test]
        fn nu_alpha_real_part_is_abs_power(u in -20.0f64..20.0, a in 0.05f64..2.0) {
            let v = nu_alpha(u, alpha(a));
            let expected = if a == 1.0 { u.abs() } else { u.abs().powf(a) };
            prop_assert!((v.re - expected).abs() <= 1e-12 * (1.0 + expected));
            prop_assert!(v.re >= 0.0);
        }

        #[test]
        fn symmetrize_preserves_mass(ws in proptest::collection::vec(0.01f64..3.0, 1..6), seed in 0u64..1000) {
            let mut r = rng::master(seed);
            let atoms: Vec<Vec<f64>> = ws.iter().map(|_| {
                (0..3).map(|_| r.random::<f64>() - 0.5).collect()
            }).collect();
            let m = SpectralMeasureEig::from_directions(3, atoms, ws.clone()).unwrap();
            let s = symmetrize_measure(&m);
            prop_assert!((s.total_mass() - m.total_mass()).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_single_atom() {
        let m = SpectralMeasureEig::new(2, vec![vec![1.0, 0.0]], vec![1.0]).unwrap();
        let s = symmetrize_measure(&m);
        assert_eq!(s.atoms(), &[vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert_eq!(s.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn symmetrize_is_idempotent_on_symmetric_measures() {
        let m = SpectralMeasureEig::new(
            2,
            vec![vec![0.0, 1.0], vec![0.0, -1.0], vec![1.0, 0.0], vec![-1.0, 0.0]],
            vec![0.2, 0.2, 0.3, 0.3],
        )
        .unwrap();
        let s = symmetrize_measure(&m);
        assert_eq!(s.len(), 4);
        for (r, w) in m.iter() {
            let i = s.atoms().iter().position(|a| a.as_slice() == r).unwrap();
            assert!((s.weights()[i] - w).abs() < 1e-15);
        }
    }

    #[test]
    fn measure_validation_names_the_failure() {
        let err = SpectralMeasureEig::new(2, vec![vec![1.0, 1.0]], vec![1.0]).unwrap_err();
        assert!(err.to_string().contains("norm"));
        let err = SpectralMeasureEig::new(2, vec![vec![1.0, 0.0]], vec![0.0]).unwrap_err();
        assert!(err.to_string().contains("positive"));
        let err = SpectralMeasureEig::new(2, vec![], vec![]).unwrap_err();
        assert!(err.to_string().contains("empty"));
        let err = SpectralMeasureEig::new(3, vec![vec![1.0, 0.0]], vec![1.0]).unwrap_err();
        assert!(err.to_string().contains("length"));
    }

    #[test]
    fn measure_json_round_trip() {
        let json = r#"{"N": 2, "atoms": [[1.0, 0.0], [0.0, -1.0]], "weights": [0.25, 0.75]}"#;
        let m: SpectralMeasureEig = serde_json::from_str(json).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.weights(), &[0.25, 0.75]);
        let back: SpectralMeasureEig = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"N": 2, "atoms": [[2.0, 0.0]], "weights": [1.0]}"#;
        assert!(serde_json::from_str::<SpectralMeasureEig>(bad).is_err());
    }

    #[test]
    fn empirical_cf_edge_cases() {
        assert!(matches!(empirical_cf_vector(&[], &[1.0]), Err(Error::EmptySample)));
        let zeros = vec![vec![0.0, 0.0]; 10];
        let est = empirical_cf_vector(&zeros, &[3.0, -1.0]).unwrap();
        assert_eq!(est.value, Complex64::new(1.0, 0.0));
        assert_eq!(est.std_error, 0.0);
        let any = vec![vec![1.3, -2.0], vec![0.1, 9.0]];
        let est = empirical_cf_vector(&any, &[0.0, 0.0]).unwrap();
        assert_eq!(est.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gaussian_skewed_variance_is_two() {
        let n = 100_000;
        let z = sample_skewed_stables(alpha(2.0), n, 11);
        let (var, se) = crate::estimate::real_variance_se(&z);
        assert!((var - 2.0).abs() < 5.0 * se, "var={var} se={se}");
    }

    #[test]
    fn half_stable_is_positive() {
        let z = sample_skewed_stables(alpha(0.5), 100_000, 12);
        assert!(z.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn skewed_cf_at_one() {
        let n = 100_000;
        let tol = 4.0 / (n as f64).sqrt();
        for &a in &[0.5, 0.8, 1.0, 1.5, 2.0] {
            let z = sample_skewed_stables(alpha(a), n, 13);
            let est = empirical_cf_scalar(&z, 1.0).unwrap();
            let target = (-nu_alpha(1.0, alpha(a))).exp();
            assert!((est.value - target).norm() < tol, "alpha={a}: {:?} vs {target}", est.value);
        }
    }

    #[test]
    fn single_atom_vector_is_collinear() {
        let r = vec![0.6, -0.8];
        let m = SpectralMeasureEig::new(2, vec![r.clone()], vec![1.0]).unwrap();
        for &a in &[0.5, 1.0, 1.5] {
            let spec = StableVectorSpec::centered(alpha(a), m.clone());
            for x in sample_stable_vectors(&spec, 200, 5) {
                let norm = (x[0] * x[0] + x[1] * x[1]).sqrt();
                let cos = (x[0] * r[0] + x[1] * r[1]) / norm;
                assert!((cos.abs() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_vector_covariance() {
        let m = SpectralMeasureEig::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.5, 0.5]).unwrap();
        let spec = StableVectorSpec::centered(alpha(2.0), m);
        let xs = sample_stable_vectors(&spec, 100_000, 21);
        // Second finite difference of log CF at 0 gives the covariance:
        // −∂²/∂ξ_a∂ξ_b log φ(ξ).
        let h = 1e-3;
        let logcf = |x: f64, y: f64| spec.cf(&[x, y]).ln();
        let c11 = -(logcf(h, 0.0) - 2.0 * logcf(0.0, 0.0) + logcf(-h, 0.0)).re / (h * h);
        let c22 = -(logcf(0.0, h) - 2.0 * logcf(0.0, 0.0) + logcf(0.0, -h)).re / (h * h);
        let c12 = -(logcf(h, h) - logcf(h, -h) - logcf(-h, h) + logcf(-h, -h)).re / (4.0 * h * h);
        assert!((c11 - 1.0).abs() < 1e-6 && (c22 - 1.0).abs() < 1e-6 && c12.abs() < 1e-6);

        for (a, b, expected) in [(0usize, 0usize, c11), (1, 1, c22), (0, 1, c12)] {
            let prods: Vec<f64> = xs.iter().map(|x| x[a] * x[b]).collect();
            let (mean, se) = crate::estimate::real_mean_se(&prods);
            assert!((mean - expected).abs() < 5.0 * se, "cov[{a}{b}]={mean} se={se}");
        }
    }

    #[test]
    fn cauchy_vector_log_correction() {
        let r = vec![0.6, 0.8];
        for &w in &[0.2, 3.0] {
            let m = SpectralMeasureEig::new(2, vec![r.clone()], vec![w]).unwrap();
            let spec = StableVectorSpec::centered(alpha(1.0), m);
            let xs = sample_stable_vectors(&spec, 100_000, 31);
            let est = empirical_cf_vector(&xs, &r).unwrap();
            let target = Complex64::new((-w).exp(), 0.0);
            assert!((est.value - target).norm() < 4.0 / (1e5f64).sqrt(), "w={w}: {:?}", est.value);
        }
    }

    #[test]
    fn stable_vector_sum_is_stable() {
        // m^{-1/α} Σ_{j≤m} X_j has the same law as X for α ≠ 1.
        let m_atoms = SpectralMeasureEig::from_directions(
            2,
            vec![vec![1.0, 0.2], vec![-0.3, 1.0], vec![-1.0, -1.0]],
            vec![0.4, 0.3, 0.3],
        )
        .unwrap();
        let spec = StableVectorSpec::centered(alpha(1.5), m_atoms);
        let m = 4usize;
        let draws = sample_stable_vectors(&spec, 4 * 50_000, 41);
        let sums: Vec<Vec<f64>> = draws
            .chunks(m)
            .map(|c| {
                let mut s = vec![0.0; 2];
                for x in c {
                    s[0] += x[0];
                    s[1] += x[1];
                }
                s.iter().map(|v| v / (m as f64).powf(1.0 / 1.5)).collect()
            })
            .collect();
        for xi in [[0.5, 0.0], [0.3, -0.7], [-1.0, 0.4]] {
            let est = empirical_cf_vector(&sums, &xi).unwrap();
            assert!(est.within(spec.cf(&xi), 5.0), "xi={xi:?}: {:?} vs {}", est, spec.cf(&xi));
        }
    }
}
