//! Haar-averaged characteristic functions of the ensemble and its limit.
//!
//! For a test matrix `S` and Haar unitaries `U`, everything is built from
//! `w_α(U S U†) = Σ_k w_k ν_α(Σ_j r_{k,j} (U S U†)_{jj})`:
//! `p̂_∞(S) = exp(−⟨w⟩)`, `p̂_m(S) = ⟨exp(−w/m)⟩^m`, the variance
//! `v(S) = ⟨w²⟩ − ⟨w⟩²` and `D = m·Log⟨exp(−w/m)⟩ + ⟨w⟩`.
//! All of them are evaluated on one caller-supplied [`HaarSample`] so that
//! differences between them keep no first-order Monte Carlo noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{compensated_sum, mean_estimate, CfEstimate};
use crate::matrix::{sample_haar_batch, HermitianMatrix, SupportCase, SupportTag, UnitaryMatrix};
use crate::rng;
use crate::stable::{dot, nu_alpha, SpectralMeasureEig, StabilityIndex};
use crate::{Error, Result};

/// Smallest `|r̂_m|` for which `Log r̂_m` is taken.
pub const R_HAT_FLOOR: f64 = 1e-8;

/// A fixed set of Haar unitaries shared by all averages `⟨·⟩`.
#[derive(Debug, Clone)]
pub struct HaarSample {
    dim: usize,
    unitaries: Vec<UnitaryMatrix>,
    seed: u64,
    // |u_{ja}|², row-major per unitary.
    moduli: Vec<Vec<f64>>,
}

impl HaarSample {
    /// `n` unitaries, unitary `i` drawn from substream `(seed, i)`.
    pub fn generate(dim: usize, n: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("Haar dimension must be positive".into()));
        }
        if n == 0 {
            return Err(Error::EmptySample);
        }
        Self::from_unitaries(sample_haar_batch(dim, n, seed), seed)
    }

    pub fn from_unitaries(unitaries: Vec<UnitaryMatrix>, seed: u64) -> Result<Self> {
        let dim = unitaries.first().ok_or(Error::EmptySample)?.dim();
        if let Some(bad) = unitaries.iter().find(|u| u.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let moduli = unitaries
            .par_iter()
            .map(|u| u.entries().iter_row_major_norms())
            .collect();
        Ok(Self {
            dim,
            unitaries,
            seed,
            moduli,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn unitaries(&self) -> &[UnitaryMatrix] {
        &self.unitaries
    }

    /// `diag(U S U†)` for every unitary of the sample.
    pub fn diagonal_profiles(&self, s: &HermitianMatrix) -> Result<Vec<Vec<f64>>> {
        self.check_dim(s.dim())?;
        if let Some(c) = scalar_multiple_of_identity(s) {
            return Ok(vec![vec![c; self.dim]; self.len()]);
        }
        Ok(self.unitaries.par_iter().map(|u| s.conjugated_diagonal(u)).collect())
    }

    /// `diag(U diag(s) U†)_j = Σ_a |u_{ja}|² s_a` for every unitary.
    pub fn eigen_profiles(&self, eigs: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(eigs.len())?;
        if eigs.iter().all(|&x| x == eigs[0]) {
            return Ok(vec![eigs.to_vec(); self.len()]);
        }
        Ok(self
            .moduli
            .par_iter()
            .map(|q| eigen_profile(q, eigs))
            .collect())
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

trait RowMajorNorms {
    fn iter_row_major_norms(&self) -> Vec<f64>;
}

impl RowMajorNorms for nalgebra::DMatrix<Complex64> {
    fn iter_row_major_norms(&self) -> Vec<f64> {
        let n = self.nrows();
        let mut out = Vec::with_capacity(n * self.ncols());
        for j in 0..n {
            for a in 0..self.ncols() {
                out.push(self[(j, a)].norm_sqr());
            }
        }
        out
    }
}

fn eigen_profile(q: &[f64], eigs: &[f64]) -> Vec<f64> {
    let n = eigs.len();
    (0..n)
        .map(|j| (0..n).map(|a| q[j * n + a] * eigs[a]).sum())
        .collect()
}

fn scalar_multiple_of_identity(s: &HermitianMatrix) -> Option<f64> {
    let n = s.dim();
    let c = s.get(0, 0).re;
    for j in 0..n {
        for k in 0..n {
            let want = if j == k { c } else { 0.0 };
            if s.get(j, k) != Complex64::new(want, 0.0) {
                return None;
            }
        }
    }
    Some(c)
}

/// `Σ_k w_k ν_α(r_k · d)` for a diagonal profile `d`.
pub fn w_alpha_diag(diag: &[f64], measure: &SpectralMeasureEig, alpha: StabilityIndex) -> Complex64 {
    measure
        .iter()
        .map(|(r, w)| w * nu_alpha(dot(r, diag), alpha))
        .sum()
}

/// `w_α(X) = Σ_k w_k ν_α(Σ_j r_{k,j} X_jj)`.
pub fn w_alpha(x: &HermitianMatrix, measure: &SpectralMeasureEig, alpha: StabilityIndex) -> Result<Complex64> {
    if x.dim() != measure.dim() {
        return Err(Error::DimensionMismatch {
            expected: measure.dim(),
            found: x.dim(),
        });
    }
    Ok(w_alpha_diag(&x.diagonal(), measure, alpha))
}

/// Bound on `|w_α(X)|` for probability measures, increasing in `tr X²`.
pub fn w_alpha_abs_bound(x: &HermitianMatrix, alpha: StabilityIndex) -> f64 {
    let t = x.trace_sq();
    let a = alpha.value();
    if alpha.is_one() {
        if t == 0.0 {
            return 0.0;
        }
        t.sqrt() * (1.0 + (t.ln() / PI).powi(2)).sqrt()
    } else {
        t.powf(a / 2.0) / (PI * a / 2.0).cos().abs()
    }
}

/// Whether the `α = 1` drift `−(2 t₀ log m/π) I` is part of `Y_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Drift {
    Included,
    /// Diagnostic: the uncorrected sum.
    Omitted,
}

/// `exp(z) − 1` without cancellation for small `z`.
pub(crate) fn cexpm1(z: Complex64) -> Complex64 {
    let half_sin = (z.im / 2.0).sin();
    let cos_m1 = -2.0 * half_sin * half_sin;
    Complex64::new(
        z.re.exp_m1() * z.im.cos() + cos_m1,
        z.re.exp() * z.im.sin(),
    )
}

/// Principal `Log(1 + z)` without cancellation for small `z`.
pub(crate) fn clog1p(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
    Complex64::new(re, z.im.atan2(1.0 + z.re))
}

/// Per-unitary values of `w_α(U S U†)` for one test matrix, from which all
/// Haar averages of this module are formed.
#[derive(Debug, Clone)]
pub struct HaarAverages {
    alpha: StabilityIndex,
    w: Vec<Complex64>,
    // (Σ_k w_k r_k)·diag(U S U†); enters the α = 1 scaling anomaly.
    linear: Vec<f64>,
    trace: f64,
    t0: f64,
    mean_w: CfEstimate,
}

impl HaarAverages {
    pub fn new(
        s: &HermitianMatrix,
        measure: &SpectralMeasureEig,
        alpha: StabilityIndex,
        haar: &HaarSample,
    ) -> Result<Self> {
        check_measure(measure, haar)?;
        let profiles = haar.diagonal_profiles(s)?;
        Self::from_profiles(&profiles, s.trace(), measure, alpha)
    }

    /// Averages at `S = diag(eigs)` (equal in law to any `S` with this
    /// spectrum, by unitary invariance).
    pub fn from_eigenvalues(
        eigs: &[f64],
        measure: &SpectralMeasureEig,
        alpha: StabilityIndex,
        haar: &HaarSample,
    ) -> Result<Self> {
        check_measure(measure, haar)?;
        let profiles = haar.eigen_profiles(eigs)?;
        Self::from_profiles(&profiles, eigs.iter().sum(), measure, alpha)
    }

    fn from_profiles(
        profiles: &[Vec<f64>],
        trace: f64,
        measure: &SpectralMeasureEig,
        alpha: StabilityIndex,
    ) -> Result<Self> {
        let n = measure.dim();
        let mean_atom: Vec<f64> = (0..n)
            .map(|j| measure.iter().map(|(r, w)| w * r[j]).sum())
            .collect();
        let (w, linear): (Vec<Complex64>, Vec<f64>) = profiles
            .par_iter()
            .map(|d| (w_alpha_diag(d, measure, alpha), dot(&mean_atom, d)))
            .unzip();
        let mean_w = mean_estimate(&w)?;
        Ok(Self {
            alpha,
            w,
            linear,
            trace,
            t0: crate::matrix::t_zero(measure),
            mean_w,
        })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn w_values(&self) -> &[Complex64] {
        &self.w
    }

    /// `⟨w_α(U S U†)⟩`.
    pub fn mean_w(&self) -> CfEstimate {
        self.mean_w
    }

    /// `p̂_∞(S) = exp(−⟨w⟩)`.
    pub fn cf_infinity(&self) -> CfEstimate {
        let value = (-self.mean_w.value).exp();
        CfEstimate {
            value,
            std_error: value.norm() * self.mean_w.std_error,
            n: self.len(),
        }
    }

    /// `⟨exp(−w/m)⟩ − 1` and the per-unitary terms `exp(−w/m) − 1`.
    fn r_hat_minus_one(&self, m: usize) -> (Complex64, Vec<Complex64>) {
        let inv = 1.0 / m as f64;
        let terms: Vec<Complex64> = self.w.iter().map(|w| cexpm1(-w * inv)).collect();
        let mean = compensated_sum(terms.iter().copied()) / self.len() as f64;
        (mean, terms)
    }

    /// `r̂_m(S) = ⟨exp(−w/m)⟩`.
    pub fn r_hat(&self, m: usize) -> CfEstimate {
        let (mean, terms) = self.r_hat_minus_one(m);
        CfEstimate {
            value: Complex64::new(1.0, 0.0) + mean,
            std_error: crate::estimate::std_error_of_mean(&terms, mean),
            n: self.len(),
        }
    }

    /// Exact characteristic function of `Y_m` at `S`, expressed through the
    /// Haar sample: `⟨exp(−w(m^{-1/α}USU†))⟩^m` times the drift phase.
    /// For `α ≠ 1`, or for `α = 1` with a mean atom proportional to
    /// `(1,…,1)` and the drift included, this is `r̂_m(S)^m`.
    pub fn cf_m(&self, m: usize, drift: Drift) -> CfEstimate {
        let mf = m as f64;
        let (exponent, terms) = if self.alpha.is_one() {
            // ν₁(u/m) = ν₁(u)/m − (2i/π)(log m/m) u.
            let anomaly = 2.0 * mf.ln() / (PI * mf);
            let terms: Vec<Complex64> = self
                .w
                .iter()
                .zip(&self.linear)
                .map(|(w, l)| cexpm1(-w / mf + Complex64::new(0.0, anomaly * l)))
                .collect();
            let mean = compensated_sum(terms.iter().copied()) / self.len() as f64;
            let mut exponent = mf * clog1p(mean);
            if drift == Drift::Included {
                exponent -= Complex64::new(0.0, 2.0 * self.t0 * mf.ln() * self.trace / PI);
            }
            (exponent, (mean, terms))
        } else {
            let (mean, terms) = self.r_hat_minus_one(m);
            (mf * clog1p(mean), (mean, terms))
        };
        let (mean, terms) = terms;
        let value = exponent.exp();
        let base = (Complex64::new(1.0, 0.0) + mean).norm();
        let se_base = crate::estimate::std_error_of_mean(&terms, mean);
        let std_error = if base > 0.0 {
            value.norm() * mf * se_base / base
        } else {
            0.0
        };
        CfEstimate {
            value,
            std_error,
            n: self.len(),
        }
    }

    /// `v(S) = ⟨w²⟩ − ⟨w⟩²`.
    pub fn variance_v(&self) -> CfEstimate {
        let mean = self.mean_w.value;
        let sq: Vec<Complex64> = self.w.iter().map(|w| (w - mean).powi(2)).collect();
        mean_estimate(&sq).expect("non-empty by construction")
    }

    /// `D = m·Log r̂_m(S) + ⟨w⟩`, principal branch.
    pub fn d_term(&self, m: usize) -> Result<CfEstimate> {
        let mf = m as f64;
        let (mean, terms) = self.r_hat_minus_one(m);
        let r_hat = Complex64::new(1.0, 0.0) + mean;
        if r_hat.norm() <= R_HAT_FLOOR {
            return Err(Error::OutOfRegime(format!(
                "|r̂_m| = {:e} ≤ {R_HAT_FLOOR:e} at m = {m}",
                r_hat.norm()
            )));
        }
        let w_bar = self.mean_w.value;
        let value = mf * clog1p(mean) + w_bar;
        let n = self.len();
        let ss: f64 = terms
            .iter()
            .zip(&self.w)
            .map(|(e, w)| ((mf / r_hat) * (e - mean) + (w - w_bar)).norm_sqr())
            .sum();
        let std_error = if n > 1 {
            (ss / (n as f64 * (n - 1) as f64)).sqrt()
        } else {
            0.0
        };
        Ok(CfEstimate { value, std_error, n })
    }
}

fn check_measure(measure: &SpectralMeasureEig, haar: &HaarSample) -> Result<()> {
    if measure.dim() != haar.dim() {
        return Err(Error::DimensionMismatch {
            expected: haar.dim(),
            found: measure.dim(),
        });
    }
    Ok(())
}

pub fn haar_mean_w(
    s: &HermitianMatrix,
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
) -> Result<CfEstimate> {
    Ok(HaarAverages::new(s, measure, alpha, haar)?.mean_w())
}

pub fn cf_infinity(
    s: &HermitianMatrix,
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
) -> Result<CfEstimate> {
    Ok(HaarAverages::new(s, measure, alpha, haar)?.cf_infinity())
}

/// Characteristic function of `Y_m` (drift included), see [`HaarAverages::cf_m`].
pub fn cf_m(
    s: &HermitianMatrix,
    m: usize,
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
) -> Result<CfEstimate> {
    cf_m_with_drift(s, m, measure, alpha, haar, Drift::Included)
}

pub fn cf_m_with_drift(
    s: &HermitianMatrix,
    m: usize,
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
    drift: Drift,
) -> Result<CfEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be >= 1".into()));
    }
    Ok(HaarAverages::new(s, measure, alpha, haar)?.cf_m(m, drift))
}

pub fn variance_v(
    s: &HermitianMatrix,
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
) -> Result<CfEstimate> {
    Ok(HaarAverages::new(s, measure, alpha, haar)?.variance_v())
}

pub fn d_term(
    s: &HermitianMatrix,
    m: usize,
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
) -> Result<CfEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be >= 1".into()));
    }
    HaarAverages::new(s, measure, alpha, haar)?.d_term(m)
}

/// `⟨Re w_α(U diag(s) U†)⟩`.
pub fn mean_re_w_at(
    eigs: &[f64],
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
) -> Result<f64> {
    check_measure(measure, haar)?;
    let profiles = haar.eigen_profiles(eigs)?;
    let re: Vec<Complex64> = profiles
        .par_iter()
        .map(|d| Complex64::new(w_alpha_diag(d, measure, alpha).re, 0.0))
        .collect();
    Ok(compensated_sum(re).re / haar.len() as f64)
}

/// Result of the `m_H` search: the smallest `⟨Re w⟩` found on the unit
/// sphere of the workspace and the spectrum where it was attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhEstimate {
    pub value: f64,
    pub eigenvalues: Vec<f64>,
}

const MH_DESCENT_STEPS: usize = 100;
const MH_INITIAL_STEP: f64 = 0.25;

/// Upper estimate of `m_H = inf_{S ∈ W, tr S² = 1} ⟨Re w_α(USU†)⟩`.
///
/// The Haar average depends on `S` only through its spectrum, so the search
/// runs over unit spectra in `R^N` (or `R^N_0` for the traceless
/// workspace): random starts plus the canonical directions, then projected
/// coordinate descent from the best start.
pub fn m_h_search(
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    workspace: &SupportCase,
    n_directions: usize,
    haar: &HaarSample,
) -> Result<MhEstimate> {
    let traceless = match workspace.tag {
        SupportTag::FullHerm => false,
        SupportTag::TracelessHyperplane => true,
        other => {
            return Err(Error::UnsupportedWorkspace(format!(
                "m_H needs FullHerm or TracelessHyperplane, got {other}"
            )))
        }
    };
    let n = measure.dim();
    if workspace.dim != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: workspace.dim,
        });
    }
    if traceless && n < 2 {
        return Err(Error::UnsupportedWorkspace("traceless workspace needs N >= 2".into()));
    }
    let project = |s: &mut Vec<f64>| -> bool {
        if traceless {
            let mean = s.iter().sum::<f64>() / n as f64;
            s.iter_mut().for_each(|x| *x -= mean);
        }
        let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return false;
        }
        s.iter_mut().for_each(|x| *x /= norm);
        true
    };
    let objective = |s: &[f64]| mean_re_w_at(s, measure, alpha, haar);

    let mut starts: Vec<Vec<f64>> = Vec::new();
    if !traceless {
        starts.push(vec![1.0 / (n as f64).sqrt(); n]);
    }
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[j] = sign;
            if project(&mut e) {
                starts.push(e);
            }
        }
    }
    let mut rng = rng::substream(haar.seed() ^ 0x6d5f_485f_7365_6172, 0);
    for _ in 0..n_directions {
        let mut s: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if project(&mut s) {
            starts.push(s);
        }
    }

    let mut best_s = starts[0].clone();
    let mut best = objective(&best_s)?;
    for s in starts.iter().skip(1) {
        let f = objective(s)?;
        if f < best {
            best = f;
            best_s = s.clone();
        }
    }

    let mut step = MH_INITIAL_STEP;
    for _ in 0..MH_DESCENT_STEPS {
        let mut improved = false;
        for j in 0..n {
            for sign in [1.0, -1.0] {
                let mut trial = best_s.clone();
                trial[j] += sign * step;
                if !project(&mut trial) {
                    continue;
                }
                let f = objective(&trial)?;
                if f < best {
                    best = f;
                    best_s = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
        if best == 0.0 {
            break;
        }
    }
    Ok(MhEstimate {
        value: best,
        eigenvalues: best_s,
    })
}

pub fn m_h_estimate(
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    workspace: &SupportCase,
    n_directions: usize,
    haar: &HaarSample,
) -> Result<f64> {
    m_h_search(measure, alpha, workspace, n_directions, haar).map(|r| r.value)
}

/// The orbital measure: `+e⁽ʲ⁾` with weight `t/(2N)` and `−e⁽ʲ⁾` with weight
/// `(1−t)/(2N)`. Zero-weight families are dropped, so the total mass is `1/2`.
pub fn orbital_measure(t: f64, n: usize) -> Result<SpectralMeasureEig> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("orbital parameter t must lie in [0, 1], got {t}")));
    }
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for (sign, w) in [(1.0, t), (-1.0, 1.0 - t)] {
        if w <= 0.0 {
            continue;
        }
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = sign;
            atoms.push(e);
            weights.push(w / (2 * n) as f64);
        }
    }
    SpectralMeasureEig::new(n, atoms, weights)
}

/// Closed form of `w_α(U S₀ U†)` for the orbital measure, `S₀ = diag(1,0,…,0)`,
/// in terms of the first column `u` of `U`:
/// `(1/(2N)) Σ_j |u_j|^{2α} (1 − i(2t−1) tan(πα/2))` for `α ≠ 1`, and
/// `(1/(2N)) (1 + (4i/π)(2t−1) Σ_j |u_j|² log|u_j|)` for `α = 1`.
pub fn w_on_rank_one(u_col: &[Complex64], t: f64, alpha: StabilityIndex) -> Result<Complex64> {
    let n = u_col.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty column".into()));
    }
    let norm = u_col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("column must have unit norm, got {norm}")));
    }
    let pre = 1.0 / (2 * n) as f64;
    let skew = 2.0 * t - 1.0;
    let a = alpha.value();
    if alpha.is_one() {
        let s: f64 = u_col
            .iter()
            .map(|z| {
                let q = z.norm_sqr();
                if q > 0.0 {
                    0.5 * q * q.ln()
                } else {
                    0.0
                }
            })
            .sum();
        Ok(pre * Complex64::new(1.0, 4.0 * skew * s / PI))
    } else {
        let s: f64 = u_col.iter().map(|z| z.norm_sqr().powf(a)).sum();
        Ok(pre * s * Complex64::new(1.0, -skew * (PI * a / 2.0).tan()))
    }
}

/// Uniform random probability measure with `k` atoms in `R^n`, for tests.
pub fn random_probability_measure<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> SpectralMeasureEig {
    loop {
        let dirs: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut *rng)).collect())
            .collect();
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        if let Ok(m) = SpectralMeasureEig::from_directions(n, dirs, weights) {
            return m;
        }
    }
}
