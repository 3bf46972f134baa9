//! Fourier upper bound on `sup_X |p_m(X) − p_∞(X)|`:
//! `(1/c_W) ∫_W |p̂_m(S) − p̂_∞(S)| dS` with `c_W = (2π)^{dim W}` in
//! trace-orthonormal coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::{m_h_estimate, Drift, HaarAverages};
use crate::estimate::mean_estimate;
use crate::matrix::{classify_support, random_direction};
use crate::rng;
use crate::verify::rate::ExperimentConfig;
use crate::{Error, Result};

/// Proposal decay rate as a fraction of the estimated `m_H`.
pub const PROPOSAL_RATE_FRACTION: f64 = 0.5;
/// Random starts for the `m_H` search.
pub const MH_DIRECTIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBound {
    pub value: f64,
    pub std_error: f64,
    pub m_h: f64,
    pub n: usize,
}

/// Importance-sampled estimate of the Fourier bound; `m = None` stands for
/// `m = ∞` and replaces `p̂_m` by `p̂_∞`.
///
/// The proposal has density `∝ exp(−λ ρ^α)` with `ρ² = tr S²` and
/// `λ = PROPOSAL_RATE_FRACTION · m̂_H`: `ρ^α ~ Gamma(d/α, 1/λ)` along a
/// uniform direction of `W`. `config.n_samples` proposal points are used;
/// the Haar sample is drawn from `config.seed`.
pub fn density_sup_bound(config: &ExperimentConfig, m: Option<usize>) -> Result<DensityBound> {
    config.validate()?;
    let spec = &config.ensemble;
    let n = spec.dim;
    if n != 2 {
        return Err(Error::InvalidArgument(format!("density bound is implemented for N = 2, got {n}")));
    }
    if m == Some(0) {
        return Err(Error::InvalidArgument("m must be >= 1".into()));
    }
    if config.n_samples == 0 {
        return Err(Error::EmptySample);
    }
    let case = classify_support(&spec.measure);
    if !case.is_workspace() {
        return Err(Error::UnsupportedWorkspace(format!(
            "density bound needs FullHerm or TracelessHyperplane, got {}",
            case.tag
        )));
    }
    let d = case.matrix_dim() as f64;
    let a = spec.alpha.value();
    let haar = config.haar_sample()?;
    let m_h = m_h_estimate(&spec.measure, spec.alpha, &case, MH_DIRECTIONS, &haar)?;
    if !(m_h > 0.0) {
        return Err(Error::OutOfRegime(format!("m_H estimate {m_h} is not positive")));
    }
    let lambda = PROPOSAL_RATE_FRACTION * m_h;
    let shape = d / a;
    let gamma = Gamma::new(shape, 1.0 / lambda)
        .map_err(|e| Error::InvalidArgument(format!("proposal: {e}")))?;
    let log_z = (2.0f64).ln() + (d / 2.0) * PI.ln() - libm::lgamma(d / 2.0) + libm::lgamma(shape)
        - a.ln()
        - shape * lambda.ln();
    let log_cw = d * (2.0 * PI).ln();

    let Some(m) = m else {
        return Ok(DensityBound {
            value: 0.0,
            std_error: 0.0,
            m_h,
            n: config.n_samples,
        });
    };

    let values: Vec<Complex64> = (0..config.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(config.seed ^ 0x5eed_de75, i as u64);
            let g: f64 = gamma.sample(&mut r);
            let rho = g.powf(1.0 / a);
            let dir = random_direction(n, case.tag, &mut r)?;
            let eigs: Vec<f64> = dir.scale(rho).eigenvalues();
            let avg = HaarAverages::from_eigenvalues(&eigs, &spec.measure, spec.alpha, &haar)?;
            let gap = (avg.cf_m(m, Drift::Included).value - avg.cf_infinity().value).norm();
            let weight = (log_z + lambda * g - log_cw).exp();
            Ok(Complex64::new(gap * weight, 0.0))
        })
        .collect::<Result<_>>()?;
    let est = mean_estimate(&values)?;
    Ok(DensityBound {
        value: est.value.re,
        std_error: est.std_error,
        m_h,
        n: config.n_samples,
    })
}
