//! The `N = 2`, `α = 2` traceless ensemble, whose characteristic function is
//! known in closed form.
//!
//! `Y_m = m^{-1/2} Σ_j x_j U_j diag(1,−1) U_j†` with standard normal `x_j`.
//! At `S` with eigenvalues `(s, −s)`, `tr(S U diag(1,−1) U†) = 2s(2q−1)` with
//! `q = |u₁₁|²` uniform, which gives
//! `p̂_m(S) = (√(π/8) erf(√2 s/√m) / (s/√m))^m`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{mean_estimate, CfEstimate};
use crate::matrix::sample_haar_unitary;
use crate::rng;
use crate::{Error, Result};

pub fn gaussian_closed_form_cf(s: f64, m: usize) -> f64 {
    assert!(m >= 1, "m must be positive");
    if s == 0.0 {
        return 1.0;
    }
    let scaled = s.abs() / (m as f64).sqrt();
    let base = (PI / 8.0).sqrt() * libm::erf(2f64.sqrt() * scaled) / scaled;
    (m as f64 * base.ln()).exp()
}

/// One draw of `Y₁₁ − Y₂₂` for the literal construction; the pairing with
/// `S = diag(s, −s)` is `s·(Y₁₁ − Y₂₂)`.
fn diagonal_gap<R: rand::Rng + ?Sized>(m: usize, rng: &mut R) -> f64 {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]));
    let mut gap = 0.0;
    for _ in 0..m {
        let u = sample_haar_unitary(2, rng);
        let x: f64 = StandardNormal.sample(rng);
        let y = u.entries() * &d * u.entries().adjoint();
        gap += x * (y[(0, 0)].re - y[(1, 1)].re);
    }
    gap / (m as f64).sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianRow {
    pub m: usize,
    pub s: f64,
    pub empirical: CfEstimate,
    pub closed_form: f64,
    pub deviation: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianReport {
    pub rows: Vec<GaussianRow>,
    pub n_samples: usize,
    pub seed: u64,
    /// `5/√n_samples`.
    pub tolerance: f64,
}

impl GaussianReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| !r.flagged)
    }
}

/// Empirical CF of the literal construction against the closed form.
/// Samples for the `k`-th entry of `m_list` use substreams `(seed, k·2³² + i)`.
pub fn gaussian_oracle_experiment(
    m_list: &[usize],
    s_grid: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<GaussianReport> {
    if n_samples == 0 {
        return Err(Error::EmptySample);
    }
    if m_list.contains(&0) {
        return Err(Error::InvalidArgument("m values must be >= 1".into()));
    }
    let tolerance = 5.0 / (n_samples as f64).sqrt();
    let mut rows = Vec::new();
    for (k, &m) in m_list.iter().enumerate() {
        let gaps: Vec<f64> = (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::substream(seed, ((k as u64) << 32) | i as u64);
                diagonal_gap(m, &mut r)
            })
            .collect();
        for &s in s_grid {
            let phases: Vec<Complex64> = gaps.iter().map(|g| Complex64::from_polar(1.0, s * g)).collect();
            let empirical = mean_estimate(&phases)?;
            let closed_form = gaussian_closed_form_cf(s, m);
            let deviation = (empirical.value - closed_form).norm();
            rows.push(GaussianRow {
                m,
                s,
                empirical,
                closed_form,
                deviation,
                flagged: deviation >= tolerance,
            });
        }
    }
    Ok(GaussianReport {
        rows,
        n_samples,
        seed,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        for m in [1, 5, 100] {
            assert_eq!(gaussian_closed_form_cf(0.0, m), 1.0);
        }
        // √(π/8)·erf(√2) from a 30-digit reference value of erf(√2).
        let erf_sqrt2 = 0.954_499_736_103_641_585_599_892_549_1;
        let want = (PI / 8.0).sqrt() * erf_sqrt2;
        assert!((gaussian_closed_form_cf(1.0, 1) - want).abs() < 1e-14);
        assert!((gaussian_closed_form_cf(1.0, 1) - 0.5981).abs() < 1e-4);
        for s in [0.3f64, 1.0, 2.0] {
            let limit = (-2.0 * s * s / 3.0).exp();
            assert!((gaussian_closed_form_cf(s, 1_000_000) - limit).abs() < 1e-5);
        }
        // Even in s.
        assert_eq!(gaussian_closed_form_cf(-0.7, 3), gaussian_closed_form_cf(0.7, 3));
    }

    #[test]
    fn closed_form_matches_quadrature_of_its_definition() {
        for (s, m) in [(0.5, 1usize), (1.0, 4), (2.0, 16)] {
            let base = crate::quad::integrate(
                |y| 0.5 * (-2.0 * s * s * y * y / m as f64).exp(),
                -1.0,
                1.0,
                4,
                20,
            );
            assert!((base.powi(m as i32) - gaussian_closed_form_cf(s, m)).abs() < 1e-13);
        }
    }

    #[test]
    fn experiment_at_zero_is_exact() {
        let rep = gaussian_oracle_experiment(&[1], &[0.0], 100, 1).unwrap();
        assert_eq!(rep.rows[0].empirical.value, Complex64::new(1.0, 0.0));
        assert_eq!(rep.rows[0].empirical.std_error, 0.0);
    }

    #[test]
    fn experiment_approaches_limit() {
        let rep = gaussian_oracle_experiment(&[1, 4, 64], &[1.0], 20_000, 2).unwrap();
        let limit = (-2.0f64 / 3.0).exp();
        let gaps: Vec<f64> = rep.rows.iter().map(|r| (r.empirical.value.re - limit).abs()).collect();
        assert!(gaps[0] > gaps[2], "{gaps:?}");
        assert!(rep.passed(), "{:?}", rep.max_deviation());
    }
}
