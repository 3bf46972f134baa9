//! Variances of the first-column Haar moments
//! `A = Σ_j |u_{j1}|^{2α}` and `B = Σ_j |u_{j1}|² log|u_{j1}|`.

use serde::{Deserialize, Serialize};

use crate::charfn::HaarSample;
use crate::estimate::real_variance_se;
use crate::stable::StabilityIndex;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentVariances {
    pub var_a: f64,
    pub se_a: f64,
    pub var_b: f64,
    pub se_b: f64,
}

pub fn u_moment_variance(n: usize, alpha: StabilityIndex, n_haar: usize, seed: u64) -> Result<MomentVariances> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if n == 1 {
        // |u₁₁| = 1: both moments are constant.
        return Ok(MomentVariances {
            var_a: 0.0,
            se_a: 0.0,
            var_b: 0.0,
            se_b: 0.0,
        });
    }
    let haar = HaarSample::generate(n, n_haar, seed)?;
    let a = alpha.value();
    let (va, vb): (Vec<f64>, Vec<f64>) = haar
        .unitaries()
        .iter()
        .map(|u| {
            let col = u.column(0);
            let sa: f64 = col.iter().map(|z| z.norm_sqr().powf(a)).sum();
            let sb: f64 = col
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
            (sa, sb)
        })
        .unzip();
    let (var_a, se_a) = real_variance_se(&va);
    let (var_b, se_b) = real_variance_se(&vb);
    Ok(MomentVariances {
        var_a,
        se_a,
        var_b,
        se_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn alpha(a: f64) -> StabilityIndex {
        StabilityIndex::new(a).unwrap()
    }

    #[test]
    fn single_dimension_is_constant() {
        let v = u_moment_variance(1, alpha(1.3), 100, 1).unwrap();
        assert_eq!((v.var_a, v.var_b), (0.0, 0.0));
    }

    #[test]
    fn gaussian_case_against_quadrature() {
        // q = |u₁₁|² uniform: A = q² + (1−q)².
        let m1 = integrate(|q| q * q + (1.0 - q).powi(2), 0.0, 1.0, 1, 8);
        let m2 = integrate(|q| (q * q + (1.0 - q).powi(2)).powi(2), 0.0, 1.0, 1, 8);
        let oracle = m2 - m1 * m1;
        assert!((oracle - 1.0 / 45.0).abs() < 1e-15);
        let v = u_moment_variance(2, alpha(2.0), 100_000, 2).unwrap();
        assert!((v.var_a - oracle).abs() < 5.0 * v.se_a, "{v:?}");
    }

    #[test]
    fn log_moment_variance_against_quadrature() {
        let b = |q: f64| {
            let f = |x: f64| if x > 0.0 { 0.5 * x * x.ln() } else { 0.0 };
            f(q) + f(1.0 - q)
        };
        let m1 = integrate(b, 0.0, 1.0, 64, 20);
        let m2 = integrate(|q| b(q).powi(2), 0.0, 1.0, 64, 20);
        let oracle = m2 - m1 * m1;
        let v = u_moment_variance(2, alpha(1.5), 100_000, 3).unwrap();
        assert!(oracle > 0.0);
        assert!((v.var_b - oracle).abs() < 5.0 * v.se_b, "{v:?} vs {oracle}");
    }

    #[test]
    fn positive_for_small_dimensions() {
        for n in 2..=4 {
            for a in [0.5, 1.5, 2.0] {
                let v = u_moment_variance(n, alpha(a), 10_000, 4).unwrap();
                assert!(v.var_a > 5.0 * v.se_a, "N={n} alpha={a}: {v:?}");
                assert!(v.var_b > 5.0 * v.se_b, "N={n} alpha={a}: {v:?}");
            }
        }
    }
}
