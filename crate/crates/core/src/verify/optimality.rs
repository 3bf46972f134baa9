//! The Fourier-side test function and the integral
//! `I_ε = ∫ dS φ̂_ε(S) exp(−⟨w_α(USU†)⟩) v(S)` whose `ε → 0` limit
//! `c̃ · exp(−⟨w(S₀)⟩) · v(S₀)` witnesses that the `1/m` rate is sharp.
//!
//! `dS` here is the Lebesgue measure on the independent real entries
//! (`X_jj`, `Re X_jk`, `Im X_jk` for `j < k`), for which the
//! eigenvalue-coordinate Jacobian is `(∏_j π^{j−1}/j!) Δ²(s)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::charfn::{orbital_measure, HaarAverages, HaarSample};
use crate::estimate::{mean_estimate, CfEstimate};
use crate::quad::integrate;
use crate::rng;
use crate::stable::StabilityIndex;
use crate::{Error, Result};

/// `c = 1 / ∫_{−1}^{1} cos^{2N−1}(πu/2) du`.
pub fn window_norm(n: usize) -> f64 {
    let p = (2 * n - 1) as i32;
    1.0 / integrate(|u| (PI * u / 2.0).cos().powi(p), -1.0, 1.0, 8, 20)
}

/// `(2πc/ε) cos^{2N−1}(π(s−κ)/(2ε))` on `(κ−ε, κ+ε)`, zero elsewhere.
pub fn zeta_hat(s: f64, eps: f64, kappa: f64, n: usize) -> f64 {
    zeta_hat_with_norm(s, eps, kappa, n, window_norm(n))
}

fn zeta_hat_with_norm(s: f64, eps: f64, kappa: f64, n: usize, c: f64) -> f64 {
    assert!(eps > 0.0, "window width must be positive");
    let x = (s - kappa) / eps;
    if x.abs() >= 1.0 {
        return 0.0;
    }
    2.0 * PI * c / eps * (PI * x / 2.0).cos().powi((2 * n - 1) as i32)
}

/// Permanent by Ryser's inclusion–exclusion formula.
pub fn permanent(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent needs a square matrix");
    if n == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for subset in 1u64..(1u64 << n) {
        let mut prod = 1.0;
        for i in 0..n {
            let row: f64 = (0..n).filter(|j| subset >> j & 1 == 1).map(|j| m[(i, j)]).sum();
            prod *= row;
        }
        let sign = if (n - subset.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * prod;
    }
    total
}

/// `perm[ζ̂_{ε,1}(s_a) | ζ̂_{ε,ε}(s_a) ×(N−1)] / (N! ε^{(N−1)(N−2)})`.
pub fn phi_hat(eigs: &[f64], eps: f64) -> f64 {
    let n = eigs.len();
    assert!((1..=6).contains(&n), "phi_hat supports 1 <= N <= 6");
    let c = window_norm(n);
    let m = DMatrix::from_fn(n, n, |a, b| {
        let kappa = if b == 0 { 1.0 } else { eps };
        zeta_hat_with_norm(eigs[a], eps, kappa, n, c)
    });
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    // Entries are nonnegative, so a negative Ryser sum is cancellation residue.
    permanent(&m).max(0.0) / (factorial * eps.powi(((n - 1) * (n.saturating_sub(2))) as i32))
}

fn weyl_prefactor(n: usize) -> f64 {
    (1..=n)
        .map(|j| PI.powi(j as i32 - 1) / (1..=j).map(|k| k as f64).product::<f64>())
        .product()
}

/// `c̃ = (∏_j π^{j−1}/j!) ∫ Δ²(s₂,…,s_N) ∏_j 2πc cos^{2N−1}(πs_j/2) ds`,
/// with the `(N−1)`-fold integral reduced to a Hankel determinant of window
/// moments (Andréief).
pub fn tilde_c(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    let c = window_norm(n);
    let p = (2 * n - 1) as i32;
    let k = n - 1;
    let moment = |r: usize| {
        integrate(
            |u| u.powi(r as i32) * 2.0 * PI * c * (PI * u / 2.0).cos().powi(p),
            -1.0,
            1.0,
            8,
            20,
        )
    };
    let hankel = DMatrix::from_fn(k, k, |i, j| moment(i + j));
    let det = if k == 0 { 1.0 } else { hankel.determinant() };
    let k_factorial: f64 = (1..=k).map(|v| v as f64).product();
    weyl_prefactor(n) * 2.0 * PI * k_factorial * det
}

/// Draw from the density `c cos³(πx/2)` on `(−1, 1)` by inverting its CDF:
/// with `y = sin(πx/2)`, `y − y³/3 = 4u/3 − 2/3`.
fn sample_window_cos3<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let b = 4.0 * u / 3.0 - 2.0 / 3.0;
    let y = 2.0 * ((-1.5 * b).clamp(-1.0, 1.0).acos() / 3.0 - 2.0 * PI / 3.0).cos();
    2.0 / PI * y.clamp(-1.0, 1.0).asin()
}

/// Monte Carlo estimate of `I_ε` for `N = 2` and the orbital measure with
/// parameter `t`.
///
/// Eigenvalues are drawn as `s₁ = 1 + εx₁`, `s₂ = ε + εx₂` with `x_i` from
/// the normalised window density, so the window weight integrates exactly
/// and `I_ε = (π/2)(2π)² E[Δ²(s) f(diag s)]` with
/// `f = exp(−⟨w⟩)·v`. The same `seed` gives the same `x` points for every
/// `ε`. The standard error is conditional on the Haar sample.
pub fn estimate_i_epsilon(
    eps: f64,
    t: f64,
    alpha: StabilityIndex,
    n: usize,
    n_mc: usize,
    haar: &HaarSample,
    seed: u64,
) -> Result<CfEstimate> {
    if n != 2 {
        return Err(Error::InvalidArgument(format!("I_epsilon is implemented for N = 2, got {n}")));
    }
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1/4], got {eps}")));
    }
    if haar.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: haar.dim(),
        });
    }
    if n_mc == 0 {
        return Err(Error::EmptySample);
    }
    let measure = orbital_measure(t, n)?;
    let values: Vec<Complex64> = (0..n_mc)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(seed, i as u64);
            let x1 = sample_window_cos3(&mut r);
            let x2 = sample_window_cos3(&mut r);
            let s = [1.0 + eps * x1, eps + eps * x2];
            let avg = HaarAverages::from_eigenvalues(&s, &measure, alpha, haar)?;
            let f = avg.cf_infinity().value * avg.variance_v().value;
            Ok((s[0] - s[1]).powi(2) * f)
        })
        .collect::<Result<_>>()?;
    let est = mean_estimate(&values)?;
    let scale = weyl_prefactor(n) * (2.0 * PI).powi(n as i32);
    Ok(CfEstimate {
        value: est.value * scale,
        std_error: est.std_error * scale,
        n: n_mc,
    })
}

/// `c̃ · exp(−⟨w(S₀)⟩) · v(S₀)` on the given Haar sample.
pub fn i_epsilon_limit(t: f64, alpha: StabilityIndex, haar: &HaarSample) -> Result<Complex64> {
    let n = haar.dim();
    let measure = orbital_measure(t, n)?;
    let mut s0 = vec![0.0; n];
    s0[0] = 1.0;
    let avg = HaarAverages::from_eigenvalues(&s0, &measure, alpha, haar)?;
    Ok(tilde_c(n) * avg.cf_infinity().value * avg.variance_v().value)
}

/// Value at `ε = 0` of the polynomial through the points `(ε_i, I_i)`.
pub fn extrapolate_to_zero(points: &[(f64, Complex64)]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut weight = 1.0;
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i != j {
                weight *= xj / (xj - xi);
            }
        }
        total += yi * weight;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn brute_permanent(m: &DMatrix<f64>) -> f64 {
        fn rec(m: &DMatrix<f64>, row: usize, used: &mut Vec<bool>) -> f64 {
            let n = m.nrows();
            if row == n {
                return 1.0;
            }
            let mut total = 0.0;
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    total += m[(row, j)] * rec(m, row + 1, used);
                    used[j] = false;
                }
            }
            total
        }
        rec(m, 0, &mut vec![false; m.nrows()])
    }

    fn gamma_ratio_oracle(n: usize) -> f64 {
        // ∫_{−1}^{1} cos^p(πu/2) du = (2/√π) Γ((p+1)/2) / Γ(p/2 + 1).
        let p = (2 * n - 1) as f64;
        2.0 / PI.sqrt() * libm::tgamma((p + 1.0) / 2.0) / libm::tgamma(p / 2.0 + 1.0)
    }

    #[test]
    fn window_norm_matches_gamma_formula() {
        assert!((window_norm(2) - 3.0 * PI / 8.0).abs() < 1e-14);
        for n in 1..=6 {
            assert!((window_norm(n) * gamma_ratio_oracle(n) - 1.0).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn zeta_hat_examples() {
        let c = window_norm(2);
        assert_eq!(zeta_hat(1.5, 0.1, 1.0, 2), 0.0);
        assert!((zeta_hat(1.0, 0.1, 1.0, 2) - 2.0 * PI * c / 0.1).abs() < 1e-12);
        for n in 1..=4 {
            for (eps, kappa) in [(0.1, 1.0), (0.03, 0.03)] {
                let total = integrate(|s| zeta_hat(s, eps, kappa, n), kappa - eps, kappa + eps, 16, 20);
                assert!((total - 2.0 * PI).abs() < 1e-8, "N={n}: {total}");
            }
        }
    }

    #[test]
    fn phi_hat_disjoint_windows() {
        let eps = 0.1;
        let c = window_norm(2);
        let want = (2.0 * PI * c / eps).powi(2) / 2.0;
        assert!((phi_hat(&[1.0, eps], eps) - want).abs() < 1e-9 * want);
        assert!((phi_hat(&[eps, 1.0], eps) - want).abs() < 1e-9 * want);
        assert_eq!(phi_hat(&[5.0, -3.0], eps), 0.0);
    }

    proptest! {
        #[test]
        fn ryser_matches_brute_force(seed in 0u64..300, n in 1usize..6) {
            let mut r = rng::master(seed);
            let m = DMatrix::from_fn(n, n, |_, _| r.random::<f64>() * 2.0 - 1.0);
            let a = permanent(&m);
            let b = brute_permanent(&m);
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }

        #[test]
        fn phi_hat_nonnegative(seed in 0u64..1000, n in 1usize..5) {
            let mut r = rng::master(seed);
            let eps = 0.01 + 0.3 * r.random::<f64>();
            let eigs: Vec<f64> = (0..n).map(|_| 1.6 * r.random::<f64>() - 0.3).collect();
            prop_assert!(phi_hat(&eigs, eps) >= 0.0);
        }
    }

    #[test]
    fn tilde_c_small_dimensions() {
        assert!((tilde_c(2) - 2.0 * PI.powi(3)).abs() < 1e-11);
        assert!((tilde_c(1) - 2.0 * PI).abs() < 1e-12);
        // N = 3 by direct 2-d quadrature of Δ²(s₂, s₃).
        let c = window_norm(3);
        let w = |u: f64| 2.0 * PI * c * (PI * u / 2.0).cos().powi(5);
        let inner = integrate(
            |s2| integrate(|s3| (s3 - s2).powi(2) * w(s2) * w(s3), -1.0, 1.0, 8, 20),
            -1.0,
            1.0,
            8,
            20,
        );
        let direct = (1.0 * PI / 2.0 * PI * PI / 6.0) * 2.0 * PI * inner;
        assert!((tilde_c(3) - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn window_sampler_matches_density() {
        let mut r = rng::master(5);
        let xs: Vec<f64> = (0..200_000).map(|_| sample_window_cos3(&mut r)).collect();
        assert!(xs.iter().all(|x| x.abs() <= 1.0));
        // E[x²] under c·cos³(πx/2).
        let c = window_norm(2);
        let want = integrate(|x| x * x * c * (PI * x / 2.0).cos().powi(3), -1.0, 1.0, 8, 20);
        let (mean, se) = crate::estimate::real_mean_se(&xs.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!((mean - want).abs() < 5.0 * se);
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let f = |e: f64| Complex64::new(2.0 - 3.0 * e + 5.0 * e * e, e);
        let pts: Vec<(f64, Complex64)> = [0.1, 0.05, 0.025].iter().map(|&e| (e, f(e))).collect();
        assert!((extrapolate_to_zero(&pts) - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_cauchy_parameter_gives_zero() {
        let haar = HaarSample::generate(2, 2000, 6).unwrap();
        let est = estimate_i_epsilon(0.1, 0.5, StabilityIndex::new(1.0).unwrap(), 2, 200, &haar, 7).unwrap();
        assert!(est.value.norm() <= 3.0 * est.std_error + 1e-12, "{est:?}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let haar = HaarSample::generate(2, 10, 6).unwrap();
        let a = StabilityIndex::new(2.0).unwrap();
        assert!(estimate_i_epsilon(0.5, 0.0, a, 2, 10, &haar, 1).is_err());
        assert!(estimate_i_epsilon(0.1, 0.0, a, 3, 10, &haar, 1).is_err());
    }
}
