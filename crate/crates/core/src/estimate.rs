//! Monte Carlo estimates with standard errors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A complex Monte Carlo estimate.
///
/// `std_error` is the combined standard error of the real and imaginary
/// parts, `sqrt(se_re² + se_im²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfEstimate {
    pub value: Complex64,
    pub std_error: f64,
    pub n: usize,
}

impl CfEstimate {
    pub fn exact(value: Complex64, n: usize) -> Self {
        Self {
            value,
            std_error: 0.0,
            n,
        }
    }

    /// `|value − target| ≤ k · std_error`.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        (self.value - target).norm() <= k * self.std_error
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl KahanSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

pub fn compensated_sum<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let mut acc = KahanSum::default();
    for z in values {
        acc.add(z);
    }
    acc.total()
}

/// Sample mean of complex values with its standard error.
pub fn mean_estimate(values: &[Complex64]) -> Result<CfEstimate> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = values.len();
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    Ok(CfEstimate {
        value: mean,
        std_error: std_error_of_mean(values, mean),
        n,
    })
}

/// Standard error of the mean of `values` around `center`.
pub fn std_error_of_mean(values: &[Complex64], center: Complex64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|z| (z - center).norm_sqr()).sum();
    (ss / ((n - 1) as f64 * n as f64)).sqrt()
}

/// Real sample mean and standard error.
pub fn real_mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / ((n - 1) as f64 * n as f64)).sqrt())
}

/// Unbiased-ish sample variance (divisor `n`) of real values with the
/// delta-method standard error `sqrt(Var[(x − x̄)²] / n)`.
pub fn real_variance_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sq: Vec<f64> = values.iter().map(|x| (x - mean).powi(2)).collect();
    let (var, se) = real_mean_se(&sq);
    (var, se)
}
