//! Convergence-rate fits of `max_S |p̂_m(S) − p̂_∞(S)|` against `m`.

use serde::{Deserialize, Serialize};

use crate::charfn::{Drift, HaarAverages, HaarSample, R_HAT_FLOOR};
use crate::matrix::{classify_support, random_direction, EnsembleSpec, HermitianMatrix, SupportTag};
use crate::rng;
use crate::{Error, Result};

/// Accepted range of the fitted log-log slope around the `1/m` law.
pub const SLOPE_WINDOW: (f64, f64) = (-1.3, -0.7);
/// Smallest `m` entering the regression.
pub const FIT_M_MIN: usize = 8;
/// Default radii of the test-matrix grid.
pub const DEFAULT_RADII: [f64; 2] = [0.5, 1.0];
/// Default number of random directions per radius.
pub const DEFAULT_DIRECTIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    pub m_list: Vec<usize>,
    pub s_grid: Vec<HermitianMatrix>,
    pub n_haar: usize,
    pub n_samples: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Config with the default grid: `DEFAULT_DIRECTIONS` random unit
    /// directions of the ensemble's workspace at each radius.
    pub fn with_default_grid(
        ensemble: EnsembleSpec,
        m_list: Vec<usize>,
        radii: &[f64],
        n_haar: usize,
        n_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let case = classify_support(&ensemble.measure);
        let s_grid = default_s_grid(ensemble.dim, case.tag, radii, DEFAULT_DIRECTIONS, seed)?;
        let config = Self {
            ensemble,
            m_list,
            s_grid,
            n_haar,
            n_samples,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.m_list.is_empty() {
            return Err(Error::InvalidArgument("m_list is empty".into()));
        }
        if self.m_list.windows(2).any(|w| w[0] >= w[1]) || self.m_list[0] == 0 {
            return Err(Error::InvalidArgument(
                "m_list must be positive and strictly increasing".into(),
            ));
        }
        if let Some(s) = self.s_grid.iter().find(|s| s.dim() != self.ensemble.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.ensemble.dim,
                found: s.dim(),
            });
        }
        if self.n_haar == 0 {
            return Err(Error::EmptySample);
        }
        Ok(())
    }

    pub fn haar_sample(&self) -> Result<HaarSample> {
        HaarSample::generate(self.ensemble.dim, self.n_haar, self.seed)
    }
}

/// `n_directions` uniform unit directions of the workspace per radius.
pub fn default_s_grid(
    n: usize,
    workspace: SupportTag,
    radii: &[f64],
    n_directions: usize,
    seed: u64,
) -> Result<Vec<HermitianMatrix>> {
    let mut r = rng::substream(seed, u64::MAX - 1);
    let mut grid = Vec::with_capacity(radii.len() * n_directions);
    for _ in 0..n_directions {
        let dir = random_direction(n, workspace, &mut r)?;
        for &radius in radii {
            grid.push(dir.scale(radius));
        }
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub m_values: Vec<usize>,
    pub distances: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

impl RateCurve {
    /// `d(2m)/d(m)` for every consecutive pair with doubled `m`.
    pub fn doubling_ratios(&self) -> Vec<(usize, f64)> {
        self.m_values
            .windows(2)
            .zip(self.distances.windows(2))
            .filter(|(m, _)| m[1] == 2 * m[0])
            .map(|(m, d)| (m[1], d[1] / d[0]))
            .collect()
    }

    pub fn slope_within(&self, lo: f64, hi: f64) -> bool {
        (lo..=hi).contains(&self.slope)
    }
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, se_b)`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InvalidArgument("regression needs at least two points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("regression abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if n > 2 {
        let ssr: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((intercept, slope, se))
}

/// CF distances `d(m) = max_S |p̂_m(S) − p̂_∞(S)|` on one Haar sample.
pub fn cf_distances(config: &ExperimentConfig, haar: &HaarSample, drift: Drift) -> Result<Vec<f64>> {
    config.validate()?;
    let spec = &config.ensemble;
    let averages: Vec<HaarAverages> = config
        .s_grid
        .iter()
        .map(|s| HaarAverages::new(s, &spec.measure, spec.alpha, haar))
        .collect::<Result<_>>()?;
    let mut distances = Vec::with_capacity(config.m_list.len());
    for &m in &config.m_list {
        let mut d: f64 = 0.0;
        for avg in &averages {
            let r = avg.r_hat(m).value.norm();
            if r <= R_HAT_FLOOR {
                return Err(Error::OutOfRegime(format!("|r̂_m| = {r:e} at m = {m}")));
            }
            d = d.max((avg.cf_m(m, drift).value - avg.cf_infinity().value).norm());
        }
        distances.push(d);
    }
    Ok(distances)
}

/// Log–log fit of the CF distance curve, dropping `m < FIT_M_MIN`.
pub fn rate_fit(config: &ExperimentConfig) -> Result<RateCurve> {
    rate_fit_with_drift(config, Drift::Included)
}

pub fn rate_fit_with_drift(config: &ExperimentConfig, drift: Drift) -> Result<RateCurve> {
    let haar = config.haar_sample()?;
    let distances = cf_distances(config, &haar, drift)?;
    curve_from_distances(config.m_list.clone(), distances)
}

pub fn curve_from_distances(m_values: Vec<usize>, distances: Vec<f64>) -> Result<RateCurve> {
    if let Some(d) = distances.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::OutOfRegime(format!(
            "CF distance {d} is not positive; the test grid cannot resolve a rate"
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = m_values
        .iter()
        .zip(&distances)
        .filter(|(m, _)| **m >= FIT_M_MIN)
        .map(|(m, d)| ((*m as f64).ln(), d.ln()))
        .unzip();
    let (intercept, slope, slope_stderr) = ols(&x, &y)?;
    Ok(RateCurve {
        m_values,
        distances,
        slope,
        slope_stderr,
        intercept,
    })
}

/// `m = 8, 16, …, 512`.
pub fn doubling_m_list(first: usize, last: usize) -> Vec<usize> {
    std::iter::successors(Some(first), |m| Some(m * 2))
        .take_while(|&m| m <= last)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::stable::StabilityIndex;

    #[test]
    fn ols_recovers_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (a, b, se) = ols(&x, &y).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (b + 0.5).abs() < 1e-12 && se < 1e-12);
        assert!(ols(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn m_list_helper() {
        assert_eq!(doubling_m_list(8, 512), vec![8, 16, 32, 64, 128, 256, 512]);
    }

    #[test]
    fn gaussian_rate_curve() {
        let spec = EnsembleSpec::new(2, StabilityIndex::new(2.0).unwrap(), presets::orbital(0.5, 2).unwrap(), 0.0, 1).unwrap();
        let config = ExperimentConfig::with_default_grid(spec, doubling_m_list(4, 512), &DEFAULT_RADII, 20_000, 0, 3).unwrap();
        assert_eq!(config.s_grid.len(), 20);
        let curve = rate_fit(&config).unwrap();
        assert!(curve.slope_within(-1.3, -0.7), "{curve:?}");
        assert!(curve.distances.windows(2).all(|w| w[1] < w[0]));
        for (m, ratio) in curve.doubling_ratios() {
            if m >= 64 {
                assert!((ratio - 0.5).abs() < 0.125, "m={m}: {ratio}");
            }
        }
    }

    #[test]
    fn rejects_zero_distance_grid() {
        let spec = EnsembleSpec::new(2, StabilityIndex::new(1.5).unwrap(), presets::orbital(0.5, 2).unwrap(), 0.0, 1).unwrap();
        let config = ExperimentConfig {
            ensemble: spec,
            m_list: vec![8, 16, 32],
            s_grid: vec![HermitianMatrix::zeros(2)],
            n_haar: 100,
            n_samples: 0,
            seed: 1,
        };
        assert!(matches!(rate_fit(&config), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn config_round_trips_through_json() {
        let spec = EnsembleSpec::new(2, StabilityIndex::new(0.7).unwrap(), presets::orbital(0.3, 2).unwrap(), 0.25, 3).unwrap();
        let config = ExperimentConfig::with_default_grid(spec, vec![8, 16], &[1.0], 10, 5, 9).unwrap();
        let text = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
    }
}
