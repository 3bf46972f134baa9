//! `m·D(S, m) → v(S)/2` on a fixed Haar sample.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfn::{HaarAverages, HaarSample};
use crate::estimate::CfEstimate;
use crate::matrix::HermitianMatrix;
use crate::stable::{SpectralMeasureEig, StabilityIndex};
use crate::verify::rate::ExperimentConfig;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DAsymptoticsRow {
    pub m: usize,
    /// `m·D` with its standard error.
    pub scaled_d: CfEstimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DAsymptoticsReport {
    pub rows: Vec<DAsymptoticsRow>,
    /// `v(S)/2` on the same Haar sample.
    pub half_variance: CfEstimate,
    /// `|m·D − v/2|` at the largest `m`.
    pub deviation_at_largest: f64,
}

impl DAsymptoticsReport {
    pub fn largest(&self) -> &DAsymptoticsRow {
        self.rows.last().expect("non-empty m list")
    }
}

pub fn d_asymptotics_on(
    s: &HermitianMatrix,
    m_list: &[usize],
    measure: &SpectralMeasureEig,
    alpha: StabilityIndex,
    haar: &HaarSample,
) -> Result<DAsymptoticsReport> {
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(crate::Error::InvalidArgument("m list must be non-empty and positive".into()));
    }
    let avg = HaarAverages::new(s, measure, alpha, haar)?;
    let v = avg.variance_v();
    let half_variance = CfEstimate {
        value: v.value / 2.0,
        std_error: v.std_error / 2.0,
        n: v.n,
    };
    let rows = m_list
        .iter()
        .map(|&m| {
            let d = avg.d_term(m)?;
            let mf = m as f64;
            Ok(DAsymptoticsRow {
                m,
                scaled_d: CfEstimate {
                    value: d.value * mf,
                    std_error: d.std_error * mf,
                    n: d.n,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last: Complex64 = rows.last().expect("checked").scaled_d.value;
    Ok(DAsymptoticsReport {
        deviation_at_largest: (last - half_variance.value).norm(),
        rows,
        half_variance,
    })
}

/// Same check on the Haar sample described by `config`.
pub fn d_asymptotics_check(
    s: &HermitianMatrix,
    m_list: &[usize],
    config: &ExperimentConfig,
) -> Result<DAsymptoticsReport> {
    let haar = config.haar_sample()?;
    d_asymptotics_on(s, m_list, &config.ensemble.measure, config.ensemble.alpha, &haar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn zero_matrix_is_identically_zero() {
        let haar = HaarSample::generate(2, 500, 1).unwrap();
        let m = presets::orbital(0.3, 2).unwrap();
        let rep = d_asymptotics_on(&HermitianMatrix::zeros(2), &[10, 100], &m, StabilityIndex::new(1.5).unwrap(), &haar).unwrap();
        assert!(rep.rows.iter().all(|r| r.scaled_d.value == Complex64::new(0.0, 0.0)));
        assert_eq!(rep.deviation_at_largest, 0.0);
    }

    #[test]
    fn cauchy_symmetric_case_has_zero_limit() {
        let haar = HaarSample::generate(2, 20_000, 2).unwrap();
        let m = presets::orbital(0.5, 2).unwrap();
        let s0 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let rep = d_asymptotics_on(&s0, &[100, 10_000], &m, StabilityIndex::new(1.0).unwrap(), &haar).unwrap();
        let last = &rep.largest().scaled_d;
        assert!(last.value.norm() <= 5.0 * last.std_error + 1e-12, "{last:?}");
    }
}
