//! Named spectral measures, one per support case.

use crate::charfn::orbital_measure;
use crate::stable::SpectralMeasureEig;
use crate::{Error, Result};

/// Names accepted by [`by_name`].
pub const PRESET_NAMES: [&str; 5] = ["orbital", "full-basis", "traceless-pair", "identity-line", "axis"];

/// The orbital measure: `+e⁽ʲ⁾` with weight `t/(2N)`, `−e⁽ʲ⁾` with weight
/// `(1−t)/(2N)`; total mass `1/2`.
pub fn orbital(t: f64, n: usize) -> Result<SpectralMeasureEig> {
    orbital_measure(t, n)
}

/// `±e⁽ʲ⁾`, each with weight `1/(2N)`; total mass 1.
pub fn full_basis(n: usize) -> Result<SpectralMeasureEig> {
    let mut atoms = Vec::with_capacity(2 * n);
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[j] = sign;
            atoms.push(e);
        }
    }
    let weights = vec![1.0 / (2 * n) as f64; 2 * n];
    SpectralMeasureEig::new(n, atoms, weights)
}

/// `±(e⁽¹⁾ − e⁽²⁾)/√2`, each with weight `1/2`. Traceless; spans `R^N_0` only
/// for `N = 2`.
pub fn traceless_pair(n: usize) -> Result<SpectralMeasureEig> {
    if n < 2 {
        return Err(Error::InvalidArgument("traceless pair needs N >= 2".into()));
    }
    let mut d = vec![0.0; n];
    d[0] = 1.0;
    d[1] = -1.0;
    let neg: Vec<f64> = d.iter().map(|x| -x).collect();
    SpectralMeasureEig::from_directions(n, vec![d, neg], vec![0.5, 0.5])
}

/// `±(1,…,1)/√N`, each with weight `1/2`.
pub fn identity_line(n: usize) -> Result<SpectralMeasureEig> {
    SpectralMeasureEig::from_directions(n, vec![vec![1.0; n], vec![-1.0; n]], vec![0.5, 0.5])
}

/// A single atom `e⁽¹⁾` of weight 1: reaches `Herm(N)` only through the Haar
/// orbit, so its raw span is degenerate for `N ≥ 2`.
pub fn axis(n: usize) -> Result<SpectralMeasureEig> {
    let mut e = vec![0.0; n];
    if n == 0 {
        return Err(Error::InvalidMeasure("dimension must be positive".into()));
    }
    e[0] = 1.0;
    SpectralMeasureEig::new(n, vec![e], vec![1.0])
}

pub fn by_name(name: &str, n: usize, t: f64) -> Result<SpectralMeasureEig> {
    match name {
        "orbital" => orbital(t, n),
        "full-basis" => full_basis(n),
        "traceless-pair" => traceless_pair(n),
        "identity-line" => identity_line(n),
        "axis" => axis(n),
        other => Err(Error::InvalidArgument(format!(
            "unknown preset '{other}' (expected one of {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{classify_support, SupportTag};

    #[test]
    fn preset_support_cases() {
        let tag = |m: SpectralMeasureEig| {
            let c = classify_support(&m);
            (c.tag, c.degenerate)
        };
        assert_eq!(tag(orbital(0.3, 2).unwrap()), (SupportTag::FullHerm, false));
        assert_eq!(tag(full_basis(3).unwrap()), (SupportTag::FullHerm, false));
        assert_eq!(tag(traceless_pair(2).unwrap()), (SupportTag::TracelessHyperplane, false));
        assert_eq!(tag(identity_line(4).unwrap()), (SupportTag::IdentityLine, false));
        assert_eq!(tag(axis(2).unwrap()), (SupportTag::FullHerm, true));
    }

    #[test]
    fn masses() {
        assert!((orbital(0.3, 3).unwrap().total_mass() - 0.5).abs() < 1e-15);
        assert!((full_basis(3).unwrap().total_mass() - 1.0).abs() < 1e-15);
        assert!(by_name("nope", 2, 0.5).is_err());
    }
}
