//! Hermitian matrices, Haar unitaries, the standardised sum `Y_m` and the
//! support classification of invariant stable ensembles.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{mean_estimate, CfEstimate};
use crate::rng;
use crate::stable::{sample_stable_vector, SpectralMeasureEig, StabilityIndex, StableVectorSpec};
use crate::{Error, Result};

/// Tolerance of the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance of the `U U† = I` check (max norm).
pub const UNITARY_TOL: f64 = 1e-10;
/// Relative singular-value cut used for span ranks.
pub const RANK_TOL: f64 = 1e-10;

type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// An `N×N` complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TriangleJson", into = "TriangleJson")]
pub struct HermitianMatrix(CMat);

impl HermitianMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "expected a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let scale = 1.0_f64.max(entries.iter().map(|z| z.norm()).fold(0.0, f64::max));
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self(entries))
    }

    /// Hermitian part `(A + A†)/2` of an arbitrary square matrix.
    pub(crate) fn from_hermitian_part(entries: CMat) -> Self {
        let adj = entries.adjoint();
        Self((entries + adj) * c(0.5))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(CMat::from_fn(n, n, |a, b| if a == b { c(diag[a]) } else { c(0.0) }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.0[(j, j)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.0[(j, j)].re).sum()
    }

    /// `tr X²`, the squared Frobenius norm.
    pub fn trace_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `tr(S X)` (real for Hermitian `S`, `X`).
    pub fn trace_pairing(&self, other: &HermitianMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(&self.0 * c(factor))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn add_identity(&self, shift: f64) -> Self {
        let mut out = self.0.clone();
        for j in 0..self.dim() {
            out[(j, j)] += c(shift);
        }
        Self(out)
    }

    /// `U X U†`.
    pub fn conjugate_by(&self, u: &UnitaryMatrix) -> Self {
        Self::from_hermitian_part(&u.0 * &self.0 * u.0.adjoint())
    }

    /// Diagonal of `U X U†` without forming the full product.
    pub fn conjugated_diagonal(&self, u: &UnitaryMatrix) -> Vec<f64> {
        conjugated_diagonal(&u.0, &self.0)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Upper triangle `j ≤ k`, row-major, as `(re, im)` pairs.
    pub fn to_triangle(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * (n + 1));
        for j in 0..n {
            for k in j..n {
                let z = self.0[(j, k)];
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }

    pub fn from_triangle(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * (n + 1) {
            return Err(Error::DimensionMismatch {
                expected: n * (n + 1),
                found: values.len(),
            });
        }
        let mut m = CMat::zeros(n, n);
        let mut it = values.chunks_exact(2);
        for j in 0..n {
            for k in j..n {
                let p = it.next().expect("length checked");
                if j == k {
                    if p[1] != 0.0 {
                        return Err(Error::NotHermitian(p[1].abs()));
                    }
                    m[(j, j)] = c(p[0]);
                } else {
                    m[(j, k)] = Complex64::new(p[0], p[1]);
                    m[(k, j)] = Complex64::new(p[0], -p[1]);
                }
            }
        }
        Ok(Self(m))
    }

    /// Coordinates orthonormal for the trace form: diagonal entries as-is,
    /// then `√2 Re X_jk`, `√2 Im X_jk` for `j < k`.
    pub fn to_coords(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = self.diagonal();
        for j in 0..n {
            for k in j + 1..n {
                let z = self.0[(j, k)];
                out.push(SQRT_2 * z.re);
                out.push(SQRT_2 * z.im);
            }
        }
        out
    }

    pub fn from_coords(n: usize, coords: &[f64]) -> Result<Self> {
        if coords.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: coords.len(),
            });
        }
        let mut m = CMat::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = c(coords[j]);
        }
        let mut idx = n;
        for j in 0..n {
            for k in j + 1..n {
                let z = Complex64::new(coords[idx], coords[idx + 1]) / SQRT_2;
                m[(j, k)] = z;
                m[(k, j)] = z.conj();
                idx += 2;
            }
        }
        Ok(Self(m))
    }
}

/// Column names of the triangle layout: `re_jk, im_jk` for `j ≤ k`, 1-based.
/// Indices are separated by `_` once `N ≥ 10`.
pub fn triangle_header(n: usize) -> Vec<String> {
    let idx = |j: usize, k: usize| {
        if n >= 10 {
            format!("{}_{}", j + 1, k + 1)
        } else {
            format!("{}{}", j + 1, k + 1)
        }
    };
    let mut out = Vec::with_capacity(n * (n + 1));
    for j in 0..n {
        for k in j..n {
            out.push(format!("re_{}", idx(j, k)));
            out.push(format!("im_{}", idx(j, k)));
        }
    }
    out
}

/// JSON form of a matrix: `{"N": n, "triangle": [re_11, im_11, re_12, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub triangle: Vec<f64>,
}

impl From<&HermitianMatrix> for TriangleJson {
    fn from(m: &HermitianMatrix) -> Self {
        Self {
            n: m.dim(),
            triangle: m.to_triangle(),
        }
    }
}

impl From<HermitianMatrix> for TriangleJson {
    fn from(m: HermitianMatrix) -> Self {
        (&m).into()
    }
}

impl TryFrom<TriangleJson> for HermitianMatrix {
    type Error = Error;

    fn try_from(t: TriangleJson) -> Result<Self> {
        HermitianMatrix::from_triangle(t.n, &t.triangle)
    }
}

fn conjugated_diagonal(u: &CMat, x: &CMat) -> Vec<f64> {
    let n = u.nrows();
    (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for a in 0..n {
                let uja = u[(j, a)];
                for b in 0..n {
                    acc += (uja * x[(a, b)] * u[(j, b)].conj()).re;
                }
            }
            acc
        })
        .collect()
}

/// An `N×N` unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMat);

impl UnitaryMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidArgument("unitary matrix must be square".into()));
        }
        let dev = unitarity_defect(&entries);
        if dev > UNITARY_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (max |UU† − I| = {dev:e})"
            )));
        }
        Ok(Self(entries))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.0
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        self.0.column(k).iter().copied().collect()
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }
}

fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    (m * m.adjoint() - CMat::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// A Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(n >= 1, "unitary dimension must be positive");
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) / SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { c(1.0) };
        for j in 0..n {
            q[(j, k)] *= phase;
        }
    }
    UnitaryMatrix(q)
}

/// Splits `X = X₀ + (t/N) I` with `t = tr X` and `tr X₀ = 0`.
pub fn trace_decompose(x: &HermitianMatrix) -> (f64, HermitianMatrix) {
    let t = x.trace();
    let n = x.dim() as f64;
    (t, x.add_identity(-t / n))
}

/// Which invariant subspace the ensemble lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportTag {
    /// All of `Herm(N)`.
    FullHerm,
    /// The traceless matrices `Herm₀(N)`.
    TracelessHyperplane,
    /// Multiples of the identity.
    IdentityLine,
    /// No support.
    Zero,
}

impl fmt::Display for SupportTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SupportTag::FullHerm => "FullHerm",
            SupportTag::TracelessHyperplane => "TracelessHyperplane",
            SupportTag::IdentityLine => "IdentityLine",
            SupportTag::Zero => "Zero",
        };
        f.write_str(s)
    }
}

/// Support classification of an invariant stable ensemble.
///
/// `tag` is the matrix-level subspace spanned by the Haar orbit of the atoms.
/// `span_dim` is the rank of the raw atom set in `R^N`; `degenerate` is set
/// when that rank is not the canonical one for `tag` (`N`, `N−1` or `1`),
/// i.e. the atom set only reaches its subspace through permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportCase {
    pub tag: SupportTag,
    pub dim: usize,
    pub span_dim: usize,
    pub degenerate: bool,
}

impl SupportCase {
    pub fn full(dim: usize) -> Self {
        Self {
            tag: SupportTag::FullHerm,
            dim,
            span_dim: dim,
            degenerate: false,
        }
    }

    pub fn traceless(dim: usize) -> Self {
        Self {
            tag: SupportTag::TracelessHyperplane,
            dim,
            span_dim: dim - 1,
            degenerate: false,
        }
    }

    /// Real dimension of the matrix subspace.
    pub fn matrix_dim(&self) -> usize {
        let n = self.dim;
        match self.tag {
            SupportTag::FullHerm => n * n,
            SupportTag::TracelessHyperplane => n * n - 1,
            SupportTag::IdentityLine => 1,
            SupportTag::Zero => 0,
        }
    }

    /// True for the two workspaces on which the ensemble has a density.
    pub fn is_workspace(&self) -> bool {
        matches!(
            self.tag,
            SupportTag::FullHerm | SupportTag::TracelessHyperplane
        )
    }
}

/// Numerical rank of a set of real row vectors.
pub fn span_rank(rows: &[Vec<f64>], dim: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max).count()
}

/// Classification of the ensemble generated by `measure` by the matrix
/// subspace its samples live in.
pub fn classify_support(measure: &SpectralMeasureEig) -> SupportCase {
    let n = measure.dim();
    let atoms = measure.atoms();
    let span_dim = span_rank(atoms, n);
    if atoms.is_empty() {
        return SupportCase {
            tag: SupportTag::Zero,
            dim: n,
            span_dim: 0,
            degenerate: false,
        };
    }
    let diag = 1.0 / (n as f64).sqrt();
    let on_identity = |r: &Vec<f64>| {
        let s = r[0].signum();
        r.iter().all(|x| (x - s * diag).abs() <= RANK_TOL)
    };
    let traceless = |r: &Vec<f64>| r.iter().sum::<f64>().abs() <= RANK_TOL;

    let (tag, canonical) = if atoms.iter().all(on_identity) {
        (SupportTag::IdentityLine, 1)
    } else if atoms.iter().all(traceless) {
        (SupportTag::TracelessHyperplane, n - 1)
    } else {
        (SupportTag::FullHerm, n)
    };
    SupportCase {
        tag,
        dim: n,
        span_dim,
        degenerate: span_dim != canonical,
    }
}

/// `t₀ = (1/N) Σ_k w_k Σ_j r_{k,j}`.
pub fn t_zero(measure: &SpectralMeasureEig) -> f64 {
    let n = measure.dim() as f64;
    measure
        .iter()
        .map(|(r, w)| w * r.iter().sum::<f64>())
        .sum::<f64>()
        / n
}

/// Full description of the ensemble `Y_m + μ I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: StabilityIndex,
    pub measure: SpectralMeasureEig,
    pub mu: f64,
    pub m: usize,
}

impl EnsembleSpec {
    pub fn new(
        dim: usize,
        alpha: StabilityIndex,
        measure: SpectralMeasureEig,
        mu: f64,
        m: usize,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("ensemble needs N >= 2, got {dim}")));
        }
        if measure.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: measure.dim(),
            });
        }
        if m == 0 {
            return Err(Error::InvalidArgument("summand count m must be >= 1".into()));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidArgument("shift mu must be finite".into()));
        }
        Ok(Self {
            dim,
            alpha,
            measure,
            mu,
            m,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.dim, self.alpha, self.measure.clone(), self.mu, self.m).map(|_| ())
    }

    /// The `α = 1` drift `(2 t₀ log m / π)`; zero otherwise.
    pub fn drift(&self) -> f64 {
        if self.alpha.is_one() {
            2.0 * t_zero(&self.measure) * (self.m as f64).ln() / PI
        } else {
            0.0
        }
    }
}

/// `U diag(x) U†`.
fn conjugate_diagonal(u: &UnitaryMatrix, x: &[f64]) -> CMat {
    let n = u.dim();
    let uu = &u.0;
    let mut out = CMat::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut acc = c(0.0);
            for k in 0..n {
                acc += uu[(a, k)] * x[k] * uu[(b, k)].conj();
            }
            out[(a, b)] = acc;
            out[(b, a)] = acc.conj();
        }
        out[(a, a)] = c(out[(a, a)].re);
    }
    out
}

/// One draw of `Y_m + μ I`: `m` Haar-conjugated diagonal stable matrices,
/// standardised by `m^{1/α}`, with the `α = 1` drift removed.
pub fn sample_y_m<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> HermitianMatrix {
    let n = spec.dim;
    let vector = StableVectorSpec::centered(spec.alpha, spec.measure.clone());
    let mut sum = CMat::zeros(n, n);
    for _ in 0..spec.m {
        let u = sample_haar_unitary(n, rng);
        let x = sample_stable_vector(&vector, rng);
        sum += conjugate_diagonal(&u, &x);
    }
    let norm = (spec.m as f64).powf(-1.0 / spec.alpha.value());
    HermitianMatrix(sum * c(norm)).add_identity(spec.mu - spec.drift())
}

/// `n` independent draws of `Y_m`; draw `i` uses substream `(seed, i)`.
pub fn sample_y_m_batch(spec: &EnsembleSpec, n: usize, seed: u64) -> Vec<HermitianMatrix> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, i as u64);
            sample_y_m(spec, &mut rng)
        })
        .collect()
}

/// `n` Haar unitaries; unitary `i` uses substream `(seed, i)`.
pub fn sample_haar_batch(dim: usize, n: usize, seed: u64) -> Vec<UnitaryMatrix> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, i as u64);
            sample_haar_unitary(dim, &mut rng)
        })
        .collect()
}

/// Empirical matrix characteristic function `(1/n) Σ_j exp(i tr(S X_j))`.
pub fn empirical_cf_matrix(samples: &[HermitianMatrix], s: &HermitianMatrix) -> Result<CfEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let phases: Vec<Complex64> = samples
        .iter()
        .map(|x| Complex64::from_polar(1.0, s.trace_pairing(x)))
        .collect();
    mean_estimate(&phases)
}

/// A uniformly random unit-norm direction of the workspace.
pub fn random_direction<R: Rng + ?Sized>(
    n: usize,
    workspace: SupportTag,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    let mut coords: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
    match workspace {
        SupportTag::FullHerm => {}
        SupportTag::TracelessHyperplane => {
            let mean = coords[..n].iter().sum::<f64>() / n as f64;
            coords[..n].iter_mut().for_each(|x| *x -= mean);
        }
        other => {
            return Err(Error::UnsupportedWorkspace(format!(
                "random directions need FullHerm or TracelessHyperplane, got {other}"
            )))
        }
    }
    let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
    coords.iter_mut().for_each(|x| *x /= norm);
    HermitianMatrix::from_coords(n, &coords)
}

/// A random Hermitian matrix with i.i.d. Gaussian coordinates.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let coords: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
    HermitianMatrix::from_coords(n, &coords).expect("length n*n")
}
