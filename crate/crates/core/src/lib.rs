//! Sampling and characteristic-function analysis of unitarily invariant
//! α-stable Hermitian random matrix ensembles.
//!
//! The ensemble with stability index α and eigenvalue-level spectral measure
//! `H_eig` is generated as the standardised sum of Haar-conjugated diagonal
//! stable matrices,
//!
//! ```text
//! Y_m = m^{-1/α} Σ_j U_j diag(X̃_j) U_j† − (2 t₀ log m / π) I · 1{α = 1},
//! ```
//!
//! and its characteristic function `⟨exp(−w_α(USU†)/m)⟩^m` converges to the
//! stable limit `exp(−⟨w_α(USU†)⟩)` at rate `1/m`. The crate is split into
//!
//! * [`stable`]: ν_α, univariate and vector stable samplers, spectral measures;
//! * [`matrix`]: Hermitian/unitary types, Haar sampling, `Y_m`, support classes;
//! * [`charfn`]: w_α and the Haar-averaged characteristic functions;
//! * [`verify`]: experiment drivers (Gaussian oracle, rate fits, optimality probe);
//! * [`acceptance`]: the end-to-end numerical checks used by the self-test.

pub mod acceptance;
pub mod charfn;
mod error;
pub mod estimate;
pub mod matrix;
pub mod presets;
pub mod quad;
pub mod rng;
pub mod stable;
pub mod verify;

pub use error::{Error, Result};
pub use estimate::CfEstimate;
