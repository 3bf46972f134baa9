//! Numerical experiments: the Gaussian closed form, rate fits, the `m·D`
//! asymptotics, Haar moment probes, the optimality integral and the Fourier
//! bound on the density distance.

pub mod asymptotics;
pub mod density;
pub mod gaussian;
pub mod moments;
pub mod optimality;
pub mod rate;
pub mod report;

pub use asymptotics::{d_asymptotics_check, DAsymptoticsReport};
pub use density::{density_sup_bound, DensityBound};
pub use gaussian::{gaussian_closed_form_cf, gaussian_oracle_experiment, GaussianReport};
pub use moments::{u_moment_variance, MomentVariances};
pub use optimality::{estimate_i_epsilon, phi_hat, tilde_c, zeta_hat};
pub use rate::{rate_fit, ExperimentConfig, RateCurve};
pub use report::Report;
