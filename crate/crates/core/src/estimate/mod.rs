//! Moment-based inference from observed or simulated price paths.
//!
//! The pipeline is: [`jump_empirics`] and [`variance_grid`] summarise a path,
//! [`levy_from_moments`] turns jump frequencies into a Lévy measure for a
//! given `b`, and [`fit_signature`] chooses `b` and the trawl shape by least
//! squares on the variance signature `sigma^2_delta / delta`.

mod bootstrap;
mod empirics;
mod moments;
mod nonparametric;
mod optimize;
mod signature;

pub use bootstrap::{bootstrap, parameter_map, BootstrapConfig, BootstrapResult};
pub use empirics::{
    empirical_stats, jump_empirics, log_grid, default_grid, variance_grid, variance_grid_lenient, EmpiricalStats,
    VarPoint,
};
pub use moments::levy_from_moments;
pub use nonparametric::{nonparametric_trawl, nonparametric_trawl_with, NonparametricTrawl, DEFAULT_TAIL_FRACTION};
pub use signature::{fit_signature, fit_signature_with, signature_model, FitOptions, FitResult};
