//! Integer-valued, continuous-time price process with fleeting moves.
//!
//! Prices move by integer ticks. Each news event arrives as a point of a
//! homogeneous Poisson random measure with a random height in `[0, 1]`;
//! events below the permanence level `b` move the price for good, events
//! above it are reversed once the trawl function decays past their height.
//!
//! The crate is organised by task:
//!
//! - [`model`]: Lévy measure, trawl families and their geometry.
//! - [`special`]: modified Bessel function of the second kind and friends.
//! - [`theory`]: closed-form cumulants, characteristic function, PMF,
//!   autocorrelations and expected power variation.
//! - [`simulate`]: exact event-level simulation and path functionals.
//! - [`estimate`]: moment estimators, variance-signature fitting, model-based
//!   bootstrap and the non-parametric trawl estimator.
//! - [`clean`]: trade-tick cleaning into a strictly alternating jump series.
//! - [`io`]: CSV/JSON formats shared with the command-line tool.

pub mod clean;
pub mod error;
pub mod estimate;
pub mod io;
pub mod model;
pub(crate) mod numeric;
pub mod simulate;
pub mod special;
pub mod theory;

pub use error::{Error, Result};
pub use model::{LevyMeasure, ModelParams, TrawlFamily, TrawlSpec};
pub use simulate::PricePath;
