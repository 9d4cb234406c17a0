//! Lévy measure, squashed trawl families and the combined parameter vector.

mod levy;
mod params;
mod trawl;

pub use levy::{levy_abs_moment, levy_cumulant, LevyMeasure};
pub use params::ModelParams;
pub use trawl::{
    lifetime_quantile, trawl_d, trawl_increment, trawl_leb_a, trawl_overlap, TabulatedTrawl,
    TrawlFamily, TrawlKind, TrawlSpec, QUANTILE_REL_TOL,
};
