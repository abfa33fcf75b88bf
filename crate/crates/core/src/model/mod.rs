//! Domain types shared by all modules and validation of a loaded dataset
//! into a runnable, index-resolved model instance.

mod build;
mod types;

pub use build::{
    build_model, series_at, BaseYearState, BuildError, ModelInstance, ResolvedNest, ResolvedSector,
    ResolvedTech,
};
pub use types::*;
