//! Single-region partial-equilibrium energy-system scenario kernel.
//!
//! The library clears commodity markets with nested-logit technology
//! competition, solves a carbon price against a linear net-zero cap,
//! accounts gross/captured/negative emissions, and scores scenario
//! feasibility (policy cost, land, CO₂ storage, expansion rates).
//!
//! Module map:
//! - [`model`] — domain types, dataset validation, calibration
//! - [`choice`] — logit shares, levelized cost, share-weight calibration
//! - [`markets`] — service demand, graded resources, power dispatch, the
//!   damped fixed-point period solver
//! - [`policy`] — cap pathways, carbon-price bisection, scenario
//!   constraints, the horizon driver
//! - [`emissions`] — per-sector emissions ledger and derived indicators
//! - [`feasibility`] — policy cost, land, storage and expansion metrics
//! - [`scenario`] — scenario config files
//! - [`io`] — dataset ingestion and result emission

pub mod choice;
pub mod emissions;
pub mod feasibility;
pub mod io;
pub mod markets;
pub mod model;
pub mod policy;
pub mod scenario;

/// Energy produced by 1 GW running a full year at capacity factor 1 (EJ).
///
/// 1 GW · 8760 h = 8760 GWh = 31,536 TJ.
pub const EJ_PER_GW_YEAR: f64 = 0.031536;

/// Terawatt-hours per exajoule (1 EJ = 277.78 TWh).
pub const TWH_PER_EJ: f64 = 1000.0 / 3.6;
