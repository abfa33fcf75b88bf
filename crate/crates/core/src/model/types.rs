//! Core domain types.
//!
//! Unit conventions, used consistently across the library and the dataset
//! files:
//! - energy quantities in EJ/yr, mass in MtCO₂/yr, transport service in
//!   Gpkm/yr or Gtkm/yr, stationary service in EJ-service/yr;
//! - prices and unit costs in million 2020USD per quantity unit
//!   (1 USD/GJ ≡ 1000 MUSD/EJ, 1 USD/tCO₂ ≡ 1 MUSD/MtCO₂);
//! - the carbon price is in USD/tCO₂, which equals MUSD/MtCO₂, so
//!   `price × emission_factor` is a cost per output unit with no
//!   conversion factor;
//! - capacity in GW, population in millions, GDP per capita in 2020USD
//!   per person (so GDP in MUSD = population × gdp_per_capita).

use std::collections::BTreeMap;

/// Model time axis: calendar years at a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub base_year: u32,
    pub first_model_year: u32,
    pub step: u32,
    pub end_year: u32,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<(), String> {
        if self.step == 0 {
            return Err("time step must be positive".into());
        }
        if self.base_year >= self.first_model_year {
            return Err(format!(
                "base year {} must precede first model year {}",
                self.base_year, self.first_model_year
            ));
        }
        if self.end_year < self.first_model_year {
            return Err(format!(
                "end year {} precedes first model year {}",
                self.end_year, self.first_model_year
            ));
        }
        if self.end_year > 2100 {
            return Err(format!("end year {} beyond 2100", self.end_year));
        }
        if (self.end_year - self.first_model_year) % self.step != 0 {
            return Err(format!(
                "step {} does not divide {}..{}",
                self.step, self.first_model_year, self.end_year
            ));
        }
        Ok(())
    }

    pub fn n_periods(&self) -> usize {
        ((self.end_year - self.first_model_year) / self.step) as usize + 1
    }

    /// Model years, first to last.
    pub fn years(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n_periods()).map(move |i| self.first_model_year + i as u32 * self.step)
    }

    pub fn index_of(&self, year: u32) -> Option<usize> {
        if year < self.first_model_year || year > self.end_year {
            return None;
        }
        let off = year - self.first_model_year;
        (off % self.step == 0).then(|| (off / self.step) as usize)
    }

    pub fn year_at(&self, index: usize) -> u32 {
        self.first_model_year + index as u32 * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CommodityKind {
    PrimaryResource,
    SecondaryCarrier,
    EndUseService,
    StorageResource,
    EmissionsPermit,
}

impl CommodityKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "primary-resource" => Self::PrimaryResource,
            "secondary-carrier" => Self::SecondaryCarrier,
            "end-use-service" => Self::EndUseService,
            "storage-resource" => Self::StorageResource,
            "emissions-permit" => Self::EmissionsPermit,
            _ => return None,
        })
    }
}

/// Quantity unit of a commodity. Mixed units are fine across markets; every
/// producer and consumer of one commodity must agree on its unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Unit {
    /// EJ per year.
    Energy,
    /// MtCO₂ per year.
    Mass,
    /// Billion passenger-km per year.
    PassengerKm,
    /// Billion tonne-km per year.
    TonneKm,
    /// EJ-service per year (stationary end uses).
    Service,
}

impl Unit {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ej" => Self::Energy,
            "mtco2" => Self::Mass,
            "gpkm" => Self::PassengerKm,
            "gtkm" => Self::TonneKm,
            "ej-service" => Self::Service,
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Energy => "EJ",
            Self::Mass => "MtCO2",
            Self::PassengerKm => "Gpkm",
            Self::TonneKm => "Gtkm",
            Self::Service => "EJ-service",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commodity {
    pub id: String,
    pub kind: CommodityKind,
    pub unit: Unit,
}

/// One input of a technology: commodity consumed per unit of output.
#[derive(Debug, Clone, PartialEq)]
pub struct TechInput {
    pub commodity: String,
    pub intensity: f64,
}

/// A production technology as authored in the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Technology {
    pub id: String,
    /// Owning sector tree (or the standalone removal sector).
    pub sector: String,
    /// Nest inside the sector tree.
    pub nest: String,
    pub output: String,
    pub inputs: Vec<TechInput>,
    /// MUSD per output unit.
    pub non_energy_cost: f64,
    /// MtCO₂ per output unit, before capture. Biogenic carbon for
    /// `biogenic` technologies.
    pub emission_factor: f64,
    pub capture_fraction: f64,
    /// Fuel carbon is biogenic: no gross atmospheric emissions and captured
    /// CO₂ books as a negative emission.
    pub biogenic: bool,
    /// Years a vintage survives (power sector only).
    pub lifetime: u32,
    pub capacity_factor: f64,
    pub first_available_year: u32,
    /// Sparse (year, multiplier) path; interpolated linearly, extended flat.
    pub share_weight_path: Vec<(u32, f64)>,
    /// Hard capacity potential (GW), where known.
    pub potential_gw: Option<f64>,
    /// Variable renewable: subject to the grid-integration cost adder.
    pub vre: bool,
}

impl Technology {
    /// Share-weight multiplier at `year` (linear interpolation, flat ends).
    pub fn weight_multiplier(&self, year: u32) -> f64 {
        interpolate_path(&self.share_weight_path, year).unwrap_or(1.0)
    }
}

/// Linear interpolation over a sparse (year, value) path sorted by year.
pub fn interpolate_path(path: &[(u32, f64)], year: u32) -> Option<f64> {
    if path.is_empty() {
        return None;
    }
    if year <= path[0].0 {
        return Some(path[0].1);
    }
    if year >= path[path.len() - 1].0 {
        return Some(path[path.len() - 1].1);
    }
    for w in path.windows(2) {
        let (y0, v0) = w[0];
        let (y1, v1) = w[1];
        if year >= y0 && year <= y1 {
            let f = (year - y0) as f64 / (y1 - y0) as f64;
            return Some(v0 + f * (v1 - v0));
        }
    }
    None
}

/// Service-demand specification at the root of an end-use sector.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandSpec {
    /// Base-year service quantity, in the sector output unit.
    pub base_service: f64,
    pub income_elasticity: f64,
    pub price_elasticity: f64,
}

/// A nest of technologies competing inside a sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorNest {
    pub id: String,
    pub logit_exponent: f64,
    /// Technology ids (leaves).
    pub techs: Vec<String>,
}

/// A sector tree: nests compete at the root, technologies inside nests.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorNode {
    pub id: String,
    /// Commodity the sector produces (end-use service or carrier).
    pub output: String,
    pub logit_exponent: f64,
    /// Present only on end-use roots.
    pub demand: Option<DemandSpec>,
    pub nests: Vec<SectorNest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grade {
    /// Available quantity: total (depletable) or per-year (renewable).
    pub quantity: f64,
    /// MUSD per unit extracted.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedResource {
    pub commodity: String,
    /// Grades sorted by strictly increasing cost.
    pub grades: Vec<Grade>,
    /// Depletable resources track cumulative extraction across periods.
    pub cumulative_tracking: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroDrivers {
    /// Millions of persons, per year (base year + every model year).
    pub population: BTreeMap<u32, f64>,
    /// 2020USD per person.
    pub gdp_per_capita: BTreeMap<u32, f64>,
}

impl MacroDrivers {
    /// GDP in MUSD (population millions × per-capita USD).
    pub fn gdp_musd(&self, year: u32) -> Option<f64> {
        Some(self.population.get(&year)? * self.gdp_per_capita.get(&year)?)
    }
}

/// Exogenous trajectories and curve knots shipped with the dataset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExogenousSeries {
    /// LULUCF sink, MtCO₂/yr, positive = removal.
    pub lulucf_sink: BTreeMap<u32, f64>,
    /// Non-CO₂ gases, MtCO₂e/yr, entering net emissions as-is.
    pub non_co2_wedge: BTreeMap<u32, f64>,
    /// Direct-air-capture deployable potential, MtCO₂/yr.
    pub dac_potential: BTreeMap<u32, f64>,
    /// Grid-integration cost adder for variable renewables:
    /// (renewable generation share in percent, MUSD/EJ adder) knots.
    pub vre_integration: Vec<(f64, f64)>,
}

impl ExogenousSeries {
    /// Piecewise-linear integration-cost adder (MUSD/EJ) at a renewable
    /// generation share in [0,1].
    pub fn vre_adder(&self, share: f64) -> f64 {
        let pct = share * 100.0;
        let knots = &self.vre_integration;
        if knots.is_empty() {
            return 0.0;
        }
        if pct <= knots[0].0 {
            return knots[0].1;
        }
        if pct >= knots[knots.len() - 1].0 {
            return knots[knots.len() - 1].1;
        }
        for w in knots.windows(2) {
            if pct >= w[0].0 && pct <= w[1].0 {
                let f = (pct - w[0].0) / (w[1].0 - w[0].0);
                return w[0].1 + f * (w[1].1 - w[0].1);
            }
        }
        0.0
    }
}

/// Base-year observations used for share-weight calibration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CalibrationObservations {
    /// (sector, nest, tech) → observed base-year share within the nest.
    pub tech_shares: BTreeMap<(String, String, String), f64>,
    /// (sector, nest) → observed base-year share within the sector.
    pub nest_shares: BTreeMap<(String, String), f64>,
}

/// One row of the historical capacity table.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub year: u32,
    /// Technology id, or "system" for total system size.
    pub series: String,
    /// GW for capacity series, GWh for the system series.
    pub value: f64,
}

/// Everything loaded from a dataset directory, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDataset {
    pub timegrid: TimeGrid,
    pub commodities: Vec<Commodity>,
    pub sectors: Vec<SectorNode>,
    pub technologies: Vec<Technology>,
    pub resources: Vec<GradedResource>,
    pub macro_drivers: MacroDrivers,
    pub exogenous: ExogenousSeries,
    pub calibration: CalibrationObservations,
    pub history: Vec<HistoryRow>,
    /// Exogenous capacity pins, GW: (tech, year) → capacity. Model years up
    /// to 2020 are observed history and pin in every scenario; later years
    /// are the national power-plan profile, applied by the reference
    /// scenario only.
    pub capacity_pins: BTreeMap<(String, u32), f64>,
    /// SHA-256 of the dataset files, hex.
    pub checksum: String,
}

/// Dataset-wide reserved ids.
pub mod well_known {
    /// Commodity cleared by captured CO₂ and direct air capture.
    pub const STORAGE: &str = "co2-storage";
    /// The electricity carrier.
    pub const ELECTRICITY: &str = "electricity";
    /// The power sector tree.
    pub const POWER: &str = "power";
    /// Standalone sector owning the direct-air-capture technology.
    pub const REMOVAL: &str = "removal";
    /// History series name for total system size (GWh).
    pub const SYSTEM: &str = "system";
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_indexing_roundtrips() {
        let g = TimeGrid {
            base_year: 2010,
            first_model_year: 2015,
            step: 5,
            end_year: 2050,
        };
        g.validate().unwrap();
        assert_eq!(g.n_periods(), 8);
        for (i, y) in g.years().enumerate() {
            assert_eq!(g.index_of(y), Some(i));
            assert_eq!(g.year_at(i), y);
        }
        assert_eq!(g.index_of(2012), None);
        assert_eq!(g.index_of(2055), None);
    }

    #[test]
    fn grid_rejects_misaligned_end() {
        let g = TimeGrid {
            base_year: 2010,
            first_model_year: 2015,
            step: 5,
            end_year: 2052,
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn path_interpolation() {
        let p = vec![(2020, 0.0), (2030, 1.0)];
        assert_eq!(interpolate_path(&p, 2015), Some(0.0));
        assert_eq!(interpolate_path(&p, 2025), Some(0.5));
        assert_eq!(interpolate_path(&p, 2040), Some(1.0));
        assert_eq!(interpolate_path(&[], 2020), None);
    }

    #[test]
    fn vre_adder_interpolates() {
        let ex = ExogenousSeries {
            vre_integration: vec![(0.0, 0.0), (50.0, 4000.0), (90.0, 15000.0)],
            ..Default::default()
        };
        assert_eq!(ex.vre_adder(0.0), 0.0);
        assert!((ex.vre_adder(0.25) - 2000.0).abs() < 1e-9);
        assert!((ex.vre_adder(0.70) - 9500.0).abs() < 1e-9);
        assert_eq!(ex.vre_adder(1.0), 15000.0);
    }
}
