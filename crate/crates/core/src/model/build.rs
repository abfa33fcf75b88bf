//! Dataset validation and resolution into a runnable [`ModelInstance`].
//!
//! `build_model` is a pure function: the same dataset always yields an
//! identical instance. All cross-references (commodities, technologies,
//! nests, pins, calibration rows) are resolved to indices here so the
//! solver never looks up an undeclared entity at runtime.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::choice::{self, ChoiceError};
use crate::model::types::*;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("technology '{tech}' consumes commodity '{commodity}' which has no producer or resource")]
    DanglingCommodity { tech: String, commodity: String },
    #[error("observed shares in {scope} sum to {sum}, expected 1")]
    BadSharesSum { scope: String, sum: f64 },
    #[error("technology '{tech}' input '{commodity}' has non-positive intensity {intensity}")]
    NonPositiveIntensity {
        tech: String,
        commodity: String,
        intensity: f64,
    },
    #[error("unknown commodity '{commodity}' referenced by {referrer}")]
    UnknownCommodity { commodity: String, referrer: String },
    #[error("unknown technology '{tech}' referenced by {referrer}")]
    UnknownTechnology { tech: String, referrer: String },
    #[error("{entity}: {reason}")]
    Invalid { entity: String, reason: String },
    #[error("calibration error in {scope}: {source}")]
    Calibration {
        scope: String,
        #[source]
        source: ChoiceError,
    },
}

fn invalid(entity: impl Into<String>, reason: impl Into<String>) -> BuildError {
    BuildError::Invalid {
        entity: entity.into(),
        reason: reason.into(),
    }
}

/// A technology with all commodity references resolved to indices and its
/// base-year calibrated share weight attached.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTech {
    pub id: String,
    pub sector: String,
    pub nest: String,
    pub output: usize,
    pub inputs: Vec<(usize, f64)>,
    pub non_energy_cost: f64,
    pub emission_factor: f64,
    pub capture_fraction: f64,
    pub biogenic: bool,
    pub lifetime: u32,
    pub capacity_factor: f64,
    pub first_available_year: u32,
    pub share_weight_path: Vec<(u32, f64)>,
    pub potential_gw: Option<f64>,
    pub vre: bool,
    /// Base-year calibrated weight; zero for entrants.
    pub calibrated_weight: f64,
    /// Zero observed base share: the share-weight path is used as an
    /// absolute weight on the calibrated (max = 1) scale.
    pub entrant: bool,
}

impl ResolvedTech {
    /// Effective logit weight at `year`, after scenario bans.
    pub fn weight(&self, year: u32, bans: &[(usize, u32)], index: usize) -> f64 {
        if year < self.first_available_year {
            return 0.0;
        }
        for &(banned, from) in bans {
            if banned == index && year >= from {
                return 0.0;
            }
        }
        let mult = interpolate_path(&self.share_weight_path, year).unwrap_or(1.0);
        if self.entrant {
            mult
        } else {
            self.calibrated_weight * mult
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedNest {
    pub id: String,
    pub exponent: f64,
    pub techs: Vec<usize>,
    pub calibrated_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSector {
    pub id: String,
    pub output: usize,
    pub exponent: f64,
    pub demand: Option<DemandSpec>,
    pub nests: Vec<ResolvedNest>,
    /// Inclusive-value price of the sector at base-year prices.
    pub base_price: f64,
}

/// Base-year reference state used for demand ratios and solver seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseYearState {
    pub prices: Vec<f64>,
    pub population: f64,
    pub gdp_per_capita: f64,
    /// Power generation share by tech index at the base year.
    pub power_mix: Vec<(usize, f64)>,
    /// Renewable (vre) share of base-year generation.
    pub vre_share: f64,
}

/// Validated, index-resolved model. Immutable after build; scenario
/// application clones it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    pub grid: TimeGrid,
    pub commodities: Vec<Commodity>,
    pub techs: Vec<ResolvedTech>,
    pub sectors: Vec<ResolvedSector>,
    /// Index into `sectors` of the power tree.
    pub power_sector: usize,
    pub resources: Vec<GradedResource>,
    /// Commodity index → resource index.
    pub resource_of: BTreeMap<usize, usize>,
    pub macro_drivers: MacroDrivers,
    pub exogenous: ExogenousSeries,
    pub history: Vec<HistoryRow>,
    /// (tech index, year) → GW, applied in every scenario (observed years).
    pub capacity_pins: BTreeMap<(usize, u32), f64>,
    /// (tech index, year) → GW from the national power-plan profile,
    /// applied only when a scenario opts into exogenous trajectories.
    pub plan_pins: BTreeMap<(usize, u32), f64>,
    pub base: BaseYearState,
    /// Direct-air-capture technology, if the dataset ships one.
    pub removal_tech: Option<usize>,
    /// Width of the DAC deployment ramp in MUSD/Mt; `None` means one
    /// levelized cost (full potential at twice the levelized cost).
    pub dac_ramp_width: Option<f64>,
    pub storage_commodity: Option<usize>,
    pub electricity: usize,
    /// Investment bans (tech index, from year); populated by scenarios.
    pub bans: Vec<(usize, u32)>,
    pub dataset_checksum: String,
}

impl ModelInstance {
    pub fn commodity_index(&self, id: &str) -> Option<usize> {
        self.commodities.iter().position(|c| c.id == id)
    }

    pub fn tech_index(&self, id: &str) -> Option<usize> {
        self.techs.iter().position(|t| t.id == id)
    }

    pub fn is_power_tech(&self, tech: usize) -> bool {
        self.techs[tech].sector == well_known::POWER
    }

    /// Power technologies in deterministic (sector-tree) order.
    pub fn power_techs(&self) -> Vec<usize> {
        self.sectors[self.power_sector]
            .nests
            .iter()
            .flat_map(|n| n.techs.iter().copied())
            .collect()
    }

    pub fn sector_index(&self, id: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s.id == id)
    }
}

/// Interpolate a year-keyed series; flat outside the covered range.
pub fn series_at(series: &BTreeMap<u32, f64>, year: u32) -> Option<f64> {
    if series.is_empty() {
        return None;
    }
    if let Some(v) = series.get(&year) {
        return Some(*v);
    }
    let before = series.range(..year).next_back();
    let after = series.range(year + 1..).next();
    match (before, after) {
        (Some((&y0, &v0)), Some((&y1, &v1))) => {
            Some(v0 + (v1 - v0) * (year - y0) as f64 / (y1 - y0) as f64)
        }
        (Some((_, &v0)), None) => Some(v0),
        (None, Some((_, &v1))) => Some(v1),
        (None, None) => None,
    }
}

/// Validate a dataset and resolve it into a runnable instance.
pub fn build_model(dataset: &ModelDataset) -> Result<ModelInstance, BuildError> {
    dataset
        .timegrid
        .validate()
        .map_err(|e| invalid("timegrid", e))?;
    let grid = dataset.timegrid.clone();

    // Commodities: unique ids.
    let mut commodity_idx = BTreeMap::new();
    for (i, c) in dataset.commodities.iter().enumerate() {
        if commodity_idx.insert(c.id.clone(), i).is_some() {
            return Err(invalid(format!("commodity '{}'", c.id), "duplicate id"));
        }
    }
    let lookup_commodity = |id: &str, referrer: &str| -> Result<usize, BuildError> {
        commodity_idx
            .get(id)
            .copied()
            .ok_or_else(|| BuildError::UnknownCommodity {
                commodity: id.to_string(),
                referrer: referrer.to_string(),
            })
    };

    // Resources.
    let mut resource_of = BTreeMap::new();
    for (ri, r) in dataset.resources.iter().enumerate() {
        let ci = lookup_commodity(&r.commodity, &format!("resource #{ri}"))?;
        if resource_of.insert(ci, ri).is_some() {
            return Err(invalid(
                format!("resource '{}'", r.commodity),
                "duplicate resource for commodity",
            ));
        }
        if r.grades.is_empty() {
            return Err(invalid(format!("resource '{}'", r.commodity), "no grades"));
        }
        let mut prev = f64::NEG_INFINITY;
        for g in &r.grades {
            if g.quantity <= 0.0 {
                return Err(invalid(
                    format!("resource '{}'", r.commodity),
                    format!("grade quantity {} must be positive", g.quantity),
                ));
            }
            if g.cost <= prev {
                return Err(invalid(
                    format!("resource '{}'", r.commodity),
                    "grade costs must be strictly increasing",
                ));
            }
            prev = g.cost;
        }
    }

    // Technologies.
    let mut tech_idx = BTreeMap::new();
    let mut techs: Vec<ResolvedTech> = Vec::with_capacity(dataset.technologies.len());
    for t in &dataset.technologies {
        if tech_idx.insert(t.id.clone(), techs.len()).is_some() {
            return Err(invalid(format!("technology '{}'", t.id), "duplicate id"));
        }
        let output = lookup_commodity(&t.output, &format!("technology '{}'", t.id))?;
        let mut inputs = Vec::with_capacity(t.inputs.len());
        for inp in &t.inputs {
            if inp.intensity <= 0.0 {
                return Err(BuildError::NonPositiveIntensity {
                    tech: t.id.clone(),
                    commodity: inp.commodity.clone(),
                    intensity: inp.intensity,
                });
            }
            let ci = lookup_commodity(&inp.commodity, &format!("technology '{}'", t.id))?;
            inputs.push((ci, inp.intensity));
        }
        if !(0.0..=1.0).contains(&t.capture_fraction) {
            return Err(invalid(
                format!("technology '{}'", t.id),
                format!("capture fraction {} outside [0,1]", t.capture_fraction),
            ));
        }
        if t.emission_factor < 0.0 {
            return Err(invalid(
                format!("technology '{}'", t.id),
                format!("emission factor {} negative", t.emission_factor),
            ));
        }
        if t.lifetime < grid.step {
            return Err(invalid(
                format!("technology '{}'", t.id),
                format!("lifetime {} shorter than the {}-year step", t.lifetime, grid.step),
            ));
        }
        if !(t.capacity_factor > 0.0 && t.capacity_factor <= 1.0) {
            return Err(invalid(
                format!("technology '{}'", t.id),
                format!("capacity factor {} outside (0,1]", t.capacity_factor),
            ));
        }
        if t.share_weight_path.iter().any(|&(_, m)| m < 0.0) {
            return Err(invalid(
                format!("technology '{}'", t.id),
                "negative share-weight multiplier",
            ));
        }
        if t.capture_fraction > 0.0 {
            let expected = t.capture_fraction * t.emission_factor;
            let ok = t.inputs.iter().any(|inp| {
                commodity_idx
                    .get(&inp.commodity)
                    .map(|&ci| dataset.commodities[ci].kind == CommodityKind::StorageResource)
                    .unwrap_or(false)
                    && (inp.intensity - expected).abs() <= 1e-9 * expected.max(1.0)
            });
            if !ok {
                return Err(invalid(
                    format!("technology '{}'", t.id),
                    format!(
                        "capture fraction {} requires a storage input with intensity {}",
                        t.capture_fraction, expected
                    ),
                ));
            }
        }
        techs.push(ResolvedTech {
            id: t.id.clone(),
            sector: t.sector.clone(),
            nest: t.nest.clone(),
            output,
            inputs,
            non_energy_cost: t.non_energy_cost,
            emission_factor: t.emission_factor,
            capture_fraction: t.capture_fraction,
            biogenic: t.biogenic,
            lifetime: t.lifetime,
            capacity_factor: t.capacity_factor,
            first_available_year: t.first_available_year,
            share_weight_path: t.share_weight_path.clone(),
            potential_gw: t.potential_gw,
            vre: t.vre,
            calibrated_weight: 0.0,
            entrant: true,
        });
    }

    // Every technology input must have a producer or a graded resource.
    for t in &dataset.technologies {
        for inp in &t.inputs {
            let ci = commodity_idx[&inp.commodity];
            let produced = dataset.technologies.iter().any(|p| p.output == inp.commodity);
            if !produced && !resource_of.contains_key(&ci) {
                return Err(BuildError::DanglingCommodity {
                    tech: t.id.clone(),
                    commodity: inp.commodity.clone(),
                });
            }
        }
    }

    // Sector trees.
    let mut sectors: Vec<ResolvedSector> = Vec::with_capacity(dataset.sectors.len());
    let mut seen_sector = BTreeMap::new();
    for s in &dataset.sectors {
        if seen_sector.insert(s.id.clone(), ()).is_some() {
            return Err(invalid(format!("sector '{}'", s.id), "duplicate id"));
        }
        if s.logit_exponent >= 0.0 {
            return Err(invalid(
                format!("sector '{}'", s.id),
                format!("logit exponent {} must be negative", s.logit_exponent),
            ));
        }
        if let Some(d) = &s.demand {
            if d.price_elasticity > 0.0 {
                return Err(invalid(
                    format!("sector '{}'", s.id),
                    format!("price elasticity {} must be <= 0", d.price_elasticity),
                ));
            }
            if d.base_service <= 0.0 {
                return Err(invalid(
                    format!("sector '{}'", s.id),
                    "base service must be positive",
                ));
            }
        }
        let output = lookup_commodity(&s.output, &format!("sector '{}'", s.id))?;
        let mut nests = Vec::with_capacity(s.nests.len());
        for n in &s.nests {
            if n.logit_exponent >= 0.0 {
                return Err(invalid(
                    format!("nest '{}/{}'", s.id, n.id),
                    format!("logit exponent {} must be negative", n.logit_exponent),
                ));
            }
            if n.techs.is_empty() {
                return Err(invalid(format!("nest '{}/{}'", s.id, n.id), "no technologies"));
            }
            let mut tids = Vec::with_capacity(n.techs.len());
            for tid in &n.techs {
                let ti = tech_idx
                    .get(tid)
                    .copied()
                    .ok_or_else(|| BuildError::UnknownTechnology {
                        tech: tid.clone(),
                        referrer: format!("nest '{}/{}'", s.id, n.id),
                    })?;
                let t = &techs[ti];
                if t.sector != s.id || t.nest != n.id {
                    return Err(invalid(
                        format!("technology '{tid}'"),
                        format!(
                            "placed in '{}/{}' but declares '{}/{}'",
                            s.id, n.id, t.sector, t.nest
                        ),
                    ));
                }
                if t.output != output {
                    return Err(invalid(
                        format!("technology '{tid}'"),
                        format!(
                            "outputs '{}' but sector '{}' produces '{}'",
                            dataset.commodities[t.output].id, s.id, dataset.commodities[output].id
                        ),
                    ));
                }
                tids.push(ti);
            }
            nests.push(ResolvedNest {
                id: n.id.clone(),
                exponent: n.logit_exponent,
                techs: tids,
                calibrated_weight: 0.0,
            });
        }
        sectors.push(ResolvedSector {
            id: s.id.clone(),
            output,
            exponent: s.logit_exponent,
            demand: s.demand.clone(),
            nests,
            base_price: 0.0,
        });
    }
    let power_sector = sectors
        .iter()
        .position(|s| s.id == well_known::POWER)
        .ok_or_else(|| invalid("sectors", "no 'power' sector tree"))?;

    // Units live on the commodity itself, so producer/consumer consistency
    // is structural. What remains: demand specs only on service outputs.
    for s in &sectors {
        let kind = dataset.commodities[s.output].kind;
        if s.demand.is_some() && kind != CommodityKind::EndUseService {
            return Err(invalid(
                format!("sector '{}'", s.id),
                "demand spec on a non-service output",
            ));
        }
    }

    // Macro drivers: positive, defined at the base year and every period.
    let check_macro = |name: &str, m: &BTreeMap<u32, f64>| -> Result<(), BuildError> {
        let mut years: Vec<u32> = vec![grid.base_year];
        years.extend(grid.years());
        for y in years {
            match m.get(&y) {
                Some(v) if *v > 0.0 => {}
                Some(v) => {
                    return Err(invalid(
                        format!("macro series '{name}'"),
                        format!("non-positive value {v} at {y}"),
                    ))
                }
                None => {
                    return Err(invalid(
                        format!("macro series '{name}'"),
                        format!("missing year {y}"),
                    ))
                }
            }
        }
        Ok(())
    };
    check_macro("population", &dataset.macro_drivers.population)?;
    check_macro("gdp_per_capita", &dataset.macro_drivers.gdp_per_capita)?;

    // Reserved entities.
    let electricity = lookup_commodity(well_known::ELECTRICITY, "model")?;
    let storage_commodity = commodity_idx.get(well_known::STORAGE).copied();
    let removal_tech = techs.iter().position(|t| t.sector == well_known::REMOVAL);

    // Capacity pins resolve to power techs.
    let mut capacity_pins = BTreeMap::new();
    for ((tid, year), gw) in &dataset.capacity_pins {
        let ti = tech_idx
            .get(tid)
            .copied()
            .ok_or_else(|| BuildError::UnknownTechnology {
                tech: tid.clone(),
                referrer: "capacity pins".to_string(),
            })?;
        if *gw < 0.0 {
            return Err(invalid(
                format!("capacity pin '{tid}' at {year}"),
                "negative capacity",
            ));
        }
        capacity_pins.insert((ti, *year), *gw);
    }
    // Observed years pin everywhere; plan years only under the reference
    // scenario profile.
    let plan_pins: BTreeMap<(usize, u32), f64> = capacity_pins
        .iter()
        .filter(|((_, y), _)| *y > 2020)
        .map(|(k, v)| (*k, *v))
        .collect();
    capacity_pins.retain(|(_, y), _| *y <= 2020);

    // ---- Calibration ----------------------------------------------------
    // Base-year prices: resources at their cheapest grade, electricity at
    // the generation-weighted levelized cost of the observed mix, services
    // at the calibrated inclusive value.
    let n_comm = dataset.commodities.len();
    let mut base_prices = vec![f64::NAN; n_comm];
    for (&ci, &ri) in &resource_of {
        base_prices[ci] = dataset.resources[ri].grades[0].cost;
    }
    if let Some(si) = storage_commodity {
        if !resource_of.contains_key(&si) {
            return Err(invalid(
                format!("commodity '{}'", well_known::STORAGE),
                "storage commodity has no graded resource",
            ));
        }
        // Carbon price is zero in the base year; the permit/removal price
        // starts at zero too.
    }
    for c in &dataset.commodities {
        if c.kind == CommodityKind::EmissionsPermit {
            base_prices[commodity_idx[&c.id]] = 0.0;
        }
    }

    // Observed power mix.
    let power = &sectors[power_sector];
    let mut power_mix: Vec<(usize, f64)> = Vec::new();
    for n in &power.nests {
        let nest_share = *dataset
            .calibration
            .nest_shares
            .get(&(power.id.clone(), n.id.clone()))
            .ok_or_else(|| invalid(format!("nest '{}/{}'", power.id, n.id), "missing observed share"))?;
        for &ti in &n.techs {
            let t = &techs[ti];
            let share = *dataset
                .calibration
                .tech_shares
                .get(&(power.id.clone(), n.id.clone(), t.id.clone()))
                .ok_or_else(|| invalid(format!("technology '{}'", t.id), "missing observed share"))?;
            power_mix.push((ti, nest_share * share));
        }
    }
    let vre_share: f64 = power_mix
        .iter()
        .filter(|(ti, _)| techs[*ti].vre)
        .map(|(_, s)| s)
        .sum();

    // Electricity price from the observed mix at base fuel prices.
    let vre_adder = dataset.exogenous.vre_adder(vre_share);
    let mut elec_price = 0.0;
    for &(ti, share) in &power_mix {
        if share == 0.0 {
            continue;
        }
        let c = choice::levelized_cost(&techs[ti], &base_prices, &dataset.commodities, 0.0)
            .map_err(|e| BuildError::Calibration {
                scope: format!("base cost of '{}'", techs[ti].id),
                source: e,
            })?;
        let c = if techs[ti].vre { c + vre_adder } else { c };
        elec_price += share * c;
    }
    base_prices[electricity] = elec_price;

    // Hydrogen and any other produced-but-resource-backed commodities are
    // already priced; remaining produced carriers take their producer cost.
    for (ci, c) in dataset.commodities.iter().enumerate() {
        if !base_prices[ci].is_nan() || c.kind == CommodityKind::EndUseService {
            continue;
        }
        // Not a resource, not electricity: price at the cheapest producing
        // tech's base levelized cost, if any.
        let mut best = f64::NAN;
        for t in &techs {
            if t.output == ci {
                if let Ok(cost) = choice::levelized_cost(t, &base_prices, &dataset.commodities, 0.0)
                {
                    if best.is_nan() || cost < best {
                        best = cost;
                    }
                }
            }
        }
        base_prices[ci] = best;
    }

    // Calibrate share weights bottom-up for every sector, then price the
    // tree. Sectors other than power consume electricity, so power goes
    // first (sector order in the dataset is respected otherwise).
    let mut order: Vec<usize> = (0..sectors.len()).collect();
    order.sort_by_key(|&i| if i == power_sector { 0 } else { 1 });
    for &si in &order {
        let sector = &mut sectors[si];
        let mut nest_prices = Vec::with_capacity(sector.nests.len());
        let mut nest_ids = Vec::with_capacity(sector.nests.len());
        for n in &mut sector.nests {
            let mut costs = Vec::with_capacity(n.techs.len());
            let mut shares = Vec::with_capacity(n.techs.len());
            for &ti in &n.techs {
                let t = &techs[ti];
                let c = choice::levelized_cost(t, &base_prices, &dataset.commodities, 0.0)
                    .map_err(|e| BuildError::Calibration {
                        scope: format!("base cost of '{}'", t.id),
                        source: e,
                    })?;
                let c = if t.vre { c + vre_adder } else { c };
                costs.push(c.max(choice::COST_FLOOR));
                shares.push(
                    *dataset
                        .calibration
                        .tech_shares
                        .get(&(sector.id.clone(), n.id.clone(), t.id.clone()))
                        .ok_or_else(|| {
                            invalid(format!("technology '{}'", techs[ti].id), "missing observed share")
                        })?,
                );
            }
            let sum: f64 = shares.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(BuildError::BadSharesSum {
                    scope: format!("nest '{}/{}'", sector.id, n.id),
                    sum,
                });
            }
            let weights = choice::calibrate_share_weights(&shares, &costs, n.exponent).map_err(
                |e| BuildError::Calibration {
                    scope: format!("nest '{}/{}'", sector.id, n.id),
                    source: e,
                },
            )?;
            for (k, &ti) in n.techs.iter().enumerate() {
                techs[ti].calibrated_weight = weights[k];
                techs[ti].entrant = shares[k] == 0.0;
            }
            let p = choice::nest_price(&costs, &weights, n.exponent).map_err(|e| {
                BuildError::Calibration {
                    scope: format!("nest '{}/{}'", sector.id, n.id),
                    source: e,
                }
            })?;
            nest_prices.push(p);
            nest_ids.push(n.id.clone());
        }
        // Nest-level calibration within the sector.
        let mut nest_shares = Vec::with_capacity(sector.nests.len());
        for id in &nest_ids {
            nest_shares.push(
                *dataset
                    .calibration
                    .nest_shares
                    .get(&(sector.id.clone(), id.clone()))
                    .ok_or_else(|| invalid(format!("nest '{}/{}'", sector.id, id), "missing observed share"))?,
            );
        }
        let sum: f64 = nest_shares.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(BuildError::BadSharesSum {
                scope: format!("sector '{}'", sector.id),
                sum,
            });
        }
        let nest_weights =
            choice::calibrate_share_weights(&nest_shares, &nest_prices, sector.exponent).map_err(
                |e| BuildError::Calibration {
                    scope: format!("sector '{}'", sector.id),
                    source: e,
                },
            )?;
        for (k, n) in sector.nests.iter_mut().enumerate() {
            n.calibrated_weight = nest_weights[k];
        }
        sector.base_price =
            choice::nest_price(&nest_prices, &nest_weights, sector.exponent).map_err(|e| {
                BuildError::Calibration {
                    scope: format!("sector '{}'", sector.id),
                    source: e,
                }
            })?;
        if sector.demand.is_some() {
            base_prices[sector.output] = sector.base_price;
        }
    }

    let base = BaseYearState {
        prices: base_prices,
        population: dataset.macro_drivers.population[&grid.base_year],
        gdp_per_capita: dataset.macro_drivers.gdp_per_capita[&grid.base_year],
        power_mix,
        vre_share,
    };

    Ok(ModelInstance {
        grid,
        commodities: dataset.commodities.clone(),
        techs,
        sectors,
        power_sector,
        resources: dataset.resources.clone(),
        resource_of,
        macro_drivers: dataset.macro_drivers.clone(),
        exogenous: dataset.exogenous.clone(),
        history: dataset.history.clone(),
        capacity_pins,
        plan_pins,
        base,
        removal_tech,
        dac_ramp_width: None,
        storage_commodity,
        electricity,
        bans: Vec::new(),
        dataset_checksum: dataset.checksum.clone(),
    })
}
