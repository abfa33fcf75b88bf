//! Feasibility dashboard: policy cost as %GDP, land-area claims, CO₂
//! storage drawdown against budgets, expansion rates against history, and
//! technical-potential headroom.

use log::debug;
use thiserror::Error;

use crate::emissions::account_emissions;
use crate::markets::solve_period;
use crate::model::well_known;
use crate::policy::{PolicyError, RunResult};

/// Seoul metropolitan area, km². Geographic constant used to express land
/// claims in familiar multiples.
pub const SEOUL_AREA_KM2: f64 = 605.2;
/// Land claim of utility solar PV, km² per GW (6.6 m² per kW).
pub const SOLAR_KM2_PER_GW: f64 = 6.6;
/// Land claim of nuclear plants including cooling works, km² per GW.
pub const NUCLEAR_KM2_PER_GW: f64 = 0.745;
/// Domestic CO₂ storage budget, GtCO₂.
pub const STORAGE_BUDGET_DOMESTIC_GT: f64 = 1.0;
/// Domestic plus prospected overseas storage, GtCO₂.
pub const STORAGE_BUDGET_TOTAL_GT: f64 = 2.0;
/// Default number of carbon-price samples for the abatement-cost curve.
pub const DEFAULT_MAC_SAMPLES: usize = 8;

#[derive(Debug, Error)]
pub enum FeasibilityError {
    #[error("run has no binding cap")]
    NoBindingCap,
    #[error("unknown technology class '{0}'")]
    UnknownTechClass(String),
    #[error("capacity and system-size series are misaligned: {0}")]
    MisalignedSeries(String),
    #[error("no technical potential configured for '{0}'")]
    UnknownPotential(String),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Policy(#[from] Box<PolicyError>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandClaim {
    pub km2: f64,
    pub seoul_multiples: f64,
}

/// Land required by a technology class at a given capacity.
pub fn land_requirement(capacity_gw: f64, tech_class: &str) -> Result<LandClaim, FeasibilityError> {
    let per_gw = match tech_class {
        "solar" => SOLAR_KM2_PER_GW,
        "nuclear" => NUCLEAR_KM2_PER_GW,
        other => return Err(FeasibilityError::UnknownTechClass(other.to_string())),
    };
    let km2 = capacity_gw * per_gw;
    Ok(LandClaim {
        km2,
        seoul_multiples: km2 / SEOUL_AREA_KM2,
    })
}

/// Wilson-style expansion rate: capacity added per period over total
/// system size, annualized by the period step.
pub fn expansion_rate(
    capacity_gw: &[(u32, f64)],
    system_gwh: &[(u32, f64)],
    step_years: u32,
) -> Result<Vec<(u32, f64)>, FeasibilityError> {
    if capacity_gw.len() != system_gwh.len() {
        return Err(FeasibilityError::MisalignedSeries(format!(
            "{} capacity points vs {} system points",
            capacity_gw.len(),
            system_gwh.len()
        )));
    }
    let mut rates = Vec::new();
    for i in 1..capacity_gw.len() {
        let (y, cap) = capacity_gw[i];
        let (ys, system) = system_gwh[i];
        if y != ys {
            return Err(FeasibilityError::MisalignedSeries(format!(
                "capacity year {y} vs system year {ys}"
            )));
        }
        if system <= 0.0 {
            return Err(FeasibilityError::MisalignedSeries(format!(
                "non-positive system size at {y}"
            )));
        }
        let delta = cap - capacity_gw[i - 1].1;
        rates.push((y, delta / system / step_years as f64));
    }
    Ok(rates)
}

/// Headroom against a configured technical potential; negative flags a
/// violation.
pub fn potential_check(capacity_gw: f64, potential_gw: Option<f64>, tech: &str) -> Result<f64, FeasibilityError> {
    match potential_gw {
        Some(p) => Ok(p - capacity_gw),
        None => Err(FeasibilityError::UnknownPotential(tech.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageDrawdown {
    /// Cumulative captured CO₂ at each model year, GtCO₂. A period's
    /// capture rate accrues over the following step, so the value at year
    /// `t` integrates rates of periods strictly before `t`.
    pub cumulative_gt: Vec<(u32, f64)>,
    pub crossed_domestic_budget: Option<u32>,
    pub crossed_total_budget: Option<u32>,
}

/// Cumulative storage use (all CCS plus DAC) with budget flags.
pub fn storage_drawdown(run: &RunResult) -> StorageDrawdown {
    let step = run.instance.grid.step as f64;
    let storage = run.instance.storage_commodity;
    let mut cumulative = 0.0;
    let mut series = Vec::with_capacity(run.periods.len());
    let mut crossed_domestic = None;
    let mut crossed_total = None;
    for (i, p) in run.periods.iter().enumerate() {
        if i > 0 {
            let prior = &run.periods[i - 1];
            let rate_mt = storage.map(|ci| prior.solution.quantities[ci]).unwrap_or(0.0);
            cumulative += rate_mt * step / 1000.0;
        }
        if cumulative >= STORAGE_BUDGET_DOMESTIC_GT && crossed_domestic.is_none() {
            crossed_domestic = Some(p.year);
        }
        if cumulative >= STORAGE_BUDGET_TOTAL_GT && crossed_total.is_none() {
            crossed_total = Some(p.year);
        }
        series.push((p.year, cumulative));
    }
    StorageDrawdown {
        cumulative_gt: series,
        crossed_domestic_budget: crossed_domestic,
        crossed_total_budget: crossed_total,
    }
}

/// Policy cost per binding period as percent of GDP.
///
/// The abatement-cost curve is traced by re-solving the period at
/// `n_samples` carbon prices spanning [0, τ*] from the stored incoming
/// state, then integrating ∫τ dA by trapezoid.
pub fn policy_cost(run: &RunResult, n_samples: usize) -> Result<Vec<(u32, f64)>, FeasibilityError> {
    if n_samples < 2 {
        return Err(FeasibilityError::TooFewSamples(n_samples));
    }
    if run.periods.iter().all(|p| {
        run.instance
            .grid
            .index_of(p.year)
            .and_then(|i| run.cap.binding(i))
            .is_none()
    }) {
        return Err(FeasibilityError::NoBindingCap);
    }

    let mut series = Vec::new();
    for (i, p) in run.periods.iter().enumerate() {
        let period = run.instance.grid.index_of(p.year).expect("grid year");
        if run.cap.binding(period).is_none() {
            continue;
        }
        let tau_star = p.carbon_price;
        if tau_star <= 0.0 {
            series.push((p.year, 0.0));
            continue;
        }
        let state = &run.incoming_states[i];
        let mut points = Vec::with_capacity(n_samples);
        for k in 0..n_samples {
            let tau = tau_star * k as f64 / (n_samples - 1) as f64;
            let solution = solve_period(&run.instance, state, tau).map_err(|source| {
                Box::new(PolicyError::Market {
                    year: p.year,
                    source,
                })
            })?;
            let net = account_emissions(&solution, &run.instance).net;
            points.push((tau, net));
        }
        let base_net = points[0].1;
        let mut cost_musd = 0.0;
        for w in points.windows(2) {
            let (tau0, net0) = w[0];
            let (tau1, net1) = w[1];
            let abated0 = base_net - net0;
            let abated1 = base_net - net1;
            cost_musd += 0.5 * (tau0 + tau1) * (abated1 - abated0);
        }
        let gdp = run
            .instance
            .macro_drivers
            .gdp_musd(p.year)
            .expect("macro covers model years");
        debug!(
            "policy cost {}: tau* {tau_star:.1}, {cost_musd:.0} MUSD, GDP {gdp:.0} MUSD",
            p.year
        );
        series.push((p.year, 100.0 * cost_musd / gdp));
    }
    Ok(series)
}

/// Full feasibility report for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub policy_cost_pct_gdp: Vec<(u32, f64)>,
    /// (tech class, year, claim).
    pub land: Vec<(String, u32, LandClaim)>,
    pub storage: StorageDrawdown,
    /// (tech, year, rate per year).
    pub expansion_rates: Vec<(String, u32, f64)>,
    /// (tech, year, headroom GW).
    pub potential_headroom: Vec<(String, u32, f64)>,
}

/// Assemble the dashboard. Policy cost is only sampled when a cap binds.
pub fn assess(run: &RunResult, n_samples: usize) -> Result<FeasibilityReport, FeasibilityError> {
    let instance = &run.instance;
    let policy_cost_pct_gdp = match policy_cost(run, n_samples) {
        Ok(s) => s,
        Err(FeasibilityError::NoBindingCap) => Vec::new(),
        Err(e) => return Err(e),
    };

    let mut land = Vec::new();
    let mut expansion = Vec::new();
    let mut headroom = Vec::new();

    // System size per model year, GWh.
    let system: Vec<(u32, f64)> = run
        .periods
        .iter()
        .map(|p| {
            let twh = crate::emissions::generation_twh(&p.solution, instance);
            (p.year, twh * 1000.0)
        })
        .collect();

    for ti in instance.power_techs() {
        let tech = &instance.techs[ti];
        let caps: Vec<(u32, f64)> = run
            .periods
            .iter()
            .map(|p| (p.year, p.solution.capacity_gw[ti]))
            .collect();
        if tech.id == "solar" || tech.id == "nuclear" {
            for &(y, gw) in &caps {
                land.push((tech.id.clone(), y, land_requirement(gw, &tech.id)?));
            }
        }
        for (y, rate) in expansion_rate(&caps, &system, instance.grid.step)? {
            expansion.push((tech.id.clone(), y, rate));
        }
        if tech.potential_gw.is_some() {
            for &(y, gw) in &caps {
                headroom.push((
                    tech.id.clone(),
                    y,
                    potential_check(gw, tech.potential_gw, &tech.id)?,
                ));
            }
        }
    }
    let _ = well_known::SYSTEM;

    Ok(FeasibilityReport {
        policy_cost_pct_gdp,
        land,
        storage: storage_drawdown(run),
        expansion_rates: expansion,
        potential_headroom: headroom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solar_land_in_seoul_multiples() {
        // 400 GW × 6.6 km²/GW = 2640 km² = 4.36 Seouls.
        let claim = land_requirement(400.0, "solar").unwrap();
        assert!((claim.km2 - 2640.0).abs() < 1e-9);
        assert!((claim.seoul_multiples - 4.3622).abs() < 0.01);
    }

    #[test]
    fn zero_capacity_zero_land() {
        let claim = land_requirement(0.0, "solar").unwrap();
        assert_eq!(claim.km2, 0.0);
    }

    #[test]
    fn nuclear_land() {
        let claim = land_requirement(10.0, "nuclear").unwrap();
        assert!((claim.km2 - 7.45).abs() < 1e-12);
    }

    #[test]
    fn unknown_class_rejected() {
        assert!(matches!(
            land_requirement(1.0, "geothermal"),
            Err(FeasibilityError::UnknownTechClass(_))
        ));
    }

    #[test]
    fn expansion_rate_flat_is_zero() {
        let caps = vec![(2020, 5.0), (2025, 5.0)];
        let sys = vec![(2020, 600_000.0), (2025, 600_000.0)];
        let r = expansion_rate(&caps, &sys, 5).unwrap();
        assert_eq!(r, vec![(2025, 0.0)]);
    }

    #[test]
    fn expansion_rate_hand_value() {
        // +10 GW over one 5-year step on a 600,000 GWh system.
        let caps = vec![(2020, 0.0), (2025, 10.0)];
        let sys = vec![(2020, 600_000.0), (2025, 600_000.0)];
        let r = expansion_rate(&caps, &sys, 5).unwrap();
        assert!((r[0].1 - 10.0 / 5.0 / 600_000.0).abs() < 1e-15);
    }

    #[test]
    fn expansion_rate_sign_follows_delta() {
        let caps = vec![(2020, 10.0), (2025, 4.0)];
        let sys = vec![(2020, 500_000.0), (2025, 500_000.0)];
        let r = expansion_rate(&caps, &sys, 5).unwrap();
        assert!(r[0].1 < 0.0);
    }

    #[test]
    fn misaligned_series_rejected() {
        let caps = vec![(2020, 5.0), (2025, 6.0)];
        let sys = vec![(2020, 600_000.0)];
        assert!(matches!(
            expansion_rate(&caps, &sys, 5),
            Err(FeasibilityError::MisalignedSeries(_))
        ));
    }

    #[test]
    fn potential_headroom_arithmetic() {
        assert_eq!(potential_check(400.0, Some(973.0), "solar").unwrap(), 573.0);
        assert_eq!(potential_check(352.0, Some(352.0), "wind-on").unwrap(), 0.0);
        let violated = potential_check(400.0, Some(387.0), "wind-off").unwrap();
        assert_eq!(violated, -13.0);
        assert!(violated < 0.0);
        assert!(matches!(
            potential_check(1.0, None, "gas"),
            Err(FeasibilityError::UnknownPotential(_))
        ));
    }
}
