//! Per-period market clearing: service demand, nested technology
//! allocation, vintaged power capacity, graded resource pricing, and the
//! damped fixed-point price solver.

mod demand;
mod power;
mod resource;
mod solver;

pub use demand::service_demand;
pub use power::{dispatch_power, DispatchResult, PowerInputs};
pub use resource::{resource_price, ResourceQuote};
pub use solver::{solve_period, DAMPING, MAX_ITERATIONS, TOLERANCE};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::choice::ChoiceError;
use crate::model::{ModelInstance, ResolvedTech};

#[derive(Debug, Error)]
pub enum MarketError {
    /// The fixed point did not reach tolerance; the best iterate is
    /// attached so callers can decide what to do with it.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<PeriodSolution>,
    },
    #[error("infeasible constraint set in {year}: {reason}")]
    InfeasibleConstraintSet { year: u32, reason: String },
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

/// Per-commodity prices, MUSD per commodity unit. Indexed like
/// `ModelInstance::commodities`; includes storage-resource and permit
/// prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector(pub Vec<f64>);

impl PriceVector {
    pub fn get(&self, commodity: usize) -> f64 {
        self.0[commodity]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vintage {
    pub install_year: u32,
    pub capacity_gw: f64,
}

/// Power capacity by installation period. Survival is a step schedule:
/// full capacity until `lifetime` years after install, zero after.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VintageStock {
    /// Tech index → vintages sorted by install year.
    pub by_tech: BTreeMap<usize, Vec<Vintage>>,
}

impl VintageStock {
    /// Surviving capacity of `tech` in `year`.
    pub fn surviving(&self, tech: usize, lifetime: u32, year: u32) -> f64 {
        self.by_tech
            .get(&tech)
            .map(|vs| {
                vs.iter()
                    .filter(|v| year.saturating_sub(v.install_year) < lifetime)
                    .map(|v| v.capacity_gw)
                    .sum()
            })
            .unwrap_or(0.0)
    }

    pub fn add(&mut self, tech: usize, year: u32, gw: f64) {
        if gw <= 0.0 {
            return;
        }
        let vs = self.by_tech.entry(tech).or_default();
        if let Some(v) = vs.iter_mut().find(|v| v.install_year == year) {
            v.capacity_gw += gw;
        } else {
            vs.push(Vintage {
                install_year: year,
                capacity_gw: gw,
            });
            vs.sort_by_key(|v| v.install_year);
        }
    }

    /// Trim surviving capacity down to `target_gw`, oldest vintages first.
    pub fn retire_to(&mut self, tech: usize, lifetime: u32, year: u32, target_gw: f64) {
        let Some(vs) = self.by_tech.get_mut(&tech) else {
            return;
        };
        let mut surviving: f64 = vs
            .iter()
            .filter(|v| year.saturating_sub(v.install_year) < lifetime)
            .map(|v| v.capacity_gw)
            .sum();
        for v in vs.iter_mut() {
            if surviving <= target_gw + 1e-12 {
                break;
            }
            if year.saturating_sub(v.install_year) >= lifetime {
                continue;
            }
            let cut = (surviving - target_gw).min(v.capacity_gw);
            v.capacity_gw -= cut;
            surviving -= cut;
        }
        vs.retain(|v| v.capacity_gw > 1e-12);
    }
}

/// Market-clearing result for one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSolution {
    pub year: u32,
    pub carbon_price: f64,
    pub prices: PriceVector,
    /// Cleared quantity per commodity (supply = demand).
    pub quantities: Vec<f64>,
    /// Output per technology, in its output unit.
    pub tech_output: Vec<f64>,
    /// New capacity per technology, GW (power techs only).
    pub new_capacity: Vec<f64>,
    /// Total standing capacity per technology, GW (power techs only).
    pub capacity_gw: Vec<f64>,
    /// Maximum relative market imbalance at the final iterate.
    pub residual: f64,
    pub iterations: usize,
    /// Commodities priced beyond their final resource grade.
    pub scarce: Vec<usize>,
    /// Renewable share of generation (feeds the integration-cost adder).
    pub vre_share: f64,
    /// Direct-air-capture removal, MtCO₂/yr.
    pub dac_removal: f64,
}

/// Mutable per-run state carried across periods.
#[derive(Debug, Clone, PartialEq)]
pub struct RunState {
    /// Year about to be solved.
    pub year: u32,
    /// Prior-period prices (solver seed).
    pub prices: PriceVector,
    pub stock: VintageStock,
    /// Cumulative extraction per resource index (depletable only).
    pub cumulative: Vec<f64>,
    pub vre_share: f64,
}

impl RunState {
    /// Fresh state positioned at the first model year, with the power stock
    /// bootstrapped from historical capacity increments.
    pub fn initial(instance: &ModelInstance) -> Self {
        let mut stock = VintageStock::default();
        for ti in instance.power_techs() {
            let id = &instance.techs[ti].id;
            let mut series: Vec<(u32, f64)> = instance
                .history
                .iter()
                .filter(|h| &h.series == id && h.year <= instance.grid.first_model_year)
                .map(|h| (h.year, h.value))
                .collect();
            series.sort_by_key(|&(y, _)| y);
            let mut prev = 0.0;
            for (y, gw) in series {
                let added = gw - prev;
                if added > 0.0 {
                    stock.add(ti, y, added);
                }
                prev = gw;
            }
        }
        RunState {
            year: instance.grid.first_model_year,
            prices: PriceVector(instance.base.prices.clone()),
            stock,
            cumulative: vec![0.0; instance.resources.len()],
            vre_share: instance.base.vre_share,
        }
    }

    /// Commit an accepted solution and move to the next period.
    pub fn advance(&mut self, instance: &ModelInstance, solution: &PeriodSolution) {
        let year = solution.year;
        let step = instance.grid.step;
        // Capacity: pins force the stock to the pinned level; other power
        // techs append this period's additions.
        for ti in instance.power_techs() {
            let t = &instance.techs[ti];
            if let Some(pin) = effective_pin(instance, ti, year) {
                let surviving = self.stock.surviving(ti, t.lifetime, year);
                if surviving > pin {
                    self.stock.retire_to(ti, t.lifetime, year, pin);
                } else if pin > surviving {
                    self.stock.add(ti, year, pin - surviving);
                }
            } else if solution.new_capacity[ti] > 0.0 {
                self.stock.add(ti, year, solution.new_capacity[ti]);
            }
        }
        // Depletable resources: one period's extraction.
        for (ri, r) in instance.resources.iter().enumerate() {
            if r.cumulative_tracking {
                let ci = instance
                    .commodity_index(&r.commodity)
                    .expect("resource commodity resolved at build");
                self.cumulative[ri] += solution.quantities[ci] * step as f64;
            }
        }
        self.prices = solution.prices.clone();
        self.vre_share = solution.vre_share;
        self.year = year + step;
    }
}

/// Capacity pin for a tech in a year, if any (scenario plan pins are merged
/// into `capacity_pins` by `apply_scenario`).
pub fn effective_pin(instance: &ModelInstance, tech: usize, year: u32) -> Option<f64> {
    instance.capacity_pins.get(&(tech, year)).copied()
}

/// Varcost of running an existing vintage: fuel plus carbon, no capital.
pub fn variable_cost(
    tech: &ResolvedTech,
    prices: &[f64],
    carbon_price: f64,
    vre_adder: f64,
) -> f64 {
    let mut cost = 0.0;
    for &(ci, intensity) in &tech.inputs {
        let p = prices[ci];
        if p.is_finite() {
            cost += p * intensity;
        }
    }
    let net_rate = if tech.biogenic {
        -tech.capture_fraction * tech.emission_factor
    } else {
        (1.0 - tech.capture_fraction) * tech.emission_factor
    };
    cost += carbon_price * net_rate;
    if tech.vre {
        cost += vre_adder;
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vintage_survival_steps_to_zero() {
        let mut s = VintageStock::default();
        s.add(0, 2010, 10.0);
        s.add(0, 2020, 5.0);
        assert_eq!(s.surviving(0, 30, 2035), 15.0);
        assert_eq!(s.surviving(0, 30, 2040), 5.0); // 2010 vintage dead at age 30
        assert_eq!(s.surviving(0, 30, 2050), 0.0);
    }

    #[test]
    fn retirement_trims_oldest_first() {
        let mut s = VintageStock::default();
        s.add(0, 2000, 10.0);
        s.add(0, 2010, 10.0);
        s.retire_to(0, 60, 2020, 12.0);
        let vs = &s.by_tech[&0];
        assert_eq!(vs.len(), 2);
        assert!((vs[0].capacity_gw - 2.0).abs() < 1e-12);
        assert!((vs[1].capacity_gw - 10.0).abs() < 1e-12);
    }
}
