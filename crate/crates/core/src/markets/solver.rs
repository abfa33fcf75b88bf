//! Damped fixed-point market clearing for one period.
//!
//! Prices of resource-backed commodities come off their graded supply
//! curves; produced carriers price at generation-weighted average cost;
//! service prices are logit inclusive values. Starting from the prior
//! period's prices, each iteration re-evaluates demand and target prices
//! and moves the vector a damped step toward the target until the maximum
//! relative gap falls under tolerance. One solver instance per scenario
//! run; iteration order is fixed, so identical inputs give bit-identical
//! solutions.

use log::{debug, trace};

use crate::choice;
use crate::markets::{
    dispatch_power, resource_price, service_demand, MarketError, PeriodSolution, PowerInputs,
    PriceVector, RunState,
};
use crate::model::{series_at, CommodityKind, ModelInstance};

/// Damping exponent of the price update.
pub const DAMPING: f64 = 0.25;
/// Convergence threshold on the maximum relative market imbalance.
pub const TOLERANCE: f64 = 1e-4;
/// Iteration cap before giving up.
pub const MAX_ITERATIONS: usize = 500;
/// Largest single-iteration price move, as a multiplicative factor.
const MAX_STEP: f64 = 2.0;

struct Evaluation {
    quantities: Vec<f64>,
    tech_output: Vec<f64>,
    new_capacity: Vec<f64>,
    capacity: Vec<f64>,
    /// Target price per commodity; NaN where the commodity is not part of
    /// the damped set (services, permits — set directly).
    targets: Vec<f64>,
    service_prices: Vec<(usize, f64)>,
    scarce: Vec<usize>,
    vre_share: f64,
    dac_removal: f64,
}

fn evaluate(
    instance: &ModelInstance,
    state: &RunState,
    prices: &[f64],
    vre_share: f64,
    carbon_price: f64,
) -> Result<Evaluation, MarketError> {
    let year = state.year;
    let n_comm = instance.commodities.len();
    let n_tech = instance.techs.len();
    let mut demand = vec![0.0; n_comm];
    let mut tech_output = vec![0.0; n_tech];
    let mut service_prices = Vec::new();

    let pop_ratio = instance.macro_drivers.population[&year] / instance.base.population;
    let gdppc_ratio = instance.macro_drivers.gdp_per_capita[&year] / instance.base.gdp_per_capita;

    // End-use sectors: price the tree, size service demand, allocate.
    for (si, sector) in instance.sectors.iter().enumerate() {
        if si == instance.power_sector {
            continue;
        }
        let spec = sector.demand.as_ref().expect("validated end-use sector");
        let mut nest_prices = Vec::with_capacity(sector.nests.len());
        let mut nest_weights = Vec::with_capacity(sector.nests.len());
        let mut nest_shares_within: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
        for nest in &sector.nests {
            let mut costs = Vec::with_capacity(nest.techs.len());
            let mut weights = Vec::with_capacity(nest.techs.len());
            for &ti in &nest.techs {
                let t = &instance.techs[ti];
                let c = choice::levelized_cost(t, prices, &instance.commodities, carbon_price)?;
                costs.push(c.max(choice::COST_FLOOR));
                weights.push(t.weight(year, &instance.bans, ti));
            }
            if weights.iter().all(|&w| w <= 0.0) {
                nest_prices.push(1.0);
                nest_weights.push(0.0);
                nest_shares_within.push((nest.techs.clone(), vec![0.0; nest.techs.len()]));
                continue;
            }
            nest_prices.push(choice::nest_price(&costs, &weights, nest.exponent)?);
            nest_weights.push(nest.calibrated_weight);
            let shares = choice::logit_shares(&costs, &weights, nest.exponent)?;
            nest_shares_within.push((nest.techs.clone(), shares));
        }
        let root_price = choice::nest_price(&nest_prices, &nest_weights, sector.exponent)?;
        let nest_shares = choice::logit_shares(&nest_prices, &nest_weights, sector.exponent)?;
        let d = service_demand(
            spec.base_service,
            gdppc_ratio,
            root_price / sector.base_price,
            pop_ratio,
            spec.income_elasticity,
            spec.price_elasticity,
        );
        service_prices.push((sector.output, root_price));
        demand[sector.output] += d;
        for (ni, (techs, shares)) in nest_shares_within.iter().enumerate() {
            for (k, &ti) in techs.iter().enumerate() {
                let out = d * nest_shares[ni] * shares[k];
                if out > 0.0 {
                    tech_output[ti] += out;
                    for &(ci, intensity) in &instance.techs[ti].inputs {
                        demand[ci] += out * intensity;
                    }
                }
            }
        }
    }

    // Direct air capture: deployment ramps linearly in the carbon price
    // above its levelized cost, up to the period's potential.
    let mut dac_removal = 0.0;
    if let Some(dac) = instance.removal_tech {
        let potential = series_at(&instance.exogenous.dac_potential, year).unwrap_or(0.0);
        if potential > 0.0 {
            let t = &instance.techs[dac];
            let cost =
                choice::levelized_cost(t, prices, &instance.commodities, carbon_price)?;
            let width = instance.dac_ramp_width.unwrap_or(cost).max(1e-6);
            let frac = ((carbon_price - cost) / width).clamp(0.0, 1.0);
            dac_removal = potential * frac;
            if dac_removal > 0.0 {
                tech_output[dac] += dac_removal;
                demand[t.output] += dac_removal;
                for &(ci, intensity) in &t.inputs {
                    demand[ci] += dac_removal * intensity;
                }
            }
        }
    }

    // Power dispatch at the accumulated electricity demand.
    let vre_adder = instance.exogenous.vre_adder(vre_share);
    let dispatch = dispatch_power(
        instance,
        &PowerInputs {
            year,
            demand: demand[instance.electricity],
            stock: &state.stock,
            prices,
            carbon_price,
            vre_adder,
        },
    )?;
    for ti in instance.power_techs() {
        if dispatch.output[ti] > 0.0 {
            tech_output[ti] += dispatch.output[ti];
            for &(ci, intensity) in &instance.techs[ti].inputs {
                demand[ci] += dispatch.output[ti] * intensity;
            }
        }
    }

    // Target prices for the damped set: resources off their supply curves,
    // electricity at blended cost.
    let step_years = instance.grid.step as f64;
    let mut targets = vec![f64::NAN; n_comm];
    let mut scarce = Vec::new();
    for (ci, c) in instance.commodities.iter().enumerate() {
        if let Some(&ri) = instance.resource_of.get(&ci) {
            let r = &instance.resources[ri];
            let d = if r.cumulative_tracking {
                demand[ci] * step_years
            } else {
                demand[ci]
            };
            let quote = resource_price(r, d, state.cumulative[ri]);
            targets[ci] = quote.price;
            if quote.scarce {
                scarce.push(ci);
            }
        } else if ci == instance.electricity {
            targets[ci] = dispatch.blended_price;
        } else {
            let _ = c;
        }
    }

    Ok(Evaluation {
        quantities: demand,
        tech_output,
        new_capacity: dispatch.new_capacity,
        capacity: dispatch.capacity,
        targets,
        service_prices,
        scarce,
        vre_share: dispatch.vre_share,
        dac_removal,
    })
}

/// Clear all markets of one period at a fixed carbon price.
pub fn solve_period(
    instance: &ModelInstance,
    state: &RunState,
    carbon_price: f64,
) -> Result<PeriodSolution, MarketError> {
    let mut prices = state.prices.0.clone();
    let mut vre_share = state.vre_share;
    let mut best: Option<(f64, PeriodSolution)> = None;

    for iter in 0..MAX_ITERATIONS {
        let eval = evaluate(instance, state, &prices, vre_share, carbon_price)?;
        // Residual: relative distance of the damped set from its targets.
        let mut residual: f64 = 0.0;
        for ci in 0..prices.len() {
            let t = eval.targets[ci];
            if t.is_finite() {
                let gap = (t - prices[ci]).abs() / t.max(prices[ci]).max(1e-9);
                residual = residual.max(gap);
            }
        }
        trace!("year {} iter {iter}: residual {residual:.3e}", state.year);

        let mut solution = PeriodSolution {
            year: state.year,
            carbon_price,
            prices: PriceVector(prices.clone()),
            quantities: eval.quantities,
            tech_output: eval.tech_output,
            new_capacity: eval.new_capacity,
            capacity_gw: eval.capacity,
            residual,
            iterations: iter + 1,
            scarce: eval.scarce,
            vre_share: eval.vre_share,
            dac_removal: eval.dac_removal,
        };
        // Report converged prices at their targets; services and permits
        // are quoted directly.
        for ci in 0..solution.prices.0.len() {
            if eval.targets[ci].is_finite() {
                solution.prices.0[ci] = eval.targets[ci];
            }
        }
        for &(ci, p) in &eval.service_prices {
            solution.prices.0[ci] = p;
        }
        for (ci, c) in instance.commodities.iter().enumerate() {
            if c.kind == CommodityKind::EmissionsPermit {
                solution.prices.0[ci] = carbon_price;
            }
        }

        if residual < TOLERANCE {
            debug!(
                "year {} converged in {} iterations (residual {residual:.3e})",
                state.year,
                iter + 1
            );
            return Ok(solution);
        }
        if best.as_ref().map(|(r, _)| residual < *r).unwrap_or(true) {
            best = Some((residual, solution));
        }

        // Damped multiplicative update toward targets.
        for ci in 0..prices.len() {
            let t = eval.targets[ci];
            if !t.is_finite() {
                continue;
            }
            let current = prices[ci].max(1e-12);
            let factor = (t.max(1e-12) / current)
                .powf(DAMPING)
                .clamp(1.0 / MAX_STEP, MAX_STEP);
            prices[ci] = current * factor;
        }
        vre_share += 0.5 * (eval.vre_share - vre_share);
    }

    let (residual, solution) = best.expect("at least one iterate");
    Err(MarketError::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
        best: Box::new(solution),
    })
}
