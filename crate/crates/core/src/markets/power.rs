//! Vintaged power-sector dispatch and new-capacity allocation.

use crate::choice;
use crate::markets::{effective_pin, variable_cost, MarketError, VintageStock};
use crate::model::ModelInstance;
use crate::EJ_PER_GW_YEAR;

/// Width of the economic-displacement band, as a fraction of the
/// new-entry price. A surviving vintage runs at full availability while
/// its variable cost stays below (1 − band) × new-entry price and is fully
/// displaced once variable cost reaches the new-entry price; displacement
/// is linear in between, which keeps dispatch continuous in prices.
const DISPLACEMENT_BAND: f64 = 0.2;

pub struct PowerInputs<'a> {
    pub year: u32,
    /// Electricity demand, EJ/yr.
    pub demand: f64,
    pub stock: &'a VintageStock,
    pub prices: &'a [f64],
    pub carbon_price: f64,
    /// Integration-cost adder applied to variable renewables, MUSD/EJ.
    pub vre_adder: f64,
}

#[derive(Debug, Clone)]
pub struct DispatchResult {
    /// Generation per tech index, EJ.
    pub output: Vec<f64>,
    /// New capacity per tech index, GW.
    pub new_capacity: Vec<f64>,
    /// Standing capacity per tech index after pins and additions, GW.
    pub capacity: Vec<f64>,
    /// Generation-weighted average cost of electricity, MUSD/EJ.
    pub blended_price: f64,
    /// Renewable share of generation.
    pub vre_share: f64,
}

/// Clear the power sector for one period.
///
/// Surviving vintages (and pinned capacity) generate in merit order by
/// variable cost up to demand; uneconomic vintages are displaced against
/// the new-entry price. Residual demand is met by new capacity allocated
/// by nested logit over levelized costs, subject to potential bounds.
pub fn dispatch_power(
    instance: &ModelInstance,
    inp: &PowerInputs,
) -> Result<DispatchResult, MarketError> {
    let n = instance.techs.len();
    let power_techs = instance.power_techs();
    let year = inp.year;

    let mut output = vec![0.0; n];
    let mut new_capacity = vec![0.0; n];
    let mut capacity = vec![0.0; n];

    // Standing capacity: pins override the surviving stock.
    for &ti in &power_techs {
        let t = &instance.techs[ti];
        let surviving = inp.stock.surviving(ti, t.lifetime, year);
        capacity[ti] = match effective_pin(instance, ti, year) {
            Some(pin) => {
                if pin > surviving {
                    new_capacity[ti] = pin - surviving;
                }
                pin
            }
            None => surviving,
        };
    }

    // New-entry costs per nest (unpinned, available techs only).
    let sector = &instance.sectors[instance.power_sector];
    let mut nest_prices = Vec::with_capacity(sector.nests.len());
    let mut nest_weights = Vec::with_capacity(sector.nests.len());
    let mut nest_candidates: Vec<Vec<(usize, f64, f64)>> = Vec::with_capacity(sector.nests.len());
    for nest in &sector.nests {
        let mut cands = Vec::new();
        for &ti in &nest.techs {
            let t = &instance.techs[ti];
            if effective_pin(instance, ti, year).is_some() {
                continue;
            }
            let w = t.weight(year, &instance.bans, ti);
            if w <= 0.0 {
                continue;
            }
            let mut c =
                choice::levelized_cost(t, inp.prices, &instance.commodities, inp.carbon_price)?;
            if t.vre {
                c += inp.vre_adder;
            }
            cands.push((ti, c.max(choice::COST_FLOOR), w));
        }
        if cands.is_empty() {
            nest_prices.push(f64::NAN);
            nest_weights.push(0.0);
            nest_candidates.push(cands);
            continue;
        }
        let costs: Vec<f64> = cands.iter().map(|c| c.1).collect();
        let weights: Vec<f64> = cands.iter().map(|c| c.2).collect();
        nest_prices.push(choice::nest_price(&costs, &weights, nest.exponent)?);
        nest_weights.push(nest.calibrated_weight);
        nest_candidates.push(cands);
    }
    let any_entry = nest_weights.iter().any(|&w| w > 0.0);
    let entry_price = if any_entry {
        let costs: Vec<f64> = nest_prices
            .iter()
            .map(|&p| if p.is_finite() { p } else { 1.0 })
            .collect();
        Some(choice::nest_price(&costs, &nest_weights, sector.exponent)?)
    } else {
        None
    };

    // Merit-order dispatch of standing capacity.
    let mut merit: Vec<(usize, f64)> = power_techs
        .iter()
        .map(|&ti| {
            let vc = variable_cost(
                &instance.techs[ti],
                inp.prices,
                inp.carbon_price,
                if instance.techs[ti].vre { inp.vre_adder } else { 0.0 },
            );
            (ti, vc)
        })
        .collect();
    merit.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| instance.techs[a.0].id.cmp(&instance.techs[b.0].id))
    });

    let mut remaining = inp.demand;
    for &(ti, vc) in &merit {
        if remaining <= 0.0 {
            break;
        }
        let t = &instance.techs[ti];
        let avail = match entry_price {
            Some(p_ref) if p_ref > 0.0 => {
                ((p_ref - vc) / (DISPLACEMENT_BAND * p_ref)).clamp(0.0, 1.0)
            }
            _ => 1.0,
        };
        let potential = capacity[ti] * t.capacity_factor * EJ_PER_GW_YEAR * avail;
        let gen = potential.min(remaining);
        output[ti] += gen;
        remaining -= gen;
    }

    // Residual demand met by new builds.
    if remaining > 1e-12 {
        if !any_entry {
            return Err(MarketError::InfeasibleConstraintSet {
                year,
                reason: format!(
                    "{remaining:.4} EJ of electricity demand with no investable technology"
                ),
            });
        }
        // Combined shares over nests and techs.
        let np: Vec<f64> = nest_prices
            .iter()
            .map(|&p| if p.is_finite() { p } else { 1.0 })
            .collect();
        let nest_shares = choice::logit_shares(&np, &nest_weights, sector.exponent)?;
        let mut alloc: Vec<(usize, f64)> = Vec::new();
        for (ni, cands) in nest_candidates.iter().enumerate() {
            if nest_shares[ni] == 0.0 || cands.is_empty() {
                continue;
            }
            let costs: Vec<f64> = cands.iter().map(|c| c.1).collect();
            let weights: Vec<f64> = cands.iter().map(|c| c.2).collect();
            let shares = choice::logit_shares(&costs, &weights, sector.nests[ni].exponent)?;
            for (k, &(ti, _, _)) in cands.iter().enumerate() {
                let s = nest_shares[ni] * shares[k];
                if s > 0.0 {
                    alloc.push((ti, s * remaining));
                }
            }
        }
        // Potential bounds: clip and redistribute.
        let headroom = |ti: usize, built: f64| -> f64 {
            match instance.techs[ti].potential_gw {
                Some(p) =>

                    ((p - capacity[ti] - built).max(0.0))
                        * instance.techs[ti].capacity_factor
                        * EJ_PER_GW_YEAR,
                None => f64::INFINITY,
            }
        };
        let mut assigned = vec![0.0; n];
        let mut pending = alloc;
        for _ in 0..n + 1 {
            let mut spill = 0.0;
            let mut open: Vec<(usize, f64)> = Vec::new();
            for &(ti, want) in &pending {
                let room = headroom(ti, assigned[ti]);
                if want > room {
                    assigned[ti] += room;
                    spill += want - room;
                } else {
                    assigned[ti] += want;
                    open.push((ti, want));
                }
            }
            if spill <= 1e-12 {
                pending.clear();
                break;
            }
            let open_total: f64 = open.iter().map(|&(_, w)| w).sum();
            if open_total <= 0.0 {
                return Err(MarketError::InfeasibleConstraintSet {
                    year,
                    reason: format!("{spill:.4} EJ exceeds all remaining technical potential"),
                });
            }
            pending = open
                .iter()
                .map(|&(ti, w)| (ti, spill * w / open_total))
                .collect();
        }
        for ti in 0..n {
            if assigned[ti] > 0.0 {
                let t = &instance.techs[ti];
                output[ti] += assigned[ti];
                let gw = assigned[ti] / (t.capacity_factor * EJ_PER_GW_YEAR);
                new_capacity[ti] += gw;
                capacity[ti] += gw;
            }
        }
    }

    // Blended average cost prices the carrier.
    let total: f64 = power_techs.iter().map(|&ti| output[ti]).sum();
    let mut blended = 0.0;
    let mut vre_gen = 0.0;
    if total > 0.0 {
        for &ti in &power_techs {
            if output[ti] == 0.0 {
                continue;
            }
            let t = &instance.techs[ti];
            let mut c =
                choice::levelized_cost(t, inp.prices, &instance.commodities, inp.carbon_price)?;
            if t.vre {
                c += inp.vre_adder;
                vre_gen += output[ti];
            }
            blended += output[ti] * c;
        }
        blended /= total;
    } else {
        blended = entry_price.unwrap_or(inp.prices[instance.electricity]);
    }

    Ok(DispatchResult {
        output,
        new_capacity,
        capacity,
        blended_price: blended.max(choice::COST_FLOOR),
        vre_share: if total > 0.0 { vre_gen / total } else { 0.0 },
    })
}
