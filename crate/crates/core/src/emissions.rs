//! Emissions accounting: gross, captured and negative CO₂ by sector, the
//! exogenous non-CO₂ wedge and LULUCF sink, and derived power-sector
//! indicators.
//!
//! Sign conventions: `gross` is CO₂ reaching the atmosphere after capture;
//! captured CO₂ is tracked separately and clears against the storage
//! market. Biogenic combustion is carbon-neutral gross, so captured
//! biogenic carbon books as a negative emission.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::markets::PeriodSolution;
use crate::model::{series_at, ModelInstance, Unit};
use crate::TWH_PER_EJ;

#[derive(Debug, Error, PartialEq)]
pub enum EmissionsError {
    #[error("zero generation")]
    ZeroGeneration,
    #[error("no negative emissions")]
    NoNegativeEmissions,
    #[error("sector '{0}' has no final energy")]
    EmptySector(String),
}

/// Reporting sectors of the national ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sector {
    Power,
    Industry,
    Buildings,
    Transport,
    Other,
}

impl Sector {
    pub const ALL: [Sector; 5] = [
        Sector::Power,
        Sector::Industry,
        Sector::Buildings,
        Sector::Transport,
        Sector::Other,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Sector::Power => "power",
            Sector::Industry => "industry",
            Sector::Buildings => "buildings",
            Sector::Transport => "transport",
            Sector::Other => "other",
        }
    }

    /// Map a model sector id onto a reporting sector.
    pub fn of(sector_id: &str) -> Sector {
        match sector_id {
            "power" => Sector::Power,
            "industry" => Sector::Industry,
            "buildings" => Sector::Buildings,
            s if s.starts_with("transport") => Sector::Transport,
            _ => Sector::Other,
        }
    }
}

/// One period of the emissions ledger. All values MtCO₂(e)/yr.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub year: u32,
    /// CO₂ to atmosphere by sector, after capture.
    pub gross: BTreeMap<Sector, f64>,
    /// CO₂ captured and routed to storage, by sector.
    pub captured: BTreeMap<Sector, f64>,
    /// Negative emissions by source.
    pub dac: f64,
    pub beccs: f64,
    pub lulucf: f64,
    /// Exogenous non-CO₂ gases, MtCO₂e.
    pub wedge: f64,
    /// `Σ gross − (dac + beccs + lulucf) + wedge`.
    pub net: f64,
}

impl LedgerRow {
    pub fn gross_total(&self) -> f64 {
        self.gross.values().sum()
    }

    pub fn captured_total(&self) -> f64 {
        self.captured.values().sum()
    }

    pub fn negative_total(&self) -> f64 {
        self.dac + self.beccs + self.lulucf
    }
}

/// Account one converged period.
pub fn account_emissions(solution: &PeriodSolution, instance: &ModelInstance) -> LedgerRow {
    let mut gross: BTreeMap<Sector, f64> = Sector::ALL.iter().map(|&s| (s, 0.0)).collect();
    let mut captured: BTreeMap<Sector, f64> = Sector::ALL.iter().map(|&s| (s, 0.0)).collect();
    let mut beccs = 0.0;

    for (ti, t) in instance.techs.iter().enumerate() {
        let out = solution.tech_output[ti];
        if out <= 0.0 || t.emission_factor == 0.0 {
            continue;
        }
        let sector = Sector::of(&t.sector);
        let cap_amt = t.capture_fraction * t.emission_factor * out;
        if t.biogenic {
            // Carbon-neutral gross; capture is a removal.
            *captured.get_mut(&sector).unwrap() += cap_amt;
            beccs += cap_amt;
        } else {
            *gross.get_mut(&sector).unwrap() += (1.0 - t.capture_fraction) * t.emission_factor * out;
            *captured.get_mut(&sector).unwrap() += cap_amt;
        }
    }

    let dac = solution.dac_removal;
    let lulucf = series_at(&instance.exogenous.lulucf_sink, solution.year).unwrap_or(0.0);
    let wedge = series_at(&instance.exogenous.non_co2_wedge, solution.year).unwrap_or(0.0);
    let gross_total: f64 = gross.values().sum();
    let net = gross_total - (dac + beccs + lulucf) + wedge;

    LedgerRow {
        year: solution.year,
        gross,
        captured,
        dac,
        beccs,
        lulucf,
        wedge,
        net,
    }
}

/// Net carbon intensity of electricity, gCO₂/kWh. Negative once captured
/// biogenic carbon outweighs residual fossil emissions.
pub fn carbon_intensity_power(ledger: &LedgerRow, generation_twh: f64) -> Result<f64, EmissionsError> {
    if generation_twh <= 0.0 {
        return Err(EmissionsError::ZeroGeneration);
    }
    // Mt over TWh: 1 Mt/TWh = 1000 g/kWh. BECCS removals attribute to power.
    let net_mt = ledger.gross[&Sector::Power] - ledger.beccs;
    Ok(net_mt / generation_twh * 1000.0)
}

/// Shares of DAC, BECCS and LULUCF in total negative emissions.
pub fn nets_breakdown(ledger: &LedgerRow) -> Result<(f64, f64, f64), EmissionsError> {
    let total = ledger.negative_total();
    if total <= 0.0 {
        return Err(EmissionsError::NoNegativeEmissions);
    }
    Ok((
        ledger.dac / total,
        ledger.beccs / total,
        ledger.lulucf / total,
    ))
}

/// Electricity share of a sector's final energy (energy-unit inputs only;
/// non-energy inputs such as CO₂ storage are excluded).
pub fn electrification_share(
    solution: &PeriodSolution,
    instance: &ModelInstance,
    sector_id: &str,
) -> Result<f64, EmissionsError> {
    let mut elec = 0.0;
    let mut total = 0.0;
    for (ti, t) in instance.techs.iter().enumerate() {
        if t.sector != sector_id {
            continue;
        }
        let out = solution.tech_output[ti];
        if out <= 0.0 {
            continue;
        }
        for &(ci, intensity) in &t.inputs {
            if instance.commodities[ci].unit != Unit::Energy {
                continue;
            }
            let e = out * intensity;
            total += e;
            if ci == instance.electricity {
                elec += e;
            }
        }
    }
    if total <= 0.0 {
        return Err(EmissionsError::EmptySector(sector_id.to_string()));
    }
    Ok(elec / total)
}

/// Power-sector generation of a solution, TWh.
pub fn generation_twh(solution: &PeriodSolution, instance: &ModelInstance) -> f64 {
    instance
        .power_techs()
        .iter()
        .map(|&ti| solution.tech_output[ti])
        .sum::<f64>()
        * TWH_PER_EJ
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(gross_power: f64, dac: f64, beccs: f64, lulucf: f64, wedge: f64) -> LedgerRow {
        let mut gross: BTreeMap<Sector, f64> = Sector::ALL.iter().map(|&s| (s, 0.0)).collect();
        *gross.get_mut(&Sector::Power).unwrap() = gross_power;
        let captured = gross.clone();
        let net = gross_power - (dac + beccs + lulucf) + wedge;
        LedgerRow {
            year: 2050,
            gross,
            captured,
            dac,
            beccs,
            lulucf,
            wedge,
            net,
        }
    }

    #[test]
    fn intensity_unit_conversion() {
        // 100 Mt over 500 TWh → 200 g/kWh.
        let r = row(100.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(carbon_intensity_power(&r, 500.0).unwrap(), 200.0);
    }

    #[test]
    fn intensity_zero_emission_mix() {
        let r = row(0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(carbon_intensity_power(&r, 100.0).unwrap(), 0.0);
    }

    #[test]
    fn intensity_turns_negative_with_beccs() {
        let r = row(5.0, 0.0, 20.0, 0.0, 0.0);
        assert!(carbon_intensity_power(&r, 100.0).unwrap() < 0.0);
    }

    #[test]
    fn intensity_rejects_zero_generation() {
        let r = row(1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(
            carbon_intensity_power(&r, 0.0),
            Err(EmissionsError::ZeroGeneration)
        );
    }

    #[test]
    fn nets_breakdown_proportions() {
        let r = row(0.0, 35.0, 25.0, 40.0, 0.0);
        let (d, b, l) = nets_breakdown(&r).unwrap();
        assert!((d - 0.35).abs() < 1e-12);
        assert!((b - 0.25).abs() < 1e-12);
        assert!((l - 0.40).abs() < 1e-12);
        assert!((d + b + l - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nets_breakdown_single_source() {
        let r = row(0.0, 12.0, 0.0, 0.0, 0.0);
        assert_eq!(nets_breakdown(&r).unwrap(), (1.0, 0.0, 0.0));
    }

    #[test]
    fn nets_breakdown_requires_negatives() {
        let r = row(10.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(nets_breakdown(&r), Err(EmissionsError::NoNegativeEmissions));
    }

    #[test]
    fn ledger_closure() {
        let r = row(123.4, 10.0, 5.0, 40.0, 18.0);
        assert!((r.net - (r.gross_total() - r.negative_total() + r.wedge)).abs() < 1e-9);
    }
}
