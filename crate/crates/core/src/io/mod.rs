//! Dataset ingestion (six comma-separated tables with strict headers) and
//! result emission.
//!
//! Tables and column schemas (documented in the data directory README):
//! - `sectors.csv` — commodity declarations and the sector/nest tree:
//!   `row_kind,id,parent,commodity_kind,unit,output,logit_exponent,base_service,income_elasticity,price_elasticity`
//! - `technologies.csv` —
//!   `tech,sector,nest,output,fuel,fuel_intensity,fuel2,fuel2_intensity,non_energy_cost,emission_factor,capture_fraction,biogenic,lifetime,capacity_factor,first_available,share_weight_path,potential_gw,vre`
//! - `resources.csv` — `commodity,grade,quantity,cost,depletable`
//! - `macro.csv` — `series,key,value`
//! - `calibration.csv` — `scope,sector,nest,tech,value`
//! - `history.csv` — `year,series,value`
//!
//! Unknown columns are rejected; diagnostics carry table, line and column.

mod output;

pub use output::{compare_runs, write_run};

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::*;
use crate::policy::hex_string;

#[derive(Debug, Error, PartialEq)]
pub enum IoError {
    #[error("missing table '{0}'")]
    MissingTable(String),
    #[error("{table}:{row}: column '{column}': {reason}")]
    SchemaViolation {
        table: String,
        row: u64,
        column: String,
        reason: String,
    },
    #[error("cannot read '{path}': {reason}")]
    Unreadable { path: String, reason: String },
    #[error("cannot write '{path}': {reason}")]
    Unwritable { path: String, reason: String },
}

pub const TABLES: [&str; 6] = [
    "sectors.csv",
    "technologies.csv",
    "resources.csv",
    "macro.csv",
    "calibration.csv",
    "history.csv",
];

struct Table {
    name: String,
    headers: Vec<String>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn load(dir: &Path, name: &str, expected: &[&str]) -> Result<Table, IoError> {
        let path = dir.join(name);
        if !path.exists() {
            return Err(IoError::MissingTable(name.to_string()));
        }
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(&path)
            .map_err(|e| IoError::Unreadable {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| IoError::Unreadable {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?
            .iter()
            .map(|h| h.to_string())
            .collect();
        for h in &headers {
            if !expected.contains(&h.as_str()) {
                return Err(IoError::SchemaViolation {
                    table: name.to_string(),
                    row: 1,
                    column: h.clone(),
                    reason: "unknown column".to_string(),
                });
            }
        }
        for want in expected {
            if !headers.iter().any(|h| h == want) {
                return Err(IoError::SchemaViolation {
                    table: name.to_string(),
                    row: 1,
                    column: want.to_string(),
                    reason: "missing column".to_string(),
                });
            }
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| IoError::Unreadable {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, rec));
        }
        Ok(Table {
            name: name.to_string(),
            headers,
            rows,
        })
    }

    fn idx(&self, column: &str) -> usize {
        self.headers
            .iter()
            .position(|h| h == column)
            .expect("column checked at load")
    }

    fn cell<'a>(&self, rec: &'a csv::StringRecord, column: &str) -> &'a str {
        rec.get(self.idx(column)).unwrap_or("")
    }

    fn violation(&self, row: u64, column: &str, reason: impl Into<String>) -> IoError {
        IoError::SchemaViolation {
            table: self.name.clone(),
            row,
            column: column.to_string(),
            reason: reason.into(),
        }
    }

    fn f64(&self, row: u64, rec: &csv::StringRecord, column: &str) -> Result<f64, IoError> {
        let raw = self.cell(rec, column);
        raw.parse()
            .map_err(|_| self.violation(row, column, format!("'{raw}' is not a number")))
    }

    fn f64_opt(&self, row: u64, rec: &csv::StringRecord, column: &str) -> Result<Option<f64>, IoError> {
        let raw = self.cell(rec, column);
        if raw.is_empty() {
            return Ok(None);
        }
        Ok(Some(self.f64(row, rec, column)?))
    }

    fn u32(&self, row: u64, rec: &csv::StringRecord, column: &str) -> Result<u32, IoError> {
        let raw = self.cell(rec, column);
        raw.parse()
            .map_err(|_| self.violation(row, column, format!("'{raw}' is not an integer")))
    }

    fn flag(&self, row: u64, rec: &csv::StringRecord, column: &str) -> Result<bool, IoError> {
        match self.cell(rec, column) {
            "0" => Ok(false),
            "1" => Ok(true),
            raw => Err(self.violation(row, column, format!("'{raw}' is not 0/1"))),
        }
    }

    fn nonempty(&self, row: u64, rec: &csv::StringRecord, column: &str) -> Result<String, IoError> {
        let raw = self.cell(rec, column);
        if raw.is_empty() {
            return Err(self.violation(row, column, "must not be empty"));
        }
        Ok(raw.to_string())
    }
}

/// Parse a sparse `year:value;year:value` path.
fn parse_path(table: &Table, row: u64, column: &str, raw: &str) -> Result<Vec<(u32, f64)>, IoError> {
    let mut out = Vec::new();
    if raw.is_empty() {
        return Ok(out);
    }
    for part in raw.split(';') {
        let Some((y, v)) = part.split_once(':') else {
            return Err(table.violation(row, column, format!("'{part}' is not year:value")));
        };
        let year: u32 = y
            .parse()
            .map_err(|_| table.violation(row, column, format!("'{y}' is not a year")))?;
        let value: f64 = v
            .parse()
            .map_err(|_| table.violation(row, column, format!("'{v}' is not a number")))?;
        out.push((year, value));
    }
    if !out.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(table.violation(row, column, "years must be strictly increasing"));
    }
    Ok(out)
}

/// Load and schema-validate a dataset directory with the default 2050
/// horizon.
pub fn load_dataset(dir: &Path) -> Result<ModelDataset, IoError> {
    load_dataset_with_end(dir, 2050)
}

/// Load with an explicit end year (must stay within the macro coverage of
/// the dataset).
pub fn load_dataset_with_end(dir: &Path, end_year: u32) -> Result<ModelDataset, IoError> {
    let timegrid = TimeGrid {
        base_year: 2010,
        first_model_year: 2015,
        step: 5,
        end_year,
    };

    // ---- sectors.csv: commodities and the tree -------------------------
    let t = Table::load(
        dir,
        "sectors.csv",
        &[
            "row_kind",
            "id",
            "parent",
            "commodity_kind",
            "unit",
            "output",
            "logit_exponent",
            "base_service",
            "income_elasticity",
            "price_elasticity",
        ],
    )?;
    let mut commodities = Vec::new();
    let mut sectors: Vec<SectorNode> = Vec::new();
    for (row, rec) in &t.rows {
        let row = *row;
        match t.cell(rec, "row_kind") {
            "commodity" => {
                let id = t.nonempty(row, rec, "id")?;
                let kind_raw = t.nonempty(row, rec, "commodity_kind")?;
                let kind = CommodityKind::parse(&kind_raw)
                    .ok_or_else(|| t.violation(row, "commodity_kind", format!("'{kind_raw}' unknown")))?;
                let unit_raw = t.nonempty(row, rec, "unit")?;
                let unit = Unit::parse(&unit_raw)
                    .ok_or_else(|| t.violation(row, "unit", format!("'{unit_raw}' unknown")))?;
                commodities.push(Commodity { id, kind, unit });
            }
            "sector" => {
                let id = t.nonempty(row, rec, "id")?;
                let output = t.nonempty(row, rec, "output")?;
                let logit_exponent = t.f64(row, rec, "logit_exponent")?;
                let demand = match t.f64_opt(row, rec, "base_service")? {
                    Some(base_service) => Some(DemandSpec {
                        base_service,
                        income_elasticity: t.f64(row, rec, "income_elasticity")?,
                        price_elasticity: t.f64(row, rec, "price_elasticity")?,
                    }),
                    None => None,
                };
                sectors.push(SectorNode {
                    id,
                    output,
                    logit_exponent,
                    demand,
                    nests: Vec::new(),
                });
            }
            "nest" => {
                let id = t.nonempty(row, rec, "id")?;
                let parent = t.nonempty(row, rec, "parent")?;
                let logit_exponent = t.f64(row, rec, "logit_exponent")?;
                let sector = sectors
                    .iter_mut()
                    .find(|s| s.id == parent)
                    .ok_or_else(|| t.violation(row, "parent", format!("sector '{parent}' not declared above")))?;
                sector.nests.push(SectorNest {
                    id,
                    logit_exponent,
                    techs: Vec::new(),
                });
            }
            other => {
                return Err(t.violation(row, "row_kind", format!("'{other}' unknown")));
            }
        }
    }

    // ---- technologies.csv ----------------------------------------------
    let t = Table::load(
        dir,
        "technologies.csv",
        &[
            "tech",
            "sector",
            "nest",
            "output",
            "fuel",
            "fuel_intensity",
            "fuel2",
            "fuel2_intensity",
            "non_energy_cost",
            "emission_factor",
            "capture_fraction",
            "biogenic",
            "lifetime",
            "capacity_factor",
            "first_available",
            "share_weight_path",
            "potential_gw",
            "vre",
        ],
    )?;
    let mut technologies = Vec::new();
    for (row, rec) in &t.rows {
        let row = *row;
        let id = t.nonempty(row, rec, "tech")?;
        let sector = t.nonempty(row, rec, "sector")?;
        let nest = t.nonempty(row, rec, "nest")?;
        let mut inputs = Vec::new();
        for (fc, ic) in [("fuel", "fuel_intensity"), ("fuel2", "fuel2_intensity")] {
            let fuel = t.cell(rec, fc);
            if !fuel.is_empty() {
                inputs.push(TechInput {
                    commodity: fuel.to_string(),
                    intensity: t.f64(row, rec, ic)?,
                });
            } else if !t.cell(rec, ic).is_empty() {
                return Err(t.violation(row, ic, "intensity without a fuel"));
            }
        }
        let tech = Technology {
            id,
            sector: sector.clone(),
            nest: nest.clone(),
            output: t.nonempty(row, rec, "output")?,
            inputs,
            non_energy_cost: t.f64(row, rec, "non_energy_cost")?,
            emission_factor: t.f64(row, rec, "emission_factor")?,
            capture_fraction: t.f64(row, rec, "capture_fraction")?,
            biogenic: t.flag(row, rec, "biogenic")?,
            lifetime: t.u32(row, rec, "lifetime")?,
            capacity_factor: t.f64(row, rec, "capacity_factor")?,
            first_available_year: t.u32(row, rec, "first_available")?,
            share_weight_path: parse_path(&t, row, "share_weight_path", t.cell(rec, "share_weight_path"))?,
            potential_gw: t.f64_opt(row, rec, "potential_gw")?,
            vre: t.flag(row, rec, "vre")?,
        };
        // Attach to its nest (removal sector stands alone).
        if sector != well_known::REMOVAL {
            let s = sectors
                .iter_mut()
                .find(|s| s.id == sector)
                .ok_or_else(|| t.violation(row, "sector", format!("sector '{sector}' not declared")))?;
            let n = s
                .nests
                .iter_mut()
                .find(|n| n.id == nest)
                .ok_or_else(|| t.violation(row, "nest", format!("nest '{nest}' not declared in '{sector}'")))?;
            n.techs.push(tech.id.clone());
        }
        technologies.push(tech);
    }

    // ---- resources.csv --------------------------------------------------
    let t = Table::load(
        dir,
        "resources.csv",
        &["commodity", "grade", "quantity", "cost", "depletable"],
    )?;
    let mut resources: Vec<GradedResource> = Vec::new();
    for (row, rec) in &t.rows {
        let row = *row;
        let commodity = t.nonempty(row, rec, "commodity")?;
        let grade_no = t.u32(row, rec, "grade")?;
        let grade = Grade {
            quantity: t.f64(row, rec, "quantity")?,
            cost: t.f64(row, rec, "cost")?,
        };
        let depletable = t.flag(row, rec, "depletable")?;
        match resources.iter_mut().find(|r| r.commodity == commodity) {
            Some(r) => {
                if r.cumulative_tracking != depletable {
                    return Err(t.violation(row, "depletable", "inconsistent across grades"));
                }
                if grade_no as usize != r.grades.len() + 1 {
                    return Err(t.violation(row, "grade", "grades must be numbered 1..n in order"));
                }
                r.grades.push(grade);
            }
            None => {
                if grade_no != 1 {
                    return Err(t.violation(row, "grade", "first grade must be 1"));
                }
                resources.push(GradedResource {
                    commodity,
                    grades: vec![grade],
                    cumulative_tracking: depletable,
                });
            }
        }
    }

    // ---- macro.csv --------------------------------------------------------
    let t = Table::load(dir, "macro.csv", &["series", "key", "value"])?;
    let mut macro_drivers = MacroDrivers {
        population: BTreeMap::new(),
        gdp_per_capita: BTreeMap::new(),
    };
    let mut exogenous = ExogenousSeries::default();
    let mut plan_rows: BTreeMap<(String, u32), f64> = BTreeMap::new();
    for (row, rec) in &t.rows {
        let row = *row;
        let series = t.nonempty(row, rec, "series")?;
        let value = t.f64(row, rec, "value")?;
        match series.as_str() {
            "vre_integration" => {
                let share = t.f64(row, rec, "key")?;
                exogenous.vre_integration.push((share, value));
            }
            _ => {
                let year = t.u32(row, rec, "key")?;
                match series.as_str() {
                    "population" => {
                        macro_drivers.population.insert(year, value);
                    }
                    "gdp_per_capita" => {
                        macro_drivers.gdp_per_capita.insert(year, value);
                    }
                    "lulucf_sink" => {
                        exogenous.lulucf_sink.insert(year, value);
                    }
                    "non_co2_wedge" => {
                        exogenous.non_co2_wedge.insert(year, value);
                    }
                    "dac_potential" => {
                        exogenous.dac_potential.insert(year, value);
                    }
                    s => match s.strip_prefix("npsp:") {
                        Some(tech) => {
                            plan_rows.insert((tech.to_string(), year), value);
                        }
                        None => {
                            return Err(t.violation(row, "series", format!("'{s}' unknown")));
                        }
                    },
                }
            }
        }
    }
    exogenous
        .vre_integration
        .sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    // ---- calibration.csv ---------------------------------------------------
    let t = Table::load(dir, "calibration.csv", &["scope", "sector", "nest", "tech", "value"])?;
    let mut calibration = CalibrationObservations::default();
    for (row, rec) in &t.rows {
        let row = *row;
        let scope = t.nonempty(row, rec, "scope")?;
        let sector = t.nonempty(row, rec, "sector")?;
        let value = t.f64(row, rec, "value")?;
        match scope.as_str() {
            "tech_share" => {
                let nest = t.nonempty(row, rec, "nest")?;
                let tech = t.nonempty(row, rec, "tech")?;
                calibration.tech_shares.insert((sector, nest, tech), value);
            }
            "nest_share" => {
                let nest = t.nonempty(row, rec, "nest")?;
                calibration.nest_shares.insert((sector, nest), value);
            }
            other => {
                return Err(t.violation(row, "scope", format!("'{other}' unknown")));
            }
        }
    }

    // ---- history.csv ---------------------------------------------------------
    let t = Table::load(dir, "history.csv", &["year", "series", "value"])?;
    let mut history = Vec::new();
    for (row, rec) in &t.rows {
        let row = *row;
        history.push(HistoryRow {
            year: t.u32(row, rec, "year")?,
            series: t.nonempty(row, rec, "series")?,
            value: t.f64(row, rec, "value")?,
        });
    }

    // Observed model years pin capacity in every scenario; the plan profile
    // extends pins beyond 2020 for the reference scenario.
    let mut capacity_pins: BTreeMap<(String, u32), f64> = BTreeMap::new();
    let tech_ids: Vec<&str> = technologies.iter().map(|t| t.id.as_str()).collect();
    for h in &history {
        if h.year >= timegrid.first_model_year
            && h.year <= 2020
            && timegrid.index_of(h.year).is_some()
            && tech_ids.contains(&h.series.as_str())
        {
            capacity_pins.insert((h.series.clone(), h.year), h.value);
        }
    }
    for ((tech, year), gw) in plan_rows {
        capacity_pins.insert((tech, year), gw);
    }

    let checksum = dataset_checksum(dir)?;

    Ok(ModelDataset {
        timegrid,
        commodities,
        sectors,
        technologies,
        resources,
        macro_drivers,
        exogenous,
        calibration,
        history,
        capacity_pins,
        checksum,
    })
}

/// SHA-256 over the six tables (name + bytes, fixed order).
pub fn dataset_checksum(dir: &Path) -> Result<String, IoError> {
    let mut hasher = Sha256::new();
    for name in TABLES {
        let path = dir.join(name);
        let bytes = std::fs::read(&path).map_err(|e| IoError::Unreadable {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        hasher.update(name.as_bytes());
        hasher.update([0u8]);
        hasher.update(&bytes);
    }
    Ok(hex_string(&hasher.finalize()))
}
