//! Deterministic result emission: per-run CSVs, the run manifest, and
//! cross-run comparison. Identical inputs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::emissions::Sector;
use crate::feasibility::FeasibilityReport;
use crate::io::IoError;
use crate::model::Unit;
use crate::policy::RunResult;
use crate::TWH_PER_EJ;

fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| IoError::Unwritable {
            path: parent.display().to_string(),
            reason: e.to_string(),
        })?;
    }
    std::fs::write(path, contents).map_err(|e| IoError::Unwritable {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Shortest round-trip float formatting; deterministic across runs.
fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string() // normalize -0
    } else {
        format!("{v}")
    }
}

/// Write the six result tables plus the manifest into `dir`.
pub fn write_run(run: &RunResult, report: &FeasibilityReport, dir: &Path) -> Result<(), IoError> {
    let instance = &run.instance;

    // emissions.csv
    let mut s = String::from("year,metric,unit,value\n");
    for p in &run.periods {
        let l = &p.ledger;
        for sector in Sector::ALL {
            let _ = writeln!(s, "{},gross:{},MtCO2,{}", p.year, sector.label(), num(l.gross[&sector]));
        }
        for sector in Sector::ALL {
            let _ = writeln!(s, "{},captured:{},MtCO2,{}", p.year, sector.label(), num(l.captured[&sector]));
        }
        let _ = writeln!(s, "{},negative:dac,MtCO2,{}", p.year, num(l.dac));
        let _ = writeln!(s, "{},negative:beccs,MtCO2,{}", p.year, num(l.beccs));
        let _ = writeln!(s, "{},negative:lulucf,MtCO2,{}", p.year, num(l.lulucf));
        let _ = writeln!(s, "{},non_co2_wedge,MtCO2e,{}", p.year, num(l.wedge));
        let _ = writeln!(s, "{},net,MtCO2e,{}", p.year, num(l.net));
        if let Some(cap) = instance.grid.index_of(p.year).and_then(|i| run.cap.binding(i)) {
            let _ = writeln!(s, "{},cap,MtCO2e,{}", p.year, num(cap));
        }
        let _ = writeln!(s, "{},carbon_price,USD/tCO2,{}", p.year, num(p.carbon_price));
    }
    write_file(&dir.join("emissions.csv"), &s)?;

    // generation.csv
    let mut s = String::from("year,tech,unit,value\n");
    for p in &run.periods {
        for ti in instance.power_techs() {
            let _ = writeln!(
                s,
                "{},{},EJ,{}",
                p.year,
                instance.techs[ti].id,
                num(p.solution.tech_output[ti])
            );
        }
        let total: f64 = instance
            .power_techs()
            .iter()
            .map(|&ti| p.solution.tech_output[ti])
            .sum();
        let _ = writeln!(s, "{},total,TWh,{}", p.year, num(total * TWH_PER_EJ));
    }
    write_file(&dir.join("generation.csv"), &s)?;

    // final_energy.csv: energy inputs by end-use sector and fuel.
    let mut s = String::from("year,sector,commodity,unit,value\n");
    for p in &run.periods {
        for (si, sector) in instance.sectors.iter().enumerate() {
            if si == instance.power_sector {
                continue;
            }
            for nest in &sector.nests {
                for &ti in &nest.techs {
                    let out = p.solution.tech_output[ti];
                    if out <= 0.0 {
                        continue;
                    }
                    for &(ci, intensity) in &instance.techs[ti].inputs {
                        if instance.commodities[ci].unit != Unit::Energy {
                            continue;
                        }
                        let _ = writeln!(
                            s,
                            "{},{},{},EJ,{}",
                            p.year,
                            sector.id,
                            instance.commodities[ci].id,
                            num(out * intensity)
                        );
                    }
                }
            }
        }
    }
    write_file(&dir.join("final_energy.csv"), &s)?;

    // capacity.csv
    let mut s = String::from("year,tech,metric,unit,value\n");
    for p in &run.periods {
        for ti in instance.power_techs() {
            let id = &instance.techs[ti].id;
            let _ = writeln!(s, "{},{},capacity,GW,{}", p.year, id, num(p.solution.capacity_gw[ti]));
            let _ = writeln!(
                s,
                "{},{},new_capacity,GW,{}",
                p.year,
                id,
                num(p.solution.new_capacity[ti])
            );
        }
    }
    write_file(&dir.join("capacity.csv"), &s)?;

    // prices.csv
    let mut s = String::from("year,commodity,unit,value\n");
    for p in &run.periods {
        for (ci, c) in instance.commodities.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},MUSD/{},{}",
                p.year,
                c.id,
                c.unit.label(),
                num(p.solution.prices.get(ci))
            );
        }
    }
    write_file(&dir.join("prices.csv"), &s)?;

    // feasibility.csv — (period, metric, value, unit).
    let mut s = String::from("period,metric,value,unit\n");
    for &(year, pct) in &report.policy_cost_pct_gdp {
        let _ = writeln!(s, "{year},policy_cost,{},%GDP", num(pct));
    }
    for (class, year, claim) in &report.land {
        let _ = writeln!(s, "{year},land:{class},{},km2", num(claim.km2));
        let _ = writeln!(s, "{year},land:{class}:seoul,{},multiples", num(claim.seoul_multiples));
    }
    for &(year, gt) in &report.storage.cumulative_gt {
        let _ = writeln!(s, "{year},storage_cumulative,{},GtCO2", num(gt));
    }
    if let Some(y) = report.storage.crossed_domestic_budget {
        let _ = writeln!(s, "{y},storage_crossed_domestic_budget,1,flag");
    }
    if let Some(y) = report.storage.crossed_total_budget {
        let _ = writeln!(s, "{y},storage_crossed_total_budget,1,flag");
    }
    for (tech, year, rate) in &report.expansion_rates {
        let _ = writeln!(s, "{year},expansion_rate:{tech},{},GW/GWh/yr", num(*rate));
    }
    for (tech, year, gw) in &report.potential_headroom {
        let _ = writeln!(s, "{year},potential_headroom:{tech},{},GW", num(*gw));
    }
    write_file(&dir.join("feasibility.csv"), &s)?;

    // Run manifest.
    let mut s = String::new();
    let _ = writeln!(s, "scenario = {}", run.scenario.name);
    let _ = writeln!(s, "dataset_checksum = {}", run.dataset_checksum);
    let _ = writeln!(s, "config_checksum = {}", run.config_checksum);
    let _ = writeln!(s, "tool_version = {}", run.tool_version);
    write_file(&dir.join("manifest.txt"), &s)?;
    Ok(())
}

/// Join the emissions and feasibility tables of several run directories
/// into one comparison table keyed (scenario, period, metric).
pub fn compare_runs(dirs: &[&Path], out: &Path) -> Result<(), IoError> {
    let mut rows: Vec<(String, String, String, String, String)> = Vec::new();
    for dir in dirs {
        let manifest_path = dir.join("manifest.txt");
        let manifest = std::fs::read_to_string(&manifest_path).map_err(|e| IoError::Unreadable {
            path: manifest_path.display().to_string(),
            reason: e.to_string(),
        })?;
        let scenario = manifest
            .lines()
            .find_map(|l| l.strip_prefix("scenario = "))
            .unwrap_or("unknown")
            .to_string();
        for (file, metric_col) in [("emissions.csv", 1), ("feasibility.csv", 1)] {
            let path = dir.join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| IoError::Unreadable {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            let mut lines = text.lines();
            let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
            // Both tables carry (period|year, metric, ..., value/unit).
            let (value_col, unit_col) = if header == ["year", "metric", "unit", "value"] {
                (3, 2)
            } else if header == ["period", "metric", "value", "unit"] {
                (2, 3)
            } else {
                return Err(IoError::SchemaViolation {
                    table: file.to_string(),
                    row: 1,
                    column: header.join(","),
                    reason: "unexpected header".into(),
                });
            };
            for line in lines {
                let cells: Vec<&str> = line.split(',').collect();
                if cells.len() < 4 {
                    continue;
                }
                rows.push((
                    scenario.clone(),
                    cells[0].to_string(),
                    cells[metric_col].to_string(),
                    cells[value_col].to_string(),
                    cells[unit_col].to_string(),
                ));
            }
        }
    }
    rows.sort();
    let mut s = String::from("scenario,period,metric,value,unit\n");
    for (scenario, period, metric, value, unit) in rows {
        let _ = writeln!(s, "{scenario},{period},{metric},{value},{unit}");
    }
    write_file(out, &s)
}
