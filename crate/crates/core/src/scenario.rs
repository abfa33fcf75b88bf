//! Scenario configuration files.
//!
//! Flat `key = value` text, one key per line, `#` comments. Kept
//! dependency-free and diffable on purpose; the four shipped files
//! reproduce the published scenario matrix column for column.

use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("bad value for '{key}': '{value}' ({reason})")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("missing key '{0}'")]
    MissingKey(String),
    #[error("cannot read scenario file: {0}")]
    Unreadable(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapMode {
    /// No emissions cap: the reference policy case.
    None,
    /// Cap declining linearly from the anchor-year level to zero.
    LinearNetZero { netzero_year: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuclearPolicy {
    /// No new units allowed after the given year.
    BannedAfter(u32),
    /// New builds compete freely on cost.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub cap: CapMode,
    pub nuclear_new_builds: NuclearPolicy,
    /// CCS storage non-energy cost lever, 2020USD/tCO₂.
    pub storage_cost_usd_per_t: f64,
    /// Direct-air-capture non-energy cost, 2020USD/tCO₂.
    pub dac_cost_usd_per_t: f64,
    /// Pin 2025–2034 power capacities to the national power-plan profile.
    pub npsp_trajectories: bool,
}

impl fmt::Display for ScenarioConfig {
    /// Canonical re-serialization; loading this output reproduces the
    /// config exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        match self.cap {
            CapMode::None => writeln!(f, "cap = none")?,
            CapMode::LinearNetZero { netzero_year } => writeln!(f, "cap = linear:{netzero_year}")?,
        }
        match self.nuclear_new_builds {
            NuclearPolicy::BannedAfter(y) => writeln!(f, "nuclear_new_builds = banned_after:{y}")?,
            NuclearPolicy::Free => writeln!(f, "nuclear_new_builds = free")?,
        }
        writeln!(f, "storage_cost_usd_per_t = {}", self.storage_cost_usd_per_t)?;
        writeln!(f, "dac_cost_usd_per_t = {}", self.dac_cost_usd_per_t)?;
        writeln!(
            f,
            "exogenous_trajectories = {}",
            if self.npsp_trajectories { "npsp" } else { "none" }
        )
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Unreadable(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let mut name = None;
    let mut cap = None;
    let mut nuclear = None;
    let mut storage = None;
    let mut dac = None;
    let mut npsp = None;

    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ScenarioError::BadValue {
                key: line.to_string(),
                value: String::new(),
                reason: "expected 'key = value'".into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |reason: &str| ScenarioError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        match key {
            "name" => {
                if value.is_empty() {
                    return Err(bad("empty name"));
                }
                name = Some(value.to_string());
            }
            "cap" => {
                cap = Some(if value == "none" {
                    CapMode::None
                } else if let Some(y) = value.strip_prefix("linear:") {
                    let netzero_year: u32 = y.parse().map_err(|_| bad("not a year"))?;
                    CapMode::LinearNetZero { netzero_year }
                } else {
                    return Err(bad("expected 'none' or 'linear:<year>'"));
                });
            }
            "nuclear_new_builds" => {
                nuclear = Some(if value == "free" {
                    NuclearPolicy::Free
                } else if let Some(y) = value.strip_prefix("banned_after:") {
                    NuclearPolicy::BannedAfter(y.parse().map_err(|_| bad("not a year"))?)
                } else {
                    return Err(bad("expected 'free' or 'banned_after:<year>'"));
                });
            }
            "storage_cost_usd_per_t" => {
                let v: f64 = value.parse().map_err(|_| bad("not a number"))?;
                if !(v > 0.0) {
                    return Err(bad("must be positive"));
                }
                storage = Some(v);
            }
            "dac_cost_usd_per_t" => {
                let v: f64 = value.parse().map_err(|_| bad("not a number"))?;
                if !(v > 0.0) {
                    return Err(bad("must be positive"));
                }
                dac = Some(v);
            }
            "exogenous_trajectories" => {
                npsp = Some(match value {
                    "npsp" => true,
                    "none" => false,
                    _ => return Err(bad("expected 'npsp' or 'none'")),
                });
            }
            other => return Err(ScenarioError::UnknownKey(other.to_string())),
        }
    }

    Ok(ScenarioConfig {
        name: name.ok_or_else(|| ScenarioError::MissingKey("name".into()))?,
        cap: cap.ok_or_else(|| ScenarioError::MissingKey("cap".into()))?,
        nuclear_new_builds: nuclear
            .ok_or_else(|| ScenarioError::MissingKey("nuclear_new_builds".into()))?,
        storage_cost_usd_per_t: storage
            .ok_or_else(|| ScenarioError::MissingKey("storage_cost_usd_per_t".into()))?,
        dac_cost_usd_per_t: dac.ok_or_else(|| ScenarioError::MissingKey("dac_cost_usd_per_t".into()))?,
        npsp_trajectories: npsp
            .ok_or_else(|| ScenarioError::MissingKey("exogenous_trajectories".into()))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# CCS-constrained net-zero
name = nz2050_limccs
cap = linear:2050
nuclear_new_builds = banned_after:2024
storage_cost_usd_per_t = 3000
dac_cost_usd_per_t = 330
exogenous_trajectories = none
";

    #[test]
    fn parses_limccs_column() {
        let cfg = parse_scenario(SAMPLE).unwrap();
        assert_eq!(cfg.name, "nz2050_limccs");
        assert_eq!(cfg.cap, CapMode::LinearNetZero { netzero_year: 2050 });
        assert_eq!(cfg.nuclear_new_builds, NuclearPolicy::BannedAfter(2024));
        assert_eq!(cfg.storage_cost_usd_per_t, 3000.0);
        assert_eq!(cfg.dac_cost_usd_per_t, 330.0);
        assert!(!cfg.npsp_trajectories);
    }

    #[test]
    fn round_trips_through_display() {
        let cfg = parse_scenario(SAMPLE).unwrap();
        let again = parse_scenario(&cfg.to_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse_scenario("name = x\nbogus = 1\n").unwrap_err();
        assert_eq!(e, ScenarioError::UnknownKey("bogus".into()));
    }

    #[test]
    fn negative_storage_cost_rejected() {
        let e = parse_scenario("storage_cost_usd_per_t = -5\n").unwrap_err();
        assert!(matches!(e, ScenarioError::BadValue { .. }));
    }

    #[test]
    fn missing_key_reported() {
        let e = parse_scenario("name = x\n").unwrap_err();
        assert_eq!(e, ScenarioError::MissingKey("cap".into()));
    }
}
