use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fracsum_core::schedule::{AlphaSequence, GrowthMode};
use fracsum_core::{Budget, Error, Result};
use serde::{Deserialize, Serialize};

pub const BUDGET_ENV: &str = "FRACSUM_BUDGET_CELLS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Toy,
    Faithful,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Settings shared by every command. Anything left unset falls back to the
/// config file, then to the built-in default.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// TOML file with any of these settings (flags win).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Comma-separated target dimensions, e.g. 1/2,2/3.
    #[arg(long, global = true)]
    pub alphas: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Toy growth base: consecutive intervals are separated by this factor.
    #[arg(long, global = true)]
    pub growth_base: Option<u64>,
    /// Schedule terms per index.
    #[arg(long, global = true)]
    pub count: Option<u64>,
    #[arg(long, global = true)]
    pub depth: Option<u64>,
    /// Inclusive depth range A..B.
    #[arg(long, global = true)]
    pub depths: Option<String>,
    #[arg(long, global = true)]
    pub jmax: Option<u64>,
    #[arg(long, global = true)]
    pub imax: Option<u64>,
    /// Schedule index for single-index commands.
    #[arg(long, global = true)]
    pub i: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Largest number of cells any single step may materialize.
    /// Defaults to the FRACSUM_BUDGET_CELLS environment variable.
    #[arg(long, global = true)]
    pub budget_cells: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output directory; reports go to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Leave the generation time out of report headers.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timestamp: bool,
}

impl Settings {
    fn overlay(self, file: Settings) -> Settings {
        Settings {
            config: self.config,
            alphas: self.alphas.or(file.alphas),
            mode: self.mode.or(file.mode),
            growth_base: self.growth_base.or(file.growth_base),
            count: self.count.or(file.count),
            depth: self.depth.or(file.depth),
            depths: self.depths.or(file.depths),
            jmax: self.jmax.or(file.jmax),
            imax: self.imax.or(file.imax),
            i: self.i.or(file.i),
            seed: self.seed.or(file.seed),
            samples: self.samples.or(file.samples),
            budget_cells: self.budget_cells.or(file.budget_cells),
            format: self.format.or(file.format),
            out: self.out.or(file.out),
            no_timestamp: self.no_timestamp,
        }
    }
}

/// Fully resolved configuration; printed at the top of every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    #[serde(serialize_with = "fracsum_core::exact::text::display")]
    pub alphas: AlphaSequence,
    pub mode: Mode,
    pub growth_base: u64,
    pub count: u64,
    pub depth: u64,
    pub depths: Option<(u64, u64)>,
    pub jmax: u64,
    pub imax: u64,
    pub i: u64,
    pub seed: Option<u64>,
    pub samples: u64,
    pub budget_cells: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub timestamp: bool,
}

fn parse_range(text: &str) -> Result<(u64, u64)> {
    let bad = || Error::usage(format!("depth range {text:?} is not of the form A..B"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(Error::usage(format!("depth range {text:?} must satisfy 1 <= A <= B")));
    }
    Ok((a, b))
}

fn env_budget() -> Result<u64> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("{BUDGET_ENV}={v:?} is not a cell count"))),
        Err(_) => Ok(Budget::DEFAULT_CELLS),
    }
}

fn read_file(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::parse(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: Settings) -> Result<RunConfig> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => Settings::default(),
        };
        let s = flags.overlay(file);
        let alphas = AlphaSequence::parse(s.alphas.as_deref().unwrap_or("1/2,2/3,3/4,4/5"))?;
        let positive = |name: &str, v: u64| {
            if v == 0 {
                Err(Error::usage(format!("{name} must be positive")))
            } else {
                Ok(v)
            }
        };
        let cfg = RunConfig {
            mode: s.mode.unwrap_or(Mode::Toy),
            growth_base: s.growth_base.unwrap_or(4),
            count: positive("count", s.count.unwrap_or(8))?,
            depth: positive("depth", s.depth.unwrap_or(40))?,
            depths: s.depths.as_deref().map(parse_range).transpose()?,
            jmax: positive("jmax", s.jmax.unwrap_or(3))?,
            imax: positive("imax", s.imax.unwrap_or(alphas.len() as u64))?,
            i: positive("i", s.i.unwrap_or(2))?,
            seed: s.seed,
            samples: s.samples.unwrap_or(1000),
            budget_cells: positive("budget", match s.budget_cells {
                Some(b) => b,
                None => env_budget()?,
            })?,
            format: s.format.unwrap_or(Format::Csv),
            out: s.out,
            timestamp: !s.no_timestamp,
            alphas,
        };
        if cfg.imax as usize > cfg.alphas.len() || cfg.i as usize > cfg.alphas.len() {
            return Err(Error::usage(format!(
                "only {} alphas given; imax and i must not exceed that",
                cfg.alphas.len()
            )));
        }
        Ok(cfg)
    }

    pub fn budget(&self) -> Budget {
        Budget::new(self.budget_cells)
    }

    /// Growth of the schedule; the toy base is validated by the schedule
    /// builder so that a bad base surfaces as a schedule failure.
    pub fn growth(&self) -> GrowthMode {
        match self.mode {
            Mode::Faithful => GrowthMode::Faithful,
            Mode::Toy => GrowthMode::Toy {
                growth_base: self.growth_base,
                exponent_cap: 1,
            },
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::usage("sampled checks need --seed"))
    }

    pub fn depth_range(&self) -> Result<(u64, u64)> {
        self.depths
            .ok_or_else(|| Error::usage("this command needs --depths A..B"))
    }

    /// `key = value` lines in a fixed order.
    pub fn header_lines(&self, command: &str) -> Vec<String> {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut lines = vec![format!("fracsum {command}")];
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let v = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Null => "none".into(),
                    serde_json::Value::Array(a) => a
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(".."),
                    other => other.to_string(),
                };
                lines.push(format!("{k} = {v}"));
            }
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..64").unwrap(), (4, 64));
        assert_eq!(parse_range("4..=64").unwrap(), (4, 64));
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("9..3").is_err());
        assert!(parse_range("9").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: Settings = toml::from_str("alphas = \"1/3,1/2\"\ndepth = 12\nseed = 5\n").unwrap();
        let flags = Settings {
            depth: Some(20),
            ..Settings::default()
        };
        let s = flags.overlay(file);
        assert_eq!(s.depth, Some(20));
        assert_eq!(s.seed, Some(5));
        assert_eq!(s.alphas.as_deref(), Some("1/3,1/2"));
        assert!(toml::from_str::<Settings>("colour = 3").is_err());
    }
}
