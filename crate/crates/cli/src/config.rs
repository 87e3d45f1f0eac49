use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;
use w535::{EnumLimits, Strategy};

pub const BUDGET_ENV: &str = "W535_MEMORY_BUDGET";
pub const WORKERS_ENV: &str = "W535_WORKERS";

pub const DEFAULT_BUDGET: usize = 512 << 20;
pub const EXTENDED_BUDGET: usize = 8 << 30;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ConfigError {
    #[error("bad byte size {0:?} (expected e.g. 512M, 8G or a byte count)")]
    Size(String),
    #[error("bad worker count {0:?}")]
    Workers(String),
    #[error("unknown check {0:?}")]
    Check(String),
    #[error("unknown output format {0:?}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(ConfigError::Format(s.to_string())),
        }
    }
}

/// The twelve acceptance checks, in dependency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    J1Enumeration,
    L2Enumeration,
    IndexTwenty,
    Assembly,
    CGroup,
    LSubgroup,
    Identities,
    ElementOrders,
    Semisparse,
    Census,
    AutOrders,
    Completeness,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::J1Enumeration,
        Check::L2Enumeration,
        Check::IndexTwenty,
        Check::Assembly,
        Check::CGroup,
        Check::LSubgroup,
        Check::Identities,
        Check::ElementOrders,
        Check::Semisparse,
        Check::Census,
        Check::AutOrders,
        Check::Completeness,
    ];

    pub fn number(self) -> usize {
        Check::ALL.iter().position(|&c| c == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Check::J1Enumeration => "j1-enumeration",
            Check::L2Enumeration => "l2-enumeration",
            Check::IndexTwenty => "index-twenty",
            Check::Assembly => "assembly",
            Check::CGroup => "c-group",
            Check::LSubgroup => "l-subgroup",
            Check::Identities => "identities",
            Check::ElementOrders => "element-orders",
            Check::Semisparse => "semisparse",
            Check::Census => "census",
            Check::AutOrders => "aut-orders",
            Check::Completeness => "completeness",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = ConfigError;

    /// A check name or its number `1..=12`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(n) = s.parse::<usize>() {
            return n
                .checked_sub(1)
                .and_then(|i| Check::ALL.get(i).copied())
                .ok_or_else(|| ConfigError::Check(s.to_string()));
        }
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::Check(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub max_cosets: usize,
    pub budget_bytes: usize,
    pub workers: usize,
    pub strategy: Strategy,
    pub format: Format,
    pub checks: Vec<Check>,
    pub extended: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_cosets: EnumLimits::default().max_cosets,
            budget_bytes: DEFAULT_BUDGET,
            workers: 1,
            strategy: Strategy::default(),
            format: Format::Json,
            checks: Check::ALL.to_vec(),
            extended: false,
        }
    }
}

impl RunConfig {
    pub fn limits(&self) -> EnumLimits {
        EnumLimits::new(self.max_cosets, self.strategy)
    }

    /// Applies `W535_MEMORY_BUDGET` and `W535_WORKERS` if set.
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            self.budget_bytes = parse_size(&v)?;
        }
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            self.workers = parse_workers(&v)?;
        }
        Ok(())
    }

    /// Memory budget for one of `workers` concurrent tasks.
    pub fn task_budget(&self) -> usize {
        self.budget_bytes / self.workers.max(1)
    }
}

/// Parses `123`, `64K`, `512M` or `8G` (binary units).
pub fn parse_size(s: &str) -> Result<usize, ConfigError> {
    let t = s.trim();
    let (digits, shift) = match t.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&t[..t.len() - 1], 10),
        Some('M') => (&t[..t.len() - 1], 20),
        Some('G') => (&t[..t.len() - 1], 30),
        _ => (t, 0),
    };
    digits
        .trim()
        .parse::<usize>()
        .ok()
        .and_then(|n| n.checked_mul(1 << shift))
        .ok_or_else(|| ConfigError::Size(s.to_string()))
}

pub fn parse_workers(s: &str) -> Result<usize, ConfigError> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(ConfigError::Workers(s.to_string())),
    }
}
