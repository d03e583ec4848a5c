//! Run configuration with the documented precedence: command-line flags
//! override TNORM_* environment variables, which override the defaults.

use crate::error::{Error, Result};
use std::path::PathBuf;

pub const MIN_MEMORY_BUDGET: u64 = 256 << 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Csv,
    Json,
    PlotData,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "plotdata" => Ok(OutputFormat::PlotData),
            _ => Err(Error::Parameter(format!("unknown format {s:?} (csv|json|plotdata)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub workdir: PathBuf,
    pub memory_budget: u64,
    pub threads: usize,
    pub max_n: u32,
    pub format: OutputFormat,
    pub precision: u32,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            workdir: PathBuf::from("tnorm-work"),
            memory_budget: 1 << 30,
            threads: 0,
            max_n: 16,
            format: OutputFormat::Csv,
            precision: 5,
            verbose: false,
        }
    }
}

/// Parses sizes like "512M", "2G", "1073741824".
pub fn parse_bytes(s: &str) -> Result<u64> {
    let s = s.trim();
    let (digits, mult) = match s.chars().last() {
        Some('K' | 'k') => (&s[..s.len() - 1], 1u64 << 10),
        Some('M' | 'm') => (&s[..s.len() - 1], 1u64 << 20),
        Some('G' | 'g') => (&s[..s.len() - 1], 1u64 << 30),
        _ => (s, 1),
    };
    let v: u64 = digits
        .parse()
        .map_err(|_| Error::Parameter(format!("bad byte size {s:?}")))?;
    Ok(v * mult)
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

impl RunConfig {
    /// Applies TNORM_* environment variables on top of the defaults; flags
    /// are applied by the CLI afterwards, giving flags > env > defaults.
    pub fn from_env() -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(v) = env_var("TNORM_WORKDIR") {
            cfg.workdir = PathBuf::from(v);
        }
        if let Some(v) = env_var("TNORM_MEM") {
            cfg.memory_budget = parse_bytes(&v)?;
        }
        if let Some(v) = env_var("TNORM_THREADS") {
            cfg.threads = v.parse().map_err(|_| Error::Parameter("bad TNORM_THREADS".into()))?;
        }
        if let Some(v) = env_var("TNORM_MAX_N") {
            cfg.max_n = v.parse().map_err(|_| Error::Parameter("bad TNORM_MAX_N".into()))?;
        }
        if let Some(v) = env_var("TNORM_FORMAT") {
            cfg.format = OutputFormat::parse(&v)?;
        }
        if let Some(v) = env_var("TNORM_PRECISION") {
            cfg.precision = v.parse().map_err(|_| Error::Parameter("bad TNORM_PRECISION".into()))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.memory_budget < MIN_MEMORY_BUDGET {
            return Err(Error::Parameter(format!(
                "memory budget must be at least {} MiB",
                MIN_MEMORY_BUDGET >> 20
            )));
        }
        if self.max_n < 1 {
            return Err(Error::Parameter("max-n must be at least 1".into()));
        }
        Ok(())
    }

    pub fn pipeline_config(&self) -> crate::pipeline::PipelineConfig {
        crate::pipeline::PipelineConfig {
            workdir: self.workdir.join("cache"),
            memory_budget: self.memory_budget,
            threads: self.threads,
            verbose: self.verbose,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_suffixes() {
        assert_eq!(parse_bytes("1024").unwrap(), 1024);
        assert_eq!(parse_bytes("512M").unwrap(), 512 << 20);
        assert_eq!(parse_bytes("2G").unwrap(), 2 << 30);
        assert!(parse_bytes("x").is_err());
    }

    #[test]
    fn validation_bounds() {
        let mut cfg = RunConfig::default();
        cfg.memory_budget = 1;
        assert!(cfg.validate().is_err());
        cfg.memory_budget = 1 << 30;
        cfg.max_n = 0;
        assert!(cfg.validate().is_err());
    }
}
