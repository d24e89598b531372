//! Run configuration: flags override a flat `key=value` file, which
//! overrides built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sst_core::num::mpf;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision: u32,
    pub tol: f64,
    pub seed: Option<u64>,
    pub workers: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Truncation for series constants (`v`, `c0`, `clt`).
    pub terms: Option<usize>,
}

/// Values given on the command line; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision: Option<u32>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub terms: Option<usize>,
}

pub const DEFAULT_TOL: f64 = 1e-12;

pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| CliError::Usage(format!("config key '{key}': {e}")))
}

impl RunConfig {
    pub fn resolve(flags: Overrides, file: Option<&Path>) -> Result<Self, CliError> {
        let map = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                parse_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut file_vals = Overrides::default();
        for (k, v) in &map {
            match k.as_str() {
                "precision" => file_vals.precision = Some(parse_value(k, v)?),
                "tol" => file_vals.tol = Some(parse_value(k, v)?),
                "seed" => file_vals.seed = Some(parse_value(k, v)?),
                "workers" => file_vals.workers = Some(parse_value(k, v)?),
                "terms" => file_vals.terms = Some(parse_value(k, v)?),
                "output" => file_vals.output = Some(PathBuf::from(v)),
                "format" => {
                    file_vals.format = Some(match v.as_str() {
                        "json" => Format::Json,
                        "csv" => Format::Csv,
                        other => return Err(CliError::Usage(format!("config key 'format': unknown '{other}'"))),
                    })
                }
                other => return Err(CliError::Usage(format!("unknown config key '{other}'"))),
            }
        }
        let cfg = RunConfig {
            precision: flags.precision.or(file_vals.precision).unwrap_or_else(mpf::precision),
            tol: flags.tol.or(file_vals.tol).unwrap_or(DEFAULT_TOL),
            seed: flags.seed.or(file_vals.seed),
            workers: flags
                .workers
                .or(file_vals.workers)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
            format: flags.format.or(file_vals.format).unwrap_or(Format::Json),
            output: flags.output.or(file_vals.output),
            terms: flags.terms.or(file_vals.terms),
        };
        if cfg.precision < 64 {
            return Err(CliError::Usage(format!("precision must be >= 64 bits, got {}", cfg.precision)));
        }
        if !(cfg.tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {}", cfg.tol)));
        }
        if cfg.workers == 0 {
            return Err(CliError::Usage("workers must be >= 1".into()));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = std::env::temp_dir().join(format!("sst-config-{}", std::process::id()));
        std::fs::write(&dir, "# run\nprecision = 200\ntol=1e-9\nformat=csv\n").unwrap();
        let flags = Overrides { tol: Some(1e-6), ..Default::default() };
        let c = RunConfig::resolve(flags, Some(&dir)).unwrap();
        assert_eq!(c.precision, 200);
        assert_eq!(c.tol, 1e-6);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.seed, None);
        std::fs::remove_file(&dir).unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_file("novalue").is_err());
        let flags = Overrides { precision: Some(32), ..Default::default() };
        assert!(RunConfig::resolve(flags, None).is_err());
        let flags = Overrides { tol: Some(0.0), ..Default::default() };
        assert!(RunConfig::resolve(flags, None).is_err());
    }
}
