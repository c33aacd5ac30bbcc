//! Run configuration for `fracgrad verify`, read from TOML.
//!
//! ```toml
//! run = ["adjointness", "laplacian"]   # or ["all"]; default all
//! out_dir = "reports"
//! formats = ["json", "csv"]
//! seed = 1
//!
//! [grid]
//! half_width = 10.0
//!
//! [suites.laplacian]
//! points = 512
//! s = [0.5]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::verify::{Baselines, GridDefaults, SuiteConfigs, SuiteContext, SUITES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: Vec<String>,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    /// Seeds family subsampling only.
    pub seed: u64,
    pub grid: GridDefaults,
    pub baselines: Option<Baselines>,
    pub suites: SuiteConfigs,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            run: vec!["all".to_string()],
            out_dir: None,
            formats: vec![OutputFormat::Json],
            seed: 0,
            grid: GridDefaults::default(),
            baselines: None,
            suites: SuiteConfigs::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| FracError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FracError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for id in &self.run {
            if id != "all" && !SUITES.contains(&id.as_str()) {
                return Err(FracError::Config(format!("unknown suite `{id}` in `run`")));
            }
        }
        if let Some(l) = self.grid.half_width {
            if !(l > 0.0 && l.is_finite()) {
                return Err(FracError::Config(format!("grid.half_width must be positive, got {l}")));
            }
        }
        if let Some(n) = self.grid.points {
            if n < 2 {
                return Err(FracError::Config(format!("grid.points must be at least 2, got {n}")));
            }
        }
        Ok(())
    }

    /// Suite ids to run for `selector` (`"all"` expands `run`, which in
    /// turn may be `"all"`), deduplicated in canonical order.
    pub fn select(&self, selector: &str) -> Result<Vec<&'static str>> {
        let wanted: Vec<&str> = if selector == "all" {
            self.run.iter().map(String::as_str).collect()
        } else if SUITES.contains(&selector) {
            vec![selector]
        } else {
            return Err(FracError::Config(format!("unknown suite `{selector}`")));
        };
        let all = wanted.contains(&"all");
        Ok(SUITES.iter().copied().filter(|s| all || wanted.contains(s)).collect())
    }

    pub fn context(&self) -> SuiteContext {
        SuiteContext {
            grid: self.grid,
            seed: self.seed,
            baselines: self.baselines.unwrap_or_default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_runs_everything() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.select("all").unwrap().len(), SUITES.len());
    }

    #[test]
    fn overrides_reach_suites() {
        let c = RunConfig::parse("run = [\"laplacian\"]\n[suites.laplacian]\npoints = 128\ns = [0.5]\n").unwrap();
        assert_eq!(c.select("all").unwrap(), vec!["laplacian"]);
        assert_eq!(c.suites.laplacian.points, Some(128));
        assert_eq!(c.suites.laplacian.s, vec![0.5]);
    }

    #[test]
    fn unknown_suite_and_key_rejected() {
        assert!(RunConfig::parse("run = [\"nope\"]").is_err());
        assert!(RunConfig::parse("[suites.laplacian]\nbogus = 1\n").is_err());
        assert!(RunConfig::parse("[suites.bb_l1]\nladder = [256, 128]\n").is_ok());
    }
}
