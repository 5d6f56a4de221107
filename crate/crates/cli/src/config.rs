//! TOML run configuration. Command-line flags and `CNEIGH_*` variables take
//! precedence over the file; the file takes precedence over built-in defaults.

use crate::error::{io_error, CliError, CliResult};
use cneigh::simulate::Scenario;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub integrate: IntegrateSection,
    #[serde(default)]
    pub interval: IntervalSection,
    #[serde(default)]
    pub regularity: RegularitySection,
    #[serde(default)]
    pub density: DensitySection,
    /// Kept as raw tables so that an explicit per-scenario `seed` can be told
    /// apart from the default.
    #[serde(default)]
    pub scenario: Vec<toml::Table>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateSection {
    pub method: Option<String>,
    pub density: Option<String>,
    pub mc_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSection {
    pub mode: Option<String>,
    pub method: Option<String>,
    pub beta: Option<f64>,
    pub replicates: Option<usize>,
    pub m_star: Option<usize>,
    pub level: Option<f64>,
    pub variance: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularitySection {
    pub grid: Option<usize>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub c_th: Option<f64>,
    pub c_k0: Option<f64>,
    pub c_k1: Option<f64>,
    pub floor: Option<f64>,
    pub grid_size: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        // validate scenarios up front so that bad keys fail before any work
        cfg.scenarios().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// Scenarios with a flag telling whether the table set `seed` itself.
    pub fn scenarios(&self) -> CliResult<Vec<(Scenario, bool)>> {
        self.scenario
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let sc: Scenario = t
                    .clone()
                    .try_into()
                    .map_err(|e| CliError::usage(format!("scenario #{}: {e}", i + 1)))?;
                Ok((sc, t.contains_key("seed")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        let c = RunConfig::parse("").unwrap();
        assert!(c.run.seed.is_none());
        assert!(c.scenario.is_empty());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("[run]\nsed = 3\n").is_err());
        assert!(RunConfig::parse("[nope]\n").is_err());
        assert!(RunConfig::parse("[[scenario]]\nid='a'\nkind='regression'\nm=10\nnu=2\nbogus=1\n").is_err());
    }

    #[test]
    fn scenario_seed_presence() {
        let c = RunConfig::parse(
            "[[scenario]]\nid='a'\nkind='regression'\nm=10\nnu=2\nseed=9\n\
             [[scenario]]\nid='b'\nkind='surface'\nm=10\ngamma=1.5\n",
        )
        .unwrap();
        let s = c.scenarios().unwrap();
        assert_eq!(s[0].0.seed, 9);
        assert!(s[0].1);
        assert!(!s[1].1);
    }

    #[test]
    fn sections_parse() {
        let c = RunConfig::parse(
            "[run]\nseed=1\njobs=2\n[interval]\nmode='pi'\nbeta=0.5\nreplicates=200\nlevel=0.9\n\
             [density]\nc_th=0.5\n[regularity]\ngrid=10\n",
        )
        .unwrap();
        assert_eq!(c.run.jobs, Some(2));
        assert_eq!(c.interval.replicates, Some(200));
        assert_eq!(c.density.c_th, Some(0.5));
        assert_eq!(c.regularity.grid, Some(10));
    }
}
