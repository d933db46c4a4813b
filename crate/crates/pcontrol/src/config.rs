//! Settings file (TOML). Every field is optional; command-line flags win.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use pcontrol_core::ga::ReducedConfig;
use pcontrol_core::ga::GaConfig;
use pcontrol_core::pca::SelectionRule;
use pcontrol_core::pulse::{SpectralGrid, DEFAULT_TIME_SAMPLES};
use pcontrol_core::srs::SrsModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{io_error, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub time_samples: usize,
    pub ga: GaConfig,
    pub grid: SpectralGrid,
    pub model: SrsModelParams,
    pub analysis: AnalysisConfig,
    pub reduced: ReducedSettings,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            time_samples: DEFAULT_TIME_SAMPLES,
            ga: GaConfig::default(),
            grid: SpectralGrid::default(),
            model: SrsModelParams::default(),
            analysis: AnalysisConfig::default(),
            reduced: ReducedSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub k: usize,
    pub threshold: f64,
    /// Trials from earlier generations are left out of the analysis.
    pub generations_from: u32,
    /// Essential pulse from the optimum's offset to the trial mean.
    pub centered: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let rule = SelectionRule::default();
        Self {
            k: rule.k,
            threshold: rule.threshold,
            generations_from: 0,
            centered: false,
        }
    }
}

impl AnalysisConfig {
    pub fn rule(&self) -> SelectionRule {
        SelectionRule {
            k: self.k,
            threshold: self.threshold,
        }
    }
}

/// Genome the reduced-basis coordinates are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    /// Best full-basis trial of the target.
    Best,
    /// The best trial projected onto the principal controls.
    Essential,
    /// Mean phase differences of the analysed trials.
    Mean,
}

impl Anchor {
    pub fn tag(self) -> &'static str {
        match self {
            Anchor::Best => "best",
            Anchor::Essential => "essential",
            Anchor::Mean => "mean",
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Anchor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "best" => Ok(Anchor::Best),
            "essential" => Ok(Anchor::Essential),
            "mean" => Ok(Anchor::Mean),
            _ => Err(format!("unknown anchor {s:?}, expected best, essential or mean")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReducedSettings {
    pub anchor: Anchor,
    pub range_scale: f64,
    pub creep: f64,
    pub population_size: usize,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub mutation_prob: f64,
    pub tournament_size: usize,
    pub elite_count: usize,
}

impl Default for ReducedSettings {
    fn default() -> Self {
        let r = ReducedConfig::default();
        Self {
            anchor: Anchor::Mean,
            range_scale: r.range_scale,
            creep: r.creep,
            population_size: r.ga.population_size,
            max_generations: r.ga.max_generations,
            stall_generations: r.ga.stall_generations,
            mutation_prob: r.ga.mutation_prob,
            tournament_size: r.ga.tournament_size,
            elite_count: r.ga.elite_count,
        }
    }
}

impl ReducedSettings {
    pub fn search_config(&self, seed: u64) -> ReducedConfig {
        ReducedConfig {
            ga: GaConfig {
                population_size: self.population_size,
                max_generations: self.max_generations,
                stall_generations: self.stall_generations,
                mutation_prob: self.mutation_prob,
                tournament_size: self.tournament_size,
                elite_count: self.elite_count,
                rng_seed: seed,
                ..GaConfig::default()
            },
            range_scale: self.range_scale,
            creep: self.creep,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Cross-field consistency; individual blocks validate themselves.
    pub fn validate(&self) -> Result<()> {
        if self.ga.genes != self.grid.n_bins {
            return Err(Error::Config(format!(
                "ga.genes = {} but grid.n_bins = {}",
                self.ga.genes, self.grid.n_bins
            )));
        }
        self.ga.validate()?;
        self.grid.validate()?;
        self.grid.check_time_samples(self.time_samples)?;
        self.model.validate()?;
        if self.analysis.k == 0 {
            return Err(Error::Config("analysis.k must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips() {
        let c = Config::default();
        let back: Config = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c: Config = toml::from_str("[ga]\npopulation_size = 12\n[reduced]\nanchor = \"best\"\n").unwrap();
        assert_eq!(c.ga.population_size, 12);
        assert_eq!(c.ga.levels, 32);
        assert_eq!(c.reduced.anchor, Anchor::Best);
        assert!(toml::from_str::<Config>("[ga]\npopulation = 12\n").is_err());
    }

    #[test]
    fn gene_count_must_match_grid() {
        let mut c = Config::default();
        c.ga.genes = 30;
        assert!(c.validate().is_err());
    }
}
