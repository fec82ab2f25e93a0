//! Experiment config files: sectioned key-value text, commented example
//! below. Files override built-in defaults; command-line flags override
//! files.

use super::{ExperimentConfig, PopulationTemplate};
use crate::{Error, Result};
use std::path::PathBuf;

/// A commented configuration covering every recognized key. `mbsim
/// evolve --config <file>` accepts exactly this format.
pub const EXAMPLE_CONFIG: &str = "\
# Experiment configuration. Keys are grouped in sections; omitted keys
# keep their defaults. Lists accept space- or comma-separated values.

[experiment]
# Per-channel target bit frequencies (task difficulty levels).
difficulty_grid = 0.60 0.90
# Non-decision times (steps before answers count).
nondecision_grid = 40
# Replicate populations per grid cell.
replicates = 20
# Base seed; per-population seeds derive from it.
base_seed = 1
# Output directory (relative paths land under $MBSIM_OUT_ROOT when set).
output_dir = runs/desk
# Populations run concurrently.
parallelism = 1
# Worker threads inside each population.
threads_per_population = 1

[population]
population_size = 100
generations = 2000
seed_genome_length = 4096
# Generations between genome snapshots / checkpoints.
snapshot_interval = 500
trials_per_agent = 100
max_steps = 100
# All agents of a generation face identical trial streams when true.
common_trials = false

[mutation]
# Per-nucleotide point mutation probability.
point = 0.00005
# Per-replication probabilities of one segment duplication / deletion.
duplication = 0.002
deletion = 0.001
dup_del_segment_len = 256
";

fn parse_list<T: std::str::FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad value {s:?} for {key}")))
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

/// Parse a config file, starting from the desk-scale defaults.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig {
        output_dir: PathBuf::from("runs/experiment"),
        ..ExperimentConfig::desk_default()
    };
    let mut population = PopulationTemplate::default();
    let mut section = String::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse(format!("line {}: unclosed section", lineno + 1)))?;
            section = name.trim().to_string();
            if !["experiment", "population", "mutation"].contains(&section.as_str()) {
                return Err(Error::Parse(format!(
                    "line {}: unknown section [{section}]",
                    lineno + 1
                )));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        match (section.as_str(), key) {
            ("experiment", "difficulty_grid") => {
                config.difficulty_grid = parse_list(value, key)?;
            }
            ("experiment", "nondecision_grid") => {
                config.nondecision_grid = parse_list(value, key)?;
            }
            ("experiment", "replicates") => config.replicates = parse_scalar(value, key)?,
            ("experiment", "base_seed") => config.base_seed = parse_scalar(value, key)?,
            ("experiment", "output_dir") => config.output_dir = PathBuf::from(value),
            ("experiment", "parallelism") => config.parallelism = parse_scalar(value, key)?,
            ("experiment", "threads_per_population") => {
                config.threads_per_population = parse_scalar(value, key)?;
            }
            ("population", "population_size") => {
                population.population_size = parse_scalar(value, key)?;
            }
            ("population", "generations") => population.generations = parse_scalar(value, key)?,
            ("population", "seed_genome_length") => {
                population.seed_genome_length = parse_scalar(value, key)?;
            }
            ("population", "snapshot_interval") => {
                population.snapshot_interval = parse_scalar(value, key)?;
            }
            ("population", "trials_per_agent") => {
                population.trials_per_agent = parse_scalar(value, key)?;
            }
            ("population", "max_steps") => population.max_steps = parse_scalar(value, key)?,
            ("population", "common_trials") => {
                population.common_trials = parse_scalar(value, key)?;
            }
            ("mutation", "point") => population.rates.point = parse_scalar(value, key)?,
            ("mutation", "duplication") => {
                population.rates.duplication = parse_scalar(value, key)?;
            }
            ("mutation", "deletion") => population.rates.deletion = parse_scalar(value, key)?,
            ("mutation", "dup_del_segment_len") => {
                population.rates.dup_del_segment_len = parse_scalar(value, key)?;
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key {key:?} in section [{section}]",
                    lineno + 1
                )));
            }
        }
    }
    config.population = population;
    Ok(config)
}

/// Apply the `MBSIM_OUT_ROOT` override to a relative output dir.
pub fn apply_output_root(config: &mut ExperimentConfig) {
    if let Ok(root) = std::env::var("MBSIM_OUT_ROOT") {
        if !root.is_empty() && config.output_dir.is_relative() {
            config.output_dir = PathBuf::from(root).join(&config.output_dir);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_config_parses_to_expected_values() {
        let config = parse_experiment_config(EXAMPLE_CONFIG).unwrap();
        assert_eq!(config.difficulty_grid, vec![0.60, 0.90]);
        assert_eq!(config.nondecision_grid, vec![40]);
        assert_eq!(config.replicates, 20);
        assert_eq!(config.base_seed, 1);
        assert_eq!(config.output_dir, PathBuf::from("runs/desk"));
        assert_eq!(config.population.generations, 2000);
        assert_eq!(config.population.rates.point, 0.00005);
        assert_eq!(config.population.rates.duplication, 0.002);
        assert_eq!(config.population.rates.deletion, 0.001);
        assert_eq!(config.population.rates.dup_del_segment_len, 256);
        assert!(!config.population.common_trials);
    }

    #[test]
    fn comma_separated_lists_and_comments_parse() {
        let text = "[experiment]\ndifficulty_grid = 0.6, 0.75, 0.9 # three levels\n";
        let config = parse_experiment_config(text).unwrap();
        assert_eq!(config.difficulty_grid, vec![0.6, 0.75, 0.9]);
    }

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        assert!(parse_experiment_config("[experiment]\nbogus = 1\n").is_err());
        assert!(parse_experiment_config("[nope]\n").is_err());
        assert!(parse_experiment_config("difficulty_grid = 0.6\n").is_err());
        assert!(parse_experiment_config("[experiment]\nreplicates ten\n").is_err());
    }
}
