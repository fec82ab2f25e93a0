//! Experiment orchestration: condition grids, per-population scheduling,
//! manifests, and the on-disk experiment layout.
//!
//! An experiment is a Cartesian grid of difficulty levels and
//! non-decision times, each cell run for a number of replicate
//! populations. Populations are fully independent: each gets its own
//! derived seed, its own directory, and its own checkpoint, so the grid
//! parallelizes freely and interrupted experiments resume per
//! population.

pub mod config;

use crate::environment::Condition;
use crate::evolution::{run_population, PopulationConfig, RunOptions};
use crate::rng::{Purpose, Stream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Template for every population in an experiment; condition and seed
/// are filled per grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationTemplate {
    pub population_size: u32,
    pub generations: u32,
    pub rates: crate::genome::MutationRates,
    pub seed_genome_length: usize,
    pub snapshot_interval: u32,
    pub common_trials: bool,
    pub max_steps: u32,
    pub trials_per_agent: u32,
}

impl Default for PopulationTemplate {
    fn default() -> Self {
        PopulationTemplate {
            population_size: 100,
            generations: 2_000,
            rates: crate::genome::MutationRates::default(),
            seed_genome_length: crate::evolution::DEFAULT_SEED_GENOME_LENGTH,
            snapshot_interval: 500,
            common_trials: false,
            max_steps: 100,
            trials_per_agent: 100,
        }
    }
}

/// Full experiment specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub difficulty_grid: Vec<f64>,
    pub nondecision_grid: Vec<u32>,
    pub replicates: u32,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// Populations run concurrently.
    pub parallelism: usize,
    /// Worker threads inside each population's evaluation loop.
    pub threads_per_population: usize,
    pub population: PopulationTemplate,
}

impl ExperimentConfig {
    /// Desk-scale profile: the two difficulty extremes at one
    /// non-decision time, 2000 generations, 20 replicates.
    pub fn desk_default() -> Self {
        ExperimentConfig {
            difficulty_grid: vec![0.60, 0.90],
            nondecision_grid: vec![40],
            replicates: 20,
            base_seed: 1,
            output_dir: PathBuf::from("runs/desk"),
            parallelism: 1,
            threads_per_population: 1,
            population: PopulationTemplate::default(),
        }
    }

    /// The full grid: 7 difficulties x 9 non-decision times x 100
    /// replicates x 10000 generations. Compute-heavy; run it on many
    /// machines by pointing each at a subset of the grid.
    pub fn full_scale() -> Self {
        ExperimentConfig {
            difficulty_grid: (0..7).map(|i| 0.60 + 0.05 * i as f64).collect(),
            nondecision_grid: (0..9).map(|i| 10 + 5 * i).collect(),
            replicates: 100,
            base_seed: 1,
            output_dir: PathBuf::from("runs/full"),
            parallelism: 1,
            threads_per_population: 1,
            population: PopulationTemplate {
                generations: 10_000,
                ..PopulationTemplate::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.difficulty_grid.is_empty() || self.nondecision_grid.is_empty() {
            return Err(Error::InvalidArgument("empty condition grid".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be >= 1".into()));
        }
        if self.parallelism == 0 || self.threads_per_population == 0 {
            return Err(Error::InvalidArgument(
                "parallelism and threads must be >= 1".into(),
            ));
        }
        for entry in self.expand_grid()? {
            entry.config.validate()?;
        }
        Ok(())
    }

    /// One population config per grid cell and replicate.
    pub fn expand_grid(&self) -> Result<Vec<PlannedPopulation>> {
        if self.difficulty_grid.is_empty() || self.nondecision_grid.is_empty() {
            return Err(Error::InvalidArgument("empty condition grid".into()));
        }
        let single_condition = self.difficulty_grid.len() == 1 && self.nondecision_grid.len() == 1;
        let mut planned = Vec::new();
        let mut condition_index = 0u64;
        for &difficulty in &self.difficulty_grid {
            for &ndt in &self.nondecision_grid {
                let condition = Condition {
                    target_freq: difficulty,
                    nondecision_time: ndt,
                    max_steps: self.population.max_steps,
                    trials_per_agent: self.population.trials_per_agent,
                };
                for replicate in 0..self.replicates {
                    let run_seed =
                        derive_population_seed(self.base_seed, condition_index, replicate);
                    let population_id = format!("p{replicate:03}");
                    let rel_dir = if single_condition {
                        PathBuf::from(&population_id)
                    } else {
                        PathBuf::from(condition.label()).join(&population_id)
                    };
                    planned.push(PlannedPopulation {
                        condition,
                        condition_index,
                        replicate,
                        population_id,
                        rel_dir,
                        config: PopulationConfig {
                            population_size: self.population.population_size,
                            generations: self.population.generations,
                            condition,
                            rates: self.population.rates,
                            seed_genome_length: self.population.seed_genome_length,
                            run_seed,
                            snapshot_interval: self.population.snapshot_interval,
                            common_trials: self.population.common_trials,
                        },
                    });
                }
                condition_index += 1;
            }
        }
        Ok(planned)
    }

    /// Stable hash over the whole experiment config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialization");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// One cell x replicate of the expanded grid.
#[derive(Debug, Clone)]
pub struct PlannedPopulation {
    pub condition: Condition,
    pub condition_index: u64,
    pub replicate: u32,
    pub population_id: String,
    /// Directory relative to the experiment output dir.
    pub rel_dir: PathBuf,
    pub config: PopulationConfig,
}

/// Distinct per-population seeds from the experiment base seed.
pub fn derive_population_seed(base_seed: u64, condition_index: u64, replicate: u32) -> u64 {
    Stream::keyed(
        base_seed,
        Purpose::PopulationSeed,
        [condition_index, replicate as u64, 0],
    )
    .next_u64()
}

/// Append-only manifest events, one JSON object per line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ManifestEvent {
    Plan {
        config_hash: String,
        version: String,
        populations: usize,
    },
    Population {
        id: String,
        path: String,
        seed: u64,
        status: PopulationStatus,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        files: Vec<String>,
    },
    /// Post-run artifacts (probe logs) added under a population dir.
    Artifacts { path: String, files: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationStatus {
    Pending,
    Running,
    Done,
    Failed,
}

/// Assembled view of the manifest: latest status per population.
#[derive(Debug, Default)]
pub struct RunManifest {
    pub config_hash: Option<String>,
    pub version: Option<String>,
    pub statuses: std::collections::BTreeMap<String, PopulationStatus>,
    pub files: std::collections::BTreeMap<String, Vec<String>>,
}

pub fn manifest_path(output_dir: &Path) -> PathBuf {
    output_dir.join("manifest.jsonl")
}

/// Fold the event log into the latest per-population view.
pub fn load_manifest(output_dir: &Path) -> Result<RunManifest> {
    let mut manifest = RunManifest::default();
    let path = manifest_path(output_dir);
    if !path.exists() {
        return Ok(manifest);
    }
    let reader = BufReader::new(fs::File::open(&path)?);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event: ManifestEvent =
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
        match event {
            ManifestEvent::Plan {
                config_hash,
                version,
                ..
            } => {
                manifest.config_hash = Some(config_hash);
                manifest.version = Some(version);
            }
            ManifestEvent::Population {
                path,
                status,
                files,
                ..
            } => {
                manifest.statuses.insert(path.clone(), status);
                if !files.is_empty() {
                    manifest.files.insert(path, files);
                }
            }
            ManifestEvent::Artifacts { path, files } => {
                manifest.files.entry(path).or_default().extend(files);
            }
        }
    }
    Ok(manifest)
}

fn append_manifest(out: &Mutex<fs::File>, event: &ManifestEvent) -> Result<()> {
    let line = serde_json::to_string(event).expect("manifest serialization");
    let mut file = out.lock().expect("manifest lock");
    writeln!(file, "{line}")?;
    file.sync_data()?;
    Ok(())
}

/// Relative paths of every artifact a finished population wrote.
fn population_files(root: &Path, rel_dir: &Path) -> Result<Vec<String>> {
    let mut files = Vec::new();
    let dir = root.join(rel_dir);
    let mut stack = vec![dir.clone()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let entry = entry?;
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if let Ok(rel) = path.strip_prefix(root) {
                files.push(rel.to_string_lossy().into_owned());
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Outcome of [`run_experiment`].
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub completed: usize,
    pub skipped: usize,
    pub failed: Vec<(String, String)>,
}

/// Run every planned population, up to `parallelism` at a time. Finished
/// populations are detected via their checkpoints and skipped, so reruns
/// over a completed directory are no-ops and interrupted experiments
/// resume where they stopped.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let planned = config.expand_grid()?;
    fs::create_dir_all(&config.output_dir)?;

    let experiment_json = config.output_dir.join("experiment.json");
    let rendered = serde_json::to_string_pretty(config).expect("config serialization") + "\n";
    if experiment_json.exists() {
        let existing = fs::read_to_string(&experiment_json)?;
        if existing != rendered {
            return Err(Error::ConfigMismatch(format!(
                "{} holds a different experiment config",
                config.output_dir.display()
            )));
        }
    } else {
        fs::write(&experiment_json, &rendered)?;
    }

    let manifest_view = load_manifest(&config.output_dir)?;
    let manifest_file = Mutex::new(
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(manifest_path(&config.output_dir))?,
    );
    if manifest_view.config_hash.as_deref() != Some(config.hash().as_str()) {
        append_manifest(
            &manifest_file,
            &ManifestEvent::Plan {
                config_hash: config.hash(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                populations: planned.len(),
            },
        )?;
    }

    let next = AtomicUsize::new(0);
    let completed = AtomicUsize::new(0);
    let skipped = AtomicUsize::new(0);
    let failures: Mutex<Vec<(String, String)>> = Mutex::new(Vec::new());
    let workers = config.parallelism.min(planned.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                let Some(plan) = planned.get(index) else {
                    break;
                };
                let rel = plan.rel_dir.to_string_lossy().into_owned();
                let already_done = manifest_view.statuses.get(&rel)
                    == Some(&PopulationStatus::Done)
                    && population_is_done(&config.output_dir.join(&plan.rel_dir));
                if already_done {
                    skipped.fetch_add(1, Ordering::Relaxed);
                    continue;
                }
                let dir = config.output_dir.join(&plan.rel_dir);
                let options = RunOptions {
                    threads: config.threads_per_population,
                    stop_after: None,
                };
                let result = run_population(&plan.config, &dir, &plan.population_id, &options);
                let event = match &result {
                    Ok(_) => ManifestEvent::Population {
                        id: plan.population_id.clone(),
                        path: rel.clone(),
                        seed: plan.config.run_seed,
                        status: PopulationStatus::Done,
                        error: None,
                        files: population_files(&config.output_dir, &plan.rel_dir)
                            .unwrap_or_default(),
                    },
                    Err(err) => ManifestEvent::Population {
                        id: plan.population_id.clone(),
                        path: rel.clone(),
                        seed: plan.config.run_seed,
                        status: PopulationStatus::Failed,
                        error: Some(err.to_string()),
                        files: Vec::new(),
                    },
                };
                append_manifest(&manifest_file, &event).ok();
                match result {
                    Ok(_) => {
                        completed.fetch_add(1, Ordering::Relaxed);
                    }
                    Err(err) => {
                        failures
                            .lock()
                            .expect("failure list lock")
                            .push((rel, err.to_string()));
                    }
                }
            });
        }
    });

    Ok(ExperimentOutcome {
        completed: completed.into_inner(),
        skipped: skipped.into_inner(),
        failed: failures.into_inner().expect("failure list"),
    })
}

/// Record post-run files (probe outputs) in the enclosing experiment's
/// manifest, if there is one. Returns whether a manifest was found.
pub fn record_artifacts(run_dir: &Path, files: &[PathBuf]) -> Result<bool> {
    let run_dir = run_dir.canonicalize()?;
    let mut root = run_dir.parent();
    while let Some(dir) = root {
        if manifest_path(dir).exists() {
            let rel: Vec<String> = files
                .iter()
                .filter_map(|f| {
                    f.canonicalize().ok().and_then(|f| {
                        f.strip_prefix(dir)
                            .map(|p| p.to_string_lossy().into_owned())
                            .ok()
                    })
                })
                .collect();
            let population = run_dir
                .strip_prefix(dir)
                .map(|p| p.to_string_lossy().into_owned())
                .unwrap_or_default();
            let file = Mutex::new(
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(manifest_path(dir))?,
            );
            append_manifest(
                &file,
                &ManifestEvent::Artifacts {
                    path: population,
                    files: rel,
                },
            )?;
            return Ok(true);
        }
        root = dir.parent();
    }
    Ok(false)
}

/// True when a population directory holds a completed checkpoint.
pub fn population_is_done(dir: &Path) -> bool {
    let path = dir.join("checkpoint.json");
    let Ok(data) = fs::read_to_string(path) else {
        return false;
    };
    serde_json::from_str::<serde_json::Value>(&data)
        .ok()
        .and_then(|v| v.get("done").and_then(serde_json::Value::as_bool))
        .unwrap_or(false)
}

/// Check that manifest-listed files exist and that no unlisted files sit
/// in population directories. Returns (missing, orphans).
pub fn verify_manifest_files(output_dir: &Path) -> Result<(Vec<String>, Vec<String>)> {
    let manifest = load_manifest(output_dir)?;
    let mut missing = Vec::new();
    let mut listed: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    for files in manifest.files.values() {
        for file in files {
            listed.insert(file.clone());
            if !output_dir.join(file).exists() {
                missing.push(file.clone());
            }
        }
    }
    let mut orphans = Vec::new();
    for dir in manifest.files.keys() {
        for file in population_files(output_dir, Path::new(dir))? {
            if !listed.contains(&file) {
                orphans.push(file);
            }
        }
    }
    Ok((missing, orphans))
}
