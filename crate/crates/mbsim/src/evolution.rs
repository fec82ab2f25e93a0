//! Generational evolution: evaluation, roulette selection, mutation-based
//! reproduction, ancestry bookkeeping, and checkpointed population runs.
//!
//! Determinism contract: every random draw is keyed by
//! `(run_seed, purpose, generation, agent, trial)`, selection is
//! sequential at the generation barrier, and evaluation results are
//! collected in agent order, so a run's outputs are a pure function of
//! its [`PopulationConfig`], independent of thread count, interruption,
//! and resume history.

use crate::analysis::LodEntry;
use crate::brain::{decode, CompiledBrain};
use crate::environment::{evaluate_agent, Condition};
use crate::genome::{mutate, random_seed_genome, Genome, MutationRates};
use crate::rng::{Purpose, Stream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Default seed genome length, calibrated so freshly seeded brains carry
/// roughly 20-30 connections (one gene per ~1024 nucleotides, ~6.25
/// connections per gene).
pub const DEFAULT_SEED_GENOME_LENGTH: usize = 4096;

/// Full specification of one population run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub population_size: u32,
    pub generations: u32,
    pub condition: Condition,
    pub rates: MutationRates,
    pub seed_genome_length: usize,
    pub run_seed: u64,
    /// Generations between genome snapshots (and checkpoints). The
    /// default probe generation `generations - 30` is always snapshotted
    /// too.
    pub snapshot_interval: u32,
    /// When set, all agents of a generation face identical trial streams
    /// (common random numbers) instead of independent per-agent draws.
    pub common_trials: bool,
}

impl PopulationConfig {
    pub fn new(condition: Condition, run_seed: u64) -> Self {
        PopulationConfig {
            population_size: 100,
            generations: 10_000,
            condition,
            rates: MutationRates::default(),
            seed_genome_length: DEFAULT_SEED_GENOME_LENGTH,
            run_seed,
            snapshot_interval: 500,
            common_trials: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidArgument(
                "population_size must be >= 2".into(),
            ));
        }
        if self.generations < 1 {
            return Err(Error::InvalidArgument("generations must be >= 1".into()));
        }
        if self.snapshot_interval == 0 {
            return Err(Error::InvalidArgument(
                "snapshot_interval must be >= 1".into(),
            ));
        }
        self.condition.validate()?;
        self.rates.validate()?;
        if !(crate::genome::MIN_LEN..=crate::genome::MAX_LEN).contains(&self.seed_genome_length) {
            return Err(Error::InvalidArgument(format!(
                "seed_genome_length {} outside [{}, {}]",
                self.seed_genome_length,
                crate::genome::MIN_LEN,
                crate::genome::MAX_LEN
            )));
        }
        Ok(())
    }

    /// Stable hash of the full config; guards checkpoint resume.
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

/// One agent's bookkeeping for one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AncestryRow {
    /// Parent index in the previous generation; `None` in generation 0.
    pub parent: Option<u32>,
    pub fitness: u32,
    pub connections: u32,
}

/// Parent links plus per-agent fitness and connection counts, one layer
/// per generation starting at 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AncestryTable {
    layers: Vec<Vec<AncestryRow>>,
}

impl AncestryTable {
    pub fn new() -> Self {
        AncestryTable { layers: Vec::new() }
    }

    pub fn push_generation(&mut self, rows: Vec<AncestryRow>) {
        self.layers.push(rows);
    }

    /// Number of recorded generations.
    pub fn generations(&self) -> usize {
        self.layers.len()
    }

    pub fn rows(&self, generation: usize) -> Option<&[AncestryRow]> {
        self.layers.get(generation).map(Vec::as_slice)
    }

    /// Append rows for one generation to a CSV sink.
    fn write_generation_csv(
        generation: u32,
        rows: &[AncestryRow],
        out: &mut impl Write,
    ) -> Result<()> {
        for (agent, row) in rows.iter().enumerate() {
            let parent = row.parent.map(|p| p.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{generation},{agent},{parent},{},{}",
                row.fitness, row.connections
            )?;
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "generation,agent_index,parent_index,fitness,connections";

    /// Load a table from its CSV serialization.
    pub fn from_csv(reader: impl BufRead) -> Result<Self> {
        let mut table = AncestryTable::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line == Self::CSV_HEADER {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!(
                    "ancestry line {}: expected 5 fields",
                    lineno + 1
                )));
            }
            let gen: usize = fields[0]
                .parse()
                .map_err(|_| Error::Parse(format!("ancestry line {}", lineno + 1)))?;
            let agent: usize = fields[1]
                .parse()
                .map_err(|_| Error::Parse(format!("ancestry line {}", lineno + 1)))?;
            let parent = if fields[2].is_empty() {
                None
            } else {
                Some(
                    fields[2]
                        .parse()
                        .map_err(|_| Error::Parse(format!("ancestry line {}", lineno + 1)))?,
                )
            };
            let fitness = fields[3]
                .parse()
                .map_err(|_| Error::Parse(format!("ancestry line {}", lineno + 1)))?;
            let connections = fields[4]
                .parse()
                .map_err(|_| Error::Parse(format!("ancestry line {}", lineno + 1)))?;
            if table.layers.len() == gen {
                table.layers.push(Vec::new());
            }
            if gen >= table.layers.len() || table.layers[gen].len() != agent {
                return Err(Error::Integrity(format!(
                    "ancestry rows out of order at line {}",
                    lineno + 1
                )));
            }
            table.layers[gen].push(AncestryRow {
                parent,
                fitness,
                connections,
            });
        }
        Ok(table)
    }
}

/// Walk parent links from a final-generation agent back to generation 0.
/// Entries come out in generation order (0 first).
pub fn extract_lod(ancestry: &AncestryTable, final_index: u32) -> Result<Vec<LodEntry>> {
    let last_gen = ancestry
        .layers
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidArgument("empty ancestry table".into()))?;
    let last_rows = &ancestry.layers[last_gen];
    if final_index as usize >= last_rows.len() {
        return Err(Error::InvalidArgument(format!(
            "agent {final_index} not in final generation (size {})",
            last_rows.len()
        )));
    }
    let mut chain = Vec::with_capacity(ancestry.layers.len());
    let mut index = final_index as usize;
    for gen in (0..=last_gen).rev() {
        let rows = &ancestry.layers[gen];
        let row = rows.get(index).ok_or_else(|| {
            Error::Integrity(format!(
                "missing ancestry row for generation {gen} agent {index}"
            ))
        })?;
        chain.push(LodEntry {
            generation: gen as u32,
            fitness: row.fitness,
            connections: row.connections,
        });
        match (gen, row.parent) {
            (0, None) => {}
            (0, Some(_)) => {
                return Err(Error::Integrity("generation 0 has a parent link".into()));
            }
            (_, Some(parent)) => index = parent as usize,
            (_, None) => {
                return Err(Error::Integrity(format!(
                    "missing parent link at generation {gen} agent {index}"
                )));
            }
        }
    }
    chain.reverse();
    Ok(chain)
}

/// Per-generation aggregate statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: u32,
    pub mean_fitness: f64,
    pub max_fitness: u32,
    pub mean_connections: f64,
    /// Mean decision step pooled over decided trials; `None` when no
    /// trial decided.
    pub mean_decision_step: Option<f64>,
}

impl GenerationStats {
    pub const CSV_HEADER: &'static str =
        "population_id,generation,mean_fitness,max_fitness,mean_connections,mean_decision_step";

    pub fn to_csv_row(&self, population_id: &str) -> String {
        let step = self
            .mean_decision_step
            .map(|s| format!("{s:.4}"))
            .unwrap_or_default();
        format!(
            "{population_id},{},{:.4},{},{:.4},{step}",
            self.generation, self.mean_fitness, self.max_fitness, self.mean_connections
        )
    }
}

/// Roulette-wheel selection: `count` independent draws proportional to
/// fitness, uniform when total fitness is zero. Integer arithmetic keeps
/// the weights exact.
pub fn select_parents(fitnesses: &[u32], count: usize, rng: &mut Stream) -> Vec<u32> {
    assert!(!fitnesses.is_empty(), "selection over empty population");
    let total: u64 = fitnesses.iter().map(|&f| f as u64).sum();
    let mut parents = Vec::with_capacity(count);
    for _ in 0..count {
        let index = if total == 0 {
            rng.below(fitnesses.len() as u64) as u32
        } else {
            let mut ticket = rng.below(total);
            let mut chosen = 0u32;
            for (i, &f) in fitnesses.iter().enumerate() {
                if ticket < f as u64 {
                    chosen = i as u32;
                    break;
                }
                ticket -= f as u64;
            }
            chosen
        };
        parents.push(index);
    }
    parents
}

/// One agent's evaluation outcome inside the generational loop.
#[derive(Debug, Clone, Copy)]
pub struct EvalOutcome {
    pub fitness: u32,
    pub connections: u32,
    pub decided: u32,
    pub decision_step_sum: u64,
}

/// Evaluate a whole generation. Decoding happens once per agent; agents
/// are independent and run in parallel when `threads > 1`. Results are in
/// agent order regardless of scheduling.
pub fn evaluate_population(
    genomes: &[Genome],
    config: &PopulationConfig,
    generation: u32,
    purpose: Purpose,
    threads: usize,
) -> Vec<EvalOutcome> {
    let eval_one = |(agent, genome): (usize, &Genome)| {
        let compiled = CompiledBrain::from_brain(&decode(genome));
        let agent_key = if config.common_trials {
            0
        } else {
            agent as u64
        };
        let eval = evaluate_agent(
            &compiled,
            &config.condition,
            |trial| {
                Stream::keyed(
                    config.run_seed,
                    purpose,
                    [generation as u64, agent_key, trial as u64],
                )
            },
            false,
        );
        EvalOutcome {
            fitness: eval.fitness,
            connections: compiled.connections() as u32,
            decided: eval.decided,
            decision_step_sum: eval.decision_step_sum,
        }
    };

    if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            genomes.par_iter().enumerate().map(eval_one).collect()
        })
    } else {
        genomes.iter().enumerate().map(eval_one).collect()
    }
}

fn stats_from_evals(generation: u32, evals: &[EvalOutcome]) -> GenerationStats {
    let n = evals.len() as f64;
    let fitness_sum: u64 = evals.iter().map(|e| e.fitness as u64).sum();
    let connection_sum: u64 = evals.iter().map(|e| e.connections as u64).sum();
    let decided: u64 = evals.iter().map(|e| e.decided as u64).sum();
    let step_sum: u64 = evals.iter().map(|e| e.decision_step_sum).sum();
    GenerationStats {
        generation,
        mean_fitness: fitness_sum as f64 / n,
        max_fitness: evals.iter().map(|e| e.fitness).max().unwrap_or(0),
        mean_connections: connection_sum as f64 / n,
        mean_decision_step: (decided > 0).then(|| step_sum as f64 / decided as f64),
    }
}

/// Output of [`advance_generation`].
pub struct GenerationOutcome {
    pub children: Vec<Genome>,
    pub evals: Vec<EvalOutcome>,
    pub stats: GenerationStats,
    /// Parent index (into this generation) of each child.
    pub parents: Vec<u32>,
}

/// Evaluate generation `generation_index`, select parents by roulette,
/// and breed the next generation by mutated copying.
pub fn advance_generation(
    genomes: &[Genome],
    config: &PopulationConfig,
    generation_index: u32,
    threads: usize,
) -> GenerationOutcome {
    assert_eq!(genomes.len(), config.population_size as usize);
    let evals = evaluate_population(genomes, config, generation_index, Purpose::Trial, threads);
    let stats = stats_from_evals(generation_index, &evals);

    let fitnesses: Vec<u32> = evals.iter().map(|e| e.fitness).collect();
    let mut select_rng = Stream::keyed(
        config.run_seed,
        Purpose::Select,
        [generation_index as u64, 0, 0],
    );
    let parents = select_parents(&fitnesses, genomes.len(), &mut select_rng);

    let child_generation = generation_index as u64 + 1;
    let children = parents
        .iter()
        .enumerate()
        .map(|(child, &parent)| {
            let mut rng = Stream::keyed(
                config.run_seed,
                Purpose::Mutate,
                [child_generation, child as u64, 0],
            );
            mutate(&genomes[parent as usize], &config.rates, &mut rng)
        })
        .collect();

    GenerationOutcome {
        children,
        evals,
        stats,
        parents,
    }
}

/// Build generation 0: independent mutated variants of one random seed
/// genome.
pub fn seed_population(config: &PopulationConfig) -> Result<Vec<Genome>> {
    let mut seed_rng = Stream::keyed(config.run_seed, Purpose::SeedGenome, [0, 0, 0]);
    let seed = random_seed_genome(config.seed_genome_length, &mut seed_rng)?;
    Ok((0..config.population_size)
        .map(|agent| {
            let mut rng = Stream::keyed(config.run_seed, Purpose::Mutate, [0, agent as u64, 0]);
            mutate(&seed, &config.rates, &mut rng)
        })
        .collect())
}

/// Execution knobs that do not affect results.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads for within-generation evaluation.
    pub threads: usize,
    /// Stop cleanly before running this generation (checkpoint intact);
    /// used to exercise interruption and to split long runs.
    pub stop_after: Option<u32>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: 1,
            stop_after: None,
        }
    }
}

/// File layout of one population run directory.
pub struct RunPaths {
    pub root: PathBuf,
}

impl RunPaths {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunPaths { root: root.into() }
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.json")
    }

    pub fn stats(&self) -> PathBuf {
        self.root.join("stats.csv")
    }

    pub fn ancestry(&self) -> PathBuf {
        self.root.join("ancestry.csv")
    }

    pub fn checkpoint(&self) -> PathBuf {
        self.root.join("checkpoint.json")
    }

    pub fn snapshots(&self) -> PathBuf {
        self.root.join("snapshots")
    }

    pub fn snapshot(&self, generation: u32) -> PathBuf {
        self.snapshots().join(format!("gen_{generation:06}.txt"))
    }

    pub fn probe_dir(&self, generation: u32) -> PathBuf {
        self.root.join(format!("probe_{generation}"))
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config_hash: String,
    /// Generation the stored genomes belong to.
    generation: u32,
    /// Whether the run has fully completed (final generation recorded).
    done: bool,
    /// Flushed stats.csv size at checkpoint time.
    stats_len: u64,
    /// Flushed ancestry.csv size at checkpoint time.
    ancestry_len: u64,
    /// Parent index of each stored genome in the previous generation;
    /// absent for generation 0.
    parents: Option<Vec<u32>>,
    genomes: Vec<String>,
}

fn write_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    let json = serde_json::to_string(checkpoint).expect("checkpoint serialization");
    fs::write(&tmp, json)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_checkpoint(path: &Path) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let data = fs::read_to_string(path)?;
    let checkpoint =
        serde_json::from_str(&data).map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
    Ok(Some(checkpoint))
}

fn write_snapshot(path: &Path, genomes: &[Genome]) -> Result<()> {
    let mut out = String::new();
    for genome in genomes {
        out.push_str(&genome.to_line());
        out.push('\n');
    }
    let tmp = path.with_extension("txt.tmp");
    fs::write(&tmp, out)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Read a genome-per-line snapshot file.
pub fn read_snapshot(path: &Path) -> Result<Vec<Genome>> {
    if !path.exists() {
        return Err(Error::NotFound(format!("snapshot {}", path.display())));
    }
    let reader = BufReader::new(File::open(path)?);
    let mut genomes = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            genomes.push(Genome::from_line(&line)?);
        }
    }
    Ok(genomes)
}

/// Result of a completed (or resumed-to-completion) population run.
pub struct RunSummary {
    /// Last generation whose genomes exist (`== config.generations` when
    /// the run is done).
    pub generation: u32,
    pub done: bool,
    pub final_genomes: Vec<Genome>,
    pub ancestry: AncestryTable,
}

/// Truncate a file to a recorded length and reopen it for appending.
fn reopen_truncated(path: &Path, len: u64) -> Result<BufWriter<File>> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    file.set_len(len)?;
    drop(file);
    let file = OpenOptions::new().append(true).open(path)?;
    Ok(BufWriter::new(file))
}

/// Run (or resume) one population in `dir`, writing stats, ancestry,
/// snapshots, and checkpoints.
///
/// Generations `0..config.generations-1` each produce one stats row and
/// one block of ancestry rows; the final generation is evaluated once
/// more for ancestry completeness (no stats row), so the line of descent
/// spans `generations + 1` entries with fitness and connection counts
/// throughout. Snapshots land every `snapshot_interval` generations, at
/// the default probe generation `generations - 30`, and at the final
/// generation.
pub fn run_population(
    config: &PopulationConfig,
    dir: &Path,
    population_id: &str,
    options: &RunOptions,
) -> Result<RunSummary> {
    config.validate()?;
    fs::create_dir_all(dir)?;
    let paths = RunPaths::new(dir);
    fs::create_dir_all(paths.snapshots())?;

    let config_hash = config.hash();
    match read_checkpoint(&paths.checkpoint())? {
        Some(cp) if cp.config_hash != config_hash => {
            return Err(Error::ConfigMismatch(format!(
                "checkpoint in {} was written by a different config",
                dir.display()
            )));
        }
        _ => {}
    }
    fs::write(
        paths.config(),
        serde_json::to_string_pretty(config).expect("config serialization") + "\n",
    )?;

    let checkpoint = read_checkpoint(&paths.checkpoint())?;
    let (
        mut generation,
        mut genomes,
        stats_len,
        ancestry_len,
        mut ancestry,
        done,
        mut pending_parents,
    ) = match checkpoint {
        Some(cp) => {
            let genomes = cp
                .genomes
                .iter()
                .map(|line| Genome::from_line(line))
                .collect::<Result<Vec<Genome>>>()?;
            // Rebuild the in-memory table from the (truncated) file.
            let tmp = OpenOptions::new()
                .create(true)
                .truncate(false)
                .write(true)
                .open(paths.ancestry())?;
            tmp.set_len(cp.ancestry_len)?;
            drop(tmp);
            let table = AncestryTable::from_csv(BufReader::new(File::open(paths.ancestry())?))?;
            (
                cp.generation,
                genomes,
                cp.stats_len,
                cp.ancestry_len,
                table,
                cp.done,
                cp.parents,
            )
        }
        None => {
            let genomes = seed_population(config)?;
            (0u32, genomes, 0u64, 0u64, AncestryTable::new(), false, None)
        }
    };

    if done {
        return Ok(RunSummary {
            generation,
            done,
            final_genomes: genomes,
            ancestry,
        });
    }

    let mut stats_out = reopen_truncated(&paths.stats(), stats_len)?;
    let mut ancestry_out = reopen_truncated(&paths.ancestry(), ancestry_len)?;
    if stats_len == 0 {
        writeln!(stats_out, "{}", GenerationStats::CSV_HEADER)?;
    }
    if ancestry_len == 0 {
        writeln!(ancestry_out, "{}", AncestryTable::CSV_HEADER)?;
    }

    let probe_generation = config.generations.saturating_sub(30);
    // Checkpoints are written before their generation is evaluated, so
    // the table must end exactly at the checkpointed generation.
    if ancestry.generations() != generation as usize {
        return Err(Error::Integrity(format!(
            "ancestry table holds {} generations, checkpoint expects {}",
            ancestry.generations(),
            generation
        )));
    }

    let flush_and_checkpoint = |generation: u32,
                                genomes: &[Genome],
                                parents: &Option<Vec<u32>>,
                                done: bool,
                                stats_out: &mut BufWriter<File>,
                                ancestry_out: &mut BufWriter<File>|
     -> Result<()> {
        stats_out.flush()?;
        ancestry_out.flush()?;
        let checkpoint = Checkpoint {
            config_hash: config_hash.clone(),
            generation,
            done,
            stats_len: fs::metadata(paths.stats())?.len(),
            ancestry_len: fs::metadata(paths.ancestry())?.len(),
            parents: parents.clone(),
            genomes: genomes.iter().map(Genome::to_line).collect(),
        };
        write_checkpoint(&paths.checkpoint(), &checkpoint)
    };

    while generation < config.generations {
        if options.stop_after == Some(generation) {
            flush_and_checkpoint(
                generation,
                &genomes,
                &pending_parents,
                false,
                &mut stats_out,
                &mut ancestry_out,
            )?;
            return Ok(RunSummary {
                generation,
                done: false,
                final_genomes: genomes,
                ancestry,
            });
        }
        if generation % config.snapshot_interval == 0 || generation == probe_generation {
            write_snapshot(&paths.snapshot(generation), &genomes)?;
            if generation % config.snapshot_interval == 0 && generation > 0 {
                flush_and_checkpoint(
                    generation,
                    &genomes,
                    &pending_parents,
                    false,
                    &mut stats_out,
                    &mut ancestry_out,
                )?;
            }
        }

        let outcome = advance_generation(&genomes, config, generation, options.threads);

        writeln!(stats_out, "{}", outcome.stats.to_csv_row(population_id))?;
        let rows: Vec<AncestryRow> = outcome
            .evals
            .iter()
            .enumerate()
            .map(|(agent, eval)| AncestryRow {
                parent: pending_parents.as_ref().map(|p| p[agent]),
                fitness: eval.fitness,
                connections: eval.connections,
            })
            .collect();
        AncestryTable::write_generation_csv(generation, &rows, &mut ancestry_out)?;
        ancestry.push_generation(rows);

        pending_parents = Some(outcome.parents);
        genomes = outcome.children;
        generation += 1;
    }

    // Final generation: evaluate for ancestry completeness (no stats row).
    let final_evals = evaluate_population(
        &genomes,
        config,
        generation,
        Purpose::Trial,
        options.threads,
    );
    let rows: Vec<AncestryRow> = final_evals
        .iter()
        .enumerate()
        .map(|(agent, eval)| AncestryRow {
            parent: pending_parents.as_ref().map(|p| p[agent]),
            fitness: eval.fitness,
            connections: eval.connections,
        })
        .collect();
    AncestryTable::write_generation_csv(generation, &rows, &mut ancestry_out)?;
    ancestry.push_generation(rows);

    write_snapshot(&paths.snapshot(generation), &genomes)?;

    flush_and_checkpoint(
        generation,
        &genomes,
        &pending_parents,
        true,
        &mut stats_out,
        &mut ancestry_out,
    )?;

    Ok(RunSummary {
        generation,
        done: true,
        final_genomes: genomes,
        ancestry,
    })
}
