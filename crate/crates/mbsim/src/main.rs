//! Command-line front end: evolve condition grids, extract and average
//! lines of descent, probe snapshot generations, build correlation
//! profiles, and self-validate.

use clap::{Args, Parser, Subcommand};
use mbsim::analysis::{self, LodEntry};
use mbsim::environment::TrialRecord;
use mbsim::evolution::{extract_lod, AncestryTable, RunPaths};
use mbsim::harness::{self, config as hconfig, ExperimentConfig};
use mbsim::{Error, Result};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mbsim",
    version,
    about = "Deterministic digital evolution of Markov brain agents on a ramped signal/noise decision task"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a condition grid (or single condition) of populations
    Evolve(EvolveArgs),
    /// Extract lines of descent; average them across replicates
    Lod(LodArgs),
    /// Re-evaluate a snapshot generation with full trial logging
    Probe(ProbeArgs),
    /// Build input-to-decision correlation profiles from probe logs
    Correlate(CorrelateArgs),
    /// Run the built-in oracle and consistency suite
    Validate(ValidateArgs),
}

#[derive(Args)]
struct EvolveArgs {
    /// Config file (sectioned key=value); flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from the full grid profile instead of the desk profile
    #[arg(long)]
    full_scale: bool,
    /// Target bit frequencies (difficulty grid)
    #[arg(long = "difficulty", num_args = 1..)]
    difficulty: Vec<f64>,
    /// Non-decision times
    #[arg(long = "ndt", num_args = 1..)]
    ndt: Vec<u32>,
    /// Replicate populations per condition
    #[arg(long)]
    replicates: Option<u32>,
    /// Generations per population
    #[arg(long)]
    generations: Option<u32>,
    /// Agents per population
    #[arg(long)]
    pop_size: Option<u32>,
    /// Experiment base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Populations run concurrently
    #[arg(long)]
    parallelism: Option<usize>,
    /// Worker threads inside each population
    #[arg(long)]
    threads: Option<usize>,
    /// Seed genome length
    #[arg(long)]
    seed_genome_length: Option<usize>,
    /// Generations between snapshots/checkpoints
    #[arg(long)]
    snapshot_interval: Option<u32>,
    /// Trials per fitness block
    #[arg(long)]
    trials: Option<u32>,
    /// Inputs per trial
    #[arg(long)]
    max_steps: Option<u32>,
    /// Give all agents of a generation identical trial streams
    #[arg(long)]
    common_trials: bool,
    /// Per-nucleotide point mutation probability
    #[arg(long)]
    point_rate: Option<f64>,
    /// Per-replication segment duplication probability
    #[arg(long)]
    dup_rate: Option<f64>,
    /// Per-replication segment deletion probability
    #[arg(long)]
    del_rate: Option<f64>,
    /// Length of duplicated/deleted segments
    #[arg(long)]
    segment_len: Option<usize>,
}

#[derive(Args)]
struct LodArgs {
    /// Population run directories (several average into one trajectory)
    #[arg(long = "run", num_args = 1..)]
    runs: Vec<PathBuf>,
    /// Directory whose pNNN subdirectories are the replicate runs
    #[arg(long)]
    runs_root: Option<PathBuf>,
    /// Final-generation agent to trace back from
    #[arg(long, default_value_t = 0)]
    agent: u32,
    /// Condition label for averaged output rows (default: from config)
    #[arg(long)]
    condition: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    /// Population run directory
    #[arg(long)]
    run: PathBuf,
    /// Snapshot generation (default: generations - 30)
    #[arg(long)]
    generation: Option<u32>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Probe directories (several pool their trials, e.g. one per
    /// replicate population of a condition)
    #[arg(long = "probe", num_args = 1.., required = true)]
    probes: Vec<PathBuf>,
    /// Largest backwards offset from the decision
    #[arg(long, default_value_t = 50)]
    max_offset: u32,
    /// Smallest sample count for a defined correlation
    #[arg(long, default_value_t = 10)]
    n_min: u32,
    /// Average per-agent profiles instead of pooling trials
    #[arg(long)]
    per_agent: bool,
    /// Condition label for output rows (default: from config)
    #[arg(long)]
    condition: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Scratch directory for the determinism checks
    #[arg(long)]
    work_dir: Option<PathBuf>,
    /// Also audit an experiment directory's manifest against the files
    /// on disk (missing and orphaned files fail the check)
    #[arg(long)]
    manifest_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Evolve(args) => evolve(args),
        Command::Lod(args) => lod(args),
        Command::Probe(args) => probe(args),
        Command::Correlate(args) => correlate(args),
        Command::Validate(args) => validate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn evolve(args: EvolveArgs) -> Result<ExitCode> {
    if args.full_scale && args.config.is_some() {
        return Err(Error::InvalidArgument(
            "--full-scale and --config are mutually exclusive".into(),
        ));
    }
    let mut config = if let Some(path) = &args.config {
        let text = fs::read_to_string(path)?;
        hconfig::parse_experiment_config(&text)?
    } else if args.full_scale {
        ExperimentConfig::full_scale()
    } else {
        ExperimentConfig::desk_default()
    };

    if !args.difficulty.is_empty() {
        config.difficulty_grid = args.difficulty.clone();
    }
    if !args.ndt.is_empty() {
        config.nondecision_grid = args.ndt.clone();
    }
    if let Some(v) = args.replicates {
        config.replicates = v;
    }
    if let Some(v) = args.generations {
        config.population.generations = v;
    }
    if let Some(v) = args.pop_size {
        config.population.population_size = v;
    }
    if let Some(v) = args.seed {
        config.base_seed = v;
    }
    if let Some(v) = &args.out {
        config.output_dir = v.clone();
    }
    if let Some(v) = args.parallelism {
        config.parallelism = v;
    }
    if let Some(v) = args.threads {
        config.threads_per_population = v;
    }
    if let Some(v) = args.seed_genome_length {
        config.population.seed_genome_length = v;
    }
    if let Some(v) = args.snapshot_interval {
        config.population.snapshot_interval = v;
    }
    if let Some(v) = args.trials {
        config.population.trials_per_agent = v;
    }
    if let Some(v) = args.max_steps {
        config.population.max_steps = v;
    }
    if args.common_trials {
        config.population.common_trials = true;
    }
    if let Some(v) = args.point_rate {
        config.population.rates.point = v;
    }
    if let Some(v) = args.dup_rate {
        config.population.rates.duplication = v;
    }
    if let Some(v) = args.del_rate {
        config.population.rates.deletion = v;
    }
    if let Some(v) = args.segment_len {
        config.population.rates.dup_del_segment_len = v;
    }
    hconfig::apply_output_root(&mut config);

    let planned = config.expand_grid()?.len();
    println!(
        "running {planned} populations into {} (parallelism {})",
        config.output_dir.display(),
        config.parallelism
    );
    let outcome = harness::run_experiment(&config)?;
    println!(
        "completed {} skipped {} failed {}",
        outcome.completed,
        outcome.skipped,
        outcome.failed.len()
    );
    for (path, err) in &outcome.failed {
        eprintln!("failed {path}: {err}");
    }
    Ok(if outcome.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn load_lod(run: &Path, agent: u32) -> Result<Vec<LodEntry>> {
    let paths = RunPaths::new(run);
    let ancestry_path = paths.ancestry();
    if !ancestry_path.exists() {
        return Err(Error::NotFound(format!(
            "no ancestry file at {}",
            ancestry_path.display()
        )));
    }
    let table = AncestryTable::from_csv(BufReader::new(fs::File::open(&ancestry_path)?))?;
    extract_lod(&table, agent)
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(Error::from),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(Error::from),
    }
}

/// Condition label recorded in a population's config.json.
fn condition_label_of(run: &Path) -> Option<String> {
    let data = fs::read_to_string(RunPaths::new(run).config()).ok()?;
    let config: mbsim::evolution::PopulationConfig = serde_json::from_str(&data).ok()?;
    Some(config.condition.label())
}

/// The pNNN replicate directories under an experiment (or condition)
/// directory, in name order.
fn collect_replicate_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.is_dir()
                && p.file_name().and_then(|n| n.to_str()).is_some_and(|n| {
                    n.strip_prefix('p')
                        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                })
        })
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::NotFound(format!(
            "no pNNN population directories under {}",
            root.display()
        )));
    }
    Ok(dirs)
}

fn lod(args: LodArgs) -> Result<ExitCode> {
    let mut runs = args.runs.clone();
    if let Some(root) = &args.runs_root {
        runs.extend(collect_replicate_dirs(root)?);
    }
    if runs.is_empty() {
        return Err(Error::InvalidArgument(
            "pass --run directories and/or --runs-root".into(),
        ));
    }
    if runs.len() == 1 {
        let lod = load_lod(&runs[0], args.agent)?;
        let mut out = String::from("generation,fitness,connections\n");
        for entry in lod {
            out.push_str(&format!(
                "{},{},{}\n",
                entry.generation, entry.fitness, entry.connections
            ));
        }
        write_output(args.out.as_ref(), &out)?;
    } else {
        let lods = runs
            .iter()
            .map(|run| load_lod(run, args.agent))
            .collect::<Result<Vec<_>>>()?;
        let label = args
            .condition
            .or_else(|| condition_label_of(&runs[0]))
            .unwrap_or_else(|| "unknown".to_string());
        let csv = analysis::trajectory_csv(&label, &lods)?;
        write_output(args.out.as_ref(), &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn probe(args: ProbeArgs) -> Result<ExitCode> {
    let paths = RunPaths::new(&args.run);
    let config: mbsim::evolution::PopulationConfig =
        serde_json::from_str(&fs::read_to_string(paths.config())?)
            .map_err(|e| Error::Parse(format!("config.json: {e}")))?;
    let generation = args
        .generation
        .unwrap_or_else(|| config.generations.saturating_sub(30));
    let genomes = mbsim::evolution::read_snapshot(&paths.snapshot(generation))?;
    let outcome = analysis::probe_generation(
        &genomes,
        &config.condition,
        config.run_seed,
        generation,
        true,
        args.threads,
    );

    let probe_dir = paths.probe_dir(generation);
    fs::create_dir_all(&probe_dir)?;
    let mut records = String::new();
    for (agent, record) in &outcome.records {
        records.push_str(&record.to_json_line(*agent));
        records.push('\n');
    }
    fs::write(probe_dir.join("records.jsonl"), records)?;

    #[derive(serde::Serialize)]
    struct Summary<'a> {
        generation: u32,
        pooled_accuracy: f64,
        decided_rate: f64,
        mean_decision_step: Option<f64>,
        per_agent_accuracy: &'a [f64],
    }
    let summary = Summary {
        generation,
        pooled_accuracy: outcome.pooled_accuracy,
        decided_rate: outcome.decided_rate,
        mean_decision_step: outcome.mean_decision_step,
        per_agent_accuracy: &outcome.per_agent_accuracy,
    };
    fs::write(
        probe_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary serialization") + "\n",
    )?;

    harness::record_artifacts(
        &args.run,
        &[
            probe_dir.join("records.jsonl"),
            probe_dir.join("summary.json"),
        ],
    )?;

    println!(
        "probe generation {generation}: pooled accuracy {:.4}, decided {:.4}, mean step {}",
        outcome.pooled_accuracy,
        outcome.decided_rate,
        outcome
            .mean_decision_step
            .map(|s| format!("{s:.2}"))
            .unwrap_or_else(|| "-".into())
    );
    println!("wrote {}", probe_dir.display());
    Ok(ExitCode::SUCCESS)
}

fn read_probe_records(probe_dir: &Path) -> Result<Vec<(u32, TrialRecord)>> {
    let path = probe_dir.join("records.jsonl");
    if !path.exists() {
        return Err(Error::NotFound(format!("no records at {}", path.display())));
    }
    let reader = BufReader::new(fs::File::open(&path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(TrialRecord::from_json_line(&line)?);
        }
    }
    Ok(records)
}

fn correlate(args: CorrelateArgs) -> Result<ExitCode> {
    // Pool trials across the given probes; agent ids are namespaced per
    // probe so per-agent aggregation never merges distinct agents.
    let mut tagged = Vec::new();
    for (i, probe) in args.probes.iter().enumerate() {
        for (agent, record) in read_probe_records(probe)? {
            tagged.push((i as u32 * 10_000 + agent, record));
        }
    }
    let label = args
        .condition
        .or_else(|| args.probes[0].parent().and_then(condition_label_of))
        .unwrap_or_else(|| "unknown".to_string());

    let profile = if args.per_agent {
        per_agent_profile(&tagged, args.max_offset, args.n_min)?
    } else {
        let decided: Vec<TrialRecord> = tagged
            .iter()
            .filter(|(_, r)| r.decision_step.is_some())
            .map(|(_, r)| r.clone())
            .collect();
        if decided.is_empty() {
            return Err(Error::InvalidArgument(
                "probe holds no decided trials".into(),
            ));
        }
        analysis::trajectory_correlation(&decided, args.max_offset, args.n_min)?
    };
    write_output(args.out.as_ref(), &profile.to_csv(&label))?;
    Ok(ExitCode::SUCCESS)
}

/// Mean of per-agent correlation profiles; `n` counts contributing
/// agents per offset.
fn per_agent_profile(
    tagged: &[(u32, TrialRecord)],
    max_offset: u32,
    n_min: u32,
) -> Result<analysis::CorrelationProfile> {
    let mut by_agent: std::collections::BTreeMap<u32, Vec<TrialRecord>> = Default::default();
    for (agent, record) in tagged {
        if record.decision_step.is_some() {
            by_agent.entry(*agent).or_default().push(record.clone());
        }
    }
    if by_agent.is_empty() {
        return Err(Error::InvalidArgument(
            "probe holds no decided trials".into(),
        ));
    }
    let offsets: Vec<u32> = (0..=max_offset).collect();
    let mut sums = vec![0.0f64; offsets.len()];
    let mut counts = vec![0u32; offsets.len()];
    for records in by_agent.values() {
        if (records.len() as u32) < n_min {
            continue;
        }
        let profile = analysis::trajectory_correlation(records, max_offset, n_min)?;
        for (i, r) in profile.r.iter().enumerate() {
            if let Some(r) = r {
                sums[i] += r;
                counts[i] += 1;
            }
        }
    }
    Ok(analysis::CorrelationProfile {
        offsets,
        r: sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| (c > 0).then(|| s / c as f64))
            .collect(),
        n: counts,
    })
}

fn validate(args: ValidateArgs) -> Result<ExitCode> {
    let work_dir = args
        .work_dir
        .unwrap_or_else(|| std::env::temp_dir().join("mbsim-validate"));
    fs::create_dir_all(&work_dir)?;
    let results = mbsim::validate::run_all(&work_dir);
    let mut all_passed = true;
    for result in &results {
        println!(
            "{} {} - {}",
            if result.passed { "PASS" } else { "FAIL" },
            result.name,
            result.detail
        );
        all_passed &= result.passed;
    }
    if let Some(dir) = &args.manifest_dir {
        if !harness::manifest_path(dir).exists() {
            return Err(Error::NotFound(format!(
                "no manifest at {}",
                harness::manifest_path(dir).display()
            )));
        }
        let (missing, orphans) = harness::verify_manifest_files(dir)?;
        let passed = missing.is_empty() && orphans.is_empty();
        println!(
            "{} manifest audit of {} - {} missing, {} orphaned{}",
            if passed { "PASS" } else { "FAIL" },
            dir.display(),
            missing.len(),
            orphans.len(),
            if passed {
                String::new()
            } else {
                format!(" (missing {missing:?}, orphans {orphans:?})")
            }
        );
        all_passed &= passed;
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
