//! Built-in oracle and consistency suite behind `mbsim validate`.
//!
//! Fast self-checks of the statistical and decoding contracts: stimulus
//! symbol frequencies, mutation event rates against their configured
//! probabilities, the golden decoder corpus, roulette proportions, seed
//! brain calibration, and run determinism (rerun, thread count, resume).

use crate::brain::{connection_count, decode};
use crate::environment::{sample_input, Condition, Source};
use crate::evolution::{run_population, PopulationConfig, RunOptions};
use crate::genome::{mutate_with_stats, random_seed_genome, Genome, MutationRates};
use crate::rng::{Purpose, Stream};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Chi-square critical value, df = 1, significance 0.001.
const CHI2_CRIT_1DF_P001: f64 = 10.828;

/// Run every check. `work_dir` hosts the determinism smoke runs.
pub fn run_all(work_dir: &Path) -> Vec<CheckResult> {
    vec![
        stimulus_distribution(),
        mutation_rate_chi_square(),
        golden_decode(),
        roulette_proportions(),
        seed_brain_calibration(),
        run_determinism(work_dir),
    ]
}

/// Empirical symbol frequencies against the product distribution at the
/// easiest and hardest difficulty, 1e6 draws each, +-0.003.
pub fn stimulus_distribution() -> CheckResult {
    let start = Instant::now();
    let n = 1_000_000u32;
    let mut detail = String::new();
    let mut passed = true;
    for (freq, expect) in [
        (0.9f64, [0.09, 0.81, 0.01, 0.09]),
        (0.6f64, [0.24, 0.36, 0.16, 0.24]),
    ] {
        for source in [Source::Signal, Source::Noise] {
            let mut counts = [0u32; 4];
            let mut rng = Stream::keyed(20_24, Purpose::Trial, [freq.to_bits(), 0, 0]);
            for _ in 0..n {
                counts[sample_input(source, freq, &mut rng).code() as usize] += 1;
            }
            // Noise mirrors the channels: swap the 01 and 10 cells.
            let expect = match source {
                Source::Signal => expect,
                Source::Noise => [expect[0], expect[2], expect[1], expect[3]],
            };
            for (code, &p) in expect.iter().enumerate() {
                let obs = counts[code] as f64 / n as f64;
                if (obs - p).abs() >= 0.003 {
                    passed = false;
                    let _ = write!(detail, " {source:?}/{freq}/{code}: {obs:.4} vs {p}");
                }
            }
        }
    }
    let _ = write!(detail, " ({} ms)", start.elapsed().as_millis());
    CheckResult {
        name: "stimulus symbol frequencies (1e6 draws, +-0.003)",
        passed,
        detail: detail.trim().to_string(),
    }
}

/// Observed point/duplication/deletion event counts over 1e4
/// replications, chi-square against the configured rates at 0.001.
pub fn mutation_rate_chi_square() -> CheckResult {
    let start = Instant::now();
    let rates = MutationRates::default();
    let length = 4096usize;
    let reps = 10_000u64;
    let parent = random_seed_genome(
        length,
        &mut Stream::keyed(77, Purpose::SeedGenome, [0, 0, 0]),
    )
    .expect("seed genome");
    let (mut point, mut dup, mut del) = (0u64, 0u64, 0u64);
    for i in 0..reps {
        let mut rng = Stream::keyed(77, Purpose::Mutate, [1, i, 0]);
        let (_, stats) = mutate_with_stats(&parent, &rates, &mut rng);
        point += stats.point_events;
        dup += stats.duplication_events;
        del += stats.deletion_events;
    }
    // Two-cell chi-square for a pooled Bernoulli process:
    // (T - E)^2 / (E (1 - p)).
    let chi2 = |observed: u64, trials: u64, p: f64| -> f64 {
        let e = trials as f64 * p;
        let d = observed as f64 - e;
        d * d / (e * (1.0 - p))
    };
    let tests = [
        ("point", chi2(point, reps * length as u64, rates.point)),
        ("duplication", chi2(dup, reps, rates.duplication)),
        ("deletion", chi2(del, reps, rates.deletion)),
    ];
    let mut detail = format!("point {point} dup {dup} del {del};");
    let mut passed = true;
    for (name, x2) in tests {
        let _ = write!(detail, " chi2[{name}] {x2:.3}");
        if x2 >= CHI2_CRIT_1DF_P001 {
            passed = false;
        }
    }
    let _ = write!(
        detail,
        " crit {CHI2_CRIT_1DF_P001} ({} ms)",
        start.elapsed().as_millis()
    );
    CheckResult {
        name: "mutation event rates chi-square (1e4 replications, p=0.001)",
        passed,
        detail,
    }
}

const GOLDEN_GENOMES: &str = include_str!("golden/decode_genomes.txt");
const GOLDEN_EXPECTED: &str = include_str!("golden/decode_expected.txt");

/// Split the expected dump into per-genome blocks.
pub fn golden_expected_blocks() -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<String> = None;
    for line in GOLDEN_EXPECTED.lines() {
        if line.starts_with("# genome") {
            if let Some(block) = current.take() {
                blocks.push(block);
            }
            current = Some(String::new());
        } else if let Some(block) = current.as_mut() {
            block.push_str(line);
            block.push('\n');
        }
    }
    if let Some(block) = current {
        blocks.push(block);
    }
    blocks
}

pub fn golden_genomes() -> Vec<Genome> {
    GOLDEN_GENOMES
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Genome::from_line(l).expect("golden genome"))
        .collect()
}

/// Decode the golden corpus and compare gate-for-gate.
pub fn golden_decode() -> CheckResult {
    let genomes = golden_genomes();
    let expected = golden_expected_blocks();
    let mut passed = genomes.len() == expected.len();
    let mut detail = format!("{} genomes", genomes.len());
    if passed {
        for (i, (genome, expect)) in genomes.iter().zip(&expected).enumerate() {
            let got = decode(genome).to_dump();
            if &got != expect {
                passed = false;
                let _ = write!(detail, "; genome {} differs", i + 1);
            }
        }
    } else {
        let _ = write!(detail, " vs {} expected blocks", expected.len());
    }
    CheckResult {
        name: "golden decode corpus (gate-for-gate)",
        passed,
        detail,
    }
}

/// Roulette selection proportions for fitnesses 2:1:1 over 1e5 draws.
pub fn roulette_proportions() -> CheckResult {
    let mut rng = Stream::keyed(5, Purpose::Select, [0, 0, 0]);
    let draws = 100_000usize;
    let picks = crate::evolution::select_parents(&[2, 1, 1], draws, &mut rng);
    let mut counts = [0usize; 3];
    for p in picks {
        counts[p as usize] += 1;
    }
    let expect = [0.5, 0.25, 0.25];
    let mut passed = true;
    let mut detail = String::new();
    for (i, &e) in expect.iter().enumerate() {
        let obs = counts[i] as f64 / draws as f64;
        let _ = write!(detail, " {obs:.4}");
        if (obs - e).abs() >= 0.01 {
            passed = false;
        }
    }
    CheckResult {
        name: "roulette proportions [2,1,1] -> [.5,.25,.25] +-0.01",
        passed,
        detail: format!("observed{detail}"),
    }
}

/// Mean connection count over 100 fresh seed brains at the default seed
/// genome length.
pub fn seed_brain_calibration() -> CheckResult {
    let mut sum = 0usize;
    let count = 100u64;
    for i in 0..count {
        let mut rng = Stream::keyed(1000 + i, Purpose::SeedGenome, [0, 0, 0]);
        let genome = random_seed_genome(crate::evolution::DEFAULT_SEED_GENOME_LENGTH, &mut rng)
            .expect("seed genome");
        sum += connection_count(&decode(&genome));
    }
    let mean = sum as f64 / count as f64;
    CheckResult {
        name: "seed brain calibration (mean connections in [18, 32])",
        passed: (18.0..=32.0).contains(&mean),
        detail: format!(
            "mean {mean:.2} at length {}",
            crate::evolution::DEFAULT_SEED_GENOME_LENGTH
        ),
    }
}

/// A short population run reproduces byte-identically when rerun, run at
/// a different thread count, and interrupted + resumed.
pub fn run_determinism(work_dir: &Path) -> CheckResult {
    let start = Instant::now();
    let mut condition = Condition::new(0.9, 5);
    condition.max_steps = 30;
    condition.trials_per_agent = 20;
    let mut config = PopulationConfig::new(condition, 99);
    config.population_size = 16;
    config.generations = 12;
    config.seed_genome_length = 2000;
    config.snapshot_interval = 5;

    let run =
        |tag: &str, options: &RunOptions, resume: bool| -> crate::Result<(Vec<u8>, Vec<u8>)> {
            let dir = work_dir.join(format!("determinism-{tag}"));
            std::fs::remove_dir_all(&dir).ok();
            run_population(&config, &dir, "p000", options)?;
            if resume {
                run_population(&config, &dir, "p000", &RunOptions::default())?;
            }
            let stats = std::fs::read(dir.join("stats.csv"))?;
            let ancestry = std::fs::read(dir.join("ancestry.csv"))?;
            std::fs::remove_dir_all(&dir).ok();
            Ok((stats, ancestry))
        };

    let baseline = run("a", &RunOptions::default(), false);
    let rerun = run("b", &RunOptions::default(), false);
    let threaded = run(
        "c",
        &RunOptions {
            threads: 2,
            stop_after: None,
        },
        false,
    );
    let resumed = run(
        "d",
        &RunOptions {
            threads: 1,
            stop_after: Some(7),
        },
        true,
    );

    let (passed, detail) = match (&baseline, &rerun, &threaded, &resumed) {
        (Ok(a), Ok(b), Ok(c), Ok(d)) => {
            let same = a == b && a == c && a == d;
            (
                same,
                format!(
                    "rerun {} threads {} resume {} ({} ms)",
                    a == b,
                    a == c,
                    a == d,
                    start.elapsed().as_millis()
                ),
            )
        }
        _ => (false, "run failed".to_string()),
    };
    CheckResult {
        name: "run determinism (rerun, thread count, interrupt+resume)",
        passed,
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_fixture_counts_line_up() {
        assert_eq!(golden_genomes().len(), 20);
        assert_eq!(golden_expected_blocks().len(), 20);
    }

    #[test]
    fn golden_decode_check_passes() {
        let result = golden_decode();
        assert!(result.passed, "{}", result.detail);
    }

    #[test]
    fn seed_calibration_check_passes() {
        let result = seed_brain_calibration();
        assert!(result.passed, "{}", result.detail);
    }
}
