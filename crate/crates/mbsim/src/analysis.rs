//! Post-processing: line-of-descent trajectories, behavioral probes, and
//! input-to-decision correlation profiles.
//!
//! The correlation coding follows the signal/noise convention: `[01]`
//! inputs and signal answers code +1, `[10]` inputs and noise answers
//! code -1, neutral symbols 0. Trajectories are time-locked on the
//! decision: offset 0 is the last input before the answer, higher
//! offsets walk backwards.

use crate::brain::{decode, Answer, CompiledBrain};
use crate::environment::{evaluate_agent, Condition, TrialRecord};
use crate::genome::Genome;
use crate::rng::{Purpose, Stream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One ancestor on a line of descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LodEntry {
    pub generation: u32,
    pub fitness: u32,
    pub connections: u32,
}

/// Which LOD field to aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LodField {
    Fitness,
    Connections,
}

/// Per-generation mean and spread across replicate LODs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub generation: u32,
    pub mean: f64,
    /// Population standard deviation across replicates (0 for a single
    /// replicate).
    pub sd: f64,
}

/// Average a field across replicate LODs, generation by generation.
/// All LODs must have the same length.
pub fn average_lod_trajectories(
    lods: &[Vec<LodEntry>],
    field: LodField,
) -> Result<Vec<TrajectoryPoint>> {
    let first = lods
        .first()
        .ok_or_else(|| Error::InvalidArgument("no LODs to average".into()))?;
    if lods.iter().any(|lod| lod.len() != first.len()) {
        return Err(Error::InvalidArgument(
            "LOD length mismatch across replicates".into(),
        ));
    }
    let n = lods.len() as f64;
    Ok((0..first.len())
        .map(|g| {
            // Sorted summation keeps the result exactly invariant under
            // replicate reordering.
            let mut values: Vec<f64> = lods
                .iter()
                .map(|lod| {
                    let entry = &lod[g];
                    match field {
                        LodField::Fitness => entry.fitness as f64,
                        LodField::Connections => entry.connections as f64,
                    }
                })
                .collect();
            values.sort_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            TrajectoryPoint {
                generation: first[g].generation,
                mean,
                sd: var.sqrt(),
            }
        })
        .collect())
}

/// Header of the trajectory CSV emitted by [`trajectory_csv`].
pub const TRAJECTORY_CSV_HEADER: &str =
    "condition,generation,mean_connections,sd_connections,mean_fitness";

/// Replicate-averaged LOD trajectory as CSV.
pub fn trajectory_csv(condition_label: &str, lods: &[Vec<LodEntry>]) -> Result<String> {
    let connections = average_lod_trajectories(lods, LodField::Connections)?;
    let fitness = average_lod_trajectories(lods, LodField::Fitness)?;
    let mut out = String::from(TRAJECTORY_CSV_HEADER);
    out.push('\n');
    for (c, f) in connections.iter().zip(&fitness) {
        out.push_str(&format!(
            "{condition_label},{},{:.4},{:.4},{:.4}\n",
            c.generation, c.mean, c.sd, f.mean
        ));
    }
    Ok(out)
}

/// Code one decided trial: inputs truncated at the decision step and
/// reversed (offset 0 = final pre-decision input), `[01]` -> +1,
/// `[10]` -> -1, neutral -> 0; answer signal -> +1, noise -> -1.
pub fn code_trial(record: &TrialRecord) -> Result<(Vec<i8>, i8)> {
    let step = record
        .decision_step
        .ok_or_else(|| Error::InvalidArgument("trial has no decision".into()))?;
    let answer = match record.decision {
        Answer::Signal => 1i8,
        Answer::Noise => -1i8,
        Answer::None => {
            return Err(Error::InvalidArgument("trial has no decision".into()));
        }
    };
    let upto = step as usize + 1;
    if record.inputs.len() < upto {
        return Err(Error::InvalidArgument(format!(
            "trial log holds {} inputs but decided at step {step}",
            record.inputs.len()
        )));
    }
    let coded = record.inputs[..upto]
        .iter()
        .rev()
        .map(|sym| match (sym.left, sym.right) {
            (0, 1) => 1i8,
            (1, 0) => -1i8,
            _ => 0i8,
        })
        .collect();
    Ok((coded, answer))
}

/// Per-offset correlation between coded inputs and coded answers.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    pub offsets: Vec<u32>,
    /// Pearson r per offset; `None` where the sample is too small or a
    /// variable is constant.
    pub r: Vec<Option<f64>>,
    pub n: Vec<u32>,
}

/// Header of the CSV emitted by [`CorrelationProfile::to_csv`].
pub const CORRELATION_CSV_HEADER: &str = "condition,offset,r,n";

impl CorrelationProfile {
    pub fn to_csv(&self, condition_label: &str) -> String {
        let mut out = String::from(CORRELATION_CSV_HEADER);
        out.push('\n');
        for i in 0..self.offsets.len() {
            let r = self.r[i].map(|r| format!("{r:.6}")).unwrap_or_default();
            out.push_str(&format!(
                "{condition_label},{},{r},{}\n",
                self.offsets[i], self.n[i]
            ));
        }
        out
    }
}

/// Correlate coded inputs with coded answers across trials, per offset.
/// Every record must be decided; offsets with fewer than `n_min` samples
/// or a constant variable report `None`.
pub fn trajectory_correlation(
    records: &[TrialRecord],
    max_offset: u32,
    n_min: u32,
) -> Result<CorrelationProfile> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to correlate".into()));
    }
    if n_min < 3 {
        return Err(Error::InvalidArgument("n_min must be >= 3".into()));
    }
    let coded: Vec<(Vec<i8>, i8)> = records.iter().map(code_trial).collect::<Result<_>>()?;

    let mut offsets = Vec::with_capacity(max_offset as usize + 1);
    let mut rs = Vec::with_capacity(max_offset as usize + 1);
    let mut ns = Vec::with_capacity(max_offset as usize + 1);
    for offset in 0..=max_offset {
        let pairs = coded
            .iter()
            .filter(|(inputs, _)| inputs.len() > offset as usize)
            .map(|(inputs, answer)| (inputs[offset as usize] as f64, *answer as f64));
        let n = pairs.clone().count();
        offsets.push(offset);
        ns.push(n as u32);
        rs.push(if (n as u32) < n_min {
            None
        } else {
            pearson(pairs)
        });
    }
    Ok(CorrelationProfile {
        offsets,
        r: rs,
        n: ns,
    })
}

/// Pearson correlation; `None` when either variable has zero variance.
fn pearson(pairs: impl Iterator<Item = (f64, f64)> + Clone) -> Option<f64> {
    let n = pairs.clone().count() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (x, y) in pairs.clone() {
        sx += x;
        sy += y;
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Keep only trials that produced a decision.
pub fn decided_records(records: &[TrialRecord]) -> Vec<TrialRecord> {
    records
        .iter()
        .filter(|r| r.decision_step.is_some())
        .cloned()
        .collect()
}

/// Behavioral probe of one snapshot generation.
#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    pub generation: u32,
    /// Fraction of all trials answered correctly, per agent.
    pub per_agent_accuracy: Vec<f64>,
    /// Correct decisions over all trials of all agents.
    pub pooled_accuracy: f64,
    /// Fraction of trials that produced any decision.
    pub decided_rate: f64,
    /// Mean decision step over decided trials, if any.
    pub mean_decision_step: Option<f64>,
    /// Agent-tagged trial logs; empty when retention was off.
    pub records: Vec<(u32, TrialRecord)>,
}

/// Re-evaluate snapshot agents with their probe streams.
///
/// Retention changes only what is kept, never the draws, so accuracies
/// are identical with records on or off.
pub fn probe_generation(
    genomes: &[Genome],
    condition: &Condition,
    run_seed: u64,
    generation: u32,
    retain_records: bool,
    threads: usize,
) -> ProbeOutcome {
    let probe_one = |(agent, genome): (usize, &Genome)| {
        let compiled = CompiledBrain::from_brain(&decode(genome));
        evaluate_agent(
            &compiled,
            condition,
            |trial| {
                Stream::keyed(
                    run_seed,
                    Purpose::Probe,
                    [generation as u64, agent as u64, trial as u64],
                )
            },
            retain_records,
        )
    };
    let evals: Vec<crate::environment::AgentEval> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            genomes.par_iter().enumerate().map(probe_one).collect()
        })
    } else {
        genomes.iter().enumerate().map(probe_one).collect()
    };

    let trials = condition.trials_per_agent as u64 * genomes.len() as u64;
    let correct: u64 = evals.iter().map(|e| e.fitness as u64).sum();
    let decided: u64 = evals.iter().map(|e| e.decided as u64).sum();
    let step_sum: u64 = evals.iter().map(|e| e.decision_step_sum).sum();
    let mut records = Vec::new();
    for (agent, eval) in evals.iter().enumerate() {
        if let Some(rs) = &eval.records {
            records.extend(rs.iter().cloned().map(|r| (agent as u32, r)));
        }
    }
    ProbeOutcome {
        generation,
        per_agent_accuracy: evals
            .iter()
            .map(|e| e.fitness as f64 / condition.trials_per_agent as f64)
            .collect(),
        pooled_accuracy: correct as f64 / trials as f64,
        decided_rate: decided as f64 / trials as f64,
        mean_decision_step: (decided > 0).then(|| step_sum as f64 / decided as f64),
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{Source, Symbol};

    fn entry(generation: u32, fitness: u32, connections: u32) -> LodEntry {
        LodEntry {
            generation,
            fitness,
            connections,
        }
    }

    fn constant_lod(connections: u32, len: u32) -> Vec<LodEntry> {
        (0..len).map(|g| entry(g, 10, connections)).collect()
    }

    fn symbol(left: u8, right: u8) -> Symbol {
        Symbol { left, right }
    }

    fn decided_record(inputs: Vec<Symbol>, decision: Answer) -> TrialRecord {
        let step = inputs.len() as u32 - 1;
        TrialRecord {
            source: Source::Signal,
            inputs,
            decision_step: Some(step),
            decision,
            correct: decision == Answer::Signal,
            score: (decision == Answer::Signal) as u8,
        }
    }

    #[test]
    fn single_lod_average_is_identity_with_zero_spread() {
        let lod = vec![entry(0, 5, 30), entry(1, 7, 28)];
        let points =
            average_lod_trajectories(std::slice::from_ref(&lod), LodField::Connections).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].mean, 30.0);
        assert_eq!(points[1].mean, 28.0);
        assert!(points.iter().all(|p| p.sd == 0.0));
    }

    #[test]
    fn two_constant_lods_average_between() {
        let points = average_lod_trajectories(
            &[constant_lod(10, 5), constant_lod(20, 5)],
            LodField::Connections,
        )
        .unwrap();
        assert!(points.iter().all(|p| p.mean == 15.0 && p.sd == 5.0));
    }

    #[test]
    fn average_rejects_length_mismatch_and_commutes_with_reordering() {
        assert!(matches!(
            average_lod_trajectories(
                &[constant_lod(10, 5), constant_lod(20, 6)],
                LodField::Fitness
            ),
            Err(Error::InvalidArgument(_))
        ));
        let a = [
            constant_lod(10, 5),
            constant_lod(20, 5),
            constant_lod(13, 5),
        ];
        let b = [
            constant_lod(13, 5),
            constant_lod(10, 5),
            constant_lod(20, 5),
        ];
        assert_eq!(
            average_lod_trajectories(&a, LodField::Connections).unwrap(),
            average_lod_trajectories(&b, LodField::Connections).unwrap()
        );
    }

    #[test]
    fn code_trial_worked_sequence() {
        let record = decided_record(
            vec![
                symbol(0, 0),
                symbol(1, 1),
                symbol(0, 1),
                symbol(0, 1),
                symbol(1, 1),
            ],
            Answer::Signal,
        );
        let (coded, answer) = code_trial(&record).unwrap();
        assert_eq!(coded, vec![0, 1, 1, 0, 0]);
        assert_eq!(answer, 1);
    }

    #[test]
    fn code_trial_noise_answer_codes_negative() {
        let record = decided_record(vec![symbol(1, 0)], Answer::Noise);
        let (coded, answer) = code_trial(&record).unwrap();
        assert_eq!(coded, vec![-1]);
        assert_eq!(answer, -1);
    }

    #[test]
    fn code_trial_neutral_symbols_code_zero() {
        let record = decided_record(
            vec![symbol(1, 1), symbol(1, 1), symbol(1, 1)],
            Answer::Signal,
        );
        let (coded, _) = code_trial(&record).unwrap();
        assert_eq!(coded, vec![0, 0, 0]);
    }

    #[test]
    fn code_trial_requires_decision() {
        let record = TrialRecord {
            source: Source::Signal,
            inputs: vec![symbol(0, 1)],
            decision_step: None,
            decision: Answer::None,
            correct: false,
            score: 0,
        };
        assert!(matches!(
            code_trial(&record),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn code_trial_truncates_at_decision_step() {
        let mut record = decided_record(
            vec![symbol(0, 1), symbol(1, 0), symbol(0, 1)],
            Answer::Signal,
        );
        record.decision_step = Some(1);
        let (coded, _) = code_trial(&record).unwrap();
        assert_eq!(coded, vec![-1, 1]);
    }

    /// Scripted policy: answers the sign of its final input, which is
    /// always informative.
    fn copier_records(n: usize, seed: u64) -> Vec<TrialRecord> {
        let mut rng = Stream::keyed(seed, Purpose::Probe, [0, 0, 0]);
        (0..n)
            .map(|_| {
                let len = 2 + rng.below(6) as usize;
                let mut inputs: Vec<Symbol> = (0..len - 1)
                    .map(|_| match rng.below(4) {
                        0 => symbol(0, 0),
                        1 => symbol(0, 1),
                        2 => symbol(1, 0),
                        _ => symbol(1, 1),
                    })
                    .collect();
                let (last, answer) = if rng.below(2) == 0 {
                    (symbol(0, 1), Answer::Signal)
                } else {
                    (symbol(1, 0), Answer::Noise)
                };
                inputs.push(last);
                decided_record(inputs, answer)
            })
            .collect()
    }

    #[test]
    fn copier_policy_correlates_perfectly_at_offset_zero() {
        let records = copier_records(400, 5);
        let profile = trajectory_correlation(&records, 5, 10).unwrap();
        let r0 = profile.r[0].unwrap();
        assert!(r0 > 0.99, "offset-0 r {r0}");
        assert_eq!(profile.n[0], 400);
    }

    #[test]
    fn coin_policy_shows_no_correlation() {
        // Null bound: 3 sigma ~ 0.03 at n = 1e4; assert < 0.05.
        let mut rng = Stream::keyed(6, Purpose::Probe, [0, 0, 0]);
        let records: Vec<TrialRecord> = (0..10_000)
            .map(|_| {
                let len = 3 + rng.below(8) as usize;
                let inputs: Vec<Symbol> = (0..len)
                    .map(|_| match rng.below(4) {
                        0 => symbol(0, 0),
                        1 => symbol(0, 1),
                        2 => symbol(1, 0),
                        _ => symbol(1, 1),
                    })
                    .collect();
                let answer = if rng.below(2) == 0 {
                    Answer::Signal
                } else {
                    Answer::Noise
                };
                decided_record(inputs, answer)
            })
            .collect();
        let profile = trajectory_correlation(&records, 2, 10).unwrap();
        for (offset, r) in profile.r.iter().enumerate() {
            let r = r.unwrap();
            assert!(r.abs() < 0.05, "offset {offset}: r {r}");
        }
    }

    #[test]
    fn constant_input_column_is_undefined_not_zero() {
        // Answers vary, but offset 0 always sees [11] (coded 0): that
        // offset must be None while offset 1 is defined.
        let records: Vec<TrialRecord> = (0..40)
            .map(|i| {
                let informative = if i % 2 == 0 {
                    symbol(0, 1)
                } else {
                    symbol(1, 0)
                };
                decided_record(
                    vec![informative, symbol(1, 1)],
                    if i % 2 == 0 {
                        Answer::Signal
                    } else {
                        Answer::Noise
                    },
                )
            })
            .collect();
        let profile = trajectory_correlation(&records, 1, 5).unwrap();
        assert!(profile.r[0].is_none());
        assert!(profile.r[1].is_some());
    }

    #[test]
    fn constant_answers_yield_undefined_everywhere() {
        let records: Vec<TrialRecord> = (0..50)
            .map(|i| {
                decided_record(
                    vec![symbol(0, 1), symbol((i % 2) as u8, 1 - (i % 2) as u8)],
                    Answer::Signal,
                )
            })
            .collect();
        let profile = trajectory_correlation(&records, 3, 5).unwrap();
        assert!(profile.r.iter().all(Option::is_none));
    }

    #[test]
    fn correlation_is_invariant_under_joint_mirroring() {
        let records = copier_records(300, 9);
        let mirrored: Vec<TrialRecord> = records
            .iter()
            .map(|r| {
                let mut m = r.clone();
                m.inputs = r
                    .inputs
                    .iter()
                    .map(|s| Symbol {
                        left: s.right,
                        right: s.left,
                    })
                    .collect();
                m.decision = match r.decision {
                    Answer::Signal => Answer::Noise,
                    Answer::Noise => Answer::Signal,
                    Answer::None => Answer::None,
                };
                m
            })
            .collect();
        let a = trajectory_correlation(&records, 6, 5).unwrap();
        let b = trajectory_correlation(&mirrored, 6, 5).unwrap();
        assert_eq!(a.n, b.n);
        for (x, y) in a.r.iter().zip(&b.r) {
            match (x, y) {
                (Some(x), Some(y)) => assert!((x - y).abs() < 1e-12),
                (None, None) => {}
                other => panic!("defined-ness differs: {other:?}"),
            }
        }
    }

    #[test]
    fn correlation_rejects_empty_and_small_n_min() {
        assert!(trajectory_correlation(&[], 5, 10).is_err());
        let records = copier_records(10, 1);
        assert!(trajectory_correlation(&records, 5, 2).is_err());
    }

    #[test]
    fn probe_of_never_answering_population_scores_zero() {
        // Genomes with no start codon decode to empty brains.
        let genome = Genome::new(vec![1; 2000]).unwrap();
        let condition = Condition::new(0.9, 10);
        let outcome = probe_generation(&[genome.clone(), genome], &condition, 1, 0, true, 1);
        assert_eq!(outcome.pooled_accuracy, 0.0);
        assert_eq!(outcome.decided_rate, 0.0);
        assert!(outcome
            .records
            .iter()
            .all(|(_, r)| r.decision_step.is_none()));
        assert_eq!(outcome.records.len(), 200);
    }

    #[test]
    fn probe_accuracy_is_retention_invariant() {
        let mut rng = Stream::keyed(31, Purpose::SeedGenome, [0; 3]);
        let genomes: Vec<Genome> = (0..5)
            .map(|_| crate::genome::random_seed_genome(3000, &mut rng).unwrap())
            .collect();
        let condition = Condition::new(0.8, 10);
        let with = probe_generation(&genomes, &condition, 7, 40, true, 1);
        let without = probe_generation(&genomes, &condition, 7, 40, false, 1);
        assert_eq!(with.pooled_accuracy, without.pooled_accuracy);
        assert_eq!(with.per_agent_accuracy, without.per_agent_accuracy);
        assert!(without.records.is_empty());
    }
}
