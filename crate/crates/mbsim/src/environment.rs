//! The decision task: ramped two-channel stimuli, single trials, and
//! fitness blocks.
//!
//! Each trial streams up to `max_steps` two-bit symbols drawn from a
//! source (signal or noise). Per-channel bit frequency starts at the
//! uninformative 50% and ramps 1% per step toward the condition's target.
//! The agent answers by showing `[01]` (signal) or `[10]` (noise) on its
//! output nodes at or after the non-decision time; the first eligible
//! answer ends the trial.

use crate::brain::{Answer, CompiledBrain};
use crate::rng::Stream;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Stimulus source for one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Signal,
    Noise,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Signal => "S",
            Source::Noise => "N",
        }
    }
}

/// One two-bit input symbol; `left`/`right` are the channel bits, shown
/// as `[left right]` e.g. `[01]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symbol {
    pub left: u8,
    pub right: u8,
}

impl Symbol {
    pub fn code(self) -> u8 {
        self.left * 2 + self.right
    }

    pub fn as_str(self) -> &'static str {
        match (self.left, self.right) {
            (0, 0) => "00",
            (0, 1) => "01",
            (1, 0) => "10",
            _ => "11",
        }
    }
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    /// Per-channel target bit frequency; the task's difficulty knob.
    pub target_freq: f64,
    /// Steps before answers become eligible.
    pub nondecision_time: u32,
    /// Inputs per trial before the trial is scored as unanswered.
    pub max_steps: u32,
    /// Trials per fitness block.
    pub trials_per_agent: u32,
}

impl Condition {
    pub fn new(target_freq: f64, nondecision_time: u32) -> Self {
        Condition {
            target_freq,
            nondecision_time,
            max_steps: 100,
            trials_per_agent: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_freq > 0.5 && self.target_freq <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "target_freq {} outside (0.5, 1.0]",
                self.target_freq
            )));
        }
        if self.nondecision_time >= self.max_steps {
            return Err(Error::InvalidArgument(format!(
                "nondecision_time {} must be below max_steps {}",
                self.nondecision_time, self.max_steps
            )));
        }
        if self.trials_per_agent == 0 {
            return Err(Error::InvalidArgument(
                "trials_per_agent must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Short label used in output files, e.g. `f0.90_t40`.
    pub fn label(&self) -> String {
        format!("f{:.2}_t{}", self.target_freq, self.nondecision_time)
    }
}

/// Per-channel bit frequency at a step: 50% plus 1% per step, capped at
/// the target.
pub fn ramp_frequency(step: u32, target: f64) -> f64 {
    (0.50 + 0.01 * step as f64).min(target)
}

/// Draw one symbol. For signal the left bit is 0 and the right bit 1,
/// each with probability `freq`, independently; noise mirrors the
/// channels.
#[inline]
pub fn sample_input(source: Source, freq: f64, rng: &mut Stream) -> Symbol {
    let threshold = (freq * (1u64 << 32) as f64) as u64;
    let word = rng.next_u64();
    let u = word & 0xFFFF_FFFF;
    let v = word >> 32;
    let (left, right) = match source {
        Source::Signal => ((u >= threshold) as u8, (v < threshold) as u8),
        Source::Noise => ((u < threshold) as u8, (v >= threshold) as u8),
    };
    Symbol { left, right }
}

/// Everything a trial produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub source: Source,
    /// Per-step symbols, through the step the trial ended on. Empty when
    /// the caller ran with record retention off.
    pub inputs: Vec<Symbol>,
    pub decision_step: Option<u32>,
    pub decision: Answer,
    pub correct: bool,
    pub score: u8,
}

impl TrialRecord {
    /// Newline-delimited serialization entry (one JSON object per trial).
    pub fn to_json_line(&self, agent: u32) -> String {
        let line = RecordLine {
            agent,
            source: self.source.label().to_string(),
            inputs: self.inputs.iter().map(|s| s.as_str()).collect(),
            decision_step: self.decision_step,
            decision: match self.decision {
                Answer::Signal => Some("S".to_string()),
                Answer::Noise => Some("N".to_string()),
                Answer::None => None,
            },
            correct: self.correct,
        };
        serde_json::to_string(&line).expect("record serialization")
    }

    /// Parse a line produced by [`TrialRecord::to_json_line`].
    pub fn from_json_line(line: &str) -> Result<(u32, TrialRecord)> {
        let parsed: RecordLine =
            serde_json::from_str(line).map_err(|e| Error::Parse(format!("record line: {e}")))?;
        let inputs = parse_symbol_string(&parsed.inputs)?;
        let decision = match parsed.decision.as_deref() {
            Some("S") => Answer::Signal,
            Some("N") => Answer::Noise,
            None => Answer::None,
            Some(other) => {
                return Err(Error::Parse(format!("unknown decision {other:?}")));
            }
        };
        let source = match parsed.source.as_str() {
            "S" => Source::Signal,
            "N" => Source::Noise,
            other => return Err(Error::Parse(format!("unknown source {other:?}"))),
        };
        let correct = parsed.correct;
        Ok((
            parsed.agent,
            TrialRecord {
                source,
                inputs,
                decision_step: parsed.decision_step,
                decision,
                correct,
                score: correct as u8,
            },
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    agent: u32,
    source: String,
    inputs: String,
    decision_step: Option<u32>,
    decision: Option<String>,
    correct: bool,
}

fn parse_symbol_string(s: &str) -> Result<Vec<Symbol>> {
    if !s.len().is_multiple_of(2) {
        return Err(Error::Parse("odd-length input string".into()));
    }
    s.as_bytes()
        .chunks(2)
        .map(|pair| {
            let bit = |b: u8| match b {
                b'0' => Ok(0u8),
                b'1' => Ok(1u8),
                _ => Err(Error::Parse(format!("invalid input bit {:?}", b as char))),
            };
            Ok(Symbol {
                left: bit(pair[0])?,
                right: bit(pair[1])?,
            })
        })
        .collect()
}

/// Run one trial. The stream drives only the stimulus draws; callers pass
/// a per-trial stream so trials are independent and replayable.
pub fn run_trial(
    brain: &CompiledBrain,
    condition: &Condition,
    source: Source,
    rng: &mut Stream,
    retain_inputs: bool,
) -> TrialRecord {
    let mut state = 0u16;
    let mut inputs = Vec::new();
    let mut decision_step = None;
    let mut decision = Answer::None;

    for step in 0..condition.max_steps {
        let freq = ramp_frequency(step, condition.target_freq);
        let symbol = sample_input(source, freq, rng);
        if retain_inputs {
            inputs.push(symbol);
        }
        state = brain.step_word(state, (symbol.left, symbol.right));
        if step >= condition.nondecision_time {
            let answer = crate::brain::read_answer(crate::brain::NodeState(state));
            if answer != Answer::None {
                decision_step = Some(step);
                decision = answer;
                break;
            }
        }
    }

    let correct = matches!(
        (decision, source),
        (Answer::Signal, Source::Signal) | (Answer::Noise, Source::Noise)
    );
    TrialRecord {
        source,
        inputs,
        decision_step,
        decision,
        correct,
        score: correct as u8,
    }
}

/// Result of one fitness block.
#[derive(Debug, Clone)]
pub struct AgentEval {
    /// Correct decisions over the block; the selection currency.
    pub fitness: u32,
    /// Trials that produced any decision.
    pub decided: u32,
    /// Sum of decision steps over decided trials.
    pub decision_step_sum: u64,
    /// Full logs, when retention was on.
    pub records: Option<Vec<TrialRecord>>,
}

/// Evaluate one agent over a block of trials. The source of each trial is
/// drawn uniformly from its own stream, so evaluation order is
/// irrelevant. `stream_for_trial` supplies the keyed stream for each
/// trial index.
pub fn evaluate_agent(
    brain: &CompiledBrain,
    condition: &Condition,
    mut stream_for_trial: impl FnMut(u32) -> Stream,
    retain_records: bool,
) -> AgentEval {
    let mut eval = AgentEval {
        fitness: 0,
        decided: 0,
        decision_step_sum: 0,
        records: retain_records.then(Vec::new),
    };
    for trial in 0..condition.trials_per_agent {
        let mut rng = stream_for_trial(trial);
        let source = if rng.next_u64() & 1 == 0 {
            Source::Signal
        } else {
            Source::Noise
        };
        let record = run_trial(brain, condition, source, &mut rng, retain_records);
        eval.fitness += record.score as u32;
        if let Some(step) = record.decision_step {
            eval.decided += 1;
            eval.decision_step_sum += step as u64;
        }
        if let Some(records) = eval.records.as_mut() {
            records.push(record);
        }
    }
    eval
}
