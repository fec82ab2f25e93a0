//! Counter-based random streams.
//!
//! Every random decision in a run is drawn from a stream keyed by
//! `(run_seed, purpose, generation, agent, trial)`. Streams are cheap to
//! construct and fully independent of evaluation order, so results are
//! bit-identical at any thread count and across checkpoint/resume.

/// Weyl increment from splitmix64.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const KEY_IV: u64 = 0x6A09_E667_F3BC_C909;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What a stream is used for. Part of the key so the same
/// `(generation, agent, trial)` coordinates never alias across uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    SeedGenome,
    Mutate,
    Trial,
    Select,
    Probe,
    /// Deriving per-population run seeds from an experiment base seed.
    PopulationSeed,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::SeedGenome => 0x5eed_6e0e,
            Purpose::Mutate => 0x333u64 << 32,
            Purpose::Trial => 0x0071_21a1_u64,
            Purpose::Select => 0x005e_1ec7_u64,
            Purpose::Probe => 0x0091_20be_u64,
            Purpose::PopulationSeed => 0xba5e_5eedu64,
        }
    }
}

/// A deterministic random stream (splitmix64 over a keyed origin).
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

impl Stream {
    /// Derive a stream from key components. Order matters.
    pub fn keyed(run_seed: u64, purpose: Purpose, coords: [u64; 3]) -> Self {
        let mut s = KEY_IV;
        for part in [run_seed, purpose.tag(), coords[0], coords[1], coords[2]] {
            s = mix64(s ^ part).wrapping_add(GAMMA);
        }
        Stream { state: s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe to feed to `ln`.
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). n must be nonzero.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Bernoulli draw.
    #[inline]
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Number of Bernoulli(p) failures before the next success, for a
    /// process with precomputed `ln1mp = ln(1 - p)`. Lets callers walk a
    /// long Bernoulli sequence in O(successes).
    #[inline]
    pub fn geometric_skip(&mut self, ln1mp: f64) -> u64 {
        let g = (self.next_f64_open().ln() / ln1mp).floor();
        if g >= u64::MAX as f64 {
            u64::MAX
        } else {
            g as u64
        }
    }
}
