//! Nucleotide genomes and mutation operators.
//!
//! A genome is a sequence of nucleotides valued 1–4, treated as circular
//! for decoding. Genes begin at each occurrence of the five-symbol start
//! codon `4 2 2 1 3` and are read circularly from there.

use crate::rng::Stream;
use crate::{Error, Result};

/// Shortest genome a mutation may leave behind.
pub const MIN_LEN: usize = 2_000;
/// Longest genome a mutation may produce.
pub const MAX_LEN: usize = 200_000;

/// The gene start marker: "42" followed by "213".
pub const START_CODON: [u8; 5] = [4, 2, 2, 1, 3];

/// A circular sequence of nucleotides, each in 1..=4.
///
/// Length bounds are enforced where sequences are born (seeding) and
/// change (mutation); hand-built short genomes are allowed so decode
/// oracles can work on small inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genome {
    nucleotides: Vec<u8>,
}

impl Genome {
    /// Wrap a raw sequence. Every value must be in 1..=4.
    pub fn new(nucleotides: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = nucleotides.iter().find(|&&n| !(1..=4).contains(&n)) {
            return Err(Error::InvalidArgument(format!(
                "nucleotide value {bad} outside 1..=4"
            )));
        }
        Ok(Genome { nucleotides })
    }

    pub fn len(&self) -> usize {
        self.nucleotides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nucleotides.is_empty()
    }

    pub fn nucleotides(&self) -> &[u8] {
        &self.nucleotides
    }

    /// Nucleotide at a circular position.
    #[inline]
    pub fn at(&self, pos: usize) -> u8 {
        self.nucleotides[pos % self.nucleotides.len()]
    }

    /// One-line dump: nucleotides as a digit string, no separators.
    pub fn to_line(&self) -> String {
        self.nucleotides
            .iter()
            .map(|n| (b'0' + n) as char)
            .collect()
    }

    /// Parse the dump format produced by [`Genome::to_line`].
    pub fn from_line(line: &str) -> Result<Self> {
        let nucleotides = line
            .trim()
            .bytes()
            .map(|b| match b {
                b'1'..=b'4' => Ok(b - b'0'),
                _ => Err(Error::Parse(format!(
                    "invalid genome digit {:?}",
                    b as char
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Genome::new(nucleotides)
    }
}

/// Per-replication mutation configuration.
///
/// `point` is a per-nucleotide probability; each point event redraws one
/// nucleotide uniformly from 1..=4. `duplication` and `deletion` are
/// per-replication probabilities of a single segment event of
/// `dup_del_segment_len` nucleotides: a duplication copies the segment
/// starting at the event site and inserts the copy immediately after it,
/// a deletion removes the segment. Events that would push the length
/// outside [`MIN_LEN`], [`MAX_LEN`] are skipped whole.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MutationRates {
    pub point: f64,
    pub duplication: f64,
    pub deletion: f64,
    pub dup_del_segment_len: usize,
}

impl Default for MutationRates {
    fn default() -> Self {
        MutationRates {
            point: 0.00005,
            duplication: 0.002,
            deletion: 0.001,
            dup_del_segment_len: 256,
        }
    }
}

impl MutationRates {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("point", self.point),
            ("duplication", self.duplication),
            ("deletion", self.deletion),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} rate {p} outside [0, 1]"
                )));
            }
        }
        if self.dup_del_segment_len == 0 {
            return Err(Error::InvalidArgument(
                "dup_del_segment_len must be positive".into(),
            ));
        }
        Ok(())
    }

    /// All-zero rates; `mutate` becomes an exact copy.
    pub fn zero() -> Self {
        MutationRates {
            point: 0.0,
            duplication: 0.0,
            deletion: 0.0,
            dup_del_segment_len: 256,
        }
    }
}

/// Event counts from one replication, for rate verification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MutationStats {
    pub point_events: u64,
    pub duplication_events: u64,
    pub deletion_events: u64,
    /// Events skipped by the length clamp (counted in the totals above).
    pub skipped_events: u64,
}

/// Uniform random genome of the given length.
///
/// Errors if `length` is outside [`MIN_LEN`]..=[`MAX_LEN`].
pub fn random_seed_genome(length: usize, rng: &mut Stream) -> Result<Genome> {
    if !(MIN_LEN..=MAX_LEN).contains(&length) {
        return Err(Error::InvalidArgument(format!(
            "seed genome length {length} outside [{MIN_LEN}, {MAX_LEN}]"
        )));
    }
    let nucleotides = (0..length).map(|_| 1 + rng.below(4) as u8).collect();
    Ok(Genome { nucleotides })
}

/// Replicate `parent` with random mutations. The parent is untouched.
pub fn mutate(parent: &Genome, rates: &MutationRates, rng: &mut Stream) -> Genome {
    mutate_with_stats(parent, rates, rng).0
}

/// [`mutate`], also reporting how many events of each kind occurred.
pub fn mutate_with_stats(
    parent: &Genome,
    rates: &MutationRates,
    rng: &mut Stream,
) -> (Genome, MutationStats) {
    let mut child = parent.nucleotides.clone();
    let mut stats = MutationStats::default();

    // Point mutations: Bernoulli per nucleotide, walked by geometric skips.
    if rates.point > 0.0 && !child.is_empty() {
        if rates.point >= 1.0 {
            for n in child.iter_mut() {
                *n = 1 + rng.below(4) as u8;
                stats.point_events += 1;
            }
        } else {
            let ln1mp = (1.0 - rates.point).ln();
            let mut pos = rng.geometric_skip(ln1mp);
            while (pos as u128) < child.len() as u128 {
                child[pos as usize] = 1 + rng.below(4) as u8;
                stats.point_events += 1;
                pos = pos.saturating_add(1 + rng.geometric_skip(ln1mp));
            }
        }
    }

    // One possible duplication: copy [site, site+seg) and insert the copy
    // right after the segment.
    if rates.duplication > 0.0 && !child.is_empty() && rng.chance(rates.duplication) {
        stats.duplication_events += 1;
        let site = rng.below(child.len() as u64) as usize;
        let end = (site + rates.dup_del_segment_len).min(child.len());
        let seg_len = end - site;
        if child.len() + seg_len > MAX_LEN {
            stats.skipped_events += 1;
        } else {
            let segment: Vec<u8> = child[site..end].to_vec();
            child.splice(end..end, segment);
        }
    }

    // One possible deletion: remove [site, site+seg).
    if rates.deletion > 0.0 && !child.is_empty() && rng.chance(rates.deletion) {
        stats.deletion_events += 1;
        let site = rng.below(child.len() as u64) as usize;
        let end = (site + rates.dup_del_segment_len).min(child.len());
        let seg_len = end - site;
        if child.len() - seg_len < MIN_LEN {
            stats.skipped_events += 1;
        } else {
            child.drain(site..end);
        }
    }

    (Genome { nucleotides: child }, stats)
}

/// Every circular position where [`START_CODON`] begins, ascending.
pub fn find_gene_starts(genome: &Genome) -> Vec<usize> {
    let seq = &genome.nucleotides;
    let len = seq.len();
    if len == 0 {
        return Vec::new();
    }
    let mut starts = Vec::new();
    'scan: for i in 0..len {
        for (k, &c) in START_CODON.iter().enumerate() {
            if seq[(i + k) % len] != c {
                continue 'scan;
            }
        }
        starts.push(i);
    }
    starts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Purpose;
    use proptest::prelude::*;

    fn stream(seed: u64) -> Stream {
        Stream::keyed(seed, Purpose::SeedGenome, [0, 0, 0])
    }

    #[test]
    fn seed_genome_is_deterministic() {
        let a = random_seed_genome(5000, &mut stream(42)).unwrap();
        let b = random_seed_genome(5000, &mut stream(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seed_genome_length_and_alphabet() {
        let g = random_seed_genome(2000, &mut stream(1)).unwrap();
        assert_eq!(g.len(), 2000);
        assert!(g.nucleotides().iter().all(|n| (1..=4).contains(n)));
    }

    #[test]
    fn seed_genome_rejects_out_of_bounds_length() {
        assert!(matches!(
            random_seed_genome(MIN_LEN - 1, &mut stream(1)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            random_seed_genome(MAX_LEN + 1, &mut stream(1)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn seed_genome_symbol_frequencies_near_uniform() {
        // Independent count oracle over a 100k draw; binomial sd ~ 0.0014,
        // so +-0.01 is a 7-sigma envelope.
        let g = random_seed_genome(100_000, &mut stream(7)).unwrap();
        let mut counts = [0usize; 5];
        for &n in g.nucleotides() {
            counts[n as usize] += 1;
        }
        for (v, &count) in counts.iter().enumerate().skip(1) {
            let freq = count as f64 / g.len() as f64;
            assert!((freq - 0.25).abs() < 0.01, "symbol {v} freq {freq}");
        }
    }

    #[test]
    fn zero_rates_copy_parent_exactly() {
        let parent = random_seed_genome(3000, &mut stream(3)).unwrap();
        let child = mutate(&parent, &MutationRates::zero(), &mut stream(4));
        assert_eq!(child, parent);
    }

    #[test]
    fn point_mutation_count_matches_binomial_mean() {
        // n*p = 100000 * 0.00005 = 5 per replication; over 1000 replications
        // the sample mean lands within 5.0 +- 0.7 (10 standard errors).
        let parent = random_seed_genome(100_000, &mut stream(11)).unwrap();
        let rates = MutationRates {
            duplication: 0.0,
            deletion: 0.0,
            ..MutationRates::default()
        };
        let mut total = 0u64;
        let reps = 1000;
        for i in 0..reps {
            let mut rng = Stream::keyed(99, Purpose::Mutate, [0, i, 0]);
            let (_, stats) = mutate_with_stats(&parent, &rates, &mut rng);
            total += stats.point_events;
        }
        let mean = total as f64 / reps as f64;
        assert!((mean - 5.0).abs() < 0.7, "mean point events {mean}");
    }

    #[test]
    fn deletion_at_min_len_is_skipped() {
        let parent = random_seed_genome(MIN_LEN, &mut stream(5)).unwrap();
        let rates = MutationRates {
            point: 0.0,
            duplication: 0.0,
            deletion: 1.0,
            dup_del_segment_len: 256,
        };
        let (child, stats) = mutate_with_stats(&parent, &rates, &mut stream(6));
        assert_eq!(stats.deletion_events, 1);
        assert_eq!(stats.skipped_events, 1);
        assert_eq!(child.len(), MIN_LEN);
        assert_eq!(child, parent);
    }

    #[test]
    fn duplication_at_max_len_is_skipped() {
        let parent = random_seed_genome(MAX_LEN, &mut stream(8)).unwrap();
        let rates = MutationRates {
            point: 0.0,
            duplication: 1.0,
            deletion: 0.0,
            dup_del_segment_len: 256,
        };
        let (child, stats) = mutate_with_stats(&parent, &rates, &mut stream(9));
        assert_eq!(stats.duplication_events, 1);
        assert_eq!(stats.skipped_events, 1);
        assert_eq!(child.len(), MAX_LEN);
    }

    #[test]
    fn duplication_inserts_tandem_copy() {
        let parent = random_seed_genome(MIN_LEN, &mut stream(21)).unwrap();
        let rates = MutationRates {
            point: 0.0,
            duplication: 1.0,
            deletion: 0.0,
            dup_del_segment_len: 64,
        };
        let (child, stats) = mutate_with_stats(&parent, &rates, &mut stream(22));
        assert_eq!(stats.duplication_events, 1);
        assert_eq!(child.len(), parent.len() + 64);
        // Find the inserted window: child must contain parent as a
        // subsequence with one 64-wide repeat.
        let mut found = false;
        for site in 0..parent.len() {
            let end = (site + 64).min(parent.len());
            if end - site != 64 {
                continue;
            }
            let mut expect = parent.nucleotides()[..end].to_vec();
            expect.extend_from_slice(&parent.nucleotides()[site..end]);
            expect.extend_from_slice(&parent.nucleotides()[end..]);
            if expect == child.nucleotides() {
                found = true;
                break;
            }
        }
        assert!(found, "child is not a tandem duplication of parent");
    }

    #[test]
    fn gene_start_literal_match() {
        let g = Genome::new(vec![4, 2, 2, 1, 3, 1, 1, 1]).unwrap();
        assert_eq!(find_gene_starts(&g), vec![0]);
    }

    #[test]
    fn gene_start_absent_without_fours() {
        let g = Genome::new(vec![1, 2, 3, 1, 2, 3, 2, 2, 1, 3]).unwrap();
        assert_eq!(find_gene_starts(&g), Vec::<usize>::new());
    }

    #[test]
    fn gene_start_spanning_wrap_boundary() {
        // Codon begins at position 5 and wraps: 4,2,2 then 1,3 from the head.
        let g = Genome::new(vec![1, 3, 1, 1, 1, 4, 2, 2]).unwrap();
        assert_eq!(find_gene_starts(&g), vec![5]);
    }

    #[test]
    fn dump_round_trip() {
        let g = random_seed_genome(2000, &mut stream(12)).unwrap();
        let line = g.to_line();
        assert_eq!(Genome::from_line(&line).unwrap(), g);
        assert!(Genome::from_line("12345").is_err());
        assert!(Genome::from_line("120").is_err());
    }

    /// Reference scan: linear match over the sequence extended by its own
    /// 4-symbol prefix.
    fn naive_gene_starts(seq: &[u8]) -> Vec<usize> {
        if seq.len() < START_CODON.len() {
            // Short genomes still wrap; fall back to index arithmetic.
            return (0..seq.len())
                .filter(|&i| {
                    START_CODON
                        .iter()
                        .enumerate()
                        .all(|(k, &c)| seq[(i + k) % seq.len()] == c)
                })
                .collect();
        }
        let mut doubled = seq.to_vec();
        doubled.extend_from_slice(&seq[..START_CODON.len() - 1]);
        (0..seq.len())
            .filter(|&i| doubled[i..i + START_CODON.len()] == START_CODON)
            .collect()
    }

    proptest! {
        #[test]
        fn gene_scan_agrees_with_naive_doubled_scan(
            seq in proptest::collection::vec(1u8..=4, 1..300)
        ) {
            let g = Genome::new(seq.clone()).unwrap();
            prop_assert_eq!(find_gene_starts(&g), naive_gene_starts(&seq));
        }

        #[test]
        fn mutate_preserves_alphabet_and_bounds(
            seed in 0u64..1000,
            point in 0.0f64..0.01,
            segment in 1usize..512,
        ) {
            let parent = random_seed_genome(MIN_LEN, &mut stream(seed)).unwrap();
            let rates = MutationRates {
                point,
                duplication: 0.5,
                deletion: 0.5,
                dup_del_segment_len: segment,
            };
            let mut rng = Stream::keyed(seed, Purpose::Mutate, [1, 2, 3]);
            let mut g = parent;
            for _ in 0..4 {
                g = mutate(&g, &rates, &mut rng);
                prop_assert!(g.len() >= MIN_LEN && g.len() <= MAX_LEN);
                prop_assert!(g.nucleotides().iter().all(|n| (1..=4).contains(n)));
            }
        }
    }
}
