//! Markov brains: logic-gate networks over 16 binary nodes, decoded from
//! genomes.
//!
//! Nodes are 1-based. Nodes 1 and 2 carry the environment inputs, nodes
//! 15 and 16 are the answer outputs. Gates read the full pre-update state
//! simultaneously; writes to the same node OR together; hidden and output
//! nodes reset to zero unless written, so any memory must be wired
//! explicitly.

use crate::genome::{find_gene_starts, Genome};

pub const NODE_COUNT: usize = 16;
pub const INPUT_NODES: [u8; 2] = [1, 2];
pub const OUTPUT_NODES: [u8; 2] = [15, 16];

/// One logic gate: an `x -> y` truth-table map between node sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    /// 1..=4 source node ids (1-based). `inputs[0]` is the most
    /// significant bit of the table row index.
    pub inputs: Vec<u8>,
    /// 1..=4 destination node ids; never 1 or 2 (input nodes are
    /// environment-owned, encoded targets there are remapped at decode).
    pub outputs: Vec<u8>,
    /// `2^inputs.len()` rows of `outputs.len()` bits each.
    pub table: Vec<Vec<u8>>,
}

impl Gate {
    /// Directed input-output pairs this gate contributes.
    pub fn connections(&self) -> usize {
        self.inputs.len() * self.outputs.len()
    }

    /// Dump line: `in=[..] out=[..] table=[rowbits;rowbits;...]`.
    pub fn to_line(&self) -> String {
        let ins: Vec<String> = self.inputs.iter().map(u8::to_string).collect();
        let outs: Vec<String> = self.outputs.iter().map(u8::to_string).collect();
        let rows: Vec<String> = self
            .table
            .iter()
            .map(|row| row.iter().map(|b| (b'0' + b) as char).collect())
            .collect();
        format!(
            "in=[{}] out=[{}] table=[{}]",
            ins.join(","),
            outs.join(","),
            rows.join(";")
        )
    }
}

/// A decoded brain: just its gates, in gene start-position order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Brain {
    pub gates: Vec<Gate>,
}

impl Brain {
    /// Dump: one gate per line, in order.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        for gate in &self.gates {
            out.push_str(&gate.to_line());
            out.push('\n');
        }
        out
    }
}

/// The 16 node bits; bit `n-1` holds node `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeState(pub u16);

impl NodeState {
    pub fn zeros() -> Self {
        NodeState(0)
    }

    #[inline]
    pub fn get(&self, node: u8) -> u8 {
        debug_assert!((1..=16).contains(&node));
        ((self.0 >> (node - 1)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, node: u8, bit: u8) {
        debug_assert!((1..=16).contains(&node));
        let mask = 1u16 << (node - 1);
        if bit != 0 {
            self.0 |= mask;
        } else {
            self.0 &= !mask;
        }
    }
}

/// What the output nodes say.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Signal,
    Noise,
    None,
}

/// Decode arity: nucleotide -> 1..=4.
#[inline]
fn arity(n: u8) -> usize {
    (((n - 1) % 4) + 1) as usize
}

/// Decode a node id from a nucleotide pair: `(u-1)*4 + (v-1) mod 16`, 1-based.
#[inline]
fn node_id(u: u8, v: u8) -> u8 {
    ((((u - 1) as usize * 4 + (v - 1) as usize) % 16) + 1) as u8
}

/// Keep gate outputs off the environment-owned input nodes.
#[inline]
fn remap_output(node: u8) -> u8 {
    if node <= 2 {
        ((node - 1) % 14) + 3
    } else {
        node
    }
}

/// Decode every gene in the genome into a gate. Genes are read circularly
/// from the symbol after their start codon and may overlap freely; no
/// start codon means a brain with no gates.
pub fn decode(genome: &Genome) -> Brain {
    let mut gates = Vec::new();
    if genome.is_empty() {
        return Brain { gates };
    }
    for start in find_gene_starts(genome) {
        let mut cursor = start + crate::genome::START_CODON.len();
        let mut next = || {
            let n = genome.at(cursor);
            cursor += 1;
            n
        };
        let n_inputs = arity(next());
        let n_outputs = arity(next());
        let inputs: Vec<u8> = (0..n_inputs)
            .map(|_| {
                let u = next();
                let v = next();
                node_id(u, v)
            })
            .collect();
        let outputs: Vec<u8> = (0..n_outputs)
            .map(|_| {
                let u = next();
                let v = next();
                remap_output(node_id(u, v))
            })
            .collect();
        let table: Vec<Vec<u8>> = (0..1usize << n_inputs)
            .map(|_| (0..n_outputs).map(|_| next() % 2).collect())
            .collect();
        gates.push(Gate {
            inputs,
            outputs,
            table,
        });
    }
    Brain { gates }
}

/// One synchronous network update.
///
/// Input bits are written onto nodes 1 and 2 first; every gate then reads
/// that same snapshot; a fresh all-zero state (inputs retained) collects
/// the OR of all gate outputs.
pub fn step(brain: &Brain, state: NodeState, input_bits: (u8, u8)) -> NodeState {
    let mut current = state;
    current.set(1, input_bits.0);
    current.set(2, input_bits.1);

    let mut next = NodeState::zeros();
    next.set(1, input_bits.0);
    next.set(2, input_bits.1);

    for gate in &brain.gates {
        let mut row = 0usize;
        for &node in &gate.inputs {
            row = (row << 1) | current.get(node) as usize;
        }
        for (k, &node) in gate.outputs.iter().enumerate() {
            if gate.table[row][k] != 0 {
                next.set(node, 1);
            }
        }
    }
    next
}

/// Read the answer nodes: `(0,1)` means signal, `(1,0)` noise, anything
/// else is no answer.
pub fn read_answer(state: NodeState) -> Answer {
    match (state.get(15), state.get(16)) {
        (0, 1) => Answer::Signal,
        (1, 0) => Answer::Noise,
        _ => Answer::None,
    }
}

/// Number of directed node-to-node connections: input x output pairs
/// summed over gates, duplicates counted with multiplicity.
pub fn connection_count(brain: &Brain) -> usize {
    brain.gates.iter().map(Gate::connections).sum()
}

/// Gate form specialized for the trial hot loop: table rows become
/// precomputed OR-masks over the next-state word.
#[derive(Debug, Clone)]
struct CompiledGate {
    n_inputs: u8,
    /// 0-based bit positions of the input nodes.
    input_bits: [u8; 4],
    /// OR-mask per table row; rows beyond 2^n_inputs stay zero.
    masks: [u16; 16],
}

/// A brain preprocessed for fast stepping. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct CompiledBrain {
    gates: Vec<CompiledGate>,
    connections: usize,
}

impl CompiledBrain {
    pub fn from_brain(brain: &Brain) -> Self {
        let gates = brain
            .gates
            .iter()
            .map(|gate| {
                let mut input_bits = [0u8; 4];
                for (j, &node) in gate.inputs.iter().enumerate() {
                    input_bits[j] = node - 1;
                }
                let mut masks = [0u16; 16];
                for (row, bits) in gate.table.iter().enumerate() {
                    let mut mask = 0u16;
                    for (k, &bit) in bits.iter().enumerate() {
                        if bit != 0 {
                            mask |= 1 << (gate.outputs[k] - 1);
                        }
                    }
                    masks[row] = mask;
                }
                CompiledGate {
                    n_inputs: gate.inputs.len() as u8,
                    input_bits,
                    masks,
                }
            })
            .collect();
        CompiledBrain {
            gates,
            connections: connection_count(brain),
        }
    }

    pub fn connections(&self) -> usize {
        self.connections
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Same contract as [`step`], on raw state words.
    #[inline]
    pub fn step_word(&self, state: u16, input_bits: (u8, u8)) -> u16 {
        let inputs = (input_bits.0 as u16) | ((input_bits.1 as u16) << 1);
        let current = (state & !0b11) | inputs;
        let mut next = inputs;
        for gate in &self.gates {
            let mut row = 0usize;
            for j in 0..gate.n_inputs as usize {
                row = (row << 1) | ((current >> gate.input_bits[j]) & 1) as usize;
            }
            next |= gate.masks[row];
        }
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::random_seed_genome;
    use crate::rng::{Purpose, Stream};
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn decode_without_codon_yields_empty_brain() {
        let g = Genome::new(vec![1, 2, 3, 1, 2, 3, 1, 2]).unwrap();
        let brain = decode(&g);
        assert!(brain.gates.is_empty());
        assert_eq!(connection_count(&brain), 0);
    }

    #[test]
    fn decode_hand_worked_single_gate() {
        // codon, arities 1x1, input pair (1,1) -> node 1,
        // output pair (3,4) -> ((2*4+3) mod 16)+1 = 12, table parities 2,1 -> 0,1.
        let g = Genome::new(vec![4, 2, 2, 1, 3, 1, 1, 1, 1, 3, 4, 2, 1, 2, 2]).unwrap();
        let brain = decode(&g);
        assert_eq!(brain.gates.len(), 1);
        let gate = &brain.gates[0];
        assert_eq!(gate.inputs, vec![1]);
        assert_eq!(gate.outputs, vec![12]);
        assert_eq!(gate.table, vec![vec![0], vec![1]]);
        assert_eq!(gate.to_line(), "in=[1] out=[12] table=[0;1]");
    }

    #[test]
    fn decode_remaps_outputs_off_input_nodes() {
        // Output pairs (1,1) -> node 1 -> remap 3, and (1,2) -> node 2 -> remap 4.
        let g = Genome::new(vec![
            4, 2, 2, 1, 3, // codon
            1, 2, // 1 input, 2 outputs
            1, 1, // input node 1
            1, 1, // output node 1 -> 3
            1, 2, // output node 2 -> 4
            2, 2, 1, 1, // table rows: 00, 11
        ])
        .unwrap();
        let brain = decode(&g);
        assert_eq!(brain.gates[0].outputs, vec![3, 4]);
        for gate in &brain.gates {
            assert!(gate.outputs.iter().all(|&o| (3..=16).contains(&o)));
        }
    }

    #[test]
    fn decode_is_pure() {
        let g =
            random_seed_genome(4000, &mut Stream::keyed(5, Purpose::SeedGenome, [0; 3])).unwrap();
        assert_eq!(decode(&g), decode(&g));
    }

    #[test]
    fn step_with_no_gates_keeps_only_inputs() {
        let brain = Brain::default();
        let mut dirty = NodeState::zeros();
        dirty.set(5, 1);
        dirty.set(16, 1);
        let next = step(&brain, dirty, (0, 1));
        assert_eq!(next.get(1), 0);
        assert_eq!(next.get(2), 1);
        for node in 3..=16 {
            assert_eq!(next.get(node), 0, "node {node}");
        }
    }

    fn identity_gate() -> Gate {
        // (1,2) -> (15,16), each row echoes its index bits.
        Gate {
            inputs: vec![1, 2],
            outputs: vec![15, 16],
            table: vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
        }
    }

    #[test]
    fn step_identity_gate_copies_inputs_to_outputs() {
        let brain = Brain {
            gates: vec![identity_gate()],
        };
        let next = step(&brain, NodeState::zeros(), (0, 1));
        assert_eq!(next.get(15), 0);
        assert_eq!(next.get(16), 1);
        assert_eq!(read_answer(next), Answer::Signal);

        let next = step(&brain, NodeState::zeros(), (1, 0));
        assert_eq!((next.get(15), next.get(16)), (1, 0));
        assert_eq!(read_answer(next), Answer::Noise);
    }

    #[test]
    fn step_or_combines_writers() {
        // Two gates target node 15: one always writes 0, one always writes 1.
        let zero_writer = Gate {
            inputs: vec![3],
            outputs: vec![15],
            table: vec![vec![0], vec![0]],
        };
        let one_writer = Gate {
            inputs: vec![3],
            outputs: vec![15],
            table: vec![vec![1], vec![1]],
        };
        let brain = Brain {
            gates: vec![zero_writer, one_writer],
        };
        let next = step(&brain, NodeState::zeros(), (0, 0));
        assert_eq!(next.get(15), 1);
    }

    #[test]
    fn read_answer_covers_all_output_pairs() {
        let mut s = NodeState::zeros();
        s.set(16, 1);
        assert_eq!(read_answer(s), Answer::Signal);
        let mut s = NodeState::zeros();
        s.set(15, 1);
        assert_eq!(read_answer(s), Answer::Noise);
        assert_eq!(read_answer(NodeState::zeros()), Answer::None);
        let mut s = NodeState::zeros();
        s.set(15, 1);
        s.set(16, 1);
        assert_eq!(read_answer(s), Answer::None);
    }

    #[test]
    fn connection_count_sums_gate_products() {
        let brain = Brain {
            gates: vec![identity_gate()],
        };
        assert_eq!(connection_count(&brain), 4);
    }

    #[test]
    fn compiled_brain_matches_reference_step() {
        let g =
            random_seed_genome(4000, &mut Stream::keyed(17, Purpose::SeedGenome, [0; 3])).unwrap();
        let brain = decode(&g);
        let compiled = CompiledBrain::from_brain(&brain);
        assert_eq!(compiled.connections(), connection_count(&brain));
        let mut state = NodeState::zeros();
        let mut word = 0u16;
        let mut s = Stream::keyed(18, Purpose::Trial, [0; 3]);
        for _ in 0..200 {
            let bits = ((s.next_u64() & 1) as u8, ((s.next_u64() >> 1) & 1) as u8);
            state = step(&brain, state, bits);
            word = compiled.step_word(word, bits);
            assert_eq!(state.0, word);
        }
    }

    fn arbitrary_gate() -> impl Strategy<Value = Gate> {
        (1usize..=4, 1usize..=4).prop_flat_map(|(n_in, n_out)| {
            (
                proptest::collection::vec(1u8..=16, n_in),
                proptest::collection::vec(3u8..=16, n_out),
                proptest::collection::vec(
                    proptest::collection::vec(0u8..=1, n_out),
                    1usize << n_in,
                ),
            )
                .prop_map(|(inputs, outputs, table)| Gate {
                    inputs,
                    outputs,
                    table,
                })
        })
    }

    proptest! {
        #[test]
        fn step_is_deterministic_and_pins_input_nodes(
            gates in proptest::collection::vec(arbitrary_gate(), 0..4),
            state in proptest::num::u16::ANY,
            left in 0u8..=1,
            right in 0u8..=1,
        ) {
            let brain = Brain { gates };
            let a = step(&brain, NodeState(state), (left, right));
            let b = step(&brain, NodeState(state), (left, right));
            prop_assert_eq!(a, b);
            prop_assert_eq!(a.get(1), left);
            prop_assert_eq!(a.get(2), right);
        }

        #[test]
        fn connection_count_invariant_under_reordering(
            gates in proptest::collection::vec(arbitrary_gate(), 0..6),
        ) {
            let brain = Brain { gates: gates.clone() };
            let mut reversed = gates;
            reversed.reverse();
            let flipped = Brain { gates: reversed };
            prop_assert_eq!(connection_count(&brain), connection_count(&flipped));
        }

        #[test]
        fn constant_input_trajectory_enters_cycle_within_state_space(
            gates in proptest::collection::vec(arbitrary_gate(), 0..3),
            left in 0u8..=1,
            right in 0u8..=1,
        ) {
            // 14 free bits -> at most 2^14 distinct states before a repeat.
            let brain = Brain { gates };
            let compiled = CompiledBrain::from_brain(&brain);
            let mut seen = HashSet::new();
            let mut word = 0u16;
            let mut looped = false;
            for _ in 0..=(1usize << 14) {
                if !seen.insert(word) {
                    looped = true;
                    break;
                }
                word = compiled.step_word(word, (left, right));
            }
            prop_assert!(looped);
        }
    }
}
