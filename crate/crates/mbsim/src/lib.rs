//! Deterministic digital-evolution simulator: genome-encoded Markov brain
//! agents evolving on a ramped two-channel signal/noise decision task.
//!
//! The crate is organized along the pipeline:
//!
//! * [`genome`]: nucleotide genomes, mutation operators, gene scanning
//! * [`brain`]: genome decoding into logic-gate networks and the
//!   synchronous network update
//! * [`environment`]: stimulus generation, single trials, fitness blocks
//! * [`evolution`]: generational loop, roulette selection, ancestry and
//!   line-of-descent extraction, checkpointing
//! * [`analysis`]: LOD trajectory averaging, behavioral probes,
//!   input-to-decision correlation profiles
//! * [`harness`]: experiment grids, manifests, config files, scheduling
//!
//! Everything downstream of a run seed is bit-reproducible at any thread
//! count; see [`rng`] for the stream-keying contract.

pub mod analysis;
pub mod brain;
pub mod environment;
pub mod evolution;
pub mod genome;
pub mod harness;
pub mod rng;
pub mod validate;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("integrity: {0}")]
    Integrity(String),
    #[error("config mismatch: {0}")]
    ConfigMismatch(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
