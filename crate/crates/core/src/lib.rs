//! Monitor-supervised distributed search on NK fitness landscapes.
//!
//! A population of `L` agents explores binary strings by random single-bit
//! flips. A central monitor evaluates every agent and displays the fittest
//! current string; with probability `p` an update copies one bit of that
//! display instead of flipping at random. The crate measures the cost of
//! locating the global maximum and the diversity of the population when it
//! is found.
//!
//! - [`landscape`]: NK landscape generation, evaluation and exhaustive analysis
//! - [`landscape_file`]: the plain-text landscape format
//! - [`search`]: a single search run
//! - [`experiment`]: ensembles, sweeps and the local-maxima census
//! - [`output`]: CSV/JSON result tables
//! - [`cli`]: the `nk-monitor` command line

pub mod cli;
pub mod error;
pub mod experiment;
pub mod genotype;
pub mod landscape;
pub mod landscape_file;
pub mod output;
pub mod search;
pub mod seed;

pub use error::{Error, Result};
pub use experiment::{
    aggregate, ensemble_local_correlation, landscape_census, run_ensemble, sweep, Census,
    EnsembleResult, EnsembleSpec, SweepAxis, SweepSpec,
};
pub use genotype::Genotype;
pub use landscape::{theoretical_local_correlation, GlobalOptimum, NkLandscape, NkParams};
pub use search::{
    hamming_distance, run_search, run_search_from, AgentPool, SearchConfig, SearchOutcome,
};
