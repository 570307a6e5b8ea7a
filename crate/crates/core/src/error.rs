use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("genotype length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("site index {site} out of range for n = {n}")]
    SiteOutOfRange { site: usize, n: usize },

    #[error(
        "degenerate landscape: genotypes {first} and {second} tie at the maximum fitness {fitness}"
    )]
    DegenerateLandscape {
        first: String,
        second: String,
        fitness: f64,
    },

    #[error(
        "too many degenerate landscapes: {regenerated} regenerations for {landscapes} landscapes"
    )]
    TooManyRegenerations {
        regenerated: usize,
        landscapes: usize,
    },

    #[error("fitness samples have zero variance")]
    ZeroVariance,

    #[error("mean pairwise distance needs at least 2 agents, got {0}")]
    TooFewAgents(usize),

    #[error("landscape has no cached global maximum")]
    MissingOptimum,

    #[error("no completed runs ({censored} censored)")]
    NoCompletedRuns { censored: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub(crate) fn check_site(site: usize, n: usize) -> Result<()> {
    if site < n {
        Ok(())
    } else {
        Err(Error::SiteOutOfRange { site, n })
    }
}
