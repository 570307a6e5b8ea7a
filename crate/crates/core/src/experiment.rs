//! Ensembles of search runs over many landscapes, parameter sweeps and the
//! local-maxima census.
//!
//! Landscape `m` of an ensemble is generated from
//! `seed::landscape_seed(master, m, attempt)` and run `r` on it uses
//! `seed::run_seed(master, m, r)`. Sweep points share the master seed, so
//! every point sees the same landscapes and the same run seeds.
//!
//! Runs are spread over the current rayon pool. Outcomes are collected in
//! `(m, r)` order before aggregation, so results do not depend on the number
//! of threads.

use log::warn;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{CoMoments, NkLandscape, NkParams};
use crate::search::{run_search, SearchConfig, SearchOutcome, DEFAULT_MAX_COST};
use crate::seed::{landscape_seed, run_seed};

/// Desk-scale default number of landscapes per ensemble.
pub const DEFAULT_LANDSCAPES: usize = 20;
/// Desk-scale default number of runs per landscape.
pub const DEFAULT_RUNS: usize = 2000;

/// Largest tolerated fraction of landscapes redrawn because of a tied maximum.
const MAX_REGENERATION_FRACTION: f64 = 0.01;
const MAX_ATTEMPTS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub k: usize,
    /// Number of landscapes `M`.
    pub landscapes: usize,
    /// Runs per landscape `R`.
    pub runs_per_landscape: usize,
    pub l: usize,
    pub p: f64,
    pub max_cost: f64,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn new(n: usize, k: usize, l: usize, p: f64, master_seed: u64) -> Self {
        EnsembleSpec {
            n,
            k,
            landscapes: DEFAULT_LANDSCAPES,
            runs_per_landscape: DEFAULT_RUNS,
            l,
            p,
            max_cost: DEFAULT_MAX_COST,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        NkParams::new(self.n, self.k, 0)?;
        if self.landscapes < 1 || self.runs_per_landscape < 1 {
            return Err(Error::InvalidParams(
                "landscapes and runs per landscape must be >= 1".into(),
            ));
        }
        if self.landscapes > u32::MAX as usize || self.runs_per_landscape > u32::MAX as usize {
            return Err(Error::InvalidParams("ensemble too large".into()));
        }
        self.search_config(0).validate()
    }

    fn search_config(&self, run_seed: u64) -> SearchConfig {
        SearchConfig {
            l: self.l,
            p: self.p,
            max_cost: self.max_cost,
            run_seed,
        }
    }

    pub fn total_runs(&self) -> usize {
        self.landscapes * self.runs_per_landscape
    }
}

/// Statistics over the runs of one ensemble. Means and standard errors cover
/// completed runs only; they are NaN when no run completed. The pairwise
/// statistics are NaN when `L < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub mean_cost: f64,
    pub cost_stderr: f64,
    pub mean_pairwise: f64,
    pub pairwise_stderr: f64,
    pub mean_dist_to_opt: f64,
    pub censored: usize,
    pub total_runs: usize,
}

impl EnsembleResult {
    pub fn completed(&self) -> usize {
        self.total_runs - self.censored
    }

    /// Whether some runs hit the censoring cap, making the means optimistic.
    pub fn is_unreliable(&self) -> bool {
        self.censored > 0
    }

    /// Lower bound on the uncensored mean cost, counting every censored run
    /// at `max_cost`.
    pub fn cost_lower_bound(&self, max_cost: f64) -> f64 {
        let completed = if self.completed() > 0 {
            self.mean_cost * self.completed() as f64
        } else {
            0.0
        };
        (completed + self.censored as f64 * max_cost) / self.total_runs as f64
    }
}

/// Mean and standard error (sample deviation over `sqrt(count)`), summed in
/// slice order.
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let count = values.len();
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    if count == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (count - 1) as f64).sqrt();
    (mean, sd / (count as f64).sqrt())
}

/// Aggregates outcomes, reporting an all-censored list with NaN means.
pub fn summarize(outcomes: &[SearchOutcome]) -> EnsembleResult {
    let done: Vec<&SearchOutcome> = outcomes.iter().filter(|o| o.halted).collect();
    let costs: Vec<f64> = done.iter().map(|o| o.cost).collect();
    let pairwise: Vec<f64> = done
        .iter()
        .filter_map(|o| o.final_mean_pairwise_distance)
        .collect();
    let to_opt: Vec<f64> = done
        .iter()
        .map(|o| o.final_mean_distance_to_optimum)
        .collect();
    let (mean_cost, cost_stderr) = mean_and_stderr(&costs);
    let (mean_pairwise, pairwise_stderr) = mean_and_stderr(&pairwise);
    EnsembleResult {
        mean_cost,
        cost_stderr,
        mean_pairwise,
        pairwise_stderr,
        mean_dist_to_opt: mean_and_stderr(&to_opt).0,
        censored: outcomes.len() - done.len(),
        total_runs: outcomes.len(),
    }
}

/// Aggregates outcomes; fails if the list is empty or every run was censored.
pub fn aggregate(outcomes: &[SearchOutcome]) -> Result<EnsembleResult> {
    if outcomes.is_empty() {
        return Err(Error::InvalidParams("no outcomes to aggregate".into()));
    }
    let result = summarize(outcomes);
    if result.completed() == 0 {
        return Err(Error::NoCompletedRuns {
            censored: result.censored,
        });
    }
    Ok(result)
}

/// Generates `count` landscapes with their global maxima cached. A landscape
/// with a tied maximum is redrawn from the next attempt seed.
pub fn prepare_landscapes(
    n: usize,
    k: usize,
    count: usize,
    master_seed: u64,
) -> Result<Vec<NkLandscape>> {
    let drawn: Vec<(NkLandscape, u32)> = (0..count as u32)
        .into_par_iter()
        .map(|m| {
            let mut attempt = 0u32;
            loop {
                let params = NkParams::new(n, k, landscape_seed(master_seed, m, attempt))?;
                let mut landscape = NkLandscape::generate(params)?;
                match landscape.find_global_maximum() {
                    Ok(_) => return Ok((landscape, attempt)),
                    Err(e @ Error::DegenerateLandscape { .. }) => {
                        warn!("landscape {m} attempt {attempt} rejected: {e}");
                        if attempt + 1 >= MAX_ATTEMPTS {
                            return Err(e);
                        }
                        attempt += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
        })
        .collect::<Result<_>>()?;
    let regenerated: usize = drawn.iter().map(|(_, a)| *a as usize).sum();
    if regenerated as f64 > MAX_REGENERATION_FRACTION * count as f64 {
        return Err(Error::TooManyRegenerations {
            regenerated,
            landscapes: count,
        });
    }
    Ok(drawn.into_iter().map(|(l, _)| l).collect())
}

/// Runs every `(m, r)` search of `spec` against pre-built landscapes.
pub fn run_on_landscapes(
    landscapes: &[NkLandscape],
    spec: &EnsembleSpec,
) -> Result<Vec<SearchOutcome>> {
    spec.validate()?;
    if landscapes.len() != spec.landscapes {
        return Err(Error::InvalidParams(format!(
            "spec wants {} landscapes, got {}",
            spec.landscapes,
            landscapes.len()
        )));
    }
    let runs = spec.runs_per_landscape;
    (0..spec.total_runs())
        .into_par_iter()
        .map(|idx| {
            let m = idx / runs;
            let r = idx % runs;
            let seed = run_seed(spec.master_seed, m as u32, r as u32);
            run_search(&landscapes[m], &spec.search_config(seed))
        })
        .collect()
}

/// Generates the ensemble's landscapes and runs all searches on them.
///
/// Unlike [`aggregate`], an all-censored ensemble is reported with NaN means
/// rather than as an error.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    spec.validate()?;
    let landscapes = prepare_landscapes(spec.n, spec.k, spec.landscapes, spec.master_seed)?;
    Ok(summarize(&run_on_landscapes(&landscapes, spec)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    P,
    L,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub base: EnsembleSpec,
}

impl SweepSpec {
    pub fn point(&self, value: f64) -> EnsembleSpec {
        let mut spec = self.base;
        match self.axis {
            SweepAxis::P => spec.p = value,
            SweepAxis::L => spec.l = value as usize,
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidParams(
                "sweep needs at least one value".into(),
            ));
        }
        for &v in &self.values {
            if self.axis == SweepAxis::L && (v.fract() != 0.0 || v < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "l sweep value {v} is not a positive integer"
                )));
            }
            self.point(v).validate()?;
        }
        Ok(())
    }
}

/// One ensemble per axis value, in input order, all on the same landscapes.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<(f64, EnsembleResult)>> {
    spec.validate()?;
    let base = &spec.base;
    let landscapes = prepare_landscapes(base.n, base.k, base.landscapes, base.master_seed)?;
    spec.values
        .iter()
        .map(|&v| {
            let outcomes = run_on_landscapes(&landscapes, &spec.point(v))?;
            Ok((v, summarize(&outcomes)))
        })
        .collect()
}

/// Pearson correlation between `fitness(x)` and `fitness(x with site i
/// flipped)` with the landscape drawn at random as well: `samples` draws of
/// `(x, i)` spread evenly over `landscapes` ensemble members. This is the
/// quantity [`crate::theoretical_local_correlation`] gives in closed form.
pub fn ensemble_local_correlation(
    n: usize,
    k: usize,
    landscapes: usize,
    samples: usize,
    master_seed: u64,
) -> Result<f64> {
    if landscapes == 0 || landscapes > u32::MAX as usize || samples < landscapes {
        return Err(Error::InvalidParams(format!(
            "need 1 <= landscapes ({landscapes}) <= samples ({samples})"
        )));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(master_seed);
    let mut moments = CoMoments::default();
    for m in 0..landscapes {
        let params = NkParams::new(n, k, landscape_seed(master_seed, m as u32, 0))?;
        let share = samples / landscapes + usize::from(m < samples % landscapes);
        NkLandscape::generate(params)?.sample_flip_pairs(share, &mut rng, &mut moments);
    }
    moments.correlation()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub mean: f64,
    pub min: u64,
    pub max: u64,
    pub counts: Vec<u64>,
}

impl Census {
    /// Standard error of the mean count.
    pub fn stderr(&self) -> f64 {
        let values: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        mean_and_stderr(&values).1
    }
}

/// Local-maxima counts of `count` landscapes drawn from the ensemble seeds.
pub fn landscape_census(n: usize, k: usize, count: usize, master_seed: u64) -> Result<Census> {
    if count < 1 {
        return Err(Error::InvalidParams(
            "census needs at least one landscape".into(),
        ));
    }
    if count > u32::MAX as usize {
        return Err(Error::InvalidParams("census too large".into()));
    }
    NkParams::new(n, k, 0)?;
    let counts: Vec<u64> = (0..count as u32)
        .into_par_iter()
        .map(|m| {
            let params = NkParams::new(n, k, landscape_seed(master_seed, m, 0))?;
            Ok(NkLandscape::generate(params)?.count_local_maxima())
        })
        .collect::<Result<_>>()?;
    Ok(Census {
        mean: counts.iter().sum::<u64>() as f64 / count as f64,
        min: *counts.iter().min().unwrap_or(&0),
        max: *counts.iter().max().unwrap_or(&0),
        counts,
    })
}
