//! A single monitor-supervised search run.
//!
//! `L` peripheral agents hold binary strings. A central monitor evaluates them
//! and displays the currently fittest one. Each update picks a target agent
//! uniformly; with probability `p` it copies one of the bits where it differs
//! from the displayed string, otherwise it flips a uniformly chosen bit. An
//! agent identical to the display always flips a random bit. Time advances by
//! `1/L` per update and the run halts when any agent holds the global maximum.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::genotype::{check_len, low_mask, Genotype};
use crate::landscape::NkLandscape;
use crate::seed::{below, coin, coin_threshold, run_rngs};

/// Default censoring cap on the computational cost.
pub const DEFAULT_MAX_COST: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Number of peripheral agents `L`.
    pub l: usize,
    /// Feedback strength: probability that an update copies from the monitor.
    pub p: f64,
    /// Runs still searching once `cost` reaches this value are censored.
    pub max_cost: f64,
    pub run_seed: u64,
}

impl SearchConfig {
    pub fn new(l: usize, p: f64, max_cost: f64, run_seed: u64) -> Result<Self> {
        let config = SearchConfig {
            l,
            p,
            max_cost,
            run_seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 1 || self.l > u32::MAX as usize {
            return Err(Error::InvalidParams(format!(
                "l = {} outside [1, 2^32)",
                self.l
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParams(format!(
                "p = {} outside [0, 1]",
                self.p
            )));
        }
        if self.max_cost.is_nan() || self.max_cost <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "max_cost = {} must be > 0",
                self.max_cost
            )));
        }
        Ok(())
    }
}

/// Normalized Hamming distance: the fraction of sites where `a` and `b` differ.
pub fn hamming_distance(a: &Genotype, b: &Genotype) -> Result<f64> {
    Ok(f64::from(a.differing_sites(b)?) / a.len() as f64)
}

/// Agents, their cached fitnesses and the monitor display.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentPool {
    strings: Vec<Genotype>,
    fitnesses: Vec<f64>,
    monitor_index: usize,
    monitor_string: Genotype,
}

impl AgentPool {
    /// Pool with explicit strings; the monitor is set to the fittest.
    pub fn from_strings(landscape: &NkLandscape, strings: Vec<Genotype>) -> Result<Self> {
        if strings.is_empty() {
            return Err(Error::InvalidParams("pool needs at least one agent".into()));
        }
        let fitnesses = strings
            .iter()
            .map(|g| landscape.fitness(g))
            .collect::<Result<Vec<_>>>()?;
        let mut pool = AgentPool {
            monitor_string: strings[0],
            strings,
            fitnesses,
            monitor_index: 0,
        };
        pool.rescan_monitor();
        Ok(pool)
    }

    /// `l` strings with independent fair-coin bits.
    pub fn random<R: Rng + ?Sized>(landscape: &NkLandscape, l: usize, rng: &mut R) -> Result<Self> {
        let n = landscape.n();
        let strings = (0..l)
            .map(|_| Genotype::from_mask_unchecked(rng.next_u32() & low_mask(n), n))
            .collect();
        Self::from_strings(landscape, strings)
    }

    /// Initial pool of a run, drawn from the run's initialization substream.
    pub fn init(landscape: &NkLandscape, config: &SearchConfig) -> Result<Self> {
        config.validate()?;
        let (mut init_rng, _) = run_rngs(config.run_seed);
        Self::random(landscape, config.l, &mut init_rng)
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn strings(&self) -> &[Genotype] {
        &self.strings
    }

    pub fn fitnesses(&self) -> &[f64] {
        &self.fitnesses
    }

    pub fn monitor_index(&self) -> usize {
        self.monitor_index
    }

    pub fn monitor_string(&self) -> &Genotype {
        &self.monitor_string
    }

    pub fn contains(&self, g: &Genotype) -> bool {
        self.strings.contains(g)
    }

    /// Full O(L) argmax over cached fitnesses, lowest index on ties.
    /// Returns whether the displayed string changed.
    pub fn rescan_monitor(&mut self) -> bool {
        let mut best = 0;
        for (a, &f) in self.fitnesses.iter().enumerate().skip(1) {
            if f > self.fitnesses[best] {
                best = a;
            }
        }
        self.monitor_index = best;
        self.refresh_display()
    }

    fn refresh_display(&mut self) -> bool {
        let shown = self.strings[self.monitor_index];
        let changed = shown != self.monitor_string;
        self.monitor_string = shown;
        changed
    }

    // Equivalent to `rescan_monitor` when only agent `a` changed since the
    // last rescan: the full scan is needed only if the monitor's own agent got
    // worse.
    #[inline]
    fn monitor_after_update(&mut self, a: usize, previous: f64) -> bool {
        let m = self.monitor_index;
        let fa = self.fitnesses[a];
        if a == m {
            if fa < previous {
                return self.rescan_monitor();
            }
        } else {
            let fm = self.fitnesses[m];
            if fa > fm || (fa == fm && a < m) {
                self.monitor_index = a;
            }
        }
        self.refresh_display()
    }

    /// One update of agent `target`. The branch coin is always drawn first,
    /// then the site choice. Returns whether the display changed.
    pub fn update_target<R: RngCore + ?Sized>(
        &mut self,
        landscape: &NkLandscape,
        target: usize,
        p: f64,
        rng: &mut R,
    ) -> bool {
        self.update_with_threshold(landscape, target, coin_threshold(p), rng)
    }

    #[inline]
    fn update_with_threshold<R: RngCore + ?Sized>(
        &mut self,
        landscape: &NkLandscape,
        target: usize,
        threshold: u64,
        rng: &mut R,
    ) -> bool {
        let n = landscape.n();
        let copy = coin(rng, threshold);
        let current = self.strings[target];
        let diff = current.mask() ^ self.monitor_string.mask();
        let site = if copy && diff != 0 {
            let pick = below(rng, diff.count_ones());
            n - 1 - nth_set_bit(diff, pick) as usize
        } else {
            below(rng, n as u32) as usize
        };
        let previous = self.fitnesses[target];
        self.fitnesses[target] = landscape.fitness_after_flip_mask(current.mask(), previous, site);
        self.strings[target].flip_in_place(site);
        self.monitor_after_update(target, previous)
    }

    /// Mean normalized distance over all agent pairs.
    pub fn mean_pairwise_distance(&self) -> Result<f64> {
        let l = self.strings.len();
        if l < 2 {
            return Err(Error::TooFewAgents(l));
        }
        let mut differing = 0u64;
        for (a, x) in self.strings.iter().enumerate() {
            for y in &self.strings[a + 1..] {
                differing += u64::from((x.mask() ^ y.mask()).count_ones());
            }
        }
        let pairs = (l * (l - 1) / 2) as f64;
        Ok(differing as f64 / (pairs * self.strings[0].len() as f64))
    }

    /// Mean normalized distance from each agent to `reference`.
    pub fn mean_distance_to(&self, reference: &Genotype) -> Result<f64> {
        check_len(reference.len(), self.strings[0].len())?;
        let differing: u64 = self
            .strings
            .iter()
            .map(|g| u64::from((g.mask() ^ reference.mask()).count_ones()))
            .sum();
        Ok(differing as f64 / (self.strings.len() * reference.len()) as f64)
    }
}

/// Bit position of the `index`-th set bit of `word`, counting from the least
/// significant end.
#[inline]
fn nth_set_bit(mut word: u32, index: u32) -> u32 {
    for _ in 0..index {
        word &= word - 1;
    }
    word.trailing_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    /// Agent updates performed.
    pub updates: u64,
    /// Halting time in sweeps, `updates / L`.
    pub t_star: f64,
    /// Computational cost `updates / 2^N`.
    pub cost: f64,
    /// False when the run was censored at `max_cost`.
    pub halted: bool,
    /// Mean pairwise distance of the final pool; `None` when `L = 1`.
    pub final_mean_pairwise_distance: Option<f64>,
    pub final_mean_distance_to_optimum: f64,
}

/// Runs a search from the pool drawn by the run's initialization substream.
pub fn run_search(landscape: &NkLandscape, config: &SearchConfig) -> Result<SearchOutcome> {
    let pool = AgentPool::init(landscape, config)?;
    run_search_from(landscape, config, pool)
}

/// Runs a search from an explicit starting pool; dynamics use the run's
/// dynamics substream.
pub fn run_search_from(
    landscape: &NkLandscape,
    config: &SearchConfig,
    mut pool: AgentPool,
) -> Result<SearchOutcome> {
    config.validate()?;
    let target = landscape.optimum().ok_or(Error::MissingOptimum)?.genotype;
    check_len(landscape.n(), pool.strings[0].len())?;
    let (_, mut rng) = run_rngs(config.run_seed);
    let states = landscape.params().state_count() as f64;
    let cap = (config.max_cost * states).ceil().min(u64::MAX as f64) as u64;
    let l = pool.len();

    let threshold = coin_threshold(config.p);
    let mut updates = 0u64;
    let mut halted = pool.contains(&target);
    if threshold == 0 {
        // Blind search never consults the display, so fitness bookkeeping is
        // deferred to the end. The coin is still drawn to keep the stream
        // aligned with `update_target`.
        let n = landscape.n() as u32;
        while !halted && updates < cap {
            let agent = below(&mut rng, l as u32) as usize;
            rng.next_u64();
            let site = below(&mut rng, n) as usize;
            pool.strings[agent].flip_in_place(site);
            updates += 1;
            halted = pool.strings[agent] == target;
        }
        for (f, g) in pool.fitnesses.iter_mut().zip(&pool.strings) {
            *f = landscape.fitness_of_mask(g.mask());
        }
        pool.rescan_monitor();
    } else {
        while !halted && updates < cap {
            let agent = below(&mut rng, l as u32) as usize;
            pool.update_with_threshold(landscape, agent, threshold, &mut rng);
            updates += 1;
            halted = pool.strings[agent] == target;
        }
    }

    Ok(SearchOutcome {
        updates,
        t_star: updates as f64 / l as f64,
        cost: updates as f64 / states,
        halted,
        final_mean_pairwise_distance: pool.mean_pairwise_distance().ok(),
        final_mean_distance_to_optimum: pool.mean_distance_to(&target)?,
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus as TestRng;

    use super::*;
    use crate::landscape::NkParams;

    fn landscape(n: usize, k: usize, seed: u64) -> NkLandscape {
        let mut l = NkLandscape::generate(NkParams::new(n, k, seed).unwrap()).unwrap();
        l.find_global_maximum().unwrap();
        l
    }

    fn g(s: &str) -> Genotype {
        s.parse().unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(0, 0.5, 1.0, 0).is_err());
        assert!(SearchConfig::new(1, 1.5, 1.0, 0).is_err());
        assert!(SearchConfig::new(1, -0.1, 1.0, 0).is_err());
        assert!(SearchConfig::new(1, 0.5, 0.0, 0).is_err());
        assert!(SearchConfig::new(1, 0.5, f64::NAN, 0).is_err());
        assert!(SearchConfig::new(20, 1.0, 1.0, 0).is_ok());
    }

    #[test]
    fn hamming_cases() {
        let x = g("1011001110001111");
        assert_eq!(hamming_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(hamming_distance(&x, &x.complement()).unwrap(), 1.0);
        let y = x.flipped(0).flipped(3).flipped(9).flipped(15);
        assert_eq!(hamming_distance(&x, &y).unwrap(), 0.25);
        assert!(hamming_distance(&x, &g("101")).is_err());
    }

    #[test]
    fn pairwise_distance_cases() {
        let l = landscape(6, 1, 1);
        let same = AgentPool::from_strings(&l, vec![g("010101"); 5]).unwrap();
        assert_eq!(same.mean_pairwise_distance().unwrap(), 0.0);
        let pair = AgentPool::from_strings(&l, vec![g("010101"), g("110100")]).unwrap();
        assert_eq!(
            pair.mean_pairwise_distance().unwrap(),
            hamming_distance(&g("010101"), &g("110100")).unwrap()
        );
        let single = AgentPool::from_strings(&l, vec![g("010101")]).unwrap();
        assert!(matches!(
            single.mean_pairwise_distance(),
            Err(Error::TooFewAgents(1))
        ));
    }

    #[test]
    fn distance_to_reference_cases() {
        let l = landscape(6, 1, 1);
        let r = g("111000");
        let copies = AgentPool::from_strings(&l, vec![r; 4]).unwrap();
        assert_eq!(copies.mean_distance_to(&r).unwrap(), 0.0);
        let single = AgentPool::from_strings(&l, vec![g("011001")]).unwrap();
        assert_eq!(
            single.mean_distance_to(&r).unwrap(),
            hamming_distance(&g("011001"), &r).unwrap()
        );
        assert!(copies.mean_distance_to(&g("111")).is_err());
    }

    #[test]
    fn init_is_deterministic_and_monitor_is_fittest() {
        let l = landscape(12, 3, 4);
        let config = SearchConfig::new(20, 0.3, 10.0, 77).unwrap();
        let a = AgentPool::init(&l, &config).unwrap();
        let b = AgentPool::init(&l, &config).unwrap();
        assert_eq!(a, b);
        let best = a.fitnesses()[a.monitor_index()];
        assert!(a.fitnesses().iter().all(|&f| f <= best));
        assert_eq!(a.monitor_string(), &a.strings()[a.monitor_index()]);
    }

    #[test]
    fn rescan_without_change_reports_false() {
        let l = landscape(8, 2, 2);
        let mut rng = TestRng::seed_from_u64(3);
        let mut pool = AgentPool::random(&l, 10, &mut rng).unwrap();
        assert!(!pool.rescan_monitor());
    }

    #[test]
    fn rescan_breaks_ties_by_lowest_index() {
        let params = NkParams::new(4, 0, 0).unwrap();
        let rows = vec![vec![0.25, 0.75]; 4];
        let l = NkLandscape::from_rows(params, rows).unwrap();
        let mut strings = vec![g("0000"); 10];
        strings[3] = g("1100");
        strings[7] = g("0011");
        let mut pool = AgentPool::from_strings(&l, strings).unwrap();
        assert_eq!(pool.monitor_index(), 3);
        pool.fitnesses[5] = 0.95;
        assert!(pool.rescan_monitor());
        assert_eq!(pool.monitor_index(), 5);
    }

    #[test]
    fn copy_step_picks_a_differing_bit() {
        let params = NkParams::new(4, 0, 0).unwrap();
        // make (1,0,1,0) the fittest so it is displayed
        let rows = vec![
            vec![0.1, 0.9],
            vec![0.9, 0.1],
            vec![0.1, 0.9],
            vec![0.9, 0.1],
        ];
        let l = NkLandscape::from_rows(params, rows).unwrap();
        let mut counts = std::collections::HashMap::new();
        let mut rng = TestRng::seed_from_u64(9);
        for _ in 0..4000 {
            let mut pool = AgentPool::from_strings(&l, vec![g("0000"), g("1010")]).unwrap();
            assert_eq!(pool.monitor_string(), &g("1010"));
            pool.update_target(&l, 0, 1.0, &mut rng);
            *counts.entry(pool.strings()[0].to_string()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 2);
        let a = counts["1000"] as f64 / 4000.0;
        assert!((a - 0.5).abs() < 0.04, "{counts:?}");
        assert!(counts.contains_key("0010"));
    }

    #[test]
    fn identical_to_display_flips_even_at_p1() {
        let l = landscape(8, 2, 5);
        let mut rng = TestRng::seed_from_u64(1);
        let start = g("10110010");
        for _ in 0..200 {
            let mut pool = AgentPool::from_strings(&l, vec![start; 3]).unwrap();
            pool.update_target(&l, 1, 1.0, &mut rng);
            assert_eq!(
                hamming_distance(&pool.strings()[1], &start).unwrap(),
                1.0 / 8.0
            );
        }
    }

    #[test]
    fn halt_at_initialization() {
        let l = landscape(10, 2, 6);
        let opt = l.optimum().unwrap().genotype;
        let pool =
            AgentPool::from_strings(&l, vec![opt.complement(), opt, opt.flipped(2)]).unwrap();
        let config = SearchConfig::new(3, 0.5, 5.0, 1).unwrap();
        let out = run_search_from(&l, &config, pool).unwrap();
        assert!(out.halted);
        assert_eq!(out.updates, 0);
        assert_eq!(out.t_star, 0.0);
        assert_eq!(out.cost, 0.0);
    }

    #[test]
    fn missing_optimum_is_an_error() {
        let l = NkLandscape::generate(NkParams::new(6, 1, 1).unwrap()).unwrap();
        let config = SearchConfig::new(3, 0.5, 5.0, 1).unwrap();
        assert!(matches!(
            run_search(&l, &config),
            Err(Error::MissingOptimum)
        ));
    }

    #[test]
    fn censoring_stops_at_the_cap() {
        let l = landscape(12, 5, 3);
        let config = SearchConfig::new(4, 0.0, 0.01, 2).unwrap();
        let out = run_search(&l, &config).unwrap();
        if !out.halted {
            assert_eq!(out.updates, (0.01f64 * 4096.0).ceil() as u64);
            assert!(out.cost >= 0.01);
        }
    }

    #[test]
    fn nth_set_bit_walks_from_lsb() {
        assert_eq!(nth_set_bit(0b1011_0100, 0), 2);
        assert_eq!(nth_set_bit(0b1011_0100, 1), 4);
        assert_eq!(nth_set_bit(0b1011_0100, 3), 7);
    }
}
