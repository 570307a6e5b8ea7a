mod common;

use common::{all_states, generated, naive_fitness, sites, table};
use nk_monitor::landscape_file;
use nk_monitor::search::{hamming_distance, run_search, AgentPool, SearchConfig};
use nk_monitor::seed::{below, run_rngs};
use nk_monitor::{run_ensemble, EnsembleSpec, Genotype, NkLandscape, NkParams};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Reads the `row` lines of a saved landscape without going through the
/// library parser.
fn rows_from_disk(text: &str) -> (usize, Vec<Vec<f64>>) {
    let mut k = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("k") => k = Some(words.next().unwrap().parse().unwrap()),
            Some("row") => rows.push(words.map(|w| w.parse::<f64>().unwrap()).collect()),
            _ => {}
        }
    }
    (k.unwrap(), rows)
}

#[test]
fn fitness_matches_tables_read_back_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.nk");
    let landscape = NkLandscape::generate(NkParams::new(14, 4, 99).unwrap()).unwrap();
    landscape_file::save(&landscape, &path).unwrap();
    let (k, rows) = rows_from_disk(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(k, 4);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    for _ in 0..2000 {
        let g = Genotype::from_mask(rng.random::<u32>() & 0x3fff, 14).unwrap();
        let expected = naive_fitness(&rows, k, &sites(&g));
        assert!((landscape.fitness(&g).unwrap() - expected).abs() < 1e-12);
    }
}

#[test]
fn flip_update_matches_full_recompute() {
    let landscape = NkLandscape::generate(NkParams::new(16, 5, 3).unwrap()).unwrap();
    let rows = table(&landscape);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
    for _ in 0..10_000 {
        let g = Genotype::from_mask(rng.random::<u32>() & 0xffff, 16).unwrap();
        let site = rng.random_range(0..16);
        let current = landscape.fitness(&g).unwrap();
        let fast = landscape.fitness_after_flip(&g, current, site).unwrap();
        let slow = naive_fitness(&rows, 5, &sites(&g.flipped(site)));
        assert!((fast - slow).abs() < 1e-12, "{g} site {site}");
    }
}

#[test]
fn global_maximum_matches_brute_force() {
    for seed in 0..20 {
        let mut landscape = NkLandscape::generate(NkParams::new(4, 1, seed).unwrap()).unwrap();
        let rows = table(&landscape);
        let mut best = (0.0, None);
        for g in all_states(4) {
            let f = naive_fitness(&rows, 1, &sites(&g));
            if f > best.0 {
                best = (f, Some(g));
            }
        }
        let opt = landscape.find_global_maximum().unwrap();
        assert_eq!(Some(opt.genotype), best.1);
        assert_eq!(opt.fitness, landscape.fitness(&opt.genotype).unwrap());
    }
}

#[test]
fn local_maxima_match_neighbor_comparison() {
    for (n, k) in [(3, 2), (6, 1), (8, 3), (10, 9)] {
        for seed in 0..5 {
            let mut landscape = NkLandscape::generate(NkParams::new(n, k, seed).unwrap()).unwrap();
            let rows = table(&landscape);
            let f = |g: &Genotype| naive_fitness(&rows, k, &sites(g));
            let expected = all_states(n)
                .filter(|g| (0..n).all(|s| f(g) > f(&g.flipped(s))))
                .count() as u64;
            assert_eq!(landscape.count_local_maxima(), expected, "n={n} k={k}");
        }
    }
}

#[test]
fn k0_optimum_is_the_greedy_string() {
    for seed in 0..50 {
        let mut landscape = NkLandscape::generate(NkParams::new(16, 0, seed).unwrap()).unwrap();
        let greedy: Vec<u8> = landscape
            .rows()
            .map(|row| if row[0] > row[1] { 0 } else { 1 })
            .collect();
        let opt = landscape.find_global_maximum().unwrap();
        assert_eq!(opt.genotype, Genotype::from_bits(&greedy).unwrap());
        assert_eq!(landscape.count_local_maxima(), 1);
    }
}

#[test]
fn hamming_distance_counts_bits_exhaustively() {
    for n in 1..=8 {
        for a in all_states(n) {
            let xa = sites(&a);
            for b in all_states(n) {
                let count = xa.iter().zip(sites(&b)).filter(|(x, y)| **x != *y).count();
                assert_eq!(hamming_distance(&a, &b).unwrap() * n as f64, count as f64);
            }
        }
    }
}

#[test]
fn pool_distances_match_double_loops() {
    let landscape = generated(16, 3, 8);
    let config = SearchConfig::new(20, 0.3, 1.0, 17).unwrap();
    let pool = AgentPool::init(&landscape, &config).unwrap();
    let strings = pool.strings();
    let mut total = 0.0;
    for a in 0..20 {
        for b in a + 1..20 {
            total += hamming_distance(&strings[a], &strings[b]).unwrap();
        }
    }
    let pairwise = 2.0 * total / (20.0 * 19.0);
    assert!((pool.mean_pairwise_distance().unwrap() - pairwise).abs() < 1e-12);

    let reference = landscape.optimum().unwrap().genotype;
    let to_ref: f64 = strings
        .iter()
        .map(|g| hamming_distance(g, &reference).unwrap())
        .sum::<f64>()
        / 20.0;
    assert!((pool.mean_distance_to(&reference).unwrap() - to_ref).abs() < 1e-12);
}

#[test]
fn initial_pools_are_unbiased() {
    let landscape = generated(16, 2, 1);
    let mut ones = [0u32; 16];
    let pools = 10_000;
    for r in 0..pools {
        let config = SearchConfig::new(1, 0.0, 1.0, r).unwrap();
        let pool = AgentPool::init(&landscape, &config).unwrap();
        for (count, bit) in ones.iter_mut().zip(sites(&pool.strings()[0])) {
            *count += u32::from(bit);
        }
    }
    for count in ones {
        let freq = f64::from(count) / pools as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }
}

#[test]
fn blind_search_matches_step_by_step_updates() {
    let landscape = generated(8, 2, 4);
    let target = landscape.optimum().unwrap().genotype;
    for seed in 0..50 {
        let config = SearchConfig::new(5, 0.0, 50.0, seed).unwrap();
        let outcome = run_search(&landscape, &config).unwrap();

        let mut pool = AgentPool::init(&landscape, &config).unwrap();
        let (_, mut rng) = run_rngs(seed);
        let mut updates = 0u64;
        while !pool.contains(&target) {
            let agent = below(&mut rng, 5) as usize;
            pool.update_target(&landscape, agent, 0.0, &mut rng);
            updates += 1;
        }
        assert_eq!(outcome.updates, updates);
        assert!(outcome.halted);
        assert_eq!(
            outcome.final_mean_pairwise_distance,
            Some(pool.mean_pairwise_distance().unwrap())
        );
    }
}

#[test]
fn single_site_single_agent_costs_a_quarter() {
    let spec = EnsembleSpec {
        landscapes: 10,
        runs_per_landscape: 10_000,
        ..EnsembleSpec::new(1, 0, 1, 0.5, 21)
    };
    let result = run_ensemble(&spec).unwrap();
    assert_eq!(result.censored, 0);
    assert!(
        (result.mean_cost - 0.25).abs() < 3.0 * result.cost_stderr,
        "{} +- {}",
        result.mean_cost,
        result.cost_stderr
    );
}

#[test]
fn flip_correlation_within_and_across_landscapes() {
    let (n, k) = (12usize, 2usize);
    let within = (n - k - 1) as f64 / n as f64 - (k + 1) as f64 / (n * ((1 << (k + 1)) - 1)) as f64;
    let values: Vec<f64> = (0..60)
        .map(|s| {
            NkLandscape::generate(NkParams::new(n, k, s).unwrap())
                .unwrap()
                .empirical_local_correlation(100_000, s)
                .unwrap()
        })
        .collect();
    let mean = values.iter().sum::<f64>() / 60.0;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 59.0).sqrt();
    assert!(
        (mean - within).abs() < 3.0 * sd / 60f64.sqrt(),
        "{mean} vs {within}"
    );

    let pooled = nk_monitor::ensemble_local_correlation(n, k, 200, 400_000, 3).unwrap();
    assert!((pooled - 0.75).abs() < 0.01, "{pooled}");
}
