#![allow(dead_code)]

use nk_monitor::{Genotype, NkLandscape, NkParams};

/// Site values `x_1 .. x_n` of a mask, read one character at a time from its
/// printed form.
pub fn sites(g: &Genotype) -> Vec<u8> {
    g.to_string().bytes().map(|b| b - b'0').collect()
}

/// Fitness recomputed straight from the tables: each contribution reads the
/// cyclic window `x_i .. x_{i+k}` with `x_i` as the high bit.
pub fn naive_fitness(rows: &[Vec<f64>], k: usize, x: &[u8]) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let mut column = 0usize;
        for j in 0..=k {
            column = column * 2 + x[(i + j) % n] as usize;
        }
        total += row[column];
    }
    total / n as f64
}

pub fn table(landscape: &NkLandscape) -> Vec<Vec<f64>> {
    landscape.rows().map(|r| r.to_vec()).collect()
}

pub fn all_states(n: usize) -> impl Iterator<Item = Genotype> {
    (0..1u32 << n).map(move |m| Genotype::from_mask(m, n).unwrap())
}

pub fn generated(n: usize, k: usize, seed: u64) -> NkLandscape {
    let mut l = NkLandscape::generate(NkParams::new(n, k, seed).unwrap()).unwrap();
    l.find_global_maximum().unwrap();
    l
}
