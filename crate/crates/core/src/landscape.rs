//! NK fitness landscapes.
//!
//! Site `i` contributes `phi_i(x_i, x_{i+1}, .., x_{i+k})` with indices taken
//! modulo `n`; the fitness of a string is the mean of the `n` contributions.
//! Each contribution table row holds `2^(k+1)` entries. The column of a
//! neighborhood packs `x_i` as its most significant bit and `x_{i+k}` as the
//! least significant one ([`PACKING`]).
//!
//! Sites are 0-based throughout the API.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{check_site, Error, Result};
use crate::genotype::{check_len, low_mask, site_bit, Genotype, MAX_N};
use crate::seed::{below, landscape_rng, unit_f64};

/// Tag for the neighborhood bit-packing convention, recorded in landscape files.
pub const PACKING: &str = "first-site-msb";

/// Above this length, local-maxima counting streams over states instead of
/// materializing a `2^n` fitness table.
const TABLE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NkParams {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
}

impl NkParams {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self> {
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::InvalidParams(format!(
                "n = {n} violates 1 <= n <= {MAX_N}"
            )));
        }
        if k > n - 1 {
            return Err(Error::InvalidParams(format!(
                "k = {k} violates 0 <= k <= n - 1 = {}",
                n - 1
            )));
        }
        Ok(NkParams { n, k, seed })
    }

    pub fn row_len(&self) -> usize {
        1 << (self.k + 1)
    }

    pub fn state_count(&self) -> u64 {
        1 << self.n
    }
}

/// Fittest genotype of a landscape together with its fitness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalOptimum {
    pub genotype: Genotype,
    pub fitness: f64,
}

#[derive(Debug, Clone)]
pub struct NkLandscape {
    params: NkParams,
    table: Vec<f64>,
    optimum: Option<GlobalOptimum>,
    maxima_count: Option<u64>,
}

impl NkLandscape {
    /// Draws every table entry uniformly from `[0, 1)`, row by row, from the
    /// `ChaCha20` stream seeded with `params.seed`.
    pub fn generate(params: NkParams) -> Result<Self> {
        let params = NkParams::new(params.n, params.k, params.seed)?;
        let mut rng = landscape_rng(params.seed);
        let table = (0..params.n * params.row_len())
            .map(|_| unit_f64(&mut rng))
            .collect();
        Ok(NkLandscape {
            params,
            table,
            optimum: None,
            maxima_count: None,
        })
    }

    /// Builds a landscape from explicit rows, one per site.
    pub fn from_rows(params: NkParams, rows: Vec<Vec<f64>>) -> Result<Self> {
        let params = NkParams::new(params.n, params.k, params.seed)?;
        if rows.len() != params.n {
            return Err(Error::InvalidParams(format!(
                "expected {} table rows, got {}",
                params.n,
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != params.row_len() {
                return Err(Error::InvalidParams(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    params.row_len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !(0.0..1.0).contains(*v)) {
                return Err(Error::InvalidParams(format!(
                    "row {i} holds {bad}, outside [0, 1)"
                )));
            }
        }
        let table = rows.concat();
        Ok(NkLandscape {
            params,
            table,
            optimum: None,
            maxima_count: None,
        })
    }

    pub fn params(&self) -> &NkParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn row(&self, site: usize) -> &[f64] {
        let len = self.params.row_len();
        &self.table[site * len..(site + 1) * len]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks_exact(self.params.row_len())
    }

    pub fn optimum(&self) -> Option<&GlobalOptimum> {
        self.optimum.as_ref()
    }

    pub fn maxima_count(&self) -> Option<u64> {
        self.maxima_count
    }

    /// Table column used by `site` for genotype `g`.
    pub fn neighborhood_index(&self, g: &Genotype, site: usize) -> Result<usize> {
        check_len(self.n(), g.len())?;
        check_site(site, self.n())?;
        Ok(self.column(g.mask(), site))
    }

    // The mask is duplicated into a 2n-bit word so the cyclic window
    // x_site .. x_{site+k} is a contiguous run of bits.
    #[inline(always)]
    fn column(&self, bits: u32, site: usize) -> usize {
        let n = self.params.n;
        let k = self.params.k;
        let word = (u64::from(bits) << n) | u64::from(bits);
        let shift = 2 * n - 1 - site - k;
        ((word >> shift) as usize) & ((1 << (k + 1)) - 1)
    }

    #[inline(always)]
    fn contribution(&self, bits: u32, site: usize) -> f64 {
        let row_len = 1 << (self.params.k + 1);
        self.table[site * row_len + self.column(bits, site)]
    }

    pub fn fitness(&self, g: &Genotype) -> Result<f64> {
        check_len(self.n(), g.len())?;
        Ok(self.fitness_of_mask(g.mask()))
    }

    /// Mean contribution, summed in site order.
    #[inline]
    pub(crate) fn fitness_of_mask(&self, bits: u32) -> f64 {
        let mut sum = 0.0;
        for site in 0..self.params.n {
            sum += self.contribution(bits, site);
        }
        sum / self.params.n as f64
    }

    /// Fitness of `g` with `site` flipped, given `current_fitness = fitness(g)`.
    /// Only the `k + 1` contributions whose window covers `site` are touched.
    pub fn fitness_after_flip(
        &self,
        g: &Genotype,
        current_fitness: f64,
        site: usize,
    ) -> Result<f64> {
        check_len(self.n(), g.len())?;
        check_site(site, self.n())?;
        Ok(self.fitness_after_flip_mask(g.mask(), current_fitness, site))
    }

    // Reads the 2k+1 sites centred on `site` into one word `w`, with
    // x_{site+k} as bit 0. The column of contribution `site - offset` is then
    // `w >> offset`, and the flipped site sits at bit `k - offset` of it.
    #[inline]
    pub(crate) fn fitness_after_flip_mask(&self, bits: u32, current: f64, site: usize) -> f64 {
        let n = self.params.n;
        let k = self.params.k;
        let row_len = 1usize << (k + 1);
        let b = u128::from(bits);
        let tripled = (b << (2 * n)) | (b << n) | b;
        let w = (tripled >> (2 * n - 1 - site - k)) as u64;
        let mut delta = 0.0;
        let mut i = site;
        for offset in 0..=k {
            let col = (w >> offset) as usize & (row_len - 1);
            let base = i * row_len;
            delta += self.table[base + (col ^ (1 << (k - offset)))] - self.table[base + col];
            i = if i == 0 { n - 1 } else { i - 1 };
        }
        current + delta / n as f64
    }

    /// Exhaustive scan for the fittest genotype, cached on success.
    ///
    /// Fails with [`Error::DegenerateLandscape`] if two genotypes share the
    /// maximum fitness.
    pub fn find_global_maximum(&mut self) -> Result<GlobalOptimum> {
        if let Some(opt) = self.optimum {
            return Ok(opt);
        }
        let opt = self.scan_global_maximum()?;
        self.optimum = Some(opt);
        Ok(opt)
    }

    fn scan_global_maximum(&self) -> Result<GlobalOptimum> {
        let n = self.n();
        let mut best_bits = 0u32;
        let mut best = f64::NEG_INFINITY;
        let mut tie: Option<u32> = None;
        for bits in 0..=low_mask(n) {
            let f = self.fitness_of_mask(bits);
            if f > best {
                best = f;
                best_bits = bits;
                tie = None;
            } else if f == best {
                tie = Some(bits);
            }
        }
        if let Some(other) = tie {
            return Err(Error::DegenerateLandscape {
                first: Genotype::from_mask_unchecked(best_bits, n).to_string(),
                second: Genotype::from_mask_unchecked(other, n).to_string(),
                fitness: best,
            });
        }
        Ok(GlobalOptimum {
            genotype: Genotype::from_mask_unchecked(best_bits, n),
            fitness: best,
        })
    }

    /// Whether `g` is strictly fitter than each of its `n` one-flip neighbors.
    pub fn is_local_maximum(&self, g: &Genotype) -> Result<bool> {
        check_len(self.n(), g.len())?;
        Ok(self.is_local_max_mask(g.mask()))
    }

    fn is_local_max_mask(&self, bits: u32) -> bool {
        let n = self.n();
        let f = self.fitness_of_mask(bits);
        (0..n).all(|site| f > self.fitness_of_mask(bits ^ site_bit(site, n)))
    }

    /// Counts states strictly fitter than all `n` one-flip neighbors, cached.
    pub fn count_local_maxima(&mut self) -> u64 {
        if let Some(count) = self.maxima_count {
            return count;
        }
        let count = if self.n() <= TABLE_LIMIT {
            self.count_with_table()
        } else {
            (0..=low_mask(self.n()))
                .filter(|&bits| self.is_local_max_mask(bits))
                .count() as u64
        };
        self.maxima_count = Some(count);
        count
    }

    fn count_with_table(&self) -> u64 {
        let n = self.n();
        let values: Vec<f64> = (0..=low_mask(n))
            .map(|bits| self.fitness_of_mask(bits))
            .collect();
        values
            .iter()
            .enumerate()
            .filter(|&(state, &f)| (0..n).all(|site| f > values[state ^ (1usize << site)]))
            .count() as u64
    }

    /// Pearson correlation between `fitness(x)` and `fitness(x with site i
    /// flipped)` over `samples` uniform draws of `(x, i)` on this landscape.
    ///
    /// Within one fixed landscape this converges to
    /// `(n-k-1)/n - (k+1) / (n (2^(k+1) - 1))` on average, slightly below
    /// [`theoretical_local_correlation`], which describes landscapes drawn at
    /// random; see [`crate::experiment::ensemble_local_correlation`].
    pub fn empirical_local_correlation(&self, samples: usize, seed: u64) -> Result<f64> {
        if samples == 0 {
            return Err(Error::InvalidParams("samples must be >= 1".into()));
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut moments = CoMoments::default();
        self.sample_flip_pairs(samples, &mut rng, &mut moments);
        moments.correlation()
    }

    pub(crate) fn sample_flip_pairs<R: RngCore>(
        &self,
        samples: usize,
        rng: &mut R,
        moments: &mut CoMoments,
    ) {
        let n = self.n();
        for _ in 0..samples {
            let bits = rng.next_u32_masked(n);
            let site = below(rng, n as u32) as usize;
            moments.push(
                self.fitness_of_mask(bits),
                self.fitness_of_mask(bits ^ site_bit(site, n)),
            );
        }
    }
}

/// Local fitness correlation implied by `(n, k)`: `1 - (k + 1) / n`.
pub fn theoretical_local_correlation(params: &NkParams) -> f64 {
    1.0 - (params.k + 1) as f64 / params.n as f64
}

/// Running means and co-moments (Welford).
#[derive(Debug, Default)]
pub(crate) struct CoMoments {
    count: f64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    cross: f64,
}

impl CoMoments {
    pub(crate) fn push(&mut self, x: f64, y: f64) {
        self.count += 1.0;
        let dx = x - self.mean_x;
        self.mean_x += dx / self.count;
        let dy = y - self.mean_y;
        self.mean_y += dy / self.count;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.cross += dx * (y - self.mean_y);
    }

    pub(crate) fn correlation(&self) -> Result<f64> {
        if self.m2_x <= 0.0 || self.m2_y <= 0.0 {
            return Err(Error::ZeroVariance);
        }
        Ok(self.cross / (self.m2_x * self.m2_y).sqrt())
    }
}

trait MaskedDraw {
    fn next_u32_masked(&mut self, n: usize) -> u32;
}

impl<R: rand::RngCore> MaskedDraw for R {
    #[inline]
    fn next_u32_masked(&mut self, n: usize) -> u32 {
        self.next_u32() & low_mask(n)
    }
}
