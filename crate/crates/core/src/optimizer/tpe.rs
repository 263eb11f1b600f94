//! Univariate Tree-structured Parzen Estimator.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::space::{Dim, ParamSpace, Params};
use super::Trial;
use crate::error::Result;
use crate::metrics::stats::quantile_sorted;

/// Kernel bandwidth never drops below this fraction of a dimension's range.
pub const BANDWIDTH_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TpeConfig {
    pub gamma: f64,
    pub n_candidates: usize,
    pub n_startup: usize,
    pub seed: u64,
}

impl Default for TpeConfig {
    fn default() -> Self {
        Self {
            gamma: 0.25,
            n_candidates: 24,
            n_startup: 10,
            seed: 0,
        }
    }
}

/// Gaussian-kernel density in search coordinates, mixed with a uniform
/// prior of weight `1 / (n + 1)` so it is positive over the whole range.
/// The Scott bandwidth uses `min(sd, IQR / 1.349)` as the spread, so a few
/// far outliers do not blur a tight cluster.
struct Parzen {
    centers: Vec<f64>,
    bandwidth: f64,
    lo: f64,
    hi: f64,
}

impl Parzen {
    fn fit(centers: Vec<f64>, lo: f64, hi: f64) -> Self {
        let range = hi - lo;
        let n = centers.len() as f64;
        let scott = if centers.len() > 1 {
            let m = centers.iter().sum::<f64>() / n;
            let sd = (centers.iter().map(|c| (c - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            let mut sorted = centers.clone();
            sorted.sort_by(f64::total_cmp);
            let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
            let spread = if iqr > 0.0 { sd.min(iqr / 1.349) } else { sd };
            1.06 * spread * n.powf(-0.2)
        } else {
            0.0
        };
        Self {
            centers,
            bandwidth: scott.max(BANDWIDTH_FLOOR * range),
            lo,
            hi,
        }
    }

    fn prior_weight(&self) -> f64 {
        1.0 / (self.centers.len() as f64 + 1.0)
    }

    fn pdf(&self, x: f64) -> f64 {
        let w = self.prior_weight();
        let prior = w / (self.hi - self.lo);
        if self.centers.is_empty() {
            return prior;
        }
        let h = self.bandwidth;
        let norm = (1.0 - w) / (self.centers.len() as f64 * h * (2.0 * PI).sqrt());
        prior
            + norm
                * self
                    .centers
                    .iter()
                    .map(|c| (-0.5 * ((x - c) / h).powi(2)).exp())
                    .sum::<f64>()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.centers.is_empty() || rng.random::<f64>() < self.prior_weight() {
            return rng.random_range(self.lo..self.hi);
        }
        let c = self.centers[rng.random_range(0..self.centers.len())];
        let kernel = Normal::new(c, self.bandwidth).unwrap();
        for _ in 0..64 {
            let x = kernel.sample(rng);
            if (self.lo..=self.hi).contains(&x) {
                return x;
            }
        }
        c.clamp(self.lo, self.hi)
    }
}

/// Proposes the next parameter set given the trials so far.
///
/// Until `n_startup` trials exist the draw is uniform. Afterwards the top
/// `ceil(gamma * n)` trials form the "good" set; `n_candidates` draws from its
/// per-dimension densities are ranked by the good/bad density ratio.
pub fn suggest(history: &[Trial], space: &ParamSpace, config: &TpeConfig) -> Result<Params> {
    space.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    if history.len() < config.n_startup.max(1) {
        return Ok(space.sample(&mut rng));
    }
    let mut order: Vec<&Trial> = history.iter().collect();
    order.sort_by(|a, b| b.objective.total_cmp(&a.objective));
    let n_good = ((config.gamma * history.len() as f64).ceil() as usize).clamp(1, history.len());
    let (good, bad) = order.split_at(n_good);

    let models: Vec<(&String, &Dim, Parzen, Parzen)> = space
        .dims
        .iter()
        .map(|(name, dim)| {
            let (lo, hi) = dim.internal_bounds();
            let pts = |set: &[&Trial]| -> Vec<f64> {
                set.iter()
                    .filter_map(|t| t.params.get(name).map(|&v| dim.warp(v)))
                    .collect()
            };
            (name, dim, Parzen::fit(pts(good), lo, hi), Parzen::fit(pts(bad), lo, hi))
        })
        .collect();

    let mut best: Option<(f64, Params)> = None;
    for _ in 0..config.n_candidates.max(1) {
        let mut params = Params::new();
        let mut score = 0.0;
        for (name, dim, l, g) in &models {
            let value = dim.unwarp(l.sample(&mut rng));
            let u = dim.warp(value);
            score += l.pdf(u).ln() - g.pdf(u).ln();
            params.insert((*name).clone(), value);
        }
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, params));
        }
    }
    Ok(best.expect("at least one candidate").1)
}
