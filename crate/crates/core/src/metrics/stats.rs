//! Resampling and hypothesis-testing helpers for rating analysis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile-bootstrap confidence interval of the mean.
pub fn bootstrap_ci(values: &[f64], n_boot: usize, level: f64, seed: u64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::Empty("bootstrap of an empty sample".into()));
    }
    if n_boot < 100 {
        return Err(Error::InvalidParam(format!("n_boot {n_boot} < 100")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParam(format!("confidence level {level} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = values.len();
    let mut means: Vec<f64> = (0..n_boot)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((
        quantile_sorted(&means, tail),
        quantile_sorted(&means, 1.0 - tail),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// mean(a) > mean(b)
    Greater,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Welch's unequal-variance t-test.
pub fn welch_t_test(a: &[f64], b: &[f64], alternative: Alternative) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "t-test needs >= 2 samples per group (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let diff = mean(a) - mean(b);
    let (sa, sb) = (variance(a) / na, variance(b) / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        // Degenerate: no spread in either group.
        let p_value = match alternative {
            _ if diff == 0.0 => 1.0,
            Alternative::Greater if diff > 0.0 => 0.0,
            Alternative::Greater => 1.0,
            Alternative::TwoSided => 0.0,
        };
        let statistic = if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        return Ok(WelchTest {
            statistic,
            df: na + nb - 2.0,
            p_value,
        });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidParam(format!("t distribution: {e}")))?;
    let p_value = match alternative {
        Alternative::Greater => dist.cdf(-t),
        Alternative::TwoSided => (2.0 * dist.cdf(-t.abs())).min(1.0),
    };
    Ok(WelchTest {
        statistic: t,
        df,
        p_value,
    })
}

/// Benjamini–Hochberg step-up adjustment, returned in input order.
pub fn bh_adjust(p_values: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::PValueOutOfRange(bad));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min(p_values[i] * m as f64 / (rank + 1) as f64);
        adjusted[i] = running.min(1.0);
    }
    Ok(adjusted)
}

/// Conventional significance stars: `*` < 0.05, `**` < 0.01, `***` < 0.001.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}
