//! Chi-square goodness of fit against a uniform distribution.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Significance level used for uniformity checks.
pub const SIGNIFICANCE: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Pearson statistic of `counts` against equal expected counts. `None` with
/// fewer than two categories or no observations.
pub fn chi_square_uniform(counts: &[u64]) -> Option<ChiSquare> {
    let total: u64 = counts.iter().sum();
    if counts.len() < 2 || total == 0 {
        return None;
    }
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let degrees_of_freedom = counts.len() - 1;
    let dist = ChiSquared::new(degrees_of_freedom as f64).ok()?;
    Some(ChiSquare {
        statistic,
        degrees_of_freedom,
        p_value: dist.sf(statistic),
    })
}
