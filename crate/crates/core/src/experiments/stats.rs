//! Concentration bands and confidence intervals for Monte Carlo comparisons.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::beta::inv_beta_reg;

/// DKW band `ε = sqrt(ln(2/α) / (2N))`: the empirical CDF of `N` draws lies
/// within `ε` of the true CDF everywhere with probability at least `1 - α`.
pub fn dkw_epsilon(n: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Two-sided exact binomial interval at level `1 - α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClopperPearson {
    pub successes: u64,
    pub trials: u64,
    pub lower: f64,
    pub upper: f64,
}

impl ClopperPearson {
    pub fn new(successes: u64, trials: u64, alpha: f64) -> Self {
        assert!(successes <= trials && trials > 0, "need 0 <= x <= n, n > 0");
        let (x, n) = (successes as f64, trials as f64);
        let lower = if successes == 0 {
            0.0
        } else {
            inv_beta_reg(x, n - x + 1.0, alpha / 2.0)
        };
        let upper = if successes == trials {
            1.0
        } else {
            inv_beta_reg(x + 1.0, n - x, 1.0 - alpha / 2.0)
        };
        ClopperPearson {
            successes,
            trials,
            lower,
            upper,
        }
    }

    pub fn estimate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    /// Distance from the estimate down to the lower end.
    pub fn lower_slack(&self) -> f64 {
        self.estimate() - self.lower
    }

    /// Distance from the estimate up to the upper end.
    pub fn upper_slack(&self) -> f64 {
        self.upper - self.estimate()
    }
}

/// Pearson statistic against a uniform law on `counts.len()` cells, with the
/// upper-tail p-value on `cells - 1` degrees of freedom.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let cells = counts.len();
    if cells < 2 || total == 0 {
        return (0.0, 1.0);
    }
    let expected = total as f64 / cells as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((cells - 1) as f64).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
