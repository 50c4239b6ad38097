use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Coefficient of variation used when a prior does not give one.
pub const DEFAULT_COV: f64 = 0.2;

fn default_cov() -> f64 {
    DEFAULT_COV
}

/// Log-normal marginal with arithmetic `mean` and coefficient of variation
/// `cov`, optionally truncated to `bounds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPrior {
    pub name: String,
    pub mean: f64,
    #[serde(default = "default_cov")]
    pub cov: f64,
    #[serde(default)]
    pub bounds: Option<[f64; 2]>,
}

impl ParameterPrior {
    pub fn new(name: &str, mean: f64) -> Self {
        Self {
            name: name.into(),
            mean,
            cov: DEFAULT_COV,
            bounds: None,
        }
    }

    pub fn with_cov(mut self, cov: f64) -> Self {
        self.cov = cov;
        self
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = Some([lo, hi]);
        self
    }

    /// `(μ, σ)` of the underlying normal.
    pub fn log_params(&self) -> (f64, f64) {
        let s2 = (1.0 + self.cov * self.cov).ln();
        (self.mean.ln() - 0.5 * s2, s2.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::Sampling(format!("prior `{}`: {why}", self.name)));
        if !(self.mean > 0.0 && self.mean.is_finite()) {
            return bad(format!("mean must be positive, got {}", self.mean));
        }
        if !(self.cov > 0.0 && self.cov.is_finite()) {
            return bad(format!("cov must be positive, got {}", self.cov));
        }
        if let Some([lo, hi]) = self.bounds {
            if !(lo < hi) || !(lo <= self.mean && self.mean <= hi) {
                return bad(format!("bounds [{lo}, {hi}] must be ordered and contain the mean {}", self.mean));
            }
            let [a, b] = self.probability_window();
            if !(b - a > 0.0) {
                return bad(format!("bounds [{lo}, {hi}] carry zero probability"));
            }
        }
        Ok(())
    }

    fn normal(&self) -> Normal {
        let (mu, sigma) = self.log_params();
        Normal::new(mu, sigma).expect("validated log-normal parameters")
    }

    /// CDF values of the truncation bounds.
    fn probability_window(&self) -> [f64; 2] {
        let n = self.normal();
        match self.bounds {
            None => [0.0, 1.0],
            Some([lo, hi]) => [
                if lo > 0.0 { n.cdf(lo.ln()) } else { 0.0 },
                n.cdf(hi.ln()),
            ],
        }
    }

    /// Quantile of the (truncated) marginal at probability `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let [a, b] = self.probability_window();
        let p = (a + u * (b - a)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
        let x = self.normal().inverse_cdf(p).exp();
        match self.bounds {
            Some([lo, hi]) => x.clamp(lo, hi),
            None => x,
        }
    }

    /// Probability `u` of `x` under the (truncated) marginal.
    pub fn probability(&self, x: f64) -> f64 {
        let [a, b] = self.probability_window();
        if !(x > 0.0) {
            return 0.0;
        }
        ((self.normal().cdf(x.ln()) - a) / (b - a)).clamp(0.0, 1.0)
    }

    /// Index of the equiprobable stratum (out of `n`) containing `x`.
    pub fn stratum(&self, x: f64, n: usize) -> usize {
        ((self.probability(x) * n as f64).floor() as usize).min(n - 1)
    }
}

fn check(priors: &[ParameterPrior], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Sampling("sample size must be at least 1".into()));
    }
    if priors.is_empty() {
        return Err(Error::Sampling("no priors given".into()));
    }
    priors.iter().try_for_each(ParameterPrior::validate)
}

/// Latin hypercube sample: `n` realizations, each parameter visiting each of
/// its `n` equiprobable strata exactly once. Deterministic in `seed`.
pub fn lhs_sample(priors: &[ParameterPrior], n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check(priors, n)?;
    Ok(strata_sample(priors, n, seed, None))
}

/// As [`lhs_sample`], with realization 0 replaced by `anchor`. The anchor's
/// strata are moved to row 0 so that every stratum is still visited once.
pub fn lhs_sample_with_anchor(priors: &[ParameterPrior], n: usize, seed: u64, anchor: &[f64]) -> Result<Vec<Vec<f64>>> {
    check(priors, n)?;
    if anchor.len() != priors.len() {
        return Err(Error::Sampling(format!(
            "anchor has {} values for {} parameters",
            anchor.len(),
            priors.len()
        )));
    }
    for (p, &x) in priors.iter().zip(anchor) {
        if !(x > 0.0) || p.bounds.is_some_and(|[lo, hi]| x < lo || x > hi) {
            return Err(Error::Sampling(format!("anchor value {x} for `{}` is outside the support", p.name)));
        }
    }
    Ok(strata_sample(priors, n, seed, Some(anchor)))
}

fn strata_sample(priors: &[ParameterPrior], n: usize, seed: u64, anchor: Option<&[f64]>) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![0.0; priors.len()]; n];
    for (j, p) in priors.iter().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        let jitter: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        if let Some(a) = anchor {
            let s = p.stratum(a[j], n);
            let pos = strata.iter().position(|&k| k == s).expect("every stratum present");
            strata.swap(0, pos);
        }
        for i in 0..n {
            out[i][j] = p.quantile((strata[i] as f64 + jitter[i]) / n as f64);
        }
        if let Some(a) = anchor {
            out[0][j] = a[j];
        }
    }
    out
}
