//! Seeded sampling and trial aggregation for pairwise metrics.
//!
//! Samples come from ChaCha8 keyed by `(seed, purpose tag, trial)`, so each
//! metric draws from its own stream and adding a metric never shifts the
//! samples of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{mean_and_sample_std, CompensatedSum};

pub const GENERATOR_ID: &str = "chacha8(seed, fnv1a64(purpose), trial)";
const DEFAULT_PURPOSE: &str = "sample";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub sample_size: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            sample_size: 1000,
            trials: 3,
            seed: 17,
        }
    }
}

impl SamplingPlan {
    pub fn new(sample_size: usize, trials: usize, seed: u64) -> Result<Self> {
        let plan = SamplingPlan {
            sample_size,
            trials,
            seed,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_size < 2 {
            return Err(Error::invalid(format!("sample_size must be at least 2, got {}", self.sample_size)));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        Ok(())
    }

    /// Trials actually run for a population of `n`: one when the sample is the
    /// whole population, since every trial would draw the same set.
    pub fn effective_trials(&self, n: usize) -> usize {
        if n <= self.sample_size {
            1
        } else {
            self.trials
        }
    }
}

/// Mean and sample standard deviation over trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
}

impl MetricValue {
    pub fn from_trials(values: &[f64]) -> Self {
        let (mean, std) = mean_and_sample_std(values);
        MetricValue {
            mean,
            std,
            trials: values.len(),
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        MetricValue {
            mean: self.mean * factor,
            std: self.std * factor,
            trials: self.trials,
        }
    }
}

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn rng_for(seed: u64, trial: usize, purpose: &str) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a64(purpose).to_le_bytes());
    key[16..24].copy_from_slice(&(trial as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Sorted sample of `min(sample_size, n)` distinct indices below `n`.
pub fn draw_sample(n: usize, plan: &SamplingPlan, trial: usize) -> Vec<usize> {
    draw_sample_for(n, plan, trial, DEFAULT_PURPOSE)
}

pub fn draw_sample_for(n: usize, plan: &SamplingPlan, trial: usize, purpose: &str) -> Vec<usize> {
    let k = plan.sample_size.min(n);
    if k == n {
        return (0..n).collect();
    }
    let mut rng = rng_for(plan.seed, trial, purpose);
    let mut idx = rand::seq::index::sample(&mut rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

/// Mean of `pair` over all unordered pairs of each trial's sample, aggregated
/// across trials. Rows of the pair triangle may run in parallel; they are
/// reduced in index order so the result does not depend on the worker count.
pub fn pairwise_mean_by<T, F>(items: &[T], plan: &SamplingPlan, purpose: &str, pair: F) -> Result<MetricValue>
where
    T: Sync,
    F: Fn(&T, &T) -> Result<f64> + Sync,
{
    plan.validate()?;
    if items.len() < 2 {
        return Err(Error::invalid(format!(
            "pairwise metric needs at least 2 records, got {}",
            items.len()
        )));
    }
    let trials = plan.effective_trials(items.len());
    let mut trial_means = Vec::with_capacity(trials);
    for trial in 0..trials {
        let idx = draw_sample_for(items.len(), plan, trial, purpose);
        let k = idx.len();
        let rows: Vec<f64> = (0..k - 1)
            .into_par_iter()
            .map(|i| {
                let mut row = CompensatedSum::default();
                for j in i + 1..k {
                    row.add(pair(&items[idx[i]], &items[idx[j]])?);
                }
                Ok(row.total())
            })
            .collect::<Result<_>>()?;
        let total: CompensatedSum = rows.into_iter().collect();
        let pairs = (k * (k - 1) / 2) as f64;
        trial_means.push(total.total() / pairs);
    }
    Ok(MetricValue::from_trials(&trial_means))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_population_when_small() {
        let plan = SamplingPlan::default();
        assert_eq!(draw_sample(3, &plan, 0), vec![0, 1, 2]);
    }

    #[test]
    fn deterministic_and_trial_dependent() {
        let plan = SamplingPlan {
            seed: 17,
            ..SamplingPlan::default()
        };
        let a = draw_sample(1_000_000, &plan, 0);
        assert_eq!(a, draw_sample(1_000_000, &plan, 0));
        assert_eq!(a.len(), 1000);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(*a.last().unwrap() < 1_000_000);
        assert_ne!(a, draw_sample(1_000_000, &plan, 1));
        assert_ne!(a, draw_sample_for(1_000_000, &plan, 0, "rouge_l"));
    }

    #[test]
    fn plan_validation() {
        assert!(SamplingPlan::new(1, 3, 0).is_err());
        assert!(SamplingPlan::new(2, 0, 0).is_err());
        assert!(SamplingPlan::new(2, 1, 0).is_ok());
    }

    #[test]
    fn pairwise_over_small_population() {
        let items = [1.0f64, 2.0, 4.0, 8.0];
        let plan = SamplingPlan::new(4, 3, 5).unwrap();
        let v = pairwise_mean_by(&items, &plan, "t", |a, b| Ok((a - b).abs())).unwrap();
        // |1-2|+|1-4|+|1-8|+|2-4|+|2-8|+|4-8| = 1+3+7+2+6+4 = 23 over 6 pairs
        assert_eq!(v.mean, 23.0 / 6.0);
        assert_eq!(v.std, 0.0);
        assert_eq!(v.trials, 1);
        assert!(pairwise_mean_by(&items[..1], &plan, "t", |_, _| Ok(0.0)).is_err());
    }

    #[test]
    fn trials_over_a_large_population() {
        let items: Vec<f64> = (0..500).map(|i| (i % 7) as f64).collect();
        let plan = SamplingPlan::new(50, 3, 9).unwrap();
        let v = pairwise_mean_by(&items, &plan, "t", |a, b| Ok(a * b)).unwrap();
        assert_eq!(v.trials, 3);
        assert!(v.std > 0.0);
    }
}
