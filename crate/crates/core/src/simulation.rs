//! Monte-Carlo event streams for switch-driven experiments.
//!
//! Each trial draws a context `J ~ κ`, then an outcome vector `ε ~ μ^J`.
//! Measurements outside `J` are absent from the record; they are not a third
//! outcome. Trials are generated in fixed-size blocks, block `b` using
//! ChaCha8 seeded with the run seed on stream `b`, so the stream depends only
//! on `(seed, trials)` and never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::censorship::{context_space, effective_probability, MeasurementSuite, SetupDistribution};
use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::parallel::{self, Execution};
use crate::rational::{to_f64, RationalizationPolicy};

pub const PRNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), one stream per block";
pub const BLOCK_SIZE: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub context: IndexSet,
    /// Members of `context` whose detector fired.
    pub ones: IndexSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyEstimate {
    pub outcomes: IndexSet,
    pub switches: IndexSet,
    pub count: u64,
    pub trials: u64,
    pub frequency: f64,
    pub std_error: f64,
}

struct ContextSampler {
    context: IndexSet,
    cumulative: Vec<f64>,
    ones: Vec<IndexSet>,
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .iter()
        .position(|c| u < *c)
        .unwrap_or_else(|| {
            // rounding in the last partial sum: take the last cell with mass
            let mut prev = 0.0;
            let mut last = 0;
            for (k, c) in cumulative.iter().enumerate() {
                if *c > prev {
                    last = k;
                }
                prev = *c;
            }
            last
        })
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    weights
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect()
}

pub fn run(
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    trials: u64,
    seed: u64,
    policy: &RationalizationPolicy,
) -> Result<Vec<TrialRecord>> {
    run_with(suite, kappa, trials, seed, policy, Execution::default())
}

pub fn run_with(
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    trials: u64,
    seed: u64,
    policy: &RationalizationPolicy,
    exec: Execution,
) -> Result<Vec<TrialRecord>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let samplers = kappa
        .support()
        .map(|set| {
            let space = context_space(set, suite, policy)?;
            let ones = (0..space.len())
                .map(|k| {
                    set.iter()
                        .filter(|&i| space.contains(&suite.measurements()[i].name, k).expect("own event"))
                        .fold(IndexSet::EMPTY, IndexSet::with)
                })
                .collect();
            Ok(ContextSampler {
                context: set,
                cumulative: cumulative(space.masses().iter().map(to_f64)),
                ones,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let context_cumulative = cumulative(kappa.weights().map(|(_, w)| to_f64(w)));

    let blocks = trials.div_ceil(BLOCK_SIZE);
    let chunks = parallel::map_range(exec, blocks as usize, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let start = b as u64 * BLOCK_SIZE;
        let end = (start + BLOCK_SIZE).min(trials);
        (start..end)
            .map(|trial| {
                let s = &samplers[pick(&context_cumulative, rng.gen::<f64>())];
                let cell = pick(&s.cumulative, rng.gen::<f64>());
                TrialRecord {
                    trial,
                    context: s.context,
                    ones: s.ones[cell],
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Whether a record witnesses `(∧_{I₁} A_i) ∧ (∧_{I₂} a_j)`.
pub fn occurs(record: &TrialRecord, outcomes: IndexSet, switches: IndexSet) -> bool {
    outcomes.union(switches).is_subset(record.context) && outcomes.is_subset(record.ones)
}

pub fn estimate(records: &[TrialRecord], queries: &[(IndexSet, IndexSet)]) -> Vec<FrequencyEstimate> {
    estimate_with(records, queries, Execution::default())
}

pub fn estimate_with(
    records: &[TrialRecord],
    queries: &[(IndexSet, IndexSet)],
    exec: Execution,
) -> Vec<FrequencyEstimate> {
    let trials = records.len() as u64;
    parallel::map(exec, queries, |&(outcomes, switches)| {
        let count = records.iter().filter(|r| occurs(r, outcomes, switches)).count() as u64;
        let frequency = if trials == 0 { 0.0 } else { count as f64 / trials as f64 };
        let std_error = if trials == 0 {
            0.0
        } else {
            (frequency * (1.0 - frequency) / trials as f64).sqrt()
        };
        FrequencyEstimate {
            outcomes,
            switches,
            count,
            trials,
            frequency,
            std_error,
        }
    })
}

/// Estimate next to the exact effective probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub estimate: FrequencyEstimate,
    pub exact: f64,
    /// `√(p(1−p)/N)` at the exact `p`.
    pub binomial_se: f64,
    pub within: bool,
}

/// Compares each estimate with its exact value at `k` binomial standard errors.
/// When the exact value is 0 or 1 the estimate must match it exactly.
pub fn compare(
    estimates: &[FrequencyEstimate],
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    k: f64,
    policy: &RationalizationPolicy,
) -> Result<Vec<Comparison>> {
    estimates
        .iter()
        .map(|e| {
            let exact = to_f64(&effective_probability(suite, kappa, e.outcomes, e.switches, policy)?);
            let se = if e.trials == 0 {
                0.0
            } else {
                (exact * (1.0 - exact) / e.trials as f64).sqrt()
            };
            let within = (e.frequency - exact).abs() <= k * se;
            Ok(Comparison {
                estimate: e.clone(),
                exact,
                binomial_se: se,
                within,
            })
        })
        .collect()
}

/// Every `(I₁, I₂)` with `|I₁| + |I₂| ≤ max_order`.
pub fn all_queries(n: usize, max_order: usize) -> Vec<(IndexSet, IndexSet)> {
    let all = IndexSet::full(n);
    all.subsets()
        .flat_map(|o| all.subsets().map(move |s| (o, s)))
        .filter(|(o, s)| o.len() + s.len() <= max_order)
        .collect()
}
