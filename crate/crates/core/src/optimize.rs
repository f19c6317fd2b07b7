//! Surrogate-assisted configuration search.
//!
//! Differential evolution over Boolean configurations, minimizing the
//! prediction of a fitted tree instead of measuring real systems. Classic DE
//! is real-valued; the binary variant here builds each trial bit, with
//! probability CR (and at one forced position), from a mutant bit: the
//! majority vote of three distinct donors, flipped with probability
//! min(1, F). Trials that violate the validity predicate are rejected
//! outright and never shown to the surrogate; valid trials replace their
//! target only on strict improvement, so the best prediction never gets
//! worse.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cart::{self, TreeNode};
use crate::dataset::Configuration;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Rejection-sampling budget per population slot during initialization.
const INIT_ATTEMPTS_PER_MEMBER: usize = 1000;

/// Differential-evolution parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeParams {
    pub population: usize,
    pub generations: usize,
    /// Per-bit probability of taking the mutant bit instead of the target's.
    pub crossover_rate: f64,
    /// Probability of flipping the donor-majority bit.
    pub differential_weight: f64,
    pub seed: u64,
}

impl DeParams {
    pub fn new(seed: u64) -> Self {
        DeParams {
            population: 30,
            generations: 50,
            crossover_rate: 0.7,
            differential_weight: 0.5,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::InvalidArgument(
                "population must be at least 4 (three donors plus the target)".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::InvalidArgument(format!(
                "crossover rate must lie in [0, 1], got {}",
                self.crossover_rate
            )));
        }
        if self.differential_weight.is_nan() || self.differential_weight < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "differential weight must be non-negative, got {}",
                self.differential_weight
            )));
        }
        Ok(())
    }
}

/// A total, pure membership test for the valid-configuration set.
#[derive(Clone)]
pub struct ValidityPredicate {
    check: Arc<dyn Fn(&Configuration) -> bool + Send + Sync>,
}

impl std::fmt::Debug for ValidityPredicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ValidityPredicate")
    }
}

/// One conjunct of a clause-based validity spec: bit `bit` must equal `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitClause {
    pub bit: usize,
    pub value: bool,
}

impl ValidityPredicate {
    /// Accepts every configuration.
    pub fn always_valid() -> Self {
        ValidityPredicate {
            check: Arc::new(|_| true),
        }
    }

    pub fn from_fn(f: impl Fn(&Configuration) -> bool + Send + Sync + 'static) -> Self {
        ValidityPredicate { check: Arc::new(f) }
    }

    /// Conjunction of fixed-bit clauses. A clause referencing a bit beyond
    /// the configuration's arity can never hold, so such configurations are
    /// invalid.
    pub fn from_clauses(clauses: &[BitClause]) -> Self {
        let clauses = clauses.to_vec();
        ValidityPredicate {
            check: Arc::new(move |c| {
                clauses
                    .iter()
                    .all(|cl| c.bits().get(cl.bit) == Some(&cl.value))
            }),
        }
    }

    pub fn check(&self, config: &Configuration) -> bool {
        (self.check)(config)
    }
}

/// Result of a surrogate-guided search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_config: Configuration,
    pub predicted_performance: f64,
    /// How many times the surrogate was asked for a prediction.
    pub surrogate_calls: usize,
    /// Best predicted value after initialization and after each generation;
    /// never increases.
    pub history: Vec<f64>,
}

/// Minimizes a fitted tree's prediction over valid configurations.
pub fn de_optimize(
    surrogate: &TreeNode,
    arity: usize,
    validity: &ValidityPredicate,
    params: &DeParams,
) -> Result<OptimizationResult> {
    de_optimize_with(
        |config| cart::predict(surrogate, config),
        arity,
        validity,
        params,
    )
}

/// The search engine behind [`de_optimize`], generic over the surrogate so
/// callers can plug in any prediction function.
pub fn de_optimize_with(
    mut surrogate: impl FnMut(&Configuration) -> Result<f64>,
    arity: usize,
    validity: &ValidityPredicate,
    params: &DeParams,
) -> Result<OptimizationResult> {
    params.validate()?;
    if arity == 0 {
        return Err(Error::InvalidArgument(
            "arity must be at least 1".into(),
        ));
    }

    let mut rng = Rng::seed_from(params.seed);
    let mut surrogate_calls = 0usize;

    // initial population: valid random bit vectors by rejection sampling
    let attempt_cap = params.population * INIT_ATTEMPTS_PER_MEMBER;
    let mut attempts = 0usize;
    let mut population: Vec<Configuration> = Vec::with_capacity(params.population);
    let mut fitness: Vec<f64> = Vec::with_capacity(params.population);
    while population.len() < params.population {
        if attempts >= attempt_cap {
            return Err(Error::NoValidConfiguration {
                attempts: attempt_cap,
            });
        }
        attempts += 1;
        let candidate = Configuration::new((0..arity).map(|_| rng.coin(0.5)).collect());
        if !validity.check(&candidate) {
            continue;
        }
        let value = surrogate(&candidate)?;
        surrogate_calls += 1;
        population.push(candidate);
        fitness.push(value);
    }

    let best_of = |fitness: &[f64]| -> usize {
        let mut best = 0;
        for i in 1..fitness.len() {
            if fitness[i] < fitness[best] {
                best = i;
            }
        }
        best
    };
    let mut history = vec![fitness[best_of(&fitness)]];

    let flip_p = params.differential_weight.min(1.0);
    for _ in 0..params.generations {
        // trials are judged against the current generation; replacement is
        // synchronous so the outcome is independent of evaluation order
        let mut next_population = population.clone();
        let mut next_fitness = fitness.clone();
        for target in 0..params.population {
            let mut donors = [0usize; 3];
            for d in 0..3 {
                loop {
                    let pick = rng.index(params.population);
                    if pick != target && !donors[..d].contains(&pick) {
                        donors[d] = pick;
                        break;
                    }
                }
            }
            let forced = rng.index(arity);
            let mut bits = Vec::with_capacity(arity);
            for j in 0..arity {
                let cross = j == forced || rng.coin(params.crossover_rate);
                if cross {
                    let votes = donors
                        .iter()
                        .filter(|&&d| population[d].bits()[j])
                        .count();
                    let majority = votes >= 2;
                    bits.push(majority ^ rng.coin(flip_p));
                } else {
                    bits.push(population[target].bits()[j]);
                }
            }
            let trial = Configuration::new(bits);
            if !validity.check(&trial) {
                continue; // rejected outright, never evaluated
            }
            let value = surrogate(&trial)?;
            surrogate_calls += 1;
            if value < fitness[target] {
                next_population[target] = trial;
                next_fitness[target] = value;
            }
        }
        population = next_population;
        fitness = next_fitness;
        history.push(fitness[best_of(&fitness)]);
    }

    let best = best_of(&fitness);
    Ok(OptimizationResult {
        best_config: population[best].clone(),
        predicted_performance: fitness[best],
        surrogate_calls,
        history,
    })
}
