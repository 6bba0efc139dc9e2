//! Random search and three evolutionary optimizers driven through a
//! budgeted evaluator.

mod moead;
mod nsga2;
pub mod operators;
mod random_search;
mod smsemoa;
pub mod sorting;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{EvaluationRecord, ProblemInstance};
use crate::Objectives;

pub use moead::{run_moead, tchebycheff, uniform_weights};
pub use nsga2::run_nsga2;
pub use operators::Variation;
pub use random_search::run_random_search;
pub use smsemoa::{run_smsemoa, smsemoa_removal};
pub use sorting::{crowding_distance, fast_nondominated_sort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    RandomSearch,
    Nsga2,
    Smsemoa,
    Moead,
}

impl AlgorithmName {
    pub const ALL: [AlgorithmName; 4] = [
        AlgorithmName::RandomSearch,
        AlgorithmName::Nsga2,
        AlgorithmName::Smsemoa,
        AlgorithmName::Moead,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmName::RandomSearch => "random_search",
            AlgorithmName::Nsga2 => "nsga2",
            AlgorithmName::Smsemoa => "smsemoa",
            AlgorithmName::Moead => "moead",
        }
    }

    pub fn is_evolutionary(self) -> bool {
        self != AlgorithmName::RandomSearch
    }
}

impl fmt::Display for AlgorithmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub name: AlgorithmName,
    pub population: usize,
    pub budget: usize,
    pub seed: u64,
    #[serde(default)]
    pub variation: Variation,
}

impl AlgoConfig {
    pub fn new(name: AlgorithmName, population: usize, budget: usize, seed: u64) -> Self {
        Self {
            name,
            population,
            budget,
            seed,
            variation: Variation::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 || self.population == 0 {
            return Err(Error::Parameter("population and budget must be positive".into()));
        }
        if self.population > self.budget {
            return Err(Error::Parameter(format!(
                "population {} exceeds budget {}",
                self.population, self.budget
            )));
        }
        if self.name.is_evolutionary() && self.population < 2 {
            return Err(Error::Parameter(format!(
                "{} needs a population of at least 2",
                self.name
            )));
        }
        let v = &self.variation;
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(v.eta_c >= 0.0 && v.eta_m >= 0.0 && prob_ok(v.p_c) && v.p_m.is_none_or(prob_ok)) {
            return Err(Error::Parameter(format!("invalid variation settings {v:?}")));
        }
        Ok(())
    }
}

/// An evaluated point as seen by an optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f_seen: Objectives,
    pub f_original: Objectives,
    pub eval_index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: AlgoConfig,
    pub instance: String,
    pub log: Vec<EvaluationRecord>,
    pub final_population: Vec<Individual>,
}

/// Runs the configured algorithm on `inst`.
pub fn run(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<RunResult> {
    cfg.validate()?;
    match cfg.name {
        AlgorithmName::RandomSearch => run_random_search(inst, cfg),
        AlgorithmName::Nsga2 => run_nsga2(inst, cfg),
        AlgorithmName::Smsemoa => run_smsemoa(inst, cfg),
        AlgorithmName::Moead => run_moead(inst, cfg),
    }
}

/// Counts and logs evaluations; refuses to exceed the budget.
pub(crate) struct Evaluator<'a> {
    inst: &'a ProblemInstance,
    budget: usize,
    log: Vec<EvaluationRecord>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(inst: &'a ProblemInstance, budget: usize) -> Self {
        Self {
            inst,
            budget,
            log: Vec::with_capacity(budget),
        }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.budget - self.log.len()
    }

    pub(crate) fn dim(&self) -> usize {
        self.inst.dim()
    }

    pub(crate) fn evaluate(&mut self, x: Vec<f64>) -> Result<Individual> {
        if self.remaining() == 0 {
            return Err(Error::Parameter("evaluation budget exhausted".into()));
        }
        let rec = self.inst.evaluate(&x, self.log.len() as u64 + 1)?;
        let ind = Individual {
            x,
            f_seen: rec.f_seen,
            f_original: rec.f_original,
            eval_index: rec.eval_index,
        };
        self.log.push(rec);
        Ok(ind)
    }

    pub(crate) fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim()).map(|_| rng.random::<f64>()).collect()
    }

    pub(crate) fn finish(self, cfg: &AlgoConfig, final_population: Vec<Individual>) -> RunResult {
        RunResult {
            config: cfg.clone(),
            instance: self.inst.descriptor(),
            log: self.log,
            final_population,
        }
    }
}

/// The population's objective vectors as the optimizer sees them.
pub(crate) fn seen(pop: &[Individual]) -> Vec<Objectives> {
    pop.iter().map(|i| i.f_seen).collect()
}
