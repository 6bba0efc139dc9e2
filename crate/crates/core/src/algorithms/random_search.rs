use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AlgoConfig, Evaluator, RunResult};
use crate::error::Result;
use crate::indicators::ParetoArchive;
use crate::instance::ProblemInstance;

/// `budget` independent uniform samples. The non-dominated subset of the
/// observed objectives stands in for a final population.
pub fn run_random_search(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ev = Evaluator::new(inst, cfg.budget);
    let mut evaluated = Vec::with_capacity(cfg.budget);
    let mut archive = ParetoArchive::new();
    while ev.remaining() > 0 {
        let ind = ev.evaluate(ev.random_point(&mut rng))?;
        archive.insert(ind.f_seen, ind.eval_index)?;
        evaluated.push(ind);
    }
    let mut idx: Vec<usize> = archive
        .entries()
        .iter()
        .map(|e| e.eval_index as usize - 1)
        .collect();
    idx.sort_unstable();
    let front = idx.into_iter().map(|i| evaluated[i].clone()).collect();
    Ok(ev.finish(cfg, front))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmName;
    use crate::transforms::TransformSpec;

    #[test]
    fn objective_transforms_do_not_change_sampling() {
        let p = "zdt1-d2".parse().unwrap();
        let cfg = AlgoConfig::new(AlgorithmName::RandomSearch, 100, 5000, 9);
        let base = run_random_search(&ProblemInstance::base(p), &cfg).unwrap();
        assert_eq!(base.log.len(), 5000);
        let warped = ProblemInstance::new(
            p,
            TransformSpec::Identity,
            TransformSpec::beta_cdf(0.2, 5.0).unwrap(),
        )
        .unwrap();
        let other = run_random_search(&warped, &cfg).unwrap();
        let f = |r: &RunResult| r.log.iter().map(|e| e.f_original).collect::<Vec<_>>();
        assert_eq!(f(&base), f(&other));
    }
}
