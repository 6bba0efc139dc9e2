use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::algorithms::{AlgoConfig, AlgorithmName};
use crate::error::Result;
use crate::instance::ProblemInstance;
use crate::problems::ProblemId;
use crate::transforms::TransformSpec;

/// Number of evaluation indices at which archive hypervolume is reported.
pub const CHECKPOINTS: usize = 50;

/// One optimizer run to perform.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: usize,
    pub instance: ProblemInstance,
    pub algo: AlgoConfig,
    pub repetition: usize,
}

/// Seed of one run. The transform is deliberately not hashed, so every
/// instance of a problem sees the same random streams for a given algorithm,
/// population and repetition.
pub fn job_seed(
    base_seed: u64,
    problem: ProblemId,
    algorithm: AlgorithmName,
    population: usize,
    repetition: usize,
) -> u64 {
    let key = format!("{base_seed}|{problem}|{algorithm}|{population}|{repetition}");
    let digest = Sha256::digest(key.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn canonical(t: TransformSpec) -> TransformSpec {
    if t.is_neutral() {
        TransformSpec::Identity
    } else {
        t
    }
}

/// Instances of `problem` requested by `cfg`, without duplicates. Neutral
/// transforms collapse onto the identity, so the base instance appears once.
pub fn instances_for(cfg: &ExperimentConfig, problem: ProblemId) -> Result<Vec<ProblemInstance>> {
    let d = problem.dim();
    let mut search = Vec::new();
    for e in &cfg.search_transforms {
        search.extend(e.expand(d)?.into_iter().map(canonical));
    }
    let mut objective = Vec::new();
    for e in &cfg.objective_transforms {
        objective.extend(e.expand(d)?.into_iter().map(canonical));
    }
    let mut pairs = Vec::new();
    if cfg.combined_grid {
        for s in &search {
            for o in &objective {
                pairs.push((s.clone(), o.clone()));
            }
        }
    } else {
        pairs.extend(search.into_iter().map(|s| (s, TransformSpec::Identity)));
        pairs.extend(objective.into_iter().map(|o| (TransformSpec::Identity, o)));
    }
    let mut out: Vec<ProblemInstance> = Vec::new();
    for (s, o) in pairs {
        let inst = ProblemInstance::new(problem, s, o)?;
        if !out.contains(&inst) {
            out.push(inst);
        }
    }
    Ok(out)
}

/// Problems × instances × algorithms × populations × repetitions, in that
/// nesting order.
pub fn expand_matrix(cfg: &ExperimentConfig) -> Result<Vec<Job>> {
    cfg.validate()?;
    let templates: Vec<AlgoConfig> = cfg.algorithms.iter().flat_map(|a| a.templates()).collect();
    let mut jobs = Vec::new();
    for problem in cfg.problems()? {
        for instance in instances_for(cfg, problem)? {
            for t in &templates {
                for repetition in 0..cfg.repetitions {
                    let mut algo = t.clone();
                    algo.seed = job_seed(cfg.base_seed, problem, t.name, t.population, repetition);
                    jobs.push(Job {
                        id: jobs.len(),
                        instance: instance.clone(),
                        algo,
                        repetition,
                    });
                }
            }
        }
    }
    Ok(jobs)
}

/// Up to [`CHECKPOINTS`] log-spaced evaluation indices from `population` to
/// `budget`, both included.
pub fn checkpoints(population: usize, budget: usize) -> Vec<usize> {
    let lo = population.clamp(1, budget.max(1)) as f64;
    let ratio = budget as f64 / lo;
    let mut out: Vec<usize> = (0..CHECKPOINTS)
        .map(|i| (lo * ratio.powf(i as f64 / (CHECKPOINTS - 1) as f64)).round() as usize)
        .collect();
    out.dedup();
    if let Some(last) = out.last_mut() {
        *last = budget;
    }
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(body: &str) -> ExperimentConfig {
        let text = format!(
            "problems = [\"zdt3-d2\"]\nrepetitions = 10\n{body}\n[[algorithms]]\nname = \"random_search\"\npopulation = 100\nbudget = 5000\n"
        );
        ExperimentConfig::from_toml_str(&text).unwrap()
    }

    #[test]
    fn paper_grid_gives_250_jobs() {
        let c = cfg("[[search_transforms]]\nkind = \"beta_cdf_grid\"\n");
        let jobs = expand_matrix(&c).unwrap();
        assert_eq!(jobs.len(), 250);
        let descriptors: std::collections::BTreeSet<String> =
            jobs.iter().map(|j| j.instance.descriptor()).collect();
        assert_eq!(descriptors.len(), 25);
        assert!(descriptors.contains("zdt3-d2__s:id__o:id"));
        assert!(!descriptors.contains("zdt3-d2__s:beta-a1-b1__o:id"));
    }

    #[test]
    fn rotation_study_gives_five_instances() {
        let c = cfg(
            "[[search_transforms]]\nkind = \"identity\"\n[[search_transforms]]\nkind = \"sphered_rotation\"\nseeds = [1, 2, 3, 4]\n",
        );
        assert_eq!(instances_for(&c, "dtlz1-d2".parse().unwrap()).unwrap().len(), 5);
    }

    #[test]
    fn independent_and_combined_grids() {
        let body = "[[search_transforms]]\nkind = \"beta_cdf_grid\"\n[[objective_transforms]]\nkind = \"beta_cdf_grid\"\n";
        let c = cfg(body);
        assert_eq!(instances_for(&c, "zdt3-d2".parse().unwrap()).unwrap().len(), 49);
        let c = cfg(&format!("combined_grid = true\n{body}"));
        assert_eq!(instances_for(&c, "zdt3-d2".parse().unwrap()).unwrap().len(), 625);
    }

    #[test]
    fn seeds_follow_coordinates_not_transforms() {
        let c = cfg("[[search_transforms]]\nkind = \"beta_cdf_grid\"\n");
        let jobs = expand_matrix(&c).unwrap();
        let seeds: Vec<u64> = jobs.iter().map(|j| j.algo.seed).collect();
        assert_eq!(&seeds[..10], &seeds[10..20]);
        let mut unique = seeds[..10].to_vec();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), 10);
        let p = "zdt3-d2".parse().unwrap();
        assert_ne!(
            job_seed(0, p, AlgorithmName::Nsga2, 10, 0),
            job_seed(1, p, AlgorithmName::Nsga2, 10, 0)
        );
        assert_eq!(jobs.iter().map(|j| j.id).collect::<Vec<_>>(), (0..250).collect::<Vec<_>>());
    }

    #[test]
    fn checkpoint_grid() {
        let c = checkpoints(100, 5000);
        assert_eq!(c.len(), 50);
        assert_eq!((c[0], c[49]), (100, 5000));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        let c = checkpoints(10, 5000);
        assert_eq!((c[0], *c.last().unwrap()), (10, 5000));
        assert_eq!(checkpoints(7, 7), vec![7]);
        let c = checkpoints(2, 20);
        assert!(c.windows(2).all(|w| w[0] < w[1]) && c.len() <= 19);
    }
}
