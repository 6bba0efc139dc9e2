use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{polynomial_mutation, sbx_crossover};
use super::sorting::{crowding_distance, fast_nondominated_sort};
use super::{seen, AlgoConfig, Evaluator, Individual, RunResult};
use crate::error::Result;
use crate::instance::ProblemInstance;

/// Rank and crowding distance of every member.
fn rank_and_crowding(pop: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let f = seen(pop);
    let mut rank = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    for (r, front) in fast_nondominated_sort(&f).iter().enumerate() {
        let pts: Vec<_> = front.iter().map(|&i| f[i]).collect();
        for (&i, c) in front.iter().zip(crowding_distance(&pts)) {
            rank[i] = r;
            crowd[i] = c;
        }
    }
    (rank, crowd)
}

/// Binary tournament on rank, then crowding; the first draw wins ties.
fn tournament<R: Rng + ?Sized>(rank: &[usize], crowd: &[f64], rng: &mut R) -> usize {
    let a = rng.random_range(0..rank.len());
    let b = rng.random_range(0..rank.len());
    if rank[b] < rank[a] || (rank[b] == rank[a] && crowd[b] > crowd[a]) {
        b
    } else {
        a
    }
}

/// Keeps `n` members by rank, filling the last admitted front by descending
/// crowding distance (lower index first among equals).
pub(crate) fn survivors(pop: Vec<Individual>, n: usize) -> Vec<Individual> {
    let f = seen(&pop);
    let mut keep = Vec::with_capacity(n);
    for front in fast_nondominated_sort(&f) {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            let pts: Vec<_> = front.iter().map(|&i| f[i]).collect();
            let crowd = crowding_distance(&pts);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(front[a].cmp(&front[b])));
            keep.extend(order.into_iter().take(n - keep.len()).map(|k| front[k]));
        }
        if keep.len() == n {
            break;
        }
    }
    keep.sort_unstable();
    let mut pop: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
    keep.into_iter().map(|i| pop[i].take().expect("unique index")).collect()
}

/// Generational NSGA-II. A final generation cut short by the budget is
/// evaluated and logged but not selected.
pub fn run_nsga2(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ev = Evaluator::new(inst, cfg.budget);
    let n = cfg.population;
    let v = cfg.variation;
    let p_m = v.mutation_probability(ev.dim());
    let mut pop = Vec::with_capacity(n);
    for _ in 0..n {
        pop.push(ev.evaluate(ev.random_point(&mut rng))?);
    }
    while ev.remaining() > 0 {
        let (rank, crowd) = rank_and_crowding(&pop);
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n && ev.remaining() > 0 {
            let a = tournament(&rank, &crowd, &mut rng);
            let b = tournament(&rank, &crowd, &mut rng);
            let (c1, c2) = sbx_crossover(&pop[a].x, &pop[b].x, v.eta_c, v.p_c, &mut rng);
            for child in [c1, c2] {
                if offspring.len() < n && ev.remaining() > 0 {
                    let x = polynomial_mutation(&child, v.eta_m, p_m, &mut rng);
                    offspring.push(ev.evaluate(x)?);
                }
            }
        }
        if offspring.len() < n {
            break;
        }
        pop.extend(offspring);
        pop = survivors(pop, n);
    }
    Ok(ev.finish(cfg, pop))
}
