use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{polynomial_mutation, sbx_crossover};
use super::sorting::{fast_nondominated_sort, ranks};
use super::{seen, AlgoConfig, Evaluator, RunResult};
use crate::error::Result;
use crate::indicators::contributions_2d;
use crate::instance::ProblemInstance;
use crate::Objectives;

/// Index of the member to discard: the smallest hypervolume contributor of the
/// worst front, measured against that front's nadir plus `(1, 1)`. The first
/// minimum wins ties.
pub fn smsemoa_removal(points: &[Objectives]) -> usize {
    let fronts = fast_nondominated_sort(points);
    let worst = fronts.last().expect("non-empty population");
    if worst.len() == 1 {
        return worst[0];
    }
    let pts: Vec<Objectives> = worst.iter().map(|&i| points[i]).collect();
    let nadir = pts.iter().fold([f64::NEG_INFINITY; 2], |m, p| {
        [m[0].max(p[0]), m[1].max(p[1])]
    });
    let contrib = contributions_2d(&pts, [nadir[0] + 1.0, nadir[1] + 1.0]);
    let mut best = 0;
    for (k, c) in contrib.iter().enumerate() {
        if *c < contrib[best] {
            best = k;
        }
    }
    worst[best]
}

/// Steady-state SMS-EMOA: one offspring per iteration, then one removal.
pub fn run_smsemoa(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ev = Evaluator::new(inst, cfg.budget);
    let n = cfg.population;
    let v = cfg.variation;
    let p_m = v.mutation_probability(ev.dim());
    let mut pop = Vec::with_capacity(n + 1);
    for _ in 0..n {
        pop.push(ev.evaluate(ev.random_point(&mut rng))?);
    }
    while ev.remaining() > 0 {
        let rank = ranks(&seen(&pop));
        let mut pick = || {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if rank[b] < rank[a] {
                b
            } else {
                a
            }
        };
        let (a, b) = (pick(), pick());
        let (child, _) = sbx_crossover(&pop[a].x, &pop[b].x, v.eta_c, v.p_c, &mut rng);
        let x = polynomial_mutation(&child, v.eta_m, p_m, &mut rng);
        pop.push(ev.evaluate(x)?);
        let drop = smsemoa_removal(&seen(&pop));
        pop.remove(drop);
    }
    Ok(ev.finish(cfg, pop))
}
