use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{polynomial_mutation, sbx_crossover};
use super::{AlgoConfig, Evaluator, RunResult};
use crate::error::Result;
use crate::instance::ProblemInstance;
use crate::Objectives;

const NEIGHBOURHOOD: usize = 20;
const NEIGHBOUR_MATING: f64 = 0.9;
const REPLACEMENT_CAP: usize = 2;

/// Tchebycheff scalarization `max_i λ_i |f_i - z*_i|`.
pub fn tchebycheff(f: &Objectives, lambda: &[f64; 2], ideal: &Objectives) -> f64 {
    (lambda[0] * (f[0] - ideal[0]).abs()).max(lambda[1] * (f[1] - ideal[1]).abs())
}

/// `n` evenly spaced weight vectors on the bi-objective simplex.
pub fn uniform_weights(n: usize) -> Vec<[f64; 2]> {
    if n == 1 {
        return vec![[0.5, 0.5]];
    }
    (0..n)
        .map(|j| {
            let t = j as f64 / (n - 1) as f64;
            [1.0 - t, t]
        })
        .collect()
}

/// The `t` nearest weight vectors of each weight vector, itself included.
fn neighbourhoods(weights: &[[f64; 2]], t: usize) -> Vec<Vec<usize>> {
    weights
        .iter()
        .map(|w| {
            let dist = |v: &[f64; 2]| (w[0] - v[0]).powi(2) + (w[1] - v[1]).powi(2);
            let mut idx: Vec<usize> = (0..weights.len()).collect();
            idx.sort_by(|&a, &b| dist(&weights[a]).total_cmp(&dist(&weights[b])).then(a.cmp(&b)));
            idx.truncate(t);
            idx
        })
        .collect()
}

/// MOEA/D with Tchebycheff decomposition. Subproblems are visited in a fresh
/// random order each sweep; each produces one offspring.
pub fn run_moead(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ev = Evaluator::new(inst, cfg.budget);
    let n = cfg.population;
    let v = cfg.variation;
    let p_m = v.mutation_probability(ev.dim());
    let weights = uniform_weights(n);
    let hood = neighbourhoods(&weights, NEIGHBOURHOOD.min(n));
    let everyone: Vec<usize> = (0..n).collect();
    let mut pop = Vec::with_capacity(n);
    for _ in 0..n {
        pop.push(ev.evaluate(ev.random_point(&mut rng))?);
    }
    let mut ideal = pop.iter().fold([f64::INFINITY; 2], |z, i| {
        [z[0].min(i.f_seen[0]), z[1].min(i.f_seen[1])]
    });
    let mut order = everyone.clone();
    'sweeps: loop {
        order.shuffle(&mut rng);
        for &i in &order {
            if ev.remaining() == 0 {
                break 'sweeps;
            }
            let pool = if rng.random::<f64>() < NEIGHBOUR_MATING {
                &hood[i]
            } else {
                &everyone
            };
            let parents: Vec<usize> = pool.choose_multiple(&mut rng, 2).copied().collect();
            let (child, _) = sbx_crossover(
                &pop[parents[0]].x,
                &pop[parents[parents.len() - 1]].x,
                v.eta_c,
                v.p_c,
                &mut rng,
            );
            let x = polynomial_mutation(&child, v.eta_m, p_m, &mut rng);
            let child = ev.evaluate(x)?;
            ideal = [ideal[0].min(child.f_seen[0]), ideal[1].min(child.f_seen[1])];
            let mut targets = pool.clone();
            targets.shuffle(&mut rng);
            let mut replaced = 0;
            for j in targets {
                if replaced == REPLACEMENT_CAP {
                    break;
                }
                let w = &weights[j];
                if tchebycheff(&child.f_seen, w, &ideal) < tchebycheff(&pop[j].f_seen, w, &ideal) {
                    pop[j] = child.clone();
                    replaced += 1;
                }
            }
        }
    }
    Ok(ev.finish(cfg, pop))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(tchebycheff(&[0.5, 0.5], &[1.0, 0.0], &[0.0, 0.0]), 0.5);
        assert_eq!(uniform_weights(3), vec![[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]);
        assert_eq!(uniform_weights(2), vec![[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn neighbourhoods_are_local() {
        let w = uniform_weights(50);
        let h = neighbourhoods(&w, 20);
        assert_eq!(h[0], (0..20).collect::<Vec<_>>());
        assert_eq!(h[25][0], 25);
        assert!(h[25].iter().all(|&j| j.abs_diff(25) <= 10));
        let h = neighbourhoods(&uniform_weights(5), 5);
        assert!(h.iter().all(|n| n.len() == 5));
    }
}
