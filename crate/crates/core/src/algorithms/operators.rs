//! Real-coded variation on the unit cube.
//!
//! Draw order is fixed so runs are reproducible: SBX first draws one uniform
//! deciding whether the pair recombines at all, then per coordinate one
//! uniform for the 0.5 coin and, if it lands, one uniform `u`. Polynomial
//! mutation draws per coordinate one uniform for the `p_m` coin and, if it
//! lands, one uniform `u`.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Crossover and mutation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Variation {
    pub eta_c: f64,
    pub p_c: f64,
    pub eta_m: f64,
    /// Per-coordinate mutation probability; `None` means `1/d`.
    pub p_m: Option<f64>,
}

impl Default for Variation {
    fn default() -> Self {
        Self {
            eta_c: 15.0,
            p_c: 0.9,
            eta_m: 20.0,
            p_m: None,
        }
    }
}

impl Variation {
    pub fn mutation_probability(&self, dim: usize) -> f64 {
        self.p_m.unwrap_or(1.0 / dim as f64)
    }
}

/// Spread factor of SBX for the draw `u`.
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    }
}

/// One SBX coordinate pair for the draw `u`, clipped to `[0, 1]`.
pub fn sbx_coordinate(x1: f64, x2: f64, eta: f64, u: f64) -> (f64, f64) {
    let b = sbx_beta(u, eta);
    let c1 = 0.5 * ((1.0 + b) * x1 + (1.0 - b) * x2);
    let c2 = 0.5 * ((1.0 - b) * x1 + (1.0 + b) * x2);
    (c1.clamp(0.0, 1.0), c2.clamp(0.0, 1.0))
}

/// Simulated binary crossover; each coordinate recombines with probability
/// 0.5 once the pair is selected with probability `p_c`.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    p_c: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.random::<f64>() >= p_c {
        return (c1, c2);
    }
    for i in 0..p1.len() {
        if rng.random::<f64>() < 0.5 {
            let u = rng.random::<f64>();
            if (p1[i] - p2[i]).abs() > 1e-14 {
                (c1[i], c2[i]) = sbx_coordinate(p1[i], p2[i], eta, u);
            }
        }
    }
    (c1, c2)
}

/// Bounded polynomial perturbation of `x` in `[0, 1]` for the draw `u`.
pub fn polynomial_coordinate(x: f64, eta: f64, u: f64) -> f64 {
    let power = 1.0 / (eta + 1.0);
    let delta = if u < 0.5 {
        let xy = 1.0 - x;
        let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let xy = x;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    };
    (x + delta).clamp(0.0, 1.0)
}

pub fn polynomial_mutation<R: Rng + ?Sized>(p: &[f64], eta: f64, p_m: f64, rng: &mut R) -> Vec<f64> {
    p.iter()
        .map(|&x| {
            if rng.random::<f64>() < p_m {
                polynomial_coordinate(x, eta, rng.random::<f64>())
            } else {
                x
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn neutral_draws() {
        assert_eq!(sbx_beta(0.5, 15.0), 1.0);
        assert_eq!(sbx_coordinate(0.2, 0.7, 15.0, 0.5), (0.2, 0.7));
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(polynomial_coordinate(x, 20.0, 0.5), x);
        }
    }

    #[test]
    fn zero_probabilities_copy() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (a, b) = (vec![0.1, 0.9, 0.5], vec![0.8, 0.2, 0.4]);
        for _ in 0..100 {
            assert_eq!(sbx_crossover(&a, &b, 15.0, 0.0, &mut rng), (a.clone(), b.clone()));
            assert_eq!(polynomial_mutation(&a, 20.0, 0.0, &mut rng), a);
        }
    }

    #[test]
    fn outputs_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let a: Vec<f64> = (0..3).map(|_| rng.random()).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.random()).collect();
            let (c, d) = sbx_crossover(&a, &b, 15.0, 0.9, &mut rng);
            let m = polynomial_mutation(&c, 20.0, 1.0, &mut rng);
            for v in c.iter().chain(&d).chain(&m) {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn mutation_frequency_matches_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (trials, p) = (100_000usize, 0.1);
        let mut changed = 0usize;
        for _ in 0..trials {
            let out = polynomial_mutation(&[0.5], 20.0, p, &mut rng);
            // u == 0.5 exactly has probability zero
            if out[0] != 0.5 {
                changed += 1;
            }
        }
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((changed as f64 - trials as f64 * p).abs() <= 3.0 * sigma);
    }

    proptest! {
        #[test]
        fn coordinates_bounded(x1 in 0.0..=1.0f64, x2 in 0.0..=1.0f64, u in 0.0..1.0f64) {
            let (c1, c2) = sbx_coordinate(x1, x2, 15.0, u);
            prop_assert!((0.0..=1.0).contains(&c1) && (0.0..=1.0).contains(&c2));
            let m = polynomial_coordinate(x1, 20.0, u);
            prop_assert!((0.0..=1.0).contains(&m));
        }

        #[test]
        fn sbx_preserves_midpoint_inside(x1 in 0.2..0.8f64, x2 in 0.2..0.8f64, u in 0.05..0.95f64) {
            let (c1, c2) = sbx_coordinate(x1, x2, 15.0, u);
            prop_assert!(((c1 + c2) - (x1 + x2)).abs() < 1e-12);
        }
    }
}
