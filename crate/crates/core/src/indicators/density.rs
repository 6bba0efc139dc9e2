use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::transforms::TransformSpec;

/// Wasserstein-1 distance between two equal-size empirical samples: the mean
/// absolute difference of the sorted values.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Parameter("empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let total: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / a.len() as f64)
}

fn pairwise_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            out.push(d2.sqrt());
        }
    }
    out
}

/// How much a transformation distorts pairwise distances of `n` uniform
/// points in `[0, 1]^dim`.
pub fn density_change(t: &TransformSpec, n: usize, dim: usize, seed: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 points, got {n}")));
    }
    if dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let before: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    let after = before
        .iter()
        .map(|x| t.apply_forward(x))
        .collect::<Result<Vec<_>>>()?;
    wasserstein_1d(&pairwise_distances(&before), &pairwise_distances(&after))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::RotationMatrix;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn wasserstein_examples() {
        assert_eq!(wasserstein_1d(&[0.3, 0.1], &[0.1, 0.3]).unwrap(), 0.0);
        assert_eq!(wasserstein_1d(&[0.0, 1.0], &[0.0, 2.0]).unwrap(), 0.5);
        assert_eq!(wasserstein_1d(&[1.0, 0.0], &[2.0, 0.0]).unwrap(), 0.5);
        let a = [0.1, 0.7, 0.4];
        let b: Vec<f64> = a.iter().map(|v| v + 0.25).collect();
        assert!((wasserstein_1d(&a, &b).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(wasserstein_1d(&[1.0], &[1.0, 2.0]), Err(Error::Shape { .. })));
        assert!(wasserstein_1d(&[], &[]).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(density_change(&TransformSpec::Identity, 100, 2, 1).unwrap(), 0.0);
        for k in 0..4 {
            let t = TransformSpec::rotation_angle(k as f64 * FRAC_PI_2).unwrap();
            assert!(density_change(&t, 500, 2, 7).unwrap() < 1e-12);
        }
        let quarter = TransformSpec::rotation_angle(FRAC_PI_4).unwrap();
        assert!(density_change(&quarter, 500, 2, 7).unwrap() > 0.01);
        let flat = TransformSpec::beta_cdf(1.0, 1.0).unwrap();
        let peaked = TransformSpec::beta_cdf(5.0, 5.0).unwrap();
        assert!(
            density_change(&peaked, 200, 2, 3).unwrap() > density_change(&flat, 200, 2, 3).unwrap()
        );
        assert!(density_change(&TransformSpec::Identity, 1, 2, 1).is_err());
    }

    #[test]
    fn signed_permutations_keep_density() {
        let m = RotationMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
        ])
        .unwrap();
        let t = TransformSpec::rotation_matrix(m);
        assert!(density_change(&t, 200, 3, 5).unwrap() < 1e-12);
    }

    #[test]
    fn deterministic_in_seed() {
        let t = TransformSpec::rotation_angle(PI / 3.0).unwrap();
        assert_eq!(
            density_change(&t, 100, 2, 9).unwrap(),
            density_change(&t, 100, 2, 9).unwrap()
        );
    }

    proptest! {
        #[test]
        fn wasserstein_is_a_metric(
            abc in (1usize..30).prop_flat_map(|n| prop::collection::vec(prop::array::uniform3(-5.0..5.0f64), n)),
        ) {
            let a: Vec<f64> = abc.iter().map(|t| t[0]).collect();
            let b: Vec<f64> = abc.iter().map(|t| t[1]).collect();
            let c: Vec<f64> = abc.iter().map(|t| t[2]).collect();
            let ab = wasserstein_1d(&a, &b).unwrap();
            prop_assert!((ab - wasserstein_1d(&b, &a).unwrap()).abs() <= 1e-12);
            let ac = wasserstein_1d(&a, &c).unwrap();
            let bc = wasserstein_1d(&b, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert_eq!(wasserstein_1d(&a, &a).unwrap(), 0.0);
        }
    }
}
