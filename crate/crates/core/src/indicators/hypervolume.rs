use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Objectives;

/// Exact dominated area of `points` bounded by `reference` (minimization).
///
/// Points not strictly better than the reference in both objectives add
/// nothing. Sort by the first objective, then sweep keeping the lowest second
/// objective seen so far.
pub fn hypervolume_2d<'a, I>(points: I, reference: Objectives) -> f64
where
    I: IntoIterator<Item = &'a Objectives>,
{
    let mut pts: Vec<Objectives> = points
        .into_iter()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .copied()
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut ceiling = reference[1];
    let mut area = 0.0;
    for p in pts {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Exclusive contribution of each member of a mutually non-dominated set.
/// Returned in input order.
pub fn contributions_2d(front: &[Objectives], reference: Objectives) -> Vec<f64> {
    let mut order: Vec<usize> = (0..front.len()).collect();
    order.sort_by(|&a, &b| {
        front[a][0]
            .total_cmp(&front[b][0])
            .then(front[b][1].total_cmp(&front[a][1]))
    });
    let mut out = vec![0.0; front.len()];
    for (rank, &i) in order.iter().enumerate() {
        let right = order
            .get(rank + 1)
            .map_or(reference[0], |&j| front[j][0]);
        let above = rank
            .checked_sub(1)
            .map_or(reference[1], |r| front[order[r]][1]);
        out[i] = ((right - front[i][0]) * (above - front[i][1])).max(0.0);
    }
    out
}

/// Objective-space box used to normalize hypervolumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBox {
    pub ideal: Objectives,
    pub nadir: Objectives,
}

impl NormalizationBox {
    pub fn new(ideal: Objectives, nadir: Objectives) -> Result<Self> {
        for i in 0..2 {
            if !(ideal[i].is_finite() && nadir[i].is_finite()) || ideal[i] >= nadir[i] {
                return Err(Error::DegenerateNormalization(format!(
                    "objective {} has ideal {} and nadir {}",
                    i + 1,
                    ideal[i],
                    nadir[i]
                )));
            }
        }
        Ok(Self { ideal, nadir })
    }

    /// Ideal and nadir of the non-dominated union of `points`.
    pub fn from_points<'a, I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Objectives>,
    {
        let mut t = ExtremeTracker::default();
        for p in points {
            t.add(*p);
        }
        t.finish()
    }

    pub fn normalize(&self, f: &Objectives) -> Objectives {
        [
            (f[0] - self.ideal[0]) / (self.nadir[0] - self.ideal[0]),
            (f[1] - self.ideal[1]) / (self.nadir[1] - self.ideal[1]),
        ]
    }
}

/// Streaming form of [`NormalizationBox::from_points`].
///
/// For two objectives the extremes of the non-dominated set are the
/// lexicographic minima in `(f1, f2)` and `(f2, f1)` order, which are always
/// non-dominated, so two running minima suffice.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExtremeTracker {
    by_f1: Option<Objectives>,
    by_f2: Option<Objectives>,
}

impl ExtremeTracker {
    pub fn add(&mut self, p: Objectives) {
        if self.by_f1.is_none_or(|b| (p[0], p[1]) < (b[0], b[1])) {
            self.by_f1 = Some(p);
        }
        if self.by_f2.is_none_or(|b| (p[1], p[0]) < (b[1], b[0])) {
            self.by_f2 = Some(p);
        }
    }

    pub fn finish(&self) -> Result<NormalizationBox> {
        let (Some(left), Some(bottom)) = (self.by_f1, self.by_f2) else {
            return Err(Error::DegenerateNormalization("no points".into()));
        };
        NormalizationBox::new([left[0], bottom[1]], [bottom[0], left[1]])
    }
}

/// Hypervolume in the normalized box with reference `(1, 1)`; points beyond
/// the nadir in any objective are dropped.
pub fn normalized_hv<'a, I>(points: I, norm: &NormalizationBox) -> f64
where
    I: IntoIterator<Item = &'a Objectives>,
{
    let mapped: Vec<Objectives> = points
        .into_iter()
        .map(|p| norm.normalize(p))
        .filter(|p| p[0] <= 1.0 && p[1] <= 1.0)
        .collect();
    hypervolume_2d(&mapped, [1.0, 1.0])
}

/// Ratio of a transformed instance's hypervolume to its base problem's.
pub fn relative_hv(transformed_hv: f64, base_hv: f64) -> Result<f64> {
    if !base_hv.is_finite() || base_hv <= 0.0 {
        return Err(Error::DegenerateBase(base_hv));
    }
    Ok(transformed_hv / base_hv)
}
