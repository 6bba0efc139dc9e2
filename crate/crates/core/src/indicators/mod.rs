//! Archiving, hypervolume, normalization and the density diagnostic.

pub mod archive;
pub mod density;
pub mod hypervolume;

pub use archive::{dominates, nondominated, ArchiveEntry, ParetoArchive};
pub use density::{density_change, wasserstein_1d};
pub use hypervolume::{
    contributions_2d, hypervolume_2d, normalized_hv, relative_hv, ExtremeTracker, NormalizationBox,
};

use crate::error::Result;
use crate::Objectives;

/// Normalization box pooled over the non-dominated union of several fronts.
pub fn compute_normalization<'a, I>(fronts: I) -> Result<NormalizationBox>
where
    I: IntoIterator<Item = &'a [Objectives]>,
{
    NormalizationBox::from_points(fronts.into_iter().flatten())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooled_runs() {
        let runs: [&[Objectives]; 1] = [&[[0.0, 1.0], [1.0, 0.0]]];
        let b = compute_normalization(runs).unwrap();
        assert_eq!((b.ideal, b.nadir), ([0.0, 0.0], [1.0, 1.0]));

        let runs: [&[Objectives]; 2] = [&[[0.0, 2.0]], &[[1.0, 0.0]]];
        let b = compute_normalization(runs).unwrap();
        assert_eq!((b.ideal, b.nadir), ([0.0, 0.0], [1.0, 2.0]));

        // a point dominated across runs does not stretch the box
        let runs: [&[Objectives]; 2] = [&[[0.0, 2.0], [1.0, 0.0]], &[[5.0, 5.0]]];
        let b = compute_normalization(runs).unwrap();
        assert_eq!(b.nadir, [1.0, 2.0]);
    }
}
