use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Objectives;

/// `a` Pareto-dominates `b` under minimization.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && a != b
}

/// One archived objective vector and the evaluation that first reached it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub f: Objectives,
    pub eval_index: u64,
}

/// Unbounded archive of mutually non-dominated objective vectors.
///
/// Entries are kept sorted by the first objective (ascending), which for a
/// bi-objective non-dominated set means the second is strictly descending.
/// Insertion is a binary search plus removal of a contiguous dominated run.
#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    history: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn points(&self) -> impl Iterator<Item = Objectives> + '_ {
        self.entries.iter().map(|e| e.f)
    }

    /// Every accepted insertion, in acceptance order.
    pub fn history(&self) -> &[ArchiveEntry] {
        &self.history
    }

    /// Inserts `f` unless it is dominated by or equal to an entry. Returns
    /// whether it was accepted; accepted points evict what they dominate.
    pub fn insert(&mut self, f: Objectives, eval_index: u64) -> Result<bool> {
        if !(f[0].is_finite() && f[1].is_finite()) {
            return Err(Error::Numeric(format!("cannot archive non-finite {f:?}")));
        }
        // first entry with f1 > f[0]
        let pos = self.entries.partition_point(|e| e.f[0] <= f[0]);
        // the entry just before has the smallest f2 among those with f1 <= f[0]
        if let Some(prev) = pos.checked_sub(1).map(|i| &self.entries[i]) {
            if prev.f[1] <= f[1] {
                return Ok(false);
            }
        }
        // entries with f1 >= f[0] and f2 >= f[1] are dominated; they form a
        // contiguous run starting at the first entry with f1 >= f[0]
        let start = self.entries.partition_point(|e| e.f[0] < f[0]);
        let mut end = start;
        while end < self.entries.len() && self.entries[end].f[1] >= f[1] {
            end += 1;
        }
        let entry = ArchiveEntry { f, eval_index };
        self.entries.splice(start..end, std::iter::once(entry));
        self.history.push(entry);
        Ok(true)
    }
}

/// Brute-force non-dominated filter with exact duplicates collapsed; keeps
/// first occurrences in input order.
pub fn nondominated(points: &[Objectives]) -> Vec<Objectives> {
    let mut out: Vec<Objectives> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let dominated = points.iter().any(|q| dominates(q, p));
        let duplicate = points[..i].contains(p);
        if !dominated && !duplicate {
            out.push(*p);
        }
    }
    out
}
