use crate::indicators::dominates;
use crate::Objectives;

/// Non-dominated sorting into fronts of indices (minimization).
///
/// Points are visited in lexicographic order so any dominator of a point is
/// visited before it. Because dominance is transitive, "some member of front
/// k dominates p" is monotone in k and the rank is found by binary search
/// over per-front minima of the second objective.
pub fn fast_nondominated_sort(points: &[Objectives]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
            .then(a.cmp(&b))
    });
    // per front: the first visited member with the smallest f2
    let mut best: Vec<Objectives> = Vec::new();
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    for i in order {
        let p = points[i];
        let k = best.partition_point(|q| q[1] < p[1] || (q[1] == p[1] && q[0] < p[0]));
        if k == fronts.len() {
            fronts.push(Vec::new());
            best.push(p);
        } else if p[1] < best[k][1] {
            best[k] = p;
        }
        fronts[k].push(i);
    }
    for f in &mut fronts {
        f.sort_unstable();
    }
    fronts
}

/// Rank of every point, from [`fast_nondominated_sort`].
pub fn ranks(points: &[Objectives]) -> Vec<usize> {
    let mut out = vec![0; points.len()];
    for (r, front) in fast_nondominated_sort(points).iter().enumerate() {
        for &i in front {
            out[i] = r;
        }
    }
    out
}

/// Crowding distance within one front. Boundary members per objective get
/// infinity; repeated objective vectors after their first occurrence get 0.
pub fn crowding_distance(front: &[Objectives]) -> Vec<f64> {
    let unique: Vec<usize> = (0..front.len())
        .filter(|&i| !front[..i].contains(&front[i]))
        .collect();
    let mut out = vec![0.0; front.len()];
    if unique.len() <= 2 {
        for &i in &unique {
            out[i] = f64::INFINITY;
        }
        return out;
    }
    for m in 0..2 {
        let mut sorted = unique.clone();
        sorted.sort_by(|&a, &b| front[a][m].total_cmp(&front[b][m]));
        let lo = front[sorted[0]][m];
        let hi = front[sorted[sorted.len() - 1]][m];
        out[sorted[0]] = f64::INFINITY;
        out[sorted[sorted.len() - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in sorted.windows(3) {
            out[w[1]] += (front[w[2]][m] - front[w[0]][m]) / range;
        }
    }
    out
}

/// Peeling oracle: repeatedly extract points no remaining point dominates.
pub fn brute_force_fronts(points: &[Objectives]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}
