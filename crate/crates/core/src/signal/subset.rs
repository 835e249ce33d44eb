use super::scaling::normalize;
use crate::error::{ensure, Result};

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Exact farthest pair, lexicographically smallest `(i, j)` on ties.
///
/// Candidates are visited in order of decreasing distance to the centroid
/// and pruned with the bound `d(i, j) <= r_i + r_j`.
fn farthest_pair(points: &[Vec<f64>]) -> (usize, usize) {
    let n = points.len();
    let dim = points[0].len();
    let mut centroid = vec![0.0; dim];
    for p in points {
        for (c, v) in centroid.iter_mut().zip(p) {
            *c += v / n as f64;
        }
    }
    let radius: Vec<f64> = points.iter().map(|p| dist2(p, &centroid).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radius[b].total_cmp(&radius[a]).then(a.cmp(&b)));

    let mut best = (-1.0f64, 0usize, 1usize);
    // Small slack keeps tied pairs from being pruned by rounding in the bound.
    let slack = |d: f64| d * (1.0 + 1e-12) + 1e-300;
    for (ia, &a) in order.iter().enumerate() {
        if slack(radius[a] + radius[order[0]]) < best.0 {
            break;
        }
        for &b in &order[ia + 1..] {
            if slack(radius[a] + radius[b]) < best.0 {
                break;
            }
            let d = dist2(&points[a], &points[b]).sqrt();
            let pair = (a.min(b), a.max(b));
            if d > best.0 || (d == best.0 && pair < (best.1, best.2)) {
                best = (d, pair.0, pair.1);
            }
        }
    }
    (best.1, best.2)
}

/// Greedy maximin subset of `n` rows, computed in min-max normalized space.
///
/// Starts from the mutually farthest pair and repeatedly adds the point whose
/// distance to the chosen set is largest (ties go to the lowest index).
/// Indices are returned in selection order.
pub fn space_filling_subset(points: &[Vec<f64>], n: usize) -> Result<Vec<usize>> {
    ensure(n >= 2 && n <= points.len(), || {
        format!("subset size {n} must lie in [2, {}]", points.len())
    })?;
    let (scaled, _) = normalize(points);
    let (a, b) = farthest_pair(&scaled);
    let mut chosen = vec![a, b];
    let mut taken = vec![false; scaled.len()];
    taken[a] = true;
    taken[b] = true;
    let mut min_d: Vec<f64> = scaled
        .iter()
        .map(|p| dist2(p, &scaled[a]).min(dist2(p, &scaled[b])))
        .collect();
    while chosen.len() < n {
        let mut next = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for (k, &d) in min_d.iter().enumerate() {
            if !taken[k] && d > best {
                best = d;
                next = k;
            }
        }
        taken[next] = true;
        chosen.push(next);
        let p = &scaled[next];
        for (k, d) in min_d.iter_mut().enumerate() {
            if !taken[k] {
                *d = d.min(dist2(&scaled[k], p));
            }
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_size_returns_everything() {
        let pts: Vec<Vec<f64>> = (0..6).map(|k| vec![k as f64, (k * k) as f64]).collect();
        let mut idx = space_filling_subset(&pts, 6).unwrap();
        idx.sort();
        assert_eq!(idx, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn out_of_range_sizes() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert!(space_filling_subset(&pts, 1).is_err());
        assert!(space_filling_subset(&pts, 3).is_err());
    }

    #[test]
    fn collinear_picks_endpoints() {
        let pts = vec![vec![0.0], vec![0.1], vec![1.0]];
        let mut idx = space_filling_subset(&pts, 2).unwrap();
        idx.sort();
        assert_eq!(idx, vec![0, 2]);
    }
}
