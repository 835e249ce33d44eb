//! Convex-hull membership in any dimension as an LP feasibility problem:
//! find `λ ≥ 0` with `Σ λᵢ pᵢ = x` and `Σ λᵢ = 1`.

/// Phase-one simplex (Bland's rule) on the centred, rescaled system.
/// Returns whether the minimum total infeasibility is within `tol`.
pub fn convex_combination_feasible(points: &[Vec<f64>], x: &[f64], tol: f64) -> bool {
    let n = points.len();
    if n == 0 {
        return false;
    }
    let d = x.len();
    let scale = points
        .iter()
        .flat_map(|p| p.iter().zip(x).map(|(a, b)| (a - b).abs()))
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return true;
    }

    // rows: d coordinate equations (rhs 0) and the unit-sum row (rhs 1)
    let m = d + 1;
    let width = n + m + 1;
    let mut tab = vec![0.0; (m + 1) * width];
    let at = |r: usize, c: usize| r * width + c;
    for (j, p) in points.iter().enumerate() {
        for i in 0..d {
            tab[at(i, j)] = (p[i] - x[i]) / scale;
        }
        tab[at(d, j)] = 1.0;
    }
    tab[at(d, width - 1)] = 1.0;
    for r in 0..m {
        tab[at(r, n + r)] = 1.0;
    }
    // objective row holds reduced costs of min Σ artificials
    for c in 0..width {
        if c >= n && c < n + m {
            continue;
        }
        let s: f64 = (0..m).map(|r| tab[at(r, c)]).sum();
        tab[at(m, c)] = -s;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let eps = 1e-12;
    for _ in 0..50 * (n + m) {
        let Some(enter) = (0..n + m).find(|&c| tab[at(m, c)] < -eps) else {
            break;
        };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            let a = tab[at(r, enter)];
            if a > eps {
                let ratio = tab[at(r, width - 1)] / a;
                let better = match leave {
                    None => true,
                    Some(lr) => ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[r] < basis[lr]),
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else {
            break;
        };
        let piv = tab[at(lr, enter)];
        for c in 0..width {
            tab[at(lr, c)] /= piv;
        }
        for r in 0..=m {
            if r != lr {
                let f = tab[at(r, enter)];
                if f != 0.0 {
                    for c in 0..width {
                        tab[at(r, c)] -= f * tab[at(lr, c)];
                    }
                }
            }
        }
        basis[lr] = enter;
    }
    // residual infeasibility = -objective value
    -tab[at(m, width - 1)] <= tol
}
