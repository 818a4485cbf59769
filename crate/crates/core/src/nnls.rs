//! Nonnegative least squares (Lawson-Hanson active set).

use nalgebra::{DMatrix, DVector};

/// Minimizes `|A x - b|` subject to `x >= 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let (m, n) = a.shape();
    let mut x = DVector::zeros(n);
    if n == 0 || m == 0 {
        return x;
    }
    let anorm = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let bnorm = b.amax().max(f64::MIN_POSITIVE);
    let wtol = 1e-13 * anorm * bnorm * (m.max(n) as f64);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;
    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > wtol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = candidate else { break };
        passive[t] = true;
        let mut inner = 0;
        loop {
            inner += 1;
            let z = solve_passive(a, b, &passive);
            let bad: Vec<usize> = (0..n).filter(|&j| passive[j] && z[j] <= 0.0).collect();
            if bad.is_empty() || inner > 3 * n + 10 {
                x = z.map(|v| v.max(0.0));
                break;
            }
            let alpha = bad
                .iter()
                .map(|&j| x[j] / (x[j] - z[j]))
                .fold(f64::INFINITY, f64::min)
                .clamp(0.0, 1.0);
            x += (&z - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= 1e-15 * x.amax().max(f64::MIN_POSITIVE) {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    x
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let mut z = DVector::zeros(passive.len());
    if cols.is_empty() {
        return z;
    }
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, k| a[(i, cols[k])]);
    let svd = sub.svd(true, true);
    let eps = 1e-12 * svd.singular_values.amax().max(f64::MIN_POSITIVE);
    if let Ok(sol) = svd.solve(b, eps) {
        for (k, &j) in cols.iter().enumerate() {
            z[j] = sol[k];
        }
    }
    z
}

/// Dimension of the null space of `a` (singular values below `rel * max`).
pub fn nullity(a: &DMatrix<f64>, rel: f64) -> usize {
    let (m, n) = a.shape();
    if n == 0 {
        return 0;
    }
    if m == 0 {
        return n;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let cutoff = rel * sv.amax().max(f64::MIN_POSITIVE);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    n - rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_optimum_is_kept() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = nnls(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_component_is_clamped() {
        let a = DMatrix::identity(2, 2);
        let b = DVector::from_vec(vec![-1.0, 2.0]);
        let x = nnls(&a, &b);
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_small_problem() {
        // enumerate all active sets of a 3-column problem
        let a = DMatrix::from_row_slice(4, 3, &[1.0, 2.0, -1.0, 0.5, -1.0, 2.0, 3.0, 0.0, 1.0, -2.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let x = nnls(&a, &b);
        let mut best = f64::INFINITY;
        for mask in 0u32..8 {
            let passive: Vec<bool> = (0..3).map(|j| mask & (1 << j) != 0).collect();
            let z = solve_passive(&a, &b, &passive);
            if z.iter().all(|&v| v >= -1e-12) {
                best = best.min((&a * &z - &b).norm());
            }
        }
        assert!(((&a * &x - &b).norm() - best).abs() < 1e-10);
    }

    #[test]
    fn nullity_counts_dependent_columns() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        assert_eq!(nullity(&a, 1e-10), 1);
    }
}
