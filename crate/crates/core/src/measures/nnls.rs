//! Lawson–Hanson nonnegative least squares.

use nalgebra::{DMatrix, DVector};

/// Solves `min ‖A x − b‖₂` subject to `x ≥ 0`.
///
/// Active-set method of Lawson and Hanson. The passive-set subproblems are
/// solved by SVD. Never panics on rank-deficient input; returns the best
/// iterate if the iteration budget runs out.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())) * b.amax().max(1.0);
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE) * (a.nrows().max(n) as f64);
    let max_outer = 3 * n + 10;

    let mut w = a.tr_mul(&(b - a * &x));
    for _ in 0..max_outer {
        let pick = (0..n).filter(|&j| !passive[j]).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let j = match pick {
            Some(j) if w[j] > tol => j,
            _ => break,
        };
        passive[j] = true;

        let mut inner = 0;
        loop {
            inner += 1;
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let s_p = solve_sub(a, b, &idx);
            if idx.iter().zip(s_p.iter()).all(|(_, v)| *v > 0.0) || inner > 3 * n {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = s_p[k].max(0.0);
                }
                break;
            }
            // step back toward x until the first passive coordinate hits zero
            let mut alpha = 1.0_f64;
            for (k, &i) in idx.iter().enumerate() {
                if s_p[k] <= 0.0 {
                    let d = x[i] - s_p[k];
                    if d > 0.0 {
                        alpha = alpha.min(x[i] / d);
                    }
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (s_p[k] - x[i]);
                if x[i] <= tol {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
        w = a.tr_mul(&(b - a * &x));
    }
    x
}

fn solve_sub(a: &DMatrix<f64>, b: &DVector<f64>, idx: &[usize]) -> Vec<f64> {
    let sub = a.select_columns(idx);
    let svd = sub.svd(true, true);
    match svd.solve(b, 1e-14) {
        Ok(s) => s.iter().copied().collect(),
        Err(_) => vec![0.0; idx.len()],
    }
}
