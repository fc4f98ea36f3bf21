//! Sturm-sequence bisection and inverse iteration for symmetric tridiagonal matrices.

/// Number of eigenvalues strictly below `x`.
///
/// `diag` has length n, `off` length n - 1. Counts negative pivots of the
/// LDL^T factorization of `T - x I`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let guard = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..n {
        if i > 0 {
            let q_safe = if q.abs() < guard { guard.copysign(q) } else { q };
            q = (diag[i] - x) - off[i - 1] * off[i - 1] / q_safe;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `count` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], count: usize) -> Vec<f64> {
    let n = diag.len();
    let count = count.min(n);
    let (lo, hi) = gershgorin(diag, off);
    let pad = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    (0..count)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..256 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, off, mid) <= k {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Solves (T - shift I) x = rhs by Gaussian elimination with partial pivoting.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // rows stored as (sub, main, super, super2) after pivoting
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut a: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            [
                diag[i] - shift,
                if i + 1 < n { off[i] } else { 0.0 },
                0.0,
            ]
        })
        .collect();
    let mut sub: Vec<f64> = (0..n).map(|i| if i > 0 { off[i - 1] } else { 0.0 }).collect();
    let mut b = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if sub[i + 1].abs() > a[i][0].abs() {
            // swap rows i and i+1
            let row_next = [sub[i + 1], a[i + 1][0], a[i + 1][1]];
            let row_cur = a[i];
            a[i] = row_next;
            sub[i + 1] = row_cur[0];
            a[i + 1] = [row_cur[1], row_cur[2], 0.0];
            b.swap(i, i + 1);
        }
        if a[i][0] == 0.0 {
            a[i][0] = tiny;
        }
        let m = sub[i + 1] / a[i][0];
        a[i + 1][0] -= m * a[i][1];
        a[i + 1][1] -= m * a[i][2];
        b[i + 1] -= m * b[i];
    }
    if n > 0 && a[n - 1][0] == 0.0 {
        a[n - 1][0] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= a[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= a[i][2] * x[i + 2];
        }
        x[i] = s / a[i][0];
    }
    x
}

/// Unit eigenvector for an accurately known eigenvalue, first significant
/// component positive.
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let (lo, hi) = gershgorin(diag, off);
    let norm_t = lo.abs().max(hi.abs()).max(1.0);
    let shift = lambda + 1e-14 * norm_t;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..4 {
        let mut w = solve_shifted(diag, off, shift, &v);
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= nrm);
        v = w;
    }
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * vmax) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// (T v)_i.
pub fn apply(diag: &[f64], off: &[f64], v: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += off[i] * v[i + 1];
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn count_two_by_two() {
        // [[1, -1], [-1, 3]]: eigenvalues 2 -+ sqrt(2)
        let (d, e) = ([1.0, 3.0], [-1.0]);
        assert_eq!(sturm_count(&d, &e, 0.0), 0);
        assert_eq!(sturm_count(&d, &e, 1.0), 1);
        assert_eq!(sturm_count(&d, &e, 4.0), 2);
    }

    #[test]
    fn clean_chain_spectrum() {
        let n = 60;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let ev = lowest_eigenvalues(&d, &e, 8);
        for (k, &v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n as f64 + 1.0)).cos();
            assert!((v - exact).abs() < 1e-13, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let n = 500;
        let d: Vec<f64> = (0..n).map(|i| 2.0 + (i as f64 * 0.37).sin()).collect();
        let e = vec![-1.0; n - 1];
        for lam in lowest_eigenvalues(&d, &e, 5) {
            let v = eigenvector(&d, &e, lam);
            let tv = apply(&d, &e, &v);
            let res: f64 = tv.iter().zip(&v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-10, "{res}");
            let first = v.iter().find(|x| x.abs() > 1e-8).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn solve_matches_apply() {
        let d = [4.0, -1.0, 3.0, 0.5, 2.0];
        let e = [1.0, 2.0, -1.5, 0.7];
        let x = [0.3, -1.0, 2.0, 0.1, -0.4];
        let b: Vec<f64> = apply(&d, &e, &x);
        let y = solve_shifted(&d, &e, 0.0, &b);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
