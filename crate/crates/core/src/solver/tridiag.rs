/// Thomas algorithm for `A x = rhs` with `A` tridiagonal.
///
/// `lower[i]` is `A[i][i-1]` (so `lower[0]` is ignored), `upper[i]` is
/// `A[i][i+1]` (`upper[n-1]` ignored). No pivoting: callers must supply a
/// diagonally dominant matrix. `scratch` must have the same length as `rhs`.
pub fn solve(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
    x: &mut [f64],
    scratch: &mut [f64],
) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n && x.len() == n);
    debug_assert!(scratch.len() >= n);

    let mut beta = diag[0];
    x[0] = rhs[0] / beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= scratch[i + 1] * next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [ 4 1 0 ] [x0]   [ 6]
        // [ 1 4 1 ] [x1] = [12]
        // [ 0 1 4 ] [x2]   [14]
        let lower = [0.0, 1.0, 1.0];
        let diag = [4.0, 4.0, 4.0];
        let upper = [1.0, 1.0, 0.0];
        let rhs = [6.0, 12.0, 14.0];
        let mut x = [0.0; 3];
        let mut s = [0.0; 3];
        solve(&lower, &diag, &upper, &rhs, &mut x, &mut s);
        for i in 0..3 {
            let mut ax = diag[i] * x[i];
            if i > 0 {
                ax += lower[i] * x[i - 1];
            }
            if i < 2 {
                ax += upper[i] * x[i + 1];
            }
            assert!((ax - rhs[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn single_unknown() {
        let mut x = [0.0];
        let mut s = [0.0];
        solve(&[0.0], &[2.0], &[0.0], &[3.0], &mut x, &mut s);
        assert_eq!(x[0], 1.5);
    }
}
