//! Thomas algorithm for tridiagonal systems with real coefficients and
//! complex right-hand sides (one system per Fourier mode).

use num_complex::Complex;

/// Solve `lower[j] x[j-1] + diag[j] x[j] + upper[j] x[j+1] = rhs[j]` in place.
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiag(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [Complex<f64>],
    scratch: &mut Vec<f64>,
) {
    let n = diag.len();
    debug_assert_eq!(lower.len(), n);
    debug_assert_eq!(upper.len(), n);
    debug_assert_eq!(rhs.len(), n);
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = diag[0];
    rhs[0] /= beta;
    for j in 1..n {
        scratch[j] = upper[j - 1] / beta;
        beta = diag[j] - lower[j] * scratch[j];
        rhs[j] = (rhs[j] - rhs[j - 1] * lower[j]) / beta;
    }
    for j in (0..n - 1).rev() {
        let next = rhs[j + 1];
        rhs[j] -= next * scratch[j + 1];
    }
}
