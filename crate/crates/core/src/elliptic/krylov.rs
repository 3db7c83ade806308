//! Right-preconditioned BiCGstab on grid arrays.
//!
//! Right preconditioning keeps the tracked residual equal to the true
//! residual of the original system. All reductions are fixed-order sums, so
//! solves are bitwise deterministic.

use crate::error::{Error, Result};
use ndarray::Array2;

pub struct KrylovStats {
    pub iterations: usize,
    pub rel_residual: f64,
}

fn dot(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &Array2<f64>) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` with `apply = A` and `precond ~ A^-1`, starting from `x`.
pub fn bicgstab<A, M>(
    apply: A,
    precond: M,
    b: &Array2<f64>,
    x: &mut Array2<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<KrylovStats>
where
    A: Fn(&Array2<f64>) -> Array2<f64>,
    M: Fn(&Array2<f64>) -> Array2<f64>,
{
    let mut r = b - &apply(x);
    // boundary data may carry the whole problem while b itself is zero, so
    // scale by the larger of ||b|| and the initial residual
    let b_norm = norm(b).max(norm(&r)).max(f64::MIN_POSITIVE);
    let mut res = norm(&r) / b_norm;
    if res <= tol {
        return Ok(KrylovStats { iterations: 0, rel_residual: res });
    }
    let r_hat = r.clone();
    let mut rho = dot(&r_hat, &r);
    let mut p = r.clone();
    for iter in 1..=max_iter {
        let y = precond(&p);
        let v = apply(&y);
        let denom = dot(&r_hat, &v);
        if denom.abs() < f64::MIN_POSITIVE {
            return Err(Error::SolverDiverged { iterations: iter, residual: res });
        }
        let alpha = rho / denom;
        let s = &r - &v.mapv(|t| t * alpha);
        let s_res = norm(&s) / b_norm;
        if s_res <= tol {
            x.scaled_add(alpha, &y);
            return Ok(KrylovStats { iterations: iter, rel_residual: s_res });
        }
        let z = precond(&s);
        let t = apply(&z);
        let tt = dot(&t, &t);
        if tt < f64::MIN_POSITIVE {
            return Err(Error::SolverDiverged { iterations: iter, residual: s_res });
        }
        let omega = dot(&t, &s) / tt;
        x.scaled_add(alpha, &y);
        x.scaled_add(omega, &z);
        r = &s - &t.mapv(|v| v * omega);
        res = norm(&r) / b_norm;
        if res <= tol {
            return Ok(KrylovStats { iterations: iter, rel_residual: res });
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < f64::MIN_POSITIVE || omega.abs() < f64::MIN_POSITIVE {
            return Err(Error::SolverDiverged { iterations: iter, residual: res });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = &r + &(&p - &v.mapv(|t| t * omega)).mapv(|t| t * beta);
    }
    Err(Error::SolverDiverged { iterations: max_iter, residual: res })
}
