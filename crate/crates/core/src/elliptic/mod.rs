//! Elliptic solves on the mapped domain.
//!
//! The straightened operator is `L phi = d_l (a_kl d_k phi)`; a solve of the
//! physical problem `sigma phi - lap phi = q` becomes
//! `sigma (h+ - h-) phi - L phi = (h+ - h-) q`.
//!
//! Two paths share one discretization (spectral `d/dy1`, conservative
//! second-order fluxes in `y2`):
//! * flat channels: direct per-Fourier-mode tridiagonal solves;
//! * curved channels: matrix-free BiCGstab, right-preconditioned by the
//!   constant-coefficient tridiagonal solver.
//! On a flat channel both paths assemble the identical linear system, so they
//! agree to solver precision.

mod krylov;
mod tridiag;

pub use krylov::KrylovStats;

use crate::error::{Error, Result};
use crate::fields::{
    d_y2_arr, integrate_area_arr, physical_gradient, vector_gradient, Domain, ScalarField,
    VectorField,
};
use crate::geometry::{Side, SlipSpec};
use ndarray::Array2;
use num_complex::Complex;

#[derive(Debug, Clone, Copy)]
pub struct SolveOpts {
    pub tol: f64,
    pub max_iter: usize,
    /// Force the generic Krylov path even on flat channels (used by tests and
    /// the flat-vs-generic agreement check).
    pub force_generic: bool,
}

impl Default for SolveOpts {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 800, force_generic: false }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iterations: usize,
    pub rel_residual: f64,
}

/// `sigma * gap * phi - L phi` on interior rows (walls zeroed).
///
/// The `y2` fluxes are evaluated at half nodes in conservative form; the
/// cross flux `a21 d2 phi` entering the `y1` derivative uses the node-based
/// `d/dy2` with the error-matched wall closure.
pub fn apply_shifted(domain: &Domain, sigma: f64, phi: &Array2<f64>) -> Array2<f64> {
    let n1 = domain.grid.n1;
    let n2 = domain.grid.n2;
    let dy = domain.grid.dy2();
    let map = &domain.map;
    let p1 = domain.fft.deriv_y1(phi, domain.geom.gamma);
    let p2 = d_y2_arr(domain, phi);
    // F1 = a11 p1 + a12 p2 at nodes
    let mut f1 = Array2::zeros((n2 + 1, n1));
    for j in 0..=n2 {
        for i in 0..n1 {
            f1[[j, i]] = map.a11[i] * p1[[j, i]] + map.a12[[j, i]] * p2[[j, i]];
        }
    }
    let term1 = domain.fft.deriv_y1(&f1, domain.geom.gamma);
    let mut out = Array2::zeros((n2 + 1, n1));
    // half-node fluxes F2(j+1/2) for rows of the interior divergence
    let mut flux_lo = vec![0.0; n1];
    let mut flux_hi = vec![0.0; n1];
    for i in 0..n1 {
        flux_lo[i] = half_flux(map, &p1, phi, dy, 0, i);
    }
    for j in 1..n2 {
        for i in 0..n1 {
            flux_hi[i] = half_flux(map, &p1, phi, dy, j, i);
            let lap = term1[[j, i]] + (flux_hi[i] - flux_lo[i]) / dy;
            out[[j, i]] = sigma * map.gap[i] * phi[[j, i]] - lap;
        }
        std::mem::swap(&mut flux_lo, &mut flux_hi);
    }
    out
}

/// Conservative `y2` flux at the half node between rows `j` and `j+1`.
#[inline]
fn half_flux(
    map: &crate::geometry::CoordinateMap,
    p1: &Array2<f64>,
    phi: &Array2<f64>,
    dy: f64,
    j: usize,
    i: usize,
) -> f64 {
    let a12h = 0.5 * (map.a12[[j, i]] + map.a12[[j + 1, i]]);
    let a22h = 0.5 * (map.a22[[j, i]] + map.a22[[j + 1, i]]);
    let p1h = 0.5 * (p1[[j, i]] + p1[[j + 1, i]]);
    a12h * p1h + a22h * (phi[[j + 1, i]] - phi[[j, i]]) / dy
}

/// Direct per-mode tridiagonal solve of the constant-coefficient problem
/// `(sigma hbar + c1 k^2) phi - c2 d2^2 phi = rhs` with Dirichlet walls.
fn flat_dirichlet(
    domain: &Domain,
    sigma: f64,
    c1: f64,
    c2: f64,
    hbar: f64,
    rhs: &Array2<f64>,
    g_bottom: &[f64],
    g_top: &[f64],
) -> Array2<f64> {
    let n1 = domain.grid.n1;
    let n2 = domain.grid.n2;
    let dy = domain.grid.dy2();
    let idy2 = 1.0 / (dy * dy);
    let base = std::f64::consts::TAU / domain.geom.gamma;
    let nyquist = n1 / 2;

    // spectra of rhs rows and wall data
    let mut spec = Array2::from_elem((n2 + 1, n1), Complex::new(0.0, 0.0));
    let mut buf = vec![Complex::new(0.0, 0.0); n1];
    for j in 0..=n2 {
        domain.fft.forward_row(rhs.row(j).as_slice().expect("contiguous"), &mut buf);
        for i in 0..n1 {
            spec[[j, i]] = buf[i];
        }
    }
    let gb = domain.fft.spectrum(g_bottom);
    let gt = domain.fft.spectrum(g_top);

    let rows = n2 + 1;
    let mut lower = vec![0.0; rows];
    let mut diag = vec![0.0; rows];
    let mut upper = vec![0.0; rows];
    let mut col = vec![Complex::new(0.0, 0.0); rows];
    let mut scratch = Vec::new();
    for m in 0..n1 {
        // the Nyquist derivative is zeroed, so its symbol is zero too
        let wave = if m == nyquist { 0.0 } else { base * domain.fft.wave(m) as f64 };
        let k2 = wave * wave;
        diag[0] = 1.0;
        upper[0] = 0.0;
        diag[n2] = 1.0;
        lower[n2] = 0.0;
        col[0] = gb[m];
        col[n2] = gt[m];
        for j in 1..n2 {
            lower[j] = -c2 * idy2;
            upper[j] = -c2 * idy2;
            diag[j] = sigma * hbar + c1 * k2 + 2.0 * c2 * idy2;
            col[j] = spec[[j, m]];
        }
        tridiag::solve_tridiag(&lower, &diag, &upper, &mut col, &mut scratch);
        for j in 0..rows {
            spec[[j, m]] = col[j];
        }
    }
    // back to sample space
    let mut out = Array2::zeros((rows, n1));
    for j in 0..rows {
        for i in 0..n1 {
            buf[i] = spec[[j, i]];
        }
        domain.fft.inverse_row(&mut buf, out.row_mut(j).as_slice_mut().expect("contiguous"));
    }
    out
}

/// Mean of `a22` over the channel, used by the flat preconditioner.
fn mean_a22(domain: &Domain) -> f64 {
    integrate_area_arr(domain, &domain.map.a22.mapv(|v| v)) / domain.geom.gamma
}

fn mean_gap(domain: &Domain) -> f64 {
    domain.map.gap.iter().sum::<f64>() / domain.grid.n1 as f64
}

/// Solve `sigma phi - lap phi = q` with Dirichlet wall values.
fn solve_shifted(
    domain: &Domain,
    sigma: f64,
    q: &Array2<f64>,
    g_bottom: &[f64],
    g_top: &[f64],
    opts: &SolveOpts,
) -> Result<(Array2<f64>, SolveStats)> {
    let n1 = domain.grid.n1;
    let n2 = domain.grid.n2;
    if domain.is_flat() && !opts.force_generic {
        let phi = flat_dirichlet(domain, sigma, 1.0, 1.0, 1.0, q, g_bottom, g_top);
        return Ok((phi, SolveStats { iterations: 0, rel_residual: 0.0 }));
    }
    // b = gap * q on interior rows
    let mut b = Array2::zeros((n2 + 1, n1));
    for j in 1..n2 {
        for i in 0..n1 {
            b[[j, i]] = domain.map.gap[i] * q[[j, i]];
        }
    }
    // full iterate carries the wall values; Krylov vectors are zero-walled
    let mut x = Array2::zeros((n2 + 1, n1));
    for i in 0..n1 {
        x[[0, i]] = g_bottom[i];
        x[[n2, i]] = g_top[i];
    }
    let c2 = mean_a22(domain);
    let hbar = mean_gap(domain);
    let zero_wall = vec![0.0; n1];
    let apply = |v: &Array2<f64>| apply_shifted(domain, sigma, v);
    let precond = |r: &Array2<f64>| {
        let mut unscaled = r.clone();
        for j in 1..n2 {
            for i in 0..n1 {
                unscaled[[j, i]] /= domain.map.gap[i];
            }
        }
        flat_dirichlet(domain, sigma, 1.0, c2, hbar, &unscaled, &zero_wall, &zero_wall)
    };
    let stats = krylov::bicgstab(apply, precond, &b, &mut x, opts.tol, opts.max_iter)?;
    Ok((x, SolveStats { iterations: stats.iterations, rel_residual: stats.rel_residual }))
}

/// Solve the Poisson problem `lap phi = f` with Dirichlet wall values.
pub fn solve_dirichlet(
    domain: &std::sync::Arc<Domain>,
    f: &Array2<f64>,
    g_bottom: &[f64],
    g_top: &[f64],
    opts: &SolveOpts,
) -> Result<(ScalarField, SolveStats)> {
    let q = f.mapv(|v| -v);
    let (phi, stats) = solve_shifted(domain, 0.0, &q, g_bottom, g_top, opts)?;
    Ok((ScalarField::from_data(domain, phi), stats))
}

/// Solve `sigma phi - lap phi = f` (`sigma > 0`) with Dirichlet wall values.
pub fn solve_helmholtz_dirichlet(
    domain: &std::sync::Arc<Domain>,
    sigma: f64,
    f: &Array2<f64>,
    g_bottom: &[f64],
    g_top: &[f64],
    opts: &SolveOpts,
) -> Result<(ScalarField, SolveStats)> {
    if !(sigma > 0.0) {
        return Err(Error::Params(format!("Helmholtz shift must be positive, got {sigma}")));
    }
    let (phi, stats) = solve_shifted(domain, sigma, f, g_bottom, g_top, opts)?;
    Ok((ScalarField::from_data(domain, phi), stats))
}

/// Harmonic lift `chi` with `chi = 0` on the bottom wall and `1` on the top,
/// cached on the domain.
pub fn harmonic_lift<'a>(domain: &'a std::sync::Arc<Domain>, opts: &SolveOpts) -> &'a Array2<f64> {
    domain.lift.get_or_init(|| {
        let zeros = Array2::zeros((domain.grid.rows(), domain.grid.n1));
        let ones = vec![1.0; domain.grid.n1];
        let zero = vec![0.0; domain.grid.n1];
        let (chi, _) = solve_shifted(domain, 0.0, &zeros, &zero, &ones, opts)
            .expect("harmonic lift solve failed");
        chi
    })
}

/// Mean horizontal flux `(1/|Omega|) int u1 dx`.
pub fn mean_horizontal_flux(u: &VectorField) -> f64 {
    integrate_area_arr(&u.domain, &u.x) / u.domain.geom.gamma
}

pub struct StreamSolution {
    pub phi: ScalarField,
    pub stats: SolveStats,
}

/// Solve for the streamfunction of a vorticity field.
///
/// `phi` solves `lap phi = omega` with `phi = 0` on the bottom wall and the
/// constant `-mean_flux` on the top wall, so `u = grad_perp phi` carries the
/// configured mean horizontal flux and `n.u = 0` on both walls.
pub fn solve_streamfunction(
    domain: &std::sync::Arc<Domain>,
    omega: &ScalarField,
    mean_flux: f64,
    opts: &SolveOpts,
) -> Result<StreamSolution> {
    let zero = vec![0.0; domain.grid.n1];
    let (phi0, stats) = solve_dirichlet(domain, &omega.data, &zero, &zero, opts)?;
    let mut phi = phi0;
    if mean_flux != 0.0 {
        let chi = harmonic_lift(domain, opts);
        phi.data.scaled_add(-mean_flux, chi);
    }
    Ok(StreamSolution { phi, stats })
}

/// `(sum_i ||grad w_i||_2^2)^(1/2)` where `-lap w_i = f_i - mean(f_i)` with
/// homogeneous Dirichlet walls. A computable, scale-monotone stand-in for the
/// `H^-1` norm; flagged as a proxy wherever it is reported.
pub fn hminus1_proxy(f: &VectorField, opts: &SolveOpts) -> Result<f64> {
    let domain = &f.domain;
    let area = domain.geom.gamma;
    let mut total = 0.0;
    let zero = vec![0.0; domain.grid.n1];
    for comp in 0..2 {
        let data = f.component(comp);
        let mean = integrate_area_arr(domain, data) / area;
        let rhs = data.mapv(|v| -(v - mean));
        let (w, _) = solve_dirichlet(domain, &rhs, &zero, &zero, opts)?;
        let g = physical_gradient(&w);
        let mut sq = Array2::zeros(g.x.dim());
        ndarray::azip!((o in &mut sq, a in &g.x, b in &g.y) *o = a * a + b * b);
        total += integrate_area_arr(domain, &sq);
    }
    Ok(total.sqrt())
}

// ---------------------------------------------------------------------------
// Pressure with Neumann data
// ---------------------------------------------------------------------------

pub struct PressureSolution {
    pub p: ScalarField,
    pub stats: SolveStats,
    /// Relative compatibility defect of the Neumann data (subtracted before
    /// the solve; values above 1e-2 indicate an inconsistent state).
    pub compat_defect: f64,
}

/// `L p` in the straightened coordinates evaluated on all rows, with the
/// finite-volume wall closure; prescribed wall fluxes are handled by the
/// right-hand side.
fn apply_neumann(domain: &Domain, p: &Array2<f64>) -> Array2<f64> {
    let n1 = domain.grid.n1;
    let n2 = domain.grid.n2;
    let dy = domain.grid.dy2();
    let map = &domain.map;
    let p1 = domain.fft.deriv_y1(p, domain.geom.gamma);
    let p2 = d_y2_arr(domain, p);
    let mut f1 = Array2::zeros((n2 + 1, n1));
    for j in 0..=n2 {
        for i in 0..n1 {
            f1[[j, i]] = map.a11[i] * p1[[j, i]] + map.a12[[j, i]] * p2[[j, i]];
        }
    }
    let term1 = domain.fft.deriv_y1(&f1, domain.geom.gamma);
    let mut out = Array2::zeros((n2 + 1, n1));
    let mut flux = Array2::zeros((n2, n1));
    for j in 0..n2 {
        for i in 0..n1 {
            flux[[j, i]] = half_flux(map, &p1, p, dy, j, i);
        }
    }
    for i in 0..n1 {
        out[[0, i]] = term1[[0, i]] + flux[[0, i]] / (0.5 * dy);
        out[[n2, i]] = term1[[n2, i]] - flux[[n2 - 1, i]] / (0.5 * dy);
    }
    for j in 1..n2 {
        for i in 0..n1 {
            out[[j, i]] = term1[[j, i]] + (flux[[j, i]] - flux[[j - 1, i]]) / dy;
        }
    }
    out
}

/// Flat constant-coefficient Neumann preconditioner (per-mode tridiagonal;
/// the singular mean mode is pinned at one node).
fn flat_neumann(domain: &Domain, c1: f64, c2: f64, rhs: &Array2<f64>) -> Array2<f64> {
    let n1 = domain.grid.n1;
    let n2 = domain.grid.n2;
    let dy = domain.grid.dy2();
    let idy2 = 1.0 / (dy * dy);
    let base = std::f64::consts::TAU / domain.geom.gamma;
    let nyquist = n1 / 2;
    let rows = n2 + 1;
    let mut spec = Array2::from_elem((rows, n1), Complex::new(0.0, 0.0));
    let mut buf = vec![Complex::new(0.0, 0.0); n1];
    for j in 0..rows {
        domain.fft.forward_row(rhs.row(j).as_slice().expect("contiguous"), &mut buf);
        for i in 0..n1 {
            spec[[j, i]] = buf[i];
        }
    }
    let mut lower = vec![0.0; rows];
    let mut diag = vec![0.0; rows];
    let mut upper = vec![0.0; rows];
    let mut col = vec![Complex::new(0.0, 0.0); rows];
    let mut scratch = Vec::new();
    for m in 0..n1 {
        let wave = if m == nyquist { 0.0 } else { base * domain.fft.wave(m) as f64 };
        let k2 = wave * wave;
        for j in 1..n2 {
            lower[j] = c2 * idy2;
            upper[j] = c2 * idy2;
            diag[j] = -(c1 * k2 + 2.0 * c2 * idy2);
            col[j] = spec[[j, m]];
        }
        diag[0] = -(c1 * k2) - 2.0 * c2 * idy2;
        upper[0] = 2.0 * c2 * idy2;
        lower[0] = 0.0;
        diag[n2] = -(c1 * k2) - 2.0 * c2 * idy2;
        lower[n2] = 2.0 * c2 * idy2;
        upper[n2] = 0.0;
        col[0] = spec[[0, m]];
        col[n2] = spec[[n2, m]];
        if m == 0 {
            // pin the mean mode
            diag[0] = 1.0;
            upper[0] = 0.0;
            col[0] = Complex::new(0.0, 0.0);
        }
        tridiag::solve_tridiag(&lower, &diag, &upper, &mut col, &mut scratch);
        for j in 0..rows {
            spec[[j, m]] = col[j];
        }
    }
    let mut out = Array2::zeros((rows, n1));
    for j in 0..rows {
        for i in 0..n1 {
            buf[i] = spec[[j, i]];
        }
        domain.fft.inverse_row(&mut buf, out.row_mut(j).as_slice_mut().expect("contiguous"));
    }
    out
}

/// Solve `lap p = rhs` with Neumann data `n . grad p = g` on the walls.
/// The compatibility defect is subtracted from `rhs` and reported; the
/// solution is normalized to zero area mean.
pub fn solve_neumann(
    domain: &std::sync::Arc<Domain>,
    rhs: &Array2<f64>,
    g_bottom: &[f64],
    g_top: &[f64],
    opts: &SolveOpts,
) -> Result<PressureSolution> {
    let n1 = domain.grid.n1;
    let n2 = domain.grid.n2;
    let dy = domain.grid.dy2();
    let map = &domain.map;
    // assembled right-hand side: gap * rhs everywhere, wall fluxes folded in
    let mut b = Array2::zeros((n2 + 1, n1));
    for j in 0..=n2 {
        for i in 0..n1 {
            b[[j, i]] = map.gap[i] * rhs[[j, i]];
        }
    }
    for i in 0..n1 {
        let w_bottom = -domain.bottom.sprime[i] * g_bottom[i];
        let w_top = domain.top.sprime[i] * g_top[i];
        b[[0, i]] += w_bottom / (0.5 * dy);
        b[[n2, i]] -= w_top / (0.5 * dy);
    }
    // compatibility: the weighted sum of b must vanish
    let w1 = domain.geom.gamma / n1 as f64;
    let mut defect = 0.0;
    let mut scale = 0.0;
    for j in 0..=n2 {
        let wj = if j == 0 || j == n2 { 0.5 * dy } else { dy };
        for i in 0..n1 {
            defect += wj * w1 * b[[j, i]];
            scale += wj * w1 * b[[j, i]].abs();
        }
    }
    let compat_defect = defect.abs() / scale.max(f64::MIN_POSITIVE);
    let correction = defect / domain.geom.gamma;
    for j in 0..=n2 {
        for i in 0..n1 {
            b[[j, i]] -= map.gap[i] * correction;
        }
    }
    let c2 = mean_a22(domain);
    let apply = |v: &Array2<f64>| apply_neumann(domain, v);
    let precond = |r: &Array2<f64>| {
        let mut unscaled = r.clone();
        for j in 0..=n2 {
            for i in 0..n1 {
                unscaled[[j, i]] /= map.gap[i];
            }
        }
        flat_neumann(domain, 1.0, c2, &unscaled)
    };
    let mut x = Array2::zeros((n2 + 1, n1));
    let stats = krylov::bicgstab(apply, precond, &b, &mut x, opts.tol, opts.max_iter)?;
    // zero-mean pinning
    let mean = integrate_area_arr(domain, &x) / domain.geom.gamma;
    x.mapv_inplace(|v| v - mean);
    Ok(PressureSolution {
        p: ScalarField::from_data(domain, x),
        stats: SolveStats { iterations: stats.iterations, rel_residual: stats.rel_residual },
        compat_defect,
    })
}

/// Assemble and solve the pressure problem of the momentum balance:
/// `lap p = -Pr^-1 grad u : grad u^T + Ra d2 theta` with
/// `n . grad p = -Pr^-1 kappa u_tau^2 + 2 tau.grad((alpha+kappa) u_tau) + n2 Ra theta`.
pub fn solve_pressure_neumann(
    u: &VectorField,
    theta: &ScalarField,
    ra: f64,
    pr: f64,
    slip: &SlipSpec,
    opts: &SolveOpts,
) -> Result<PressureSolution> {
    let domain = &u.domain;
    let n1 = domain.grid.n1;
    let g = vector_gradient(u);
    let mut rhs = Array2::zeros((domain.grid.rows(), n1));
    ndarray::azip!((o in &mut rhs, xx in &g.xx, xy in &g.xy, yx in &g.yx, yy in &g.yy) {
        *o = -(xx * xx + 2.0 * xy * yx + yy * yy) / pr;
    });
    if domain.grid.dealias {
        domain.fft.dealias(&mut rhs);
    }
    let dtheta = physical_gradient(theta);
    rhs.scaled_add(ra, &dtheta.y);

    let mut walls: [Vec<f64>; 2] = [vec![0.0; n1], vec![0.0; n1]];
    for (w, side) in walls.iter_mut().zip(Side::BOTH) {
        let frame = domain.frame(side);
        let utau = crate::fields::tangential_velocity(u, side);
        let alpha = slip.sample(&domain.geom, side, n1);
        let theta_wall = theta.wall_trace(side);
        // tangential derivative of (alpha + kappa) u_tau along the wall
        let prod: Vec<f64> = (0..n1)
            .map(|i| (alpha[i] + frame.kappa[i]) * utau[i])
            .collect();
        let dprod = domain.fft.deriv_row(&prod, domain.geom.gamma);
        for i in 0..n1 {
            let tangential = frame.tau1[i] * dprod[i];
            w[i] = -frame.kappa[i] * utau[i] * utau[i] / pr
                + 2.0 * tangential
                + frame.n2[i] * ra * theta_wall[i];
        }
    }
    solve_neumann(domain, &rhs, &walls[0], &walls[1], opts)
}

#[cfg(test)]
mod tests;
