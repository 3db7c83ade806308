//! Periodic channel geometry: boundary height functions, frames, curvature
//! and the boundary-straightening coordinate change.
//!
//! The channel is `{(x1, x2) : 0 <= x1 < gamma, h-(x1) < x2 < h+(x1)}` with
//! smooth periodic height functions given as truncated Fourier series. The
//! straightened coordinates are `y1 = x1`, `y2 = (x2 - h-)/(h+ - h-)`.

use crate::error::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Truncated Fourier series `mean + sum_m cos_m cos(2 pi m x / period) + sin_m sin(...)`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FourierSeries {
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn constant(c: f64) -> Self {
        Self { mean: c, cos: Vec::new(), sin: Vec::new() }
    }

    pub fn is_constant(&self) -> bool {
        self.cos.iter().chain(self.sin.iter()).all(|c| *c == 0.0)
    }

    /// Value, first and second derivative at `x` for the given period.
    pub fn eval(&self, x: f64, period: f64) -> (f64, f64, f64) {
        let base = 2.0 * std::f64::consts::PI / period;
        let mut v = self.mean;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        let modes = self.cos.len().max(self.sin.len());
        for m in 1..=modes {
            let k = base * m as f64;
            let (s, c) = (k * x).sin_cos();
            let a = self.cos.get(m - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(m - 1).copied().unwrap_or(0.0);
            v += a * c + b * s;
            d1 += -a * k * s + b * k * c;
            d2 += -(a * c + b * s) * k * k;
        }
        (v, d1, d2)
    }

    pub fn value(&self, x: f64, period: f64) -> f64 {
        self.eval(x, period).0
    }
}

/// Channel wall identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Bottom,
    Top,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Bottom, Side::Top];
}

/// The periodic channel with its two boundary height functions.
///
/// Invariants established at construction: `h+ - h- >= d > 0` everywhere and
/// the mean gap equals 1 (after optional normalization).
#[derive(Debug, Clone)]
pub struct ChannelGeometry {
    pub gamma: f64,
    pub h_minus: FourierSeries,
    pub h_plus: FourierSeries,
    /// Minimal vertical gap, computed by dense sampling.
    pub d: f64,
    /// Sample count the geometry was built with (frames use this by default).
    pub n1: usize,
}

impl ChannelGeometry {
    /// Build and validate a channel geometry.
    ///
    /// `n1` controls the sampling used for validation; the gap minimum is
    /// taken over a 4x refined sampling. If `normalize_gap` is set, the mean
    /// of `h+` is shifted so the average gap is exactly 1.
    pub fn build(
        gamma: f64,
        h_minus: FourierSeries,
        mut h_plus: FourierSeries,
        n1: usize,
        normalize_gap: bool,
    ) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Geometry(format!("period must be positive, got {gamma}")));
        }
        if n1 < 4 {
            return Err(Error::Geometry(format!("need at least 4 samples, got {n1}")));
        }
        let mean_gap = h_plus.mean - h_minus.mean;
        if (mean_gap - 1.0).abs() > 1e-12 {
            if normalize_gap {
                h_plus.mean = h_minus.mean + 1.0;
            } else {
                return Err(Error::MeanGapNotUnit { mean_gap });
            }
        }
        // Dense minimum of the gap; 4x the spectral sampling is conservative
        // for the low mode counts allowed here.
        let fine = 4 * n1;
        let mut d = f64::INFINITY;
        for i in 0..fine {
            let x1 = gamma * i as f64 / fine as f64;
            let gap = h_plus.value(x1, gamma) - h_minus.value(x1, gamma);
            if gap <= 0.0 {
                return Err(Error::BoundariesIntersect { x1, gap });
            }
            d = d.min(gap);
        }
        Ok(Self { gamma, h_minus, h_plus, d, n1 })
    }

    /// Flat channel of period `gamma` with `h- = 0`, `h+ = 1`.
    pub fn flat(gamma: f64, n1: usize) -> Self {
        Self::build(
            gamma,
            FourierSeries::constant(0.0),
            FourierSeries::constant(1.0),
            n1,
            false,
        )
        .expect("flat channel is always valid")
    }

    pub fn series(&self, side: Side) -> &FourierSeries {
        match side {
            Side::Bottom => &self.h_minus,
            Side::Top => &self.h_plus,
        }
    }

    /// Height, slope and second derivative of one wall at `x1`.
    pub fn wall(&self, side: Side, x1: f64) -> (f64, f64, f64) {
        self.series(side).eval(x1, self.gamma)
    }

    /// Vertical gap `h+(x1) - h-(x1)`.
    pub fn gap(&self, x1: f64) -> f64 {
        self.h_plus.value(x1, self.gamma) - self.h_minus.value(x1, self.gamma)
    }

    pub fn is_flat(&self) -> bool {
        self.h_minus.is_constant() && self.h_plus.is_constant()
    }

    /// Both walls share the profile shape (`h+ = 1 + h-`).
    pub fn has_identical_profiles(&self) -> bool {
        let m = &self.h_minus;
        let p = &self.h_plus;
        let modes = m.cos.len().max(p.cos.len()).max(m.sin.len()).max(p.sin.len());
        let coef = |v: &Vec<f64>, i: usize| v.get(i).copied().unwrap_or(0.0);
        (p.mean - m.mean - 1.0).abs() < 1e-12
            && (0..modes).all(|i| {
                (coef(&p.cos, i) - coef(&m.cos, i)).abs() < 1e-12
                    && (coef(&p.sin, i) - coef(&m.sin, i)).abs() < 1e-12
            })
    }

    /// Signed curvature of one wall at `x1`, with the outward-normal sign
    /// convention: `kappa = +/- (1 + h'^2)^(-3/2) h''` (+ on top, - on bottom).
    pub fn curvature(&self, side: Side, x1: f64) -> f64 {
        let (_, d1, d2) = self.wall(side, x1);
        let sign = match side {
            Side::Top => 1.0,
            Side::Bottom => -1.0,
        };
        sign * d2 * (1.0 + d1 * d1).powf(-1.5)
    }

    /// Outward unit normal, unit tangent (`tau = n_perp`), curvature and
    /// arc-length weight sampled at `n1` uniform `x1` stations.
    pub fn frame(&self, side: Side, n1: usize) -> BoundaryFrame {
        let mut f = BoundaryFrame {
            side,
            n1: vec![0.0; n1],
            n2: vec![0.0; n1],
            tau1: vec![0.0; n1],
            tau2: vec![0.0; n1],
            kappa: vec![0.0; n1],
            sprime: vec![0.0; n1],
        };
        let sign = match side {
            Side::Top => 1.0,
            Side::Bottom => -1.0,
        };
        for i in 0..n1 {
            let x1 = self.gamma * i as f64 / n1 as f64;
            let (_, d1, d2) = self.wall(side, x1);
            let s = (1.0 + d1 * d1).sqrt();
            // n = +/- (-h', 1)/s', tau = n_perp with a_perp = (-a2, a1)
            f.n1[i] = sign * (-d1) / s;
            f.n2[i] = sign / s;
            f.tau1[i] = -f.n2[i];
            f.tau2[i] = f.n1[i];
            f.kappa[i] = sign * d2 / (s * s * s);
            f.sprime[i] = s;
        }
        f
    }
}

/// Per-sample outward frame of one wall.
#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    pub side: Side,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    pub tau1: Vec<f64>,
    pub tau2: Vec<f64>,
    pub kappa: Vec<f64>,
    pub sprime: Vec<f64>,
}

impl BoundaryFrame {
    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }
}

/// Slip coefficient of one wall: a positive constant or a Fourier series in `x1`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SlipCoeff {
    Constant(f64),
    Varying(FourierSeries),
}

impl SlipCoeff {
    pub fn value(&self, x1: f64, period: f64) -> f64 {
        match self {
            SlipCoeff::Constant(a) => *a,
            SlipCoeff::Varying(s) => s.value(x1, period),
        }
    }

    /// Arc-length-free derivative d/dx1 (used for W^{1,inf} norms).
    pub fn slope(&self, x1: f64, period: f64) -> f64 {
        match self {
            SlipCoeff::Constant(_) => 0.0,
            SlipCoeff::Varying(s) => s.eval(x1, period).1,
        }
    }
}

/// Slip coefficients for both walls.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SlipSpec {
    pub bottom: SlipCoeff,
    pub top: SlipCoeff,
}

impl SlipSpec {
    pub fn constant(alpha: f64) -> Self {
        Self { bottom: SlipCoeff::Constant(alpha), top: SlipCoeff::Constant(alpha) }
    }

    pub fn coeff(&self, side: Side) -> &SlipCoeff {
        match side {
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    /// Validate positivity on a sampling of both walls.
    pub fn validate(&self, geom: &ChannelGeometry, n1: usize) -> Result<()> {
        for side in Side::BOTH {
            for i in 0..n1 {
                let x1 = geom.gamma * i as f64 / n1 as f64;
                let a = self.coeff(side).value(x1, geom.gamma);
                if !(a > 0.0) {
                    return Err(Error::Params(format!(
                        "slip coefficient must be positive, got {a} at x1 = {x1} ({side:?})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Effective slip length `L_s = 1/(2 alpha)` when both walls share one constant.
    pub fn slip_length(&self) -> Option<f64> {
        match (&self.bottom, &self.top) {
            (SlipCoeff::Constant(a), SlipCoeff::Constant(b)) if a == b => Some(1.0 / (2.0 * a)),
            _ => None,
        }
    }

    /// Sampled values on one wall.
    pub fn sample(&self, geom: &ChannelGeometry, side: Side, n1: usize) -> Vec<f64> {
        (0..n1)
            .map(|i| self.coeff(side).value(geom.gamma * i as f64 / n1 as f64, geom.gamma))
            .collect()
    }
}

/// Metric data of the boundary-straightening change of variables on an
/// `n1 x (n2+1)` grid of the straightened domain.
///
/// `a11, a12, a22` are the coefficients of the straightened operator
/// `L phi = d_l (a_kl d_k phi)`, computed from the defining formula
/// `|det grad Phi|^{-1} (grad Phi)(grad Phi)^T` composed with the inverse map.
#[derive(Debug, Clone)]
pub struct CoordinateMap {
    pub n1: usize,
    pub n2: usize,
    pub gamma: f64,
    /// Gap `h+ - h-` per `x1` station.
    pub gap: Vec<f64>,
    /// d/dx1 of the gap.
    pub gap_d1: Vec<f64>,
    /// `h-'` per station.
    pub hm_d1: Vec<f64>,
    pub a11: Vec<f64>,
    pub a12: Array2<f64>,
    pub a22: Array2<f64>,
    /// `sigma = h-' + (h+' - h-') y2`, the off-diagonal entry of grad Psi.
    pub sigma: Array2<f64>,
    /// Numerical ellipticity constant (exact minimal eigenvalue over nodes).
    pub ellipticity: f64,
}

impl CoordinateMap {
    pub fn build(geom: &ChannelGeometry, n1: usize, n2: usize) -> Result<Self> {
        let mut gap = vec![0.0; n1];
        let mut gap_d1 = vec![0.0; n1];
        let mut hm_d1 = vec![0.0; n1];
        for i in 0..n1 {
            let x1 = geom.gamma * i as f64 / n1 as f64;
            let (hm, hm1, _) = geom.wall(Side::Bottom, x1);
            let (hp, hp1, _) = geom.wall(Side::Top, x1);
            gap[i] = hp - hm;
            gap_d1[i] = hp1 - hm1;
            hm_d1[i] = hm1;
        }
        let rows = n2 + 1;
        let mut a12 = Array2::zeros((rows, n1));
        let mut a22 = Array2::zeros((rows, n1));
        let mut sigma = Array2::zeros((rows, n1));
        let mut ellipticity = f64::INFINITY;
        for j in 0..rows {
            let y2 = j as f64 / n2 as f64;
            for i in 0..n1 {
                let s = hm_d1[i] + gap_d1[i] * y2;
                sigma[[j, i]] = s;
                let a11 = gap[i];
                let a12v = -s;
                let a22v = (1.0 + s * s) / gap[i];
                a12[[j, i]] = a12v;
                a22[[j, i]] = a22v;
                // exact minimal eigenvalue of the symmetric 2x2 block
                let tr = a11 + a22v;
                let disc = ((a11 - a22v).powi(2) + 4.0 * a12v * a12v).sqrt();
                ellipticity = ellipticity.min(0.5 * (tr - disc));
            }
        }
        if ellipticity < 1e-8 {
            return Err(Error::DegenerateMetric { constant: ellipticity });
        }
        Ok(Self {
            n1,
            n2,
            gamma: geom.gamma,
            gap,
            gap_d1,
            hm_d1,
            a11: geom_a11(geom, n1),
            a12,
            a22,
            sigma,
            ellipticity,
        })
    }
}

fn geom_a11(geom: &ChannelGeometry, n1: usize) -> Vec<f64> {
    (0..n1)
        .map(|i| {
            let x1 = geom.gamma * i as f64 / n1 as f64;
            geom.gap(x1)
        })
        .collect()
}

/// Map direction for [`map_points`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    /// Physical channel coordinates to straightened coordinates.
    Forward,
    /// Straightened coordinates back to the channel.
    Inverse,
}

/// Map a batch of points through the boundary-straightening change of
/// variables. Out-of-domain points are reported with their index.
pub fn map_points(
    geom: &ChannelGeometry,
    points: &[[f64; 2]],
    direction: MapDirection,
) -> Result<Vec<[f64; 2]>> {
    let tol = 1e-12;
    let mut out = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        let [c1, c2] = *p;
        match direction {
            MapDirection::Forward => {
                let hm = geom.h_minus.value(c1, geom.gamma);
                let hp = geom.h_plus.value(c1, geom.gamma);
                if c2 < hm - tol || c2 > hp + tol {
                    return Err(Error::PointOutsideDomain { index, x1: c1, x2: c2 });
                }
                out.push([c1, (c2 - hm) / (hp - hm)]);
            }
            MapDirection::Inverse => {
                if c2 < -tol || c2 > 1.0 + tol {
                    return Err(Error::PointOutsideDomain { index, x1: c1, x2: c2 });
                }
                let hm = geom.h_minus.value(c1, geom.gamma);
                let hp = geom.h_plus.value(c1, geom.gamma);
                out.push([c1, hm + (hp - hm) * c2]);
            }
        }
    }
    Ok(out)
}
