//! Discrete fields on the straightened channel grid.
//!
//! The grid is Fourier in `y1` (periodic, `n1` uniform nodes) and a uniform
//! second-order finite-difference grid in `y2` (`n2` intervals, both walls
//! included). Field values are physical-space samples; all differential
//! operators route through the coordinate map of the geometry.

mod ops;
mod snapshot;
mod spectral;

pub use ops::*;
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use spectral::SpectralY1;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryFrame, ChannelGeometry, CoordinateMap, Side};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

/// Discretization of the straightened domain.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct MappedGrid {
    /// Fourier node count in `y1` (even).
    pub n1: usize,
    /// Interval count in `y2`; nodes are `0..=n2` including both walls.
    pub n2: usize,
    /// Apply the 2/3 rule after nonlinear products.
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_true() -> bool {
    true
}

impl MappedGrid {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        let g = Self { n1, n2, dealias: true };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 8 || self.n1 % 2 != 0 {
            return Err(Error::Grid(format!("n1 must be even and >= 8, got {}", self.n1)));
        }
        if self.n2 < 8 {
            return Err(Error::Grid(format!("n2 must be >= 8, got {}", self.n2)));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.n2 + 1
    }

    pub fn dy2(&self) -> f64 {
        1.0 / self.n2 as f64
    }
}

/// Geometry, metric and transform data bundled for field operations.
///
/// Immutable after construction; fields hold it by `Arc` so they stay
/// value-semantic and cheap to hand to diagnostics running concurrently.
#[derive(Debug)]
pub struct Domain {
    pub grid: MappedGrid,
    pub geom: ChannelGeometry,
    pub map: CoordinateMap,
    pub bottom: BoundaryFrame,
    pub top: BoundaryFrame,
    pub fft: SpectralY1,
    /// `dPhi2/dx1` composed with the inverse map (`-sigma / gap`), per node.
    pub j21: Array2<f64>,
    /// `1 / gap` per `x1` station.
    pub inv_gap: Vec<f64>,
    pub x1: Vec<f64>,
    pub y2: Vec<f64>,
    /// Harmonic lift `chi` (0 on the bottom wall, 1 on the top), cached by the
    /// streamfunction solver.
    pub(crate) lift: OnceLock<Array2<f64>>,
}

impl Domain {
    pub fn new(geom: ChannelGeometry, grid: MappedGrid) -> Result<Arc<Self>> {
        grid.validate()?;
        let map = CoordinateMap::build(&geom, grid.n1, grid.n2)?;
        let rows = grid.rows();
        let mut j21 = Array2::zeros((rows, grid.n1));
        for j in 0..rows {
            for i in 0..grid.n1 {
                j21[[j, i]] = -map.sigma[[j, i]] / map.gap[i];
            }
        }
        let inv_gap = map.gap.iter().map(|g| 1.0 / g).collect();
        let x1 = (0..grid.n1).map(|i| geom.gamma * i as f64 / grid.n1 as f64).collect();
        let y2 = (0..rows).map(|j| j as f64 / grid.n2 as f64).collect();
        Ok(Arc::new(Self {
            bottom: geom.frame(Side::Bottom, grid.n1),
            top: geom.frame(Side::Top, grid.n1),
            fft: SpectralY1::new(grid.n1),
            map,
            j21,
            inv_gap,
            x1,
            y2,
            grid,
            geom,
            lift: OnceLock::new(),
        }))
    }

    pub fn frame(&self, side: Side) -> &BoundaryFrame {
        match side {
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    pub fn wall_row(&self, side: Side) -> usize {
        match side {
            Side::Bottom => 0,
            Side::Top => self.grid.n2,
        }
    }

    pub fn is_flat(&self) -> bool {
        self.geom.is_flat()
    }

    /// Physical height `x2` of node `(j, i)`.
    pub fn x2(&self, j: usize, i: usize) -> f64 {
        let hm = self.geom.h_minus.value(self.x1[i], self.geom.gamma);
        hm + self.map.gap[i] * self.y2[j]
    }
}

/// A scalar sample field on the straightened grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub domain: Arc<Domain>,
    pub data: Array2<f64>,
}

impl ScalarField {
    pub fn zeros(domain: &Arc<Domain>) -> Self {
        Self { domain: domain.clone(), data: Array2::zeros((domain.grid.rows(), domain.grid.n1)) }
    }

    pub fn from_data(domain: &Arc<Domain>, data: Array2<f64>) -> Self {
        assert_eq!(data.dim(), (domain.grid.rows(), domain.grid.n1));
        Self { domain: domain.clone(), data }
    }

    /// Sample a function of the straightened coordinates `(y1, y2)`.
    pub fn from_fn(domain: &Arc<Domain>, f: impl Fn(f64, f64) -> f64) -> Self {
        let data = Array2::from_shape_fn((domain.grid.rows(), domain.grid.n1), |(j, i)| {
            f(domain.x1[i], domain.y2[j])
        });
        Self { domain: domain.clone(), data }
    }

    /// Sample a function of the physical coordinates `(x1, x2)`.
    pub fn from_physical_fn(domain: &Arc<Domain>, f: impl Fn(f64, f64) -> f64) -> Self {
        let data = Array2::from_shape_fn((domain.grid.rows(), domain.grid.n1), |(j, i)| {
            f(domain.x1[i], domain.x2(j, i))
        });
        Self { domain: domain.clone(), data }
    }

    pub fn wall_trace(&self, side: Side) -> Vec<f64> {
        self.data.row(self.domain.wall_row(side)).to_vec()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { domain: self.domain.clone(), data: &self.data * c }
    }
}

/// A velocity-like field; components are the physical `(u1, u2)` sampled on
/// the straightened grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub domain: Arc<Domain>,
    pub x: Array2<f64>,
    pub y: Array2<f64>,
}

impl VectorField {
    pub fn zeros(domain: &Arc<Domain>) -> Self {
        let shape = (domain.grid.rows(), domain.grid.n1);
        Self { domain: domain.clone(), x: Array2::zeros(shape), y: Array2::zeros(shape) }
    }

    pub fn component(&self, c: usize) -> &Array2<f64> {
        match c {
            0 => &self.x,
            1 => &self.y,
            _ => panic!("2D field has components 0 and 1"),
        }
    }

    pub fn max_abs(&self) -> (f64, f64) {
        let m = |a: &Array2<f64>| a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        (m(&self.x), m(&self.y))
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { domain: self.domain.clone(), x: &self.x * c, y: &self.y * c }
    }
}

/// Symmetric 2x2 tensor field (e.g. the symmetric velocity gradient).
#[derive(Debug, Clone)]
pub struct SymTensorField {
    pub domain: Arc<Domain>,
    pub xx: Array2<f64>,
    pub xy: Array2<f64>,
    pub yy: Array2<f64>,
}

impl SymTensorField {
    /// Pointwise trace.
    pub fn trace(&self) -> Array2<f64> {
        &self.xx + &self.yy
    }

    /// Pointwise Frobenius inner product with itself: `sum_ij T_ij^2`.
    pub fn frobenius_sq(&self) -> Array2<f64> {
        let mut out = Array2::zeros(self.xx.dim());
        ndarray::azip!((o in &mut out, a in &self.xx, b in &self.xy, c in &self.yy) {
            *o = a * a + 2.0 * b * b + c * c;
        });
        out
    }
}
