//! Uniform periodic grid on the box [-L, L)^3.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRID_DIM: u32 = 3;

/// Grid description: n samples per axis (power of two, n >= 8) on a box of
/// half-width L, spacing h = 2L/n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: u32,
    n: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(dim: u32, n: usize, half_width: f64) -> Result<Self> {
        if dim != GRID_DIM {
            return Err(Error::parameter(format!(
                "field grids are three-dimensional (got dim = {dim})"
            )));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::parameter(format!(
                "samples per axis must be a power of two >= 8 (got {n})"
            )));
        }
        if half_width <= 0.0 || !half_width.is_finite() {
            return Err(Error::parameter(format!(
                "box half-width must be positive (got {half_width})"
            )));
        }
        Ok(GridSpec { dim, n, half_width })
    }

    pub fn cubic(n: usize, half_width: f64) -> Result<Self> {
        GridSpec::new(GRID_DIM, n, half_width)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Total number of samples n^3.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical coordinate of axis index i: -L + i·h.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    /// Signed frequency of axis index i: (π/L)·k with k the wrapped index in
    /// {-n/2, ..., n/2 - 1}.
    pub fn freq(&self, i: usize) -> f64 {
        let k = if i < self.n / 2 {
            i as f64
        } else {
            i as f64 - self.n as f64
        };
        std::f64::consts::PI / self.half_width * k
    }

    /// Smallest nonzero frequency magnitude π/L.
    pub fn min_freq(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Quadrature weight h^3 for sums over physical samples.
    pub fn weight_phys(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }

    /// Quadrature weight h^3/n^3 for sums over spectral coefficients.
    pub fn weight_spec(&self) -> f64 {
        self.weight_phys() / self.len() as f64
    }

    /// Decompose a flat row-major index into (i, j, k).
    pub fn unravel(&self, flat: usize) -> (usize, usize, usize) {
        let k = flat % self.n;
        let j = (flat / self.n) % self.n;
        let i = flat / (self.n * self.n);
        (i, j, k)
    }

    /// Squared minimal-image distance of grid point (i, j, k) from the origin.
    pub fn min_image_r2(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = |idx: usize| {
            let x = self.coord(idx).abs();
            x.min(2.0 * self.half_width - x)
        };
        let (dx, dy, dz) = (d(i), d(j), d(k));
        dx * dx + dy * dy + dz * dz
    }
}
