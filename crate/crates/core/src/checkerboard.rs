//! Checkerboard approximations `CB_N(A)`: absolutely continuous copulas whose
//! density is constant on each cell `Q_{i,j} = I_i × I_j` of the `N × N` grid.

use alloc::vec::Vec;

#[allow(unused_imports)] // std's inherent float methods take over whenever std is linked
use num_traits::Float;

use crate::empirical::EmpiricalCopula;
use crate::error::{check_unit_square, Error, Result};
use crate::grid::Grid;

/// Masses in `[-MASS_TOLERANCE, 0)` are rounding noise and are clamped to zero.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Maximal deviation of a row or column sum from `1/N`.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

/// Cell masses `μ_A(Q_{i,j})` of a copula at resolution `N`.
///
/// Row `i` is the x-cell, column `j` the y-cell; both are stored zero based,
/// while the public cell-index helpers report the one-based `i_0(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckerboardModel {
    resolution: usize,
    masses: Grid,
    /// `cum[(i, j)] = Σ_{j' < j} masses[(i, j')]`, so `cum[(i, N)]` is the row sum.
    cum: Grid,
    /// `CB_N(A)(i/N, j/N)` recovered from the masses.
    lattice: Grid,
}

impl CheckerboardModel {
    /// Rectangle volumes of `cdf` on the lattice `{0, 1/N, …, 1}²`.
    pub fn from_copula(cdf: impl Fn(f64, f64) -> f64, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        let nf = resolution as f64;
        let grid = Grid::from_fn(resolution + 1, resolution + 1, |i, j| cdf(i as f64 / nf, j as f64 / nf));
        Self::from_copula_grid(&grid)
    }

    /// Checkerboard of the empirical copula `E_n`, built from one lattice sweep.
    pub fn from_empirical(ec: &EmpiricalCopula, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        Self::from_copula_grid(&ec.grid_at_resolution(resolution))
    }

    /// From a `(N+1) × (N+1)` grid of copula values `A(i/N, j/N)`.
    pub fn from_copula_grid(grid: &Grid) -> Result<Self> {
        if grid.rows() != grid.cols() || grid.rows() < 3 {
            return Err(Error::ShapeMismatch { expected: 9, found: grid.rows() * grid.cols() });
        }
        let resolution = grid.rows() - 1;
        let mut masses = Grid::zeros(resolution, resolution);
        for i in 1..=resolution {
            for j in 1..=resolution {
                let mass = grid[(i, j)] - grid[(i - 1, j)] - grid[(i, j - 1)] + grid[(i - 1, j - 1)];
                if mass < -MASS_TOLERANCE {
                    return Err(Error::NotTwoIncreasing { row: i, col: j, mass });
                }
                masses[(i - 1, j - 1)] = mass.max(0.0);
            }
        }
        if margin_drift(&masses) > MARGIN_TOLERANCE {
            sinkhorn(&mut masses);
        }
        Self::from_masses(resolution, masses.into_vec())
    }

    /// From a row-major `N × N` mass matrix, validating the doubly stochastic invariant.
    pub fn from_masses(resolution: usize, masses: Vec<f64>) -> Result<Self> {
        check_resolution(resolution)?;
        let masses = Grid::from_vec(resolution, resolution, masses)?;
        for i in 0..resolution {
            for j in 0..resolution {
                let m = masses[(i, j)];
                if !(m >= 0.0) {
                    return Err(Error::NotTwoIncreasing { row: i + 1, col: j + 1, mass: m });
                }
            }
        }
        let target = 1.0 / resolution as f64;
        for k in 0..resolution {
            let row: f64 = masses.row(k).iter().sum();
            let col: f64 = (0..resolution).map(|i| masses[(i, k)]).sum();
            for sum in [row, col] {
                let deviation = (sum - target).abs();
                if deviation > MARGIN_TOLERANCE {
                    return Err(Error::NonUniformMargins { index: k + 1, deviation });
                }
            }
        }
        let mut cum = Grid::zeros(resolution, resolution + 1);
        for i in 0..resolution {
            let mut acc = 0.0;
            for j in 0..resolution {
                acc += masses[(i, j)];
                cum[(i, j + 1)] = acc;
            }
        }
        let mut lattice = Grid::zeros(resolution + 1, resolution + 1);
        for i in 1..=resolution {
            for j in 0..=resolution {
                lattice[(i, j)] = lattice[(i - 1, j)] + cum[(i - 1, j)];
            }
        }
        Ok(Self { resolution, masses, cum, lattice })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn masses(&self) -> &Grid {
        &self.masses
    }

    /// `CB_N(A)(i/N, j/N)` for `i, j` in `0..=N`.
    pub fn lattice(&self) -> &Grid {
        &self.lattice
    }

    /// One-based index `i_0(x)` of the cell containing `x`, with `I_1 = [0, 1/N]`
    /// and `I_k = ((k-1)/N, k/N]` otherwise.
    pub fn cell_index(&self, x: f64) -> usize {
        cell_index(x, self.resolution)
    }

    /// One-based cell of `k/n`, computed exactly: `max(1, ⌈kN/n⌉)`.
    pub fn cell_index_rational(&self, k: usize, n: usize) -> usize {
        (k * self.resolution).div_ceil(n).max(1)
    }

    /// `K_{CB_N(A)}(x, [0, y])`.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        check_unit_square(x, y)?;
        Ok(self.kernel_unchecked(x, y))
    }

    pub(crate) fn kernel_unchecked(&self, x: f64, y: f64) -> f64 {
        let row = self.cell_index(x);
        if y <= 0.0 {
            return 0.0;
        }
        let col = self.cell_index(y);
        let frac = y * self.resolution as f64 - (col - 1) as f64;
        self.row_kernel(row, col, frac)
    }

    /// `K(x, [0, j/n])` for the cell row `row` (one based), with the in-cell
    /// offset of `j/n` computed in integer arithmetic.
    pub fn kernel_rational(&self, row: usize, j: usize, n: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        let col = self.cell_index_rational(j, n);
        let offset = j * self.resolution - (col - 1) * n;
        self.row_kernel(row, col, offset as f64 / n as f64)
    }

    /// `N · [Σ_{j < col} μ(Q_{row,j}) + frac · μ(Q_{row,col})]` with `frac` in `[0, 1]`.
    fn row_kernel(&self, row: usize, col: usize, frac: f64) -> f64 {
        let (i, j) = (row - 1, col - 1);
        let frac = frac.clamp(0.0, 1.0);
        (self.resolution as f64 * (self.cum[(i, j)] + frac * self.masses[(i, j)])).clamp(0.0, 1.0)
    }

    /// The checkerboard copula `CB_N(A)(u, v)` itself (bilinear between lattice nodes).
    pub fn copula_cdf(&self, u: f64, v: f64) -> Result<f64> {
        check_unit_square(u, v)?;
        let (a, t) = cell_offset(u, self.resolution);
        let (b, w) = cell_offset(v, self.resolution);
        let g = &self.lattice;
        let (c00, c10, c01, c11) = (g[(a, b)], g[(a + 1, b)], g[(a, b + 1)], g[(a + 1, b + 1)]);
        Ok((1.0 - t) * (1.0 - w) * c00 + t * (1.0 - w) * c10 + (1.0 - t) * w * c01 + t * w * c11)
    }
}

pub(crate) fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidParameter { name: "resolution", value: resolution as f64 });
    }
    Ok(())
}

/// One-based cell of `x` at resolution `N`; products within rounding distance
/// of a cell boundary are snapped onto it.
pub(crate) fn cell_index(x: f64, resolution: usize) -> usize {
    let nf = resolution as f64;
    let mut scaled = x * nf;
    let nearest = scaled.round();
    if (scaled - nearest).abs() <= 1e-12 * nf {
        scaled = nearest;
    }
    (scaled.ceil().max(1.0) as usize).min(resolution)
}

/// Lower lattice node `a` in `0..N` and offset `t` with `u·N = a + t`.
fn cell_offset(u: f64, resolution: usize) -> (usize, f64) {
    let col = cell_index(u, resolution);
    let t = u * resolution as f64 - (col - 1) as f64;
    (col - 1, t.clamp(0.0, 1.0))
}

fn margin_drift(masses: &Grid) -> f64 {
    let n = masses.rows();
    let target = 1.0 / n as f64;
    let mut drift: f64 = 0.0;
    for k in 0..n {
        let row: f64 = masses.row(k).iter().sum();
        let col: f64 = (0..n).map(|i| masses[(i, k)]).sum();
        drift = drift.max((row - target).abs()).max((col - target).abs());
    }
    drift
}

/// Alternating proportional row/column scaling towards margins `1/N`.
fn sinkhorn(masses: &mut Grid) {
    let n = masses.rows();
    let target = 1.0 / n as f64;
    for _ in 0..1000 {
        for i in 0..n {
            let s: f64 = masses.row(i).iter().sum();
            if s > 0.0 {
                for j in 0..n {
                    masses[(i, j)] *= target / s;
                }
            }
        }
        for j in 0..n {
            let s: f64 = (0..n).map(|i| masses[(i, j)]).sum();
            if s > 0.0 {
                for i in 0..n {
                    masses[(i, j)] *= target / s;
                }
            }
        }
        if margin_drift(masses) <= 0.1 * MARGIN_TOLERANCE {
            break;
        }
    }
}
