//! Bernstein approximations `B_N(A)` and their (continuous) Markov kernels.

use alloc::vec::Vec;

#[allow(unused_imports)] // std's inherent float methods take over whenever std is linked
use num_traits::Float;

use crate::checkerboard::check_resolution;
use crate::empirical::EmpiricalCopula;
use crate::error::{check_unit_square, Error, Result};
use crate::grid::Grid;

/// Tolerance for the copula-grid checks (margins, monotonicity, 2-increasing).
pub const GRID_TOLERANCE: f64 = 1e-12;

/// `[p_{N,0}(u), …, p_{N,N}(u)]`, the degree-`N` Bernstein basis at `u`.
///
/// Starts from the mode of the binomial weights and walks outwards with the
/// ratio recurrence, then renormalises, so no binomial coefficient or large
/// power is ever formed.
pub fn bernstein_polynomials(degree: usize, u: f64) -> Vec<f64> {
    let mut out = alloc::vec![0.0; degree + 1];
    bernstein_into(degree, u, &mut out);
    out
}

pub(crate) fn bernstein_into(degree: usize, u: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), degree + 1);
    out.iter_mut().for_each(|v| *v = 0.0);
    if u <= 0.0 {
        out[0] = 1.0;
        return;
    }
    if u >= 1.0 {
        out[degree] = 1.0;
        return;
    }
    let nf = degree as f64;
    let mode = (((nf + 1.0) * u).floor() as usize).min(degree);
    let odds = u / (1.0 - u);
    out[mode] = 1.0;
    for s in mode..degree {
        out[s + 1] = out[s] * ((degree - s) as f64 / (s + 1) as f64) * odds;
    }
    for s in (1..=mode).rev() {
        out[s - 1] = out[s] * (s as f64 / (degree - s + 1) as f64) / odds;
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= total);
}

/// Grid `A(i/N, j/N)` of an approximated copula together with the x-differences
/// `A(i/N, j/N) − A((i−1)/N, j/N)` the kernel is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinModel {
    resolution: usize,
    grid: Grid,
    /// Row `i - 1` holds the x-differences for `i` in `1..=N`, columns `j` in `0..=N`.
    diffs: Grid,
}

impl BernsteinModel {
    pub fn from_copula(cdf: impl Fn(f64, f64) -> f64, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        let nf = resolution as f64;
        Self::from_copula_grid(Grid::from_fn(resolution + 1, resolution + 1, |i, j| cdf(i as f64 / nf, j as f64 / nf)))
    }

    pub fn from_empirical(ec: &EmpiricalCopula, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        Self::from_copula_grid(ec.grid_at_resolution(resolution))
    }

    /// Validates boundary values, uniform margins and 2-increasingness of the grid.
    pub fn from_copula_grid(grid: Grid) -> Result<Self> {
        if grid.rows() != grid.cols() || grid.rows() < 3 {
            return Err(Error::ShapeMismatch { expected: 9, found: grid.rows() * grid.cols() });
        }
        let res = grid.rows() - 1;
        let nf = res as f64;
        for k in 0..=res {
            let margin = k as f64 / nf;
            let deviation = grid[(0, k)]
                .abs()
                .max(grid[(k, 0)].abs())
                .max((grid[(res, k)] - margin).abs())
                .max((grid[(k, res)] - margin).abs());
            if !(deviation <= GRID_TOLERANCE) {
                return Err(Error::NonUniformMargins { index: k, deviation });
            }
        }
        for i in 1..=res {
            for j in 1..=res {
                let mass = grid[(i, j)] - grid[(i - 1, j)] - grid[(i, j - 1)] + grid[(i - 1, j - 1)];
                if mass < -GRID_TOLERANCE {
                    return Err(Error::NotTwoIncreasing { row: i, col: j, mass });
                }
            }
        }
        let diffs = Grid::from_fn(res, res + 1, |i, j| grid[(i + 1, j)] - grid[(i, j)]);
        Ok(Self { resolution: res, grid, diffs })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `K_{B_N(A)}(x, [0, y]) = N Σ_{i,j} [A(i/N, j/N) − A((i−1)/N, j/N)] p_{N−1,i−1}(x) p_{N,j}(y)`.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        check_unit_square(x, y)?;
        Ok(self.kernel_unchecked(x, y))
    }

    pub(crate) fn kernel_unchecked(&self, x: f64, y: f64) -> f64 {
        let res = self.resolution;
        let px = bernstein_polynomials(res - 1, x);
        let py = bernstein_polynomials(res, y);
        let mut acc = 0.0;
        for (i, &wx) in px.iter().enumerate() {
            if wx == 0.0 {
                continue;
            }
            let row = self.diffs.row(i);
            let inner: f64 = (1..=res).map(|j| row[j] * py[j]).sum();
            acc += wx * inner;
        }
        (res as f64 * acc).clamp(0.0, 1.0)
    }

    /// Coefficients `w_j = N Σ_i D_{i,j} p_{N−1,i−1}(x)` with `K(x, [0, y]) = Σ_j w_j p_{N,j}(y)`.
    pub(crate) fn section_weights(&self, x: f64) -> Vec<f64> {
        let res = self.resolution;
        let px = bernstein_polynomials(res - 1, x);
        let mut w = alloc::vec![0.0; res + 1];
        for (i, &wx) in px.iter().enumerate() {
            if wx == 0.0 {
                continue;
            }
            let row = self.diffs.row(i);
            for j in 1..=res {
                w[j] += wx * row[j];
            }
        }
        w.iter_mut().for_each(|v| *v *= res as f64);
        w
    }

    /// Row-sums `R_i = N Σ_j D_{i,j} t_j` against a fixed vector `t` of length `N + 1`.
    pub(crate) fn contract_y(&self, t: &[f64]) -> Vec<f64> {
        let res = self.resolution;
        (0..res)
            .map(|i| {
                let row = self.diffs.row(i);
                res as f64 * (1..=res).map(|j| row[j] * t[j]).sum::<f64>()
            })
            .collect()
    }

    /// The polynomial copula `B_N(A)(x, y)`.
    pub fn copula_cdf(&self, x: f64, y: f64) -> Result<f64> {
        check_unit_square(x, y)?;
        let res = self.resolution;
        let px = bernstein_polynomials(res, x);
        let py = bernstein_polynomials(res, y);
        let mut acc = 0.0;
        for i in 1..=res {
            let inner: f64 = (1..=res).map(|j| self.grid[(i, j)] * py[j]).sum();
            acc += px[i] * inner;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffCheck {
    /// `2 exp(−2t²/N)`.
    pub bound: f64,
    /// `Σ_{i ∈ V} p_{N,i}(u)` with `V = {0, …, ⌊uN − t⌋} ∪ {⌈uN + t⌉, …, N}`.
    pub exact_tail: f64,
}

pub const CHERNOFF_MAX_DEGREE: usize = 60;

/// Compares the two-sided Hoeffding bound on the Bernstein weights dropped
/// around `uN` with the exact tail obtained by direct binomial summation.
pub fn chernoff_tail_bound_check(degree: usize, u: f64, t: f64) -> Result<ChernoffCheck> {
    if degree == 0 || degree > CHERNOFF_MAX_DEGREE {
        return Err(Error::InvalidParameter { name: "degree", value: degree as f64 });
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter { name: "u", value: u });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    let nf = degree as f64;
    let lower = (u * nf - t).floor();
    let upper = (u * nf + t).ceil();
    let mut binom = 1.0;
    let mut exact_tail = 0.0;
    for i in 0..=degree {
        if i > 0 {
            binom = binom * (degree - i + 1) as f64 / i as f64;
        }
        let fi = i as f64;
        if fi <= lower || fi >= upper {
            exact_tail += binom * u.powi(i as i32) * (1.0 - u).powi((degree - i) as i32);
        }
    }
    Ok(ChernoffCheck { bound: 2.0 * (-2.0 * t * t / nf).exp(), exact_tail })
}
