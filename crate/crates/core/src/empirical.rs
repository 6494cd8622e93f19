//! The empirical copula `E_n`: the rank-count subcopula on `{0, 1/n, …, 1}²`
//! extended to the unit square by bilinear interpolation.
//!
//! The subcopula is never stored densely. `E'_n(i/n, j/n)` is the dominance
//! count `#{k : r_k <= i, s_k <= j} / n`, and lattice evaluations (the only
//! thing the checkerboard and Bernstein builders need) are answered by a single
//! sweep over the x-ranks.

use alloc::vec::Vec;

#[allow(unused_imports)] // std's inherent float methods take over whenever std is linked
use num_traits::Float;

use crate::error::{check_unit_square, Result};
use crate::grid::Grid;
use crate::sample::PseudoSample;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalCopula {
    /// `y_rank[r - 1]` is the y-rank of the observation with x-rank `r`.
    y_rank: Vec<usize>,
}

impl EmpiricalCopula {
    pub fn new(pseudo: &PseudoSample) -> Self {
        Self { y_rank: pseudo.y_rank_by_x_rank() }
    }

    pub fn n(&self) -> usize {
        self.y_rank.len()
    }

    /// `#{k : r_k <= i, s_k <= j}`.
    pub fn count(&self, i: usize, j: usize) -> usize {
        self.y_rank[..i.min(self.n())].iter().filter(|&&s| s <= j).count()
    }

    /// The full `(n+1) x (n+1)` subcopula grid, entry `(i, j) = E'_n(i/n, j/n)`.
    ///
    /// Quadratic in `n`; meant for small samples and for checking invariants.
    pub fn subcopula_grid(&self) -> Grid {
        let n = self.n();
        let mut counts = alloc::vec![0usize; (n + 1) * (n + 1)];
        for i in 1..=n {
            let s = self.y_rank[i - 1];
            for j in 0..=n {
                counts[i * (n + 1) + j] = counts[(i - 1) * (n + 1) + j] + usize::from(s <= j);
            }
        }
        let nf = n as f64;
        Grid::from_fn(n + 1, n + 1, |i, j| counts[i * (n + 1) + j] as f64 / nf)
    }

    /// Dominance counts for every pair of thresholds, `out[p][q] = count(xs[p], ys[q])`.
    ///
    /// Both threshold lists must be sorted ascending and bounded by `n`.
    pub fn lattice_counts(&self, xs: &[usize], ys: &[usize]) -> Vec<usize> {
        debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(ys.windows(2).all(|w| w[0] <= w[1]));
        let n = self.n();
        let cols = ys.len();
        let mut out = alloc::vec![0usize; xs.len() * cols];
        let mut hist = alloc::vec![0usize; cols + 1];
        let mut p = 0;
        for r in 0..=n {
            if r > 0 {
                let s = self.y_rank[r - 1];
                hist[ys.partition_point(|&b| b < s)] += 1;
            }
            while p < xs.len() && xs[p] <= r {
                let mut acc = 0;
                for q in 0..cols {
                    acc += hist[q];
                    out[p * cols + q] = acc;
                }
                p += 1;
            }
        }
        out
    }

    /// `E_n(u, v)` by bilinear interpolation of the subcopula.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        check_unit_square(u, v)?;
        let n = self.n();
        let (a, t) = split_cell(u, n);
        let (b, w) = split_cell(v, n);
        let c00 = self.count(a, b) as f64;
        let c10 = self.count(a + 1, b) as f64;
        let c01 = self.count(a, b + 1) as f64;
        let c11 = self.count(a + 1, b + 1) as f64;
        Ok(bilinear(c00, c10, c01, c11, t, w) / n as f64)
    }

    /// `E_n(i/N, j/N)` for all `i, j` in `0..=N`, with the cell offsets of the
    /// lattice computed in exact integer arithmetic.
    pub fn grid_at_resolution(&self, resolution: usize) -> Grid {
        let n = self.n();
        let nodes: Vec<(usize, f64)> = (0..=resolution)
            .map(|i| {
                let scaled = i * n;
                let a = (scaled / resolution).min(n - 1);
                let rem = scaled - a * resolution;
                (a, rem as f64 / resolution as f64)
            })
            .collect();
        let mut thresholds: Vec<usize> = nodes.iter().flat_map(|&(a, _)| [a, a + 1]).collect();
        thresholds.sort_unstable();
        thresholds.dedup();
        let counts = self.lattice_counts(&thresholds, &thresholds);
        let m = thresholds.len();
        let lookup = |a: usize| thresholds.partition_point(|&b| b < a);
        let nf = n as f64;
        Grid::from_fn(resolution + 1, resolution + 1, |i, j| {
            let (a, t) = nodes[i];
            let (b, w) = nodes[j];
            let (pa, pb) = (lookup(a), lookup(b));
            let c = |p: usize, q: usize| counts[p * m + q] as f64;
            bilinear(c(pa, pb), c(pa + 1, pb), c(pa, pb + 1), c(pa + 1, pb + 1), t, w) / nf
        })
    }
}

fn bilinear(c00: f64, c10: f64, c01: f64, c11: f64, t: f64, w: f64) -> f64 {
    (1.0 - t) * (1.0 - w) * c00 + t * (1.0 - w) * c10 + (1.0 - t) * w * c01 + t * w * c11
}

/// Lower node index `a` in `0..n` and offset `t` in `[0, 1]` with `u * n = a + t`.
/// Values within rounding distance of a node snap onto it.
fn split_cell(u: f64, n: usize) -> (usize, f64) {
    let nf = n as f64;
    let mut scaled = u * nf;
    let nearest = scaled.round();
    if (scaled - nearest).abs() <= 1e-12 * nf {
        scaled = nearest;
    }
    let a = (scaled.floor() as usize).min(n - 1);
    (a, (scaled - a as f64).clamp(0.0, 1.0))
}
