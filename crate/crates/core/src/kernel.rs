//! A common interface over the three kinds of Markov kernel and the distance
//! diagnostics used by the convergence experiments.

use crate::bernstein::BernsteinModel;
use crate::checkerboard::CheckerboardModel;
use crate::error::{check_unit_square, Error, Result};
use crate::parametric::CopulaSpec;

/// `(x, y) ↦ K(x, [0, y])` on the unit square.
pub trait MarkovKernel {
    fn eval(&self, x: f64, y: f64) -> Result<f64>;
}

impl MarkovKernel for CheckerboardModel {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.kernel(x, y)
    }
}

impl MarkovKernel for BernsteinModel {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.kernel(x, y)
    }
}

impl MarkovKernel for CopulaSpec {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.kernel(x, y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelEvaluator {
    Checkerboard(CheckerboardModel),
    Bernstein(BernsteinModel),
    Parametric(CopulaSpec),
}

impl KernelEvaluator {
    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match self {
            KernelEvaluator::Checkerboard(m) => m.kernel_unchecked(x, y),
            KernelEvaluator::Bernstein(m) => m.kernel_unchecked(x, y),
            KernelEvaluator::Parametric(s) => s.kernel_unchecked(x, y),
        }
    }
}

impl MarkovKernel for KernelEvaluator {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit_square(x, y)?;
        Ok(self.eval_unchecked(x, y))
    }
}

impl From<CheckerboardModel> for KernelEvaluator {
    fn from(m: CheckerboardModel) -> Self {
        KernelEvaluator::Checkerboard(m)
    }
}

impl From<BernsteinModel> for KernelEvaluator {
    fn from(m: BernsteinModel) -> Self {
        KernelEvaluator::Bernstein(m)
    }
}

impl From<CopulaSpec> for KernelEvaluator {
    fn from(s: CopulaSpec) -> Self {
        KernelEvaluator::Parametric(s)
    }
}

/// `max |k1(x, [0, y]) − k2(x, [0, y])|` over the given points.
pub fn kernel_sup_distance<A, B>(k1: &A, k2: &B, points: &[(f64, f64)]) -> Result<f64>
where
    A: MarkovKernel + ?Sized,
    B: MarkovKernel + ?Sized,
{
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut sup: f64 = 0.0;
    for &(x, y) in points {
        sup = sup.max((k1.eval(x, y)? - k2.eval(x, y)?).abs());
    }
    Ok(sup)
}

/// Maximal difference of two copulas on the `(r+1)²` lattice `{0, 1/r, …, 1}²`.
///
/// This is a lower bound for `d_∞`. For two checkerboards whose resolutions
/// both divide `r` it is exact, since both are bilinear on every lattice cell.
pub fn d_infty_grid(
    cdf1: impl Fn(f64, f64) -> f64,
    cdf2: impl Fn(f64, f64) -> f64,
    grid_resolution: usize,
) -> Result<f64> {
    if grid_resolution < 2 {
        return Err(Error::InvalidParameter { name: "grid_resolution", value: grid_resolution as f64 });
    }
    let r = grid_resolution as f64;
    let mut sup: f64 = 0.0;
    for i in 0..=grid_resolution {
        let u = i as f64 / r;
        for j in 0..=grid_resolution {
            let v = j as f64 / r;
            sup = sup.max((cdf1(u, v) - cdf2(u, v)).abs());
        }
    }
    Ok(sup)
}
