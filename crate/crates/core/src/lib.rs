//! Nonparametric estimation of conditional distributions through empirical
//! checkerboard and Bernstein copulas.
//!
//! A bivariate sample is rank transformed, its empirical copula is smoothed to
//! a checkerboard or Bernstein copula at resolution `N = ⌊n^s⌋`, and the Markov
//! kernel of that copula, composed with the marginal ECDFs, estimates the
//! conditional distribution of `Y` given `X = x`. Conditional means, interval
//! quantiles, expectiles and variances follow as exact sums over the order
//! statistics of `Y`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod baselines;
pub mod bernstein;
pub mod checkerboard;
pub mod empirical;
pub mod error;
pub mod estimators;
pub mod grid;
pub mod kernel;
pub mod parametric;
pub mod resolution;
pub mod sample;

pub use baselines::{nw_mean, nw_quantile, silverman_bandwidth, NWModel, NwKernel};
pub use bernstein::{bernstein_polynomials, chernoff_tail_bound_check, BernsteinModel, ChernoffCheck};
pub use checkerboard::CheckerboardModel;
pub use empirical::EmpiricalCopula;
pub use error::{Axis, Error, Result};
pub use estimators::{
    fit, ConditionalDistribution, FittedModel, Method, Payload, QuantileInterval, RegularityNote, MIN_FIT_SAMPLE,
};
pub use grid::Grid;
pub use kernel::{d_infty_grid, kernel_sup_distance, KernelEvaluator, MarkovKernel};
pub use parametric::{CopulaSpec, Family, KernelValue};
pub use resolution::{Resolution, DEFAULT_S_EXPONENT};
pub use sample::{rank_transform, BivariateSample, PseudoSample, TiePolicy};
