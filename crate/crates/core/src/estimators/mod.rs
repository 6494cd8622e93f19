//! Estimators of the conditional law of `Y` given `X = x` built from a fitted
//! empirical checkerboard or Bernstein copula.
//!
//! A query `x` is mapped to `u = F_n(x) = k/n`, a response level `y` to
//! `G_n(y) = j/n`, and the estimated conditional CDF is `K(u, [0, j/n])`.
//! Because `G_n` only takes the values `i/n`, the estimated conditional law is
//! discrete on the order statistics `Y^(1) ≤ … ≤ Y^(n)` and every functional
//! below is an exact finite sum over them.

mod batch;
mod conditional;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use conditional::{ConditionalDistribution, QuantileInterval, EXPECTILE_MAX_ITERATIONS};

use crate::bernstein::{bernstein_into, BernsteinModel};
use crate::checkerboard::CheckerboardModel;
use crate::empirical::EmpiricalCopula;
use crate::error::{Error, Result};
use crate::resolution::Resolution;
use crate::sample::{rank_transform, BivariateSample, TiePolicy};

/// Smallest sample a model can be fitted to.
pub const MIN_FIT_SAMPLE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    #[default]
    Checkerboard,
    Bernstein,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Checkerboard => "checkerboard",
            Method::Bernstein => "bernstein",
        })
    }
}

impl FromStr for Method {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "checkerboard" => Ok(Method::Checkerboard),
            "bernstein" => Ok(Method::Bernstein),
            _ => Err("expected `checkerboard` or `bernstein`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Checkerboard(CheckerboardModel),
    Bernstein(BernsteinModel),
}

impl Payload {
    pub fn method(&self) -> Method {
        match self {
            Payload::Checkerboard(_) => Method::Checkerboard,
            Payload::Bernstein(_) => Method::Bernstein,
        }
    }

    pub fn resolution(&self) -> usize {
        match self {
            Payload::Checkerboard(m) => m.resolution(),
            Payload::Bernstein(m) => m.resolution(),
        }
    }
}

/// A user-declared bound on `|Y|`, the simplest sufficient condition for the
/// uniform integrability the mean and expectile estimators rely on.
///
/// Estimators never refuse to run on account of it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegularityNote {
    pub bounded_response: bool,
    pub bound: Option<f64>,
}

impl RegularityNote {
    pub fn bounded(bound: f64) -> Self {
        Self { bounded_response: true, bound: Some(bound) }
    }

    /// Number of responses violating the declared bound.
    pub fn violations(&self, ys: &[f64]) -> usize {
        match self.bound {
            Some(b) if self.bounded_response => ys.iter().filter(|y| y.abs() > b).count(),
            _ => 0,
        }
    }
}

/// A fitted estimator: the kernel payload together with the sorted margins
/// realising `F_n`, `G_n` and the order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    resolution: Resolution,
    payload: Payload,
    x_sorted: Vec<f64>,
    y_sorted: Vec<f64>,
    ties_broken: usize,
    regularity: RegularityNote,
    /// Bernstein only: `R_i = N Σ_j D_{i,j} Σ_k d_k p_{N,j}(k/n)` with `d_k = Y^(k+1) − Y^(k)`.
    bernstein_mean_weights: Vec<f64>,
}

/// Fits an empirical checkerboard or Bernstein model at resolution `max(2, ⌊n^s⌋)`.
pub fn fit(
    sample: &BivariateSample,
    method: Method,
    s_exponent: f64,
    tie_policy: TiePolicy,
    rng_seed: Option<u64>,
) -> Result<FittedModel> {
    let n = sample.len();
    if n < MIN_FIT_SAMPLE {
        return Err(Error::DegenerateSample { n, required: MIN_FIT_SAMPLE });
    }
    let resolution = Resolution::for_sample_size(n, s_exponent)?;
    let pseudo = rank_transform(sample, tie_policy, rng_seed)?;
    let ec = EmpiricalCopula::new(&pseudo);
    let payload = match method {
        Method::Checkerboard => Payload::Checkerboard(CheckerboardModel::from_empirical(&ec, resolution.get())?),
        Method::Bernstein => Payload::Bernstein(BernsteinModel::from_empirical(&ec, resolution.get())?),
    };
    let mut model = FittedModel::from_parts(resolution.s_exponent(), payload, sample.xs(), sample.ys())?;
    model.ties_broken = pseudo.ties_broken();
    Ok(model)
}

impl FittedModel {
    /// Assembles a model from a payload and the raw (unsorted or sorted) margins.
    pub fn from_parts(s_exponent: f64, payload: Payload, mut xs: Vec<f64>, mut ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::ShapeMismatch { expected: xs.len(), found: ys.len() });
        }
        let n = xs.len();
        if n < 2 {
            return Err(Error::DegenerateSample { n, required: 2 });
        }
        for (row, (x, y)) in xs.iter().zip(&ys).enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { row, axis: crate::error::Axis::X });
            }
            if !y.is_finite() {
                return Err(Error::NonFinite { row, axis: crate::error::Axis::Y });
            }
        }
        let resolution = Resolution::explicit(payload.resolution(), s_exponent)?;
        if resolution.get() > n {
            return Err(Error::InvalidParameter { name: "resolution", value: resolution.get() as f64 });
        }
        xs.sort_unstable_by(f64::total_cmp);
        ys.sort_unstable_by(f64::total_cmp);
        let bernstein_mean_weights = match &payload {
            Payload::Bernstein(b) => bernstein_mean_weights(b, &ys),
            Payload::Checkerboard(_) => Vec::new(),
        };
        Ok(Self {
            resolution,
            payload,
            x_sorted: xs,
            y_sorted: ys,
            ties_broken: 0,
            regularity: RegularityNote::default(),
            bernstein_mean_weights,
        })
    }

    pub fn with_regularity_note(mut self, note: RegularityNote) -> Self {
        let violations = note.violations(&self.y_sorted);
        if violations > 0 {
            log::warn!("{violations} responses exceed the declared bound {:?}", note.bound);
        }
        self.regularity = note;
        self
    }

    /// Restores the tie count of a deserialised model.
    pub fn with_ties_broken(mut self, ties_broken: usize) -> Self {
        self.ties_broken = ties_broken;
        self
    }

    pub fn regularity_note(&self) -> RegularityNote {
        self.regularity
    }

    pub fn method(&self) -> Method {
        self.payload.method()
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn n(&self) -> usize {
        self.x_sorted.len()
    }

    pub fn x_sorted(&self) -> &[f64] {
        &self.x_sorted
    }

    /// `Y^(1) ≤ … ≤ Y^(n)`.
    pub fn y_order_stats(&self) -> &[f64] {
        &self.y_sorted
    }

    /// Number of tied entries reordered by the random tie policy during fitting.
    pub fn ties_broken(&self) -> usize {
        self.ties_broken
    }

    /// `n F_n(x) = #{x_i ≤ x}`.
    pub fn x_rank(&self, x: f64) -> usize {
        self.x_sorted.partition_point(|&xi| xi <= x)
    }

    /// `n G_n(y) = #{y_i ≤ y}`.
    pub fn y_rank(&self, y: f64) -> usize {
        self.y_sorted.partition_point(|&yi| yi <= y)
    }

    /// The section `i ↦ K(F_n(x), [0, i/n])` for `i` in `0..=n`.
    pub(crate) fn section(&self, x: f64) -> Section<'_> {
        let k = self.x_rank(x);
        let n = self.n();
        match &self.payload {
            Payload::Checkerboard(cb) => Section::Checkerboard { model: cb, row: cb.cell_index_rational(k, n), n },
            Payload::Bernstein(b) => Section::Bernstein {
                weights: b.section_weights(k as f64 / n as f64),
                basis: alloc::vec![0.0; b.resolution() + 1],
                n,
            },
        }
    }

    /// `K(F_n(x), [0, G_n(y)])`.
    pub fn predict_cdf(&self, x: f64, y: f64) -> f64 {
        let j = self.y_rank(y);
        self.section(x).at(j)
    }

    /// Conditional mean `r_n(x) = r_n^+(x) − r_n^−(x)` as exact order-statistic sums.
    pub fn predict_mean(&self, x: f64) -> f64 {
        match &self.payload {
            Payload::Checkerboard(cb) => {
                let row = cb.cell_index_rational(self.x_rank(x), self.n());
                batch::checkerboard_row_mean(cb, row, &self.y_sorted)
            }
            Payload::Bernstein(b) => {
                let mut basis = alloc::vec![0.0; b.resolution()];
                self.bernstein_mean_at(self.x_rank(x), &mut basis)
            }
        }
    }

    fn bernstein_mean_at(&self, k: usize, basis: &mut [f64]) -> f64 {
        // r = Y^(n) − Σ_i d_i K_i and Σ_i d_i K_i = Σ_i p_{N−1,i−1}(u) R_i
        let res = self.resolution.get();
        bernstein_into(res - 1, k as f64 / self.n() as f64, basis);
        let contracted: f64 = basis.iter().zip(&self.bernstein_mean_weights).map(|(p, r)| p * r).sum();
        let (lo, hi) = (self.y_sorted[0], self.y_sorted[self.n() - 1]);
        (hi - contracted).clamp(lo, hi)
    }

    /// The estimated conditional law of `Y` given `X = x`.
    pub fn conditional(&self, x: f64) -> ConditionalDistribution<'_> {
        ConditionalDistribution::from_section(&self.y_sorted, self.section(x))
    }

    /// Interval-valued `τ`-quantile `[sup{y : K̂ < τ}, inf{y : K̂ > τ}]`.
    pub fn predict_quantile(&self, x: f64, tau: f64) -> Result<QuantileInterval> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter { name: "tau", value: tau });
        }
        let mut section = self.section(x);
        let n = self.n();
        let lower = partition_levels(n, |i| section.at(i) < tau);
        let upper = partition_levels(n, |i| section.at(i) <= tau);
        Ok(QuantileInterval::new(tau, self.order_stat(lower), self.order_stat(upper)))
    }

    /// Conditional `α`-expectile.
    pub fn predict_expectile(&self, x: f64, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha });
        }
        Ok(self.conditional(x).expectile(alpha))
    }

    /// Conditional variance of the estimated discrete law.
    pub fn predict_variance(&self, x: f64) -> f64 {
        self.conditional(x).variance()
    }

    /// `Y^(i)` for one-based `i`; the index is always in `1..=n` for levels in `(0, 1)`.
    fn order_stat(&self, i: usize) -> f64 {
        if i == 0 {
            f64::NEG_INFINITY
        } else if i > self.n() {
            f64::INFINITY
        } else {
            self.y_sorted[i - 1]
        }
    }
}

/// Smallest `i` in `0..=n` with `!below(i)`, or `n + 1`, for a predicate that
/// is true on an initial segment.
fn partition_levels(n: usize, mut below: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0usize, n + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn bernstein_mean_weights(b: &BernsteinModel, ys: &[f64]) -> Vec<f64> {
    let res = b.resolution();
    let n = ys.len();
    let mut t = alloc::vec![0.0; res + 1];
    let mut basis = alloc::vec![0.0; res + 1];
    for i in 1..n {
        let d = ys[i] - ys[i - 1];
        if d == 0.0 {
            continue;
        }
        bernstein_into(res, i as f64 / n as f64, &mut basis);
        for (tj, pj) in t.iter_mut().zip(&basis) {
            *tj += d * pj;
        }
    }
    b.contract_y(&t)
}

/// `i ↦ K(u, [0, i/n])` for a fixed `u`, with `K_0 = 0` and `K_n = 1` exactly.
pub(crate) enum Section<'a> {
    Checkerboard { model: &'a CheckerboardModel, row: usize, n: usize },
    Bernstein { weights: Vec<f64>, basis: Vec<f64>, n: usize },
}

impl Section<'_> {
    pub(crate) fn n(&self) -> usize {
        match self {
            Section::Checkerboard { n, .. } | Section::Bernstein { n, .. } => *n,
        }
    }

    pub(crate) fn at(&mut self, i: usize) -> f64 {
        let n = self.n();
        if i == 0 {
            return 0.0;
        }
        if i >= n {
            return 1.0;
        }
        match self {
            Section::Checkerboard { model, row, n } => model.kernel_rational(*row, i, *n),
            Section::Bernstein { weights, basis, n } => {
                let degree = weights.len() - 1;
                bernstein_into(degree, i as f64 / *n as f64, basis);
                weights.iter().zip(basis.iter()).map(|(w, p)| w * p).sum::<f64>().clamp(0.0, 1.0)
            }
        }
    }
}
