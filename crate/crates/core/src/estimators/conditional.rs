use alloc::vec::Vec;

use super::Section;

/// Upper bound on bisection steps for the expectile root.
pub const EXPECTILE_MAX_ITERATIONS: usize = 200;

/// `[q̲, q̄]` with `q̲ = sup{y : K̂(y) < τ}` and `q̄ = inf{y : K̂(y) > τ}`.
///
/// For `τ ∈ (0, 1)` the estimated law is supported on the sample range, so both
/// endpoints are order statistics; `±∞` would only arise for the excluded
/// levels `0` and `1`. The clamped endpoints are kept for the same reason.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileInterval {
    pub tau: f64,
    pub lower: f64,
    pub upper: f64,
}

impl QuantileInterval {
    pub(crate) fn new(tau: f64, lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper);
        Self { tau, lower, upper }
    }

    /// Endpoints clamped to `[y_min, y_max]`.
    pub fn clamped(&self, y_min: f64, y_max: f64) -> (f64, f64) {
        (self.lower.clamp(y_min, y_max), self.upper.clamp(y_min, y_max))
    }

    /// Midpoint of the interval, a point-prediction convention.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// The estimated conditional law: probabilities `p_i = K_i − K_{i−1}` on the
/// order statistics `Y^(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution<'a> {
    support: &'a [f64],
    probs: Vec<f64>,
}

impl<'a> ConditionalDistribution<'a> {
    pub(crate) fn from_section(support: &'a [f64], mut section: Section<'_>) -> Self {
        let mut prev = 0.0;
        let probs = (1..=support.len())
            .map(|i| {
                let k = section.at(i);
                let p = (k - prev).max(0.0);
                prev = prev.max(k);
                p
            })
            .collect();
        Self { support, probs }
    }

    pub fn support(&self) -> &[f64] {
        self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.probs).map(|(y, p)| y * p).sum()
    }

    /// Centred second moment; never negative.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let v: f64 = self.support.iter().zip(&self.probs).map(|(y, p)| p * (y - mu) * (y - mu)).sum();
        v.max(0.0)
    }

    /// `g(t) = α E(Z − t)₊ − (1 − α) E(t − Z)₊`, strictly decreasing in `t`.
    pub fn expectile_balance(&self, alpha: f64, t: f64) -> f64 {
        let (mut above, mut below) = (0.0, 0.0);
        for (&y, &p) in self.support.iter().zip(&self.probs) {
            if y > t {
                above += p * (y - t);
            } else {
                below += p * (t - y);
            }
        }
        alpha * above - (1.0 - alpha) * below
    }

    /// Root of the balance equation by bisection on `[Y^(1), Y^(n)]` to
    /// absolute tolerance `1e-10 · (Y^(n) − Y^(1))`.
    pub fn expectile(&self, alpha: f64) -> f64 {
        let (mut lo, mut hi) = (self.support[0], self.support[self.support.len() - 1]);
        let tol = 1e-10 * (hi - lo);
        for _ in 0..EXPECTILE_MAX_ITERATIONS {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.expectile_balance(alpha, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
