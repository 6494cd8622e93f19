use alloc::vec::Vec;

use super::{FittedModel, Payload};
use crate::checkerboard::CheckerboardModel;

/// Mean of the discrete conditional law of checkerboard row `row`, as
/// `r⁺ − r⁻` with `r⁺ = Y₊^(1) + Σ (Y₊^(i+1) − Y₊^(i))(1 − K_i)` and
/// `r⁻ = Y₋^(n) + Σ (Y₋^(i) − Y₋^(i+1)) K_i`.
pub(super) fn checkerboard_row_mean(cb: &CheckerboardModel, row: usize, ys: &[f64]) -> f64 {
    let n = ys.len();
    let pos = |y: f64| y.max(0.0);
    let neg = |y: f64| (-y).max(0.0);
    let mut plus = pos(ys[0]);
    let mut minus = neg(ys[n - 1]);
    for i in 1..n {
        let (a, b) = (ys[i - 1], ys[i]);
        if a == b {
            continue;
        }
        let k = cb.kernel_rational(row, i, n);
        plus += (pos(b) - pos(a)) * (1.0 - k);
        minus += (neg(a) - neg(b)) * k;
    }
    (plus - minus).clamp(ys[0], ys[n - 1])
}

impl FittedModel {
    /// [`predict_mean`](Self::predict_mean) for many queries.
    ///
    /// For checkerboards the `N` distinct step values are computed once in
    /// `O(N n)`; each query then needs only its row, found among the `N − 1`
    /// row thresholds `x_sorted[⌊(c−1)n/N⌋]`. The result is bitwise equal to
    /// the scalar path.
    pub fn predict_mean_batch(&self, xs: &[f64]) -> Vec<f64> {
        let n = self.n();
        match &self.payload {
            Payload::Checkerboard(cb) => {
                if xs.is_empty() {
                    return Vec::new();
                }
                let res = cb.resolution();
                let steps: Vec<f64> = (1..=res).map(|row| checkerboard_row_mean(cb, row, &self.y_sorted)).collect();
                let thresholds: Vec<f64> = (2..=res).map(|c| self.x_sorted[(c - 1) * n / res]).collect();
                xs.iter()
                    .map(|&x| {
                        let row = 1 + thresholds.partition_point(|&t| t <= x);
                        steps[row - 1]
                    })
                    .collect()
            }
            Payload::Bernstein(b) => {
                let mut basis = alloc::vec![0.0; b.resolution()];
                xs.iter().map(|&x| self.bernstein_mean_at(self.x_rank(x), &mut basis)).collect()
            }
        }
    }
}
