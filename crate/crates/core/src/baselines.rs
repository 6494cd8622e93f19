//! Nadaraya–Watson mean and quantile regression with a Gaussian kernel.

use alloc::vec::Vec;

#[allow(unused_imports)] // std's inherent float methods take over whenever std is linked
use num_traits::Float;

use crate::error::{Axis, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NwKernel {
    #[default]
    Gaussian,
}

/// Silverman's rule `h = σ̂ n^{−1/5}` with the `n − 1` standard deviation.
pub fn silverman_bandwidth(xs: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateSample { n, required: 2 });
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::DegenerateSample { n, required: 2 });
    }
    Ok(sd * (n as f64).powf(-0.2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NWModel {
    xs: Vec<f64>,
    ys: Vec<f64>,
    bandwidth: f64,
    kernel: NwKernel,
    /// Training indices sorted by response, for the weighted quantile.
    by_y: Vec<usize>,
}

impl NWModel {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::ShapeMismatch { expected: xs.len(), found: ys.len() });
        }
        if xs.is_empty() {
            return Err(Error::DegenerateSample { n: 0, required: 1 });
        }
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::InvalidParameter { name: "bandwidth", value: bandwidth });
        }
        for (row, (x, y)) in xs.iter().zip(&ys).enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { row, axis: Axis::X });
            }
            if !y.is_finite() {
                return Err(Error::NonFinite { row, axis: Axis::Y });
            }
        }
        let mut by_y: Vec<usize> = (0..ys.len()).collect();
        by_y.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
        Ok(Self { xs, ys, bandwidth, kernel: NwKernel::Gaussian, by_y })
    }

    /// Bandwidth from [`silverman_bandwidth`].
    pub fn with_silverman(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let h = silverman_bandwidth(&xs)?;
        Self::new(xs, ys, h)
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn kernel(&self) -> NwKernel {
        self.kernel
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Gaussian weights rescaled so that the largest equals one; avoids
    /// underflow when `x` lies far from every training point.
    fn weights(&self, x: f64) -> Vec<f64> {
        let z2: Vec<f64> = self
            .xs
            .iter()
            .map(|&xi| {
                let z = (x - xi) / self.bandwidth;
                z * z
            })
            .collect();
        let min = z2.iter().copied().fold(f64::INFINITY, f64::min);
        z2.into_iter().map(|z| (-0.5 * (z - min)).exp()).collect()
    }

    /// `Σ w_i y_i / Σ w_i`.
    pub fn mean(&self, x: f64) -> f64 {
        let w = self.weights(x);
        let total: f64 = w.iter().sum();
        let acc: f64 = w.iter().zip(&self.ys).map(|(w, y)| w * y).sum();
        let (lo, hi) = (self.ys[self.by_y[0]], self.ys[self.by_y[self.len() - 1]]);
        (acc / total).clamp(lo, hi)
    }

    /// `inf{y : F̂(y | x) ≥ τ}` for the kernel-weighted ECDF.
    pub fn quantile(&self, x: f64, tau: f64) -> Result<f64> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter { name: "tau", value: tau });
        }
        let w = self.weights(x);
        let total: f64 = w.iter().sum();
        let target = tau * total;
        let mut acc = 0.0;
        for &i in &self.by_y {
            acc += w[i];
            if acc >= target {
                return Ok(self.ys[i]);
            }
        }
        Ok(self.ys[self.by_y[self.len() - 1]])
    }
}

pub fn nw_mean(model: &NWModel, x: f64) -> f64 {
    model.mean(x)
}

pub fn nw_quantile(model: &NWModel, x: f64, tau: f64) -> Result<f64> {
    model.quantile(x, tau)
}
