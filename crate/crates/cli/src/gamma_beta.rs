//! Heteroscedastic regression designs with a bounded response:
//! `X ~ 10·Beta(a, b)` and `Y | X ~ c·Beta(α'(X), β'(X))`, with the Beta
//! parameters matched so that `E[Y | X] = s(X)θ(X)` and `V(Y | X) = s(X)θ(X)²`.

use condcopula_core::BivariateSample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Points of the grid on which the cap and the Beta parameters are validated.
pub const VALIDATION_GRID: usize = 1001;
/// Ratio between the cap and the largest conditional mean.
pub const CAP_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `s(x) = max{0.5, √x}`, `θ(x) = min{max{1, x}, 6}`, `X ~ U(0, 10)`.
    Standard,
    /// `s(x) = max{1, √x}(1 + sin(10x)/2)`, same `θ` and covariate.
    Sin,
    /// Standard moments with the sparse covariate `X ~ 10·Beta(2, 4)`.
    Tails,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaBetaSpec {
    variant: Variant,
    covariate: (f64, f64),
    cap: f64,
}

impl GammaBetaSpec {
    /// The variant with its covariate law and the default cap
    /// `c = ⌈5 · max_grid(sθ)⌉`.
    pub fn new(variant: Variant) -> Result<Self> {
        let covariate = match variant {
            Variant::Standard | Variant::Sin => (1.0, 1.0),
            Variant::Tails => (2.0, 4.0),
        };
        let probe = Self { variant, covariate, cap: f64::INFINITY };
        let max_mean = grid().map(|x| probe.mean(x)).fold(0.0, f64::max);
        probe.with_cap((CAP_FACTOR * max_mean).ceil())
    }

    /// Replaces the cap, checking `c ≥ 5 · max sθ` and positive Beta parameters on the grid.
    pub fn with_cap(self, cap: f64) -> Result<Self> {
        let spec = Self { cap, ..self };
        let max_mean = grid().map(|x| spec.mean(x)).fold(0.0, f64::max);
        if !(cap >= CAP_FACTOR * max_mean) {
            let x = grid().max_by(|a, b| spec.mean(*a).total_cmp(&spec.mean(*b))).unwrap_or(0.0);
            return Err(Error::InfeasibleMoments { x, cap, mean: spec.mean(x), variance: spec.variance(x) });
        }
        for x in grid() {
            spec.derive_beta_params(x)?;
        }
        Ok(spec)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// `(a, b)` with `X ~ 10·Beta(a, b)`.
    pub fn covariate(&self) -> (f64, f64) {
        self.covariate
    }

    pub fn shape(&self, x: f64) -> f64 {
        match self.variant {
            Variant::Standard | Variant::Tails => x.sqrt().max(0.5),
            Variant::Sin => x.sqrt().max(1.0) * (1.0 + (10.0 * x).sin() / 2.0),
        }
    }

    pub fn scale(&self, x: f64) -> f64 {
        x.max(1.0).min(6.0)
    }

    /// `E[Y | X = x] = s(x)θ(x)`.
    pub fn mean(&self, x: f64) -> f64 {
        self.shape(x) * self.scale(x)
    }

    /// `V(Y | X = x) = s(x)θ(x)²`.
    pub fn variance(&self, x: f64) -> f64 {
        self.shape(x) * self.scale(x).powi(2)
    }

    /// Moment-matched `(α', β')` of `Y / c` given `X = x`.
    pub fn derive_beta_params(&self, x: f64) -> Result<(f64, f64)> {
        let (mean, variance) = (self.mean(x), self.variance(x));
        let mu = mean / self.cap;
        let v = variance / (self.cap * self.cap);
        let kappa = mu * (1.0 - mu) / v - 1.0;
        if !(kappa > 0.0 && mu > 0.0 && mu < 1.0) {
            return Err(Error::InfeasibleMoments { x, cap: self.cap, mean, variance });
        }
        Ok((mu * kappa, (1.0 - mu) * kappa))
    }

    pub fn draw_covariate<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b) = self.covariate;
        let beta = Beta::new(a, b).expect("covariate parameters are positive");
        10.0 * beta.sample(rng)
    }

    pub fn draw_response<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> Result<f64> {
        let (a, b) = self.derive_beta_params(x)?;
        let beta = Beta::new(a, b).map_err(|_| Error::InfeasibleMoments {
            x,
            cap: self.cap,
            mean: self.mean(x),
            variance: self.variance(x),
        })?;
        Ok(self.cap * beta.sample(rng))
    }

    /// `n` pairs `(X, Y)`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<(f64, f64)>> {
        (0..n)
            .map(|_| {
                let x = self.draw_covariate(rng);
                Ok((x, self.draw_response(x, rng)?))
            })
            .collect()
    }

    /// `τ`-quantile of `Y | X = x` by bisection of the regularised incomplete Beta function.
    pub fn quantile(&self, x: f64, tau: f64) -> Result<f64> {
        let (a, b) = self.derive_beta_params(x)?;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while (hi - lo) * self.cap > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if beta_reg(a, b, mid) < tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(self.cap * 0.5 * (lo + hi))
    }

    /// `α`-expectile of `Y | X = x`, using `E[B 1{B ≤ z}] = E[B] I_z(a + 1, b)` for `B ~ Beta(a, b)`.
    pub fn expectile(&self, x: f64, alpha: f64) -> Result<f64> {
        let (a, b) = self.derive_beta_params(x)?;
        let mu = a / (a + b);
        let balance = |z: f64| {
            let (cdf, partial) = (beta_reg(a, b, z), mu * beta_reg(a + 1.0, b, z));
            let above = (mu - partial) - z * (1.0 - cdf);
            let below = z * cdf - partial;
            alpha * above - (1.0 - alpha) * below
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while (hi - lo) * self.cap > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if balance(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(self.cap * 0.5 * (lo + hi))
    }
}

fn grid() -> impl Iterator<Item = f64> {
    (0..VALIDATION_GRID).map(|i| 10.0 * i as f64 / (VALIDATION_GRID - 1) as f64)
}

/// Moment-matched Beta parameters, see [`GammaBetaSpec::derive_beta_params`].
pub fn derive_beta_params(spec: &GammaBetaSpec, x: f64) -> Result<(f64, f64)> {
    spec.derive_beta_params(x)
}

/// Ground-truth conditional functionals of a design.
#[derive(Debug, Clone, Copy)]
pub struct Truth {
    spec: GammaBetaSpec,
}

impl Truth {
    pub fn mean(&self, x: f64) -> f64 {
        self.spec.mean(x)
    }

    pub fn variance(&self, x: f64) -> f64 {
        self.spec.variance(x)
    }

    pub fn quantile(&self, x: f64, tau: f64) -> Result<f64> {
        self.spec.quantile(x, tau)
    }

    pub fn expectile(&self, x: f64, alpha: f64) -> Result<f64> {
        self.spec.expectile(x, alpha)
    }
}

/// Seeded sample together with the true conditional functionals.
pub fn gamma_beta_sample(spec: &GammaBetaSpec, n: usize, seed: u64) -> Result<(BivariateSample, Truth)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = spec.sample(n, &mut rng)?;
    Ok((BivariateSample::new(pairs)?, Truth { spec: *spec }))
}
