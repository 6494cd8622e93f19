//! Closed-form reference copulas used as ground truth.

use alloc::vec::Vec;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)] // std's inherent float methods take over whenever std is linked
use num_traits::Float;

use crate::error::{check_unit_square, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Ali–Mikhail–Haq, `θ ∈ [−1, 1)`.
    Amh,
    /// Clayton, `θ ∈ [−1, ∞) \ {0}`.
    Clayton,
    /// Upper Fréchet bound `min(u, v)`.
    M,
    /// Independence `uv`.
    Pi,
}

/// A parametric copula with CDF, Markov kernel and sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopulaSpec {
    family: Family,
    theta: f64,
}

/// Kernel value with a flag for evaluations at a point where the family has no
/// continuous kernel version (Clayton at `x = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub singular: bool,
}

/// Bisection steps used to invert the AMH conditional distribution.
pub const AMH_BISECTION_STEPS: usize = 60;

impl CopulaSpec {
    pub fn amh(theta: f64) -> Result<Self> {
        if !(-1.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameter { name: "theta", value: theta });
        }
        Ok(Self { family: Family::Amh, theta })
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        if !(theta >= -1.0) || theta == 0.0 || !theta.is_finite() {
            return Err(Error::InvalidParameter { name: "theta", value: theta });
        }
        Ok(Self { family: Family::Clayton, theta })
    }

    pub fn m() -> Self {
        Self { family: Family::M, theta: 0.0 }
    }

    pub fn pi() -> Self {
        Self { family: Family::Pi, theta: 0.0 }
    }

    pub fn new(family: Family, theta: f64) -> Result<Self> {
        match family {
            Family::Amh => Self::amh(theta),
            Family::Clayton => Self::clayton(theta),
            Family::M => Ok(Self::m()),
            Family::Pi => Ok(Self::pi()),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Whether `(x, y) ↦ K(x, [0, y])` admits a version continuous on the whole square.
    pub fn has_continuous_kernel(&self) -> bool {
        matches!(self.family, Family::Amh | Family::Pi)
    }

    pub fn cdf(&self, u: f64, v: f64) -> Result<f64> {
        check_unit_square(u, v)?;
        Ok(self.cdf_unchecked(u, v))
    }

    pub fn cdf_unchecked(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return u.min(1.0);
        }
        if u >= 1.0 {
            return v;
        }
        let theta = self.theta;
        match self.family {
            Family::Amh => u * v / (1.0 - theta * (1.0 - u) * (1.0 - v)),
            Family::Clayton => {
                let base = u.powf(-theta) + v.powf(-theta) - 1.0;
                if base <= 0.0 {
                    0.0
                } else {
                    base.powf(-1.0 / theta)
                }
            }
            Family::M => u.min(v),
            Family::Pi => u * v,
        }
    }

    /// `K(x, [0, y])`, the conditional distribution function of `V` given `U = x`.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        self.kernel_detailed(x, y).map(|k| k.value)
    }

    /// Like [`kernel`](Self::kernel) but reports Clayton's singular column `x = 0`,
    /// where the `x → 0` limit `1_{y > 0}` is returned.
    pub fn kernel_detailed(&self, x: f64, y: f64) -> Result<KernelValue> {
        check_unit_square(x, y)?;
        let singular = self.family == Family::Clayton && x == 0.0;
        Ok(KernelValue { value: self.kernel_unchecked(x, y), singular })
    }

    pub(crate) fn kernel_unchecked(&self, x: f64, y: f64) -> f64 {
        let theta = self.theta;
        let value = match self.family {
            Family::Amh => {
                let den = 1.0 - theta * (1.0 - x) * (1.0 - y);
                (theta * (y - 1.0) * y + y) / (den * den)
            }
            Family::Clayton => {
                if y <= 0.0 {
                    0.0
                } else if y >= 1.0 {
                    1.0
                } else if theta > 0.0 {
                    // x^{-θ-1}(x^{-θ}+y^{-θ}-1)^{-(θ+1)/θ} with x^{-θ-1} factored into the base
                    (1.0 + x.powf(theta) * (y.powf(-theta) - 1.0)).powf(-(theta + 1.0) / theta)
                } else if x <= 0.0 {
                    1.0
                } else {
                    let base = x.powf(-theta) + y.powf(-theta) - 1.0;
                    if base <= 0.0 {
                        0.0
                    } else {
                        x.powf(-theta - 1.0) * base.powf(-(theta + 1.0) / theta)
                    }
                }
            }
            Family::M => {
                // 1{x ≤ y}, except at y = 0 where every kernel is pinned to 0
                if y > 0.0 && x <= y {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Pi => y,
        };
        value.clamp(0.0, 1.0)
    }

    /// Conditional quantile `y` with `K(x, [0, y]) = w`.
    pub fn inverse_kernel(&self, x: f64, w: f64) -> f64 {
        let theta = self.theta;
        match self.family {
            Family::M => x,
            Family::Pi => w,
            Family::Clayton => {
                // y = x ((w^{-θ/(1+θ)} - 1) + x^θ)^{-1/θ}
                let a = w.powf(-theta / (1.0 + theta)) - 1.0;
                let base = a + x.powf(theta);
                if base <= 0.0 {
                    1.0
                } else {
                    (x * base.powf(-1.0 / theta)).clamp(0.0, 1.0)
                }
            }
            Family::Amh => {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..AMH_BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    if self.kernel_unchecked(x, mid) < w {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// `n` i.i.d. draws by conditional inversion: `U, W ~ U(0,1)` and `V = K⁻¹(U, ·)(W)`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<(f64, f64)>> {
        if n == 0 {
            return Err(Error::DegenerateSample { n, required: 1 });
        }
        if self.family == Family::Clayton && self.theta < 0.0 {
            return Err(Error::InvalidParameter { name: "theta", value: self.theta });
        }
        Ok((0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                let w: f64 = rng.sample(Open01);
                match self.family {
                    Family::M => (u, u),
                    Family::Pi => (u, w),
                    _ => (u, self.inverse_kernel(u, w)),
                }
            })
            .collect())
    }

    pub fn sample_seeded(&self, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
        self.sample(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}
