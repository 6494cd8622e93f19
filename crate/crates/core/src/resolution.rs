#[allow(unused_imports)] // std's inherent float methods take over whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Default exponent in `N(n) = ⌊n^s⌋`.
pub const DEFAULT_S_EXPONENT: f64 = 0.45;

/// Grid resolution `N = max(2, ⌊n^s⌋)` of the fitted approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    s_exponent: f64,
    n: usize,
    clamped: bool,
}

impl Resolution {
    /// Applies the rule to a sample of size `n`; requires `s ∈ (0, 0.5)` and `n >= 2`.
    pub fn for_sample_size(n: usize, s_exponent: f64) -> Result<Self> {
        if !(s_exponent > 0.0 && s_exponent < 0.5) {
            return Err(Error::InvalidParameter { name: "s_exponent", value: s_exponent });
        }
        if n < 2 {
            return Err(Error::DegenerateSample { n, required: 2 });
        }
        // the relative nudge keeps exact powers such as 10000^0.5 from flooring one below
        let raw = ((n as f64).powf(s_exponent) * (1.0 + 1e-12)).floor() as usize;
        let clamped = raw < 2;
        let resolution = raw.max(2).min(n);
        if clamped {
            log::warn!("resolution floor({n}^{s_exponent}) = {raw} raised to 2");
        }
        Ok(Self { s_exponent, n: resolution, clamped })
    }

    /// A resolution fixed by the caller, e.g. when restoring a stored model.
    pub fn explicit(resolution: usize, s_exponent: f64) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParameter { name: "resolution", value: resolution as f64 });
        }
        if !(s_exponent > 0.0 && s_exponent < 0.5) {
            return Err(Error::InvalidParameter { name: "s_exponent", value: s_exponent });
        }
        Ok(Self { s_exponent, n: resolution, clamped: false })
    }

    pub fn s_exponent(&self) -> f64 {
        self.s_exponent
    }

    /// `N`.
    pub fn get(&self) -> usize {
        self.n
    }

    /// Whether `⌊n^s⌋ < 2` forced the minimal resolution.
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }
}
