//! Wall-clock scaling of batch mean prediction against the number of queries.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use condcopula_core::{fit, BivariateSample, Method, NWModel, TiePolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_error, Result};
use crate::gamma_beta::{GammaBetaSpec, Variant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub ms: Vec<usize>,
    pub repeats: usize,
    pub s_exponent: f64,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            ms: vec![1_000, 10_000, 100_000],
            repeats: 3,
            s_exponent: condcopula_core::DEFAULT_S_EXPONENT,
            seed: crate::config::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub method: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
}

impl BenchResult {
    /// Least-squares slope of `ln seconds` on `ln m` over the rows of `method` with `m > 0`.
    pub fn slope(&self, method: &str) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.m > 0 && r.seconds > 0.0)
            .map(|r| ((r.m as f64).ln(), r.seconds.ln()))
            .collect();
        log_log_slope(&pts)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for row in &self.rows {
            csv.serialize(row)?;
        }
        csv.flush()?;
        Ok(())
    }
}

pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn min_seconds(repeats: usize, mut f: impl FnMut()) -> f64 {
    (0..repeats)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Times checkerboard batch mean prediction (`cbe`) and the Nadaraya–Watson
/// mean (`nwe`) on a standard Gamma-Beta sample of size `n`, taking the
/// minimum over `repeats` runs for each query count.
pub fn run_bench(config: &BenchConfig) -> Result<BenchResult> {
    if config.repeats == 0 {
        return Err(config_error("bench.repeats", "must be at least 1"));
    }
    let design = GammaBetaSpec::new(Variant::Standard)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sample = BivariateSample::new(design.sample(config.n, &mut rng)?)?;
    let model = fit(&sample, Method::Checkerboard, config.s_exponent, TiePolicy::Random, Some(config.seed))?;
    let nw = NWModel::with_silverman(sample.xs(), sample.ys())?;
    let max_m = config.ms.iter().copied().max().unwrap_or(0);
    let queries: Vec<f64> = (0..max_m).map(|_| design.draw_covariate(&mut rng)).collect();
    let mut rows = Vec::new();
    for &m in &config.ms {
        let xs = &queries[..m];
        let cbe = min_seconds(config.repeats, || {
            black_box(model.predict_mean_batch(black_box(xs)));
        });
        let nwe = min_seconds(config.repeats, || {
            black_box(xs.iter().map(|&x| nw.mean(x)).collect::<Vec<_>>());
        });
        log::info!("n = {}, m = {m}: cbe {cbe:.6}s, nwe {nwe:.6}s", config.n);
        rows.push(BenchRow { n: config.n, m, method: "cbe".into(), seconds: cbe });
        rows.push(BenchRow { n: config.n, m, method: "nwe".into(), seconds: nwe });
    }
    Ok(BenchResult { rows })
}
