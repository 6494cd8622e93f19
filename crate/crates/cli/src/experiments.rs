//! Seeded Monte-Carlo experiments: kernel convergence for parametric
//! copulas, regression benchmarks on the Gamma-Beta designs and
//! train/test splits of observed data.

use std::io::Write;

use condcopula_core::{
    fit, BernsteinModel, BivariateSample, CheckerboardModel, EmpiricalCopula, Error as CoreError, FittedModel,
    KernelEvaluator, MarkovKernel, Method, NWModel, Resolution, TiePolicy,
};
use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ConvergenceConfig, ExperimentConfig, RegressionConfig, RegressionMethod, SplitConfig};
use crate::error::Result;
use crate::gamma_beta::GammaBetaSpec;

/// Exponent of the evaluation-set size `m = 2⌊n^0.45⌋²` in the convergence study.
pub const EVAL_EXPONENT: f64 = 0.45;
pub const SUMMARY_LEVELS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
pub const METRICS: [&str; 2] = ["max_error", "mean_error"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub run: usize,
    pub method: String,
    pub max_error: f64,
    pub mean_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub method: String,
    pub metric: String,
    pub q10: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q90: f64,
}

/// Sample size, resolution and number of evaluation points of one grid entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub n: usize,
    pub resolution: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub grid: Vec<GridEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    pub records: Vec<Record>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    fn assemble(config: ExperimentConfig, grid: Vec<GridEntry>, cap: Option<f64>, records: Vec<Record>) -> Self {
        let mut methods: Vec<String> = Vec::new();
        for r in &records {
            if !methods.contains(&r.method) {
                methods.push(r.method.clone());
            }
        }
        let mut summary = Vec::new();
        for entry in &grid {
            for method in &methods {
                for metric in METRICS {
                    let mut values: Vec<f64> = records
                        .iter()
                        .filter(|r| r.n == entry.n && &r.method == method)
                        .map(|r| if metric == "max_error" { r.max_error } else { r.mean_error })
                        .collect();
                    if values.is_empty() {
                        continue;
                    }
                    values.sort_by(f64::total_cmp);
                    let q = SUMMARY_LEVELS.map(|p| quantile_sorted(&values, p));
                    summary.push(SummaryRow {
                        n: entry.n,
                        method: method.clone(),
                        metric: metric.to_string(),
                        q10: q[0],
                        q25: q[1],
                        q50: q[2],
                        q75: q[3],
                        q90: q[4],
                    });
                }
            }
        }
        Self { config, grid, cap, records, summary }
    }

    pub fn summary_row(&self, n: usize, method: &str, metric: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.n == n && r.method == method && r.metric == metric)
    }

    /// Median of `metric` over the replications at `(n, method)`.
    pub fn median(&self, n: usize, method: &str, metric: &str) -> Option<f64> {
        self.summary_row(n, method, metric).map(|r| r.q50)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Summary quantiles as CSV with columns `n, method, metric, q10, q25, q50, q75, q90`.
    pub fn write_summary_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for row in &self.summary {
            csv.serialize(row)?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Linear interpolation between order statistics, `h = (len − 1)p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Independent generator of replication `run` at grid index `n_index`.
pub fn replication_rng(seed: u64, n_index: usize, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n_index as u64) << 32) | run as u64);
    rng
}

/// `m = 2⌊n^0.45⌋²`.
pub fn convergence_eval_points(n: usize) -> usize {
    let k = ((n as f64).powf(EVAL_EXPONENT) * (1.0 + 1e-12)).floor() as usize;
    2 * k.max(1) * k.max(1)
}

fn errors(pred: &[f64], truth: &[f64]) -> (f64, f64) {
    let mut max: f64 = 0.0;
    let mut sum = 0.0;
    for (p, t) in pred.iter().zip(truth) {
        let e = (p - t).abs();
        max = max.max(e);
        sum += e;
    }
    (max, sum / pred.len() as f64)
}

fn run_grid<F>(n_grid: &[usize], replications: usize, job: F) -> Result<Vec<Record>>
where
    F: Fn(usize, usize) -> Result<Vec<Record>> + Sync,
{
    let jobs: Vec<(usize, usize)> =
        (0..n_grid.len()).flat_map(|i| (0..replications).map(move |run| (i, run))).collect();
    let chunks: Vec<Vec<Record>> = jobs.par_iter().map(|&(i, run)| job(i, run)).collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Sup and mean kernel distance between an empirical checkerboard or Bernstein
/// fit and the true kernel on `2⌊n^0.45⌋²` fresh uniform points, per replication.
pub fn copula_convergence_experiment(config: &ConvergenceConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let spec = config.copula()?;
    let method = Method::from(config.method);
    let truth = KernelEvaluator::from(spec);
    let grid: Vec<GridEntry> = config
        .n_grid
        .iter()
        .map(|&n| {
            let resolution = Resolution::for_sample_size(n, config.s_exponent)?.get();
            Ok(GridEntry { n, resolution, m: convergence_eval_points(n) })
        })
        .collect::<Result<_>>()?;
    let records = run_grid(&config.n_grid, config.replications, |i, run| {
        let GridEntry { n, resolution, m } = grid[i];
        let mut rng = replication_rng(config.seed, i, run);
        let sample = BivariateSample::new(spec.sample(n, &mut rng)?)?;
        let pseudo = condcopula_core::rank_transform(&sample, TiePolicy::Random, Some(rng.random()))?;
        let ec = EmpiricalCopula::new(&pseudo);
        let estimate = match method {
            Method::Checkerboard => KernelEvaluator::from(CheckerboardModel::from_empirical(&ec, resolution)?),
            Method::Bernstein => KernelEvaluator::from(BernsteinModel::from_empirical(&ec, resolution)?),
        };
        let points: Vec<(f64, f64)> = (0..m).map(|_| (rng.sample(Open01), rng.sample(Open01))).collect();
        let mut pred = Vec::with_capacity(m);
        let mut exact = Vec::with_capacity(m);
        for &(x, y) in &points {
            pred.push(estimate.eval(x, y)?);
            exact.push(truth.eval(x, y)?);
        }
        let (max_error, mean_error) = errors(&pred, &exact);
        Ok(vec![Record { n, run, method: method.to_string(), max_error, mean_error }])
    })?;
    Ok(ExperimentReport::assemble(ExperimentConfig::CopulaConvergence(config.clone()), grid, None, records))
}

/// Predictions of one method on a fitted replication.
fn predict(
    method: RegressionMethod,
    model: &FittedModel,
    nw: Option<&NWModel>,
    xs: &[f64],
    tau: Option<f64>,
    alpha: Option<f64>,
    design: Option<&GammaBetaSpec>,
) -> Result<Vec<f64>> {
    let nw = || nw.expect("baseline fitted when requested");
    let tau = || tau.expect("validated: tau present");
    Ok(match method {
        RegressionMethod::Cbe => model.predict_mean_batch(xs),
        RegressionMethod::Nwe => xs.iter().map(|&x| nw().mean(x)).collect(),
        RegressionMethod::Cbqe => {
            xs.iter().map(|&x| Ok(model.predict_quantile(x, tau())?.midpoint())).collect::<Result<_>>()?
        }
        RegressionMethod::Nwqe => xs.iter().map(|&x| Ok(nw().quantile(x, tau())?)).collect::<Result<_>>()?,
        RegressionMethod::Cbee => {
            let alpha = alpha.expect("validated: alpha present");
            xs.iter().map(|&x| Ok(model.predict_expectile(x, alpha)?)).collect::<Result<_>>()?
        }
        RegressionMethod::Cbve => xs.iter().map(|&x| model.predict_variance(x)).collect(),
        RegressionMethod::Truth => {
            let design = design.expect("truth needs a design");
            xs.iter().map(|&x| design.mean(x)).collect()
        }
    })
}

/// The functional each method estimates, evaluated under the design.
fn target(
    method: RegressionMethod,
    design: &GammaBetaSpec,
    xs: &[f64],
    tau: Option<f64>,
    alpha: Option<f64>,
) -> Result<Vec<f64>> {
    match method {
        RegressionMethod::Cbe | RegressionMethod::Nwe | RegressionMethod::Truth => {
            Ok(xs.iter().map(|&x| design.mean(x)).collect())
        }
        RegressionMethod::Cbqe | RegressionMethod::Nwqe => {
            let tau = tau.expect("validated: tau present");
            xs.iter().map(|&x| design.quantile(x, tau)).collect()
        }
        RegressionMethod::Cbee => {
            let alpha = alpha.expect("validated: alpha present");
            xs.iter().map(|&x| design.expectile(x, alpha)).collect()
        }
        RegressionMethod::Cbve => Ok(xs.iter().map(|&x| design.variance(x)).collect()),
    }
}

/// Absolute errors against the true conditional functionals at `m_eval`
/// points drawn from the covariate law, per replication and method.
pub fn regression_benchmark(config: &RegressionConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let design = config.design()?;
    let method = Method::from(config.method);
    let needs_nw = config.methods.iter().any(|m| matches!(m, RegressionMethod::Nwe | RegressionMethod::Nwqe));
    let grid: Vec<GridEntry> = config
        .n_grid
        .iter()
        .map(|&n| {
            let resolution = Resolution::for_sample_size(n, config.s_exponent)?.get();
            Ok(GridEntry { n, resolution, m: config.m_eval })
        })
        .collect::<Result<_>>()?;
    let records = run_grid(&config.n_grid, config.replications, |i, run| {
        let n = grid[i].n;
        let mut rng = replication_rng(config.seed, i, run);
        let sample = BivariateSample::new(design.sample(n, &mut rng)?)?;
        let model = fit(&sample, method, config.s_exponent, TiePolicy::Random, Some(rng.random()))?;
        let nw = if needs_nw { Some(NWModel::with_silverman(sample.xs(), sample.ys())?) } else { None };
        let xs: Vec<f64> = (0..config.m_eval).map(|_| design.draw_covariate(&mut rng)).collect();
        config
            .methods
            .iter()
            .map(|&m| {
                let pred = predict(m, &model, nw.as_ref(), &xs, config.tau, config.alpha, Some(&design))?;
                let truth = target(m, &design, &xs, config.tau, config.alpha)?;
                let (max_error, mean_error) = errors(&pred, &truth);
                Ok(Record { n, run, method: m.name().to_string(), max_error, mean_error })
            })
            .collect()
    })?;
    Ok(ExperimentReport::assemble(ExperimentConfig::Regression(config.clone()), grid, Some(design.cap()), records))
}

/// Repeated seeded shuffle splits: fit on the training part, score mean
/// predictions against the held-out responses.
pub fn split_benchmark(data: &BivariateSample, config: &SplitConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let n = data.len();
    let n_train = ((n as f64) * config.train_fraction).round() as usize;
    let n_test = n.saturating_sub(n_train);
    if n_train < condcopula_core::MIN_FIT_SAMPLE {
        return Err(CoreError::DegenerateSample { n: n_train, required: condcopula_core::MIN_FIT_SAMPLE }.into());
    }
    if n_test < 1 {
        return Err(CoreError::DegenerateSample { n: n_test, required: 1 }.into());
    }
    let method = Method::from(config.method);
    let resolution = Resolution::for_sample_size(n_train, config.s_exponent)?.get();
    let grid = vec![GridEntry { n, resolution, m: n_test }];
    let records = run_grid(&[n], config.replications, |i, run| {
        let mut rng = replication_rng(config.seed, i, run);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let pairs = data.pairs();
        let train = BivariateSample::new(order[..n_train].iter().map(|&k| pairs[k]).collect())?;
        let (test_x, test_y): (Vec<f64>, Vec<f64>) = order[n_train..].iter().map(|&k| pairs[k]).unzip();
        let model = fit(&train, method, config.s_exponent, TiePolicy::Random, Some(rng.random()))?;
        let nw = if config.methods.contains(&RegressionMethod::Nwe) {
            Some(NWModel::with_silverman(train.xs(), train.ys())?)
        } else {
            None
        };
        config
            .methods
            .iter()
            .map(|&m| {
                let pred = predict(m, &model, nw.as_ref(), &test_x, None, None, None)?;
                let (max_error, mean_error) = errors(&pred, &test_y);
                Ok(Record { n, run, method: m.name().to_string(), max_error, mean_error })
            })
            .collect()
    })?;
    Ok(ExperimentReport::assemble(ExperimentConfig::Split(config.clone()), grid, None, records))
}

/// Dispatches a configuration; split experiments read their data file.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config {
        ExperimentConfig::CopulaConvergence(c) => copula_convergence_experiment(c),
        ExperimentConfig::Regression(c) => regression_benchmark(c),
        ExperimentConfig::Split(c) => split_benchmark(&crate::data::read_data_spec(&c.data)?, c),
    }
}
