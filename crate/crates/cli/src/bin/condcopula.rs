use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use condcopula::config::{CopulaMethod, DataSpec, ExperimentConfig, RegressionMethod, SplitConfig, DEFAULT_SEED};
use condcopula::{data, model_io, run_bench, run_experiment, split_benchmark, BenchConfig, Error};
use condcopula_core::{fit, Error as CoreError, FittedModel, Method, RegularityNote, TiePolicy};

#[derive(Parser)]
#[command(name = "condcopula", version, about = "Copula-based conditional distribution estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a two-column CSV and write the model file.
    Fit(FitArgs),
    /// Predict conditional functionals at the x values of a query CSV.
    Predict(PredictArgs),
    /// Run an experiment described by a JSON configuration.
    Simulate(SimulateArgs),
    /// Repeated train/test splits of a CSV data set.
    SplitBench(SplitArgs),
    /// Time batch mean prediction against the number of queries.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Checkerboard,
    Bernstein,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Checkerboard => Method::Checkerboard,
            MethodArg::Bernstein => Method::Bernstein,
        }
    }
}

impl From<MethodArg> for CopulaMethod {
    fn from(m: MethodArg) -> CopulaMethod {
        match m {
            MethodArg::Checkerboard => CopulaMethod::Checkerboard,
            MethodArg::Bernstein => CopulaMethod::Bernstein,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Error,
    Random,
}

#[derive(Args)]
struct Columns {
    /// Covariate column name.
    #[arg(long, default_value = "x")]
    x_column: String,
    /// Response column name.
    #[arg(long, default_value = "y")]
    y_column: String,
    /// Take natural logarithms of the covariate.
    #[arg(long)]
    log_x: bool,
    /// Take natural logarithms of the response.
    #[arg(long)]
    log_y: bool,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Model file to write.
    #[arg(long, alias = "model")]
    output: PathBuf,
    #[command(flatten)]
    columns: Columns,
    #[arg(long, value_enum, default_value = "checkerboard")]
    method: MethodArg,
    #[arg(long, default_value_t = condcopula_core::DEFAULT_S_EXPONENT)]
    s_exponent: f64,
    #[arg(long, value_enum, default_value = "error")]
    tie_policy: TieArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Declared bound on |Y|, recorded with the model.
    #[arg(long)]
    bound: Option<f64>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Query CSV with an x column (and a y column for `cdf`).
    #[arg(long)]
    input: PathBuf,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Comma-separated subset of mean, q_lower, q_upper, q_mid, expectile, variance, cdf.
    #[arg(long, value_delimiter = ',', default_value = "mean")]
    columns: Vec<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    query: Columns,
    /// Evaluate the mean one query at a time instead of in one batch.
    #[arg(long, hide = true)]
    scalar: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report JSON.
    #[arg(long)]
    output: PathBuf,
    /// Summary CSV; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Override the number of replications.
    #[arg(long, conflicts_with = "paper_scale")]
    replications: Option<usize>,
    /// Use the full-size replication counts.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    columns: Columns,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 200)]
    replications: usize,
    #[arg(long, value_delimiter = ',', default_value = "cbe,nwe")]
    methods: Vec<String>,
    #[arg(long, value_enum, default_value = "checkerboard")]
    method: MethodArg,
    #[arg(long, default_value_t = condcopula_core::DEFAULT_S_EXPONENT)]
    s_exponent: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    ms: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = condcopula_core::DEFAULT_S_EXPONENT)]
    s_exponent: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Timing CSV; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::SplitBench(a) => cmd_split(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

/// Error text with data rows counted from 1, as in the input file.
fn describe(e: &anyhow::Error) -> String {
    let core = e.chain().find_map(|c| {
        c.downcast_ref::<CoreError>().or_else(|| match c.downcast_ref::<Error>() {
            Some(Error::Core(inner)) => Some(inner),
            _ => None,
        })
    });
    match core {
        Some(CoreError::TiesPresent { axis, first_row, second_row }) => format!(
            "tied {axis} values in data rows {} and {} (pass --tie-policy random to break ties)",
            first_row + 1,
            second_row + 1
        ),
        Some(CoreError::NonFinite { row, axis }) => format!("non-finite {axis} value in data row {}", row + 1),
        _ => format!("{e:#}"),
    }
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_model(path: &Path) -> anyhow::Result<FittedModel> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    model_io::read_model(io::BufReader::new(file)).with_context(|| format!("{}", path.display()))
}

fn cmd_fit(a: FitArgs) -> anyhow::Result<()> {
    let c = &a.columns;
    let sample = data::read_sample(&a.input, &c.x_column, &c.y_column, c.log_x, c.log_y)?;
    let policy = match a.tie_policy {
        TieArg::Error => TiePolicy::Error,
        TieArg::Random => TiePolicy::Random,
    };
    let mut model = fit(&sample, a.method.into(), a.s_exponent, policy, Some(a.seed))?;
    if let Some(b) = a.bound {
        model = model.with_regularity_note(RegularityNote::bounded(b));
    }
    let mut out =
        BufWriter::new(File::create(&a.output).with_context(|| format!("cannot create {}", a.output.display()))?);
    model_io::write_model(&model, &mut out)?;
    out.flush()?;
    println!("n = {}", model.n());
    println!("N = {}", model.resolution().get());
    println!("method = {}", model.method());
    if model.ties_broken() > 0 {
        eprintln!("warning: {} tied observations were ordered at random", model.ties_broken());
    }
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> anyhow::Result<()> {
    const KNOWN: [&str; 7] = ["mean", "q_lower", "q_upper", "q_mid", "expectile", "variance", "cdf"];
    let columns: Vec<&str> = a.columns.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    if let Some(bad) = columns.iter().find(|c| !KNOWN.contains(c)) {
        bail!("unknown column `{bad}` (expected one of {})", KNOWN.join(", "));
    }
    let needs_tau = columns.iter().any(|c| c.starts_with("q_"));
    if needs_tau && a.tau.is_none() {
        bail!("--tau is required for quantile columns");
    }
    if columns.contains(&"expectile") && a.alpha.is_none() {
        bail!("--alpha is required for the expectile column");
    }
    let model = load_model(&a.model)?;
    let source = a.input.display().to_string();
    let file = File::open(&a.input).with_context(|| format!("cannot open {source}"))?;
    let wants_cdf = columns.contains(&"cdf");
    let names: Vec<&str> = if wants_cdf { vec![&a.query.x_column, &a.query.y_column] } else { vec![&a.query.x_column] };
    let mut cols = data::read_columns(io::BufReader::new(file), &source, &names)?;
    if a.query.log_x {
        data::log_column(&mut cols[0], &source, &a.query.x_column)?;
    }
    if wants_cdf && a.query.log_y {
        data::log_column(&mut cols[1], &source, &a.query.y_column)?;
    }
    let xs = &cols[0];
    let means =
        if a.scalar { xs.iter().map(|&x| model.predict_mean(x)).collect() } else { model.predict_mean_batch(xs) };
    let mut rows = Vec::with_capacity(xs.len());
    for (k, &x) in xs.iter().enumerate() {
        let q = match a.tau {
            Some(t) if needs_tau => Some(model.predict_quantile(x, t)?),
            _ => None,
        };
        let mut row = vec![x];
        for c in &columns {
            row.push(match *c {
                "mean" => means[k],
                "q_lower" => q.map(|q| q.lower).ok_or_else(|| anyhow!("missing tau"))?,
                "q_upper" => q.map(|q| q.upper).ok_or_else(|| anyhow!("missing tau"))?,
                "q_mid" => q.map(|q| q.midpoint()).ok_or_else(|| anyhow!("missing tau"))?,
                "expectile" => model.predict_expectile(x, a.alpha.unwrap_or(0.5))?,
                "variance" => model.predict_variance(x),
                _ => model.predict_cdf(x, cols[1][k]),
            });
        }
        rows.push(row);
    }
    let mut headers = vec![a.query.x_column.as_str()];
    headers.extend(&columns);
    data::write_table(open_output(a.output.as_deref())?, &headers, rows)?;
    Ok(())
}

fn write_report(report: &condcopula::ExperimentReport, output: &Path, summary: Option<&Path>) -> anyhow::Result<()> {
    std::fs::write(output, report.to_json()? + "\n").with_context(|| format!("cannot write {}", output.display()))?;
    let summary_path = summary.map(Path::to_path_buf).unwrap_or_else(|| output.with_extension("csv"));
    let file = File::create(&summary_path).with_context(|| format!("cannot create {}", summary_path.display()))?;
    report.write_summary_csv(BufWriter::new(file))?;
    for row in report.summary.iter().filter(|r| r.metric == "max_error") {
        println!("n = {:>6}  {:<6} median max error {:.6}", row.n, row.method, row.q50);
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let mut config = ExperimentConfig::from_path(&a.config)?;
    if a.paper_scale {
        config.paper_scale();
    }
    if let Some(r) = a.replications {
        config.set_replications(r);
    }
    config.validate()?;
    let report = run_experiment(&config)?;
    write_report(&report, &a.output, a.summary.as_deref())
}

fn parse_methods(names: &[String]) -> anyhow::Result<Vec<RegressionMethod>> {
    names
        .iter()
        .map(|n| {
            serde_json::from_value(serde_json::Value::String(n.trim().to_string()))
                .map_err(|_| anyhow!("unknown method `{n}`"))
        })
        .collect()
}

fn cmd_split(a: SplitArgs) -> anyhow::Result<()> {
    let c = a.columns;
    let config = SplitConfig {
        data: DataSpec { path: a.input, x_column: c.x_column, y_column: c.y_column, log_x: c.log_x, log_y: c.log_y },
        train_fraction: a.train_fraction,
        replications: a.replications,
        methods: parse_methods(&a.methods)?,
        method: a.method.into(),
        s_exponent: a.s_exponent,
        seed: a.seed,
    };
    config.validate()?;
    let sample = data::read_data_spec(&config.data)?;
    let report = split_benchmark(&sample, &config)?;
    write_report(&report, &a.output, a.summary.as_deref())
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<()> {
    let config = BenchConfig { n: a.n, ms: a.ms, repeats: a.repeats, s_exponent: a.s_exponent, seed: a.seed };
    let result = run_bench(&config)?;
    result.write_csv(open_output(a.output.as_deref())?)?;
    for method in ["cbe", "nwe"] {
        match result.slope(method) {
            Some(s) => eprintln!("{method}: log-log slope in m = {s:.3}"),
            None => eprintln!("{method}: slope needs two positive query counts"),
        }
    }
    Ok(())
}
