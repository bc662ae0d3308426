//! `raterpower` command line.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage error
//! (including configurations rejected by validation).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use raterpower_core::fitting::{self, FitOptions, ParamGrid};
use raterpower_core::power::{self, PowerPoint, PowerSettings, SweepAxis, TestId};
use raterpower_core::simulator::generate_triple;
use raterpower_core::{
    run_experiment_on, DistributionSpec, ExperimentConfig, ExperimentMode, Family, ItemPrior,
    MetricId, PValueReport, ResponseFamily, ResponseMatrix, SamplingStrategy, StreamKey, Triple,
};

use crate::dataio::{self, DatasetFormat, ValueMap};
use crate::RayonExecutor;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<dataio::DataError> for CliError {
    fn from(e: dataio::DataError) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<raterpower_core::Error> for CliError {
    fn from(e: raterpower_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "raterpower", version, about = "Power analysis for evaluation sets with several rater responses per item")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit location and scale priors to a response matrix by grid search.
    Fit(FitArgs),
    /// Write simulated gold, model A and model B matrices.
    Simulate(SimulateArgs),
    /// Expected p-value of the A/B comparison for one configuration.
    Pvalue(PvalueArgs),
    /// p-values over a grid of N, K and epsilon.
    Table(TableArgs),
    /// Power of the bootstrap and the paired baselines.
    Power(PowerArgs),
    /// Empirical CDF of per-item means or standard deviations.
    Ecdf(EcdfArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Output file (a directory for `simulate`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
#[group(id = "prior", multiple = false)]
pub struct PriorArgs {
    /// Item prior mu ~ U(0,1), sigma ~ U(0,0.3).
    #[arg(long)]
    pub default_synthetic: bool,
    /// Built-in fitted prior.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// JSON with `location_spec` and `scale_spec`, e.g. the output of `fit`.
    #[arg(long)]
    pub prior_spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Default,
    Toxicity,
    Multidomain,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sets both --b-alt and --b-null.
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub b_alt: Option<usize>,
    #[arg(long)]
    pub b_null: Option<usize>,
    /// Sampling strategy `<items>,<responses>` with each of all|boot.
    #[arg(long)]
    pub phi: Option<SamplingStrategy>,
    /// Metrics, comma separated: mae, wins, memd.
    #[arg(long, value_delimiter = ',')]
    pub metric: Option<Vec<MetricId>>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Snap responses onto this many evenly spaced levels.
    #[arg(long)]
    pub levels: Option<u32>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PvalueArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Gold, model A and model B matrices; bootstraps the given data.
    #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with = "prior")]
    pub input: Option<Vec<PathBuf>>,
    /// Label or scale mapping applied when loading --input.
    #[arg(long)]
    pub value_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,250,500,1000")]
    pub n_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,25,50,100")]
    pub k_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.005,0.01,0.02,0.1")]
    pub epsilon_values: Vec<f64>,
    /// Explicit `NxK` cells instead of the full N by K product.
    #[arg(long, value_delimiter = ',')]
    pub pairs: Option<Vec<String>>,
    /// Add an N*K group column and order rows by group, then N.
    #[arg(long)]
    pub group_by_nk: bool,
    /// One row per (N, K) with a column per epsilon.
    #[arg(long)]
    pub pivot: bool,
    /// Average each cell over this many seeds.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Tests, comma separated: all, bootstrap, welch, wilcoxon, permutation.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub test: Vec<String>,
    #[arg(long, value_delimiter = ',', conflicts_with = "k_sweep")]
    pub n_sweep: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub k_sweep: Option<Vec<usize>>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1000)]
    pub permutation_iterations: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Response matrix (JSONL or CSV).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub value_map: Option<PathBuf>,
    #[arg(long)]
    pub location_family: Family,
    /// Location grid, e.g. `mu=0:0.5:0.01,sigma=0.05:0.3:0.01`.
    #[arg(long)]
    pub grid: ParamGrid,
    #[arg(long, default_value = "uniform")]
    pub scale_family: Family,
    #[arg(long, default_value = "lo=0,hi=0.01:0.5:0.01")]
    pub scale_grid: ParamGrid,
    /// Simulated values per candidate; default 10 per item, at most 100000.
    #[arg(long)]
    pub sim_count: Option<usize>,
    /// Include every evaluated grid point in the report.
    #[arg(long)]
    pub keep_surface: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stat {
    Mean,
    Std,
}

#[derive(Debug, Args)]
pub struct EcdfArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub value_map: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mean")]
    pub stat: Stat,
    /// Prior JSON to overlay: location_spec for means, scale_spec for stds.
    #[arg(long)]
    pub against: Option<PathBuf>,
}

/// Parses arguments, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Pvalue(a) => cmd_pvalue(a),
        Command::Table(a) => cmd_table(a),
        Command::Power(a) => cmd_power(a),
        Command::Ecdf(a) => cmd_ecdf(a),
    }
}

fn executor(common: &CommonArgs) -> CliResult<RayonExecutor> {
    RayonExecutor::new(common.threads)
        .context("cannot start worker threads")
        .map_err(CliError::Runtime)
}

fn emit(common: &CommonArgs, text: &str) -> CliResult<()> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("cannot write to stdout")?;
            stdout.flush().context("cannot write to stdout")?;
        }
    }
    Ok(())
}

fn load_prior_file(path: &Path) -> CliResult<ItemPrior> {
    let prior: ItemPrior = dataio::load_report(path).with_context(|| format!("cannot read prior {}", path.display()))?;
    prior.validate().map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(prior)
}

/// Builds the config from the optional file, the prior flags, and overrides.
/// `needs_prior` is false when the data is supplied directly.
fn build_config(
    seed: Option<u64>,
    prior: &PriorArgs,
    run: &RunArgs,
    point: Option<&PointArgs>,
    needs_prior: bool,
) -> CliResult<ExperimentConfig> {
    let mut config = match &run.config {
        Some(path) => dataio::load_report::<ExperimentConfig>(path)
            .with_context(|| format!("cannot read config {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if prior.default_synthetic {
        config.prior = ItemPrior::default_synthetic();
    } else if let Some(preset) = prior.preset {
        config.prior = match preset {
            Preset::Default => ItemPrior::default_synthetic(),
            Preset::Toxicity => ItemPrior::toxicity(),
            Preset::Multidomain => ItemPrior::multidomain(),
        };
    } else if let Some(path) = &prior.prior_spec {
        config.prior = load_prior_file(path)?;
    } else if needs_prior && run.config.is_none() {
        return Err(usage(
            "one of --default-synthetic, --preset, --prior-spec or --input is required",
        ));
    }
    if let Some(p) = point {
        if let Some(n) = p.n {
            config.n_items = n;
        }
        if let Some(k) = p.k {
            config.k_responses = k;
        }
        if let Some(e) = p.epsilon {
            config.epsilon = e;
        }
    }
    if let Some(b) = run.b {
        config.b_alt = b;
        config.b_null = b;
    }
    if let Some(b) = run.b_alt {
        config.b_alt = b;
    }
    if let Some(b) = run.b_null {
        config.b_null = b;
    }
    if let Some(phi) = run.phi {
        config.phi = phi;
    }
    if let Some(m) = &run.metric {
        config.metrics = m.clone();
    }
    if let Some(a) = run.alpha {
        config.alpha = a;
    }
    if let Some(levels) = run.levels {
        config.family = ResponseFamily::DiscreteLevels { levels };
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn load_value_map(path: &Option<PathBuf>) -> CliResult<Option<ValueMap>> {
    path.as_ref()
        .map(|p| ValueMap::from_json_file(p).with_context(|| format!("cannot read value map {}", p.display())))
        .transpose()
        .map_err(CliError::Runtime)
}

fn load_matrix(path: &Path, map: Option<&ValueMap>) -> CliResult<ResponseMatrix> {
    Ok(dataio::load_responses(path, DatasetFormat::from_path(path), map)
        .with_context(|| format!("cannot load {}", path.display()))?)
}

fn pvalue_csv(report: &PValueReport) -> String {
    let mut s = String::from("metric,p_value,direction,median_alt,median_null,significant,mean_score_a,mean_score_b,delta\n");
    for m in &report.metrics {
        let direction = match m.direction {
            raterpower_core::Direction::GreaterEqual => "greater-equal",
            raterpower_core::Direction::Less => "less",
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            m.metric,
            m.p_value,
            direction,
            m.median_alt,
            m.median_null,
            m.significant,
            m.mean_score_a,
            m.mean_score_b,
            m.delta()
        );
    }
    s
}

pub fn cmd_pvalue(a: PvalueArgs) -> CliResult<()> {
    let exec = executor(&a.common)?;
    let report = match &a.input {
        Some(paths) => {
            if paths.len() != 3 {
                return Err(usage("--input takes three files: gold,model_a,model_b"));
            }
            let map = load_value_map(&a.value_map)?;
            let gold = load_matrix(&paths[0], map.as_ref())?;
            let ma = load_matrix(&paths[1], map.as_ref())?;
            let mb = load_matrix(&paths[2], map.as_ref())?;
            let triple = Triple::new(gold, ma, mb).context("input matrices do not describe the same items")?;
            let mut config = build_config(a.common.seed, &a.prior, &a.run, Some(&a.point), false)?;
            config.mode = ExperimentMode::BootstrapOfGiven;
            config.n_items = triple.gold.n_items();
            config.k_responses = triple.gold.rectangular_width().unwrap_or(config.k_responses);
            run_experiment_on(&config, Some(&triple), &exec)?
        }
        None => {
            let config = build_config(a.common.seed, &a.prior, &a.run, Some(&a.point), true)?;
            run_experiment_on(&config, None, &exec)?
        }
    };
    let text = match a.common.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => dataio::report_to_string(&report, "pvalue")?,
        OutputFormat::Csv => pvalue_csv(&report),
    };
    emit(&a.common, &text)
}

pub fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let config = build_config(a.common.seed, &a.prior, &a.run, Some(&a.point), true)?;
    let dir = a.common.out.as_ref().ok_or_else(|| usage("simulate needs --out <directory>"))?;
    let format = match a.common.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => DatasetFormat::JsonLines,
        OutputFormat::Csv => DatasetFormat::Csv,
    };
    let triple = generate_triple(&config, &mut StreamKey::new(config.seed).rng())?;
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for (name, m) in [("gold", &triple.gold), ("model_a", &triple.a), ("model_b", &triple.b)] {
        let path = dir.join(format!("{name}.{}", format.extension()));
        dataio::save_matrix(m, &path, format).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn parse_pair(s: &str) -> CliResult<(usize, usize)> {
    let (n, k) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("pair `{s}` is not NxK")))?;
    let n = n.trim().parse().map_err(|_| usage(format!("pair `{s}` is not NxK")))?;
    let k = k.trim().parse().map_err(|_| usage(format!("pair `{s}` is not NxK")))?;
    Ok((n, k))
}

#[derive(Debug, Serialize)]
struct TableRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<MetricId>,
    n: usize,
    k: usize,
    epsilon: f64,
    p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<usize>,
}

/// Seed of one table cell and repeat.
pub fn cell_seed(seed: u64, n: usize, k: usize, epsilon: f64, repeat: usize) -> u64 {
    StreamKey::new(seed)
        .child(n as u64)
        .child(k as u64)
        .child(epsilon.to_bits())
        .child(repeat as u64)
        .raw()
}

pub fn cmd_table(a: TableArgs) -> CliResult<()> {
    let base = build_config(a.common.seed, &a.prior, &a.run, None, true)?;
    if a.repeats == 0 {
        return Err(usage("--repeats must be ≥ 1"));
    }
    if a.epsilon_values.is_empty() {
        return Err(usage("--epsilon-values must not be empty"));
    }
    let mut cells: Vec<(usize, usize)> = match &a.pairs {
        Some(pairs) => pairs.iter().map(|p| parse_pair(p)).collect::<CliResult<_>>()?,
        None => a
            .n_values
            .iter()
            .flat_map(|&n| a.k_values.iter().map(move |&k| (n, k)))
            .collect(),
    };
    if cells.is_empty() {
        return Err(usage("the grid has no cells"));
    }
    if a.group_by_nk {
        cells.sort_by_key(|&(n, k)| (n * k, n));
    }
    let exec = executor(&a.common)?;
    let metrics = base.metrics.clone();
    let mut rows = Vec::new();
    for &(n, k) in &cells {
        for &epsilon in &a.epsilon_values {
            let mut sums = vec![0.0; metrics.len()];
            for r in 0..a.repeats {
                let config = ExperimentConfig {
                    n_items: n,
                    k_responses: k,
                    epsilon,
                    seed: cell_seed(base.seed, n, k, epsilon, r),
                    ..base.clone()
                };
                config.validate().map_err(|e| usage(e.to_string()))?;
                let report = run_experiment_on(&config, None, &exec)?;
                for (s, m) in sums.iter_mut().zip(&report.metrics) {
                    *s += m.p_value;
                }
            }
            for (&metric, s) in metrics.iter().zip(sums) {
                rows.push(TableRow {
                    metric: (metrics.len() > 1).then_some(metric),
                    n,
                    k,
                    epsilon,
                    p_value: s / a.repeats as f64,
                    group: a.group_by_nk.then_some(n * k),
                });
            }
        }
    }
    let text = match a.common.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).context("cannot serialize table")?;
            s.push('\n');
            s
        }
        OutputFormat::Csv if a.pivot => table_pivot(&rows, &a.epsilon_values),
        OutputFormat::Csv => table_long(&rows),
    };
    emit(&a.common, &text)
}

fn table_long(rows: &[TableRow]) -> String {
    let with_metric = rows.first().is_some_and(|r| r.metric.is_some());
    let with_group = rows.first().is_some_and(|r| r.group.is_some());
    let mut s = String::new();
    if with_metric {
        s.push_str("metric,");
    }
    s.push_str("N,K,epsilon,p_value");
    if with_group {
        s.push_str(",group");
    }
    s.push('\n');
    for r in rows {
        if let Some(m) = r.metric {
            let _ = write!(s, "{m},");
        }
        let _ = write!(s, "{},{},{},{}", r.n, r.k, r.epsilon, r.p_value);
        if let Some(g) = r.group {
            let _ = write!(s, ",{g}");
        }
        s.push('\n');
    }
    s
}

fn table_pivot(rows: &[TableRow], epsilons: &[f64]) -> String {
    let with_metric = rows.first().is_some_and(|r| r.metric.is_some());
    let mut s = String::new();
    if with_metric {
        s.push_str("metric,");
    }
    s.push_str("N,K");
    for e in epsilons {
        let _ = write!(s, ",{e}");
    }
    s.push('\n');
    // rows arrive cell by cell with every epsilon of a cell (and metric) together
    let per_cell = epsilons.len();
    let n_metrics = if with_metric {
        rows.iter().take_while(|r| r.n == rows[0].n && r.k == rows[0].k && r.epsilon == rows[0].epsilon).count()
    } else {
        1
    };
    for chunk in rows.chunks(per_cell * n_metrics) {
        for m in 0..n_metrics {
            let first = &chunk[m];
            if let Some(metric) = first.metric {
                let _ = write!(s, "{metric},");
            }
            let _ = write!(s, "{},{}", first.n, first.k);
            for e in 0..per_cell {
                let _ = write!(s, ",{}", chunk[e * n_metrics + m].p_value);
            }
            s.push('\n');
        }
    }
    s
}

fn parse_tests(names: &[String]) -> CliResult<Vec<TestId>> {
    let mut tests = Vec::new();
    for name in names {
        if name.trim().eq_ignore_ascii_case("all") {
            tests.extend(TestId::ALL);
        } else {
            tests.push(name.parse().map_err(|_| usage(format!("unknown test `{name}`")))?);
        }
    }
    tests.dedup();
    if tests.is_empty() {
        return Err(usage("no test selected"));
    }
    Ok(tests)
}

pub fn cmd_power(a: PowerArgs) -> CliResult<()> {
    let config = build_config(a.common.seed, &a.prior, &a.run, Some(&a.point), true)?;
    let tests = parse_tests(&a.test)?;
    if a.trials == 0 {
        return Err(usage("--trials must be ≥ 1"));
    }
    let settings = PowerSettings {
        trials: a.trials,
        permutation_iterations: a.permutation_iterations,
    };
    let (axis, values) = match (&a.n_sweep, &a.k_sweep) {
        (Some(v), _) => (SweepAxis::Items, v.clone()),
        (None, Some(v)) => (SweepAxis::Responses, v.clone()),
        (None, None) => (SweepAxis::Items, vec![config.n_items]),
    };
    if values.contains(&0) {
        return Err(usage("sweep values must be ≥ 1"));
    }
    let exec = executor(&a.common)?;
    let points = power::power_curve(&config, &tests, axis, &values, settings, &exec)?;
    let text = match a.common.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => dataio::report_to_string(&PowerCurve { points: &points }, "power")?,
        OutputFormat::Csv => power_csv(&points),
    };
    emit(&a.common, &text)
}

#[derive(Serialize)]
struct PowerCurve<'a> {
    points: &'a [PowerPoint],
}

fn power_csv(points: &[PowerPoint]) -> String {
    let mut s = String::from("axis,axis_value,test,power,rejections,trials\n");
    for p in points {
        let axis = match p.axis {
            SweepAxis::Items => "n",
            SweepAxis::Responses => "k",
        };
        for r in &p.reports {
            let _ = writeln!(s, "{axis},{},{},{},{},{}", p.axis_value, r.test, r.power, r.rejections, r.trials);
        }
    }
    s
}

pub fn cmd_fit(a: FitArgs) -> CliResult<()> {
    if a.common.format == Some(OutputFormat::Csv) {
        return Err(usage("fit writes JSON only"));
    }
    let map = load_value_map(&a.value_map)?;
    let m = load_matrix(&a.input, map.as_ref())?;
    let stats = fitting::per_item_stats(&m)?;
    let options = FitOptions {
        sim_count: a.sim_count,
        seed: a.common.seed.unwrap_or(0),
        keep_surface: a.keep_surface,
    };
    if options.sim_count == Some(0) {
        return Err(usage("--sim-count must be ≥ 1"));
    }
    let exec = executor(&a.common)?;
    let report = fitting::fit_prior(
        &stats,
        a.location_family,
        &a.grid,
        a.scale_family,
        &a.scale_grid,
        &options,
        &exec,
    )
    .map_err(|e| match e {
        raterpower_core::Error::NoValidGridPoint => usage(format!("{e}")),
        other => CliError::Runtime(other.into()),
    })?;
    emit(&a.common, &dataio::report_to_string(&report, "fit")?)
}

#[derive(Serialize)]
struct EcdfPoint {
    x: f64,
    ecdf: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    model_cdf: Option<f64>,
}

#[derive(Serialize)]
struct EcdfReport {
    stat: Stat,
    n_items: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<DistributionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kolmogorov_distance: Option<f64>,
    points: Vec<EcdfPoint>,
}

pub fn cmd_ecdf(a: EcdfArgs) -> CliResult<()> {
    let map = load_value_map(&a.value_map)?;
    let m = load_matrix(&a.input, map.as_ref())?;
    let stats = fitting::per_item_stats(&m)?;
    let values = match a.stat {
        Stat::Mean => &stats.means,
        Stat::Std => &stats.stds,
    };
    let e = fitting::ecdf(values)?;
    let model = match &a.against {
        Some(path) => {
            let prior = load_prior_file(path)?;
            Some(match a.stat {
                Stat::Mean => prior.location,
                Stat::Std => prior.scale,
            })
        }
        None => None,
    };
    let points: Vec<EcdfPoint> = e
        .steps()
        .into_iter()
        .map(|(x, f)| EcdfPoint {
            x,
            ecdf: f,
            model_cdf: model.as_ref().map(|s| s.cdf(x)),
        })
        .collect();
    let text = match a.common.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut s = String::from(if model.is_some() { "x,ecdf,model_cdf\n" } else { "x,ecdf\n" });
            for p in &points {
                match p.model_cdf {
                    Some(c) => writeln!(s, "{},{},{}", p.x, p.ecdf, c),
                    None => writeln!(s, "{},{}", p.x, p.ecdf),
                }
                .expect("writing to a String");
            }
            s
        }
        OutputFormat::Json => {
            let report = EcdfReport {
                stat: a.stat,
                n_items: stats.len(),
                kolmogorov_distance: model.as_ref().map(|s| e.kolmogorov_distance(|x| s.cdf(x))),
                model,
                points,
            };
            dataio::report_to_string(&report, "ecdf")?
        }
    };
    emit(&a.common, &text)
}
