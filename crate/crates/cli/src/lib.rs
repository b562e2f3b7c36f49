//! `xisis` command-line front end.
//!
//! Every subcommand is a thin composition of library calls. Randomness flows
//! from `--seed` (default [`DEFAULT_SEED`]), so runs are reproducible unless
//! the seed is changed, and outputs do not depend on `--threads`.

pub mod output;
pub mod table;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use xisis::evalkit::{confusion_counts, cv_rmse, precision_recall_f};
use xisis::screening::{
    default_d, score_all, threshold_select, top_d, DataMatrix, Method, ScreeningResult,
};
use xisis::simgen::{
    concentration_experiment, run_simulation, ConcentrationConfig, ModelId, ModelSpec,
    SimulationConfig,
};
use xisis::Sample;

use crate::output::{score_rows, scores_csv, OutputSet};
use crate::table::{ingest_csv, parse_labels, standardize, ColumnSelector, TableFile};

pub const DEFAULT_SEED: u64 = 20_201;

#[derive(Debug, Parser)]
#[command(name = "xisis", version, about = "Rank-based xi correlation feature screening")]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs are identical for any value.
    #[arg(long, global = true, env = "XISIS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every predictor and select a subset.
    Screen(ScreenArgs),
    /// Print the xi score of one predictor against the response.
    Xi(XiArgs),
    /// Replicated screening on a simulated model.
    Simulate(SimulateArgs),
    /// Tail frequency of the maximal score deviation over sample sizes.
    Concentration(ConcentrationArgs),
    /// Classification metrics or CV prediction error from a predictions table.
    Metrics(MetricsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Response column: header name or `#<0-based index>`.
    #[arg(long)]
    pub response: String,
    /// Map response labels to classes, e.g. `ALL=0,AML=1`.
    #[arg(long)]
    pub labels: Option<String>,
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// The file has no header row; columns are named V1, V2, ...
    #[arg(long)]
    pub no_header: bool,
    /// Comma-separated columns to ignore.
    #[arg(long, value_delimiter = ',')]
    pub drop: Vec<String>,
    /// Standardize predictors to mean 0, variance 1 before scoring.
    #[arg(long)]
    pub standardize: bool,
}

impl InputArgs {
    fn table(&self) -> Result<TableFile> {
        if !self.delimiter.is_ascii() {
            bail!("delimiter must be a single ASCII character");
        }
        Ok(TableFile {
            path: self.input.clone(),
            delimiter: self.delimiter as u8,
            has_header: !self.no_header,
            response: self.response.parse()?,
            labels: self.labels.as_deref().map(parse_labels).transpose()?,
            drop: self
                .drop
                .iter()
                .map(|s| s.parse())
                .collect::<Result<_>>()?,
        })
    }

    pub fn load(&self) -> Result<(DataMatrix, Vec<String>)> {
        let (data, _) = ingest_csv(&self.table()?)?;
        if self.standardize {
            standardize(&data)
        } else {
            Ok((data, Vec::new()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Xi,
    Pearson,
    Dcor,
    XiBinary,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Xi => Method::Xi,
            MethodArg::Pearson => Method::Pearson,
            MethodArg::Dcor => Method::Dcor,
            MethodArg::XiBinary => Method::XiBinary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Xi)]
    pub method: MethodArg,
    /// Number of predictors to keep, or `auto` for floor(n / ln n).
    #[arg(long, default_value = "auto", conflicts_with = "threshold")]
    pub top_d: String,
    /// Keep predictors scoring at least c·n^(-kappa), given as `c,kappa`.
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Format of the per-predictor scores file.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct XiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Predictor: 0-based predictor index, header name, or `#<file column>`.
    #[arg(long)]
    pub column: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// M1, M2, M3, M4 or independent.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub p: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Selection size, or `auto` for floor(n / ln n).
    #[arg(long, default_value = "auto")]
    pub d: String,
    #[arg(long, value_delimiter = ',', default_value = "xi,pearson,dcor")]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ConcentrationArgs {
    #[arg(long, default_value = "independent")]
    pub model: String,
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub p: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.15)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricsKind {
    /// Confusion counts, precision, recall, F-measure ({0,1} columns).
    Classification,
    /// Root-mean-square prediction error over held-out predictions.
    Regression,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Column of observed values.
    #[arg(long)]
    pub truth: String,
    /// Column of (held-out) predictions.
    #[arg(long)]
    pub pred: String,
    #[arg(long, value_enum, default_value_t = MetricsKind::Classification)]
    pub kind: MetricsKind,
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// Also write metrics.json into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_d(s: &str, n: usize) -> Result<usize> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(default_d(n)?)
    } else {
        let d: usize = s.parse().with_context(|| format!("bad selection size {s:?}"))?;
        if d < 1 {
            bail!("selection size must be at least 1");
        }
        Ok(d)
    }
}

fn parse_threshold(s: &str) -> Result<(f64, f64)> {
    let (c, kappa) = s
        .split_once(',')
        .context("--threshold expects `c,kappa`")?;
    Ok((c.trim().parse()?, kappa.trim().parse()?))
}

#[derive(Debug, Serialize)]
struct ScreenReport<'a> {
    input: &'a PathBuf,
    response: &'a str,
    n: usize,
    p: usize,
    method: Method,
    seed: u64,
    standardized: bool,
    selection: &'a ScreeningResult,
    selected_names: Vec<&'a str>,
    warnings: Vec<String>,
}

pub fn cmd_screen(args: &ScreenArgs) -> Result<Vec<PathBuf>> {
    let (data, mut warnings) = args.input.load()?;
    let method: Method = args.method.into();
    let scores = score_all(&data, method, args.seed)?;
    let selection = match &args.threshold {
        Some(t) => {
            let (c, kappa) = parse_threshold(t)?;
            threshold_select(&scores, c, kappa, data.n())?
        }
        None => top_d(&scores, parse_d(&args.top_d, data.n())?)?,
    };
    warnings.extend(
        scores
            .warnings
            .iter()
            .map(|w| format!("column {:?}: {}", data.names()[w.column], w.message)),
    );

    let rows = score_rows(data.names(), &scores, &selection);
    let mut out = OutputSet::default();
    match args.format {
        Format::Csv => out.add("scores.csv", scores_csv(&rows)?),
        Format::Json => out.add_json("scores.json", &rows)?,
    }
    out.add_json(
        "selection.json",
        &ScreenReport {
            input: &args.input.input,
            response: &args.input.response,
            n: data.n(),
            p: data.p(),
            method,
            seed: args.seed,
            standardized: args.input.standardize,
            selection: &selection,
            selected_names: selection
                .selected
                .iter()
                .map(|&k| data.names()[k].as_str())
                .collect(),
            warnings: warnings.clone(),
        },
    )?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    out.commit(&args.out)
}

fn predictor_index(data: &DataMatrix, column: &str, table: &TableFile) -> Result<usize> {
    if let Ok(k) = column.parse::<usize>() {
        if k >= data.p() {
            bail!("predictor index {k} out of range (p = {})", data.p());
        }
        return Ok(k);
    }
    let name = match column.parse::<ColumnSelector>()? {
        ColumnSelector::Name(name) => name,
        ColumnSelector::Index(i) => {
            let shifted = match table.response {
                ColumnSelector::Index(r) if r < i => i - 1,
                _ => i,
            };
            return if shifted < data.p() {
                Ok(shifted)
            } else {
                bail!("column #{i} is not a predictor")
            };
        }
    };
    data.names()
        .iter()
        .position(|n| *n == name)
        .with_context(|| format!("no predictor named {name:?}"))
}

pub fn cmd_xi(args: &XiArgs) -> Result<f64> {
    let table = args.input.table()?;
    let (data, _) = args.input.load()?;
    let k = predictor_index(&data, &args.column, &table)?;
    let sample = Sample::new(data.column(k), data.response())?;
    Ok(xisis::rankcorr::xi_score(
        &sample,
        xisis::screening::column_tie_seed(args.seed, k),
    )?)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let id: ModelId = args.model.parse()?;
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<xisis::Result<Vec<_>>>()?;
    let config = SimulationConfig {
        model: ModelSpec::new(id),
        n: args.n,
        p: args.p,
        rho: args.rho,
        replications: args.reps,
        d: parse_d(&args.d, args.n)?,
        base_seed: args.seed,
        methods,
    };
    let report = run_simulation(&config)?;
    let mut out = OutputSet::default();
    out.add("simulation.csv", report.to_csv());
    out.add_json("simulation.json", &report)?;
    out.commit(&args.out)
}

pub fn cmd_concentration(args: &ConcentrationArgs) -> Result<Vec<PathBuf>> {
    let config = ConcentrationConfig {
        model: ModelSpec::new(args.model.parse()?),
        n_grid: args.n_grid.clone(),
        p: args.p,
        replications: args.reps,
        delta: args.delta,
        rho: args.rho,
        seed: args.seed,
    };
    let report = concentration_experiment(&config)?;
    let mut csv = String::from("n,frequency,mean_max_deviation\n");
    for t in &report.tails {
        csv.push_str(&format!("{},{},{}\n", t.n, t.frequency, t.mean_max_deviation));
    }
    let mut out = OutputSet::default();
    out.add("concentration.csv", csv);
    out.add_json("concentration.json", &report)?;
    out.commit(&args.out)
}

fn read_columns(args: &MetricsArgs) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(args.delimiter as u8)
        .trim(csv::Trim::All)
        .from_path(&args.input)
        .with_context(|| format!("cannot open {}", args.input.display()))?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("no column named {name:?}"))
    };
    let (ti, pi) = (find(&args.truth)?, find(&args.pred)?);
    let mut truth = Vec::new();
    let mut pred = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec?;
        let cell = |k: usize| -> Result<f64> {
            rec[k].parse().with_context(|| {
                format!("non-numeric value {:?} at line {} column {:?}", &rec[k], r + 2, headers[k])
            })
        };
        truth.push(cell(ti)?);
        pred.push(cell(pi)?);
    }
    Ok((truth, pred))
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<serde_json::Value> {
    let (truth, pred) = read_columns(args)?;
    let value = match args.kind {
        MetricsKind::Classification => {
            let counts = confusion_counts(&truth, &pred)?;
            let scores = precision_recall_f(&counts)?;
            serde_json::json!({
                "tp": counts.tp,
                "fp": counts.fp,
                "fn": counts.fn_,
                "tn": counts.tn,
                "precision": scores.precision,
                "recall": scores.recall,
                "f_measure": scores.f_measure,
            })
        }
        MetricsKind::Regression => serde_json::json!({
            "n": truth.len(),
            "cv": cv_rmse(&truth, &pred)?,
        }),
    };
    if let Some(dir) = &args.out {
        let mut out = OutputSet::default();
        out.add_json("metrics.json", &value)?;
        out.commit(dir)?;
    }
    Ok(value)
}

/// Run a parsed command line, printing results to stdout.
pub fn run(cli: Cli) -> Result<()> {
    let work = move || -> Result<()> {
        let stdout = std::io::stdout();
        let mut stdout = stdout.lock();
        match &cli.command {
            Command::Screen(a) => {
                for path in cmd_screen(a)? {
                    writeln!(stdout, "{}", path.display())?;
                }
            }
            Command::Xi(a) => writeln!(stdout, "{}", output::fmt_score(cmd_xi(a)?))?,
            Command::Simulate(a) => {
                for path in cmd_simulate(a)? {
                    writeln!(stdout, "{}", path.display())?;
                }
            }
            Command::Concentration(a) => {
                for path in cmd_concentration(a)? {
                    writeln!(stdout, "{}", path.display())?;
                }
            }
            Command::Metrics(a) => {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&cmd_metrics(a)?)?)?
            }
        }
        Ok(())
    };
    match cli.threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("cannot start worker pool")?
            .install(work),
        None => work(),
    }
}
