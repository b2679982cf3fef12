//! The `bernstein` command line: fitting, cross-validation, theory dumps,
//! Monte Carlo tables and the update-cost benchmark.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for runtime errors.
//! Output is assembled in memory and written only once the command has
//! succeeded, so a failed run never leaves a partial file behind.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use bernstein_core::asymptotics::{
    lambda_table, optimal_mise, optimal_order, LambdaEntry, Method, TheoryConstants,
};
use bernstein_core::estimators::{BatchEstimator, BatchKind, DensityEstimate, EvalGrid, RecursiveEstimator};
use bernstein_core::schedules::{optimal_order_schedule, OrderSchedule, StepsizeSchedule};
use bernstein_core::selection::{
    default_exponent_grid, default_order_candidates, lscv_batch, lscv_recursive, LscvResult,
};
use bernstein_core::simulate::{
    bench_update, reports_to_csv, reports_to_markdown, run_table, TableConfig, ZooId,
};
use bernstein_core::transforms::SupportTransform;
use bernstein_core::Sample;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<bernstein_core::Error> for CliError {
    fn from(e: bernstein_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "bernstein", version, about = "Bernstein-polynomial density estimation on [0, 1]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an estimator to a CSV sample and dump it on a quadrature grid.
    Fit(FitArgs),
    /// Least-squares cross-validation scores over candidate orders (JSON).
    Lscv(LscvArgs),
    /// Theory constants, optimal orders and optimal MISE for a zoo density (JSON).
    Theory(TheoryArgs),
    /// Averaged-ISE table from a TOML configuration.
    Simulate(SimulateArgs),
    /// Recursive update versus batch refit timing (JSON).
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Recursive,
    Vitale,
    Leblanc,
    Generalized,
    Multiplicative,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Markdown,
    Json,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with one observation per line; a non-numeric first line is a header.
    #[arg(long)]
    pub input: PathBuf,
    /// Support of the data: `lo,hi`, `real`, `halfline` or `unit`.
    #[arg(long, default_value = "unit")]
    pub support: String,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    #[arg(long, value_enum, default_value = "recursive")]
    pub kind: Kind,
    /// Order ratio for the generalized, multiplicative and normalized kinds [default: 2].
    #[arg(long)]
    pub b: Option<u32>,
    /// Floor of the multiplicative and normalized corrections [default: 0.00001].
    #[arg(long)]
    pub eps: Option<f64>,
    /// Recursive stepsize `gamma0 / n^alpha` [default: 1].
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Recursive stepsize exponent [default: 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Recursive order constant `c` in `m_n = c n^a` [default: 1].
    #[arg(long)]
    pub order_constant: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Bernstein order; constant for the recursive kind. Chosen by LSCV when
    /// neither this nor `--exponent` is given.
    #[arg(long)]
    pub m: Option<usize>,
    /// Recursive order exponent `a` in `m_n = c n^a`.
    #[arg(long, conflicts_with = "m")]
    pub exponent: Option<f64>,
    /// Number of Gauss–Legendre nodes in the output grid.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FitFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LscvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Comma-separated candidates: orders, or exponents for the recursive kind.
    #[arg(long)]
    pub candidates: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Zoo density `a` through `j`.
    #[arg(long, default_value = "a")]
    pub density: String,
    /// Sample size for optimal orders and MISE.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML file with `densities`, `estimators`, `sizes`, `trials` and optional `seed`.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 500)]
    pub n_initial: usize,
    #[arg(long, default_value_t = 500)]
    pub n_additional: usize,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> CliResult<()> {
    let (text, output) = match command {
        Command::Fit(a) => (cmd_fit(a)?, &a.output),
        Command::Lscv(a) => (cmd_lscv(a)?, &a.output),
        Command::Theory(a) => (cmd_theory(a)?, &a.output),
        Command::Simulate(a) => (cmd_simulate(a)?, &a.output),
        Command::Bench(a) => (cmd_bench(a)?, &a.output),
    };
    emit(&text, output.as_deref())
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Rounds to 9 significant digits.
pub fn sig9(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Runtime(format!("cannot serialize output: {e}")))
}

/// Reads one observation per line. Blank lines are skipped and a
/// non-numeric first line is taken as a header. Values are checked against
/// the support and mapped onto `[0, 1]`.
pub fn read_sample(path: &Path, transform: SupportTransform) -> CliResult<Sample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut seen_line = false;
    for (i, line) in text.lines().enumerate() {
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        let first = !seen_line;
        seen_line = true;
        let v = match field.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            Ok(_) => {
                return Err(CliError::Runtime(format!(
                    "{}:{}: `{field}` is not a finite number",
                    path.display(),
                    i + 1
                )))
            }
            Err(_) if first => continue,
            Err(_) => {
                return Err(CliError::Runtime(format!(
                    "{}:{}: `{field}` is not a number",
                    path.display(),
                    i + 1
                )))
            }
        };
        transform.forward(v).map_err(|_| {
            CliError::Runtime(format!(
                "{}:{}: observation {v} is outside the support {transform}; widen --support",
                path.display(),
                i + 1
            ))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Runtime(format!("{}: no observations", path.display())));
    }
    Ok(Sample::from_raw(&values, transform)?)
}

fn parse_support(s: &str) -> CliResult<SupportTransform> {
    s.parse().map_err(|e: bernstein_core::Error| CliError::Usage(e.to_string()))
}

/// A resolved estimator family with every default filled in.
#[derive(Debug, Clone, Copy)]
enum Family {
    Recursive { stepsize: StepsizeSchedule, c: f64 },
    Batch(BatchKind),
}

impl EstimatorArgs {
    fn family(&self) -> CliResult<Family> {
        let reject = |flag: &str| {
            Err(CliError::Usage(format!(
                "--{flag} does not apply to the {:?} estimator",
                self.kind
            )))
        };
        let recursive = self.kind == Kind::Recursive;
        if !recursive {
            if self.gamma0.is_some() {
                return reject("gamma0");
            }
            if self.alpha.is_some() {
                return reject("alpha");
            }
            if self.order_constant.is_some() {
                return reject("order-constant");
            }
        }
        let takes_b = matches!(self.kind, Kind::Generalized | Kind::Multiplicative | Kind::Normalized);
        if !takes_b && self.b.is_some() {
            return reject("b");
        }
        let takes_eps = matches!(self.kind, Kind::Multiplicative | Kind::Normalized);
        if !takes_eps && self.eps.is_some() {
            return reject("eps");
        }
        let b = self.b.unwrap_or(BatchKind::DEFAULT_B);
        let eps = self.eps.unwrap_or(BatchKind::DEFAULT_EPS);
        let kind = match self.kind {
            Kind::Recursive => {
                let stepsize = StepsizeSchedule::new(self.gamma0.unwrap_or(1.0), self.alpha.unwrap_or(1.0))
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                return Ok(Family::Recursive { stepsize, c: self.order_constant.unwrap_or(1.0) });
            }
            Kind::Vitale => BatchKind::Vitale,
            Kind::Leblanc => BatchKind::Leblanc,
            Kind::Generalized => BatchKind::Generalized { b },
            Kind::Multiplicative => BatchKind::Multiplicative { b, eps },
            Kind::Normalized => BatchKind::Normalized { b, eps },
        };
        kind.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Family::Batch(kind))
    }
}

/// Orders admissible for a batch kind: every integer for Vitale, multiples
/// of `b` otherwise.
fn batch_candidates(kind: BatchKind, n: usize) -> Vec<usize> {
    let step = if kind == BatchKind::Vitale { 1 } else { kind.b() as usize };
    default_order_candidates(n, step)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| CliError::Usage(format!("candidate `{}` is not a valid number", t.trim())))
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct LscvOutput<T> {
    estimator: String,
    n: usize,
    /// `orders` or `exponents`.
    candidate_type: &'static str,
    candidates: Vec<T>,
    scores: Vec<f64>,
    integral_sq: Vec<f64>,
    selected: T,
}

impl<T: Copy> LscvOutput<T> {
    fn new(estimator: String, n: usize, candidate_type: &'static str, r: LscvResult<T>) -> Self {
        Self {
            estimator,
            n,
            candidate_type,
            candidates: r.candidates,
            scores: r.scores.into_iter().map(sig9).collect(),
            integral_sq: r.integral_sq.into_iter().map(sig9).collect(),
            selected: r.argmin,
        }
    }
}

fn family_label(f: &Family) -> String {
    match f {
        Family::Recursive { stepsize, c } => format!("recursive(stepsize={stepsize}, m_n={c} n^a)"),
        Family::Batch(kind) => kind.to_string(),
    }
}

pub fn cmd_lscv(a: &LscvArgs) -> CliResult<String> {
    let family = a.estimator.family()?;
    let sample = read_sample(&a.data.input, parse_support(&a.data.support)?)?;
    let n = sample.len();
    let label = family_label(&family);
    match family {
        Family::Recursive { stepsize, c } => {
            let exps = match &a.candidates {
                Some(s) => parse_list::<f64>(s)?,
                None => default_exponent_grid(),
            };
            let r = lscv_recursive(&sample, &stepsize, c, &exps)?;
            json(&LscvOutput::new(label, n, "exponents", r))
        }
        Family::Batch(kind) => {
            let ms = match &a.candidates {
                Some(s) => parse_list::<usize>(s)?,
                None => batch_candidates(kind, n),
            };
            let r = lscv_batch(&sample, kind, &ms)?;
            json(&LscvOutput::new(label, n, "orders", r))
        }
    }
}

#[derive(Debug, Serialize)]
struct FitOutput {
    estimator: String,
    n: usize,
    support: String,
    /// Constant order, or the order in force at the last observation.
    order: usize,
    /// Recursive order schedule `m_n = c n^a`, when one is used.
    order_constant: Option<f64>,
    order_exponent: Option<f64>,
    selected_by_lscv: bool,
    /// `∫ f̂` over the original support.
    mass: f64,
    x: Vec<f64>,
    density: Vec<f64>,
    weight: Vec<f64>,
}

pub fn cmd_fit(a: &FitArgs) -> CliResult<String> {
    let family = a.estimator.family()?;
    if a.grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    if a.exponent.is_some() && matches!(family, Family::Batch(_)) {
        return Err(CliError::Usage("--exponent applies to the recursive estimator only".into()));
    }
    let transform = parse_support(&a.data.support)?;
    let sample = read_sample(&a.data.input, transform)?;
    let n = sample.len();
    let grid = Arc::new(EvalGrid::gauss_legendre(a.grid));
    let selected_by_lscv = a.m.is_none() && a.exponent.is_none();

    let (values, order, schedule) = match family {
        Family::Recursive { stepsize, c } => {
            let orders = match (a.m, a.exponent) {
                (Some(m), _) => OrderSchedule::constant(m)?,
                (None, Some(e)) => OrderSchedule::new(c, e)?,
                (None, None) => {
                    let r = lscv_recursive(&sample, &stepsize, c, &default_exponent_grid())?;
                    eprintln!("lscv selected m_n = {c} n^{}", r.argmin);
                    OrderSchedule::new(c, r.argmin)?
                }
            };
            let mut est = RecursiveEstimator::with_grid(grid.clone(), stepsize, orders);
            est.update_all(sample.values())?;
            let sched = (orders.a() != 0.0).then_some((orders.c(), orders.a()));
            (est.values().to_vec(), orders.order_at(n)?, sched)
        }
        Family::Batch(kind) => {
            let m = match a.m {
                Some(m) => m,
                None => {
                    let r = lscv_batch(&sample, kind, &batch_candidates(kind, n))?;
                    eprintln!("lscv selected m = {}", r.argmin);
                    r.argmin
                }
            };
            let est = BatchEstimator::new(kind, m, &sample)?;
            (est.eval_grid(&grid), m, None)
        }
    };

    let mut x = Vec::with_capacity(grid.len());
    let mut density = Vec::with_capacity(grid.len());
    let mut weight = Vec::with_capacity(grid.len());
    for ((&y, &w), &g) in grid.abscissas().iter().zip(grid.weights()).zip(&values) {
        let xo = transform.backward(y)?;
        let jac = transform.jacobian(xo)?;
        x.push(xo);
        density.push(g * jac);
        weight.push(w / jac);
    }
    let mass: f64 = density.iter().zip(&weight).map(|(d, w)| d * w).sum();
    let out = FitOutput {
        estimator: family_label(&family),
        n,
        support: transform.to_string(),
        order,
        order_constant: schedule.map(|s| s.0),
        order_exponent: schedule.map(|s| s.1),
        selected_by_lscv,
        mass: sig9(mass),
        x: x.into_iter().map(sig9).collect(),
        density: density.into_iter().map(sig9).collect(),
        weight: weight.into_iter().map(sig9).collect(),
    };
    match a.format {
        FitFormat::Json => json(&out),
        FitFormat::Csv => {
            let mut s = String::from("x,density,weight\n");
            for ((x, d), w) in out.x.iter().zip(&out.density).zip(&out.weight) {
                s.push_str(&format!("{x},{d},{w}\n"));
            }
            Ok(s)
        }
    }
}

#[derive(Debug, Serialize)]
struct MethodTheory {
    estimator: String,
    optimal_order: usize,
    optimal_mise: f64,
    /// `m_n = c n^a` for the recursive kinds.
    order_constant: Option<f64>,
    order_exponent: Option<f64>,
}

#[derive(Debug, Serialize)]
struct TheoryOutput {
    density: String,
    description: &'static str,
    n: usize,
    c1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
    c5: f64,
    c6: f64,
    i_functional: f64,
    lambda: Vec<LambdaEntry>,
    methods: Vec<MethodTheory>,
}

pub fn cmd_theory(a: &TheoryArgs) -> CliResult<String> {
    let id: ZooId = a.density.parse().map_err(|e: bernstein_core::Error| CliError::Usage(e.to_string()))?;
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let tc = TheoryConstants::compute(&id.density())?;
    let mut methods = Vec::new();
    for s in [StepsizeSchedule::r1(), StepsizeSchedule::r2(), StepsizeSchedule::r3()] {
        let m = Method::Recursive(s);
        let sched = optimal_order_schedule(&tc, &s)?;
        methods.push(MethodTheory {
            estimator: format!("recursive(stepsize={s})"),
            optimal_order: optimal_order(&tc, &m, a.n)?,
            optimal_mise: sig9(optimal_mise(&tc, &m, a.n)?),
            order_constant: Some(sig9(sched.c())),
            order_exponent: Some(sig9(sched.a())),
        });
    }
    for kind in [
        BatchKind::Vitale,
        BatchKind::Leblanc,
        BatchKind::Generalized { b: 3 },
        BatchKind::Generalized { b: 4 },
        BatchKind::Multiplicative { b: 2, eps: BatchKind::DEFAULT_EPS },
        BatchKind::Normalized { b: 2, eps: BatchKind::DEFAULT_EPS },
    ] {
        let m = Method::Batch(kind);
        methods.push(MethodTheory {
            estimator: kind.to_string(),
            optimal_order: optimal_order(&tc, &m, a.n)?,
            optimal_mise: sig9(optimal_mise(&tc, &m, a.n)?),
            order_constant: None,
            order_exponent: None,
        });
    }
    json(&TheoryOutput {
        density: id.to_string(),
        description: id.description(),
        n: a.n,
        c1: sig9(tc.c1),
        c2: sig9(tc.c2),
        c3: sig9(tc.c3),
        c4: sig9(tc.c4),
        c5: sig9(tc.c5),
        c6: sig9(tc.c6),
        i_functional: sig9(tc.i_functional),
        lambda: lambda_table()
            .into_iter()
            .map(|e| LambdaEntry { lambda1: sig9(e.lambda1), lambda2: sig9(e.lambda2), ..e })
            .collect(),
        methods,
    })
}

pub fn read_table_config(path: &Path) -> CliResult<TableConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<String> {
    let config = read_table_config(&a.config)?;
    let reports = run_table(&config)?;
    match a.format {
        TableFormat::Csv => Ok(reports_to_csv(&reports)),
        TableFormat::Markdown => Ok(reports_to_markdown(&reports)),
        TableFormat::Json => json(&reports),
    }
}

pub fn cmd_bench(a: &BenchArgs) -> CliResult<String> {
    json(&bench_update(a.n_initial, a.n_additional, a.grid, a.seed)?)
}
