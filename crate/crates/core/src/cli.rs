//! `mmrr` command-line front end.
//!
//! Commands return an [`Outcome`] rather than printing, so they can be driven
//! from tests without spawning a process.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{builder::PossibleValuesParser, Args, Parser, Subcommand, ValueEnum};

use crate::cases::{self, builtin_case, builtin_cases, reproduce_case, CaseReport};
use crate::engine::{run_simulation, ArrivalMode, Policy, SimConfig};
use crate::error::Error;
use crate::metrics::aggregate;
use crate::policies::{DEFAULT_QUANTUM_FLOOR, DEFAULT_STATIC_QUANTUM};
use crate::report::{self, render_comparison_table, ComparisonRow, TableFormat};
use crate::workload::{
    self, generate_random_workload, parse_workload, serialize_workload, ProcessSet, TickRange, WorkloadFormat,
};

const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Debug, Parser)]
#[command(name = "mmrr", version, about = "Min-Max Round Robin and classic CPU scheduling simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one policy over a workload and print its Gantt chart and metrics.
    Simulate(SimulateArgs),
    /// Run several policies over the same workload and tabulate the results.
    Compare(CompareArgs),
    /// Re-run the built-in experiment cases and check them against expected results.
    Reproduce(ReproduceArgs),
    /// Write a seeded random workload.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct SchedulingArgs {
    /// Static quantum for RR.
    #[arg(long, default_value_t = DEFAULT_STATIC_QUANTUM)]
    pub tq: u64,
    /// Lower bound on the Min-Max quantum.
    #[arg(long, default_value_t = DEFAULT_QUANTUM_FLOOR)]
    pub floor: u64,
    /// `standard` or `paper_faithful` (schedule every process from t=0).
    #[arg(long, default_value = "standard")]
    pub arrival_mode: ArrivalMode,
}

impl SchedulingArgs {
    fn config(&self, policy: Policy) -> SimConfig {
        SimConfig { policy, static_quantum: self.tq, quantum_floor: self.floor, arrival_mode: self.arrival_mode }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Workload file (CSV or JSON), or `builtin:<case>`.
    pub input: String,
    /// Overrides format detection from the file extension.
    #[arg(long)]
    pub input_format: Option<WorkloadFormat>,
    #[arg(long, default_value = "mmrr")]
    pub policy: Policy,
    #[command(flatten)]
    pub sched: SchedulingArgs,
    #[arg(long, value_enum, default_value_t = GanttFormat::Ascii)]
    pub gantt: GanttFormat,
    /// Draw consecutive slices of one process as a single bar.
    #[arg(long)]
    pub merge_adjacent: bool,
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    pub metrics: TextOrJson,
    /// `json` prints the schedule and metrics as a single JSON document.
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    pub format: TextOrJson,
    /// Write the chart here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub input: String,
    #[arg(long)]
    pub input_format: Option<WorkloadFormat>,
    /// Comma-separated, at least two of rr, mmrr, fcfs, sjf.
    #[arg(long, value_delimiter = ',', default_value = "rr,mmrr")]
    pub policies: Vec<Policy>,
    #[command(flatten)]
    pub sched: SchedulingArgs,
    #[arg(long, value_enum, default_value_t = TableFormatArg::Text)]
    pub format: TableFormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long = "case", default_value = "all", value_parser = PossibleValuesParser::new(["all", "illustration", "case1", "case3", "case4", "case5"]))]
    pub case: String,
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    pub format: TextOrJson,
    /// Also write `case,algorithm,metric,value` plot data to this CSV file.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Also write each selected case's workload as `<case>.csv` into this directory.
    #[arg(long)]
    pub export_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1:200")]
    pub burst_range: TickRange,
    #[arg(long, default_value = "0:50")]
    pub arrival_range: TickRange,
    #[arg(long, default_value = "csv")]
    pub format: WorkloadFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GanttFormat {
    Ascii,
    Svg,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextOrJson {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormatArg {
    Text,
    Csv,
    Json,
    Markdown,
}

impl From<TableFormatArg> for TableFormat {
    fn from(f: TableFormatArg) -> Self {
        match f {
            TableFormatArg::Text => TableFormat::Text,
            TableFormatArg::Csv => TableFormat::Csv,
            TableFormatArg::Json => TableFormat::Json,
            TableFormatArg::Markdown => TableFormat::Markdown,
        }
    }
}

/// What a command produced and the process exit status it implies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, ..Default::default() }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failed(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_with_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(err) => {
            let text = err.render().to_string();
            let code = err.exit_code();
            if err.use_stderr() {
                Outcome { stderr: text, code, ..Default::default() }
            } else {
                Outcome { stdout: text, code, ..Default::default() }
            }
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Reproduce(args) => cmd_reproduce(&args),
        Command::Generate(args) => cmd_generate(&args),
    };
    match result {
        Ok(outcome) => outcome,
        Err(CliError::Usage(msg)) => Outcome { stderr: format!("error: {msg}\n"), code: 2, ..Default::default() },
        Err(CliError::Failed(err)) => Outcome { stderr: format!("error: {err}\n"), code: 1, ..Default::default() },
    }
}

fn load_workload(input: &str, format: Option<WorkloadFormat>) -> CliResult<ProcessSet> {
    if let Some(name) = input.strip_prefix(BUILTIN_PREFIX) {
        return builtin_case(name)
            .map(|c| c.workload)
            .ok_or_else(|| CliError::Usage(format!("unknown built-in case `{name}`")));
    }
    let path = Path::new(input);
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{input}: {e}")))?;
    let format = format.unwrap_or_else(|| WorkloadFormat::from_path(path));
    let set = parse_workload(&text, format)?;
    if set.is_empty() {
        return Err(Error::Argument("workload is empty".into()).into());
    }
    Ok(set)
}

fn emit(out: &Option<PathBuf>, text: String) -> CliResult<Outcome> {
    match out {
        Some(path) => {
            fs::write(path, &text)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

/// `simulate`: Gantt chart plus metrics for one policy.
///
/// With `--gantt svg` the SVG goes to `--out` (metrics to stdout) or, without
/// `--out`, alone to stdout.
fn cmd_simulate(args: &SimulateArgs) -> CliResult<Outcome> {
    let set = load_workload(&args.input, args.input_format)?;
    let config = args.sched.config(args.policy);
    let schedule = run_simulation(&set, &config)?;
    let metrics = aggregate(&schedule)?;

    if args.format == TextOrJson::Json {
        let doc = serde_json::json!({
            "config": config,
            "schedule": schedule.to_json_value(),
            "metrics": metrics,
        });
        return emit(&args.out, format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")));
    }

    let metrics_text = match args.metrics {
        TextOrJson::Text => metrics.to_text(),
        TextOrJson::Json => format!("{}\n", metrics.to_json()),
    };
    match args.gantt {
        GanttFormat::Svg => {
            let svg = report::render_gantt_svg(&schedule);
            match &args.out {
                Some(path) => {
                    fs::write(path, svg)?;
                    Ok(Outcome::ok(metrics_text))
                }
                None => Ok(Outcome::ok(svg)),
            }
        }
        GanttFormat::Ascii => {
            let chart = report::render_gantt_ascii(&schedule, args.merge_adjacent);
            emit(&args.out, format!("{} {}\n{chart}\n{metrics_text}", config.policy, describe(&config)))
        }
        GanttFormat::None => emit(&args.out, metrics_text),
    }
}

fn describe(config: &SimConfig) -> String {
    let knob = match config.policy {
        Policy::Rr => format!("tq={}", config.static_quantum),
        Policy::Mmrr => format!("floor={}", config.quantum_floor),
        Policy::Fcfs | Policy::Sjf => String::new(),
    };
    format!("({knob}{}arrivals={})", if knob.is_empty() { "" } else { ", " }, config.arrival_mode)
}

fn cmd_compare(args: &CompareArgs) -> CliResult<Outcome> {
    if args.policies.len() < 2 {
        return Err(CliError::Usage("compare needs at least two policies, e.g. --policies rr,mmrr".into()));
    }
    let set = load_workload(&args.input, args.input_format)?;
    let rows = args
        .policies
        .iter()
        .map(|&policy| {
            let schedule = run_simulation(&set, &args.sched.config(policy))?;
            Ok(ComparisonRow::from_report(policy.label(), &aggregate(&schedule)?))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    emit(&args.out, render_comparison_table(&rows, args.format.into()))
}

fn cmd_reproduce(args: &ReproduceArgs) -> CliResult<Outcome> {
    let selected: Vec<_> = builtin_cases().into_iter().filter(|c| args.case == "all" || c.name == args.case).collect();

    // cases are independent pure simulations
    let reports: Vec<CaseReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected.iter().map(|c| scope.spawn(move || reproduce_case(c))).collect();
        handles.into_iter().map(|h| h.join().expect("reproduce thread panicked")).collect::<crate::Result<_>>()
    })?;

    if let Some(path) = &args.plot_data {
        let grouped = selected
            .iter()
            .map(|c| Ok((c.name.to_string(), c.comparison_rows()?)))
            .collect::<crate::Result<Vec<_>>>()?;
        fs::write(path, report::export_plot_data(&grouped))?;
    }
    if let Some(dir) = &args.export_dir {
        fs::create_dir_all(dir)?;
        for c in &selected {
            fs::write(dir.join(format!("{}.csv", c.name)), serialize_workload(&c.workload, WorkloadFormat::Csv))?;
        }
    }

    let stdout = match args.format {
        TextOrJson::Text => cases::render_reproduction_text(&reports),
        TextOrJson::Json => format!("{}\n", serde_json::to_string_pretty(&reports).expect("json")),
    };
    let code = if reports.iter().any(CaseReport::has_failures) { 1 } else { 0 };
    Ok(Outcome { stdout, stderr: String::new(), code })
}

fn cmd_generate(args: &GenerateArgs) -> CliResult<Outcome> {
    let set =
        generate_random_workload(args.n, args.seed, args.burst_range, args.arrival_range).map_err(|e| match e {
            Error::Argument(msg) => CliError::Usage(msg),
            other => CliError::Failed(other),
        })?;
    emit(&args.out, workload::serialize_workload(&set, args.format))
}
