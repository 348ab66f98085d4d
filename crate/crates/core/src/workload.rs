//! Process data model, workload files and seeded workload generation.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simulation time, in integer ticks.
pub type Tick = u64;

pub const CSV_HEADER: [&str; 3] = ["pid", "arrival", "burst"];

/// Default inclusive burst range for generated workloads.
pub const DEFAULT_BURST_RANGE: (Tick, Tick) = (1, 200);
/// Default inclusive arrival range for generated workloads.
pub const DEFAULT_ARRIVAL_RANGE: (Tick, Tick) = (0, 50);

/// Process identifier, e.g. `P1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pid(String);

impl Pid {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::Validation("pid must be nonempty".into()));
        }
        Ok(Pid(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Pid {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// One schedulable CPU-bound task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Process {
    pub pid: Pid,
    pub arrival: Tick,
    pub burst: Tick,
}

impl Process {
    pub fn new(pid: &str, arrival: Tick, burst: Tick) -> Result<Self> {
        if burst == 0 {
            return Err(Error::Validation(format!("{pid}: burst must be at least 1")));
        }
        Ok(Process { pid: Pid::new(pid)?, arrival, burst })
    }
}

/// An ordered collection of processes with distinct pids.
///
/// Input order is preserved; it is the final tie-breaker for every policy.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct ProcessSet {
    processes: Vec<Process>,
}

impl ProcessSet {
    pub fn new(processes: Vec<Process>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(processes.len());
        for p in &processes {
            if p.burst == 0 {
                return Err(Error::Validation(format!("{}: burst must be at least 1", p.pid)));
            }
            if !seen.insert(p.pid.as_str()) {
                return Err(Error::Validation(format!("duplicate pid {}", p.pid)));
            }
        }
        Ok(ProcessSet { processes })
    }

    /// Builds a set from `(pid, arrival, burst)` triples.
    pub fn from_triples(rows: &[(&str, Tick, Tick)]) -> Result<Self> {
        let processes =
            rows.iter().map(|&(pid, arrival, burst)| Process::new(pid, arrival, burst)).collect::<Result<Vec<_>>>()?;
        Self::new(processes)
    }

    pub fn processes(&self) -> &[Process] {
        &self.processes
    }

    pub fn len(&self) -> usize {
        self.processes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Process> {
        self.processes.iter()
    }

    pub fn get(&self, pid: &Pid) -> Option<&Process> {
        self.processes.iter().find(|p| &p.pid == pid)
    }

    pub fn total_burst(&self) -> Tick {
        self.processes.iter().map(|p| p.burst).sum()
    }
}

impl<'a> IntoIterator for &'a ProcessSet {
    type Item = &'a Process;
    type IntoIter = std::slice::Iter<'a, Process>;

    fn into_iter(self) -> Self::IntoIter {
        self.processes.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorkloadFormat {
    #[default]
    Csv,
    Json,
}

impl WorkloadFormat {
    /// Picks JSON for `.json` paths and CSV for everything else.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => WorkloadFormat::Json,
            _ => WorkloadFormat::Csv,
        }
    }
}

impl FromStr for WorkloadFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(WorkloadFormat::Csv),
            "json" => Ok(WorkloadFormat::Json),
            other => Err(Error::Argument(format!("unknown workload format `{other}`"))),
        }
    }
}

// Rows are read with signed fields so that a negative or zero burst is a
// validation error rather than a syntax error.
#[derive(Deserialize)]
struct RawRow {
    pid: String,
    arrival: i64,
    burst: i64,
}

fn validate_row(row: RawRow) -> Result<Process> {
    if row.arrival < 0 {
        return Err(Error::Validation(format!("{}: arrival must be nonnegative", row.pid)));
    }
    if row.burst <= 0 {
        return Err(Error::Validation(format!("{}: burst must be at least 1", row.pid)));
    }
    Process::new(&row.pid, row.arrival as Tick, row.burst as Tick)
}

/// Parses a workload file. CSV requires the `pid,arrival,burst` header.
pub fn parse_workload(text: &str, format: WorkloadFormat) -> Result<ProcessSet> {
    match format {
        WorkloadFormat::Csv => parse_csv(text),
        WorkloadFormat::Json => parse_json(text),
    }
}

fn parse_csv(text: &str) -> Result<ProcessSet> {
    if text.trim().is_empty() {
        return Ok(ProcessSet::default());
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    if header.iter().map(str::to_ascii_lowercase).ne(CSV_HEADER.iter().map(|s| s.to_string())) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `pid,arrival,burst`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut processes = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let row: RawRow =
            record.deserialize(Some(&header)).map_err(|e| Error::Parse { line, message: describe_csv_error(&e) })?;
        processes.push(validate_row(row).map_err(|e| match e {
            Error::Validation(m) => Error::Validation(format!("line {line}: {m}")),
            other => other,
        })?);
    }
    ProcessSet::new(processes)
}

fn describe_csv_error(err: &csv::Error) -> String {
    match err.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => err.to_string(),
    }
}

fn csv_error(err: csv::Error, fallback_line: u64) -> Error {
    let line = err.position().map_or(fallback_line, |p| p.line());
    Error::Parse { line, message: describe_csv_error(&err) }
}

fn parse_json(text: &str) -> Result<ProcessSet> {
    let rows: Vec<RawRow> =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line() as u64, message: e.to_string() })?;
    let processes = rows.into_iter().map(validate_row).collect::<Result<Vec<_>>>()?;
    ProcessSet::new(processes)
}

/// Writes a workload in the given format. CSV output always has a header.
pub fn serialize_workload(set: &ProcessSet, format: WorkloadFormat) -> String {
    match format {
        WorkloadFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(CSV_HEADER).expect("in-memory write");
            for p in set {
                writer
                    .write_record([p.pid.as_str(), &p.arrival.to_string(), &p.burst.to_string()])
                    .expect("in-memory write");
            }
            let bytes = writer.into_inner().expect("in-memory flush");
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        WorkloadFormat::Json => {
            let mut out = serde_json::to_string_pretty(set).expect("workload serializes");
            out.push('\n');
            out
        }
    }
}

/// Inclusive range of ticks, written `lo:hi` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickRange {
    pub lo: Tick,
    pub hi: Tick,
}

impl TickRange {
    pub fn new(lo: Tick, hi: Tick) -> Self {
        TickRange { lo, hi }
    }
}

impl From<(Tick, Tick)> for TickRange {
    fn from((lo, hi): (Tick, Tick)) -> Self {
        TickRange { lo, hi }
    }
}

impl FromStr for TickRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) =
            s.split_once(':').ok_or_else(|| Error::Argument(format!("range `{s}` must be written lo:hi")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<Tick>()
                .map_err(|_| Error::Argument(format!("range bound `{v}` is not a nonnegative integer")))
        };
        Ok(TickRange { lo: parse(lo)?, hi: parse(hi)? })
    }
}

impl fmt::Display for TickRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Generates a reproducible random workload.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
/// For each process `P1..Pn` in order, one value is drawn for the arrival and
/// then one for the burst. A value uniform on `[lo, hi]` is taken from the
/// next 64-bit output `x` as `lo + x % span` (`span = hi - lo + 1`), redrawing
/// whenever `x >= span * floor(2^64 / span)` so the result is unbiased.
pub fn generate_random_workload(
    n: usize,
    seed: u64,
    burst_range: impl Into<TickRange>,
    arrival_range: impl Into<TickRange>,
) -> Result<ProcessSet> {
    let burst = burst_range.into();
    let arrival = arrival_range.into();
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    if burst.lo == 0 || burst.lo > burst.hi {
        return Err(Error::Argument(format!("burst range {burst} must satisfy 1 <= lo <= hi")));
    }
    if arrival.lo > arrival.hi {
        return Err(Error::Argument(format!("arrival range {arrival} must satisfy lo <= hi")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let processes = (1..=n)
        .map(|i| {
            let at = uniform_inclusive(&mut rng, arrival);
            let bt = uniform_inclusive(&mut rng, burst);
            Process::new(&format!("P{i}"), at, bt)
        })
        .collect::<Result<Vec<_>>>()?;
    ProcessSet::new(processes)
}

fn uniform_inclusive(rng: &mut impl RngCore, range: TickRange) -> Tick {
    let span = (range.hi - range.lo).wrapping_add(1);
    if span == 0 {
        // full u64 domain
        return rng.next_u64();
    }
    let zone = span * (u64::MAX / span);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return range.lo + x % span;
        }
    }
}
