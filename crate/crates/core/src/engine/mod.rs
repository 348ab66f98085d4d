//! Single-CPU simulation.
//!
//! [`run_simulation`] is event driven: it jumps from dispatch to dispatch and
//! skips idle time. [`tick_oracle_simulate`] produces the same [`Schedule`] by
//! stepping one tick at a time and exists only to cross-check it.

mod oracle;

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policies::{
    self, baseline_order, mmrr_round, Baseline, QuantumDecision, ReadyEntry, ReadyQueueState, RrQueue,
};
use crate::workload::{Pid, ProcessSet, Tick};

pub use oracle::tick_oracle_simulate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Rr,
    Mmrr,
    Fcfs,
    Sjf,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Rr, Policy::Mmrr, Policy::Fcfs, Policy::Sjf];

    /// Display name used in tables, e.g. `MMRR`.
    pub fn label(self) -> &'static str {
        match self {
            Policy::Rr => "RR",
            Policy::Mmrr => "MMRR",
            Policy::Fcfs => "FCFS",
            Policy::Sjf => "SJF",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rr" => Ok(Policy::Rr),
            "mmrr" => Ok(Policy::Mmrr),
            "fcfs" => Ok(Policy::Fcfs),
            "sjf" => Ok(Policy::Sjf),
            other => Err(Error::Argument(format!("unknown policy `{other}`"))),
        }
    }
}

/// How arrival times influence scheduling.
///
/// `PaperFaithful` schedules every process as if it arrived at tick 0, in
/// input order; metrics still use the true arrival times. Table-level
/// reproduction of the static RR run on the staggered-arrival workload needs it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalMode {
    #[default]
    Standard,
    PaperFaithful,
}

impl fmt::Display for ArrivalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArrivalMode::Standard => "standard",
            ArrivalMode::PaperFaithful => "paper_faithful",
        })
    }
}

impl FromStr for ArrivalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "standard" => Ok(ArrivalMode::Standard),
            "paper_faithful" => Ok(ArrivalMode::PaperFaithful),
            other => Err(Error::Argument(format!("unknown arrival mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub policy: Policy,
    /// RR only.
    pub static_quantum: Tick,
    /// MMRR only.
    pub quantum_floor: Tick,
    pub arrival_mode: ArrivalMode,
}

impl SimConfig {
    pub fn new(policy: Policy) -> Self {
        SimConfig {
            policy,
            static_quantum: policies::DEFAULT_STATIC_QUANTUM,
            quantum_floor: policies::DEFAULT_QUANTUM_FLOOR,
            arrival_mode: ArrivalMode::Standard,
        }
    }

    pub fn rr(static_quantum: Tick) -> Self {
        SimConfig { static_quantum, ..Self::new(Policy::Rr) }
    }

    pub fn mmrr(quantum_floor: Tick) -> Self {
        SimConfig { quantum_floor, ..Self::new(Policy::Mmrr) }
    }

    pub fn with_arrival_mode(mut self, arrival_mode: ArrivalMode) -> Self {
        self.arrival_mode = arrival_mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.static_quantum == 0 {
            return Err(Error::Argument("static quantum must be at least 1".into()));
        }
        if self.quantum_floor == 0 {
            return Err(Error::Argument("quantum floor must be at least 1".into()));
        }
        Ok(())
    }

    /// Arrival time the scheduler sees for a process.
    pub(crate) fn scheduling_arrival(&self, arrival: Tick) -> Tick {
        match self.arrival_mode {
            ArrivalMode::Standard => arrival,
            ArrivalMode::PaperFaithful => 0,
        }
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::new(Policy::Mmrr)
    }
}

/// One contiguous stretch of CPU time given to one process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slice {
    pub pid: Pid,
    pub start: Tick,
    pub end: Tick,
}

impl Slice {
    pub fn len(&self) -> Tick {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Ready set at the start of one MMRR round, in dispatch order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub start: Tick,
    pub decision: QuantumDecision,
    /// `(pid, remaining before the round)`, sorted as dispatched.
    pub ready: Vec<(Pid, Tick)>,
}

/// Complete record of one simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub slices: Vec<Slice>,
    /// Finish tick per pid, in workload order.
    pub finish: IndexMap<Pid, Tick>,
    /// Effective quantum per MMRR round; the single static quantum for RR;
    /// empty for FCFS/SJF.
    pub quantum_trace: Vec<Tick>,
    /// MMRR only.
    pub rounds: Vec<RoundRecord>,
    pub workload: ProcessSet,
    pub config: SimConfig,
}

#[derive(Serialize)]
struct ScheduleExport<'a> {
    slices: &'a [Slice],
    quantum_trace: &'a [Tick],
    finish: &'a IndexMap<Pid, Tick>,
}

impl Schedule {
    pub(crate) fn assemble(
        workload: &ProcessSet,
        config: SimConfig,
        slices: Vec<Slice>,
        quantum_trace: Vec<Tick>,
        rounds: Vec<RoundRecord>,
    ) -> Self {
        let mut finish = IndexMap::with_capacity(workload.len());
        for p in workload {
            if let Some(last) = slices.iter().rev().find(|s| s.pid == p.pid) {
                finish.insert(p.pid.clone(), last.end);
            }
        }
        Schedule { slices, finish, quantum_trace, rounds, workload: workload.clone(), config }
    }

    /// End of the last slice.
    pub fn makespan(&self) -> Tick {
        self.slices.last().map_or(0, |s| s.end)
    }

    pub fn slices_of<'a>(&'a self, pid: &'a Pid) -> impl Iterator<Item = &'a Slice> + 'a {
        self.slices.iter().filter(move |s| &s.pid == pid)
    }

    /// CPU time granted to `pid` so far.
    pub fn scheduled_time(&self, pid: &Pid) -> Tick {
        self.slices_of(pid).map(Slice::len).sum()
    }

    /// True when every process has received its full burst.
    pub fn is_complete(&self) -> bool {
        self.workload.iter().all(|p| self.scheduled_time(&p.pid) == p.burst)
    }

    /// `{"slices": [...], "quantum_trace": [...], "finish": {...}}`
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("schedule serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.export()).expect("schedule serializes")
    }

    fn export(&self) -> ScheduleExport<'_> {
        ScheduleExport { slices: &self.slices, quantum_trace: &self.quantum_trace, finish: &self.finish }
    }

    /// Checks the structural invariants every produced schedule must hold
    /// and returns a description of each violation.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for (i, s) in self.slices.iter().enumerate() {
            if s.start >= s.end {
                violations.push(format!("slice {i} ({}) is empty or reversed", s.pid));
            }
            if let Some(next) = self.slices.get(i + 1) {
                if s.end > next.start {
                    violations.push(format!("slice {i} overlaps slice {}", i + 1));
                }
            }
        }
        for p in &self.workload {
            let got = self.scheduled_time(&p.pid);
            if got != p.burst {
                violations.push(format!("{} scheduled {got} ticks, burst {}", p.pid, p.burst));
            }
            let first_allowed = self.config.scheduling_arrival(p.arrival);
            if let Some(early) = self.slices_of(&p.pid).find(|s| s.start < first_allowed) {
                violations.push(format!("{} runs at {} before arrival {first_allowed}", p.pid, early.start));
            }
        }
        if let Some(pid) = self.slices.iter().map(|s| &s.pid).find(|pid| self.workload.get(pid).is_none()) {
            violations.push(format!("slice for unknown pid {pid}"));
        }
        violations.extend(self.idle_violations());
        violations
    }

    // The CPU may only sit idle while no admitted process has work left.
    fn idle_violations(&self) -> Vec<String> {
        let mut remaining: IndexMap<&Pid, Tick> = self.workload.iter().map(|p| (&p.pid, p.burst)).collect();
        let mut clock = 0;
        let mut out = Vec::new();
        for s in &self.slices {
            if s.start > clock {
                let waiting = self.workload.iter().find(|p| {
                    self.config.scheduling_arrival(p.arrival) <= clock && remaining.get(&p.pid).is_some_and(|&r| r > 0)
                });
                if let Some(p) = waiting {
                    out.push(format!("cpu idle {clock}..{} while {} was ready", s.start, p.pid));
                }
            }
            if let Some(r) = remaining.get_mut(&s.pid) {
                *r = r.saturating_sub(s.len());
            }
            clock = clock.max(s.end);
        }
        out
    }
}

/// Processes not yet admitted, ordered by (arrival, input order).
struct ArrivalFeed {
    pending: Vec<ReadyEntry>,
    next: usize,
}

impl ArrivalFeed {
    fn new(set: &ProcessSet, config: &SimConfig) -> Self {
        let mut pending: Vec<ReadyEntry> = set
            .iter()
            .enumerate()
            .map(|(order, p)| ReadyEntry {
                pid: p.pid.clone(),
                remaining: p.burst,
                arrival: config.scheduling_arrival(p.arrival),
                order,
            })
            .collect();
        pending.sort_by_key(|e| (e.arrival, e.order));
        ArrivalFeed { pending, next: 0 }
    }

    fn admit_until(&mut self, now: Tick) -> Vec<ReadyEntry> {
        let start = self.next;
        while self.next < self.pending.len() && self.pending[self.next].arrival <= now {
            self.next += 1;
        }
        self.pending[start..self.next].to_vec()
    }

    fn next_arrival(&self) -> Option<Tick> {
        self.pending.get(self.next).map(|e| e.arrival)
    }
}

/// Runs one policy over a workload.
pub fn run_simulation(set: &ProcessSet, config: &SimConfig) -> Result<Schedule> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::Argument("workload is empty".into()));
    }
    let feed = ArrivalFeed::new(set, config);
    let schedule = match config.policy {
        Policy::Rr => simulate_rr(set, config, feed),
        Policy::Mmrr => simulate_mmrr(set, config, feed)?,
        Policy::Fcfs => simulate_baseline(set, config, feed, Baseline::Fcfs),
        Policy::Sjf => simulate_baseline(set, config, feed, Baseline::Sjf),
    };
    Ok(schedule)
}

fn simulate_mmrr(set: &ProcessSet, config: &SimConfig, mut feed: ArrivalFeed) -> Result<Schedule> {
    let mut clock: Tick = 0;
    let mut ready = ReadyQueueState::default();
    let mut slices = Vec::new();
    let mut rounds = Vec::new();

    loop {
        // admission happens only at round boundaries
        for entry in feed.admit_until(clock) {
            ready.push(entry);
        }
        if ready.is_empty() {
            match feed.next_arrival() {
                Some(at) => {
                    clock = at;
                    continue;
                }
                None => break,
            }
        }

        let (plan, decision) = mmrr_round(&ready, config.quantum_floor)?;
        let before = plan
            .iter()
            .map(|d| {
                let remaining = ready.entries().iter().find(|e| e.order == d.order).map_or(0, |e| e.remaining);
                (d.pid.clone(), remaining)
            })
            .collect();
        rounds.push(RoundRecord { start: clock, decision, ready: before });

        for dispatch in plan {
            slices.push(Slice { pid: dispatch.pid, start: clock, end: clock + dispatch.run });
            clock += dispatch.run;
            ready.charge(dispatch.order, dispatch.run);
        }
    }

    let trace = rounds.iter().map(|r: &RoundRecord| r.decision.effective).collect();
    Ok(Schedule::assemble(set, *config, slices, trace, rounds))
}

fn simulate_rr(set: &ProcessSet, config: &SimConfig, mut feed: ArrivalFeed) -> Schedule {
    let mut clock: Tick = 0;
    let mut queue = RrQueue::new();
    let mut slices = Vec::new();
    feed.admit_until(clock).into_iter().for_each(|e| queue.admit(e));

    loop {
        if queue.is_empty() {
            match feed.next_arrival() {
                Some(at) => {
                    clock = at;
                    feed.admit_until(clock).into_iter().for_each(|e| queue.admit(e));
                }
                None => break,
            }
        }
        let (dispatch, rest) = queue.next_dispatch(config.static_quantum).expect("queue refilled above");
        slices.push(Slice { pid: dispatch.pid, start: clock, end: clock + dispatch.run });
        clock += dispatch.run;
        queue.complete(rest, feed.admit_until(clock));
    }

    Schedule::assemble(set, *config, slices, vec![config.static_quantum], Vec::new())
}

fn simulate_baseline(set: &ProcessSet, config: &SimConfig, feed: ArrivalFeed, policy: Baseline) -> Schedule {
    let jobs = feed.pending;
    let mut clock: Tick = 0;
    let mut slices = Vec::with_capacity(jobs.len());
    for idx in baseline_order(&jobs, policy) {
        let job = &jobs[idx];
        clock = clock.max(job.arrival);
        slices.push(Slice { pid: job.pid.clone(), start: clock, end: clock + job.remaining });
        clock += job.remaining;
    }
    Schedule::assemble(set, *config, slices, Vec::new(), Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[(&str, Tick, Tick)]) -> ProcessSet {
        ProcessSet::from_triples(rows).unwrap()
    }

    fn table5() -> ProcessSet {
        set(&[("P1", 0, 20), ("P2", 0, 40), ("P3", 0, 80), ("P4", 0, 160)])
    }

    fn finishes(s: &Schedule) -> Vec<(String, Tick)> {
        s.finish.iter().map(|(p, t)| (p.to_string(), *t)).collect()
    }

    fn bars(s: &Schedule) -> Vec<(String, Tick, Tick)> {
        s.slices.iter().map(|x| (x.pid.to_string(), x.start, x.end)).collect()
    }

    #[test]
    fn table5_mmrr() {
        let s = run_simulation(&table5(), &SimConfig::mmrr(25)).unwrap();
        assert_eq!(s.quantum_trace, vec![140, 25]);
        assert_eq!(finishes(&s), [("P1".into(), 20), ("P2".into(), 60), ("P3".into(), 140), ("P4".into(), 300)]);
        assert_eq!(s.slices.len(), 5);
        assert!(s.invariant_violations().is_empty());
    }

    #[test]
    fn single_process_every_policy() {
        let one = set(&[("P1", 0, 7)]);
        for policy in Policy::ALL {
            let s = run_simulation(&one, &SimConfig::new(policy)).unwrap();
            assert_eq!(bars(&s), [("P1".into(), 0, 7)], "{policy}");
        }
    }

    #[test]
    fn table9_rr_paper_faithful() {
        let w = set(&[("P1", 0, 22), ("P2", 17, 47), ("P3", 35, 66), ("P4", 50, 74)]);
        let cfg = SimConfig::rr(20).with_arrival_mode(ArrivalMode::PaperFaithful);
        let s = run_simulation(&w, &cfg).unwrap();
        assert_eq!(finishes(&s), [("P1".into(), 82), ("P2".into(), 149), ("P3".into(), 195), ("P4".into(), 209)]);
        assert!(s.invariant_violations().is_empty());
    }

    #[test]
    fn table7_rr_dispatch_sequence() {
        let w = set(&[("P1", 0, 5), ("P2", 2, 25), ("P3", 15, 55), ("P4", 23, 75)]);
        let s = run_simulation(&w, &SimConfig::rr(20)).unwrap();
        let seq: Vec<_> = s.slices.iter().map(|x| (x.pid.to_string(), x.len())).collect();
        let expected = [
            ("P1", 5),
            ("P2", 20),
            ("P3", 20),
            ("P4", 20),
            ("P2", 5),
            ("P3", 20),
            ("P4", 20),
            ("P3", 15),
            ("P4", 20),
            ("P4", 15),
        ];
        assert_eq!(seq, expected.map(|(p, n)| (p.to_string(), n)));
    }

    #[test]
    fn mmrr_admits_arrivals_only_between_rounds() {
        // case5 under MMRR: P2 arrives at 17 while P1's lone round runs.
        let w = set(&[("P1", 0, 22), ("P2", 17, 47), ("P3", 35, 66), ("P4", 50, 74)]);
        let s = run_simulation(&w, &SimConfig::mmrr(25)).unwrap();
        assert_eq!(s.quantum_trace, vec![25, 47, 25, 25, 25]);
        assert_eq!(s.rounds[1].ready, vec![(Pid::new("P2").unwrap(), 47)]);
        assert_eq!(s.rounds[1].start, 22);
    }

    #[test]
    fn idle_gap_jumps_to_next_arrival() {
        let w = set(&[("P1", 0, 5), ("P2", 40, 10)]);
        for policy in Policy::ALL {
            let s = run_simulation(&w, &SimConfig::new(policy)).unwrap();
            assert_eq!(bars(&s), [("P1".into(), 0, 5), ("P2".into(), 40, 50)], "{policy}");
            assert!(s.invariant_violations().is_empty());
        }
    }

    #[test]
    fn late_first_arrival() {
        let w = set(&[("P1", 12, 3)]);
        let s = run_simulation(&w, &SimConfig::rr(20)).unwrap();
        assert_eq!(bars(&s), [("P1".into(), 12, 15)]);
    }

    #[test]
    fn rejects_empty_workload_and_bad_config() {
        let err = run_simulation(&ProcessSet::default(), &SimConfig::default()).unwrap_err();
        assert_eq!(err, Error::Argument("workload is empty".into()));
        let err = run_simulation(&table5(), &SimConfig::rr(0)).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
        let err = run_simulation(&table5(), &SimConfig::mmrr(0)).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn self_redispatch_produces_separate_slices() {
        let s = run_simulation(&set(&[("P1", 0, 50)]), &SimConfig::rr(20)).unwrap();
        assert_eq!(s.slices.len(), 3);
    }

    #[test]
    fn json_export_shape() {
        let s = run_simulation(&set(&[("P1", 0, 7)]), &SimConfig::mmrr(25)).unwrap();
        let v = s.to_json_value();
        assert_eq!(v["slices"][0]["pid"], "P1");
        assert_eq!(v["slices"][0]["end"], 7);
        assert_eq!(v["quantum_trace"], serde_json::json!([25]));
        assert_eq!(v["finish"]["P1"], 7);
    }

    #[test]
    fn invariant_checker_catches_problems() {
        let mut s = run_simulation(&table5(), &SimConfig::rr(20)).unwrap();
        s.slices.pop();
        assert!(!s.invariant_violations().is_empty());

        let w = set(&[("P1", 10, 5)]);
        let mut s = run_simulation(&w, &SimConfig::rr(20)).unwrap();
        s.slices[0] = Slice { pid: Pid::new("P1").unwrap(), start: 2, end: 7 };
        assert!(s.invariant_violations().iter().any(|v| v.contains("before arrival")));

        let w = set(&[("P1", 0, 5)]);
        let mut s = run_simulation(&w, &SimConfig::rr(20)).unwrap();
        s.slices[0] = Slice { pid: Pid::new("P1").unwrap(), start: 3, end: 8 };
        assert!(s.invariant_violations().iter().any(|v| v.contains("idle")));
    }

    #[test]
    fn parse_policy_and_mode() {
        assert_eq!("MMRR".parse::<Policy>().unwrap(), Policy::Mmrr);
        assert!("srtn".parse::<Policy>().is_err());
        assert_eq!("paper-faithful".parse::<ArrivalMode>().unwrap(), ArrivalMode::PaperFaithful);
        assert_eq!("standard".parse::<ArrivalMode>().unwrap(), ArrivalMode::Standard);
    }
}
