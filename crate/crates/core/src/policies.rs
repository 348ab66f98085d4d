//! Dispatch rules: Min-Max Round Robin rounds, static Round Robin queueing,
//! and the non-preemptive FCFS/SJF baselines.
//!
//! These functions decide *who runs and for how long*. Advancing the clock,
//! admitting arrivals and recording slices is the engine's job.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::workload::{Pid, ProcessSet, Tick};

/// Default lower bound applied to the Min-Max quantum.
pub const DEFAULT_QUANTUM_FLOOR: Tick = 25;
/// Default quantum for static Round Robin.
pub const DEFAULT_STATIC_QUANTUM: Tick = 20;

/// The quantum chosen for one Min-Max round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumDecision {
    /// `max - min` of the remaining bursts, or the lone remaining burst.
    pub raw: Tick,
    /// `raw` raised to the floor.
    pub effective: Tick,
}

impl QuantumDecision {
    pub fn is_floored(&self) -> bool {
        self.effective != self.raw
    }
}

/// A ready process as seen by a policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadyEntry {
    pub pid: Pid,
    pub remaining: Tick,
    pub arrival: Tick,
    /// Position of the process in its workload; last tie-breaker.
    pub order: usize,
}

impl ReadyEntry {
    /// Ascending remaining burst, then arrival, then input order.
    fn round_key(&self) -> (Tick, Tick, usize) {
        (self.remaining, self.arrival, self.order)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadyQueueState {
    entries: Vec<ReadyEntry>,
}

impl ReadyQueueState {
    pub fn new(entries: Vec<ReadyEntry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.remaining == 0) {
            return Err(Error::Argument(format!("{} has no remaining burst", e.pid)));
        }
        Ok(ReadyQueueState { entries })
    }

    pub fn entries(&self) -> &[ReadyEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn push(&mut self, entry: ReadyEntry) {
        assert!(entry.remaining > 0, "ready entries must have work left");
        self.entries.push(entry);
    }

    /// Charges `run` ticks to the process at input position `order` and
    /// drops it if it has finished.
    pub fn charge(&mut self, order: usize, run: Tick) {
        if let Some(idx) = self.entries.iter().position(|e| e.order == order) {
            let entry = &mut self.entries[idx];
            entry.remaining -= run;
            if entry.remaining == 0 {
                self.entries.remove(idx);
            }
        }
    }
}

/// One CPU grant decided by a policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatch {
    pub pid: Pid,
    pub order: usize,
    pub run: Tick,
}

/// Range of the remaining bursts, floored.
///
/// With a single value the raw quantum is that value itself.
pub fn compute_min_max_quantum(remaining: &[Tick], floor: Tick) -> Result<QuantumDecision> {
    if floor == 0 {
        return Err(Error::Argument("quantum floor must be at least 1".into()));
    }
    let (min, max) = match remaining {
        [] => return Err(Error::Argument("cannot compute a quantum for an empty ready queue".into())),
        [single] => (0, *single),
        values => {
            let min = *values.iter().min().unwrap();
            let max = *values.iter().max().unwrap();
            (min, max)
        }
    };
    if remaining.contains(&0) {
        return Err(Error::Argument("remaining bursts must be positive".into()));
    }
    let raw = max - min;
    Ok(QuantumDecision { raw, effective: raw.max(floor) })
}

/// Plans one Min-Max round over the current ready set.
///
/// Every entry is dispatched exactly once, in ascending order of remaining
/// burst, for `min(quantum, remaining)` ticks. Processes arriving while the
/// round runs are not part of it.
pub fn mmrr_round(state: &ReadyQueueState, floor: Tick) -> Result<(Vec<Dispatch>, QuantumDecision)> {
    let mut sorted: Vec<&ReadyEntry> = state.entries.iter().collect();
    sorted.sort_by_key(|e| e.round_key());
    let remaining: Vec<Tick> = sorted.iter().map(|e| e.remaining).collect();
    let decision = compute_min_max_quantum(&remaining, floor)?;
    let plan = sorted
        .into_iter()
        .map(|e| Dispatch { pid: e.pid.clone(), order: e.order, run: e.remaining.min(decision.effective) })
        .collect();
    Ok((plan, decision))
}

/// FIFO ready queue for static-quantum Round Robin.
#[derive(Debug, Clone, Default)]
pub struct RrQueue {
    queue: VecDeque<ReadyEntry>,
}

impl RrQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn admit(&mut self, entry: ReadyEntry) {
        self.queue.push_back(entry);
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn pids(&self) -> impl Iterator<Item = &Pid> {
        self.queue.iter().map(|e| &e.pid)
    }

    /// Pops the head and grants it up to one quantum.
    ///
    /// The returned entry already has the run length deducted; hand it back
    /// through [`RrQueue::complete`] once the slice ends.
    pub fn next_dispatch(&mut self, quantum: Tick) -> Option<(Dispatch, ReadyEntry)> {
        let mut entry = self.queue.pop_front()?;
        let run = entry.remaining.min(quantum);
        entry.remaining -= run;
        let dispatch = Dispatch { pid: entry.pid.clone(), order: entry.order, run };
        Some((dispatch, entry))
    }

    /// Ends a slice: processes that arrived up to the slice's end go to the
    /// tail first, then the preempted process if it still has work.
    pub fn complete(&mut self, preempted: ReadyEntry, arrivals: impl IntoIterator<Item = ReadyEntry>) {
        self.queue.extend(arrivals);
        if preempted.remaining > 0 {
            self.queue.push_back(preempted);
        }
    }
}

/// Single RR decision: head of the queue runs `min(quantum, remaining)`.
pub fn rr_next_dispatch(queue: &mut RrQueue, static_quantum: Tick) -> Option<(Dispatch, ReadyEntry)> {
    queue.next_dispatch(static_quantum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Fcfs,
    Sjf,
}

/// Non-preemptive dispatch order over `jobs`, as indices into `jobs`.
///
/// `jobs[i].remaining` is the full burst. FCFS runs in arrival order; SJF
/// picks the shortest admitted burst at each completion. The CPU jumps to the
/// next arrival when nothing is admitted.
pub(crate) fn baseline_order(jobs: &[ReadyEntry], policy: Baseline) -> Vec<usize> {
    let mut pending: Vec<usize> = (0..jobs.len()).collect();
    pending.sort_by_key(|&i| (jobs[i].arrival, jobs[i].order));

    match policy {
        Baseline::Fcfs => pending,
        Baseline::Sjf => {
            let mut order = Vec::with_capacity(jobs.len());
            let mut clock: Tick = 0;
            while !pending.is_empty() {
                let earliest = jobs[pending[0]].arrival;
                clock = clock.max(earliest);
                let pick = pending
                    .iter()
                    .enumerate()
                    .filter(|(_, &i)| jobs[i].arrival <= clock)
                    .min_by_key(|(_, &i)| (jobs[i].remaining, jobs[i].arrival, jobs[i].order))
                    .map(|(pos, _)| pos)
                    .expect("earliest pending job is admitted");
                let job = pending.remove(pick);
                clock += jobs[job].remaining;
                order.push(job);
            }
            order
        }
    }
}

/// Textbook non-preemptive dispatch order for a workload.
pub fn baseline_schedule(set: &ProcessSet, policy: Baseline) -> Vec<Pid> {
    let jobs: Vec<ReadyEntry> = set
        .iter()
        .enumerate()
        .map(|(order, p)| ReadyEntry { pid: p.pid.clone(), remaining: p.burst, arrival: p.arrival, order })
        .collect();
    baseline_order(&jobs, policy).into_iter().map(|i| jobs[i].pid.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(pid: &str, remaining: Tick, order: usize) -> ReadyEntry {
        ReadyEntry { pid: Pid::new(pid).unwrap(), remaining, arrival: 0, order }
    }

    fn plan_of(dispatches: &[Dispatch]) -> Vec<(String, Tick)> {
        dispatches.iter().map(|d| (d.pid.to_string(), d.run)).collect()
    }

    #[test]
    fn quantum_examples() {
        let q = |v: &[Tick]| compute_min_max_quantum(v, 25).unwrap();
        assert_eq!(q(&[9, 37, 90, 96]), QuantumDecision { raw: 87, effective: 87 });
        assert_eq!(q(&[3, 9]), QuantumDecision { raw: 6, effective: 25 });
        assert_eq!(q(&[20]), QuantumDecision { raw: 20, effective: 25 });
        assert_eq!(q(&[5, 5, 5]), QuantumDecision { raw: 0, effective: 25 });
        assert_eq!(q(&[47]), QuantumDecision { raw: 47, effective: 47 });
        assert_eq!(q(&[10, 35]), QuantumDecision { raw: 25, effective: 25 });
    }

    #[test]
    fn quantum_rejects_bad_input() {
        assert!(matches!(compute_min_max_quantum(&[], 25), Err(Error::Argument(_))));
        assert!(matches!(compute_min_max_quantum(&[3], 0), Err(Error::Argument(_))));
        assert!(matches!(compute_min_max_quantum(&[0, 4], 25), Err(Error::Argument(_))));
    }

    #[test]
    fn first_illustration_round() {
        // input order P1..P4 with bursts 90, 96, 9, 37
        let state =
            ReadyQueueState::new(vec![entry("P1", 90, 0), entry("P2", 96, 1), entry("P3", 9, 2), entry("P4", 37, 3)])
                .unwrap();
        let (plan, decision) = mmrr_round(&state, 25).unwrap();
        assert_eq!(decision.effective, 87);
        assert_eq!(plan_of(&plan), [("P3".into(), 9), ("P4".into(), 37), ("P1".into(), 87), ("P2".into(), 87)]);
    }

    #[test]
    fn second_illustration_round() {
        let state = ReadyQueueState::new(vec![entry("P1", 3, 0), entry("P2", 9, 1)]).unwrap();
        let (plan, decision) = mmrr_round(&state, 25).unwrap();
        assert_eq!(decision, QuantumDecision { raw: 6, effective: 25 });
        assert_eq!(plan_of(&plan), [("P1".into(), 3), ("P2".into(), 9)]);
    }

    #[test]
    fn lone_process_round() {
        let state = ReadyQueueState::new(vec![entry("P4", 20, 3)]).unwrap();
        let (plan, decision) = mmrr_round(&state, 25).unwrap();
        assert_eq!(decision.effective, 25);
        assert_eq!(plan_of(&plan), [("P4".into(), 20)]);
    }

    #[test]
    fn round_ties_break_by_arrival_then_order() {
        let mut a = entry("A", 10, 2);
        a.arrival = 5;
        let b = entry("B", 10, 1);
        let c = entry("C", 10, 0);
        let state = ReadyQueueState::new(vec![a, b, c]).unwrap();
        let (plan, _) = mmrr_round(&state, 25).unwrap();
        let order: Vec<_> = plan.iter().map(|d| d.pid.to_string()).collect();
        assert_eq!(order, ["C", "B", "A"]);
    }

    #[test]
    fn ready_state_rejects_finished_entries() {
        assert!(ReadyQueueState::new(vec![entry("P1", 0, 0)]).is_err());
    }

    #[test]
    fn charge_removes_finished() {
        let mut state = ReadyQueueState::new(vec![entry("P1", 3, 0), entry("P2", 9, 1)]).unwrap();
        state.charge(0, 3);
        state.charge(1, 4);
        assert_eq!(state.entries(), &[entry("P2", 5, 1)]);
    }

    #[test]
    fn rr_short_process_completes() {
        let mut q = RrQueue::new();
        q.admit(entry("P2", 5, 0));
        let (d, rest) = rr_next_dispatch(&mut q, 20).unwrap();
        assert_eq!((d.pid.as_str(), d.run), ("P2", 5));
        q.complete(rest, []);
        assert!(q.is_empty());
    }

    #[test]
    fn rr_arrivals_go_before_preempted() {
        let mut q = RrQueue::new();
        q.admit(entry("P1", 30, 0));
        q.admit(entry("P2", 30, 1));
        let (_, rest) = rr_next_dispatch(&mut q, 20).unwrap();
        q.complete(rest, [entry("P3", 4, 2)]);
        let pids: Vec<_> = q.pids().map(|p| p.to_string()).collect();
        assert_eq!(pids, ["P2", "P3", "P1"]);
    }

    #[test]
    fn rr_first_round_of_table5() {
        let mut q = RrQueue::new();
        for (i, (pid, b)) in [("P1", 20), ("P2", 40), ("P3", 80), ("P4", 160)].into_iter().enumerate() {
            q.admit(entry(pid, b, i));
        }
        let mut first = Vec::new();
        for _ in 0..4 {
            let (d, rest) = rr_next_dispatch(&mut q, 20).unwrap();
            first.push((d.pid.to_string(), d.run));
            q.complete(rest, []);
        }
        assert_eq!(first, [("P1".into(), 20), ("P2".into(), 20), ("P3".into(), 20), ("P4".into(), 20)]);
        assert_eq!(q.len(), 3);
    }

    #[test]
    fn baseline_examples() {
        let table1 = ProcessSet::from_triples(&[("P1", 0, 12), ("P2", 0, 45), ("P3", 0, 78), ("P4", 0, 90)]).unwrap();
        let names = |v: Vec<Pid>| v.into_iter().map(|p| p.to_string()).collect::<Vec<_>>();
        assert_eq!(names(baseline_schedule(&table1, Baseline::Fcfs)), ["P1", "P2", "P3", "P4"]);
        assert_eq!(names(baseline_schedule(&table1, Baseline::Sjf)), ["P1", "P2", "P3", "P4"]);

        let illus = ProcessSet::from_triples(&[("P1", 0, 90), ("P2", 0, 96), ("P3", 0, 9), ("P4", 0, 37)]).unwrap();
        assert_eq!(names(baseline_schedule(&illus, Baseline::Sjf)), ["P3", "P4", "P1", "P2"]);
        assert_eq!(names(baseline_schedule(&illus, Baseline::Fcfs)), ["P1", "P2", "P3", "P4"]);
    }

    #[test]
    fn sjf_only_considers_admitted_jobs() {
        // P1 occupies 0..10; P3 (short) arrives at 20, after P2 has started.
        let set = ProcessSet::from_triples(&[("P1", 0, 10), ("P2", 5, 30), ("P3", 20, 1)]).unwrap();
        let order: Vec<_> = baseline_schedule(&set, Baseline::Sjf).into_iter().map(|p| p.to_string()).collect();
        assert_eq!(order, ["P1", "P2", "P3"]);

        // idle gap: at t=50 both late jobs are admitted together
        let set = ProcessSet::from_triples(&[("P1", 0, 5), ("P2", 50, 9), ("P3", 50, 2)]).unwrap();
        let order: Vec<_> = baseline_schedule(&set, Baseline::Sjf).into_iter().map(|p| p.to_string()).collect();
        assert_eq!(order, ["P1", "P3", "P2"]);
    }

    #[test]
    fn fcfs_orders_by_arrival_then_input() {
        let set = ProcessSet::from_triples(&[("A", 9, 1), ("B", 3, 1), ("C", 3, 1)]).unwrap();
        let order: Vec<_> = baseline_schedule(&set, Baseline::Fcfs).into_iter().map(|p| p.to_string()).collect();
        assert_eq!(order, ["B", "C", "A"]);
    }
}
