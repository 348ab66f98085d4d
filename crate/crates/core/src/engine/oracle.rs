//! Tick-by-tick reference simulator.
//!
//! Deliberately naive: one loop iteration per tick, no event skipping, and
//! no use of the dispatch helpers in `policies`. Scheduling rules are
//! restated here from scratch so that agreement with the event-driven engine
//! means something.

use std::collections::VecDeque;

use super::{Policy, RoundRecord, Schedule, SimConfig, Slice};
use crate::error::{Error, Result};
use crate::policies::QuantumDecision;
use crate::workload::{ProcessSet, Tick};

struct Running {
    idx: usize,
    used: Tick,
    budget: Tick,
}

/// Same contract as [`super::run_simulation`], computed one tick at a time.
pub fn tick_oracle_simulate(set: &ProcessSet, config: &SimConfig) -> Result<Schedule> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::Argument("workload is empty".into()));
    }

    let procs = set.processes();
    let n = procs.len();
    let arrival: Vec<Tick> = procs.iter().map(|p| config.scheduling_arrival(p.arrival)).collect();
    let mut remaining: Vec<Tick> = procs.iter().map(|p| p.burst).collect();

    let mut clock: Tick = 0;
    let mut slices: Vec<Slice> = Vec::new();
    let mut running: Option<Running> = None;

    // RR state
    let mut fifo: VecDeque<usize> = VecDeque::new();
    let mut admitted = vec![false; n];
    let mut requeue: Option<usize> = None;

    // MMRR state
    let mut round: VecDeque<usize> = VecDeque::new();
    let mut round_quantum: Tick = 0;
    let mut rounds: Vec<RoundRecord> = Vec::new();

    while remaining.iter().any(|&r| r > 0) {
        if config.policy == Policy::Rr {
            for i in 0..n {
                if !admitted[i] && arrival[i] <= clock {
                    admitted[i] = true;
                    fifo.push_back(i);
                }
            }
            if let Some(i) = requeue.take() {
                fifo.push_back(i);
            }
        }

        if running.is_none() {
            let picked = match config.policy {
                Policy::Rr => fifo.pop_front().map(|i| (i, config.static_quantum)),
                Policy::Mmrr => {
                    if round.is_empty() {
                        let mut ready: Vec<usize> =
                            (0..n).filter(|&i| remaining[i] > 0 && arrival[i] <= clock).collect();
                        if !ready.is_empty() {
                            ready.sort_by(|&a, &b| {
                                remaining[a].cmp(&remaining[b]).then(arrival[a].cmp(&arrival[b])).then(a.cmp(&b))
                            });
                            let smallest = remaining[ready[0]];
                            let largest = remaining[*ready.last().unwrap()];
                            let raw = if ready.len() == 1 { largest } else { largest - smallest };
                            round_quantum = if raw < config.quantum_floor { config.quantum_floor } else { raw };
                            rounds.push(RoundRecord {
                                start: clock,
                                decision: QuantumDecision { raw, effective: round_quantum },
                                ready: ready.iter().map(|&i| (procs[i].pid.clone(), remaining[i])).collect(),
                            });
                            round.extend(ready);
                        }
                    }
                    round.pop_front().map(|i| (i, round_quantum))
                }
                Policy::Fcfs | Policy::Sjf => (0..n)
                    .filter(|&i| remaining[i] > 0 && arrival[i] <= clock)
                    .min_by_key(|&i| {
                        let size = if config.policy == Policy::Sjf { procs[i].burst } else { 0 };
                        (size, arrival[i], i)
                    })
                    .map(|i| (i, Tick::MAX)),
            };

            match picked {
                Some((idx, budget)) => {
                    slices.push(Slice { pid: procs[idx].pid.clone(), start: clock, end: clock });
                    running = Some(Running { idx, used: 0, budget });
                }
                None => {
                    clock += 1;
                    continue;
                }
            }
        }

        let cur = running.as_mut().expect("a process is running");
        remaining[cur.idx] -= 1;
        cur.used += 1;
        clock += 1;
        slices.last_mut().expect("slice opened at dispatch").end = clock;

        if remaining[cur.idx] == 0 {
            running = None;
        } else if cur.used == cur.budget {
            if config.policy == Policy::Rr {
                requeue = Some(cur.idx);
            }
            running = None;
        }
    }

    let trace = match config.policy {
        Policy::Rr => vec![config.static_quantum],
        Policy::Mmrr => rounds.iter().map(|r| r.decision.effective).collect(),
        Policy::Fcfs | Policy::Sjf => Vec::new(),
    };
    Ok(Schedule::assemble(set, *config, slices, trace, rounds))
}
