//! Deterministic single-CPU scheduling simulator.
//!
//! The crate implements Min-Max Round Robin (a Round Robin whose quantum is
//! recomputed every round as the range of the remaining burst times, with a
//! lower floor), static-quantum Round Robin, and non-preemptive FCFS/SJF
//! baselines. Every policy runs through an event-driven [`engine`] and can be
//! cross-checked against a naive tick-by-tick oracle.
//!
//! ```
//! use mmrr_core::{cases, engine, metrics};
//!
//! let case = cases::builtin_case("case3").unwrap();
//! let schedule = engine::run_simulation(&case.workload, &case.mmrr_config).unwrap();
//! let report = metrics::aggregate(&schedule).unwrap();
//! assert_eq!(report.avg_turnaround.to_string(), "130");
//! assert_eq!(schedule.quantum_trace, vec![140, 25]);
//! ```

pub mod cases;
pub mod cli;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod policies;
pub mod report;
pub mod workload;

pub use engine::{run_simulation, tick_oracle_simulate, ArrivalMode, Policy, Schedule, SimConfig, Slice};
pub use error::{Error, Result};
pub use metrics::{aggregate, Average, MetricsReport};
pub use workload::{Pid, Process, ProcessSet, Tick};
