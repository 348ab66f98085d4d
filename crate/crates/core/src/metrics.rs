//! Turnaround, waiting time and context-switch counting.
//!
//! Waiting time is `turnaround - burst`, i.e. all time spent in the system
//! not executing. A context switch is any dispatch boundary, counted as
//! `slices - 1`; re-dispatching the same process after its quantum expires
//! counts too.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use num_rational::Ratio;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::engine::Schedule;
use crate::error::{Error, Result};
use crate::workload::{Pid, Tick};

/// An exact mean of integer tick counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Average(Ratio<i64>);

impl Average {
    pub fn new(numer: i64, denom: i64) -> Self {
        Average(Ratio::new(numer, denom))
    }

    pub fn integer(value: i64) -> Self {
        Average(Ratio::from_integer(value))
    }

    /// Mean of `values`; zero for an empty slice.
    pub fn of(values: impl IntoIterator<Item = i64>) -> Self {
        let (sum, n) = values.into_iter().fold((0i64, 0i64), |(s, n), v| (s + v, n + 1));
        if n == 0 {
            Average::integer(0)
        } else {
            Average::new(sum, n)
        }
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// Digits after the point needed to print the value exactly, or `None`
    /// when the decimal expansion does not terminate.
    fn decimal_places(&self) -> Option<u32> {
        let mut d = *self.0.denom();
        let (mut twos, mut fives) = (0u32, 0u32);
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        (d == 1).then_some(twos.max(fives))
    }
}

impl fmt::Display for Average {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = *self.0.numer() as i128;
        let denom = *self.0.denom() as i128;
        match self.decimal_places() {
            Some(0) => write!(f, "{numer}"),
            Some(places) => {
                let scaled = numer * 10i128.pow(places) / denom;
                let sign = if scaled < 0 { "-" } else { "" };
                let scaled = scaled.abs();
                let unit = 10i128.pow(places);
                let frac = format!("{:0width$}", scaled % unit, width = places as usize);
                write!(f, "{sign}{}.{}", scaled / unit, frac.trim_end_matches('0'))
            }
            None => write!(f, "{numer}/{denom}"),
        }
    }
}

impl FromStr for Average {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Argument(format!("`{s}` is not an exact average"));
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Average::new(n, d));
        }
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let denom = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let digits = format!("{int}{frac}");
        let mut numer: i64 = digits.parse().map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        Ok(Average::new(numer, denom))
    }
}

impl Serialize for Average {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.decimal_places() {
            Some(0) => serializer.serialize_i64(*self.0.numer()),
            Some(_) => serializer.serialize_f64(self.to_f64()),
            None => serializer.collect_str(self),
        }
    }
}

impl<'de> Deserialize<'de> for Average {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct AverageVisitor;

        impl Visitor<'_> for AverageVisitor {
            type Value = Average;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Average, E> {
                Ok(Average::integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Average, E> {
                i64::try_from(v).map(Average::integer).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Average, E> {
                // shortest round-trip decimal, e.g. 133.25
                v.to_string().parse().map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Average, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AverageVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessMetrics {
    pub turnaround: i64,
    pub waiting: i64,
    pub finish: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_process: IndexMap<Pid, ProcessMetrics>,
    #[serde(rename = "att")]
    pub avg_turnaround: Average,
    #[serde(rename = "awt")]
    pub avg_waiting: Average,
    #[serde(rename = "cs")]
    pub context_switches: usize,
    pub quantum_trace: Vec<Tick>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.per_process.keys().map(|p| p.as_str().len()).max().unwrap_or(3).max(3);
        out.push_str(&format!("{:<width$}  {:>8}  {:>10}  {:>8}\n", "pid", "finish", "turnaround", "waiting"));
        for (pid, m) in &self.per_process {
            out.push_str(&format!(
                "{:<width$}  {:>8}  {:>10}  {:>8}\n",
                pid.as_str(),
                m.finish,
                m.turnaround,
                m.waiting
            ));
        }
        out.push_str(&format!("ATT = {}\n", self.avg_turnaround));
        out.push_str(&format!("AWT = {}\n", self.avg_waiting));
        out.push_str(&format!("CS  = {}\n", self.context_switches));
        if !self.quantum_trace.is_empty() {
            out.push_str(&format!("TQ  = {}\n", join_trace(&self.quantum_trace)));
        }
        out
    }
}

/// Comma-joined quantum trace, e.g. `140,25`.
pub fn join_trace(trace: &[Tick]) -> String {
    trace.iter().map(Tick::to_string).collect::<Vec<_>>().join(",")
}

fn ensure_complete(schedule: &Schedule) -> Result<()> {
    for p in &schedule.workload {
        let got = schedule.scheduled_time(&p.pid);
        if got != p.burst || !schedule.finish.contains_key(&p.pid) {
            return Err(Error::State(format!("{} received {got} of {} ticks", p.pid, p.burst)));
        }
    }
    Ok(())
}

/// `finish - arrival` per process, against true arrival times.
pub fn per_process_turnaround(schedule: &Schedule) -> Result<IndexMap<Pid, i64>> {
    ensure_complete(schedule)?;
    Ok(schedule.workload.iter().map(|p| (p.pid.clone(), schedule.finish[&p.pid] as i64 - p.arrival as i64)).collect())
}

/// `turnaround - burst` per process.
pub fn per_process_waiting(schedule: &Schedule) -> Result<IndexMap<Pid, i64>> {
    let turnaround = per_process_turnaround(schedule)?;
    Ok(schedule.workload.iter().map(|p| (p.pid.clone(), turnaround[&p.pid] - p.burst as i64)).collect())
}

pub fn count_context_switches(schedule: &Schedule) -> Result<usize> {
    if schedule.slices.is_empty() {
        return Err(Error::State("schedule has no slices".into()));
    }
    Ok(schedule.slices.len() - 1)
}

pub fn aggregate(schedule: &Schedule) -> Result<MetricsReport> {
    let turnaround = per_process_turnaround(schedule)?;
    let waiting = per_process_waiting(schedule)?;
    let context_switches = count_context_switches(schedule)?;
    let per_process = schedule
        .workload
        .iter()
        .map(|p| {
            let m = ProcessMetrics {
                turnaround: turnaround[&p.pid],
                waiting: waiting[&p.pid],
                finish: schedule.finish[&p.pid],
            };
            (p.pid.clone(), m)
        })
        .collect();
    Ok(MetricsReport {
        per_process,
        avg_turnaround: Average::of(turnaround.values().copied()),
        avg_waiting: Average::of(waiting.values().copied()),
        context_switches,
        quantum_trace: schedule.quantum_trace.clone(),
    })
}
