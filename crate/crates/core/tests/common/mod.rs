#![allow(dead_code)]

use mmrr_core::workload::generate_random_workload;
use mmrr_core::ProcessSet;

pub const CORPUS_SIZE: u64 = 1000;

/// Seeded corpus: n in 1..=8, bursts in [1, 60], arrivals in [0, 30].
pub fn corpus() -> Vec<ProcessSet> {
    (0..CORPUS_SIZE)
        .map(|seed| {
            let n = 1 + (seed % 8) as usize;
            generate_random_workload(n, seed, (1, 60), (0, 30)).expect("valid corpus ranges")
        })
        .collect()
}
