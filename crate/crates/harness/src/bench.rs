//! Wall-clock growth benchmarks.

use std::fmt;
use std::hint::black_box;
use std::time::{Duration, Instant};

use bufsched::Instance;

use crate::compare::{Algo, Scheduler};
use crate::gen::{gen_random, GenParams};

pub const RUNS: usize = 5;
pub const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub median: Duration,
    /// Median time relative to the previous row.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTable {
    pub algo: Algo,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn max_ratio(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.ratio).reduce(f64::max)
    }
}

impl fmt::Display for BenchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>10} {:>14} {:>8}", "n", "median_us", "ratio")?;
        for row in &self.rows {
            let ratio = row.ratio.map_or("-".to_string(), |r| format!("{r:.2}"));
            writeln!(f, "{:>10} {:>14.1} {:>8}", row.n, row.median.as_secs_f64() * 1e6, ratio)?;
        }
        Ok(())
    }
}

/// The instance timed for `algo` at size `n`. Fixed seed, so the same
/// `(algo, n)` always yields the same instance.
pub fn bench_instance(algo: Algo, n: usize) -> Instance {
    let n64 = n as u64;
    let params = match algo {
        Algo::Dos => GenParams {
            m: 1,
            capacity_range: (32, 32),
            n,
            horizon: (n64 / 4).max(1),
            value_range: (1, 1),
            ..GenParams::default()
        },
        Algo::GreedyEdf => GenParams {
            m: 1,
            capacity_range: (8, 8),
            n,
            horizon: (n64 / 2).max(1),
            value_range: (1, 1000),
            ..GenParams::default()
        },
        Algo::Ts => GenParams {
            m: 8,
            capacity_range: (2, 4),
            n,
            horizon: (n64 / 4).max(1),
            value_range: (1, 1),
            common_deadline: Some((n64 / 4).max(1) + n64 / 8 + 1),
            respect_per_release_fit: true,
            ..GenParams::default()
        },
        Algo::GreedyTs => GenParams {
            m: 4,
            capacity_range: (1, 4),
            n,
            horizon: (n64 / 2).max(1),
            value_range: (1, 1000),
            common_deadline: Some((n64 / 2).max(1) + n64 / 8 + 1),
            ..GenParams::default()
        },
    };
    gen_random(&GenParams {
        seed: SEED ^ n64,
        ..params
    })
    .expect("bench parameters are satisfiable")
}

fn time_once(algo: Algo, inst: &Instance) -> Duration {
    let start = Instant::now();
    black_box(
        algo.schedule(black_box(inst))
            .expect("bench instance fits the algorithm"),
    );
    start.elapsed()
}

/// Median of [`RUNS`] wall times per size, in the given order. Rounds are
/// interleaved across sizes so a slow spell on the host is shared between
/// rows instead of landing on one of them.
pub fn bench(algo: Algo, sizes: &[usize]) -> BenchTable {
    let instances: Vec<Instance> = sizes.iter().map(|&n| bench_instance(algo, n)).collect();
    // one untimed run each to warm caches and the allocator
    for inst in &instances {
        time_once(algo, inst);
    }
    let mut times = vec![Vec::with_capacity(RUNS); sizes.len()];
    for _ in 0..RUNS {
        for (row, inst) in times.iter_mut().zip(&instances) {
            row.push(time_once(algo, inst));
        }
    }
    let mut rows: Vec<BenchRow> = Vec::with_capacity(sizes.len());
    for (&n, mut row) in sizes.iter().zip(times) {
        row.sort_unstable();
        let median = row[RUNS / 2];
        let ratio = rows
            .last()
            .map(|prev| median.as_secs_f64() / prev.median.as_secs_f64().max(1e-9));
        rows.push(BenchRow { n, median, ratio });
    }
    BenchTable { algo, rows }
}

/// `start, 2*start, ...` up to and including `end`.
pub fn doublings(start: usize, end: usize) -> Vec<usize> {
    std::iter::successors(Some(start), |&n| Some(n * 2))
        .take_while(|&n| n <= end)
        .collect()
}
