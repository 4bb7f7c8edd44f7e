//! Algorithm-versus-oracle comparison.

use std::collections::VecDeque;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bufsched::{
    dos_schedule, greedy_edf, greedy_ts, oracle_optimal, serialize_instance, ts_schedule, verify_schedule, Instance,
    Schedule, Step, ValidationMode,
};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Number of delivered packets.
    Count,
    /// Total delivered value.
    Value,
}

/// Something that turns an instance into a schedule.
pub trait Scheduler: Sync {
    fn name(&self) -> String;
    fn objective(&self) -> Objective;
    /// `Err` with a reason when the instance shape is not supported.
    fn applicable(&self, inst: &Instance) -> Result<(), String>;
    fn schedule(&self, inst: &Instance) -> Result<Schedule, bufsched::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Dos,
    GreedyEdf,
    Ts,
    GreedyTs,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Dos, Algo::GreedyEdf, Algo::Ts, Algo::GreedyTs];
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Dos => "dos",
            Algo::GreedyEdf => "greedy-edf",
            Algo::Ts => "ts",
            Algo::GreedyTs => "greedy-ts",
        })
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected dos, greedy-edf, ts or greedy-ts)"))
    }
}

impl Scheduler for Algo {
    fn name(&self) -> String {
        self.to_string()
    }

    fn objective(&self) -> Objective {
        match self {
            Algo::Dos | Algo::Ts => Objective::Count,
            Algo::GreedyEdf | Algo::GreedyTs => Objective::Value,
        }
    }

    fn applicable(&self, inst: &Instance) -> Result<(), String> {
        match self {
            Algo::Dos | Algo::GreedyEdf if inst.num_buffers() != 1 => {
                Err(format!("needs one buffer, instance has {}", inst.num_buffers()))
            }
            Algo::Ts | Algo::GreedyTs if inst.require_common_deadline().is_err() => {
                Err("needs a common deadline".to_string())
            }
            Algo::Ts if !inst.validate(ValidationMode::PerReleaseFit).is_empty() => {
                Err("more arrivals than capacity at some release time".to_string())
            }
            _ => Ok(()),
        }
    }

    fn schedule(&self, inst: &Instance) -> Result<Schedule, bufsched::Error> {
        match self {
            Algo::Dos => dos_schedule(inst),
            Algo::GreedyEdf => greedy_edf(inst).map(|r| r.schedule),
            Algo::Ts => ts_schedule(inst),
            Algo::GreedyTs => greedy_ts(inst).map(|r| r.schedule),
        }
    }
}

/// Baseline that always serves the fullest buffer (lowest index on ties),
/// dropping arrivals to full buffers. Common deadline only.
pub fn largest_queue_schedule(inst: &Instance) -> Result<Schedule, bufsched::Error> {
    let horizon = inst.require_common_deadline()?;
    let mut arrivals: Vec<_> = inst.packets.iter().collect();
    arrivals.sort_unstable_by_key(|p| (p.release, p.id));
    let mut queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); inst.num_buffers()];
    let mut schedule = Schedule::new();
    let mut next = 0;
    let mut now: Step = 0;
    while now < horizon {
        while next < arrivals.len() && arrivals[next].release <= now {
            let p = arrivals[next];
            if queues[p.buffer].len() < inst.capacities[p.buffer] {
                queues[p.buffer].push_back(p.id);
            }
            next += 1;
        }
        let fullest = (0..queues.len())
            .filter(|&b| !queues[b].is_empty())
            .max_by_key(|&b| (queues[b].len(), std::cmp::Reverse(b)));
        match fullest {
            Some(b) => schedule.push(now, queues[b].pop_front().unwrap()),
            None if next < arrivals.len() => {
                now = arrivals[next].release;
                continue;
            }
            None => break,
        }
        now += 1;
    }
    Ok(schedule)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Ran {
        count: usize,
        value: u64,
        clean: bool,
        matches: bool,
    },
    Inapplicable(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgoOutcome {
    pub algo: String,
    pub objective: Objective,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    pub digest: u64,
    pub results: Vec<AlgoOutcome>,
    pub oracle_value: u64,
    pub oracle_count: usize,
    /// Every applicable algorithm produced a clean schedule with the oracle's objective.
    pub matched: bool,
    pub counterexample: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Oracle(#[from] bufsched::Error),
    #[error("writing counterexample: {0}")]
    Io(#[from] std::io::Error),
}

/// FNV-1a over the serialized trace.
pub fn digest(inst: &Instance) -> u64 {
    serialize_instance(inst).bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Runs each scheduler and the oracle. On mismatch the trace is written to
/// `counterexample_dir/<digest>.txt` when a directory is given.
pub fn compare(
    inst: &Instance,
    schedulers: &[&dyn Scheduler],
    counterexample_dir: Option<&Path>,
) -> Result<CompareReport, CompareError> {
    let optimum = oracle_optimal(inst)?;
    let oracle_count = if schedulers.iter().any(|s| s.objective() == Objective::Count) {
        bufsched::oracle_max_count(inst)?
    } else {
        optimum.witness_set.len()
    };
    let oracle_value = optimum.optimal_value;

    let mut matched = true;
    let mut results = Vec::with_capacity(schedulers.len());
    for s in schedulers {
        let outcome = match s.applicable(inst) {
            Err(reason) => Outcome::Inapplicable(reason),
            Ok(()) => match s.schedule(inst).and_then(|sched| verify_schedule(inst, &sched)) {
                Err(e) => {
                    matched = false;
                    Outcome::Failed(e.to_string())
                }
                Ok(report) => {
                    let hits = match s.objective() {
                        Objective::Count => report.delivered_count == oracle_count,
                        Objective::Value => report.delivered_value == oracle_value,
                    };
                    let matches = report.is_clean() && hits;
                    matched &= matches;
                    Outcome::Ran {
                        count: report.delivered_count,
                        value: report.delivered_value,
                        clean: report.is_clean(),
                        matches,
                    }
                }
            },
        };
        results.push(AlgoOutcome {
            algo: s.name(),
            objective: s.objective(),
            outcome,
        });
    }

    let digest = digest(inst);
    let counterexample = match (matched, counterexample_dir) {
        (false, Some(dir)) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{digest:016x}.txt"));
            fs::write(&path, serialize_instance(inst))?;
            Some(path)
        }
        _ => None,
    };
    Ok(CompareReport {
        digest,
        results,
        oracle_value,
        oracle_count,
        matched,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_family, Family};
    use bufsched::model::Packet;

    struct SendNothing;

    impl Scheduler for SendNothing {
        fn name(&self) -> String {
            "send-nothing".into()
        }
        fn objective(&self) -> Objective {
            Objective::Count
        }
        fn applicable(&self, _: &Instance) -> Result<(), String> {
            Ok(())
        }
        fn schedule(&self, _: &Instance) -> Result<Schedule, bufsched::Error> {
            Ok(Schedule::new())
        }
    }

    /// Sends everything at step 0.
    struct Overbooked;

    impl Scheduler for Overbooked {
        fn name(&self) -> String {
            "overbooked".into()
        }
        fn objective(&self) -> Objective {
            Objective::Count
        }
        fn applicable(&self, _: &Instance) -> Result<(), String> {
            Ok(())
        }
        fn schedule(&self, inst: &Instance) -> Result<Schedule, bufsched::Error> {
            Ok(Schedule::from_sends(inst.packets.iter().map(|p| (0, p.id)).collect()))
        }
    }

    fn single() -> Instance {
        Instance::new(
            vec![2],
            vec![
                Packet::new(0, 0, 1, 3, 0),
                Packet::new(1, 0, 1, 4, 0),
                Packet::new(2, 0, 3, 1, 0),
            ],
        )
    }

    #[test]
    fn single_buffer_algorithms_match() {
        let algos: Vec<&dyn Scheduler> = Algo::ALL.iter().map(|a| a as &dyn Scheduler).collect();
        let r = compare(&single(), &algos, None).unwrap();
        assert!(r.matched, "{r:?}");
        assert!(matches!(r.results[2].outcome, Outcome::Inapplicable(_)));
        assert_eq!((r.oracle_count, r.oracle_value), (2, 5));
    }

    #[test]
    fn common_deadline_algorithms_match() {
        let inst = gen_family(Family::OverflowTrap, 4, 0).unwrap();
        let r = compare(&inst, &[&Algo::Ts, &Algo::GreedyTs], None).unwrap();
        assert!(r.matched);
        assert_eq!(r.oracle_count, 4);
    }

    #[test]
    fn broken_scheduler_writes_counterexample() {
        let dir = tempfile::tempdir().unwrap();
        let r = compare(&single(), &[&SendNothing], Some(dir.path())).unwrap();
        assert!(!r.matched);
        let path = r.counterexample.unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(bufsched::parse_instance::<u64>(&text).unwrap(), single());
    }

    #[test]
    fn violations_never_match() {
        // the count is "right" for one packet, but the schedule is invalid
        let inst = Instance::new(vec![1], vec![Packet::new(0, 0, 1, 1, 0), Packet::new(1, 0, 1, 1, 0)]);
        let r = compare(&inst, &[&Overbooked], None).unwrap();
        assert!(!r.matched);
        assert!(matches!(
            r.results[0].outcome,
            Outcome::Ran {
                clean: false,
                matches: false,
                ..
            }
        ));
    }

    #[test]
    fn largest_queue_falls_into_the_trap() {
        let inst = gen_family(Family::OverflowTrap, 4, 0).unwrap();
        assert_eq!(largest_queue_schedule(&inst).unwrap().len(), 3);
        assert_eq!(ts_schedule(&inst).unwrap().len(), 4);
    }

    #[test]
    fn algo_names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.to_string().parse::<Algo>(), Ok(a));
        }
        assert!("fifo".parse::<Algo>().is_err());
    }
}
