//! Seeded instance generators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use bufsched::model::Packet;
use bufsched::{BufferId, Instance, Step};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("cannot place {n} packets: only {slots} (buffer, release) slots fit under per-release capacity")]
    Unsatisfiable { n: usize, slots: usize },
    #[error("unknown family `{0}` (expected sort_hard, monotone_deadline or overflow_trap)")]
    UnknownFamily(String),
    #[error("family size must be at least 1")]
    EmptyFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenParams {
    pub m: usize,
    pub capacity_range: (usize, usize),
    pub n: usize,
    /// Largest release time.
    pub horizon: Step,
    pub value_range: (u64, u64),
    pub common_deadline: Option<Step>,
    pub respect_per_release_fit: bool,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            m: 1,
            capacity_range: (1, 3),
            n: 8,
            horizon: 6,
            value_range: (1, 10),
            common_deadline: None,
            respect_per_release_fit: false,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: &str| Err(GenError::InvalidParams(msg.to_string()));
        if self.m == 0 {
            return bad("m must be at least 1");
        }
        if self.capacity_range.0 == 0 || self.capacity_range.0 > self.capacity_range.1 {
            return bad("capacity range must be non-empty and start at 1 or more");
        }
        if self.value_range.0 > self.value_range.1 {
            return bad("value range is empty");
        }
        if let Some(d) = self.common_deadline {
            if d <= self.horizon {
                return bad("common deadline must exceed the release horizon");
            }
        }
        Ok(())
    }
}

/// Releases uniform on `0..=horizon`, slack uniform on `1..=max(horizon, 1)`
/// (or the common deadline), values uniform on `value_range`, buffers
/// uniform. With `respect_per_release_fit`, a draw landing on a full
/// `(buffer, release)` slot is moved to a uniformly chosen free slot.
pub fn gen_random(params: &GenParams) -> Result<Instance, GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let capacities: Vec<usize> = (0..params.m)
        .map(|_| rng.gen_range(params.capacity_range.0..=params.capacity_range.1))
        .collect();
    if params.respect_per_release_fit {
        let slots = capacities.iter().sum::<usize>() * (params.horizon as usize + 1);
        if slots < params.n {
            return Err(GenError::Unsatisfiable { n: params.n, slots });
        }
    }
    let mut used: HashMap<(BufferId, Step), usize> = HashMap::new();
    let mut packets = Vec::with_capacity(params.n);
    for id in 0..params.n {
        let mut release = rng.gen_range(0..=params.horizon);
        let mut buffer = rng.gen_range(0..params.m);
        if params.respect_per_release_fit {
            let mut tries = 0;
            while used.get(&(buffer, release)).copied().unwrap_or(0) >= capacities[buffer] {
                tries += 1;
                if tries > 32 {
                    let free: Vec<(BufferId, Step)> = (0..params.m)
                        .flat_map(|b| (0..=params.horizon).map(move |t| (b, t)))
                        .filter(|&(b, t)| used.get(&(b, t)).copied().unwrap_or(0) < capacities[b])
                        .collect();
                    (buffer, release) = *free.choose(&mut rng).expect("slot count checked above");
                    break;
                }
                release = rng.gen_range(0..=params.horizon);
                buffer = rng.gen_range(0..params.m);
            }
            *used.entry((buffer, release)).or_default() += 1;
        }
        let deadline = match params.common_deadline {
            Some(d) => d,
            None => release + rng.gen_range(1..=params.horizon.max(1)),
        };
        let value = rng.gen_range(params.value_range.0..=params.value_range.1);
        packets.push(Packet::new(id, release, deadline, value, buffer));
    }
    Ok(Instance::new(capacities, packets))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// All packets at step 0 with a random permutation of deadlines `1..=n`
    /// and room for all of them: delivering everything requires sorting.
    SortHard,
    /// Single buffer, deadlines weakly increasing with release time.
    MonotoneDeadline,
    /// Two buffers, common deadline: a capacity-1 buffer refilled every step
    /// next to a capacity-2 buffer loaded once. Only serving the small
    /// buffer while it is being refilled avoids overflow.
    OverflowTrap,
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sort_hard" => Ok(Family::SortHard),
            "monotone_deadline" => Ok(Family::MonotoneDeadline),
            "overflow_trap" => Ok(Family::OverflowTrap),
            other => Err(GenError::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SortHard => "sort_hard",
            Family::MonotoneDeadline => "monotone_deadline",
            Family::OverflowTrap => "overflow_trap",
        })
    }
}

pub fn gen_family(family: Family, n: usize, seed: u64) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::EmptyFamily);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match family {
        Family::SortHard => {
            let mut deadlines: Vec<Step> = (1..=n as Step).collect();
            deadlines.shuffle(&mut rng);
            let packets = deadlines
                .into_iter()
                .enumerate()
                .map(|(id, d)| Packet::new(id, 0, d, 1, 0))
                .collect();
            Instance::new(vec![n], packets)
        }
        Family::MonotoneDeadline => {
            let capacity = rng.gen_range(1..=3);
            let mut release = 0;
            let mut deadline = 0;
            let packets = (0..n)
                .map(|id| {
                    release += rng.gen_range(0..=1);
                    deadline = (release + rng.gen_range(1..=3)).max(deadline);
                    Packet::new(id, release, deadline, 1, 0)
                })
                .collect();
            Instance::new(vec![capacity], packets)
        }
        Family::OverflowTrap => {
            let refills = n.saturating_sub(2);
            let bulk = n.min(2);
            let deadline = n as Step;
            let mut packets = Vec::with_capacity(n);
            let mut push = |release, buffer| {
                let id = packets.len();
                packets.push(Packet::new(id, release, deadline, 1, buffer));
            };
            for t in 0..refills.max(1) {
                if t < refills {
                    push(t as Step, 0);
                }
                if t == 0 {
                    for _ in 0..bulk {
                        push(0, 1);
                    }
                }
            }
            Instance::new(vec![1, 2], packets)
        }
    })
}
