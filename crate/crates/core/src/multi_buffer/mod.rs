//! Multiple bounded buffers sharing one output link, all packets with a
//! common deadline `D`.
//!
//! Within a buffer, packets are interchangeable, so the only decision per
//! step is which buffer to serve. Every buffer `i` carries an overflow
//! deadline: the first future release time at which its arrivals would no
//! longer fit if it were never served again. Serving the buffer with the
//! earliest overflow deadline is exact: the `k`-th removal from a buffer
//! (send or overflow drop) is a unit job whose window runs from the `k`-th
//! arrival to that deadline, and earliest-deadline matching of unit jobs to
//! steps maximises the number matched.

mod ztable;

use std::cmp::Reverse;
use std::collections::{BTreeSet, VecDeque};

pub use ztable::{compute_z_table, compute_z_table_with, ZBase, ZTable};

use crate::error::Result;
use crate::model::{membership, BufferId, Instance, Packet, PacketId, Schedule, Step, ValidationMode};
use crate::single_buffer::GreedyResult;
use crate::weight::Weight;

/// Rule for picking the buffer to serve in a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TsRule {
    /// Serve the buffer whose overflow deadline comes first; among equal
    /// deadlines stay on the last-served buffer, else the lowest index.
    #[default]
    EarliestOverflow,
    /// Serve any buffer with `Z_i(next release) + |Q_i| >= B_i` (lowest
    /// index first); otherwise stay on the last-served buffer while it is
    /// non-empty. Not optimal in general; kept for comparison.
    ReservedSlots(ZBase),
}

/// One busy step of a Tight Schedule replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsStep {
    pub step: Step,
    pub served: BufferId,
    /// Buffers that were tight when the choice was made. Under
    /// [`TsRule::EarliestOverflow`] a buffer is tight when this step is its
    /// last chance to avoid an overflow.
    pub tight: Vec<BufferId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsRun {
    pub schedule: Schedule,
    /// Arrivals dropped because their buffer was full, in drop order.
    pub dropped: Vec<PacketId>,
    /// Admitted packets still queued at the common deadline.
    pub undelivered: Vec<PacketId>,
    pub steps: Vec<TsStep>,
}

#[derive(Debug, Clone)]
struct BufferState {
    capacity: usize,
    queue: VecDeque<PacketId>,
    releases: Vec<Step>,
    /// `cumulative[k]` = arrivals released at or before `releases[k]`.
    cumulative: Vec<usize>,
    z: Vec<i64>,
    /// Index of the first release time not yet admitted.
    next_release: usize,
    sent: usize,
    dropped: usize,
}

impl BufferState {
    /// Start of the first step at which this buffer overflows if it is not
    /// served again, capped at `horizon`.
    fn overflow_deadline(&self, horizon: Step) -> Step {
        let threshold = self.capacity + self.sent + self.dropped;
        let k = self.cumulative.partition_point(|&c| c <= threshold);
        self.releases.get(k).map_or(horizon, |&t| t.min(horizon))
    }

    fn reserved_tight(&self) -> bool {
        let z = self.z.get(self.next_release).copied().unwrap_or(0);
        z + self.queue.len() as i64 >= self.capacity as i64
    }
}

/// Internal replay state; one per run.
struct TsState<'a, W> {
    arrivals: &'a [&'a Packet<W>],
    buffers: Vec<BufferState>,
    horizon: Step,
    rule: TsRule,
    /// `(overflow deadline, buffer)` for every non-empty buffer.
    ready: BTreeSet<(Step, BufferId)>,
    keys: Vec<Option<Step>>,
    last_served: Option<BufferId>,
}

enum Stop {
    AtHorizon,
    OnFirstDrop,
}

impl<'a, W: Weight> TsState<'a, W> {
    /// `arrivals` holds the packets taking part, in `(release, id)` order.
    fn new(arrivals: &'a [&'a Packet<W>], capacities: &[usize], horizon: Step, rule: TsRule) -> Self {
        let mut per: Vec<Vec<(Step, usize)>> = vec![Vec::new(); capacities.len()];
        for p in arrivals {
            match per[p.buffer].last_mut() {
                Some((t, c)) if *t == p.release => *c += 1,
                _ => per[p.buffer].push((p.release, 1)),
            }
        }
        let base = match rule {
            TsRule::ReservedSlots(base) => Some(base),
            TsRule::EarliestOverflow => None,
        };
        let buffers = per
            .into_iter()
            .zip(capacities)
            .map(|(pairs, &capacity)| {
                let releases: Vec<Step> = pairs.iter().map(|&(t, _)| t).collect();
                let counts: Vec<usize> = pairs.iter().map(|&(_, c)| c).collect();
                let z = base
                    .map(|b| ztable::z_values(&releases, &counts, capacity, horizon, b))
                    .unwrap_or_default();
                let cumulative = counts
                    .iter()
                    .scan(0, |acc, &c| {
                        *acc += c;
                        Some(*acc)
                    })
                    .collect();
                BufferState {
                    capacity,
                    queue: VecDeque::new(),
                    releases,
                    cumulative,
                    z,
                    next_release: 0,
                    sent: 0,
                    dropped: 0,
                }
            })
            .collect::<Vec<_>>();
        TsState {
            arrivals,
            keys: vec![None; buffers.len()],
            buffers,
            horizon,
            rule,
            ready: BTreeSet::new(),
            last_served: None,
        }
    }

    fn refresh(&mut self, buffer: BufferId) {
        if let Some(old) = self.keys[buffer].take() {
            self.ready.remove(&(old, buffer));
        }
        let b = &self.buffers[buffer];
        if !b.queue.is_empty() {
            let key = b.overflow_deadline(self.horizon);
            self.keys[buffer] = Some(key);
            self.ready.insert((key, buffer));
        }
    }

    fn choose(&self, now: Step) -> (BufferId, Vec<BufferId>) {
        match self.rule {
            TsRule::EarliestOverflow => {
                let &(first, lowest) = self.ready.first().expect("some buffer is non-empty");
                let tight = self
                    .ready
                    .iter()
                    .take_while(|&&(k, _)| k == now + 1)
                    .map(|&(_, b)| b)
                    .collect();
                let served = match self.last_served {
                    Some(last) if self.keys[last] == Some(first) => last,
                    _ => lowest,
                };
                (served, tight)
            }
            TsRule::ReservedSlots(_) => {
                let tight: Vec<BufferId> = (0..self.buffers.len())
                    .filter(|&i| !self.buffers[i].queue.is_empty() && self.buffers[i].reserved_tight())
                    .collect();
                let served = tight.first().copied().unwrap_or_else(|| match self.last_served {
                    Some(last) if !self.buffers[last].queue.is_empty() => last,
                    _ => self.ready.iter().map(|&(_, b)| b).min().expect("non-empty"),
                });
                (served, tight)
            }
        }
    }

    /// Replays arrivals and service. Returns `false` if `stop` is
    /// `OnFirstDrop` and some arrival overflowed.
    fn run(&mut self, stop: Stop, mut run: Option<&mut TsRun>, schedule: &mut Schedule) -> bool {
        let mut next = 0;
        let mut now: Step = 0;
        loop {
            if self.ready.is_empty() {
                match self.arrivals.get(next).copied() {
                    Some(p) => now = now.max(p.release),
                    None => break,
                }
            }
            if now >= self.horizon {
                break;
            }
            while let Some(p) = self.arrivals.get(next).copied().filter(|p| p.release <= now) {
                next += 1;
                let b = &mut self.buffers[p.buffer];
                while b.releases.get(b.next_release).is_some_and(|&t| t <= now) {
                    b.next_release += 1;
                }
                if b.queue.len() == b.capacity {
                    if let Stop::OnFirstDrop = stop {
                        return false;
                    }
                    b.dropped += 1;
                    if let Some(r) = run.as_deref_mut() {
                        r.dropped.push(p.id);
                    }
                } else {
                    b.queue.push_back(p.id);
                }
                self.refresh(p.buffer);
            }
            let (served, tight) = self.choose(now);
            let b = &mut self.buffers[served];
            let id = b.queue.pop_front().expect("served buffer is non-empty");
            b.sent += 1;
            self.refresh(served);
            self.last_served = Some(served);
            schedule.push(now, id);
            if let Some(r) = run.as_deref_mut() {
                r.steps.push(TsStep {
                    step: now,
                    served,
                    tight,
                });
            }
            now += 1;
        }
        let leftover = self.buffers.iter().any(|b| !b.queue.is_empty()) || next < self.arrivals.len();
        if let Some(r) = run {
            for b in &self.buffers {
                r.undelivered.extend(b.queue.iter().copied());
            }
            r.undelivered.extend(self.arrivals[next..].iter().map(|p| p.id));
            r.undelivered.sort_unstable();
        }
        !leftover
    }
}

/// Members of `inst` in `(release, id)` order.
fn by_release<'a, W: Weight>(inst: &'a Instance<W>, member: Option<&[bool]>) -> Vec<&'a Packet<W>> {
    let mut sorted: Vec<&Packet<W>> = inst.packets.iter().filter(|p| member.is_none_or(|m| m[p.id])).collect();
    sorted.sort_unstable_by_key(|p| (p.release, p.id));
    sorted
}

fn common_deadline<W: Weight>(inst: &Instance<W>) -> Result<Step> {
    inst.ensure_valid(ValidationMode::General)?;
    inst.require_common_deadline()
}

/// Tight Schedule for uniform values: drop arrivals to full buffers and
/// serve the most urgent buffer every step until the common deadline.
pub fn ts_schedule<W: Weight>(inst: &Instance<W>) -> Result<Schedule> {
    let horizon = common_deadline(inst)?;
    inst.ensure_valid(ValidationMode::PerReleaseFit)?;
    let mut schedule = Schedule::new();
    TsState::new(
        &by_release(inst, None),
        &inst.capacities,
        horizon,
        TsRule::EarliestOverflow,
    )
    .run(Stop::AtHorizon, None, &mut schedule);
    Ok(schedule)
}

/// Full replay with the chosen rule, recording drops and every step.
pub fn ts_run<W: Weight>(inst: &Instance<W>, rule: TsRule) -> Result<TsRun> {
    let horizon = common_deadline(inst)?;
    let mut run = TsRun {
        schedule: Schedule::new(),
        dropped: Vec::new(),
        undelivered: Vec::new(),
        steps: Vec::new(),
    };
    let mut schedule = Schedule::new();
    TsState::new(&by_release(inst, None), &inst.capacities, horizon, rule).run(
        Stop::AtHorizon,
        Some(&mut run),
        &mut schedule,
    );
    run.schedule = schedule;
    Ok(run)
}

/// True iff every packet of `set` can be delivered by the common deadline.
pub fn ts_feasible<W: Weight>(inst: &Instance<W>, set: &[PacketId]) -> Result<bool> {
    ts_feasible_with(inst, set, TsRule::EarliestOverflow)
}

/// [`ts_feasible`] under an explicit rule: `false` on any overflowing
/// arrival or on packets left at the deadline.
pub fn ts_feasible_with<W: Weight>(inst: &Instance<W>, set: &[PacketId], rule: TsRule) -> Result<bool> {
    let horizon = common_deadline(inst)?;
    let member = membership(inst, set)?;
    let mut scratch = Schedule::new();
    let arrivals = by_release(inst, Some(&member));
    Ok(TsState::new(&arrivals, &inst.capacities, horizon, rule).run(Stop::OnFirstDrop, None, &mut scratch))
}

/// Examines packets by non-increasing value (smaller id first among ties)
/// and keeps each one whose addition stays deliverable.
pub fn greedy_ts<W: Weight>(inst: &Instance<W>) -> Result<GreedyResult<W>> {
    let horizon = common_deadline(inst)?;
    // members point into a release-ordered copy, so a replay walks memory in order
    let mut packets = inst.packets.clone();
    packets.sort_unstable_by_key(|p| (p.release, p.id));
    let mut order: Vec<&Packet<W>> = packets.iter().collect();
    order.sort_unstable_by_key(|p| (Reverse(p.value), p.id));

    let mut chosen: Vec<&Packet<W>> = Vec::new();
    let mut scratch = Schedule::new();
    for p in order {
        let at = chosen.partition_point(|q| (q.release, q.id) < (p.release, p.id));
        chosen.insert(at, p);
        scratch.sends.clear();
        let ok = TsState::new(&chosen, &inst.capacities, horizon, TsRule::EarliestOverflow).run(
            Stop::OnFirstDrop,
            None,
            &mut scratch,
        );
        if !ok {
            chosen.remove(at);
        }
    }
    let mut schedule = Schedule::new();
    let ok = TsState::new(&chosen, &inst.capacities, horizon, TsRule::EarliestOverflow).run(
        Stop::OnFirstDrop,
        None,
        &mut schedule,
    );
    debug_assert!(ok);
    let mut member = vec![false; inst.len()];
    for q in &chosen {
        member[q.id] = true;
    }
    let selected: Vec<PacketId> = (0..member.len()).filter(|&id| member[id]).collect();
    let positions = inst.positions();
    let total_value = W::total(selected.iter().map(|&id| inst.packets[positions[id]].value));
    Ok(GreedyResult {
        selected,
        schedule,
        total_value,
    })
}
