//! Single bounded buffer (`m = 1`): DOS for uniform values, EDF feasibility
//! of a packet set, and the value-greedy over EDF-feasible sets.

mod deadline_queue;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

pub use deadline_queue::DeadlineQueue;

use crate::error::{Error, Result};
use crate::model::{membership, Instance, Packet, PacketId, Schedule, Step, ValidationMode};
use crate::weight::Weight;

/// Outcome of a value-greedy selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult<W> {
    /// Selected ids, ascending.
    pub selected: Vec<PacketId>,
    pub schedule: Schedule,
    pub total_value: W,
}

fn single_capacity<W: Weight>(inst: &Instance<W>) -> Result<usize> {
    if inst.num_buffers() != 1 {
        return Err(Error::BufferCount {
            expected: 1,
            found: inst.num_buffers(),
        });
    }
    inst.ensure_valid(ValidationMode::General)?;
    Ok(inst.capacities[0])
}

fn by_release<W: Weight>(inst: &Instance<W>) -> Vec<Packet<W>> {
    let mut packets = inst.packets.clone();
    packets.sort_unstable_by_key(|p| (p.release, p.id));
    packets
}

/// DOS: replay arrivals through a [`DeadlineQueue`], evicting the earliest
/// deadline whenever the buffer overflows or becomes tight, and send the
/// earliest-deadline packet every step. Values are ignored.
pub fn dos_schedule<W: Weight>(inst: &Instance<W>) -> Result<Schedule> {
    dos_schedule_observed(inst, |_, _| {})
}

/// [`dos_schedule`] that calls `observe(step, queue)` once per busy step,
/// after arrivals have settled and before the send.
pub fn dos_schedule_observed<W: Weight>(
    inst: &Instance<W>,
    mut observe: impl FnMut(Step, &DeadlineQueue),
) -> Result<Schedule> {
    let capacity = single_capacity(inst)?;
    let packets = by_release(inst);
    let mut queue = DeadlineQueue::new(capacity);
    let mut schedule = Schedule::new();
    let mut next = 0;
    let mut now: Step = 0;
    while next < packets.len() || !queue.is_empty() {
        if queue.is_empty() {
            now = now.max(packets[next].release);
        }
        while next < packets.len() && packets[next].release <= now {
            let p = &packets[next];
            queue.insert(p.deadline, p.id, now);
            next += 1;
        }
        observe(now, &queue);
        if let Some(id) = queue.pop_earliest(now) {
            schedule.push(now, id);
        }
        now += 1;
    }
    Ok(schedule)
}

/// Replays `packets` (release order, all members) with EDF service.
/// Returns the schedule, or `None` on an overflowing arrival or a miss.
fn edf_replay<'a, W: Weight + 'a>(
    packets: impl Iterator<Item = &'a Packet<W>>,
    capacity: usize,
    mut emit: Option<&mut Schedule>,
) -> bool {
    let mut packets = packets.peekable();
    let mut heap: BinaryHeap<Reverse<(Step, PacketId)>> = BinaryHeap::new();
    let mut now: Step = 0;
    loop {
        if heap.is_empty() {
            match packets.peek() {
                Some(p) => now = now.max(p.release),
                None => return true,
            }
        }
        while let Some(p) = packets.next_if(|p| p.release <= now) {
            heap.push(Reverse((p.deadline, p.id)));
        }
        if heap.len() > capacity {
            return false;
        }
        let Reverse((deadline, id)) = heap.pop().expect("non-empty");
        if deadline <= now {
            return false;
        }
        if let Some(s) = emit.as_deref_mut() {
            s.push(now, id);
        }
        now += 1;
    }
}

/// True iff every packet of `set` can be delivered within its window without
/// the buffer ever holding more than `B` of them.
pub fn edf_feasible<W: Weight>(inst: &Instance<W>, set: &[PacketId]) -> Result<bool> {
    let capacity = single_capacity(inst)?;
    let member = membership(inst, set)?;
    let packets = by_release(inst);
    Ok(edf_replay(packets.iter().filter(|p| member[p.id]), capacity, None))
}

/// Examines packets by non-increasing value (later deadline first, then
/// smaller id) and keeps each one whose addition stays EDF-feasible.
pub fn greedy_edf<W: Weight>(inst: &Instance<W>) -> Result<GreedyResult<W>> {
    let capacity = single_capacity(inst)?;
    let mut order: Vec<&Packet<W>> = inst.packets.iter().collect();
    order.sort_unstable_by_key(|p| (Reverse(p.value), Reverse(p.deadline), p.id));

    // members in release order; each candidate is tried in place
    let mut chosen: Vec<&Packet<W>> = Vec::new();
    for p in order {
        let at = chosen.partition_point(|q| (q.release, q.id) < (p.release, p.id));
        chosen.insert(at, p);
        if !edf_replay(chosen.iter().copied(), capacity, None) {
            chosen.remove(at);
        }
    }
    let mut schedule = Schedule::new();
    let ok = edf_replay(chosen.iter().copied(), capacity, Some(&mut schedule));
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

/// Plain FIFO with drop-head: same-release arrivals join in deadline
/// order, the oldest resident is discarded when the buffer overflows,
/// expired packets are discarded, and the head is sent every step.
pub fn fifo_schedule<W: Weight>(inst: &Instance<W>) -> Result<Schedule> {
    let capacity = single_capacity(inst)?;
    let mut packets = inst.packets.clone();
    packets.sort_unstable_by_key(|p| (p.release, p.deadline, p.id));
    let mut queue: VecDeque<&Packet<W>> = VecDeque::new();
    let mut schedule = Schedule::new();
    let mut next = 0;
    let mut now: Step = 0;
    while next < packets.len() || !queue.is_empty() {
        queue.retain(|p| p.deadline > now);
        if queue.is_empty() {
            if next == packets.len() {
                break;
            }
            now = now.max(packets[next].release);
        }
        while next < packets.len() && packets[next].release <= now {
            queue.push_back(&packets[next]);
            if queue.len() > capacity {
                queue.pop_front();
            }
            next += 1;
        }
        if let Some(p) = queue.pop_front() {
            schedule.push(now, p.id);
        }
        now += 1;
    }
    Ok(schedule)
}
