//! Domain model: packets, instances, schedules and instance validation.
//!
//! Time is discrete. A packet released at `r` with deadline `d` may be sent in
//! any step `r..d`; the deadline itself is exclusive. All packets released at
//! step `t` arrive before the transmission of step `t`, in ascending id order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::weight::Weight;

pub type Step = u64;
pub type PacketId = usize;
pub type BufferId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Packet<W> {
    pub id: PacketId,
    pub release: Step,
    /// Exclusive: the last usable step is `deadline - 1`.
    pub deadline: Step,
    pub value: W,
    pub buffer: BufferId,
}

impl<W: Weight> Packet<W> {
    pub fn new(id: PacketId, release: Step, deadline: Step, value: W, buffer: BufferId) -> Self {
        Packet {
            id,
            release,
            deadline,
            value,
            buffer,
        }
    }

    /// Number of steps in which the packet is sendable.
    pub fn slack(&self) -> Step {
        self.deadline.saturating_sub(self.release)
    }

    pub fn sendable_at(&self, step: Step) -> bool {
        self.release <= step && step < self.deadline
    }
}

/// Buffer capacities plus the packets arriving over time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance<W> {
    pub capacities: Vec<usize>,
    pub packets: Vec<Packet<W>>,
    /// Set iff the instance has packets and they all share this deadline.
    pub common_deadline: Option<Step>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidationMode {
    General,
    /// General checks plus: all deadlines equal.
    CommonDeadline,
    /// General checks plus: at most `B_i` packets released to buffer `i` at any step.
    PerReleaseFit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    NoBuffers,
    ZeroCapacity {
        buffer: BufferId,
    },
    BufferOutOfRange {
        packet: PacketId,
        buffer: BufferId,
    },
    DuplicateId {
        packet: PacketId,
    },
    /// Ids must be exactly `0..n`.
    IdOutOfRange {
        packet: PacketId,
        n: usize,
    },
    EmptyWindow {
        packet: PacketId,
        release: Step,
        deadline: Step,
    },
    DeadlineMismatch {
        packet: PacketId,
        deadline: Step,
        expected: Step,
    },
    ArrivalOverflow {
        buffer: BufferId,
        release: Step,
        arrivals: usize,
        capacity: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NoBuffers => write!(f, "instance has no buffers"),
            Violation::ZeroCapacity { buffer } => write!(f, "buffer {buffer} has capacity 0"),
            Violation::BufferOutOfRange { packet, buffer } => {
                write!(f, "packet {packet} targets missing buffer {buffer}")
            }
            Violation::DuplicateId { packet } => write!(f, "packet id {packet} appears twice"),
            Violation::IdOutOfRange { packet, n } => {
                write!(f, "packet id {packet} outside 0..{n}")
            }
            Violation::EmptyWindow {
                packet,
                release,
                deadline,
            } => write!(f, "packet {packet} has deadline {deadline} <= release {release}"),
            Violation::DeadlineMismatch {
                packet,
                deadline,
                expected,
            } => write!(
                f,
                "packet {packet} has deadline {deadline}, common deadline is {expected}"
            ),
            Violation::ArrivalOverflow {
                buffer,
                release,
                arrivals,
                capacity,
            } => write!(
                f,
                "{arrivals} packets released to buffer {buffer} at step {release}, capacity {capacity}"
            ),
        }
    }
}

impl<W: Weight> Instance<W> {
    /// Builds an instance, deriving `common_deadline` from the packets.
    pub fn new(capacities: Vec<usize>, packets: Vec<Packet<W>>) -> Self {
        let common_deadline = derive_common_deadline(&packets);
        Instance {
            capacities,
            packets,
            common_deadline,
        }
    }

    pub fn empty(capacities: Vec<usize>) -> Self {
        Instance::new(capacities, Vec::new())
    }

    pub fn num_buffers(&self) -> usize {
        self.capacities.len()
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    /// Largest deadline, or 0 for an empty instance.
    pub fn horizon(&self) -> Step {
        self.packets.iter().map(|p| p.deadline).max().unwrap_or(0)
    }

    pub fn max_release(&self) -> Option<Step> {
        self.packets.iter().map(|p| p.release).max()
    }

    pub fn total_value(&self) -> W {
        W::total(self.packets.iter().map(|p| p.value))
    }

    /// Looks a packet up by id. Packets are usually stored in id order, so
    /// the direct index is tried first.
    pub fn packet(&self, id: PacketId) -> Option<&Packet<W>> {
        match self.packets.get(id) {
            Some(p) if p.id == id => Some(p),
            _ => self.packets.iter().find(|p| p.id == id),
        }
    }

    /// `positions[id]` is the index of packet `id` in `packets`.
    /// Requires dense ids.
    pub fn positions(&self) -> Vec<usize> {
        let mut positions = vec![usize::MAX; self.packets.len()];
        for (pos, p) in self.packets.iter().enumerate() {
            if p.id < positions.len() {
                positions[p.id] = pos;
            }
        }
        positions
    }

    /// Same instance with every value replaced by one.
    pub fn with_unit_values(&self) -> Self {
        self.map_values(|_| W::one())
    }

    pub fn map_values(&self, mut f: impl FnMut(W) -> W) -> Self {
        Instance {
            capacities: self.capacities.clone(),
            packets: self
                .packets
                .iter()
                .map(|p| Packet {
                    value: f(p.value),
                    ..*p
                })
                .collect(),
            common_deadline: self.common_deadline,
        }
    }

    /// Sub-instance restricted to `ids`, keeping the original ids.
    pub fn restricted(&self, ids: &[PacketId]) -> Self {
        let mut keep = vec![false; self.packets.len()];
        for &id in ids {
            if id < keep.len() {
                keep[id] = true;
            }
        }
        let packets: Vec<_> = self
            .packets
            .iter()
            .filter(|p| p.id < keep.len() && keep[p.id])
            .copied()
            .collect();
        Instance::new(self.capacities.clone(), packets)
    }

    /// Reports every violated instance invariant for `mode`. An empty list
    /// means the instance is usable under that mode.
    pub fn validate(&self, mode: ValidationMode) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.packets.len();
        let m = self.capacities.len();
        if m == 0 {
            out.push(Violation::NoBuffers);
        }
        for (buffer, &cap) in self.capacities.iter().enumerate() {
            if cap == 0 {
                out.push(Violation::ZeroCapacity { buffer });
            }
        }
        let mut seen = vec![false; n];
        for p in &self.packets {
            if p.id >= n {
                out.push(Violation::IdOutOfRange { packet: p.id, n });
            } else if seen[p.id] {
                out.push(Violation::DuplicateId { packet: p.id });
            } else {
                seen[p.id] = true;
            }
            if p.buffer >= m {
                out.push(Violation::BufferOutOfRange {
                    packet: p.id,
                    buffer: p.buffer,
                });
            }
            if p.deadline <= p.release {
                out.push(Violation::EmptyWindow {
                    packet: p.id,
                    release: p.release,
                    deadline: p.deadline,
                });
            }
        }
        if let Some(expected) = self.common_deadline {
            for p in &self.packets {
                if p.deadline != expected {
                    out.push(Violation::DeadlineMismatch {
                        packet: p.id,
                        deadline: p.deadline,
                        expected,
                    });
                }
            }
        }
        match mode {
            ValidationMode::General => {}
            ValidationMode::CommonDeadline => {
                if self.common_deadline.is_none() {
                    if let Some(expected) = majority_deadline(&self.packets) {
                        for p in &self.packets {
                            if p.deadline != expected {
                                out.push(Violation::DeadlineMismatch {
                                    packet: p.id,
                                    deadline: p.deadline,
                                    expected,
                                });
                            }
                        }
                    }
                }
            }
            ValidationMode::PerReleaseFit => {
                let mut arrivals: BTreeMap<(BufferId, Step), usize> = BTreeMap::new();
                for p in &self.packets {
                    *arrivals.entry((p.buffer, p.release)).or_default() += 1;
                }
                for ((buffer, release), count) in arrivals {
                    if let Some(&capacity) = self.capacities.get(buffer) {
                        if count > capacity {
                            out.push(Violation::ArrivalOverflow {
                                buffer,
                                release,
                                arrivals: count,
                                capacity,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub(crate) fn ensure_valid(&self, mode: ValidationMode) -> Result<()> {
        let violations = self.validate(mode);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(violations))
        }
    }

    /// The deadline shared by all packets, or an error if there is none.
    pub fn require_common_deadline(&self) -> Result<Step> {
        match self.common_deadline {
            Some(d) if self.packets.iter().all(|p| p.deadline == d) => Ok(d),
            None if self.packets.is_empty() => Ok(0),
            _ => Err(Error::NotCommonDeadline),
        }
    }

    /// Gives packets without deadlines the common deadline `r_max + n`, the
    /// latest step by which one-per-step sending can clear everything.
    pub fn normalize_no_deadline(&self) -> Result<Self> {
        let r_max = self.max_release().ok_or(Error::EmptyInstance)?;
        let deadline = r_max + self.packets.len() as Step;
        let packets = self.packets.iter().map(|p| Packet { deadline, ..*p }).collect();
        Ok(Instance {
            capacities: self.capacities.clone(),
            packets,
            common_deadline: Some(deadline),
        })
    }
}

/// Membership bitmap over dense ids; unknown ids are an error.
pub(crate) fn membership<W: Weight>(inst: &Instance<W>, set: &[PacketId]) -> Result<Vec<bool>> {
    let n = inst.len();
    let mut member = vec![false; n];
    for &id in set {
        if id >= n || inst.packet(id).is_none() {
            return Err(Error::UnknownPacket(id));
        }
        member[id] = true;
    }
    Ok(member)
}

fn derive_common_deadline<W>(packets: &[Packet<W>]) -> Option<Step> {
    let first = packets.first()?.deadline;
    packets.iter().all(|p| p.deadline == first).then_some(first)
}

/// Most frequent deadline; ties go to the larger value.
fn majority_deadline<W>(packets: &[Packet<W>]) -> Option<Step> {
    let mut counts: HashMap<Step, usize> = HashMap::new();
    for p in packets {
        *counts.entry(p.deadline).or_default() += 1;
    }
    counts.into_iter().max_by_key(|&(d, c)| (c, d)).map(|(d, _)| d)
}

/// A set of transmissions, each `(step, packet id)`.
///
/// The container does not enforce its invariants so that schedules read from
/// disk can be checked by [`crate::verify::verify_schedule`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub sends: Vec<(Step, PacketId)>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    pub fn from_sends(mut sends: Vec<(Step, PacketId)>) -> Self {
        sends.sort_unstable();
        Schedule { sends }
    }

    pub fn push(&mut self, step: Step, packet: PacketId) {
        self.sends.push((step, packet));
    }

    pub fn len(&self) -> usize {
        self.sends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sends.is_empty()
    }

    /// Sent packet ids, ascending.
    pub fn packet_ids(&self) -> Vec<PacketId> {
        let mut ids: Vec<_> = self.sends.iter().map(|&(_, id)| id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn step_of(&self, packet: PacketId) -> Option<Step> {
        self.sends.iter().find(|&&(_, id)| id == packet).map(|&(s, _)| s)
    }
}
