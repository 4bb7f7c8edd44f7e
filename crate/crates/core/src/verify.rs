//! Schedule verification under drop-at-arrival semantics: a packet that is
//! never sent is assumed never admitted, so only sent packets occupy buffers.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{BufferId, Instance, PacketId, Schedule, Step};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScheduleViolation {
    StepReused {
        step: Step,
        first: PacketId,
        second: PacketId,
    },
    PacketResent {
        packet: PacketId,
        first: Step,
        second: Step,
    },
    OutsideWindow {
        packet: PacketId,
        step: Step,
        release: Step,
        deadline: Step,
    },
    CapacityExceeded {
        buffer: BufferId,
        step: Step,
        occupancy: usize,
        capacity: usize,
    },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ScheduleViolation::StepReused { step, first, second } => {
                write!(f, "step {step} sends both {first} and {second}")
            }
            ScheduleViolation::PacketResent { packet, first, second } => {
                write!(f, "packet {packet} sent at steps {first} and {second}")
            }
            ScheduleViolation::OutsideWindow {
                packet,
                step,
                release,
                deadline,
            } => write!(
                f,
                "packet {packet} sent at step {step}, window is {release}..{deadline}"
            ),
            ScheduleViolation::CapacityExceeded {
                buffer,
                step,
                occupancy,
                capacity,
            } => write!(
                f,
                "buffer {buffer} holds {occupancy} packets at step {step}, capacity {capacity}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThroughputReport<W> {
    pub delivered_count: usize,
    /// Sum over distinct sent packets; the objective value when the report is clean.
    pub delivered_value: W,
    pub violations: Vec<ScheduleViolation>,
}

impl<W> ThroughputReport<W> {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_schedule<W: Weight>(inst: &Instance<W>, sched: &Schedule) -> Result<ThroughputReport<W>> {
    let mut sends = sched.sends.clone();
    sends.sort_unstable();

    let mut violations = Vec::new();
    let mut step_owner: HashMap<Step, PacketId> = HashMap::new();
    let mut packet_step: HashMap<PacketId, Step> = HashMap::new();
    let mut packets = Vec::new();

    for &(step, id) in &sends {
        let p = inst.packet(id).ok_or(Error::UnknownPacket(id))?;
        if let Some(&first) = step_owner.get(&step) {
            violations.push(ScheduleViolation::StepReused {
                step,
                first,
                second: id,
            });
        } else {
            step_owner.insert(step, id);
        }
        if let Some(&first) = packet_step.get(&id) {
            violations.push(ScheduleViolation::PacketResent {
                packet: id,
                first,
                second: step,
            });
            continue;
        }
        packet_step.insert(id, step);
        if !p.sendable_at(step) {
            violations.push(ScheduleViolation::OutsideWindow {
                packet: id,
                step,
                release: p.release,
                deadline: p.deadline,
            });
        }
        packets.push((*p, step));
    }

    // Occupancy sweep: a sent packet is resident in steps release..=step.
    let mut events: Vec<(BufferId, Step, i64)> = Vec::new();
    for (p, step) in &packets {
        if p.release <= *step {
            events.push((p.buffer, p.release, 1));
            events.push((p.buffer, step + 1, -1));
        }
    }
    // departures sort before arrivals at the same step
    events.sort_unstable();
    let mut i = 0;
    while i < events.len() {
        let buffer = events[i].0;
        let capacity = inst.capacities.get(buffer).copied().unwrap_or(0);
        let mut occupancy: i64 = 0;
        while i < events.len() && events[i].0 == buffer {
            let step = events[i].1;
            let mut arrived = false;
            while i < events.len() && events[i].0 == buffer && events[i].1 == step {
                occupancy += events[i].2;
                arrived |= events[i].2 > 0;
                i += 1;
            }
            if arrived && occupancy as usize > capacity {
                violations.push(ScheduleViolation::CapacityExceeded {
                    buffer,
                    step,
                    occupancy: occupancy as usize,
                    capacity,
                });
            }
        }
    }

    Ok(ThroughputReport {
        delivered_count: packets.len(),
        delivered_value: W::total(packets.iter().map(|(p, _)| p.value)),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Packet;

    fn two_packet() -> Instance<u64> {
        // p(r0,d2,v5), q(r0,d1,v3), B=1
        Instance::new(vec![1], vec![Packet::new(0, 0, 2, 5, 0), Packet::new(1, 0, 1, 3, 0)])
    }

    #[test]
    fn empty_schedule() {
        let r = verify_schedule(&two_packet(), &Schedule::new()).unwrap();
        assert_eq!((r.delivered_count, r.delivered_value), (0, 0));
        assert!(r.is_clean());
    }

    #[test]
    fn both_resident_at_zero() {
        let sched = Schedule::from_sends(vec![(0, 1), (1, 0)]);
        let r = verify_schedule(&two_packet(), &sched).unwrap();
        assert_eq!(
            r.violations,
            vec![ScheduleViolation::CapacityExceeded {
                buffer: 0,
                step: 0,
                occupancy: 2,
                capacity: 1
            }]
        );
    }

    #[test]
    fn single_send_is_valid() {
        let r = verify_schedule(&two_packet(), &Schedule::from_sends(vec![(0, 0)])).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.delivered_value, 5);
    }

    #[test]
    fn window_step_and_resend() {
        let inst = Instance::new(vec![3], vec![Packet::new(0, 1, 3, 1u64, 0), Packet::new(1, 0, 4, 1, 0)]);
        let r = verify_schedule(&inst, &Schedule::from_sends(vec![(0, 0), (3, 0), (3, 1)])).unwrap();
        assert!(r.violations.contains(&ScheduleViolation::OutsideWindow {
            packet: 0,
            step: 0,
            release: 1,
            deadline: 3
        }));
        assert!(r.violations.contains(&ScheduleViolation::PacketResent {
            packet: 0,
            first: 0,
            second: 3
        }));
        assert!(r.violations.contains(&ScheduleViolation::StepReused {
            step: 3,
            first: 0,
            second: 1
        }));
        assert_eq!(
            verify_schedule(&inst, &Schedule::from_sends(vec![(0, 9)])),
            Err(Error::UnknownPacket(9))
        );
    }

    #[test]
    fn departure_frees_slot_for_next_step() {
        // p sent at 0 leaves before q arrives at 1
        let inst = Instance::new(vec![1], vec![Packet::new(0, 0, 2, 1u64, 0), Packet::new(1, 1, 2, 1, 0)]);
        let r = verify_schedule(&inst, &Schedule::from_sends(vec![(0, 0), (1, 1)])).unwrap();
        assert!(r.is_clean());
        let r = verify_schedule(&inst, &Schedule::from_sends(vec![(1, 0)])).unwrap();
        assert!(r.is_clean());
    }
}
