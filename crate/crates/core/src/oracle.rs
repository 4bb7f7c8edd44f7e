//! Exponential-time exact reference for the general model: any number of
//! buffers, distinct deadlines, arbitrary values.
//!
//! Feasibility of a packet set is a depth-first search over steps that
//! picks which buffer to serve. Inside the chosen buffer the
//! earliest-deadline resident is sent; swapping two residents of the same
//! buffer never changes occupancy, so this loses nothing. Failed
//! `(step, sent set)` states are memoised. The optimum enumerates subsets by
//! branch and bound on remaining value.

use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::model::{membership, Instance, Packet, PacketId, Schedule, Step, ValidationMode};
use crate::weight::Weight;

pub const MAX_PACKETS: usize = 16;
pub const MAX_HORIZON: Step = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult<W> {
    pub optimal_value: W,
    /// Ids ascending. Among optimal sets, the lexicographically smallest.
    pub witness_set: Vec<PacketId>,
    pub witness_schedule: Schedule,
    /// Search nodes visited, subset and feasibility searches combined.
    pub explored: u64,
}

/// What the feasibility search may send in a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Earliest-deadline resident of the chosen buffer.
    BufferEdf,
    /// Any resident, or nothing at all.
    Unpruned,
}

struct FeasibilitySearch<'a, W> {
    packets: Vec<&'a Packet<W>>,
    capacities: &'a [usize],
    /// `arrived[t]`: bits of packets released at or before `t`.
    arrived: Vec<u32>,
    full: u32,
    mode: SearchMode,
    failed: HashSet<(Step, u32)>,
    nodes: u64,
}

impl<'a, W: Weight> FeasibilitySearch<'a, W> {
    fn new(inst: &'a Instance<W>, member: &[bool], mode: SearchMode) -> Self {
        let packets: Vec<&Packet<W>> = inst.packets.iter().filter(|p| member[p.id]).collect();
        let horizon = packets.iter().map(|p| p.deadline).max().unwrap_or(0);
        let arrived = (0..=horizon)
            .map(|t| {
                packets
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.release <= t)
                    .fold(0u32, |acc, (i, _)| acc | (1 << i))
            })
            .collect();
        FeasibilitySearch {
            full: if packets.is_empty() {
                0
            } else {
                u32::MAX >> (32 - packets.len())
            },
            packets,
            capacities: &inst.capacities,
            arrived,
            mode,
            failed: HashSet::new(),
            nodes: 0,
        }
    }

    /// On success `path` holds the sends in reverse step order.
    fn search(&mut self, mut now: Step, sent: u32, path: &mut Vec<(Step, PacketId)>) -> bool {
        self.nodes += 1;
        if sent == self.full {
            return true;
        }
        let mut resident = self.arrived_at(now) & !sent;
        if resident == 0 {
            // idle until the next release of an unsent packet
            now = self
                .bits(!sent & self.full)
                .map(|i| self.packets[i].release)
                .min()
                .expect("unsent packet exists");
            resident = self.arrived_at(now) & !sent;
        }
        let mut occupancy = vec![0usize; self.capacities.len()];
        for i in self.bits(resident) {
            let p = self.packets[i];
            if p.deadline <= now {
                return false;
            }
            occupancy[p.buffer] += 1;
            if occupancy[p.buffer] > self.capacities[p.buffer] {
                return false;
            }
        }
        if self.failed.contains(&(now, sent)) {
            return false;
        }
        let choices: Vec<Option<usize>> = match self.mode {
            SearchMode::BufferEdf => (0..self.capacities.len())
                .filter_map(|b| {
                    self.bits(resident)
                        .filter(|&i| self.packets[i].buffer == b)
                        .min_by_key(|&i| (self.packets[i].deadline, self.packets[i].id))
                })
                .map(Some)
                .collect(),
            SearchMode::Unpruned => self.bits(resident).map(Some).chain([None]).collect(),
        };
        for choice in choices {
            let next_sent = match choice {
                Some(i) => sent | (1 << i),
                None => sent,
            };
            if self.search(now + 1, next_sent, path) {
                if let Some(i) = choice {
                    path.push((now, self.packets[i].id));
                }
                return true;
            }
        }
        self.failed.insert((now, sent));
        false
    }

    fn arrived_at(&self, t: Step) -> u32 {
        let last = self.arrived.len() - 1;
        self.arrived[(t as usize).min(last)]
    }

    fn bits(&self, mask: u32) -> impl Iterator<Item = usize> {
        (0..self.packets.len()).filter(move |&i| mask & (1 << i) != 0)
    }

    fn witness(mut self) -> (Option<Schedule>, u64) {
        let mut path = Vec::new();
        let ok = self.search(0, 0, &mut path);
        path.reverse();
        (ok.then_some(Schedule { sends: path }), self.nodes)
    }
}

fn guard(what: &'static str, limit: u64, actual: u64) -> Result<()> {
    if actual > limit {
        Err(Error::GuardExceeded { what, limit, actual })
    } else {
        Ok(())
    }
}

fn checked_member<W: Weight>(inst: &Instance<W>, set: &[PacketId]) -> Result<Vec<bool>> {
    inst.ensure_valid(ValidationMode::General)?;
    let member = membership(inst, set)?;
    let count = member.iter().filter(|&&m| m).count();
    guard("packet set size", MAX_PACKETS as u64, count as u64)?;
    let horizon = inst
        .packets
        .iter()
        .filter(|p| member[p.id])
        .map(|p| p.deadline)
        .max()
        .unwrap_or(0);
    guard("horizon", MAX_HORIZON, horizon)?;
    Ok(member)
}

/// True iff every packet of `set` can be sent within its window with all
/// buffer capacities respected.
pub fn oracle_feasible<W: Weight>(inst: &Instance<W>, set: &[PacketId]) -> Result<bool> {
    Ok(oracle_witness(inst, set, SearchMode::BufferEdf)?.is_some())
}

/// A schedule delivering exactly `set`, if one exists.
pub fn oracle_witness<W: Weight>(inst: &Instance<W>, set: &[PacketId], mode: SearchMode) -> Result<Option<Schedule>> {
    let member = checked_member(inst, set)?;
    Ok(FeasibilitySearch::new(inst, &member, mode).witness().0)
}

struct SubsetSearch<'a, W> {
    inst: &'a Instance<W>,
    order: Vec<&'a Packet<W>>,
    suffix_value: Vec<W>,
    feasible: HashMap<Vec<PacketId>, Option<Schedule>>,
    best: Option<(W, Vec<PacketId>, Schedule)>,
    explored: u64,
}

impl<'a, W: Weight> SubsetSearch<'a, W> {
    fn check(&mut self, ids: &[PacketId]) -> Option<Schedule> {
        if let Some(hit) = self.feasible.get(ids) {
            return hit.clone();
        }
        let mut member = vec![false; self.inst.len()];
        for &id in ids {
            member[id] = true;
        }
        let (sched, nodes) = FeasibilitySearch::new(self.inst, &member, SearchMode::BufferEdf).witness();
        self.explored += nodes;
        self.feasible.insert(ids.to_vec(), sched.clone());
        sched
    }

    fn better(&self, value: W, ids: &[PacketId]) -> bool {
        match &self.best {
            None => true,
            Some((bv, bids, _)) => value > *bv || (value == *bv && ids < bids.as_slice()),
        }
    }

    fn descend(&mut self, k: usize, chosen: &mut Vec<PacketId>, value: W, sched: &Schedule) {
        self.explored += 1;
        if let Some((bv, _, _)) = &self.best {
            if value + self.suffix_value[k] < *bv {
                return;
            }
        }
        if k == self.order.len() {
            let mut ids = chosen.clone();
            ids.sort_unstable();
            if self.better(value, &ids) {
                self.best = Some((value, ids, sched.clone()));
            }
            return;
        }
        let p = self.order[k];
        chosen.push(p.id);
        let mut ids = chosen.clone();
        ids.sort_unstable();
        if let Some(with) = self.check(&ids) {
            self.descend(k + 1, chosen, value + p.value, &with);
        }
        chosen.pop();
        self.descend(k + 1, chosen, value, sched);
    }
}

/// Maximum total value over all deliverable packet sets.
pub fn oracle_optimal<W: Weight>(inst: &Instance<W>) -> Result<OracleResult<W>> {
    inst.ensure_valid(ValidationMode::General)?;
    guard("packet count", MAX_PACKETS as u64, inst.len() as u64)?;
    guard("horizon", MAX_HORIZON, inst.horizon())?;

    let mut order: Vec<&Packet<W>> = inst.packets.iter().collect();
    order.sort_unstable_by_key(|p| (Reverse(p.value), p.id));
    let mut suffix_value = vec![W::zero(); order.len() + 1];
    for k in (0..order.len()).rev() {
        suffix_value[k] = suffix_value[k + 1] + order[k].value;
    }
    let mut search = SubsetSearch {
        inst,
        order,
        suffix_value,
        feasible: HashMap::new(),
        best: None,
        explored: 0,
    };
    search.descend(0, &mut Vec::new(), W::zero(), &Schedule::new());
    let (optimal_value, witness_set, witness_schedule) = search.best.expect("empty set is feasible");
    Ok(OracleResult {
        optimal_value,
        witness_set,
        witness_schedule,
        explored: search.explored,
    })
}

/// Largest number of packets deliverable together (values ignored).
pub fn oracle_max_count<W: Weight>(inst: &Instance<W>) -> Result<usize> {
    Ok(oracle_optimal(&inst.with_unit_values())?.witness_set.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_schedule;

    fn packets(caps: Vec<usize>, pkts: &[(Step, Step, u64, usize)]) -> Instance<u64> {
        Instance::new(
            caps,
            pkts.iter()
                .enumerate()
                .map(|(id, &(r, d, v, b))| Packet::new(id, r, d, v, b))
                .collect(),
        )
    }

    #[test]
    fn feasibility_cases() {
        let one = packets(vec![1], &[(0, 2, 1, 0), (0, 1, 1, 0)]);
        assert!(oracle_feasible(&one, &[]).unwrap());
        assert!(!oracle_feasible(&one, &[0, 1]).unwrap());
        let two = packets(vec![1, 1], &[(0, 1, 1, 0), (0, 2, 1, 1)]);
        let w = oracle_witness(&two, &[0, 1], SearchMode::BufferEdf).unwrap().unwrap();
        assert_eq!(w.sends, vec![(0, 0), (1, 1)]);
        assert_eq!(oracle_feasible(&two, &[7]), Err(Error::UnknownPacket(7)));
    }

    #[test]
    fn optimal_cases() {
        let empty = Instance::<u64>::empty(vec![2]);
        assert_eq!(oracle_optimal(&empty).unwrap().optimal_value, 0);

        let r = oracle_optimal(&packets(vec![1], &[(0, 2, 5, 0), (0, 1, 3, 0)])).unwrap();
        assert_eq!((r.optimal_value, r.witness_set), (5, vec![0]));

        // p(r0,d1,v3,Q1) s(r0,d2,v4,Q1) q(r0,d2,v2,Q2)
        let inst = packets(vec![1, 1], &[(0, 1, 3, 0), (0, 2, 4, 0), (0, 2, 2, 1)]);
        let r = oracle_optimal(&inst).unwrap();
        assert_eq!((r.optimal_value, r.witness_set.clone()), (6, vec![1, 2]));
        let report = verify_schedule(&inst, &r.witness_schedule).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.delivered_value, 6);
    }

    #[test]
    fn lexicographic_witness() {
        // three interchangeable packets, two slots: {0, 1} wins
        let inst = packets(vec![3], &[(0, 2, 1, 0), (0, 2, 1, 0), (0, 2, 1, 0)]);
        assert_eq!(oracle_optimal(&inst).unwrap().witness_set, vec![0, 1]);
    }

    #[test]
    fn guards() {
        let big = packets(vec![1], &[(0, 17, 1, 0)]);
        assert!(matches!(
            oracle_optimal(&big),
            Err(Error::GuardExceeded { what: "horizon", .. })
        ));
        let many: Vec<_> = (0..17).map(|_| (0, 2, 1, 0)).collect();
        assert!(matches!(
            oracle_optimal(&packets(vec![1], &many)),
            Err(Error::GuardExceeded {
                what: "packet count",
                ..
            })
        ));
    }

    #[test]
    fn all_at_zero_with_rmax_plus_n() {
        let inst = packets(vec![5], &[(0, 9, 1, 0); 5]).normalize_no_deadline().unwrap();
        assert!(inst.packets.iter().all(|p| p.deadline == 5));
        let all: Vec<_> = (0..5).collect();
        assert!(oracle_feasible(&inst, &all).unwrap());
    }
}
