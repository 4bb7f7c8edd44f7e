use std::collections::BTreeMap;
use std::ops::Bound;

use crate::error::Result;
use crate::model::{BufferId, Instance, PacketId, Step, ValidationMode};
use crate::weight::Weight;

/// How the last release time of a buffer seeds the reserved-slot recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ZBase {
    /// `Z(r_max) = min{B, |P(r_max)|}` and every entry clamped to
    /// `[|P(t)|, B]`.
    #[default]
    Clamped,
    /// `Z(r_max) = max{|P(r_max)|, D - r_max}` and the upper clamp only, as
    /// originally stated. Kept for comparison runs.
    Literal,
}

/// Per buffer, reserved-slot counts indexed by release time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZTable {
    slots: Vec<BTreeMap<Step, i64>>,
}

impl ZTable {
    pub fn num_buffers(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, buffer: BufferId, release: Step) -> Option<i64> {
        self.slots.get(buffer)?.get(&release).copied()
    }

    /// Entries of one buffer in increasing release order.
    pub fn entries(&self, buffer: BufferId) -> impl Iterator<Item = (Step, i64)> + '_ {
        self.slots[buffer].iter().map(|(&t, &z)| (t, z))
    }

    pub fn last_release(&self, buffer: BufferId) -> Option<Step> {
        self.slots[buffer].keys().next_back().copied()
    }

    /// `Z_i` at the first release of `buffer` strictly after `now`; 0 when
    /// no arrivals remain.
    pub fn at_next_release(&self, buffer: BufferId, now: Step) -> i64 {
        self.slots[buffer]
            .range((Bound::Excluded(now), Bound::Unbounded))
            .next()
            .map_or(0, |(_, &z)| z)
    }
}

/// Walks one buffer's release times backwards. `releases` ascending,
/// `counts[k]` packets released at `releases[k]`. Output aligned with input.
pub(crate) fn z_values(releases: &[Step], counts: &[usize], capacity: usize, deadline: Step, base: ZBase) -> Vec<i64> {
    let cap = capacity as i64;
    let mut z = vec![0i64; releases.len()];
    let Some(last) = releases.len().checked_sub(1) else {
        return z;
    };
    let arrivals = |k: usize| counts[k] as i64;
    z[last] = match base {
        ZBase::Clamped => cap.min(arrivals(last)),
        ZBase::Literal => arrivals(last).max(deadline as i64 - releases[last] as i64),
    };
    for k in (0..last).rev() {
        let gap = (releases[k + 1] - releases[k]) as i64;
        let carried = z[k + 1] + arrivals(k) - gap;
        z[k] = match base {
            ZBase::Clamped => cap.min(arrivals(k).max(carried)),
            ZBase::Literal => cap.min(carried),
        };
    }
    z
}

/// Per-buffer `(release, count)` pairs, ascending, over `member` packets.
pub(crate) fn release_counts<W: Weight>(inst: &Instance<W>, member: Option<&[bool]>) -> Vec<Vec<(Step, usize)>> {
    let mut per: Vec<BTreeMap<Step, usize>> = vec![BTreeMap::new(); inst.num_buffers()];
    for p in &inst.packets {
        if member.is_none_or(|m| m[p.id]) {
            *per[p.buffer].entry(p.release).or_default() += 1;
        }
    }
    per.into_iter().map(|m| m.into_iter().collect()).collect()
}

pub fn compute_z_table<W: Weight>(inst: &Instance<W>, subset: Option<&[PacketId]>) -> Result<ZTable> {
    compute_z_table_with(inst, subset, ZBase::Clamped)
}

/// Reserved-slot table of `inst`, optionally restricted to `subset`.
pub fn compute_z_table_with<W: Weight>(inst: &Instance<W>, subset: Option<&[PacketId]>, base: ZBase) -> Result<ZTable> {
    inst.ensure_valid(ValidationMode::General)?;
    let deadline = inst.require_common_deadline()?;
    let member = subset.map(|s| crate::model::membership(inst, s)).transpose()?;
    let slots = release_counts(inst, member.as_deref())
        .into_iter()
        .zip(&inst.capacities)
        .map(|(pairs, &cap)| {
            let releases: Vec<Step> = pairs.iter().map(|&(t, _)| t).collect();
            let counts: Vec<usize> = pairs.iter().map(|&(_, c)| c).collect();
            let z = z_values(&releases, &counts, cap, deadline, base);
            releases.into_iter().zip(z).collect()
        })
        .collect();
    Ok(ZTable { slots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::Packet;

    fn common(caps: Vec<usize>, d: Step, pkts: &[(Step, usize)]) -> Instance<u64> {
        Instance::new(
            caps,
            pkts.iter()
                .enumerate()
                .map(|(id, &(r, b))| Packet::new(id, r, d, 1, b))
                .collect(),
        )
    }

    #[test]
    fn two_release_times() {
        let inst = common(vec![3], 4, &[(0, 0), (0, 0), (2, 0), (2, 0)]);
        let z = compute_z_table(&inst, None).unwrap();
        assert_eq!(z.get(0, 2), Some(2));
        assert_eq!(z.get(0, 0), Some(2));
        assert_eq!(z.last_release(0), Some(2));
        assert_eq!(z.at_next_release(0, 0), 2);
        assert_eq!(z.at_next_release(0, 2), 0);
    }

    #[test]
    fn base_case_and_empty_buffer() {
        let inst = common(vec![4, 2], 6, &[(1, 0), (1, 0), (1, 0)]);
        let z = compute_z_table(&inst, None).unwrap();
        assert_eq!(z.entries(0).collect::<Vec<_>>(), vec![(1, 3)]);
        assert_eq!(z.entries(1).count(), 0);

        let literal = compute_z_table_with(&inst, None, ZBase::Literal).unwrap();
        assert_eq!(literal.get(0, 1), Some(5));
    }

    #[test]
    fn subset_restricts_arrivals() {
        let inst = common(vec![3], 4, &[(0, 0), (0, 0), (2, 0), (2, 0)]);
        let z = compute_z_table(&inst, Some(&[0, 2])).unwrap();
        assert_eq!(z.get(0, 2), Some(1));
        assert_eq!(z.get(0, 0), Some(1));
        assert!(matches!(
            compute_z_table(&inst, Some(&[9])),
            Err(Error::UnknownPacket(9))
        ));
    }

    #[test]
    fn large_gap_clamps_to_arrivals() {
        let inst = common(vec![3], 11, &[(0, 0), (10, 0), (10, 0)]);
        let z = compute_z_table(&inst, None).unwrap();
        assert_eq!(z.get(0, 0), Some(1));
        let literal = compute_z_table_with(&inst, None, ZBase::Literal).unwrap();
        // base max{2, 11 - 10} = 2, then min{3, 2 + 1 - 10}
        assert_eq!(literal.get(0, 10), Some(2));
        assert_eq!(literal.get(0, 0), Some(-7));
    }

    #[test]
    fn rejects_distinct_deadlines() {
        let inst = Instance::new(vec![1], vec![Packet::new(0, 0, 2, 1u64, 0), Packet::new(1, 0, 3, 1, 0)]);
        assert_eq!(compute_z_table(&inst, None), Err(Error::NotCommonDeadline));
    }
}
