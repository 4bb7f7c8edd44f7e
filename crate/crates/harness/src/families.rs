//! Exhaustive small-instance families for the optimality sweeps.
//!
//! Instances are enumerated as multisets of packet "types" (a window for the
//! single-buffer model, a `(release, buffer)` pair under a common deadline),
//! so packet order never produces duplicates. Ids follow the canonical type
//! order.

use bufsched::model::Packet;
use bufsched::{Instance, Step};

/// Every multiset of size `0..=max_len` over `0..kinds`, as sorted index lists.
pub fn multisets(kinds: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn extend(kinds: usize, left: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for k in start..kinds {
            cur.push(k);
            extend(kinds, left - 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(kinds, max_len, 0, &mut Vec::new(), &mut out);
    out
}

/// Every capacity vector of length `m` over `1..=max_cap`.
pub fn capacity_vectors(m: usize, max_cap: usize) -> Vec<Vec<usize>> {
    (0..m).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                (1..=max_cap).map(move |c| {
                    let mut v = v.clone();
                    v.push(c);
                    v
                })
            })
            .collect()
    })
}

/// `(horizon, max packets)` pairs swept for the single-buffer model. The
/// packet bound shrinks as the window count grows.
pub const SINGLE_BUFFER_SHAPES: [(Step, usize); 3] = [(6, 4), (4, 6), (3, 8)];

/// All single-buffer instances with windows inside `0..horizon`, at most
/// `max_n` packets and `B` in `1..=max_cap`. Values are 1.
pub fn single_buffer_exhaustive(horizon: Step, max_n: usize, max_cap: usize) -> Vec<Instance> {
    let windows: Vec<(Step, Step)> = (0..horizon)
        .flat_map(|r| (r + 1..=horizon).map(move |d| (r, d)))
        .collect();
    let mut out = Vec::new();
    for set in multisets(windows.len(), max_n) {
        let packets: Vec<Packet<u64>> = set
            .iter()
            .enumerate()
            .map(|(id, &k)| Packet::new(id, windows[k].0, windows[k].1, 1, 0))
            .collect();
        for cap in 1..=max_cap {
            out.push(Instance::new(vec![cap], packets.clone()));
        }
    }
    out
}

/// Shapes swept for the common-deadline model: `(m, max D, max packets)`.
pub const COMMON_DEADLINE_SHAPES: [(usize, Step, usize); 4] = [(1, 6, 6), (2, 4, 5), (2, 6, 4), (3, 3, 5)];

/// All common-deadline instances with `m` buffers of capacity `1..=max_cap`,
/// deadline `1..=max_d` and at most `max_n` packets. Values are 1.
pub fn common_deadline_exhaustive(m: usize, max_d: Step, max_n: usize, max_cap: usize) -> Vec<Instance> {
    let caps = capacity_vectors(m, max_cap);
    let mut out = Vec::new();
    for d in 1..=max_d {
        let kinds: Vec<(Step, usize)> = (0..d).flat_map(|r| (0..m).map(move |b| (r, b))).collect();
        for set in multisets(kinds.len(), max_n) {
            let packets: Vec<Packet<u64>> = set
                .iter()
                .enumerate()
                .map(|(id, &k)| Packet::new(id, kinds[k].0, d, 1, kinds[k].1))
                .collect();
            for cap in &caps {
                out.push(Instance::new(cap.clone(), packets.clone()));
            }
        }
    }
    out
}
