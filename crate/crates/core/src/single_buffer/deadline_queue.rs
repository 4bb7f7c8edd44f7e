//! Deadline-ordered packet buffer with an O(log size) tightness query.
//!
//! Entries live in a treap keyed by `(deadline, id)`. Every node also keeps,
//! for its subtree, the minimum over entries `e` of `deadline_e - rank_e`
//! (rank is the 1-based position inside the subtree). At the root this is the
//! smallest slack between a deadline and the number of entries that must be
//! sent no later than it, so the queue is tight at time `now` iff that
//! minimum is below `now`.

use crate::model::{PacketId, Step};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    deadline: Step,
    id: PacketId,
    prio: u64,
    left: u32,
    right: u32,
    size: u32,
    min_gap: i64,
}

impl Node {
    fn key(&self) -> (Step, PacketId) {
        (self.deadline, self.id)
    }
}

/// Ordered multiset of pending packets keyed by deadline, capacity `B`.
#[derive(Debug, Clone)]
pub struct DeadlineQueue {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    capacity: usize,
    seed: u64,
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl DeadlineQueue {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "buffer capacity must be positive");
        DeadlineQueue {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            capacity,
            seed: 0x5eed,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    /// True iff more than `t' - now` entries have deadline `<= t'` for some `t'`.
    pub fn is_tight(&self, now: Step) -> bool {
        self.root != NIL && self.nodes[self.root as usize].min_gap < now as i64
    }

    /// Inserts `(deadline, id)`, then evicts the earliest-deadline entry
    /// (largest id among equal deadlines) while the queue is over capacity or
    /// tight. Returns the evicted ids in eviction order.
    pub fn insert(&mut self, deadline: Step, id: PacketId, now: Step) -> Vec<PacketId> {
        let node = self.alloc(deadline, id);
        let (l, r) = self.split(self.root, (deadline, id));
        let l = self.merge(l, node);
        self.root = self.merge(l, r);

        let mut evicted = Vec::new();
        while self.len() > self.capacity || self.is_tight(now) {
            match self.evict_earliest() {
                Some(id) => evicted.push(id),
                None => break,
            }
        }
        evicted
    }

    /// Earliest-deadline entry, smallest id among ties.
    pub fn peek_earliest(&self) -> Option<(Step, PacketId)> {
        let first = self.leftmost(self.root)?;
        Some(self.nodes[first as usize].key())
    }

    /// Removes and returns the earliest-deadline entry (smallest id among ties).
    pub fn pop_earliest(&mut self, now: Step) -> Option<PacketId> {
        let (deadline, id) = self.peek_earliest()?;
        debug_assert!(deadline > now, "resident packet {id} expired at {now}");
        self.remove((deadline, id));
        Some(id)
    }

    /// Entries in `(deadline, id)` order.
    pub fn entries(&self) -> Vec<(Step, PacketId)> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur as usize].left;
            }
            let n = stack.pop().unwrap();
            out.push(self.nodes[n as usize].key());
            cur = self.nodes[n as usize].right;
        }
        out
    }

    fn evict_earliest(&mut self) -> Option<PacketId> {
        let (d0, _) = self.peek_earliest()?;
        // everything left of (d0 + 1, 0) shares deadline d0
        let (l, r) = self.split(self.root, (d0 + 1, 0));
        let last = self.rightmost(l).expect("non-empty prefix");
        let key = self.nodes[last as usize].key();
        let (l1, single) = self.split(l, key);
        debug_assert_eq!(self.size(single), 1);
        self.release(single);
        self.root = self.merge(l1, r);
        Some(key.1)
    }

    fn remove(&mut self, key: (Step, PacketId)) {
        let (l, r) = self.split(self.root, key);
        let (mid, r) = self.split(r, (key.0, key.1 + 1));
        debug_assert_eq!(self.size(mid), 1);
        self.release(mid);
        self.root = self.merge(l, r);
    }

    fn alloc(&mut self, deadline: Step, id: PacketId) -> u32 {
        let prio = splitmix(&mut self.seed);
        let node = Node {
            deadline,
            id,
            prio,
            left: NIL,
            right: NIL,
            size: 1,
            min_gap: deadline as i64 - 1,
        };
        match self.free.pop() {
            Some(slot) => {
                self.nodes[slot as usize] = node;
                slot
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    fn release(&mut self, node: u32) {
        if node != NIL {
            self.free.push(node);
        }
    }

    fn size(&self, node: u32) -> u32 {
        if node == NIL {
            0
        } else {
            self.nodes[node as usize].size
        }
    }

    fn update(&mut self, node: u32) {
        let (left, right, deadline) = {
            let n = &self.nodes[node as usize];
            (n.left, n.right, n.deadline)
        };
        let ls = self.size(left);
        let rs = self.size(right);
        let here = ls as i64 + 1;
        let mut gap = deadline as i64 - here;
        if left != NIL {
            gap = gap.min(self.nodes[left as usize].min_gap);
        }
        if right != NIL {
            gap = gap.min(self.nodes[right as usize].min_gap - here);
        }
        let n = &mut self.nodes[node as usize];
        n.size = ls + 1 + rs;
        n.min_gap = gap;
    }

    /// Splits into keys `< key` and keys `>= key`.
    fn split(&mut self, node: u32, key: (Step, PacketId)) -> (u32, u32) {
        if node == NIL {
            return (NIL, NIL);
        }
        if self.nodes[node as usize].key() < key {
            let right = self.nodes[node as usize].right;
            let (l, r) = self.split(right, key);
            self.nodes[node as usize].right = l;
            self.update(node);
            (node, r)
        } else {
            let left = self.nodes[node as usize].left;
            let (l, r) = self.split(left, key);
            self.nodes[node as usize].left = r;
            self.update(node);
            (l, node)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let right = self.nodes[a as usize].right;
            let merged = self.merge(right, b);
            self.nodes[a as usize].right = merged;
            self.update(a);
            a
        } else {
            let left = self.nodes[b as usize].left;
            let merged = self.merge(a, left);
            self.nodes[b as usize].left = merged;
            self.update(b);
            b
        }
    }

    fn leftmost(&self, mut node: u32) -> Option<u32> {
        if node == NIL {
            return None;
        }
        while self.nodes[node as usize].left != NIL {
            node = self.nodes[node as usize].left;
        }
        Some(node)
    }

    fn rightmost(&self, mut node: u32) -> Option<u32> {
        if node == NIL {
            return None;
        }
        while self.nodes[node as usize].right != NIL {
            node = self.nodes[node as usize].right;
        }
        Some(node)
    }
}
