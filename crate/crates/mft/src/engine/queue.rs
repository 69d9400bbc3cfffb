use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum EventKind {
    Pair { a: usize, va: u64, b: usize, vb: u64 },
    Collapse { slot: usize, version: u64 },
    Revert { group: u64 },
}

/// Queue entry ordered by time, then position (leftmost first), then
/// insertion order, so replays are deterministic.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Event {
    pub t: f64,
    pub x: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then(self.x.total_cmp(&other.x))
            .then(self.seq.cmp(&other.seq))
    }
}
