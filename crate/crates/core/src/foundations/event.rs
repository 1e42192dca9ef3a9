use std::fmt;

/// Largest state space an [`Event`] can address.
pub const MAX_STATES: usize = 64;

/// A subset of state indices, stored as a bit set.
///
/// Bit `i` is set iff state `i` belongs to the event. Ordering is by the
/// numeric value of the bit pattern, which gives canonical family listings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Event(u64);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub const fn from_bits(bits: u64) -> Self {
        Event(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All states `0..size`.
    pub fn full(size: usize) -> Self {
        debug_assert!(size <= MAX_STATES);
        if size >= MAX_STATES {
            Event(u64::MAX)
        } else {
            Event((1u64 << size) - 1)
        }
    }

    pub fn singleton(state: usize) -> Self {
        debug_assert!(state < MAX_STATES);
        Event(1u64 << state)
    }

    pub fn from_states<I: IntoIterator<Item = usize>>(states: I) -> Self {
        states.into_iter().fold(Event::EMPTY, |e, s| e.with(s))
    }

    pub fn with(self, state: usize) -> Self {
        Event(self.0 | (1u64 << state))
    }

    pub fn contains(self, state: usize) -> bool {
        state < MAX_STATES && self.0 >> state & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn difference(self, other: Event) -> Event {
        Event(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Event) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn meets(self, other: Event) -> bool {
        self.0 & other.0 != 0
    }

    /// Highest state index referenced, if any.
    pub fn max_state(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Member states in ascending index order.
    pub fn states(self) -> States {
        States(self.0)
    }

    /// Every subset of `self`, including the empty set and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.states()).finish()
    }
}

pub struct States(u64);

impl Iterator for States {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for States {}

/// Submask enumeration in increasing numeric order.
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            // next submask above cur
            Some((cur | !self.mask).wrapping_add(1) & self.mask)
        };
        Some(Event(cur))
    }
}
