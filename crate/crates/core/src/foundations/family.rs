use std::collections::{BTreeMap, BTreeSet};

use super::event::Event;
use crate::error::{Error, Result};

/// A finite family of nonempty events over a space of `size` states.
///
/// Members are kept in canonical (bit-pattern) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    size: usize,
    members: BTreeSet<Event>,
}

impl SetFamily {
    pub fn new<I: IntoIterator<Item = Event>>(size: usize, members: I) -> Result<Self> {
        let full = Event::full(size);
        let mut set = BTreeSet::new();
        for m in members {
            if m.is_empty() {
                return Err(Error::EmptyMember);
            }
            if !m.is_subset(full) {
                return Err(Error::OutOfRange {
                    index: m.max_state().unwrap_or(0),
                    size,
                });
            }
            set.insert(m);
        }
        Ok(SetFamily { size, members: set })
    }

    pub fn empty(size: usize) -> Self {
        SetFamily {
            size,
            members: BTreeSet::new(),
        }
    }

    /// `2^Ω ∖ {∅}`.
    pub fn power_set(size: usize) -> Self {
        let members = Event::full(size)
            .subsets()
            .filter(|e| !e.is_empty())
            .collect();
        SetFamily { size, members }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn full(&self) -> Event {
        Event::full(self.size)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: Event) -> bool {
        self.members.contains(&e)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Event> + ExactSizeIterator + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> &BTreeSet<Event> {
        &self.members
    }

    pub fn is_subfamily(&self, other: &SetFamily) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Smallest superfamily closed under pairwise unions and nonempty
    /// pairwise intersections.
    pub fn close(&self) -> SetFamily {
        let mut members = self.members.clone();
        let mut work: Vec<Event> = members.iter().copied().collect();
        while let Some(x) = work.pop() {
            let snapshot: Vec<Event> = members.iter().copied().collect();
            for y in snapshot {
                let u = x.union(y);
                if members.insert(u) {
                    work.push(u);
                }
                let i = x.intersection(y);
                if !i.is_empty() && members.insert(i) {
                    work.push(i);
                }
            }
        }
        SetFamily {
            size: self.size,
            members,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.first_closure_gap().is_none()
    }

    /// A pair whose union or nonempty intersection is missing, if any.
    pub fn first_closure_gap(&self) -> Option<(Event, Event, Event)> {
        for x in self.iter() {
            for y in self.members.range(x..).copied() {
                let u = x.union(y);
                if !self.contains(u) {
                    return Some((x, y, u));
                }
                let i = x.intersection(y);
                if !i.is_empty() && !self.contains(i) {
                    return Some((x, y, i));
                }
            }
        }
        None
    }

    /// Union of all members equals the whole space.
    pub fn covers(&self) -> bool {
        !self.members.is_empty() && self.iter().fold(Event::EMPTY, Event::union) == self.full()
    }

    /// Intersection of all members containing `state`.
    ///
    /// For a covering, intersection-closed family this is the smallest member
    /// containing the state.
    pub fn atom_of(&self, state: usize) -> Result<Event> {
        self.iter()
            .filter(|g| g.contains(state))
            .reduce(Event::intersection)
            .ok_or(Error::NotCovering(state))
    }

    /// Atom of every state, indexed by state.
    pub fn atom_table(&self) -> Result<Vec<Event>> {
        (0..self.size).map(|s| self.atom_of(s)).collect()
    }

    /// Events present in both families.
    pub fn meet(&self, other: &SetFamily) -> Result<SetFamily> {
        if self.size != other.size {
            return Err(Error::SpaceMismatch);
        }
        Ok(SetFamily {
            size: self.size,
            members: self.members.intersection(&other.members).copied().collect(),
        })
    }

    /// Atoms of the finite algebra generated by the family: classes of states
    /// with identical membership signatures. Blocks are listed in order of
    /// their lowest state.
    pub fn algebra_atoms(&self) -> Vec<Event> {
        let mut classes: BTreeMap<Vec<bool>, Event> = BTreeMap::new();
        let mut order: Vec<Vec<bool>> = Vec::new();
        for s in 0..self.size {
            let sig: Vec<bool> = self.iter().map(|g| g.contains(s)).collect();
            let slot = classes.entry(sig.clone()).or_insert_with(|| {
                order.push(sig);
                Event::EMPTY
            });
            *slot = slot.with(s);
        }
        order.into_iter().map(|sig| classes[&sig]).collect()
    }

    /// The distinct atoms `{m(ω) : ω ∈ g}`, sorted by cardinality then bit
    /// pattern. Any proper sub-atom therefore precedes its super-atom.
    pub fn atoms_in(&self, g: Event) -> Result<Vec<Event>> {
        if !self.contains(g) {
            return Err(Error::NotMember(g));
        }
        let mut atoms = BTreeSet::new();
        for s in g.states() {
            atoms.insert(self.atom_of(s)?);
        }
        let mut atoms: Vec<Event> = atoms.into_iter().collect();
        atoms.sort_by_key(|a| (a.len(), *a));
        Ok(atoms)
    }

    /// `ω ∈ e` implies `m(ω) ⊆ e`.
    pub fn is_saturated(&self, e: Event) -> Result<bool> {
        for s in e.states() {
            if !self.atom_of(s)?.is_subset(e) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reports why the family fails the standing closure and covering
    /// assumptions, if it does.
    pub fn structure_problem(&self) -> Option<String> {
        if !self.covers() {
            let union = self.iter().fold(Event::EMPTY, Event::union);
            let missing = self.full().difference(union);
            return Some(format!(
                "family does not cover the state space; uncovered states {missing:?}"
            ));
        }
        self.first_closure_gap().map(|(x, y, z)| {
            format!("family not closed under unions and nonempty intersections: {x:?} and {y:?} yield {z:?}")
        })
    }
}
