use std::collections::HashSet;

use super::event::{Event, MAX_STATES};
use crate::error::{Error, Result};

/// A finite, ordered set of labelled states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    names: Vec<String>,
}

impl StateSpace {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptySpace);
        }
        if names.len() > MAX_STATES {
            return Err(Error::SpaceTooLarge {
                got: names.len(),
                max: MAX_STATES,
            });
        }
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() || !seen.insert(n.as_str()) {
                return Err(Error::BadLabel(n.clone()));
            }
        }
        Ok(StateSpace { names })
    }

    /// States labelled `s0, s1, ...`.
    pub fn indexed(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| format!("s{i}")))
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    pub fn full(&self) -> Event {
        Event::full(self.size())
    }

    /// Builds an event from labels, failing on the first unknown one.
    pub fn event<'a, I>(&self, labels: I) -> std::result::Result<Event, String>
    where
        I: IntoIterator<Item = &'a str>,
    {
        labels.into_iter().try_fold(Event::EMPTY, |e, l| {
            self.index_of(l)
                .map(|i| e.with(i))
                .ok_or_else(|| l.to_string())
        })
    }

    pub fn labels(&self, event: Event) -> Vec<&str> {
        event.states().map(|i| self.name(i)).collect()
    }

    /// `{a,b}` style rendering.
    pub fn format(&self, event: Event) -> String {
        format!("{{{}}}", self.labels(event).join(","))
    }

    pub fn check(&self, event: Event) -> Result<()> {
        match event.max_state() {
            Some(i) if i >= self.size() => Err(Error::OutOfRange {
                index: i,
                size: self.size(),
            }),
            _ => Ok(()),
        }
    }
}
