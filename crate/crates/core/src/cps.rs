//! Conditional probability spaces over a finite state space.
//!
//! A [`Cps`] pairs a conditioning family (closed under unions and nonempty
//! intersections, covering the space) with one probability measure per
//! member. Construction checks the family structure; the measure conditions
//! (concentration and the chain rule) are reported by [`Cps::validate`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::foundations::{format_rational, Event, Rational, SetFamily, StateSpace};

/// Weights on states; absent states carry weight zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProbMeasure {
    weights: Vec<Rational>,
    support: Event,
    normalized: bool,
}

impl ProbMeasure {
    pub fn new(size: usize, weights: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        let mut w = vec![Rational::zero(); size];
        for (s, r) in weights {
            if s >= size {
                return Err(Error::OutOfRange { index: s, size });
            }
            w[s] += r;
        }
        Ok(Self::from_weights(w))
    }

    pub fn from_weights(weights: Vec<Rational>) -> Self {
        let support = Event::from_states(
            weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(i, _)| i),
        );
        let total: Rational = weights.iter().sum();
        let normalized = total.is_one() && weights.iter().all(|w| !w.is_negative());
        ProbMeasure {
            weights,
            support,
            normalized,
        }
    }

    /// Point mass on `state`.
    pub fn dirac(size: usize, state: usize) -> Self {
        let mut w = vec![Rational::zero(); size];
        w[state] = Rational::one();
        Self::from_weights(w)
    }

    /// Uniform on the states of `event`, which must be nonempty.
    pub fn uniform(size: usize, event: Event) -> Self {
        let share = Rational::new(1.into(), (event.len() as i64).into());
        let mut w = vec![Rational::zero(); size];
        for s in event.states() {
            w[s] = share.clone();
        }
        Self::from_weights(w)
    }

    /// Rescales positive total mass to one.
    pub fn normalized(self) -> Self {
        let total = self.total();
        if total.is_zero() || total.is_one() {
            return self;
        }
        Self::from_weights(self.weights.into_iter().map(|w| w / &total).collect())
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, state: usize) -> &Rational {
        &self.weights[state]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// States with nonzero weight.
    pub fn support(&self) -> Event {
        self.support
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    /// Nonnegative with total mass one.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn prob(&self, e: Event) -> Rational {
        e.intersection(self.support)
            .states()
            .map(|s| &self.weights[s])
            .sum()
    }

    /// Exact test for `prob(e) == 1`.
    pub fn is_certain(&self, e: Event) -> bool {
        if self.normalized {
            self.support.is_subset(e)
        } else {
            self.prob(e).is_one()
        }
    }
}

impl fmt::Debug for ProbMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.support
                    .states()
                    .map(|s| (s, format_rational(&self.weights[s]))),
            )
            .finish()
    }
}

/// A failed measure condition, with the witnessing events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NegativeWeight {
        given: Event,
        state: usize,
        weight: Rational,
    },
    NotNormalized {
        given: Event,
        total: Rational,
    },
    /// `p_G(G) != 1`.
    Concentration {
        given: Event,
        mass: Rational,
    },
    /// `p_G(E) != p_G(F) p_F(E)` for `E ⊆ F ⊆ G`.
    ChainRule {
        event: Event,
        inner: Event,
        outer: Event,
        lhs: Rational,
        rhs: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeWeight {
                given,
                state,
                weight,
            } => write!(
                f,
                "probability measure p_G for G={given:?} has negative weight {} on state {state}",
                format_rational(weight)
            ),
            Violation::NotNormalized { given, total } => write!(
                f,
                "probability measure p_G for G={given:?} has total mass {}, not 1",
                format_rational(total)
            ),
            Violation::Concentration { given, mass } => write!(
                f,
                "concentration p_G(G) = 1 fails at G={given:?}: p_G(G) = {}",
                format_rational(mass)
            ),
            Violation::ChainRule {
                event,
                inner,
                outer,
                lhs,
                rhs,
            } => write!(
                f,
                "chain rule p_G(E) = p_G(F)·p_F(E) fails at (E,F,G)=({event:?},{inner:?},{outer:?}): {} != {}",
                format_rational(lhs),
                format_rational(rhs)
            ),
        }
    }
}

/// Every measure-condition failure found; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A family of conditioning events with one measure per member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cps {
    space: StateSpace,
    family: SetFamily,
    measures: BTreeMap<Event, ProbMeasure>,
    atoms: Vec<Event>,
}

impl Cps {
    /// Checks the family structure and that every member carries exactly one
    /// measure. Measure conditions are left to [`Cps::validate`].
    pub fn new<I>(space: StateSpace, family: SetFamily, measures: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Event, ProbMeasure)>,
    {
        if family.size() != space.size() {
            return Err(Error::SpaceMismatch);
        }
        if let Some(problem) = family.structure_problem() {
            return Err(Error::Structure(problem));
        }
        let mut map = BTreeMap::new();
        for (g, p) in measures {
            if !family.contains(g) {
                return Err(Error::NotMember(g));
            }
            if p.size() != space.size() {
                return Err(Error::SpaceMismatch);
            }
            if map.insert(g, p).is_some() {
                return Err(Error::Structure(format!("two measures given for {g:?}")));
            }
        }
        if let Some(g) = family.iter().find(|g| !map.contains_key(g)) {
            return Err(Error::Structure(format!("no measure given for {g:?}")));
        }
        let atoms = family.atom_table()?;
        Ok(Cps {
            space,
            family,
            measures: map,
            atoms,
        })
    }

    /// [`Cps::new`] followed by [`Cps::validate`].
    pub fn new_valid<I>(space: StateSpace, family: SetFamily, measures: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Event, ProbMeasure)>,
    {
        let cps = Self::new(space, family, measures)?;
        cps.ensure_valid()?;
        Ok(cps)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidCps(report))
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn measures(&self) -> &BTreeMap<Event, ProbMeasure> {
        &self.measures
    }

    pub fn measure(&self, g: Event) -> Result<&ProbMeasure> {
        self.measures.get(&g).ok_or(Error::NotMember(g))
    }

    /// `m(ω)`, the smallest conditioning event containing `state`.
    pub fn atom(&self, state: usize) -> Event {
        self.atoms[state]
    }

    pub fn atoms(&self) -> &[Event] {
        &self.atoms
    }

    /// Distinct atoms in canonical order.
    pub fn distinct_atoms(&self) -> Vec<Event> {
        let mut a = self.atoms.clone();
        a.sort();
        a.dedup();
        a
    }

    pub fn atom_measure(&self, state: usize) -> &ProbMeasure {
        &self.measures[&self.atoms[state]]
    }

    pub fn same_space(&self, other: &Cps) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Concentration and chain rule. The chain rule is checked on singleton
    /// events only; both sides are additive in the event, so this covers all
    /// `E ⊆ F`.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (&g, p) in &self.measures {
            for (s, w) in p.weights().iter().enumerate() {
                if w.is_negative() {
                    violations.push(Violation::NegativeWeight {
                        given: g,
                        state: s,
                        weight: w.clone(),
                    });
                }
            }
            let total = p.total();
            if !total.is_one() {
                violations.push(Violation::NotNormalized { given: g, total });
            }
            let mass = p.prob(g);
            if !mass.is_one() {
                violations.push(Violation::Concentration { given: g, mass });
            }
        }
        for (&outer, pg) in &self.measures {
            for (&inner, pf) in &self.measures {
                if !inner.is_proper_subset(outer) {
                    continue;
                }
                let scale = pg.prob(inner);
                for s in inner.states() {
                    let lhs = pg.weight(s).clone();
                    let rhs = &scale * pf.weight(s);
                    if lhs != rhs {
                        violations.push(Violation::ChainRule {
                            event: Event::singleton(s),
                            inner,
                            outer,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// `p_G(E)`.
    pub fn prob(&self, g: Event, e: Event) -> Result<Rational> {
        Ok(self.measure(g)?.prob(e))
    }

    /// `p_{m(ω)}(E)`.
    pub fn belief_at(&self, state: usize, e: Event) -> Rational {
        self.atom_measure(state).prob(e)
    }

    /// `p_{m(ω)}(E)` for every state, evaluated once per distinct atom.
    pub fn beliefs(&self, e: Event) -> Vec<Rational> {
        let mut cache: BTreeMap<Event, Rational> = BTreeMap::new();
        self.atoms
            .iter()
            .map(|&m| {
                cache
                    .entry(m)
                    .or_insert_with(|| self.measures[&m].prob(e))
                    .clone()
            })
            .collect()
    }

    /// `C(E) = {ω : p_{m(ω)}(E) = 1}`.
    pub fn certainty_event(&self, e: Event) -> Event {
        Event::from_states((0..self.size()).filter(|&s| self.atom_measure(s).is_certain(e)))
    }

    /// `K(E) = {ω : m(ω) ⊆ E}`.
    pub fn knowledge_event(&self, e: Event) -> Event {
        Event::from_states((0..self.size()).filter(|&s| self.atoms[s].is_subset(e)))
    }

    /// `{ω : p_{m(ω)}(E) = q}`.
    pub fn belief_fiber(&self, e: Event, q: &Rational) -> Event {
        Event::from_states(
            self.beliefs(e)
                .iter()
                .enumerate()
                .filter(|(_, v)| *v == q)
                .map(|(s, _)| s),
        )
    }

    /// Same space, measures on the members of `family` only.
    pub fn restrict(&self, family: &SetFamily) -> Result<Cps> {
        let measures = family
            .iter()
            .map(|g| Ok((g, self.measure(g)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        Cps::new(self.space.clone(), family.clone(), measures)
    }
}
