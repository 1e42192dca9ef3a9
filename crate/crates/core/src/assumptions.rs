//! Checkers for the three agreement hypotheses: certainty reflection,
//! 1-closedness and local consistency. Every failed check carries a witness
//! that can be re-verified against the definition.

use std::collections::BTreeSet;

use num_traits::One;

use crate::cps::{Cps, ProbMeasure};
use crate::error::{Error, Result};
use crate::foundations::{Event, Rational, SetFamily};

/// Largest space on which the direct reflection check runs without `force`.
pub const REFLECTION_DIRECT_CAP: usize = 16;

/// `ℰ = {E : E ⊆ G, p_G(E) = 1 for some G ∈ 𝒢}`.
///
/// Within `G`, `p_G(E) = 1` exactly when `E ⊇ supp(p_G)`, so each member
/// contributes the interval between its support and itself.
pub fn certain_events(cps: &Cps) -> SetFamily {
    let mut out = BTreeSet::new();
    for (&g, p) in cps.measures() {
        for_each_certain_subevent(g, p, |e| {
            out.insert(e);
            true
        });
    }
    SetFamily::new(cps.size(), out).expect("certain events are nonempty subsets of the space")
}

/// Calls `f` on every nonempty `E ⊆ g` with `p(E) = 1` until it returns false.
fn for_each_certain_subevent(g: Event, p: &ProbMeasure, mut f: impl FnMut(Event) -> bool) {
    let support = p.support();
    if p.is_normalized() && support.is_subset(g) {
        for extra in g.difference(support).subsets() {
            if !f(support.union(extra)) {
                return;
            }
        }
    } else {
        for e in g.subsets().filter(|e| !e.is_empty()) {
            if p.prob(e).is_one() && !f(e) {
                return;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneClosedCheck {
    pub holds: bool,
    /// `(E, G)` with `p_G(E) = 1`, `E ⊆ G`, `E ∉ 𝒢`.
    pub witness: Option<(Event, Event)>,
}

pub fn check_one_closed(cps: &Cps) -> OneClosedCheck {
    let family = cps.family();
    let mut witness = None;
    for (&g, p) in cps.measures() {
        for_each_certain_subevent(g, p, |e| {
            if family.contains(e) {
                true
            } else {
                witness = Some((e, g));
                false
            }
        });
        if witness.is_some() {
            break;
        }
    }
    OneClosedCheck {
        holds: witness.is_none(),
        witness,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReflectionChecker {
    /// Scan of every event and every atom.
    Direct,
    /// Nested-atom characterization, valid under 1-closedness.
    AtomCharacterization,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReflectionWitness {
    /// `p_{m(ω)}(E) = belief`, yet the fiber of that belief has mass below one.
    Direct {
        event: Event,
        state: usize,
        belief: Rational,
        fiber: Event,
        fiber_mass: Rational,
    },
    /// `inner ⊊ m(ω)` is an atom but `p_{m(ω)}(inner) != 1`.
    NestedAtom {
        inner: Event,
        state: usize,
        mass: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionCheck {
    pub holds: bool,
    pub witness: Option<ReflectionWitness>,
    pub checker: ReflectionChecker,
}

/// Certainty reflection straight from the definition, over all `2^|Ω|`
/// events.
pub fn check_reflection_direct(cps: &Cps, force: bool) -> Result<ReflectionCheck> {
    let n = cps.size();
    if n > REFLECTION_DIRECT_CAP && !force {
        return Err(Error::TooLarge {
            size: n,
            cap: REFLECTION_DIRECT_CAP,
        });
    }
    let reps = atom_representatives(cps);
    for e in Event::full(n).subsets() {
        let beliefs = cps.beliefs(e);
        for &state in &reps {
            let q = &beliefs[state];
            let fiber = Event::from_states((0..n).filter(|&s| &beliefs[s] == q));
            let m = cps.atom_measure(state);
            if !m.is_certain(fiber) {
                return Ok(ReflectionCheck {
                    holds: false,
                    witness: Some(ReflectionWitness::Direct {
                        event: e,
                        state,
                        belief: q.clone(),
                        fiber,
                        fiber_mass: m.prob(fiber),
                    }),
                    checker: ReflectionChecker::Direct,
                });
            }
        }
    }
    Ok(ReflectionCheck {
        holds: true,
        witness: None,
        checker: ReflectionChecker::Direct,
    })
}

/// Under 1-closedness, reflection holds iff every atom strictly inside
/// `m(ω)` has `p_{m(ω)}`-probability one.
pub fn check_reflection_atoms(cps: &Cps) -> Result<ReflectionCheck> {
    if let Some((e, _)) = check_one_closed(cps).witness {
        return Err(Error::NotOneClosed(e));
    }
    let atoms = cps.distinct_atoms();
    for state in atom_representatives(cps) {
        let outer = cps.atom(state);
        let p = cps.atom_measure(state);
        for &inner in atoms.iter().filter(|m| m.is_proper_subset(outer)) {
            if !p.is_certain(inner) {
                return Ok(ReflectionCheck {
                    holds: false,
                    witness: Some(ReflectionWitness::NestedAtom {
                        inner,
                        state,
                        mass: p.prob(inner),
                    }),
                    checker: ReflectionChecker::AtomCharacterization,
                });
            }
        }
    }
    Ok(ReflectionCheck {
        holds: true,
        witness: None,
        checker: ReflectionChecker::AtomCharacterization,
    })
}

/// Lowest state of each distinct atom.
fn atom_representatives(cps: &Cps) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    (0..cps.size())
        .filter(|&s| seen.insert(cps.atom(s)))
        .collect()
}

/// Local consistency at one state: the two agents' measures on the atom of
/// the meet family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyCheck {
    pub state: usize,
    pub meet_atom: Event,
    pub holds: bool,
    /// A state where the two measures on `meet_atom` differ.
    pub differing_state: Option<usize>,
    pub measure_a: ProbMeasure,
    pub measure_b: ProbMeasure,
}

pub fn check_local_consistency(a: &Cps, b: &Cps, state: usize) -> Result<ConsistencyCheck> {
    a.same_space(b)?;
    let meet = a.family().meet(b.family())?;
    consistency_with_meet(a, b, &meet, state)
}

/// Local consistency at every state, computing the meet once.
pub fn local_consistency_all(a: &Cps, b: &Cps) -> Result<Vec<ConsistencyCheck>> {
    a.same_space(b)?;
    let meet = a.family().meet(b.family())?;
    (0..a.size())
        .map(|s| consistency_with_meet(a, b, &meet, s))
        .collect()
}

fn consistency_with_meet(
    a: &Cps,
    b: &Cps,
    meet: &SetFamily,
    state: usize,
) -> Result<ConsistencyCheck> {
    if state >= a.size() {
        return Err(Error::OutOfRange {
            index: state,
            size: a.size(),
        });
    }
    let atom = meet.atom_of(state)?;
    let pa = a.measure(atom)?;
    let pb = b.measure(atom)?;
    let differing_state = (0..a.size()).find(|&s| pa.weight(s) != pb.weight(s));
    Ok(ConsistencyCheck {
        state,
        meet_atom: atom,
        holds: differing_state.is_none(),
        differing_state,
        measure_a: pa.clone(),
        measure_b: pb.clone(),
    })
}

/// Every event conditioning for both agents on which their measures differ.
///
/// This is a global diagnostic. Local consistency itself only looks at meet
/// atoms, so an instance can be locally consistent everywhere and still show
/// entries here.
pub fn shared_disagreements(a: &Cps, b: &Cps) -> Result<Vec<Event>> {
    a.same_space(b)?;
    let meet = a.family().meet(b.family())?;
    Ok(meet
        .iter()
        .filter(|&g| a.measures()[&g] != b.measures()[&g])
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentAssumptions {
    pub reflection: ReflectionCheck,
    pub one_closed: OneClosedCheck,
}

/// Reflection via the atom characterization when the space is 1-closed,
/// otherwise by direct scan.
pub fn assess_agent(cps: &Cps, force: bool) -> Result<AgentAssumptions> {
    let one_closed = check_one_closed(cps);
    let reflection = if one_closed.holds {
        check_reflection_atoms(cps)?
    } else {
        check_reflection_direct(cps, force)?
    };
    Ok(AgentAssumptions {
        reflection,
        one_closed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssumptionReport {
    pub agent_a: AgentAssumptions,
    pub agent_b: AgentAssumptions,
    pub local_consistency: Vec<ConsistencyCheck>,
}

impl AssumptionReport {
    pub fn consistent_at(&self, state: usize) -> bool {
        self.local_consistency[state].holds
    }
}

pub fn assess(a: &Cps, b: &Cps, force: bool) -> Result<AssumptionReport> {
    Ok(AssumptionReport {
        agent_a: assess_agent(a, force)?,
        agent_b: assess_agent(b, force)?,
        local_consistency: local_consistency_all(a, b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augmentation::extend;
    use crate::fixtures;
    use crate::foundations::{int, rational, StateSpace};

    fn ev(s: &str) -> Event {
        Event::from_states(s.bytes().map(|b| (b - b'a') as usize))
    }

    fn fam(members: &[&str]) -> SetFamily {
        SetFamily::new(4, members.iter().map(|m| ev(m))).unwrap()
    }

    #[test]
    fn certain_events_partitional_disagreement() {
        let (a, b) = fixtures::partitional_disagreement();
        assert_eq!(
            certain_events(&a),
            fam(&["b", "d", "ad", "bc", "bd", "cd", "abd", "acd", "bcd", "abcd"])
        );
        let eb = certain_events(&b);
        assert_eq!(eb.len(), 12);
        assert_eq!(
            eb,
            fam(&["c", "d", "ac", "ad", "bc", "bd", "cd", "abc", "abd", "acd", "bcd", "abcd"])
        );
    }

    #[test]
    fn certain_events_nonpartitional_agreement_agent_a() {
        let (a, _) = fixtures::nonpartitional_agreement();
        assert_eq!(certain_events(&a), *a.family());
    }

    #[test]
    fn certain_events_match_brute_force() {
        let (a, b) = fixtures::partitional_disagreement();
        for cps in [a, b] {
            let mut brute = BTreeSet::new();
            for g in cps.family().iter() {
                for e in g.subsets().filter(|e| !e.is_empty()) {
                    if cps.prob(g, e).unwrap().is_one() {
                        brute.insert(e);
                    }
                }
            }
            assert_eq!(certain_events(&cps).members(), &brute);
            assert!(cps.family().is_subfamily(&certain_events(&cps)));
        }
    }

    #[test]
    fn one_closed_examples() {
        let (a, _) = fixtures::partitional_disagreement();
        let c = check_one_closed(&a);
        assert!(!c.holds);
        assert_eq!(c.witness, Some((ev("b"), ev("bc"))));
        let (a2, b2) = fixtures::nonpartitional_agreement();
        assert!(check_one_closed(&a2).holds);
        // p^B_Ω puts all mass on {c,d}, so {a,c,d} is certain given Ω but is
        // not a conditioning event for B.
        let cb = check_one_closed(&b2);
        assert!(!cb.holds);
        let (e, g) = cb.witness.unwrap();
        assert!(!b2.family().contains(e));
        assert_eq!(b2.prob(g, e).unwrap(), int(1));
        assert_eq!(e, ev("acd"));
    }

    #[test]
    fn power_set_family_is_one_closed() {
        let space = StateSpace::indexed(3).unwrap();
        let fam = SetFamily::power_set(3);
        let measures = fam
            .iter()
            .map(|g| (g, ProbMeasure::dirac(3, g.states().last().unwrap())));
        let cps = Cps::new_valid(space, fam.clone(), measures).unwrap();
        assert!(check_one_closed(&cps).holds);
    }

    #[test]
    fn reflection_examples() {
        let (a, b) = fixtures::partitional_disagreement();
        assert!(check_reflection_direct(&a, false).unwrap().holds);
        assert!(check_reflection_direct(&b, false).unwrap().holds);
        let (a2, b2) = fixtures::nonpartitional_agreement();
        assert!(check_reflection_direct(&a2, false).unwrap().holds);
        assert!(check_reflection_direct(&b2, false).unwrap().holds);
        let r = check_reflection_atoms(&a2).unwrap();
        assert!(r.holds);
        assert_eq!(r.checker, ReflectionChecker::AtomCharacterization);
        assert!(matches!(
            check_reflection_atoms(&a),
            Err(Error::NotOneClosed(_))
        ));
    }

    /// `𝒢 = {{a}, {a,b,c}}` with `p_Ω` uniform: the atom `{a}` sits strictly
    /// inside `m(b) = Ω` but gets probability 1/3.
    fn nested_atom_cps() -> Cps {
        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        let fam = SetFamily::new(3, [ev("a"), ev("abc")]).unwrap();
        Cps::new_valid(
            space,
            fam,
            [
                (ev("a"), ProbMeasure::dirac(3, 0)),
                (ev("abc"), ProbMeasure::uniform(3, ev("abc"))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn nested_atoms_break_reflection() {
        let cps = nested_atom_cps();
        assert!(check_one_closed(&cps).holds);
        let direct = check_reflection_direct(&cps, false).unwrap();
        assert!(!direct.holds);
        let Some(ReflectionWitness::Direct {
            event,
            state,
            belief,
            fiber,
            fiber_mass,
        }) = direct.witness
        else {
            panic!("expected direct witness");
        };
        // re-verify the witness against the definition
        assert_eq!(cps.belief_at(state, event), belief);
        assert_eq!(cps.belief_fiber(event, &belief), fiber);
        assert_ne!(cps.atom_measure(state).prob(fiber), int(1));
        assert_eq!(fiber_mass, cps.atom_measure(state).prob(fiber));

        let atoms = check_reflection_atoms(&cps).unwrap();
        assert!(!atoms.holds);
        assert_eq!(
            atoms.witness,
            Some(ReflectionWitness::NestedAtom {
                inner: ev("a"),
                state: 1,
                mass: rational(1, 3),
            })
        );
    }

    #[test]
    fn reflection_checkers_agree_on_augmented_partitional_disagreement() {
        let (a, b) = fixtures::partitional_disagreement();
        for cps in [a, b] {
            let hat = extend(&cps).unwrap().extended_cps;
            let d = check_reflection_direct(&hat, false).unwrap();
            let t = check_reflection_atoms(&hat).unwrap();
            assert_eq!(d.holds, t.holds);
        }
    }

    #[test]
    fn direct_check_respects_cap() {
        let space = StateSpace::indexed(17).unwrap();
        let fam = SetFamily::new(17, [Event::full(17)]).unwrap();
        let cps = Cps::new(space, fam, [(Event::full(17), ProbMeasure::dirac(17, 0))]).unwrap();
        assert!(matches!(
            check_reflection_direct(&cps, false),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn local_consistency_examples() {
        let (a, b) = fixtures::partitional_disagreement();
        for s in 0..4 {
            let c = check_local_consistency(&a, &b, s).unwrap();
            assert!(c.holds);
            assert_eq!(c.meet_atom, ev("abcd"));
        }
        let (a2, b2) = fixtures::nonpartitional_agreement();
        for s in 0..4 {
            assert!(check_local_consistency(&a2, &b2, s).unwrap().holds);
        }
    }

    #[test]
    fn augmented_partitional_disagreement_consistency_lives_on_meet_atoms() {
        let (a, b) = fixtures::partitional_disagreement();
        let ha = extend(&a).unwrap().extended_cps;
        let hb = extend(&b).unwrap().extended_cps;
        // {b,c} is shared and the agents disagree on it ...
        assert!(shared_disagreements(&ha, &hb).unwrap().contains(&ev("bc")));
        assert_eq!(ha.measure(ev("bc")).unwrap(), &ProbMeasure::dirac(4, 1));
        assert_eq!(hb.measure(ev("bc")).unwrap(), &ProbMeasure::dirac(4, 2));
        // ... but the meet atom of b is {b}, where both put all mass on b.
        let c = check_local_consistency(&ha, &hb, 1).unwrap();
        assert_eq!(c.meet_atom, ev("b"));
        assert!(c.holds);
    }

    #[test]
    fn inconsistency_witness() {
        let (a, _) = fixtures::partitional_disagreement();
        let (a2, _) = fixtures::partitional_disagreement();
        let measures = a2.measures().iter().map(|(&g, p)| {
            if g == ev("abcd") {
                (g, ProbMeasure::uniform(4, ev("d")))
            } else {
                (g, p.clone())
            }
        });
        let same = Cps::new(a2.space().clone(), a2.family().clone(), measures).unwrap();
        assert!(check_local_consistency(&a, &same, 0).unwrap().holds);
        let (_, b) = fixtures::nonpartitional_agreement();
        // the partitional A and non-partitional B share Ω with δ_d versus half on c and d
        let c = check_local_consistency(&a, &b, 0).unwrap();
        assert!(!c.holds);
        assert_eq!(c.differing_state, Some(2));
    }
}
