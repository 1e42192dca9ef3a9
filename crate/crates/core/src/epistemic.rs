//! Common-certainty and common-knowledge fixed points.
//!
//! Both recursions start from the belief fibers
//! `A⁰ = {ω : p^A_{m_A(ω)}(E) = q_A}` and `B⁰` likewise, then shrink
//! `Aⁿ⁺¹ = Aⁿ ∩ Op_A(Bⁿ)`, `Bⁿ⁺¹ = Bⁿ ∩ Op_B(Aⁿ)` with `Op` either the
//! certainty or the knowledge operator, until a level repeats.

use crate::cps::Cps;
use crate::error::Result;
use crate::foundations::{Event, Rational};

/// Which operator drives the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modality {
    Certainty,
    Knowledge,
}

/// All levels `(Aⁿ, Bⁿ)` from `n = 0` through the first repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionTrace {
    pub modality: Modality,
    pub levels: Vec<(Event, Event)>,
    pub limit: Event,
    /// First `n` with `(Aⁿ⁺¹, Bⁿ⁺¹) = (Aⁿ, Bⁿ)`.
    pub stabilized_at: usize,
}

impl RecursionTrace {
    pub fn member_of_limit(&self, state: usize) -> bool {
        self.limit.contains(state)
    }
}

pub fn common_certainty(
    a: &Cps,
    b: &Cps,
    e: Event,
    qa: &Rational,
    qb: &Rational,
) -> Result<RecursionTrace> {
    run(a, b, e, qa, qb, Modality::Certainty)
}

pub fn common_knowledge(
    a: &Cps,
    b: &Cps,
    e: Event,
    qa: &Rational,
    qb: &Rational,
) -> Result<RecursionTrace> {
    run(a, b, e, qa, qb, Modality::Knowledge)
}

pub fn run(
    a: &Cps,
    b: &Cps,
    e: Event,
    qa: &Rational,
    qb: &Rational,
    modality: Modality,
) -> Result<RecursionTrace> {
    a.same_space(b)?;
    let start = (a.belief_fiber(e, qa), b.belief_fiber(e, qb));
    Ok(iterate(a, b, start, modality))
}

/// Runs the recursion from given starting sets.
pub fn iterate(a: &Cps, b: &Cps, start: (Event, Event), modality: Modality) -> RecursionTrace {
    let op = |cps: &Cps, x: Event| match modality {
        Modality::Certainty => cps.certainty_event(x),
        Modality::Knowledge => cps.knowledge_event(x),
    };
    let mut levels = vec![start];
    loop {
        let (an, bn) = *levels.last().expect("nonempty");
        let next = (an.intersection(op(a, bn)), bn.intersection(op(b, an)));
        levels.push(next);
        if next == (an, bn) {
            let stabilized_at = levels.len() - 2;
            return RecursionTrace {
                modality,
                levels,
                limit: an.intersection(bn),
                stabilized_at,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augmentation::extend;
    use crate::fixtures;
    use crate::foundations::{int, rational};

    fn ev(s: &str) -> Event {
        Event::from_states(s.bytes().map(|b| (b - b'a') as usize))
    }

    #[test]
    fn partitional_disagreement_trace() {
        let (a, b) = fixtures::partitional_disagreement();
        let t = common_certainty(&a, &b, ev("b"), &int(1), &int(0)).unwrap();
        assert_eq!(
            t.levels,
            vec![
                (ev("bc"), ev("abcd")),
                (ev("bc"), ev("abc")),
                (ev("bc"), ev("abc")),
            ]
        );
        assert_eq!(t.limit, ev("bc"));
        assert_eq!(t.stabilized_at, 1);
        assert!(t.member_of_limit(1));
        assert!(!t.member_of_limit(0));
    }

    #[test]
    fn nonpartitional_agreement_limit() {
        let (a, b) = fixtures::nonpartitional_agreement();
        let half = rational(1, 2);
        let t = common_certainty(&a, &b, ev("a"), &half, &half).unwrap();
        assert_eq!(t.levels[0], (ev("ab"), ev("ab")));
        assert_eq!(t.limit, ev("ab"));
    }

    #[test]
    fn augmented_partitional_disagreement_has_empty_limit() {
        let (a, b) = fixtures::partitional_disagreement();
        let (ha, hb) = (
            extend(&a).unwrap().extended_cps,
            extend(&b).unwrap().extended_cps,
        );
        let t = common_certainty(&ha, &hb, ev("b"), &int(1), &int(0)).unwrap();
        assert_eq!(t.levels[0], (ev("b"), ev("acd")));
        assert_eq!(t.levels[1], (Event::EMPTY, Event::EMPTY));
        assert_eq!(t.limit, Event::EMPTY);
        assert!(!t.member_of_limit(1));
    }

    #[test]
    fn partitional_disagreement_knowledge_limit_is_empty() {
        // K_B({b,c}) = ∅ because neither B-atom meeting {b,c} lies inside it
        let (a, b) = fixtures::partitional_disagreement();
        let t = common_knowledge(&a, &b, ev("b"), &int(1), &int(0)).unwrap();
        assert_eq!(
            t.levels,
            vec![
                (ev("bc"), ev("abcd")),
                (ev("bc"), Event::EMPTY),
                (Event::EMPTY, Event::EMPTY),
                (Event::EMPTY, Event::EMPTY),
            ]
        );
        assert_eq!(t.limit, Event::EMPTY);
        let c = common_certainty(&a, &b, ev("b"), &int(1), &int(0)).unwrap();
        assert!(t.limit.is_proper_subset(c.limit));
    }

    #[test]
    fn everything_is_common_knowledge_of_omega() {
        let (a, b) = fixtures::partitional_disagreement();
        let t = common_knowledge(&a, &b, ev("abcd"), &int(1), &int(1)).unwrap();
        assert_eq!(t.limit, ev("abcd"));
    }

    #[test]
    fn certain_not_known_fixture_limits() {
        // Both fibers start at Ω, which is known everywhere, so the recursions
        // agree here even though K({a}) ⊊ C({a}) one level down.
        let c = fixtures::certain_not_known();
        let k = common_knowledge(&c, &c, ev("a"), &int(1), &int(1)).unwrap();
        let cc = common_certainty(&c, &c, ev("a"), &int(1), &int(1)).unwrap();
        assert_eq!(cc.limit, ev("ab"));
        assert_eq!(k.limit, ev("ab"));
        assert_ne!(c.knowledge_event(ev("a")), c.certainty_event(ev("a")));
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let (a, _) = fixtures::partitional_disagreement();
        let c = fixtures::certain_not_known();
        assert!(common_certainty(&a, &c, ev("a"), &int(1), &int(1)).is_err());
    }
}
