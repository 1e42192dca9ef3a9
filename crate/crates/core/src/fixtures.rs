//! The worked two-agent instances used throughout the tests, the CLI golden
//! files, and the counterexample search canary.

use crate::cps::{Cps, ProbMeasure};
use crate::foundations::{rational, Event, Rational, SetFamily, StateSpace};

fn abcd() -> StateSpace {
    StateSpace::new(["a", "b", "c", "d"]).expect("static labels")
}

fn ev(space: &StateSpace, labels: &str) -> Event {
    space
        .event(labels.split_whitespace())
        .expect("static labels")
}

fn agent(space: &StateSpace, members: &[(&str, &[(&str, Rational)])]) -> Cps {
    let family = SetFamily::new(space.size(), members.iter().map(|(g, _)| ev(space, g)))
        .expect("static family");
    let measures = members.iter().map(|(g, w)| {
        let weights = w
            .iter()
            .map(|(s, r)| (space.index_of(s).expect("static label"), r.clone()));
        (
            ev(space, g),
            ProbMeasure::new(space.size(), weights).expect("static measure"),
        )
    });
    Cps::new(space.clone(), family, measures).expect("static instance")
}

fn one() -> Rational {
    rational(1, 1)
}

fn half() -> Rational {
    rational(1, 2)
}

/// Partitional agents with a common `p_Ω = δ_d` whose certainty judgments
/// are sharper than their information; they have common certainty of
/// disagreement about `{b}` at `b` and `c`.
pub fn partitional_disagreement() -> (Cps, Cps) {
    let s = abcd();
    let a = agent(
        &s,
        &[
            ("a d", &[("d", one())]),
            ("b c", &[("b", one())]),
            ("a b c d", &[("d", one())]),
        ],
    );
    let b = agent(
        &s,
        &[
            ("a b c", &[("c", one())]),
            ("d", &[("d", one())]),
            ("a b c d", &[("d", one())]),
        ],
    );
    (a, b)
}

/// Non-partitional agents without a common prior that agree on `{a}` at
/// one half. Measures not stated explicitly are the ones forced by the chain
/// rule from `p_Ω` and `p_{c,d}`.
pub fn nonpartitional_agreement() -> (Cps, Cps) {
    let s = abcd();
    let a = agent(
        &s,
        &[
            ("a b", &[("a", half()), ("b", half())]),
            ("c", &[("c", one())]),
            ("d", &[("d", one())]),
            ("c d", &[("c", half()), ("d", half())]),
            ("a b c", &[("a", half()), ("b", half())]),
            ("a b d", &[("a", half()), ("b", half())]),
            ("a b c d", &[("a", half()), ("b", half())]),
        ],
    );
    let b = agent(
        &s,
        &[
            ("c d", &[("c", half()), ("d", half())]),
            ("a b", &[("a", half()), ("b", half())]),
            ("a b c d", &[("c", half()), ("d", half())]),
        ],
    );
    (a, b)
}

/// `Ω = {a,b}`, `𝒢 = {{a}, Ω}`, `p_Ω = δ_a`: at `b` the agent is certain of
/// `{a}` without knowing it.
pub fn certain_not_known() -> Cps {
    let s = StateSpace::new(["a", "b"]).expect("static labels");
    agent(&s, &[("a", &[("a", one())]), ("a b", &[("a", one())])])
}
