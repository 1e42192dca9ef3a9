//! Agreement checks: the common-certainty theorem harness, its
//! knowledge-based variant, the atom-averaging check, random instance
//! generation and the counterexample search.

mod generate;
mod search;

pub use generate::{generate_instance, generate_trial, GeneratorConfig, Hypothesis, Lps};
pub use search::{
    search_counterexamples, SearchReport, VerdictCounts, Witness, MAX_STORED_WITNESSES,
};

use std::fmt;

use crate::assumptions::{
    assess_agent, check_local_consistency, AgentAssumptions, ConsistencyCheck,
};
use crate::cps::Cps;
use crate::epistemic::{run, Modality, RecursionTrace};
use crate::error::Result;
use crate::foundations::{Event, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    A,
    B,
}

/// A hypothesis that does not hold for the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Failed {
    Reflection(Agent),
    OneClosed(Agent),
    /// Local consistency at the queried state.
    Consistency,
}

impl fmt::Display for Failed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failed::Reflection(a) => write!(f, "reflection({a:?})"),
            Failed::OneClosed(a) => write!(f, "one_closed({a:?})"),
            Failed::Consistency => write!(f, "consistency"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    AgreementConfirmed,
    HypothesisFailed(Vec<Failed>),
    NotCommonCertainty,
    /// All hypotheses hold, the state is in the limit and the posited
    /// probabilities differ. Never produced by a correct implementation.
    DisagreementUnderHypotheses,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::AgreementConfirmed => write!(f, "AGREEMENT_CONFIRMED"),
            Verdict::HypothesisFailed(list) => {
                write!(f, "HYPOTHESIS_FAILED(")?;
                for (i, h) in list.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{h}")?;
                }
                write!(f, ")")
            }
            Verdict::NotCommonCertainty => write!(f, "NOT_COMMON_CERTAINTY"),
            Verdict::DisagreementUnderHypotheses => write!(f, "DISAGREEMENT_UNDER_HYPOTHESES"),
        }
    }
}

/// Precedence: outside the limit, then failed hypotheses, then the
/// comparison of the posited values.
pub fn classify(in_limit: bool, failed: Vec<Failed>, qa: &Rational, qb: &Rational) -> Verdict {
    if !in_limit {
        Verdict::NotCommonCertainty
    } else if !failed.is_empty() {
        Verdict::HypothesisFailed(failed)
    } else if qa == qb {
        Verdict::AgreementConfirmed
    } else {
        Verdict::DisagreementUnderHypotheses
    }
}

#[derive(Clone, Debug)]
pub struct AgreementReport {
    /// Intra-agent hypotheses; absent for the knowledge variant.
    pub agents: Option<(AgentAssumptions, AgentAssumptions)>,
    pub consistency: ConsistencyCheck,
    pub trace: RecursionTrace,
    pub event: Event,
    pub omega: usize,
    pub omega_in_limit: bool,
    pub qa: Rational,
    pub qb: Rational,
    pub verdict: Verdict,
}

impl AgreementReport {
    pub fn failed(&self) -> Vec<Failed> {
        failed_hypotheses(self.agents.as_ref(), self.consistency.holds)
    }
}

fn failed_hypotheses(
    agents: Option<&(AgentAssumptions, AgentAssumptions)>,
    consistent: bool,
) -> Vec<Failed> {
    let mut out = Vec::new();
    if let Some((a, b)) = agents {
        for (agent, x) in [(Agent::A, a), (Agent::B, b)] {
            if !x.reflection.holds {
                out.push(Failed::Reflection(agent));
            }
        }
        for (agent, x) in [(Agent::A, a), (Agent::B, b)] {
            if !x.one_closed.holds {
                out.push(Failed::OneClosed(agent));
            }
        }
    }
    if !consistent {
        out.push(Failed::Consistency);
    }
    out
}

/// Hypothesis checks computed once per pair of agents and reused across
/// queries.
#[derive(Clone, Debug)]
pub struct AgreementContext<'a> {
    a: &'a Cps,
    b: &'a Cps,
    agents: Option<(AgentAssumptions, AgentAssumptions)>,
    consistency: Vec<ConsistencyCheck>,
    modality: Modality,
}

impl<'a> AgreementContext<'a> {
    /// `force` lifts the size cap of the direct reflection check.
    pub fn certainty(a: &'a Cps, b: &'a Cps, force: bool) -> Result<Self> {
        a.same_space(b)?;
        a.ensure_valid()?;
        b.ensure_valid()?;
        let agents = Some((assess_agent(a, force)?, assess_agent(b, force)?));
        Self::build(a, b, agents, Modality::Certainty)
    }

    pub fn knowledge(a: &'a Cps, b: &'a Cps) -> Result<Self> {
        a.same_space(b)?;
        a.ensure_valid()?;
        b.ensure_valid()?;
        Self::build(a, b, None, Modality::Knowledge)
    }

    fn build(
        a: &'a Cps,
        b: &'a Cps,
        agents: Option<(AgentAssumptions, AgentAssumptions)>,
        modality: Modality,
    ) -> Result<Self> {
        let consistency = (0..a.size())
            .map(|s| check_local_consistency(a, b, s))
            .collect::<Result<_>>()?;
        Ok(AgreementContext {
            a,
            b,
            agents,
            consistency,
            modality,
        })
    }

    pub fn agents(&self) -> Option<&(AgentAssumptions, AgentAssumptions)> {
        self.agents.as_ref()
    }

    pub fn consistency(&self) -> &[ConsistencyCheck] {
        &self.consistency
    }

    pub fn failed_at(&self, omega: usize) -> Vec<Failed> {
        failed_hypotheses(self.agents.as_ref(), self.consistency[omega].holds)
    }

    pub fn trace(&self, e: Event, qa: &Rational, qb: &Rational) -> Result<RecursionTrace> {
        run(self.a, self.b, e, qa, qb, self.modality)
    }

    pub fn check(
        &self,
        e: Event,
        omega: usize,
        qa: &Rational,
        qb: &Rational,
    ) -> Result<AgreementReport> {
        self.a.space().check(e)?;
        if omega >= self.a.size() {
            return Err(crate::Error::OutOfRange {
                index: omega,
                size: self.a.size(),
            });
        }
        let trace = self.trace(e, qa, qb)?;
        Ok(self.report(trace, e, omega, qa, qb))
    }

    pub fn report(
        &self,
        trace: RecursionTrace,
        e: Event,
        omega: usize,
        qa: &Rational,
        qb: &Rational,
    ) -> AgreementReport {
        let in_limit = trace.member_of_limit(omega);
        let verdict = classify(in_limit, self.failed_at(omega), qa, qb);
        AgreementReport {
            agents: self.agents.clone(),
            consistency: self.consistency[omega].clone(),
            trace,
            event: e,
            omega,
            omega_in_limit: in_limit,
            qa: qa.clone(),
            qb: qb.clone(),
            verdict,
        }
    }
}

pub fn check_agreement(
    a: &Cps,
    b: &Cps,
    e: Event,
    omega: usize,
    qa: &Rational,
    qb: &Rational,
) -> Result<AgreementReport> {
    AgreementContext::certainty(a, b, false)?.check(e, omega, qa, qb)
}

/// Common knowledge in place of common certainty, with local consistency as
/// the only hypothesis.
pub fn check_knowledge_agreement(
    a: &Cps,
    b: &Cps,
    e: Event,
    omega: usize,
    qa: &Rational,
    qb: &Rational,
) -> Result<AgreementReport> {
    AgreementContext::knowledge(a, b)?.check(e, omega, qa, qb)
}

/// If every atom inside `g` gives `e` the same probability `q`, then
/// `p_g(e) = q`. True when the atom values differ.
pub fn check_averaging(cps: &Cps, g: Event, e: Event) -> Result<bool> {
    let p = cps.measure(g)?;
    let atoms = cps.family().atoms_in(g)?;
    let mut values = atoms.iter().map(|&m| cps.prob(m, e));
    let first = values.next().expect("a member contains an atom")?;
    for v in values {
        if v? != first {
            return Ok(true);
        }
    }
    Ok(p.prob(e) == first)
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
    fn nonpartitional_agreement_agrees() {
        let (a, b) = fixtures::nonpartitional_agreement();
        let half = rational(1, 2);
        let r = check_agreement(&a, &b, ev("a"), 0, &half, &half).unwrap();
        assert_eq!(r.trace.limit, ev("ab"));
        assert!(r.omega_in_limit);
        // agent B of this instance is not 1-closed: {a,c,d} is certain given Ω
        assert_eq!(
            r.verdict,
            Verdict::HypothesisFailed(vec![Failed::OneClosed(Agent::B)])
        );
        let k = check_knowledge_agreement(&a, &b, ev("a"), 0, &half, &half).unwrap();
        assert_eq!(k.verdict, Verdict::AgreementConfirmed);
    }

    #[test]
    fn partitional_disagreement_fails_one_closedness() {
        let (a, b) = fixtures::partitional_disagreement();
        let r = check_agreement(&a, &b, ev("b"), 1, &int(1), &int(0)).unwrap();
        assert_eq!(r.trace.limit, ev("bc"));
        assert_eq!(
            r.verdict,
            Verdict::HypothesisFailed(vec![
                Failed::OneClosed(Agent::A),
                Failed::OneClosed(Agent::B)
            ])
        );
        assert!(r.consistency.holds);
    }

    #[test]
    fn augmented_partitional_disagreement_is_not_common_certainty() {
        let (a, b) = fixtures::partitional_disagreement();
        let (ha, hb) = (
            extend(&a).unwrap().extended_cps,
            extend(&b).unwrap().extended_cps,
        );
        let r = check_agreement(&ha, &hb, ev("b"), 1, &int(1), &int(0)).unwrap();
        assert_eq!(r.verdict, Verdict::NotCommonCertainty);
        assert!(r
            .failed()
            .iter()
            .all(|f| !matches!(f, Failed::OneClosed(_))));
    }

    #[test]
    fn partitional_disagreement_knowledge_variant() {
        let (a, b) = fixtures::partitional_disagreement();
        for omega in 0..4 {
            let r = check_knowledge_agreement(&a, &b, ev("b"), omega, &int(1), &int(0)).unwrap();
            assert_eq!(r.verdict, Verdict::NotCommonCertainty);
            assert!(r.agents.is_none());
        }
        let r = check_knowledge_agreement(&a, &b, ev("abcd"), 0, &int(1), &int(1)).unwrap();
        assert_eq!(r.verdict, Verdict::AgreementConfirmed);
    }

    #[test]
    fn classification_precedence() {
        let (one, zero) = (int(1), int(0));
        assert_eq!(
            classify(false, vec![Failed::Consistency], &one, &zero),
            Verdict::NotCommonCertainty
        );
        assert_eq!(
            classify(true, vec![Failed::Consistency], &one, &zero),
            Verdict::HypothesisFailed(vec![Failed::Consistency])
        );
        assert_eq!(
            classify(true, vec![], &one, &one),
            Verdict::AgreementConfirmed
        );
        assert_eq!(
            classify(true, vec![], &one, &zero),
            Verdict::DisagreementUnderHypotheses
        );
    }

    #[test]
    fn averaging_examples() {
        let (a, _) = fixtures::nonpartitional_agreement();
        assert!(check_averaging(&a, ev("abcd"), ev("ac")).unwrap());
        assert!(check_averaging(&a, ev("ab"), ev("a")).unwrap());
        assert!(check_averaging(&a, ev("c"), ev("c")).unwrap());
        assert!(check_averaging(&a, ev("a"), ev("a")).is_err());
        // atoms of {a,b,c} are {a,b} and {c}; E = {a,c} has values 1/2 and 1
        assert!(check_averaging(&a, ev("abc"), ev("ac")).unwrap());
    }

    #[test]
    fn bad_queries_are_rejected() {
        let (a, b) = fixtures::partitional_disagreement();
        assert!(check_agreement(&a, &b, ev("a"), 9, &int(1), &int(1)).is_err());
        let c = fixtures::certain_not_known();
        assert!(check_agreement(&a, &c, ev("a"), 0, &int(1), &int(1)).is_err());
    }
}
