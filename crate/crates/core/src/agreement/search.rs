//! Exhaustive query enumeration over generated agent pairs.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::generate::{generate_trial, GeneratorConfig, Hypothesis};
use super::{AgreementContext, Failed, Verdict};
use crate::cps::Cps;
use crate::error::Result;
use crate::fixtures;
use crate::foundations::{Event, Rational};

/// Witnesses kept in a report; totals are counted past this.
pub const MAX_STORED_WITNESSES: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerdictCounts {
    pub confirmed: usize,
    pub hypothesis_failed: usize,
    pub not_common_certainty: usize,
    pub disagreement_under_hypotheses: usize,
}

impl VerdictCounts {
    fn add(&mut self, other: &VerdictCounts) {
        self.confirmed += other.confirmed;
        self.hypothesis_failed += other.hypothesis_failed;
        self.not_common_certainty += other.not_common_certainty;
        self.disagreement_under_hypotheses += other.disagreement_under_hypotheses;
    }

    pub fn total(&self) -> usize {
        self.confirmed
            + self.hypothesis_failed
            + self.not_common_certainty
            + self.disagreement_under_hypotheses
    }
}

/// A query with the state in the common-certainty limit and differing
/// posited probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub trial: usize,
    pub a: Cps,
    pub b: Cps,
    pub event: Event,
    pub omega: usize,
    pub qa: Rational,
    pub qb: Rational,
    /// Empty for a disagreement under all hypotheses.
    pub failed: Vec<Failed>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub config: GeneratorConfig,
    pub trials: usize,
    /// Trials whose instance satisfies every hypothesis at every state.
    pub hypotheses_held: usize,
    pub counts: VerdictCounts,
    /// Disagreements with every hypothesis satisfied.
    pub violations: Vec<Witness>,
    pub violations_total: usize,
    /// Disagreements at states of common certainty where some hypothesis
    /// fails, at most one per trial.
    pub findings: Vec<Witness>,
    pub findings_total: usize,
}

impl SearchReport {
    pub fn is_clean(&self) -> bool {
        self.violations_total == 0
    }
}

struct TrialOutcome {
    held: bool,
    counts: VerdictCounts,
    violation: Option<Witness>,
    findings: bool,
    finding: Option<Witness>,
    violations: usize,
}

/// Runs every trial of `config`; the report does not depend on scheduling.
pub fn search_counterexamples(config: &GeneratorConfig) -> Result<SearchReport> {
    if config.trials > 0 {
        config.validate()?;
    }
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let (a, b) = if trial == 0 && config.drop == Some(Hypothesis::OneClosed) {
                fixtures::partitional_disagreement()
            } else {
                generate_trial(config, trial)?
            };
            run_trial(trial, a, b)
        })
        .collect::<Result<_>>()?;

    let mut report = SearchReport {
        config: config.clone(),
        trials: config.trials,
        hypotheses_held: 0,
        counts: VerdictCounts::default(),
        violations: Vec::new(),
        violations_total: 0,
        findings: Vec::new(),
        findings_total: 0,
    };
    for o in outcomes {
        report.hypotheses_held += usize::from(o.held);
        report.counts.add(&o.counts);
        report.violations_total += o.violations;
        if o.findings {
            report.findings_total += 1;
        }
        if let Some(w) = o.violation {
            if report.violations.len() < MAX_STORED_WITNESSES {
                report.violations.push(w);
            }
        }
        if let Some(w) = o.finding {
            if report.findings.len() < MAX_STORED_WITNESSES {
                report.findings.push(w);
            }
        }
    }
    Ok(report)
}

/// Events in order of size, then bits, so the first hit is a smallest one.
fn events_by_size(n: usize) -> Vec<Event> {
    let mut all: Vec<Event> = Event::full(n).subsets().filter(|e| !e.is_empty()).collect();
    all.sort_by_key(|e| (e.len(), e.bits()));
    all
}

fn achieved(cps: &Cps, e: Event) -> BTreeSet<Rational> {
    cps.beliefs(e).into_iter().collect()
}

fn run_trial(trial: usize, a: Cps, b: Cps) -> Result<TrialOutcome> {
    let ctx = AgreementContext::certainty(&a, &b, true)?;
    let n = a.size();
    let held = (0..n).all(|s| ctx.failed_at(s).is_empty());
    let mut counts = VerdictCounts::default();
    let mut violation = None;
    let mut violations = 0;
    let mut finding = None;
    for e in events_by_size(n) {
        let (va, vb) = (achieved(&a, e), achieved(&b, e));
        for qa in &va {
            for qb in &vb {
                let trace = ctx.trace(e, qa, qb)?;
                for omega in 0..n {
                    let in_limit = trace.member_of_limit(omega);
                    let failed = ctx.failed_at(omega);
                    match super::classify(in_limit, failed.clone(), qa, qb) {
                        Verdict::AgreementConfirmed => counts.confirmed += 1,
                        Verdict::NotCommonCertainty => counts.not_common_certainty += 1,
                        Verdict::HypothesisFailed(_) => {
                            counts.hypothesis_failed += 1;
                            if qa != qb && finding.is_none() {
                                finding = Some((e, omega, qa.clone(), qb.clone(), failed));
                            }
                        }
                        Verdict::DisagreementUnderHypotheses => {
                            counts.disagreement_under_hypotheses += 1;
                            violations += 1;
                            if violation.is_none() {
                                violation = Some((e, omega, qa.clone(), qb.clone(), failed));
                            }
                        }
                    }
                }
            }
        }
    }
    let witness =
        |(event, omega, qa, qb, failed): (Event, usize, Rational, Rational, Vec<Failed>)| Witness {
            trial,
            a: a.clone(),
            b: b.clone(),
            event,
            omega,
            qa,
            qb,
            failed,
        };
    Ok(TrialOutcome {
        held,
        counts,
        violations,
        findings: finding.is_some(),
        violation: violation.map(witness),
        finding: finding.map(witness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agreement::Agent;

    #[test]
    fn empty_search() {
        let r = search_counterexamples(&GeneratorConfig::new(4, 1, 0)).unwrap();
        assert_eq!(r.trials, 0);
        assert_eq!(r.counts.total(), 0);
        assert!(r.is_clean() && r.findings.is_empty());
    }

    #[test]
    fn full_hypotheses_are_clean() {
        let r = search_counterexamples(&GeneratorConfig::new(4, 11, 40)).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.hypotheses_held, 40);
        assert!(r.counts.confirmed > 0);
    }

    #[test]
    fn canary_is_found_in_trial_zero() {
        let config = GeneratorConfig::new(4, 1, 3).with_drop(Some(Hypothesis::OneClosed));
        let r = search_counterexamples(&config).unwrap();
        assert!(r.is_clean());
        let w = &r.findings[0];
        assert_eq!(w.trial, 0);
        assert_eq!(
            (w.a.clone(), w.b.clone()),
            fixtures::partitional_disagreement()
        );
        assert!(w.failed.contains(&Failed::OneClosed(Agent::A)));
        assert_ne!(w.qa, w.qb);
        assert_eq!(w.event.len(), 1);
    }

    #[test]
    fn report_is_deterministic() {
        let config = GeneratorConfig::new(5, 3, 12).with_drop(Some(Hypothesis::Consistency));
        let x = search_counterexamples(&config).unwrap();
        let y = search_counterexamples(&config).unwrap();
        assert_eq!(x, y);
    }
}
