//! Text and JSON renderings of reports, with states shown by label.

use serde_json::{json, Map, Value};

use crate::agreement::{AgreementReport, Failed, SearchReport, Witness};
use crate::assumptions::{
    AgentAssumptions, ConsistencyCheck, OneClosedCheck, ReflectionCheck, ReflectionChecker,
    ReflectionWitness,
};
use crate::cps::{ProbMeasure, ValidationReport, Violation};
use crate::epistemic::{Modality, RecursionTrace};
use crate::foundations::{format_rational, Event, ExtValue, Rational, StateSpace};
use crate::renyi::ExtMeasure;

use super::instance::{Instance, Query};

pub struct Render<'a> {
    pub space: &'a StateSpace,
}

impl<'a> Render<'a> {
    pub fn new(space: &'a StateSpace) -> Self {
        Render { space }
    }

    pub fn event(&self, e: Event) -> String {
        self.space.format(e)
    }

    pub fn event_json(&self, e: Event) -> Value {
        json!(self.space.labels(e))
    }

    pub fn state(&self, s: usize) -> &str {
        self.space.name(s)
    }

    pub fn measure(&self, p: &ProbMeasure) -> String {
        let parts: Vec<String> = p
            .support()
            .states()
            .map(|s| format!("{}: {}", self.state(s), format_rational(p.weight(s))))
            .collect();
        format!("[{}]", parts.join(", "))
    }

    pub fn measure_json(&self, p: &ProbMeasure) -> Value {
        let mut m = Map::new();
        for s in p.support().states() {
            m.insert(
                self.state(s).to_string(),
                json!(format_rational(p.weight(s))),
            );
        }
        Value::Object(m)
    }

    pub fn violation(&self, v: &Violation) -> String {
        match v {
            Violation::NegativeWeight {
                given,
                state,
                weight,
            } => format!(
                "nonnegativity: p_G for G={} has weight {} on {}",
                self.event(*given),
                format_rational(weight),
                self.state(*state)
            ),
            Violation::NotNormalized { given, total } => format!(
                "normalization: p_G for G={} has total mass {}, not 1",
                self.event(*given),
                format_rational(total)
            ),
            Violation::Concentration { given, mass } => format!(
                "concentration p_G(G) = 1 fails at G={}: p_G(G) = {}",
                self.event(*given),
                format_rational(mass)
            ),
            Violation::ChainRule {
                event,
                inner,
                outer,
                lhs,
                rhs,
            } => format!(
                "chain rule p_G(E) = p_G(F)*p_F(E) fails at (E,F,G)=({},{},{}): {} != {}",
                self.event(*event),
                self.event(*inner),
                self.event(*outer),
                format_rational(lhs),
                format_rational(rhs)
            ),
        }
    }

    pub fn violation_json(&self, v: &Violation) -> Value {
        let message = self.violation(v);
        match v {
            Violation::NegativeWeight {
                given,
                state,
                weight,
            } => json!({
                "kind": "negative_weight", "given": self.event_json(*given),
                "state": self.state(*state), "weight": format_rational(weight), "message": message,
            }),
            Violation::NotNormalized { given, total } => json!({
                "kind": "not_normalized", "given": self.event_json(*given),
                "total": format_rational(total), "message": message,
            }),
            Violation::Concentration { given, mass } => json!({
                "kind": "concentration", "given": self.event_json(*given),
                "mass": format_rational(mass), "message": message,
            }),
            Violation::ChainRule {
                event,
                inner,
                outer,
                lhs,
                rhs,
            } => json!({
                "kind": "chain_rule", "E": self.event_json(*event), "F": self.event_json(*inner),
                "G": self.event_json(*outer), "lhs": format_rational(lhs), "rhs": format_rational(rhs),
                "message": message,
            }),
        }
    }

    pub fn validation(&self, name: &str, r: &ValidationReport) -> (String, Value) {
        let mut text = format!(
            "agent {name}: {}\n",
            if r.is_valid() { "valid" } else { "invalid" }
        );
        for v in &r.violations {
            text.push_str(&format!("  {}\n", self.violation(v)));
        }
        let json = json!({
            "valid": r.is_valid(),
            "violations": r.violations.iter().map(|v| self.violation_json(v)).collect::<Vec<_>>(),
        });
        (text, json)
    }

    pub fn trace(&self, t: &RecursionTrace) -> (String, Value) {
        let (sa, sb, op) = match t.modality {
            Modality::Certainty => ("A", "B", "common certainty"),
            Modality::Knowledge => ("AK", "BK", "common knowledge"),
        };
        let mut text = String::new();
        for (n, (a, b)) in t.levels.iter().enumerate() {
            text.push_str(&format!(
                "{sa}^{n} = {}  {sb}^{n} = {}\n",
                self.event(*a),
                self.event(*b)
            ));
        }
        text.push_str(&format!(
            "stabilized at n = {}\n{op} limit: {}\n",
            t.stabilized_at,
            self.event(t.limit)
        ));
        let json = json!({
            "modality": match t.modality { Modality::Certainty => "certainty", Modality::Knowledge => "knowledge" },
            "levels": t.levels.iter().map(|(a, b)| json!({"A": self.event_json(*a), "B": self.event_json(*b)})).collect::<Vec<_>>(),
            "limit": self.event_json(t.limit),
            "stabilized_at": t.stabilized_at,
        });
        (text, json)
    }

    pub fn query_json(&self, e: Event, qa: &Rational, qb: &Rational) -> Value {
        json!({"event": self.event_json(e), "qA": format_rational(qa), "qB": format_rational(qb)})
    }

    pub fn one_closed(&self, c: &OneClosedCheck) -> (String, Value) {
        match c.witness {
            None => (
                "1-closed: holds".into(),
                json!({"holds": true, "witness": null}),
            ),
            Some((e, g)) => (
                format!(
                    "1-closed: fails; p_G(E) = 1 for E={} not in the family, G={}",
                    self.event(e),
                    self.event(g)
                ),
                json!({"holds": false, "witness": {"E": self.event_json(e), "G": self.event_json(g)}}),
            ),
        }
    }

    pub fn reflection(&self, c: &ReflectionCheck) -> (String, Value) {
        let checker = match c.checker {
            ReflectionChecker::Direct => "direct",
            ReflectionChecker::AtomCharacterization => "atoms",
        };
        let (wt, wj) = match &c.witness {
            None => (String::new(), Value::Null),
            Some(ReflectionWitness::Direct { event, state, belief, fiber, fiber_mass }) => (
                format!(
                    "; at {} the belief in E={} is {}, but the states sharing that belief, {}, have probability {}",
                    self.state(*state),
                    self.event(*event),
                    format_rational(belief),
                    self.event(*fiber),
                    format_rational(fiber_mass)
                ),
                json!({"kind": "direct", "state": self.state(*state), "E": self.event_json(*event),
                    "belief": format_rational(belief), "fiber": self.event_json(*fiber),
                    "fiber_mass": format_rational(fiber_mass)}),
            ),
            Some(ReflectionWitness::NestedAtom { inner, state, mass }) => (
                format!(
                    "; atom {} lies strictly inside the atom of {} with probability {}",
                    self.event(*inner),
                    self.state(*state),
                    format_rational(mass)
                ),
                json!({"kind": "nested_atom", "inner": self.event_json(*inner), "state": self.state(*state),
                    "mass": format_rational(mass)}),
            ),
        };
        (
            format!(
                "certainty reflection ({checker}): {}{wt}",
                if c.holds { "holds" } else { "fails" }
            ),
            json!({"holds": c.holds, "checker": checker, "witness": wj}),
        )
    }

    pub fn agent(&self, name: &str, x: &AgentAssumptions) -> (String, Value) {
        let (rt, rj) = self.reflection(&x.reflection);
        let (ot, oj) = self.one_closed(&x.one_closed);
        (
            format!("agent {name}\n  {rt}\n  {ot}\n"),
            json!({"reflection": rj, "one_closed": oj}),
        )
    }

    pub fn consistency(&self, c: &ConsistencyCheck) -> (String, Value) {
        let text = if c.holds {
            format!(
                "local consistency at {}: holds on meet atom {}",
                self.state(c.state),
                self.event(c.meet_atom)
            )
        } else {
            format!(
                "local consistency at {}: fails on meet atom {}: A gives {}, B gives {}",
                self.state(c.state),
                self.event(c.meet_atom),
                self.measure(&c.measure_a),
                self.measure(&c.measure_b)
            )
        };
        let json = json!({
            "state": self.state(c.state),
            "meet_atom": self.event_json(c.meet_atom),
            "holds": c.holds,
            "differing_state": c.differing_state.map(|s| self.state(s).to_string()),
            "measure_A": self.measure_json(&c.measure_a),
            "measure_B": self.measure_json(&c.measure_b),
        });
        (text, json)
    }

    pub fn failed(list: &[Failed]) -> Value {
        json!(list.iter().map(|f| f.to_string()).collect::<Vec<_>>())
    }

    pub fn agreement(&self, r: &AgreementReport) -> (String, Value) {
        let (tt, tj) = self.trace(&r.trace);
        let (ct, cj) = self.consistency(&r.consistency);
        let mut text = format!(
            "query: E = {}, qA = {}, qB = {}, omega = {}\n",
            self.event(r.event),
            format_rational(&r.qa),
            format_rational(&r.qb),
            self.state(r.omega)
        );
        let mut hyp = Map::new();
        if let Some((a, b)) = &r.agents {
            let (at, aj) = self.agent("A", a);
            let (bt, bj) = self.agent("B", b);
            text.push_str(&at);
            text.push_str(&bt);
            hyp.insert("A".into(), aj);
            hyp.insert("B".into(), bj);
        }
        hyp.insert("consistency".into(), cj);
        text.push_str(&ct);
        text.push('\n');
        text.push_str(&tt);
        text.push_str(&format!(
            "omega in limit: {}\nverdict: {}\n",
            r.omega_in_limit, r.verdict
        ));
        let mut q = self.query_json(r.event, &r.qa, &r.qb);
        q["omega"] = json!(self.state(r.omega));
        let json = json!({
            "query": q,
            "hypotheses": Value::Object(hyp),
            "trace": tj,
            "omega_in_limit": r.omega_in_limit,
            "qA": format_rational(&r.qa),
            "qB": format_rational(&r.qb),
            "verdict": r.verdict.to_string(),
            "failed": Self::failed(&r.failed()),
        });
        (text, json)
    }

    pub fn ext_value(v: &ExtValue) -> String {
        match v {
            ExtValue::Infinity => "inf".into(),
            ExtValue::Finite(r) => format_rational(r),
        }
    }

    pub fn level(&self, l: &ExtMeasure) -> (String, Value) {
        let mut m = Map::new();
        let mut parts = Vec::new();
        for (s, v) in l.values().iter().enumerate() {
            parts.push(format!("{}: {}", self.state(s), Self::ext_value(v)));
            m.insert(self.state(s).to_string(), json!(Self::ext_value(v)));
        }
        (format!("[{}]", parts.join(", ")), Value::Object(m))
    }
}

pub fn witness_json(w: &Witness) -> Value {
    let r = Render::new(w.a.space());
    let mut inst = Instance::new(w.a.clone(), w.b.clone());
    inst.comment = Some(format!("search trial {}", w.trial));
    inst.query = Some(Query {
        event: w.event,
        qa: w.qa.clone(),
        qb: w.qb.clone(),
        omega: w.omega,
    });
    json!({
        "trial": w.trial,
        "event": r.event_json(w.event),
        "omega": r.state(w.omega),
        "qA": format_rational(&w.qa),
        "qB": format_rational(&w.qb),
        "failed": Render::failed(&w.failed),
        "instance": inst.to_value(),
    })
}

fn witness_line(w: &Witness) -> String {
    let r = Render::new(w.a.space());
    let failed: Vec<String> = w.failed.iter().map(|f| f.to_string()).collect();
    format!(
        "  trial {}: E = {}, omega = {}, qA = {}, qB = {}{}",
        w.trial,
        r.event(w.event),
        r.state(w.omega),
        format_rational(&w.qa),
        format_rational(&w.qb),
        if failed.is_empty() {
            String::new()
        } else {
            format!(", failing: {}", failed.join(", "))
        }
    )
}

pub fn search(report: &SearchReport) -> (String, Value) {
    let c = &report.config;
    let drop = c.drop.map(|h| h.to_string());
    let mut text = format!(
        "search: {} trials, {} states, seed {}, {} sequence{}\n",
        report.trials,
        c.state_count,
        c.seed,
        if c.shared_lexicographic {
            "shared"
        } else {
            "independent"
        },
        drop.as_ref()
            .map(|d| format!(", violating {d}"))
            .unwrap_or_default()
    );
    let k = &report.counts;
    text.push_str(&format!(
        "candidates: {} (confirmed {}, hypothesis failed {}, not common certainty {}, disagreement under hypotheses {})\n",
        k.total(),
        k.confirmed,
        k.hypothesis_failed,
        k.not_common_certainty,
        k.disagreement_under_hypotheses
    ));
    text.push_str(&format!(
        "trials satisfying every hypothesis: {}\n",
        report.hypotheses_held
    ));
    text.push_str(&format!(
        "trials with common-certainty disagreement: {}\n",
        report.findings_total
    ));
    for w in &report.findings {
        text.push_str(&witness_line(w));
        text.push('\n');
    }
    text.push_str(&format!(
        "DISAGREEMENT_UNDER_HYPOTHESES: {}\n",
        report.violations_total
    ));
    for w in &report.violations {
        text.push_str(&witness_line(w));
        text.push('\n');
    }
    let json = json!({
        "config": {
            "states": c.state_count,
            "seed": c.seed,
            "trials": c.trials,
            "shared_lexicographic": c.shared_lexicographic,
            "drop": drop,
        },
        "trials": report.trials,
        "hypotheses_held": report.hypotheses_held,
        "counts": {
            "confirmed": k.confirmed,
            "hypothesis_failed": k.hypothesis_failed,
            "not_common_certainty": k.not_common_certainty,
            "disagreement_under_hypotheses": k.disagreement_under_hypotheses,
        },
        "findings_total": report.findings_total,
        "findings": report.findings.iter().map(witness_json).collect::<Vec<_>>(),
        "violations_total": report.violations_total,
        "violations": report.violations.iter().map(witness_json).collect::<Vec<_>>(),
    });
    (text, json)
}
