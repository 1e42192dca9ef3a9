//! The instance file: one state space, two agents and an optional query.
//!
//! ```json
//! {
//!   "states": ["a", "b"],
//!   "agents": {
//!     "A": {"family": [["a", "b"]], "measures": [{"given": ["a", "b"], "p": {"a": "1/2", "b": "1/2"}}]},
//!     "B": {"family": [["a", "b"]], "measures": [{"given": ["a", "b"], "p": {"a": "1"}}]}
//!   },
//!   "query": {"event": ["a"], "qA": "1/2", "qB": "1", "omega": "a"}
//! }
//! ```
//!
//! Rationals are strings `"n"` or `"n/d"`. States absent from `p` weigh zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cps::{Cps, ProbMeasure};
use crate::foundations::{format_rational, parse_rational, Event, Rational, SetFamily, StateSpace};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown state label {label:?} in {context}")]
    Reference { label: String, context: String },
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("{0}")]
    Structure(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct RationalText(Rational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text)
            .map(RationalText)
            .map_err(|e| de::Error::custom(format!("bad rational {text:?}: {e}")))
    }
}

/// Label to weight, kept in file order; duplicate labels are rejected.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Weights(Vec<(String, RationalText)>);

impl Serialize for Weights {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Weights;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from state labels to rational strings")
            }
            fn visit_map<M: MapAccess<'de>>(self, mut m: M) -> Result<Weights, M::Error> {
                let mut out: Vec<(String, RationalText)> = Vec::new();
                while let Some((k, v)) = m.next_entry::<String, RationalText>()? {
                    if out.iter().any(|(x, _)| *x == k) {
                        return Err(de::Error::custom(format!("state {k:?} weighted twice")));
                    }
                    out.push((k, v));
                }
                Ok(Weights(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    given: Vec<String>,
    p: Weights,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDoc {
    family: Vec<Vec<String>>,
    measures: Vec<MeasureDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentsDoc {
    #[serde(rename = "A")]
    a: AgentDoc,
    #[serde(rename = "B")]
    b: AgentDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryDoc {
    event: Vec<String>,
    #[serde(rename = "qA")]
    qa: RationalText,
    #[serde(rename = "qB")]
    qb: RationalText,
    omega: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
    states: Vec<String>,
    agents: AgentsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    query: Option<QueryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub event: Event,
    pub qa: Rational,
    pub qb: Rational,
    pub omega: usize,
}

/// A resolved instance. Measures are attached but not validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub comment: Option<String>,
    pub a: Cps,
    pub b: Cps,
    pub query: Option<Query>,
}

impl Instance {
    pub fn new(a: Cps, b: Cps) -> Self {
        Instance {
            comment: None,
            a,
            b,
            query: None,
        }
    }

    pub fn space(&self) -> &StateSpace {
        self.a.space()
    }

    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        resolve(doc)
    }

    /// Canonical form: members and labels in state order, reduced
    /// rationals, zero weights omitted.
    pub fn to_json(&self) -> String {
        let pretty = serde_json::to_string_pretty(&self.to_doc()).expect("serializable");
        let mut s = inline_leaves(&pretty);
        s.push('\n');
        s
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("serializable")
    }

    fn to_doc(&self) -> InstanceDoc {
        let space = self.space();
        let labels =
            |e: Event| -> Vec<String> { e.states().map(|s| space.name(s).to_string()).collect() };
        let agent = |c: &Cps| AgentDoc {
            family: c.family().iter().map(labels).collect(),
            measures: c
                .measures()
                .iter()
                .map(|(&g, p)| MeasureDoc {
                    given: labels(g),
                    p: Weights(
                        (0..space.size())
                            .filter(|&s| !num_traits::Zero::is_zero(p.weight(s)))
                            .map(|s| (space.name(s).to_string(), RationalText(p.weight(s).clone())))
                            .collect(),
                    ),
                })
                .collect(),
        };
        InstanceDoc {
            comment: self.comment.clone(),
            states: space.names().to_vec(),
            agents: AgentsDoc {
                a: agent(&self.a),
                b: agent(&self.b),
            },
            query: self.query.as_ref().map(|q| QueryDoc {
                event: labels(q.event),
                qa: RationalText(q.qa.clone()),
                qb: RationalText(q.qb.clone()),
                omega: space.name(q.omega).to_string(),
            }),
        }
    }
}

/// Puts every array or object without nested containers on one line.
pub(crate) fn inline_leaves(pretty: &str) -> String {
    let bytes = pretty.as_bytes();
    let mut out = String::with_capacity(pretty.len());
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'"' {
            let end = string_end(bytes, i);
            out.push_str(&pretty[i..end]);
            i = end;
            continue;
        }
        if c == b'[' || c == b'{' {
            if let Some(end) = leaf_end(bytes, i) {
                out.push(c as char);
                let mut j = i + 1;
                let mut first = true;
                while j < end {
                    match bytes[j] {
                        b'"' => {
                            let e = string_end(bytes, j);
                            if !first && !out.ends_with(": ") {
                                out.push_str(", ");
                            }
                            out.push_str(&pretty[j..e]);
                            first = false;
                            j = e;
                        }
                        b':' => {
                            out.push_str(": ");
                            j += 1;
                        }
                        b',' | b' ' | b'\n' => j += 1,
                        _ => {
                            let start = j;
                            while j < end && !matches!(bytes[j], b',' | b' ' | b'\n') {
                                j += 1;
                            }
                            if !first && !out.ends_with(": ") {
                                out.push_str(", ");
                            }
                            out.push_str(&pretty[start..j]);
                            first = false;
                        }
                    }
                }
                out.push(bytes[end] as char);
                i = end + 1;
                continue;
            }
        }
        out.push(c as char);
        i += 1;
    }
    out
}

fn string_end(bytes: &[u8], start: usize) -> usize {
    let mut j = start + 1;
    while bytes[j] != b'"' {
        j += if bytes[j] == b'\\' { 2 } else { 1 };
    }
    j + 1
}

/// Index of the closing bracket when the container holds no containers.
fn leaf_end(bytes: &[u8], open: usize) -> Option<usize> {
    let mut j = open + 1;
    while j < bytes.len() {
        match bytes[j] {
            b'"' => j = string_end(bytes, j),
            b'[' | b'{' => return None,
            b']' | b'}' => return Some(j),
            _ => j += 1,
        }
    }
    None
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn event(space: &StateSpace, labels: &[String], context: &str) -> Result<Event, InstanceError> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(InstanceError::Duplicate(format!(
                "state {l:?} in {context}"
            )));
        }
    }
    space
        .event(labels.iter().map(String::as_str))
        .map_err(|label| InstanceError::Reference {
            label,
            context: context.to_string(),
        })
}

fn resolve_agent(space: &StateSpace, doc: &AgentDoc, name: &str) -> Result<Cps, InstanceError> {
    let n = space.size();
    let mut members = Vec::with_capacity(doc.family.len());
    for m in &doc.family {
        let e = event(space, m, &format!("family of agent {name}"))?;
        if e.is_empty() {
            return Err(InstanceError::Structure(format!(
                "agent {name}: family members must be nonempty"
            )));
        }
        if members.contains(&e) {
            return Err(InstanceError::Duplicate(format!(
                "family member {} of agent {name}",
                space.format(e)
            )));
        }
        members.push(e);
    }
    let mut measures: BTreeMap<Event, ProbMeasure> = BTreeMap::new();
    for m in &doc.measures {
        let context = format!("measures of agent {name}");
        let g = event(space, &m.given, &context)?;
        if !members.contains(&g) {
            return Err(InstanceError::Structure(format!(
                "agent {name}: measure given {} which is not a family member",
                space.format(g)
            )));
        }
        let mut weights = Vec::with_capacity(m.p.0.len());
        for (label, r) in &m.p.0 {
            let s = space
                .index_of(label)
                .ok_or_else(|| InstanceError::Reference {
                    label: label.clone(),
                    context: format!("measure given {} of agent {name}", space.format(g)),
                })?;
            weights.push((s, r.0.clone()));
        }
        let p =
            ProbMeasure::new(n, weights).map_err(|e| InstanceError::Structure(e.to_string()))?;
        if measures.insert(g, p).is_some() {
            return Err(InstanceError::Duplicate(format!(
                "measure given {} of agent {name}",
                space.format(g)
            )));
        }
    }
    if let Some(&g) = members.iter().find(|g| !measures.contains_key(g)) {
        return Err(InstanceError::Structure(format!(
            "agent {name}: no measure given {}",
            space.format(g)
        )));
    }
    let family = SetFamily::new(n, members).map_err(|e| InstanceError::Structure(e.to_string()))?;
    Cps::new(space.clone(), family, measures)
        .map_err(|e| InstanceError::Structure(format!("agent {name}: {e}")))
}

fn resolve(doc: InstanceDoc) -> Result<Instance, InstanceError> {
    let space = StateSpace::new(doc.states.iter().map(String::as_str))
        .map_err(|e| InstanceError::Structure(e.to_string()))?;
    let a = resolve_agent(&space, &doc.agents.a, "A")?;
    let b = resolve_agent(&space, &doc.agents.b, "B")?;
    let query = match doc.query {
        None => None,
        Some(q) => {
            let e = event(&space, &q.event, "query event")?;
            let omega = space
                .index_of(&q.omega)
                .ok_or_else(|| InstanceError::Reference {
                    label: q.omega.clone(),
                    context: "query omega".into(),
                })?;
            Some(Query {
                event: e,
                qa: q.qa.0,
                qb: q.qb.0,
                omega,
            })
        }
    };
    Ok(Instance {
        comment: doc.comment,
        a,
        b,
        query,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::foundations::{int, rational};

    fn partitional_disagreement_instance() -> Instance {
        let (a, b) = fixtures::partitional_disagreement();
        let mut inst = Instance::new(a, b);
        inst.query = Some(Query {
            event: Event::singleton(1),
            qa: int(1),
            qb: int(0),
            omega: 1,
        });
        inst
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let inst = partitional_disagreement_instance();
        let text = inst.to_json();
        let back = Instance::parse(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), text);
        let (a, b) = fixtures::nonpartitional_agreement();
        let inst = Instance::new(a, b);
        assert_eq!(
            Instance::parse(&inst.to_json()).unwrap().to_json(),
            inst.to_json()
        );
    }

    #[test]
    fn unreduced_rationals_are_reduced() {
        let text = r#"{"states":["x","y"],"agents":{
            "A":{"family":[["y","x"]],"measures":[{"given":["x","y"],"p":{"x":"2/4","y":"3/6"}}]},
            "B":{"family":[["x","y"]],"measures":[{"given":["x","y"],"p":{"y":"1","x":"0"}}]}}}"#;
        let inst = Instance::parse(text).unwrap();
        let p = inst.a.measure(Event::full(2)).unwrap();
        assert_eq!(p.weight(0), &rational(1, 2));
        let out = inst.to_json();
        assert!(out.contains("\"1/2\"") && !out.contains("2/4"));
        assert!(!out.contains("\"0\""));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "{\"states\": [\"x\"],\n \"agents\": {\"A\": {\"family\": [[\"x\"]], \"measures\": [{\"given\": [\"x\"], \"p\": {\"x\": \"1/0\"}}]}}}";
        match Instance::parse(text) {
            Err(InstanceError::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("1/0"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Instance::parse("{"),
            Err(InstanceError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn reference_and_duplicate_errors() {
        let base = |family: &str, measures: &str| {
            format!(
                r#"{{"states":["x","y"],"agents":{{"A":{{"family":{family},"measures":{measures}}},
                "B":{{"family":[["x","y"]],"measures":[{{"given":["x","y"],"p":{{"x":"1"}}}}]}}}}}}"#
            )
        };
        let ok = r#"[{"given":["x","y"],"p":{"x":"1"}}]"#;
        assert!(Instance::parse(&base(r#"[["x","y"]]"#, ok)).is_ok());
        assert!(matches!(
            Instance::parse(&base(r#"[["x","z"]]"#, ok)),
            Err(InstanceError::Reference { label, .. }) if label == "z"
        ));
        assert!(matches!(
            Instance::parse(&base(r#"[["x","y"],["y","x"]]"#, ok)),
            Err(InstanceError::Duplicate(_))
        ));
        let twice = r#"[{"given":["x","y"],"p":{"x":"1"}},{"given":["y","x"],"p":{"y":"1"}}]"#;
        assert!(matches!(
            Instance::parse(&base(r#"[["x","y"]]"#, twice)),
            Err(InstanceError::Duplicate(_))
        ));
        let dup_key = r#"[{"given":["x","y"],"p":{"x":"1/2","x":"1/2"}}]"#;
        assert!(matches!(
            Instance::parse(&base(r#"[["x","y"]]"#, dup_key)),
            Err(InstanceError::Parse { .. })
        ));
        assert!(matches!(
            Instance::parse(&base(r#"[["x","y"],["x"]]"#, ok)),
            Err(InstanceError::Structure(_))
        ));
    }

    #[test]
    fn leaves_are_inlined() {
        let v =
            serde_json::json!({"a": [["x", "y \\\"]"], []], "b": {"k": "v", "n": 1}, "c": [1, 2]});
        let pretty = serde_json::to_string_pretty(&v).unwrap();
        let out = inline_leaves(&pretty);
        assert!(out.contains(r#"["x", "y \\\"]"]"#), "{out}");
        assert!(out.contains(r#""b": {"k": "v", "n": 1}"#), "{out}");
        assert!(out.contains(r#""c": [1, 2]"#), "{out}");
        assert_eq!(serde_json::from_str::<serde_json::Value>(&out).unwrap(), v);
    }

    #[test]
    fn unnormalized_measures_parse() {
        let text = r#"{"states":["x","y"],"agents":{
            "A":{"family":[["x","y"]],"measures":[{"given":["x","y"],"p":{"x":"1/2","y":"1/3"}}]},
            "B":{"family":[["x","y"]],"measures":[{"given":["x","y"],"p":{"x":"1"}}]}}}"#;
        let inst = Instance::parse(text).unwrap();
        assert!(!inst.a.validate().is_valid());
    }
}
