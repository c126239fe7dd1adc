//! The JSON network document and its conversion to a [`ReactionNetwork`].

use std::collections::{BTreeMap, HashMap, HashSet};

use crnlap::scalar::parse_decimal;
use crnlap::{build_network, LabeledDigraph, Matrix, Rational, ReactionNetwork, Scalar};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Integer part of a fraction; big values travel as digit strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Integer {
    Small(i64),
    Digits(String),
}

/// A number as written in a document: a JSON number, a decimal or `p/q`
/// string, or an exact `{"num": p, "den": q}` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
    Fraction { num: Integer, den: Integer },
}

impl Number {
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Number::Int(v) => Some(Rational::from_i64(*v)),
            Number::Float(v) => Rational::from_f64(*v),
            Number::Text(s) => parse_decimal(s),
            Number::Fraction { num, den } => {
                let (n, d) = (num.to_bigint()?, den.to_bigint()?);
                (!d.is_zero()).then(|| Rational::new(n, d))
            }
        }
    }

    /// Canonical form: a JSON integer when integral and small, else a fraction.
    pub fn from_rational(v: &Rational) -> Number {
        if v.is_integer() {
            if let Some(i) = num_traits::ToPrimitive::to_i64(v.numer()) {
                return Number::Int(i);
            }
        }
        Number::Fraction {
            num: Integer::from_bigint(v.numer()),
            den: Integer::from_bigint(v.denom()),
        }
    }
}

impl Integer {
    fn to_bigint(&self) -> Option<BigInt> {
        match self {
            Integer::Small(v) => Some(BigInt::from(*v)),
            Integer::Digits(s) => s.trim().parse().ok(),
        }
    }

    pub fn from_bigint(v: &BigInt) -> Integer {
        match num_traits::ToPrimitive::to_i64(v) {
            Some(i) => Integer::Small(i),
            None => Integer::Digits(v.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default)]
    pub complex: BTreeMap<String, Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    pub k: Number,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub species: Vec<String>,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn semantic(path: String, kind: &str, message: String) -> CliError {
    CliError::Semantic {
        path,
        kind: kind.to_string(),
        message,
    }
}

/// Parses and validates a document, returning it with the exact network.
pub fn parse_network(text: &str) -> Result<(NetworkDocument, ReactionNetwork<Rational>), CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: NetworkDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Schema {
            path,
            message: inner.to_string(),
        }
    })?;
    let net = doc.to_network()?;
    Ok((doc, net))
}

impl NetworkDocument {
    pub fn to_network(&self) -> Result<ReactionNetwork<Rational>, CliError> {
        let mut species_index = HashMap::new();
        for (i, s) in self.species.iter().enumerate() {
            if species_index.insert(s.as_str(), i).is_some() {
                return Err(semantic(format!("species[{i}]"), "DuplicateSpecies", format!("species `{s}` repeats")));
            }
        }
        let n = self.species.len();
        let mut ids = HashSet::new();
        let mut columns = Vec::with_capacity(self.vertices.len());
        for (v, vertex) in self.vertices.iter().enumerate() {
            if !ids.insert(vertex.id.as_str()) {
                return Err(semantic(
                    format!("vertices[{v}].id"),
                    "DuplicateVertex",
                    format!("vertex id `{}` repeats", vertex.id),
                ));
            }
            let mut column = vec![Rational::from_i64(0); n];
            for (name, value) in &vertex.complex {
                let path = format!("vertices[{v}].complex.{name}");
                let Some(&i) = species_index.get(name.as_str()) else {
                    return Err(semantic(path, "UnknownSpecies", format!("species `{name}` is not declared")));
                };
                let q = value
                    .to_rational()
                    .ok_or_else(|| semantic(path.clone(), "InvalidNumber", format!("{value:?} is not a number")))?;
                if q < Rational::from_i64(0) {
                    return Err(semantic(path, "NegativeComplexEntry", format!("stoichiometric coefficient {q} < 0")));
                }
                column[i] = q;
            }
            columns.push(column);
        }
        let mut seen_edges = HashSet::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (j, edge) in self.edges.iter().enumerate() {
            for (field, end) in [("from", &edge.from), ("to", &edge.to)] {
                if !ids.contains(end.as_str()) {
                    return Err(semantic(
                        format!("edges[{j}].{field}"),
                        "UnknownEndpoint",
                        format!("vertex `{end}` is not declared"),
                    ));
                }
            }
            if edge.from == edge.to {
                return Err(semantic(format!("edges[{j}]"), "SelfLoop", format!("self-loop at `{}`", edge.from)));
            }
            if !seen_edges.insert((edge.from.as_str(), edge.to.as_str())) {
                return Err(semantic(
                    format!("edges[{j}]"),
                    "DuplicateEdge",
                    format!("edge `{}` -> `{}` repeats", edge.from, edge.to),
                ));
            }
            let path = format!("edges[{j}].k");
            let k = edge
                .k
                .to_rational()
                .ok_or_else(|| semantic(path.clone(), "InvalidNumber", format!("{:?} is not a number", edge.k)))?;
            if !Scalar::is_positive(&k) {
                return Err(semantic(path, "NonPositiveLabel", format!("label {k} must be positive")));
            }
            edges.push((edge.from.clone(), edge.to.clone(), k));
        }
        let vertex_ids: Vec<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        let g = LabeledDigraph::build(&vertex_ids, edges).map_err(|e| semantic("edges".into(), "Graph", e.to_string()))?;
        let y = Matrix::from_columns(&columns, n);
        build_network(self.species.clone(), y, g).map_err(|e| match e {
            crnlap::Error::DuplicateComplex(a, b) => {
                let v = self.vertices.iter().position(|x| x.id == b).unwrap_or(0);
                semantic(
                    format!("vertices[{v}].complex"),
                    "DuplicateComplex",
                    format!("vertices `{a}` and `{b}` carry the same complex"),
                )
            }
            other => semantic("".into(), "Network", other.to_string()),
        })
    }

    /// Canonical document of a network: zero coefficients dropped, numbers
    /// as integers or exact fractions.
    pub fn from_network(net: &ReactionNetwork<Rational>, metadata: BTreeMap<String, serde_json::Value>) -> Self {
        let g = net.graph();
        let vertices = (0..g.vertex_count())
            .map(|v| VertexDoc {
                id: g.vertex_id(v).to_string(),
                complex: net
                    .complex(v)
                    .iter()
                    .zip(net.species())
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, s)| (s.clone(), Number::from_rational(c)))
                    .collect(),
            })
            .collect();
        let edges = g
            .edges()
            .iter()
            .zip(g.labels())
            .map(|(e, k)| EdgeDoc {
                from: g.vertex_id(e.source).to_string(),
                to: g.vertex_id(e.target).to_string(),
                k: Number::from_rational(k),
            })
            .collect();
        NetworkDocument {
            species: net.species().to_vec(),
            vertices,
            edges,
            metadata,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = r#"{
        "species": ["X1", "X2"],
        "vertices": [
            {"id": "1", "complex": {"X1": 2, "X2": 1}},
            {"id": "2", "complex": {"X2": "2"}},
            {"id": "3", "complex": {"X1": {"num": 1, "den": 1}}}
        ],
        "edges": [
            {"from": "1", "to": "2", "k": 1},
            {"from": "2", "to": "1", "k": "0.5"},
            {"from": "2", "to": "3", "k": "7/3"},
            {"from": "3", "to": "1", "k": 1.25}
        ]
    }"#;

    #[test]
    fn running_example_parses() {
        let (_, net) = parse_network(RUNNING).unwrap();
        assert_eq!(net.graph().scc_partition().len(), 1);
        assert_eq!(net.graph().labels()[1], Rational::from_ratio(1, 2));
        assert_eq!(net.graph().labels()[2], Rational::from_ratio(7, 3));
        assert_eq!(net.graph().labels()[3], Rational::from_ratio(5, 4));
    }

    #[test]
    fn canonical_form_round_trips() {
        let (doc, net) = parse_network(RUNNING).unwrap();
        let canonical = NetworkDocument::from_network(&net, doc.metadata.clone());
        let (again, net2) = parse_network(&canonical.to_json()).unwrap();
        assert_eq!(again, canonical);
        assert_eq!(net2.graph().labels(), net.graph().labels());
        assert_eq!(net2.complexes(), net.complexes());
    }

    #[test]
    fn missing_label_names_the_edge() {
        let text = RUNNING.replace(r#"{"from": "2", "to": "3", "k": "7/3"}"#, r#"{"from": "2", "to": "3"}"#);
        match parse_network(&text) {
            Err(CliError::Schema { path, message }) => {
                assert_eq!(path, "edges[2]");
                assert!(message.contains("`k`"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_label_is_rejected() {
        let text = RUNNING.replace(r#""k": "0.5""#, r#""k": 0"#);
        match parse_network(&text) {
            Err(CliError::Semantic { path, kind, .. }) => {
                assert_eq!(kind, "NonPositiveLabel");
                assert_eq!(path, "edges[1].k");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_complex_is_rejected() {
        let text = RUNNING.replace(r#"{"X2": "2"}"#, r#"{"X1": 2, "X2": 1}"#);
        match parse_network(&text) {
            Err(CliError::Semantic { kind, path, .. }) => {
                assert_eq!(kind, "DuplicateComplex");
                assert_eq!(path, "vertices[1].complex");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn big_fractions_survive() {
        let big = Rational::new(BigInt::from(10).pow(30u32) + 1, BigInt::from(7));
        let n = Number::from_rational(&big);
        let text = serde_json::to_string(&n).unwrap();
        let back: Number = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_rational().unwrap(), big);
    }
}
