//! Compiling an annotated document into a point-algebra constraint graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::json;

use crate::algebra::{tense_sr, tense_to_relations, view_er};
use crate::model::{AnnotatedDocument, LinkKind, PointKind, PointRef, RelationSet, TimePointId};

/// A labelled edge, stored in canonical direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub rel: RelationSet,
    /// Ids of the annotations that contributed to the label.
    pub provenance: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent annotation: {a} {existing} {b} cannot also be {a} {added} {b} (from {})", provenance_list(.provenance))]
pub struct Inconsistency {
    pub a: TimePointId,
    pub b: TimePointId,
    pub existing: RelationSet,
    pub added: RelationSet,
    pub provenance: BTreeSet<String>,
}

fn provenance_list(p: &BTreeSet<String>) -> String {
    p.iter().cloned().collect::<Vec<_>>().join(", ")
}

/// Time points connected by relation-set labelled edges, plus calendar anchors.
///
/// An edge `(a, b)` is always stored with `a < b` in [`TimePointId`] order;
/// lookups in the other direction return the converse. Pairs with no edge are
/// unconstrained.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintGraph {
    nodes: BTreeSet<TimePointId>,
    edges: BTreeMap<(TimePointId, TimePointId), Edge>,
    anchors: BTreeMap<TimePointId, String>,
}

impl ConstraintGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, p: TimePointId) {
        self.nodes.insert(p);
    }

    pub fn nodes(&self) -> &BTreeSet<TimePointId> {
        &self.nodes
    }

    pub fn contains(&self, p: &TimePointId) -> bool {
        self.nodes.contains(p)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&TimePointId, &TimePointId, &Edge)> {
        self.edges.iter().map(|((a, b), e)| (a, b, e))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn anchors(&self) -> &BTreeMap<TimePointId, String> {
        &self.anchors
    }

    pub fn set_anchor(&mut self, p: TimePointId, value: impl Into<String>) {
        self.nodes.insert(p.clone());
        self.anchors.insert(p, value.into());
    }

    /// The label from `a` to `b`: `=` for a point with itself, the full set
    /// for a pair without an edge.
    pub fn relation(&self, a: &TimePointId, b: &TimePointId) -> RelationSet {
        if a == b {
            return RelationSet::EQUAL;
        }
        if a < b {
            self.edges.get(&(a.clone(), b.clone())).map_or(RelationSet::FULL, |e| e.rel)
        } else {
            self.edges.get(&(b.clone(), a.clone())).map_or(RelationSet::FULL, |e| e.rel.converse())
        }
    }

    pub fn provenance(&self, a: &TimePointId, b: &TimePointId) -> Option<&BTreeSet<String>> {
        let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.edges.get(&key).map(|e| &e.provenance)
    }

    /// Conjoins `rel` (read from `a` to `b`) with the current label.
    /// Both nodes are created if missing.
    pub fn add_constraint(
        &mut self,
        a: &TimePointId,
        b: &TimePointId,
        rel: RelationSet,
        source: &str,
    ) -> Result<(), Inconsistency> {
        if a == b {
            if rel.contains(crate::model::BasicRelation::Equal) {
                self.nodes.insert(a.clone());
                return Ok(());
            }
            return Err(Inconsistency {
                a: a.clone(),
                b: b.clone(),
                existing: RelationSet::EQUAL,
                added: rel,
                provenance: BTreeSet::from([source.to_string()]),
            });
        }
        let (key, rel) = if a < b { ((a.clone(), b.clone()), rel) } else { ((b.clone(), a.clone()), rel.converse()) };
        self.nodes.insert(key.0.clone());
        self.nodes.insert(key.1.clone());
        let edge = self
            .edges
            .entry(key.clone())
            .or_insert_with(|| Edge { rel: RelationSet::FULL, provenance: BTreeSet::new() });
        let refined = edge.rel.intersect(rel);
        if refined.is_empty() {
            let mut provenance = edge.provenance.clone();
            provenance.insert(source.to_string());
            let existing = edge.rel;
            if edge.provenance.is_empty() {
                self.edges.remove(&key);
            }
            return Err(Inconsistency { a: key.0, b: key.1, existing, added: rel, provenance });
        }
        edge.rel = refined;
        edge.provenance.insert(source.to_string());
        Ok(())
    }

    pub(crate) fn insert_edge(&mut self, a: TimePointId, b: TimePointId, edge: Edge) {
        debug_assert!(a < b);
        self.edges.insert((a, b), edge);
    }

    pub(crate) fn without_edges(&self) -> ConstraintGraph {
        ConstraintGraph { nodes: self.nodes.clone(), edges: BTreeMap::new(), anchors: self.anchors.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<_> = self
            .edges()
            .map(|(a, b, e)| {
                json!({
                    "a": a.to_string(),
                    "b": b.to_string(),
                    "rel": e.rel.to_string(),
                    "provenance": e.provenance,
                })
            })
            .collect();
        let anchors: serde_json::Map<String, serde_json::Value> =
            self.anchors.iter().map(|(p, v)| (p.to_string(), json!(v))).collect();
        json!({
            "nodes": self.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            "edges": edges,
            "anchors": anchors,
        })
    }

    /// DOT digraph; edges point in canonical direction, labelled with the relation.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rtmml {\n");
        for n in &self.nodes {
            match self.anchors.get(n) {
                Some(v) => {
                    let _ = writeln!(out, "  {} [label={}];", dot_id(&n.to_string()), dot_id(&format!("{n}\\n{v}")));
                }
                None => {
                    let _ = writeln!(out, "  {};", dot_id(&n.to_string()));
                }
            }
        }
        for (a, b, e) in self.edges() {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                dot_id(&a.to_string()),
                dot_id(&b.to_string()),
                dot_id(&e.rel.to_string())
            );
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Inconsistent(#[from] Inconsistency),
    #[error("{0}: reference to undeclared {1:?}")]
    UnresolvedReference(String, String),
    #[error("link {0}: {1}")]
    InvalidLink(String, String),
}

fn point_of(doc: &AnnotatedDocument, owner: &str, r: &PointRef) -> Result<TimePointId, BuildError> {
    match r {
        PointRef::DocCreation => Ok(TimePointId::Sd),
        PointRef::Timex(t) if doc.timerefx(t).is_some() => Ok(TimePointId::timex(t)),
        PointRef::VerbPoint(v, k) if doc.verb(v).is_some() => Ok(TimePointId::Verb(v.clone(), *k)),
        PointRef::Named(l) => Ok(TimePointId::Named(l.clone())),
        other => Err(BuildError::UnresolvedReference(owner.to_string(), other.to_string())),
    }
}

/// Compiles a document's annotations into constraints.
///
/// Constraints are added in a fixed order: per-verb tense and relation
/// attributes, `s`/`e`/`r` point references, links, default speech time,
/// then calendar anchors (which never produce edges).
pub fn build_graph(doc: &AnnotatedDocument) -> Result<ConstraintGraph, BuildError> {
    let mut g = ConstraintGraph::new();
    g.add_node(TimePointId::Sd);
    for v in &doc.verbs {
        for k in PointKind::ALL {
            g.add_node(TimePointId::Verb(v.id.clone(), k));
        }
    }
    for t in &doc.timerefxs {
        g.add_node(TimePointId::timex(&t.id));
    }

    for v in &doc.verbs {
        let (s, e, r) = (TimePointId::speech(&v.id), TimePointId::event(&v.id), TimePointId::reference(&v.id));
        if let Some(tense) = v.tense {
            g.add_constraint(&s, &r, tense_sr(tense), &v.id)?;
        }
        if let Some(view) = v.view {
            g.add_constraint(&e, &r, view_er(view), &v.id)?;
        }
        if let (Some(view), Some(tense)) = (v.view, v.tense) {
            g.add_constraint(&s, &e, tense_to_relations(view, tense).se, &v.id)?;
        }
        if let Some(sr) = v.sr {
            g.add_constraint(&s, &r, sr, &v.id)?;
        }
        if let Some(er) = v.er {
            g.add_constraint(&e, &r, er, &v.id)?;
        }
        if let Some(se) = v.se {
            g.add_constraint(&s, &e, se, &v.id)?;
        }
    }

    for v in &doc.verbs {
        for k in PointKind::ALL {
            if let Some(r) = v.point_ref(k) {
                let other = point_of(doc, &v.id, r)?;
                g.add_constraint(&TimePointId::Verb(v.id.clone(), k), &other, RelationSet::EQUAL, &v.id)?;
            }
        }
    }

    let mut reported = BTreeSet::new();
    for l in &doc.links {
        let resolve = |id: &str| -> Result<bool, BuildError> {
            if doc.verb(id).is_some() {
                Ok(true)
            } else if doc.timerefx(id).is_some() {
                Ok(false)
            } else {
                Err(BuildError::UnresolvedReference(l.id.clone(), id.to_string()))
            }
        };
        match l.kind {
            LinkKind::Positions => {
                let source = l.source.as_deref().ok_or_else(|| BuildError::InvalidLink(l.id.clone(), "POSITIONS needs a source".into()))?;
                let source_is_verb = resolve(source)?;
                for t in &l.targets {
                    let (timex, verb) = match (source_is_verb, resolve(t)?) {
                        (false, true) => (source, t.as_str()),
                        (true, false) => (t.as_str(), source),
                        _ => {
                            return Err(BuildError::InvalidLink(
                                l.id.clone(),
                                "POSITIONS relates a time expression to a verb".into(),
                            ))
                        }
                    };
                    g.add_constraint(&TimePointId::timex(timex), &TimePointId::reference(verb), RelationSet::EQUAL, &l.id)?;
                }
            }
            LinkKind::Reports => {
                let source = l.source.as_deref().ok_or_else(|| BuildError::InvalidLink(l.id.clone(), "REPORTS needs a source".into()))?;
                let verbs_only = |id: &str| match resolve(id)? {
                    true => Ok(()),
                    false => Err(BuildError::InvalidLink(l.id.clone(), "REPORTS relates verbs only".into())),
                };
                verbs_only(source)?;
                for t in &l.targets {
                    verbs_only(t)?;
                    g.add_constraint(&TimePointId::event(source), &TimePointId::speech(t), RelationSet::EQUAL, &l.id)?;
                    reported.insert(t.clone());
                }
            }
            LinkKind::SameTimeframe => {
                for id in l.source.iter().chain(&l.targets) {
                    if !resolve(id)? {
                        return Err(BuildError::InvalidLink(l.id.clone(), "SAME_TIMEFRAME relates verbs only".into()));
                    }
                }
                let pairs: Vec<(&String, &String)> = match &l.source {
                    Some(s) => l.targets.iter().map(|t| (s, t)).collect(),
                    None => l
                        .targets
                        .iter()
                        .enumerate()
                        .flat_map(|(i, a)| l.targets[i + 1..].iter().map(move |b| (a, b)))
                        .collect(),
                };
                for (a, b) in pairs {
                    g.add_constraint(&TimePointId::reference(a), &TimePointId::reference(b), RelationSet::EQUAL, &l.id)?;
                }
            }
        }
    }

    for v in &doc.verbs {
        if v.s.is_none() && !reported.contains(&v.id) {
            g.add_constraint(&TimePointId::speech(&v.id), &TimePointId::Sd, RelationSet::EQUAL, &v.id)?;
        }
    }

    if let Some(time) = &doc.doc.time {
        g.set_anchor(TimePointId::Sd, time.clone());
    }
    for t in &doc.timerefxs {
        if let Some(value) = &t.value {
            g.set_anchor(TimePointId::timex(&t.id), value.clone());
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> TimePointId {
        TimePointId::Named(s.into())
    }

    #[test]
    fn add_constraint_refines() {
        let mut g = ConstraintGraph::new();
        g.add_constraint(&p("a"), &p("b"), RelationSet::BEFORE, "x").unwrap();
        assert_eq!(g.relation(&p("a"), &p("b")), RelationSet::BEFORE);
        assert_eq!(g.relation(&p("b"), &p("a")), RelationSet::AFTER);
        assert_eq!(g.relation(&p("a"), &p("a")), RelationSet::EQUAL);
        assert_eq!(g.relation(&p("a"), &p("c")), RelationSet::FULL);

        let err = g.add_constraint(&p("a"), &p("b"), RelationSet::AFTER, "y").unwrap_err();
        assert_eq!((err.existing, err.added), (RelationSet::BEFORE, RelationSet::AFTER));
        assert_eq!(err.provenance, BTreeSet::from(["x".to_string(), "y".to_string()]));

        let mut g = ConstraintGraph::new();
        g.add_constraint(&p("a"), &p("b"), RelationSet::BEFORE_OR_EQUAL, "x").unwrap();
        g.add_constraint(&p("a"), &p("b"), RelationSet::AFTER_OR_EQUAL, "y").unwrap();
        assert_eq!(g.relation(&p("a"), &p("b")), RelationSet::EQUAL);
    }

    #[test]
    fn reversed_direction_is_stored_canonically() {
        let mut g = ConstraintGraph::new();
        g.add_constraint(&p("b"), &p("a"), RelationSet::BEFORE, "x").unwrap();
        let (a, b, e) = g.edges().next().unwrap();
        assert_eq!((a, b, e.rel), (&p("a"), &p("b"), RelationSet::AFTER));
    }

    #[test]
    fn self_constraints() {
        let mut g = ConstraintGraph::new();
        g.add_constraint(&p("a"), &p("a"), RelationSet::EQUAL, "x").unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(g.add_constraint(&p("a"), &p("a"), RelationSet::BEFORE, "x").is_err());
    }

    #[test]
    fn json_and_dot_shapes() {
        let mut g = ConstraintGraph::new();
        g.add_constraint(&TimePointId::Sd, &TimePointId::event("v1"), RelationSet::AFTER, "v1").unwrap();
        g.set_anchor(TimePointId::Sd, "now");
        let j = g.to_json();
        assert_eq!(j["edges"][0]["a"], "SD");
        assert_eq!(j["edges"][0]["b"], "v1.E");
        assert_eq!(j["edges"][0]["rel"], ">");
        assert_eq!(j["edges"][0]["provenance"][0], "v1");
        assert_eq!(j["anchors"]["SD"], "now");
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"SD\" -> \"v1.E\" [label=\">\"];"), "{dot}");
    }
}
