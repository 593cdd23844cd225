//! Path-consistency closure and the queries built on top of it.
//!
//! [`close`] runs an agenda-driven triangle refinement to a fixpoint. For the
//! point algebra this decides consistency, and it yields minimal labels as
//! long as no edge carries the `<>` (not-equal) label. When one does, labels
//! may be looser than the tightest possible ones; [`Verdict`] says which case
//! applies. The exhaustive [`oracle_minimal_labels`] gives exact labels for
//! small graphs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use crate::graph::{dot_id, ConstraintGraph, Edge};
use crate::model::{RelationSet, TimePointId};

mod oracle;

pub use oracle::{oracle_minimal_labels, OracleError, OracleResult, ORACLE_MAX_NODES};

/// The first triangle whose refinement emptied an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub triangle: [TimePointId; 3],
    pub provenance: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Consistent, and every label is minimal.
    GloballyConsistent,
    /// Consistent; some `<>` label is present, so labels may not be minimal.
    PathConsistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureResult {
    /// The refined graph. On inconsistency this is the input graph unchanged.
    pub graph: ConstraintGraph,
    pub consistent: bool,
    pub conflict: Option<Conflict>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("unknown time point {0}")]
    UnknownPoint(TimePointId),
    #[error("the constraint graph is inconsistent")]
    Inconsistent,
}

struct Matrix {
    n: usize,
    rel: Vec<RelationSet>,
    prov: Vec<BTreeSet<String>>,
}

impl Matrix {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    fn get(&self, i: usize, j: usize) -> RelationSet {
        self.rel[self.idx(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, r: RelationSet) {
        let (a, b) = (self.idx(i, j), self.idx(j, i));
        self.rel[a] = r;
        self.rel[b] = r.converse();
    }

    fn prov(&self, i: usize, j: usize) -> &BTreeSet<String> {
        let (i, j) = (i.min(j), i.max(j));
        &self.prov[self.idx(i, j)]
    }

    fn merge_prov(&mut self, target: (usize, usize), from: [(usize, usize); 2]) {
        let mut merged = BTreeSet::new();
        for (a, b) in from {
            merged.extend(self.prov(a, b).iter().cloned());
        }
        let (i, j) = (target.0.min(target.1), target.0.max(target.1));
        let k = self.idx(i, j);
        self.prov[k].extend(merged);
    }
}

/// Closes the graph under path consistency.
///
/// The agenda is FIFO over canonical pairs, seeded with every explicit edge.
/// Processing `(i, j)` refines `(i, k)` through `j` and `(k, j)` through `i`
/// for every third node `k`; changed edges are re-queued unless already
/// pending.
pub fn close(g: &ConstraintGraph) -> ClosureResult {
    let nodes: Vec<TimePointId> = g.nodes().iter().cloned().collect();
    let index: BTreeMap<&TimePointId, usize> = nodes.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = nodes.len();
    let mut m = Matrix { n, rel: vec![RelationSet::FULL; n * n], prov: vec![BTreeSet::new(); n * n] };
    for i in 0..n {
        let k = m.idx(i, i);
        m.rel[k] = RelationSet::EQUAL;
    }

    let mut agenda = VecDeque::new();
    let mut pending = BTreeSet::new();
    let mut explicit = BTreeSet::new();
    for (a, b, e) in g.edges() {
        let (i, j) = (index[a], index[b]);
        m.set(i, j, e.rel);
        let k = m.idx(i, j);
        m.prov[k] = e.provenance.clone();
        explicit.insert((i, j));
        agenda.push_back((i, j));
        pending.insert((i, j));
    }

    while let Some((i, j)) = agenda.pop_front() {
        pending.remove(&(i, j));
        for k in 0..n {
            if k == i || k == j {
                continue;
            }
            // (i,k) ⊆ (i,j)∘(j,k)
            let revised = m.get(i, k).intersect(m.get(i, j).compose(m.get(j, k)));
            if revised != m.get(i, k) {
                m.set(i, k, revised);
                m.merge_prov((i, k), [(i, j), (j, k)]);
                if revised.is_empty() {
                    return inconsistent(g, &nodes, &m, [i, j, k]);
                }
                let key = (i.min(k), i.max(k));
                if pending.insert(key) {
                    agenda.push_back(key);
                }
            }
            // (k,j) ⊆ (k,i)∘(i,j)
            let revised = m.get(k, j).intersect(m.get(k, i).compose(m.get(i, j)));
            if revised != m.get(k, j) {
                m.set(k, j, revised);
                m.merge_prov((k, j), [(k, i), (i, j)]);
                if revised.is_empty() {
                    return inconsistent(g, &nodes, &m, [i, j, k]);
                }
                let key = (k.min(j), k.max(j));
                if pending.insert(key) {
                    agenda.push_back(key);
                }
            }
        }
    }

    let mut closed = g.without_edges();
    for i in 0..n {
        for j in i + 1..n {
            let rel = m.get(i, j);
            if rel.is_full() && !explicit.contains(&(i, j)) {
                continue;
            }
            closed.insert_edge(nodes[i].clone(), nodes[j].clone(), Edge { rel, provenance: m.prov(i, j).clone() });
        }
    }
    ClosureResult { graph: closed, consistent: true, conflict: None }
}

fn inconsistent(g: &ConstraintGraph, nodes: &[TimePointId], m: &Matrix, [i, j, k]: [usize; 3]) -> ClosureResult {
    let mut provenance = BTreeSet::new();
    for (a, b) in [(i, j), (j, k), (i, k)] {
        provenance.extend(m.prov(a, b).iter().cloned());
    }
    let mut triangle = [nodes[i].clone(), nodes[j].clone(), nodes[k].clone()];
    triangle.sort();
    ClosureResult { graph: g.clone(), consistent: false, conflict: Some(Conflict { triangle, provenance }) }
}

impl ClosureResult {
    pub fn verdict(&self) -> Verdict {
        if !self.consistent {
            Verdict::Inconsistent
        } else if self.graph.edges().any(|(_, _, e)| e.rel == RelationSet::NOT_EQUAL) {
            Verdict::PathConsistent
        } else {
            Verdict::GloballyConsistent
        }
    }

    /// Closed label from `a` to `b`.
    pub fn query(&self, a: &TimePointId, b: &TimePointId) -> Result<RelationSet, QueryError> {
        query_relation(self, a, b)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.graph.to_json();
        v["consistent"] = json!(self.consistent);
        v["verdict"] = json!(self.verdict());
        v["conflict"] = match &self.conflict {
            Some(c) => json!({
                "triangle": c.triangle.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "provenance": c.provenance,
            }),
            None => serde_json::Value::Null,
        };
        v
    }
}

pub fn query_relation(res: &ClosureResult, a: &TimePointId, b: &TimePointId) -> Result<RelationSet, QueryError> {
    if !res.consistent {
        return Err(QueryError::Inconsistent);
    }
    for p in [a, b] {
        if !res.graph.contains(p) {
            return Err(QueryError::UnknownPoint(p.clone()));
        }
    }
    Ok(res.graph.relation(a, b))
}

/// Event points grouped into classes of simultaneous points, with the
/// covering (Hasse) edges of the strict order between classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventOrder {
    pub classes: Vec<Vec<TimePointId>>,
    /// `(earlier, later)` class indices, transitively reduced.
    pub hasse: Vec<(usize, usize)>,
    /// Class pairs that are neither equal nor strictly ordered, with their label.
    pub incomparable: Vec<(usize, usize, RelationSet)>,
}

/// Summarises the closed order over E points, plus T points if asked.
pub fn event_order(res: &ClosureResult, include_times: bool) -> Result<EventOrder, QueryError> {
    if !res.consistent {
        return Err(QueryError::Inconsistent);
    }
    let g = &res.graph;
    let points: Vec<&TimePointId> = g
        .nodes()
        .iter()
        .filter(|p| p.is_event() || (include_times && matches!(p, TimePointId::Timex(_))))
        .collect();

    let mut classes: Vec<Vec<TimePointId>> = Vec::new();
    'next: for p in points {
        for class in classes.iter_mut() {
            if g.relation(&class[0], p) == RelationSet::EQUAL {
                class.push(p.clone());
                continue 'next;
            }
        }
        classes.push(vec![p.clone()]);
    }

    let n = classes.len();
    let mut before = vec![vec![false; n]; n];
    let mut incomparable = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let rel = g.relation(&classes[i][0], &classes[j][0]);
            if rel == RelationSet::BEFORE {
                before[i][j] = true;
            } else if rel == RelationSet::AFTER {
                before[j][i] = true;
            } else {
                incomparable.push((i, j, rel));
            }
        }
    }
    let mut hasse = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if before[i][j] && !(0..n).any(|k| before[i][k] && before[k][j]) {
                hasse.push((i, j));
            }
        }
    }
    Ok(EventOrder { classes, hasse, incomparable })
}

impl EventOrder {
    fn class_label(&self, i: usize) -> String {
        self.classes[i].iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" = ")
    }

    /// Plain text: class list, then `earlier < later` lines between class
    /// representatives, then incomparable pairs.
    pub fn to_text(&self) -> String {
        let mut out = String::from("classes:\n");
        for i in 0..self.classes.len() {
            let _ = writeln!(out, "  {}", self.class_label(i));
        }
        out.push_str("order:\n");
        for &(a, b) in &self.hasse {
            let _ = writeln!(out, "  {} < {}", self.classes[a][0], self.classes[b][0]);
        }
        out.push_str("incomparable:\n");
        for &(a, b, rel) in &self.incomparable {
            let _ = writeln!(out, "  {} {} {}", self.classes[a][0], rel, self.classes[b][0]);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rep = |i: usize| self.classes[i][0].to_string();
        json!({
            "classes": self.classes.iter().map(|c| c.iter().map(|p| p.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "edges": self.hasse.iter().map(|&(a, b)| json!({"from": rep(a), "to": rep(b)})).collect::<Vec<_>>(),
            "incomparable": self.incomparable.iter().map(|&(a, b, r)| json!({"a": rep(a), "b": rep(b), "rel": r.to_string()})).collect::<Vec<_>>(),
        })
    }

    /// Hasse diagram as a DOT digraph, one node per class.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph event_order {\n  rankdir=LR;\n");
        for i in 0..self.classes.len() {
            let _ = writeln!(out, "  c{} [label={}];", i, dot_id(&self.class_label(i)));
        }
        for &(a, b) in &self.hasse {
            let _ = writeln!(out, "  c{a} -> c{b};");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorRelation {
    #[serde(rename = "=")]
    Equal,
    Before,
    After,
}

impl AnchorRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            AnchorRelation::Equal => "=",
            AnchorRelation::Before => "before",
            AnchorRelation::After => "after",
        }
    }
}

/// A point placed relative to a calendar-anchored point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnchorFact {
    pub point: TimePointId,
    pub relation: AnchorRelation,
    pub anchor: TimePointId,
    pub value: String,
}

/// For every anchored point, lists the other points known to be equal to,
/// before or after it.
pub fn anchor_report(res: &ClosureResult) -> Result<Vec<AnchorFact>, QueryError> {
    if !res.consistent {
        return Err(QueryError::Inconsistent);
    }
    let g = &res.graph;
    let mut facts = Vec::new();
    for (anchor, value) in g.anchors() {
        for q in g.nodes() {
            if q == anchor {
                continue;
            }
            let rel = g.relation(q, anchor);
            let relation = if rel == RelationSet::EQUAL {
                AnchorRelation::Equal
            } else if rel.is_subset_of(RelationSet::BEFORE) {
                AnchorRelation::Before
            } else if rel.is_subset_of(RelationSet::AFTER) {
                AnchorRelation::After
            } else {
                continue;
            };
            facts.push(AnchorFact { point: q.clone(), relation, anchor: anchor.clone(), value: value.clone() });
        }
    }
    Ok(facts)
}

/// Whether any explicit edge is exactly `<>`.
pub fn has_not_equal(g: &ConstraintGraph) -> bool {
    g.edges().any(|(_, _, e)| e.rel == RelationSet::NOT_EQUAL)
}
