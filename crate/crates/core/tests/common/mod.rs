#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rtmml::{ConstraintGraph, RelationSet, TimePointId};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub const RTMML_FIXTURES: [&str; 10] = [
    "yesterday.rtmml",
    "yesterday_link.rtmml",
    "example4.rtmml",
    "copperfield.rtmml",
    "saddam.rtmml",
    "wsj_0533.rtmml",
    "strict_cycle.rtmml",
    "dangling.rtmml",
    "single_verb.rtmml",
    "two_voices.rtmml",
];

pub fn point(i: usize) -> TimePointId {
    TimePointId::Named(format!("n{i}"))
}

/// A random edge list over `n` points: each pair is constrained with
/// probability `density`, with a uniformly chosen non-empty label.
pub fn random_edges<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<(TimePointId, TimePointId, RelationSet)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                let rel = *RelationSet::NON_EMPTY.choose(rng).unwrap();
                if rng.gen_bool(0.5) {
                    edges.push((point(a), point(b), rel));
                } else {
                    edges.push((point(b), point(a), rel.converse()));
                }
            }
        }
    }
    edges
}

pub fn graph_of(n: usize, edges: &[(TimePointId, TimePointId, RelationSet)]) -> ConstraintGraph {
    let mut g = ConstraintGraph::new();
    for i in 0..n {
        g.add_node(point(i));
    }
    for (a, b, r) in edges {
        g.add_constraint(a, b, *r, "gen").expect("a fresh edge list has no repeated pairs");
    }
    g
}

/// Every pair label of a graph, read through `relation`.
pub fn labels(g: &ConstraintGraph) -> Vec<RelationSet> {
    let nodes: Vec<_> = g.nodes().iter().collect();
    let mut out = Vec::new();
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            out.push(g.relation(a, b));
        }
    }
    out
}
