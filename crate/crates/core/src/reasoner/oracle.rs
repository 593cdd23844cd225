//! Exhaustive model enumeration for small graphs.
//!
//! Every model of a point-algebra network is a weak order (points on a line,
//! ties allowed). Enumerating all weak orders of the nodes and keeping those
//! that satisfy every edge gives the exact minimal label of each pair.

use std::collections::BTreeMap;

use crate::graph::ConstraintGraph;
use crate::model::{BasicRelation, RelationSet, TimePointId};

pub const ORACLE_MAX_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("graph has {0} nodes; the oracle handles at most {ORACLE_MAX_NODES}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub consistent: bool,
    /// Minimal label for every node pair `(a, b)` with `a < b`. Empty sets
    /// everywhere when inconsistent.
    pub labels: BTreeMap<(TimePointId, TimePointId), RelationSet>,
}

struct Search<'a> {
    n: usize,
    constraint: &'a [RelationSet],
    /// Block index per placed node; blocks are ordered left to right.
    rank: Vec<usize>,
    blocks: usize,
    seen: Vec<RelationSet>,
    models: usize,
}

fn basic(a: usize, b: usize) -> BasicRelation {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => BasicRelation::Before,
        std::cmp::Ordering::Equal => BasicRelation::Equal,
        std::cmp::Ordering::Greater => BasicRelation::After,
    }
}

impl Search<'_> {
    fn fits(&self, i: usize) -> bool {
        (0..i).all(|j| self.constraint[j * self.n + i].contains(basic(self.rank[j], self.rank[i])))
    }

    // Node `i` goes into one of the existing blocks or into one of the
    // `blocks + 1` gaps around them; this visits each weak order once.
    fn place(&mut self, i: usize) {
        if i == self.n {
            self.models += 1;
            for a in 0..self.n {
                for b in a + 1..self.n {
                    let k = a * self.n + b;
                    self.seen[k] = self.seen[k].union(RelationSet::single(basic(self.rank[a], self.rank[b])));
                }
            }
            return;
        }
        for slot in 0..=2 * self.blocks {
            let gap = slot % 2 == 0;
            let block = slot / 2;
            if gap {
                for r in self.rank[..i].iter_mut() {
                    if *r >= block {
                        *r += 1;
                    }
                }
                self.blocks += 1;
            }
            self.rank[i] = block;
            if self.fits(i) {
                self.place(i + 1);
            }
            if gap {
                for r in self.rank[..i].iter_mut() {
                    if *r > block {
                        *r -= 1;
                    }
                }
                self.blocks -= 1;
            }
        }
    }
}

/// Exact minimal labels by enumerating every weak order of the nodes.
pub fn oracle_minimal_labels(g: &ConstraintGraph) -> Result<OracleResult, OracleError> {
    let nodes: Vec<&TimePointId> = g.nodes().iter().collect();
    let n = nodes.len();
    if n > ORACLE_MAX_NODES {
        return Err(OracleError::TooLarge(n));
    }
    let mut constraint = vec![RelationSet::FULL; n * n];
    for a in 0..n {
        for b in a + 1..n {
            constraint[a * n + b] = g.relation(nodes[a], nodes[b]);
        }
    }
    let mut search = Search {
        n,
        constraint: &constraint,
        rank: vec![0; n],
        blocks: 0,
        seen: vec![RelationSet::EMPTY; n * n],
        models: 0,
    };
    search.place(0);
    let mut labels = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            labels.insert((nodes[a].clone(), nodes[b].clone()), search.seen[a * n + b]);
        }
    }
    Ok(OracleResult { consistent: search.models > 0, labels })
}
