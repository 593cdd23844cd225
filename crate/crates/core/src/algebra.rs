//! Qualitative point algebra over `{<, =, >}` and the Reichenbach tense table.
//!
//! Relations are read left to right: `compose(ab, bc)` takes the relation of
//! `a` to `b` and of `b` to `c` and yields the possible relations of `a` to `c`.

use serde::Serialize;

use crate::model::{BasicRelation, RelationSet, Tense, View};

/// Composition of two basic relations.
fn compose_basic(a: BasicRelation, b: BasicRelation) -> RelationSet {
    use BasicRelation::*;
    match (a, b) {
        (Equal, x) | (x, Equal) => RelationSet::single(x),
        (Before, Before) => RelationSet::BEFORE,
        (After, After) => RelationSet::AFTER,
        (Before, After) | (After, Before) => RelationSet::FULL,
    }
}

// Indexed by the two 3-bit masks.
fn composition_table() -> &'static [[RelationSet; 8]; 8] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[[RelationSet; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[RelationSet::EMPTY; 8]; 8];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let r1 = RelationSet::from_bits(i as u8).unwrap();
                let r2 = RelationSet::from_bits(j as u8).unwrap();
                let mut out = RelationSet::EMPTY;
                for a in r1.basics() {
                    for b in r2.basics() {
                        out = out.union(compose_basic(a, b));
                    }
                }
                *cell = out;
            }
        }
        table
    })
}

/// Relation of `a` to `c`, given `a`–`b` and `b`–`c`.
pub fn compose(r1: RelationSet, r2: RelationSet) -> RelationSet {
    composition_table()[r1.bits() as usize][r2.bits() as usize]
}

/// Conjunction of two constraints on the same pair. An empty result means
/// the constraints cannot both hold.
pub fn intersect(r1: RelationSet, r2: RelationSet) -> RelationSet {
    RelationSet::from_bits(r1.bits() & r2.bits()).unwrap()
}

/// The same constraint read in the other direction.
pub fn converse(r: RelationSet) -> RelationSet {
    r.basics()
        .map(|b| match b {
            BasicRelation::Before => BasicRelation::After,
            BasicRelation::After => BasicRelation::Before,
            BasicRelation::Equal => BasicRelation::Equal,
        })
        .collect()
}

impl RelationSet {
    pub fn compose(self, other: RelationSet) -> RelationSet {
        compose(self, other)
    }

    pub fn intersect(self, other: RelationSet) -> RelationSet {
        intersect(self, other)
    }

    pub fn converse(self) -> RelationSet {
        converse(self)
    }
}

/// Relations among a verb's S, E and R implied by view and tense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TenseRelations {
    /// S relative to R.
    pub sr: RelationSet,
    /// E relative to R.
    pub er: RelationSet,
    /// S relative to E.
    pub se: RelationSet,
}

/// S–R relation fixed by the tense.
pub fn tense_sr(tense: Tense) -> RelationSet {
    match tense {
        Tense::Past => RelationSet::AFTER,
        Tense::Present => RelationSet::EQUAL,
        Tense::Future => RelationSet::BEFORE,
    }
}

/// E–R relation fixed by the view.
pub fn view_er(view: View) -> RelationSet {
    match view {
        View::Anterior => RelationSet::BEFORE,
        View::Simple => RelationSet::EQUAL,
        View::Posterior => RelationSet::AFTER,
    }
}

/// Canonical decomposition of a (view, tense) pair. `se` is whatever the
/// S–R–E chain allows and may be disjunctive (posterior past, anterior future).
pub fn tense_to_relations(view: View, tense: Tense) -> TenseRelations {
    let sr = tense_sr(tense);
    let er = view_er(view);
    TenseRelations { sr, er, se: compose(sr, converse(er)) }
}

/// A (view, tense) pair with its table names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TenseProfile {
    pub view: View,
    pub tense: Tense,
    pub sr: RelationSet,
    pub er: RelationSet,
    pub reichenbach_name: Option<&'static str>,
    pub english_name: Option<&'static str>,
}

/// One row of the classic arrangement table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrangement {
    /// e.g. `"E<R<S"`.
    pub pattern: &'static str,
    pub view: View,
    pub tense: Tense,
    pub reichenbach_name: Option<&'static str>,
    pub english_name: Option<&'static str>,
    pub example: Option<&'static str>,
}

macro_rules! row {
    ($p:expr, $v:ident, $t:ident, $rn:expr, $en:expr, $ex:expr) => {
        Arrangement {
            pattern: $p,
            view: View::$v,
            tense: Tense::$t,
            reichenbach_name: $rn,
            english_name: $en,
            example: $ex,
        }
    };
}

/// The thirteen S/E/R arrangements, each grouped under its (view, tense).
pub const ARRANGEMENTS: [Arrangement; 13] = [
    row!("E<R<S", Anterior, Past, Some("Anterior past"), Some("Past perfect"), Some("I had slept")),
    row!("E=R<S", Simple, Past, Some("Simple past"), Some("Simple past"), Some("I slept")),
    row!("R<E<S", Posterior, Past, Some("Posterior past"), None, Some("I expected that ..")),
    row!("R<S=E", Posterior, Past, None, None, Some("I would sleep")),
    row!("R<S<E", Posterior, Past, None, None, None),
    row!("E<S=R", Anterior, Present, Some("Anterior present"), Some("Present perfect"), Some("I have slept")),
    row!("S=R=E", Simple, Present, Some("Simple present"), Some("Simple present"), Some("I sleep")),
    row!("S=R<E", Posterior, Present, Some("Posterior present"), Some("Simple future"), Some("I will sleep (Je vais dormir)")),
    row!("S<E<R", Anterior, Future, Some("Anterior future"), Some("Future perfect"), Some("I will have slept")),
    row!("S=E<R", Anterior, Future, None, None, None),
    row!("E<S<R", Anterior, Future, None, None, None),
    row!("S<R=E", Simple, Future, Some("Simple future"), Some("Simple future"), Some("I will sleep (Je dormirai)")),
    row!("S<R<E", Posterior, Future, Some("Posterior future"), None, Some("I shall be going to sleep")),
];

fn profile_names(view: View, tense: Tense) -> (Option<&'static str>, Option<&'static str>) {
    ARRANGEMENTS
        .iter()
        .find(|a| a.view == view && a.tense == tense && a.reichenbach_name.is_some())
        .map(|a| (a.reichenbach_name, a.english_name))
        .unwrap_or((None, None))
}

pub fn tense_profile(view: View, tense: Tense) -> TenseProfile {
    let rel = tense_to_relations(view, tense);
    let (reichenbach_name, english_name) = profile_names(view, tense);
    TenseProfile { view, tense, sr: rel.sr, er: rel.er, reichenbach_name, english_name }
}

/// Inverse of [`tense_to_relations`] on singleton inputs.
pub fn classify_tense(sr: RelationSet, er: RelationSet) -> Option<TenseProfile> {
    if !sr.is_singleton() || !er.is_singleton() {
        return None;
    }
    let tense = Tense::ALL.into_iter().find(|&t| tense_sr(t) == sr)?;
    let view = View::ALL.into_iter().find(|&v| view_er(v) == er)?;
    Some(tense_profile(view, tense))
}

/// Looks up the table row matching three singleton relations, if that
/// arrangement is one of the thirteen.
pub fn classify_arrangement(sr: RelationSet, er: RelationSet, se: RelationSet) -> Option<&'static Arrangement> {
    ARRANGEMENTS.iter().find(|a| a.singleton_relations() == Some(TenseRelations { sr, er, se }))
}

impl Arrangement {
    /// Pairwise relations (sr, er, se) of the arrangement, read off its pattern.
    pub fn singleton_relations(&self) -> Option<TenseRelations> {
        let mut rank = [None::<usize>; 3];
        let mut level = 0usize;
        let mut chars = self.pattern.chars().peekable();
        while let Some(c) = chars.next() {
            let slot = match c {
                'S' => 0,
                'E' => 1,
                'R' => 2,
                _ => return None,
            };
            rank[slot] = Some(level);
            match chars.next() {
                Some('<') => level += 1,
                Some('=') | None => {}
                Some(_) => return None,
            }
        }
        let [s, e, r] = [rank[0]?, rank[1]?, rank[2]?];
        let rel = |a: usize, b: usize| match a.cmp(&b) {
            std::cmp::Ordering::Less => RelationSet::BEFORE,
            std::cmp::Ordering::Equal => RelationSet::EQUAL,
            std::cmp::Ordering::Greater => RelationSet::AFTER,
        };
        Some(TenseRelations { sr: rel(s, r), er: rel(e, r), se: rel(s, e) })
    }
}
