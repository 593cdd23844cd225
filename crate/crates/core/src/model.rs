//! Domain types shared by the parser, graph builder and reasoner.
//!
//! An [`AnnotatedDocument`] is the in-memory form of one RTMML file: the
//! source text, its token segmentation and the standoff annotations that
//! point into it. Nothing here does any reasoning.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

/// A token of the segmented document text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub index: usize,
    pub text: String,
    /// Character (not byte) offset of the first character.
    pub char_start: usize,
    /// Character offset one past the last character.
    pub char_end: usize,
}

/// Token indices referenced by an annotation, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TargetRef(Vec<usize>);

impl TargetRef {
    /// Builds a target from arbitrary indices, sorting and deduplicating them.
    /// Returns `None` for an empty list.
    pub fn new(mut indices: Vec<usize>) -> Option<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            None
        } else {
            Some(TargetRef(indices))
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }
}

impl Serialize for TargetRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// One of the three basic point relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicRelation {
    Before,
    Equal,
    After,
}

impl BasicRelation {
    pub const ALL: [BasicRelation; 3] = [BasicRelation::Before, BasicRelation::Equal, BasicRelation::After];

    pub fn symbol(self) -> char {
        match self {
            BasicRelation::Before => '<',
            BasicRelation::Equal => '=',
            BasicRelation::After => '>',
        }
    }

    const fn bit(self) -> u8 {
        match self {
            BasicRelation::Before => 0b001,
            BasicRelation::Equal => 0b010,
            BasicRelation::After => 0b100,
        }
    }
}

/// A disjunction of basic point relations, stored as a 3-bit membership mask.
///
/// The empty set is representable because intersection can produce it, but it
/// is never stored on a graph edge: it signals an inconsistency.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RelationSet(u8);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);
    pub const BEFORE: RelationSet = RelationSet(0b001);
    pub const EQUAL: RelationSet = RelationSet(0b010);
    pub const AFTER: RelationSet = RelationSet(0b100);
    pub const BEFORE_OR_EQUAL: RelationSet = RelationSet(0b011);
    pub const AFTER_OR_EQUAL: RelationSet = RelationSet(0b110);
    pub const NOT_EQUAL: RelationSet = RelationSet(0b101);
    pub const FULL: RelationSet = RelationSet(0b111);

    /// All seven non-empty relation sets, in mask order.
    pub const NON_EMPTY: [RelationSet; 7] = [
        RelationSet(1),
        RelationSet(2),
        RelationSet(3),
        RelationSet(4),
        RelationSet(5),
        RelationSet(6),
        RelationSet(7),
    ];

    pub const fn from_bits(bits: u8) -> Option<RelationSet> {
        if bits <= 0b111 {
            Some(RelationSet(bits))
        } else {
            None
        }
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub fn single(rel: BasicRelation) -> RelationSet {
        RelationSet(rel.bit())
    }

    pub fn contains(self, rel: BasicRelation) -> bool {
        self.0 & rel.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_full(self) -> bool {
        self == RelationSet::FULL
    }

    pub fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }

    pub fn is_subset_of(self, other: RelationSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 | other.0)
    }

    pub fn basics(self) -> impl Iterator<Item = BasicRelation> {
        BasicRelation::ALL.into_iter().filter(move |b| self.contains(*b))
    }
}

impl FromIterator<BasicRelation> for RelationSet {
    fn from_iter<I: IntoIterator<Item = BasicRelation>>(iter: I) -> Self {
        iter.into_iter().fold(RelationSet::EMPTY, |acc, b| acc.union(RelationSet::single(b)))
    }
}

/// Canonical `<`, `=`, `>` order; the empty set prints as `∅`.
impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        for b in self.basics() {
            write!(f, "{}", b.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationParseError {
    #[error("empty relation set")]
    Empty,
    #[error("unexpected character {0:?} in relation set")]
    BadChar(char),
}

/// Parses a string over `<`, `=`, `>` in any order; duplicates collapse.
/// Whitespace is ignored.
impl FromStr for RelationSet {
    type Err = RelationParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = RelationSet::EMPTY;
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            let b = match c {
                '<' => BasicRelation::Before,
                '=' => BasicRelation::Equal,
                '>' => BasicRelation::After,
                other => return Err(RelationParseError::BadChar(other)),
            };
            set = set.union(RelationSet::single(b));
        }
        if set.is_empty() {
            Err(RelationParseError::Empty)
        } else {
            Ok(set)
        }
    }
}

impl Serialize for RelationSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reichenbach's view: fixes the event point against the reference point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Anterior,
    Simple,
    Posterior,
}

/// Reichenbach's tense: fixes the reference point against speech time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Past,
    Present,
    Future,
}

impl View {
    pub const ALL: [View; 3] = [View::Anterior, View::Simple, View::Posterior];

    pub fn as_str(self) -> &'static str {
        match self {
            View::Anterior => "anterior",
            View::Simple => "simple",
            View::Posterior => "posterior",
        }
    }
}

impl Tense {
    pub const ALL: [Tense; 3] = [Tense::Past, Tense::Present, Tense::Future];

    pub fn as_str(self) -> &'static str {
        match self {
            Tense::Past => "past",
            Tense::Present => "present",
            Tense::Future => "future",
        }
    }
}

impl FromStr for View {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        View::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown view {s:?}"))
    }
}

impl FromStr for Tense {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Tense::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown tense {s:?}"))
    }
}

/// Which of a verb's three Reichenbach points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKind {
    Speech,
    Event,
    Reference,
}

impl PointKind {
    pub const ALL: [PointKind; 3] = [PointKind::Speech, PointKind::Event, PointKind::Reference];

    pub fn letter(self) -> char {
        match self {
            PointKind::Speech => 's',
            PointKind::Event => 'e',
            PointKind::Reference => 'r',
        }
    }

    pub fn from_letter(c: char) -> Option<PointKind> {
        match c.to_ascii_lowercase() {
            's' => Some(PointKind::Speech),
            'e' => Some(PointKind::Event),
            'r' => Some(PointKind::Reference),
            _ => None,
        }
    }
}

/// The value of a verb's `s`, `e` or `r` attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PointRef {
    /// `doc`: the discourse creation time.
    DocCreation,
    /// Id of a declared `<timerefx>`.
    Timex(String),
    /// `#v1.r` style reference to another verb's point.
    VerbPoint(String, PointKind),
    /// Any other label; verbs using the same label share the point.
    Named(String),
}

impl PointRef {
    /// Interprets an attribute value. `is_timex` says whether a bare label
    /// names a declared time expression.
    pub fn parse(raw: &str, is_timex: impl Fn(&str) -> bool) -> Result<PointRef, String> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err("empty point reference".into());
        }
        if raw == "doc" {
            return Ok(PointRef::DocCreation);
        }
        if let Some(rest) = raw.strip_prefix('#') {
            let (verb, kind) = rest
                .rsplit_once('.')
                .ok_or_else(|| format!("point reference {raw:?} lacks a .s/.e/.r suffix"))?;
            let mut chars = kind.chars();
            let kind = match (chars.next().and_then(PointKind::from_letter), chars.next()) {
                (Some(k), None) => k,
                _ => return Err(format!("point reference {raw:?} must end in .s, .e or .r")),
            };
            if verb.is_empty() {
                return Err(format!("point reference {raw:?} has no verb id"));
            }
            return Ok(PointRef::VerbPoint(verb.to_string(), kind));
        }
        if is_timex(raw) {
            Ok(PointRef::Timex(raw.to_string()))
        } else {
            Ok(PointRef::Named(raw.to_string()))
        }
    }
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointRef::DocCreation => f.write_str("doc"),
            PointRef::Timex(id) | PointRef::Named(id) => f.write_str(id),
            PointRef::VerbPoint(v, k) => write!(f, "#{}.{}", v, k.letter()),
        }
    }
}

/// A tensed verbal group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbAnn {
    pub id: String,
    pub target: TargetRef,
    pub view: Option<View>,
    pub tense: Option<Tense>,
    /// Relation of S to E.
    pub se: Option<RelationSet>,
    /// Relation of E to R.
    pub er: Option<RelationSet>,
    /// Relation of S to R.
    pub sr: Option<RelationSet>,
    pub s: Option<PointRef>,
    pub e: Option<PointRef>,
    pub r: Option<PointRef>,
}

impl VerbAnn {
    pub fn new(id: impl Into<String>, target: TargetRef) -> Self {
        VerbAnn {
            id: id.into(),
            target,
            view: None,
            tense: None,
            se: None,
            er: None,
            sr: None,
            s: None,
            e: None,
            r: None,
        }
    }

    pub fn point_ref(&self, kind: PointKind) -> Option<&PointRef> {
        match kind {
            PointKind::Speech => self.s.as_ref(),
            PointKind::Event => self.e.as_ref(),
            PointKind::Reference => self.r.as_ref(),
        }
    }

    pub fn has_relation_attrs(&self) -> bool {
        self.se.is_some() || self.er.is_some() || self.sr.is_some()
    }
}

/// A time-referring expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeRefAnn {
    pub id: String,
    pub target: TargetRef,
    pub value: Option<String>,
}

/// Document-level speech time.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DocAnn {
    pub time: Option<String>,
    /// Kept verbatim; carries no meaning for reasoning.
    pub modifier: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LinkKind {
    /// T_a = R_b
    Positions,
    /// R_a = R_b [= R_c ...]
    SameTimeframe,
    /// E_a = S_b
    Reports,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Positions => "POSITIONS",
            LinkKind::SameTimeframe => "SAME_TIMEFRAME",
            LinkKind::Reports => "REPORTS",
        }
    }
}

impl FromStr for LinkKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "POSITIONS" => Ok(LinkKind::Positions),
            "SAME_TIMEFRAME" => Ok(LinkKind::SameTimeframe),
            "REPORTS" => Ok(LinkKind::Reports),
            other => Err(format!("unknown link type {other:?}")),
        }
    }
}

/// An `<rtmlink>`. Entity refs are verb or timerefx ids without the `#`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkAnn {
    pub id: String,
    pub kind: LinkKind,
    pub source: Option<String>,
    pub targets: Vec<String>,
}

/// Identity of an abstract time point in a document.
///
/// The derived ordering is the canonical node order used for edge direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimePointId {
    Sd,
    Verb(String, PointKind),
    Timex(String),
    Named(String),
}

impl TimePointId {
    pub fn speech(verb: &str) -> Self {
        TimePointId::Verb(verb.to_string(), PointKind::Speech)
    }

    pub fn event(verb: &str) -> Self {
        TimePointId::Verb(verb.to_string(), PointKind::Event)
    }

    pub fn reference(verb: &str) -> Self {
        TimePointId::Verb(verb.to_string(), PointKind::Reference)
    }

    pub fn timex(id: &str) -> Self {
        TimePointId::Timex(id.to_string())
    }

    pub fn is_event(&self) -> bool {
        matches!(self, TimePointId::Verb(_, PointKind::Event))
    }
}

/// `SD`, `v1.E`, `t1`, `named:label`.
impl fmt::Display for TimePointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimePointId::Sd => f.write_str("SD"),
            TimePointId::Verb(v, k) => write!(f, "{}.{}", v, k.letter().to_ascii_uppercase()),
            TimePointId::Timex(t) => f.write_str(t),
            TimePointId::Named(l) => write!(f, "named:{l}"),
        }
    }
}

/// Inverse of `Display`. The point letter after `.` is case-insensitive and
/// `sd` is accepted for `SD`; any other bare name is a timerefx id.
impl FromStr for TimePointId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err("empty point name".into());
        }
        if s.eq_ignore_ascii_case("sd") {
            return Ok(TimePointId::Sd);
        }
        if let Some(label) = s.strip_prefix("named:") {
            return Ok(TimePointId::Named(label.to_string()));
        }
        if let Some((verb, letter)) = s.rsplit_once('.') {
            let mut chars = letter.chars();
            return match (chars.next().and_then(PointKind::from_letter), chars.next()) {
                (Some(k), None) if !verb.is_empty() => Ok(TimePointId::Verb(verb.to_string(), k)),
                _ => Err(format!("bad point name {s:?}; expected <verb>.s, <verb>.e or <verb>.r")),
            };
        }
        Ok(TimePointId::Timex(s.to_string()))
    }
}

impl Serialize for TimePointId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A parsed RTMML document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotatedDocument {
    pub text: String,
    pub tokens: Vec<Token>,
    pub doc: DocAnn,
    pub verbs: Vec<VerbAnn>,
    pub timerefxs: Vec<TimeRefAnn>,
    pub links: Vec<LinkAnn>,
}

impl AnnotatedDocument {
    /// Builds a document from text, segmenting it with the standard tokenizer.
    pub fn from_text(text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = crate::tokenizer::tokenize(&text);
        AnnotatedDocument { text, tokens, ..Default::default() }
    }

    pub fn verb(&self, id: &str) -> Option<&VerbAnn> {
        self.verbs.iter().find(|v| v.id == id)
    }

    pub fn timerefx(&self, id: &str) -> Option<&TimeRefAnn> {
        self.timerefxs.iter().find(|t| t.id == id)
    }

    /// The surface text covered by a target, tokens joined by single spaces.
    pub fn target_text(&self, target: &TargetRef) -> String {
        target
            .indices()
            .iter()
            .filter_map(|&i| self.tokens.get(i))
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_set_parses_any_order() {
        assert_eq!("<=".parse::<RelationSet>().unwrap(), RelationSet::BEFORE_OR_EQUAL);
        assert_eq!("=<".parse::<RelationSet>().unwrap(), RelationSet::BEFORE_OR_EQUAL);
        assert_eq!("<<".parse::<RelationSet>().unwrap(), RelationSet::BEFORE);
        assert_eq!("><".parse::<RelationSet>().unwrap().to_string(), "<>");
        assert_eq!("".parse::<RelationSet>(), Err(RelationParseError::Empty));
        assert_eq!("<x".parse::<RelationSet>(), Err(RelationParseError::BadChar('x')));
    }

    #[test]
    fn point_ref_forms() {
        let timex = |s: &str| s == "t1";
        assert_eq!(PointRef::parse("doc", timex).unwrap(), PointRef::DocCreation);
        assert_eq!(PointRef::parse("t1", timex).unwrap(), PointRef::Timex("t1".into()));
        assert_eq!(
            PointRef::parse("#v1.r", timex).unwrap(),
            PointRef::VerbPoint("v1".into(), PointKind::Reference)
        );
        assert_eq!(PointRef::parse("sv2", timex).unwrap(), PointRef::Named("sv2".into()));
        assert!(PointRef::parse("#v1", timex).is_err());
        assert!(PointRef::parse("#v1.x", timex).is_err());
    }

    #[test]
    fn target_ref_normalizes() {
        let t = TargetRef::new(vec![5, 3, 5]).unwrap();
        assert_eq!(t.indices(), &[3, 5]);
        assert!(TargetRef::new(vec![]).is_none());
    }

    #[test]
    fn point_display() {
        assert_eq!(TimePointId::event("v1").to_string(), "v1.E");
        assert_eq!(TimePointId::Sd.to_string(), "SD");
        assert!(TimePointId::Sd < TimePointId::speech("a"));
    }

    #[test]
    fn point_names_round_trip() {
        for p in [TimePointId::Sd, TimePointId::event("v1"), TimePointId::reference("a.b"), TimePointId::timex("t1"), TimePointId::Named("x".into())] {
            assert_eq!(p.to_string().parse::<TimePointId>().unwrap(), p);
        }
        assert_eq!("v2.s".parse::<TimePointId>().unwrap(), TimePointId::speech("v2"));
        assert_eq!("sd".parse::<TimePointId>().unwrap(), TimePointId::Sd);
        assert!("v1.x".parse::<TimePointId>().is_err());
        assert!("".parse::<TimePointId>().is_err());
    }
}
