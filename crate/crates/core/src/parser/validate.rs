use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use regex::Regex;

use super::report::{Issue, IssueCode, Location, ValidationReport};
use crate::algebra::{compose, tense_sr, view_er};
use crate::model::{AnnotatedDocument, LinkKind, PointRef, RelationSet, TargetRef, VerbAnn};

fn time_value_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(now|\d{4}(-\d{2}(-\d{2}(T\d{2}:\d{2}(:\d{2})?)?)?)?)$").unwrap())
}

/// TIMEX-style calendar value (`YYYY`, `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM`, ...)
/// or the literal `now`.
pub fn is_time_value(s: &str) -> bool {
    time_value_re().is_match(s)
}

fn timex_id_shape() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^t\d+$").unwrap())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Entity {
    Verb,
    Timex,
}

/// Checks a parsed document against the annotation rules. Never fails; every
/// problem becomes an issue in the report.
pub fn validate(doc: &AnnotatedDocument) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = HashSet::new();
    let all_ids = doc
        .verbs
        .iter()
        .map(|v| &v.id)
        .chain(doc.timerefxs.iter().map(|t| &t.id))
        .chain(doc.links.iter().map(|l| &l.id));
    for id in all_ids {
        if !seen.insert(id) {
            report.push(Issue::error(
                IssueCode::DuplicateId,
                Location::Element(id.clone()),
                format!("id {id:?} is declared more than once"),
            ));
        }
    }
    let mut entities: HashMap<&str, Entity> = HashMap::new();
    for v in &doc.verbs {
        entities.entry(&v.id).or_insert(Entity::Verb);
    }
    for t in &doc.timerefxs {
        entities.entry(&t.id).or_insert(Entity::Timex);
    }

    if let Some(time) = &doc.doc.time {
        if !is_time_value(time) {
            report.push(Issue::warning(
                IssueCode::BadTimeValue,
                Location::Document,
                format!("doc time {time:?} is not a recognised calendar value"),
            ));
        }
    }

    let token_count = doc.tokens.len();
    let check_target = |report: &mut ValidationReport, id: &str, target: &TargetRef| {
        if target.last() >= token_count {
            report.push(Issue::error(
                IssueCode::TargetOutOfRange,
                Location::Element(id.into()),
                format!("target token {} is beyond the last token ({} tokens)", target.last(), token_count),
            ));
        }
    };

    for t in &doc.timerefxs {
        check_target(&mut report, &t.id, &t.target);
        if let Some(value) = &t.value {
            if !is_time_value(value) {
                report.push(Issue::warning(
                    IssueCode::BadTimeValue,
                    Location::Element(t.id.clone()),
                    format!("value {value:?} is not a recognised calendar value"),
                ));
            }
        }
    }

    for v in &doc.verbs {
        check_target(&mut report, &v.id, &v.target);
        check_verb(&mut report, v, &entities);
    }

    for l in &doc.links {
        let loc = || Location::Element(l.id.clone());
        let mut kinds = Vec::new();
        for r in l.source.iter().chain(&l.targets) {
            match entities.get(r.as_str()) {
                Some(k) => kinds.push(*k),
                None => report.push(Issue::error(IssueCode::DanglingRef, loc(), format!("link refers to undeclared entity {r:?}"))),
            }
        }
        let arity_ok = match (l.kind, &l.source) {
            (LinkKind::Positions | LinkKind::Reports, Some(_)) => !l.targets.is_empty(),
            (LinkKind::Positions | LinkKind::Reports, None) => false,
            (LinkKind::SameTimeframe, Some(_)) => !l.targets.is_empty(),
            (LinkKind::SameTimeframe, None) => l.targets.len() >= 2,
        };
        if !arity_ok {
            let shape = match l.kind {
                LinkKind::SameTimeframe => "one optional source and at least two entities in total",
                _ => "exactly one source and at least one target",
            };
            report.push(Issue::error(IssueCode::LinkArity, loc(), format!("{} link needs {}", l.kind.as_str(), shape)));
        }
        if kinds.len() != l.source.iter().count() + l.targets.len() {
            continue;
        }
        match l.kind {
            LinkKind::Reports | LinkKind::SameTimeframe => {
                if kinds.contains(&Entity::Timex) {
                    report.push(Issue::error(
                        IssueCode::LinkEntityKind,
                        loc(),
                        format!("{} links relate verbs only", l.kind.as_str()),
                    ));
                }
            }
            LinkKind::Positions if arity_ok => {
                let source = kinds[0];
                if kinds[1..].contains(&source) {
                    report.push(Issue::error(
                        IssueCode::LinkEntityKind,
                        loc(),
                        "POSITIONS relates a time expression to a verb".to_string(),
                    ));
                }
            }
            LinkKind::Positions => {}
        }
    }
    report
}

fn check_verb(report: &mut ValidationReport, v: &VerbAnn, entities: &HashMap<&str, Entity>) {
    let loc = || Location::Element(v.id.clone());
    let has_tense = v.view.is_some() && v.tense.is_some();
    if !has_tense && !v.has_relation_attrs() {
        report.push(Issue::error(
            IssueCode::MissingTense,
            loc(),
            "verb has neither view+tense nor any se/er/sr relation",
        ));
    }

    for (attr, point) in [("s", &v.s), ("e", &v.e), ("r", &v.r)] {
        let Some(point) = point else { continue };
        let dangling = match point {
            PointRef::DocCreation => None,
            PointRef::Timex(id) => (entities.get(id.as_str()) != Some(&Entity::Timex)).then(|| format!("undeclared timerefx {id:?}")),
            PointRef::VerbPoint(id, _) => (entities.get(id.as_str()) != Some(&Entity::Verb)).then(|| format!("undeclared verb {id:?}")),
            PointRef::Named(label) => {
                if timex_id_shape().is_match(label) {
                    Some(format!("undeclared timerefx {label:?}"))
                } else if entities.get(label.as_str()) == Some(&Entity::Verb) {
                    Some(format!("{label:?} is a verb id; use #{label}.s, .e or .r"))
                } else {
                    None
                }
            }
        };
        if let Some(msg) = dangling {
            report.push(Issue::error(IssueCode::DanglingRef, loc(), format!("attribute {attr}: {msg}")));
        }
    }

    // Derived relations intersected with explicit ones, then the S-E-R
    // triangle checked for joint satisfiability.
    let mut sr = v.sr.unwrap_or(RelationSet::FULL);
    let mut er = v.er.unwrap_or(RelationSet::FULL);
    let mut se = v.se.unwrap_or(RelationSet::FULL);
    let mut contradictions = Vec::new();
    if let Some(t) = v.tense {
        sr = sr.intersect(tense_sr(t));
        if sr.is_empty() {
            contradictions.push(format!("sr={} contradicts tense {}", v.sr.unwrap(), t.as_str()));
        }
    }
    if let Some(view) = v.view {
        er = er.intersect(view_er(view));
        if er.is_empty() {
            contradictions.push(format!("er={} contradicts view {}", v.er.unwrap(), view.as_str()));
        }
    }
    if contradictions.is_empty() {
        se = se.intersect(compose(sr, er.converse()));
        if se.is_empty() {
            contradictions.push("se, er and sr cannot hold together".to_string());
        }
    }
    for msg in contradictions {
        report.push(Issue::error(IssueCode::ContradictoryTense, loc(), msg));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_rtmml;

    fn codes(xml: &str) -> Vec<IssueCode> {
        validate(&parse_rtmml(xml).unwrap()).issues.into_iter().map(|i| i.code).collect()
    }

    #[test]
    fn dangling_timex_reference() {
        let xml = r##"<rtmml>He ran<verb xml:id="v1" target="#token1" view="simple" tense="past" r="t9"/></rtmml>"##;
        let report = validate(&parse_rtmml(xml).unwrap());
        assert!(!report.is_valid());
        assert_eq!(report.issues[0].code, IssueCode::DanglingRef);
        assert_eq!(report.issues[0].location, Location::Element("v1".into()));
    }

    #[test]
    fn dangling_verb_point_and_link() {
        let xml = r##"<rtmml>He ran<verb xml:id="v1" target="#token1" view="simple" tense="past" e="#v7.e"/>
            <rtmlink xml:id="l1" type="REPORTS"><link source="#v1"/><link target="#v3"/></rtmlink></rtmml>"##;
        assert_eq!(codes(xml), [IssueCode::DanglingRef, IssueCode::DanglingRef]);
    }

    #[test]
    fn named_points_are_fine() {
        let xml = r##"<rtmml>He ran<verb xml:id="v1" target="#token1" view="simple" tense="past" s="sv1"/></rtmml>"##;
        assert!(codes(xml).is_empty());
    }

    #[test]
    fn contradictory_tense() {
        let xml = r##"<rtmml>He ran<verb xml:id="v1" target="#token1" view="simple" tense="past" sr="&lt;"/></rtmml>"##;
        assert_eq!(codes(xml), [IssueCode::ContradictoryTense]);
        let triangle = r##"<rtmml>He ran<verb xml:id="v1" target="#token1" sr=">" er="=" se="&lt;"/></rtmml>"##;
        assert_eq!(codes(triangle), [IssueCode::ContradictoryTense]);
        let fine = r##"<rtmml>He ran<verb xml:id="v1" target="#token1" view="posterior" tense="past" se="=" er=">" sr=">"/></rtmml>"##;
        assert!(codes(fine).is_empty());
    }

    #[test]
    fn missing_tense_and_range() {
        let xml = r##"<rtmml>He ran<verb xml:id="v1" target="#token2" view="simple"/></rtmml>"##;
        assert_eq!(codes(xml), [IssueCode::TargetOutOfRange, IssueCode::MissingTense]);
    }

    #[test]
    fn link_shapes() {
        let base = r##"<rtmml>At noon he ran and sang
            <timerefx xml:id="t1" target="#token1"/>
            <verb xml:id="v1" target="#token3" view="simple" tense="past"/>
            <verb xml:id="v2" target="#token5" view="simple" tense="past"/>"##;
        let with = |link: &str| codes(&format!("{base}{link}</rtmml>"));
        assert!(with(r##"<rtmlink xml:id="l" type="POSITIONS"><link source="#t1"/><link target="#v1"/></rtmlink>"##).is_empty());
        assert!(with(r##"<rtmlink xml:id="l" type="POSITIONS"><link source="#v1"/><link target="#t1"/></rtmlink>"##).is_empty());
        assert_eq!(
            with(r##"<rtmlink xml:id="l" type="POSITIONS"><link target="#t1"/><link target="#v1"/></rtmlink>"##),
            [IssueCode::LinkArity]
        );
        assert_eq!(
            with(r##"<rtmlink xml:id="l" type="POSITIONS"><link source="#v2"/><link target="#v1"/></rtmlink>"##),
            [IssueCode::LinkEntityKind]
        );
        assert_eq!(
            with(r##"<rtmlink xml:id="l" type="SAME_TIMEFRAME"><link target="#v1"/></rtmlink>"##),
            [IssueCode::LinkArity]
        );
        assert_eq!(
            with(r##"<rtmlink xml:id="l" type="SAME_TIMEFRAME"><link target="#v1"/><link target="#t1"/></rtmlink>"##),
            [IssueCode::LinkEntityKind]
        );
        assert_eq!(
            with(r##"<rtmlink xml:id="l" type="REPORTS"><link target="#v1"/><link target="#v2"/></rtmlink>"##),
            [IssueCode::LinkArity]
        );
    }

    #[test]
    fn time_values() {
        for ok in ["now", "1850", "1990-08-15T00:44", "1989-10-30", "1989-10"] {
            assert!(is_time_value(ok), "{ok}");
        }
        for bad in ["yesterday", "1989-W43", "90"] {
            assert!(!is_time_value(bad), "{bad}");
        }
        let xml = r##"<rtmml><doc time="soon"/></rtmml>"##;
        let report = validate(&parse_rtmml(xml).unwrap());
        assert!(report.is_valid());
        assert_eq!(report.issues[0].code, IssueCode::BadTimeValue);
    }
}
