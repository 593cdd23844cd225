//! Import of TimeML `EVENT`/`MAKEINSTANCE`/`TIMEX3` annotation.
//!
//! TimeML's `tense` only speaks about S against E, and its `aspect` only
//! separates E before R (`PERFECTIVE`) from E at-or-after R (`NONE`). Imported
//! verbs therefore carry `se` and `er` relation sets and no view or tense;
//! `sr` stays unconstrained. Anything not licensed by those two attributes
//! maps to the full relation set. TLINKs and other link elements are ignored.

use std::collections::HashMap;

use roxmltree::Node;

use crate::model::{AnnotatedDocument, RelationSet, TargetRef, TimeRefAnn, VerbAnn};
use crate::parser::{Issue, IssueCode, Location};
use crate::tokenizer::tokenize;

#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error("malformed XML: {0}")]
    Xml(#[from] roxmltree::Error),
}

/// One `MAKEINSTANCE` joined with its `EVENT`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimemlEventInstance {
    pub event_id: String,
    pub instance_id: String,
    pub target: TargetRef,
    pub tense: Option<String>,
    pub aspect: Option<String>,
    pub pos: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Imported {
    pub document: AnnotatedDocument,
    pub instances: Vec<TimemlEventInstance>,
    pub warnings: Vec<Issue>,
}

/// S–E relation for a TimeML tense value.
pub fn se_from_tense(tense: Option<&str>) -> RelationSet {
    match tense {
        Some("PAST") => RelationSet::AFTER,
        Some("PRESENT") => RelationSet::EQUAL,
        Some("FUTURE") => RelationSet::BEFORE,
        _ => RelationSet::FULL,
    }
}

/// E–R relation for a TimeML aspect value.
pub fn er_from_aspect(aspect: Option<&str>) -> RelationSet {
    match aspect {
        Some("PERFECTIVE") => RelationSet::BEFORE,
        Some("NONE") => RelationSet::AFTER_OR_EQUAL,
        _ => RelationSet::FULL,
    }
}

#[derive(Default)]
struct Body {
    text: String,
    chars: usize,
    /// (eid, char span)
    events: Vec<(String, usize, usize)>,
    /// (tid, value, char span)
    timexes: Vec<(String, Option<String>, usize, usize)>,
}

fn is_creation_time(node: Node) -> bool {
    node.attribute("functionInDocument") == Some("CREATION_TIME")
        || node.ancestors().any(|a| a.tag_name().name() == "DCT")
}

impl Body {
    fn walk(&mut self, node: Node) {
        for child in node.children() {
            if let Some(t) = child.text().filter(|_| child.is_text()) {
                self.text.push_str(t);
                self.chars += t.chars().count();
                continue;
            }
            if !child.is_element() {
                continue;
            }
            match child.tag_name().name() {
                "DOCID" | "DCT" => {}
                "TIMEX3" if is_creation_time(child) => {}
                name @ ("EVENT" | "TIMEX3") => {
                    let start = self.chars;
                    self.walk(child);
                    let end = self.chars;
                    let id_attr = if name == "EVENT" { "eid" } else { "tid" };
                    if let Some(id) = child.attribute(id_attr) {
                        if name == "EVENT" {
                            self.events.push((id.to_string(), start, end));
                        } else {
                            self.timexes.push((id.to_string(), child.attribute("value").map(str::to_string), start, end));
                        }
                    }
                }
                _ => self.walk(child),
            }
        }
    }
}

pub fn import_timeml(xml: &str) -> Result<Imported, ImportError> {
    let tree = roxmltree::Document::parse(xml)?;
    let root = tree.root_element();
    // Creation time may sit outside <TEXT>, so look for it in the whole tree.
    let creation_time = root
        .descendants()
        .find(|d| d.tag_name().name() == "TIMEX3" && is_creation_time(*d))
        .and_then(|tx| tx.attribute("value"))
        .map(str::to_string);
    let mut body = Body::default();
    let text_root = root.descendants().find(|d| d.tag_name().name() == "TEXT").unwrap_or(root);
    body.walk(text_root);

    let raw_tokens = tokenize(&body.text);
    let covering = |start: usize, end: usize| {
        let hits = raw_tokens
            .iter()
            .filter(|t| t.char_start < end && start < t.char_end)
            .map(|t| t.index)
            .collect();
        TargetRef::new(hits)
    };

    // Token indices only depend on whitespace boundaries, so collapsing runs
    // of whitespace keeps every span valid.
    let text = body.text.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut doc = AnnotatedDocument::from_text(&text);
    doc.doc.time = creation_time;
    let mut warnings = Vec::new();

    for (tid, value, start, end) in &body.timexes {
        match covering(*start, *end) {
            Some(target) => doc.timerefxs.push(TimeRefAnn { id: tid.clone(), target, value: value.clone() }),
            None => warnings.push(Issue::warning(IssueCode::EmptyExtent, Location::Element(tid.clone()), "TIMEX3 covers no token; skipped")),
        }
    }

    let mut event_targets: HashMap<&str, Option<TargetRef>> = HashMap::new();
    let mut event_nodes: HashMap<&str, Node> = HashMap::new();
    for (eid, start, end) in &body.events {
        event_targets.insert(eid, covering(*start, *end));
    }
    for ev in root.descendants().filter(|d| d.tag_name().name() == "EVENT") {
        if let Some(eid) = ev.attribute("eid") {
            event_nodes.insert(eid, ev);
        }
    }

    let mut instances = Vec::new();
    let mut instantiated = std::collections::HashSet::new();
    for mi in root.descendants().filter(|d| d.tag_name().name() == "MAKEINSTANCE") {
        let (Some(eid), Some(eiid)) = (mi.attribute("eventID"), mi.attribute("eiid")) else {
            warnings.push(Issue::warning(IssueCode::MissingInstance, Location::Document, "MAKEINSTANCE without eventID or eiid; skipped"));
            continue;
        };
        instantiated.insert(eid);
        let Some(target) = event_targets.get(eid) else {
            warnings.push(Issue::warning(
                IssueCode::DanglingRef,
                Location::Element(eiid.to_string()),
                format!("MAKEINSTANCE refers to unknown EVENT {eid:?}; skipped"),
            ));
            continue;
        };
        let Some(target) = target.clone() else {
            warnings.push(Issue::warning(IssueCode::EmptyExtent, Location::Element(eiid.to_string()), "EVENT covers no token; skipped"));
            continue;
        };
        // TimeML 1.1 keeps tense/aspect/pos on EVENT rather than MAKEINSTANCE.
        let attr = |name: &str| {
            mi.attribute(name)
                .or_else(|| event_nodes.get(eid).and_then(|e| e.attribute(name)))
                .map(str::to_string)
        };
        let inst = TimemlEventInstance {
            event_id: eid.to_string(),
            instance_id: eiid.to_string(),
            target,
            tense: attr("tense"),
            aspect: attr("aspect"),
            pos: attr("pos"),
        };
        if inst.pos.as_deref().is_some_and(|p| p != "VERB") {
            continue;
        }
        let mut verb = VerbAnn::new(eiid, inst.target.clone());
        verb.se = Some(se_from_tense(inst.tense.as_deref()));
        verb.er = Some(er_from_aspect(inst.aspect.as_deref()));
        doc.verbs.push(verb);
        instances.push(inst);
    }

    for (eid, _, _) in &body.events {
        if !instantiated.contains(eid.as_str()) {
            warnings.push(Issue::warning(
                IssueCode::MissingInstance,
                Location::Element(eid.clone()),
                "EVENT has no MAKEINSTANCE; skipped",
            ));
        }
    }

    Ok(Imported { document: doc, instances, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tense_and_aspect_tables() {
        assert_eq!(se_from_tense(Some("PAST")), RelationSet::AFTER);
        assert_eq!(se_from_tense(Some("PRESENT")), RelationSet::EQUAL);
        assert_eq!(se_from_tense(Some("FUTURE")), RelationSet::BEFORE);
        assert_eq!(se_from_tense(Some("NONE")), RelationSet::FULL);
        assert_eq!(se_from_tense(None), RelationSet::FULL);
        assert_eq!(er_from_aspect(Some("PERFECTIVE")), RelationSet::BEFORE);
        assert_eq!(er_from_aspect(Some("NONE")), RelationSet::AFTER_OR_EQUAL);
        assert_eq!(er_from_aspect(Some("PROGRESSIVE")), RelationSet::FULL);
    }

    #[test]
    fn events_map_onto_tokens() {
        let xml = r#"<TimeML><TEXT>He <EVENT eid="e1">said</EVENT>, then <EVENT eid="e2">left</EVENT>.</TEXT>
            <MAKEINSTANCE eventID="e1" eiid="ei1" tense="PAST" aspect="NONE" pos="VERB"/>
            <MAKEINSTANCE eventID="e2" eiid="ei2" tense="PAST" aspect="NONE" pos="NOUN"/>
        </TimeML>"#;
        let imp = import_timeml(xml).unwrap();
        assert_eq!(imp.document.text, "He said, then left.");
        assert_eq!(imp.document.verbs.len(), 1);
        assert_eq!(imp.document.verbs[0].target.indices(), &[1]);
        assert_eq!(imp.document.verbs[0].sr, None);
        assert!(imp.warnings.is_empty());
    }

    #[test]
    fn creation_time_and_timexes() {
        let xml = r#"<TimeML><DOCID>x</DOCID>
            <DCT><TIMEX3 tid="t0" type="DATE" value="1990-08-15" functionInDocument="CREATION_TIME">08/15/90</TIMEX3></DCT>
            <TEXT>It ended <TIMEX3 tid="t1" type="DATE" value="1988-08">in August 1988</TIMEX3>.</TEXT></TimeML>"#;
        let imp = import_timeml(xml).unwrap();
        assert_eq!(imp.document.doc.time.as_deref(), Some("1990-08-15"));
        assert_eq!(imp.document.text, "It ended in August 1988.");
        let t = &imp.document.timerefxs[0];
        assert_eq!((t.id.as_str(), t.value.as_deref()), ("t1", Some("1988-08")));
        assert_eq!(imp.document.target_text(&t.target), "in August 1988");
        assert!(imp.document.verbs.is_empty());
    }

    #[test]
    fn uninstantiated_event_warns() {
        let xml = r#"<TimeML>A <EVENT eid="e9">blast</EVENT>.</TimeML>"#;
        let imp = import_timeml(xml).unwrap();
        assert!(imp.document.verbs.is_empty());
        assert_eq!(imp.warnings[0].code, IssueCode::MissingInstance);
        assert!(import_timeml("<TimeML>").is_err());
    }

    #[test]
    fn event_attributes_fall_back_to_event_element() {
        let xml = r#"<TimeML><EVENT eid="e1" tense="FUTURE" aspect="PERFECTIVE">go</EVENT>
            <MAKEINSTANCE eventID="e1" eiid="ei1"/></TimeML>"#;
        let v = &import_timeml(xml).unwrap().document.verbs[0];
        assert_eq!((v.se, v.er), (Some(RelationSet::BEFORE), Some(RelationSet::BEFORE)));
    }
}
