mod common;

use common::fixture;
use rtmml::{build_graph, close, import_timeml, parse_rtmml, serialize_rtmml, RelationSet, TimePointId};

#[test]
fn saddam_excerpt_instances() {
    let imp = import_timeml(&fixture("AP900815-0044.tml")).unwrap();
    let doc = &imp.document;
    assert!(imp.warnings.is_empty(), "{:?}", imp.warnings);
    assert_eq!(doc.doc.time.as_deref(), Some("1990-08-15T00:44"));
    let appeared = doc.verb("ei1568").unwrap();
    assert_eq!(doc.target_text(&appeared.target), "appeared");
    assert_eq!((appeared.se, appeared.er, appeared.sr), (Some(RelationSet::AFTER), Some(RelationSet::AFTER_OR_EQUAL), None));
    let rejected = doc.verb("ei1571").unwrap();
    assert_eq!(doc.target_text(&rejected.target), "rejected");
    assert_eq!((rejected.se, rejected.er, rejected.sr), (Some(RelationSet::AFTER), Some(RelationSet::BEFORE), None));
    assert!(appeared.view.is_none() && appeared.tense.is_none());
    assert_eq!(parse_rtmml(&serialize_rtmml(doc)).unwrap(), *doc);
}

#[test]
fn imported_labels_contain_the_native_ones() {
    let imported = close(&build_graph(&import_timeml(&fixture("AP900815-0044.tml")).unwrap().document).unwrap());
    let native = close(&build_graph(&parse_rtmml(&fixture("saddam.rtmml")).unwrap()).unwrap());
    assert!(imported.consistent && native.consistent);
    let map = |p: &TimePointId| match p {
        TimePointId::Verb(v, k) if v == "v1" => TimePointId::Verb("ei1568".into(), *k),
        TimePointId::Verb(v, k) if v == "v2" => TimePointId::Verb("ei1571".into(), *k),
        other => other.clone(),
    };
    let nodes: Vec<_> = native.graph.nodes().iter().collect();
    let mut compared = 0;
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            let wide = imported.query(&map(a), &map(b)).unwrap();
            let narrow = native.query(a, b).unwrap();
            assert!(narrow.is_subset_of(wide), "{a} {b}: native {narrow} not within imported {wide}");
            compared += 1;
        }
    }
    assert_eq!(compared, 21);
    // The import alone cannot order the two events; the native annotation can.
    let (e1, e2) = (TimePointId::event("ei1568"), TimePointId::event("ei1571"));
    assert_ne!(imported.query(&e2, &e1).unwrap(), RelationSet::BEFORE);
    assert_eq!(native.query(&TimePointId::event("v2"), &TimePointId::event("v1")).unwrap(), RelationSet::BEFORE);
}

#[test]
fn every_single_verb_import_is_consistent() {
    for tense in ["PAST", "PRESENT", "FUTURE", "NONE", "INFINITIVE", "PRESPART"] {
        for aspect in ["PERFECTIVE", "NONE", "PROGRESSIVE", "PERFECTIVE_PROGRESSIVE"] {
            let xml = format!(
                r#"<TimeML><TEXT>It <EVENT eid="e1">went</EVENT>.</TEXT><MAKEINSTANCE eventID="e1" eiid="ei1" tense="{tense}" aspect="{aspect}" pos="VERB"/></TimeML>"#
            );
            let doc = import_timeml(&xml).unwrap().document;
            assert_eq!(doc.verbs.len(), 1);
            assert!(close(&build_graph(&doc).unwrap()).consistent, "{tense} {aspect}");
        }
    }
}

#[test]
fn empty_body_gives_minimal_document() {
    let imp = import_timeml(&fixture("empty.tml")).unwrap();
    assert_eq!(serialize_rtmml(&imp.document), "<rtmml>\n<seg type=\"token\" />\n</rtmml>\n");
    assert!(import_timeml(&fixture("malformed.tml")).is_err());
}
