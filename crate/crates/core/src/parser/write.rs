use std::fmt::Write as _;

use crate::model::{AnnotatedDocument, RelationSet};
use crate::tokenizer::format_target;

fn escape(s: &str, attr: bool) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' if !attr => out.push_str("&gt;"),
            '"' if attr => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

struct Element {
    buf: String,
}

impl Element {
    fn open(name: &str) -> Self {
        Element { buf: format!("<{name}") }
    }

    fn attr(mut self, name: &str, value: Option<impl AsRef<str>>) -> Self {
        if let Some(v) = value {
            let _ = write!(self.buf, " {}=\"{}\"", name, escape(v.as_ref(), true));
        }
        self
    }

    fn empty(mut self) -> String {
        self.buf.push_str(" />\n");
        self.buf
    }

    fn start(mut self) -> String {
        self.buf.push_str(">\n");
        self.buf
    }
}

fn rel(r: Option<RelationSet>) -> Option<String> {
    r.map(|r| r.to_string())
}

/// Canonical RTMML: fixed element and attribute order, relation sets in
/// `<`, `=`, `>` order, targets with consecutive runs folded into ranges.
pub fn serialize_rtmml(doc: &AnnotatedDocument) -> String {
    let mut out = String::from("<rtmml>\n");
    if !doc.text.is_empty() {
        out.push_str(&escape(&doc.text, false));
        out.push('\n');
    }
    out.push_str(&Element::open("seg").attr("type", Some("token")).empty());
    if doc.doc.time.is_some() || doc.doc.modifier.is_some() {
        out.push_str(
            &Element::open("doc")
                .attr("time", doc.doc.time.as_ref())
                .attr("mod", doc.doc.modifier.as_ref())
                .empty(),
        );
    }
    for t in &doc.timerefxs {
        out.push_str(
            &Element::open("timerefx")
                .attr("xml:id", Some(&t.id))
                .attr("target", Some(format_target(&t.target)))
                .attr("value", t.value.as_ref())
                .empty(),
        );
    }
    for v in &doc.verbs {
        out.push_str(
            &Element::open("verb")
                .attr("xml:id", Some(&v.id))
                .attr("target", Some(format_target(&v.target)))
                .attr("view", v.view.map(|x| x.as_str()))
                .attr("tense", v.tense.map(|x| x.as_str()))
                .attr("se", rel(v.se))
                .attr("er", rel(v.er))
                .attr("sr", rel(v.sr))
                .attr("s", v.s.as_ref().map(|p| p.to_string()))
                .attr("e", v.e.as_ref().map(|p| p.to_string()))
                .attr("r", v.r.as_ref().map(|p| p.to_string()))
                .empty(),
        );
    }
    for l in &doc.links {
        out.push_str(&Element::open("rtmlink").attr("xml:id", Some(&l.id)).attr("type", Some(l.kind.as_str())).start());
        if let Some(s) = &l.source {
            out.push_str("  ");
            out.push_str(&Element::open("link").attr("source", Some(format!("#{s}"))).empty());
        }
        for t in &l.targets {
            out.push_str("  ");
            out.push_str(&Element::open("link").attr("target", Some(format!("#{t}"))).empty());
        }
        out.push_str("</rtmlink>\n");
    }
    out.push_str("</rtmml>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TargetRef, VerbAnn};
    use crate::parser::parse_rtmml;

    #[test]
    fn empty_document() {
        assert_eq!(serialize_rtmml(&AnnotatedDocument::default()), "<rtmml>\n<seg type=\"token\" />\n</rtmml>\n");
    }

    #[test]
    fn relation_sets_are_canonical_and_escaped() {
        let mut doc = AnnotatedDocument::from_text("ran");
        let mut v = VerbAnn::new("v1", TargetRef::new(vec![0]).unwrap());
        v.sr = Some("><".parse().unwrap());
        doc.verbs.push(v);
        let xml = serialize_rtmml(&doc);
        assert!(xml.contains(r##"sr="&lt;>""##), "{xml}");
        assert_eq!(parse_rtmml(&xml).unwrap(), doc);
    }

    #[test]
    fn text_escaping_round_trips() {
        let doc = AnnotatedDocument::from_text("a < b & c > d");
        assert_eq!(parse_rtmml(&serialize_rtmml(&doc)).unwrap(), doc);
    }
}
