use std::collections::HashSet;

use roxmltree::{Node, NS_XML_URI};

use super::report::{Issue, IssueCode, Location};
use crate::model::{
    AnnotatedDocument, DocAnn, LinkAnn, LinkKind, PointRef, RelationSet, TargetRef, TimeRefAnn, VerbAnn,
};
use crate::tokenizer::{parse_target, tokenize, TargetError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject unknown elements and attributes, and targets whose terms are
    /// not already in increasing order.
    pub strict: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("malformed XML: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("root element must be <rtmml>, found <{0}>")]
    Root(String),
    #[error("<{element}> at byte {offset}: {message}")]
    Invalid { element: String, offset: usize, message: String },
}

/// Parse output: the document plus lenient-mode warnings.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub document: AnnotatedDocument,
    pub warnings: Vec<Issue>,
}

/// Parses RTMML in lenient mode, discarding warnings.
pub fn parse_rtmml(xml: &str) -> Result<AnnotatedDocument, ParseError> {
    parse_rtmml_with(xml, ParseOptions::default()).map(|p| p.document)
}

pub fn parse_rtmml_with(xml: &str, options: ParseOptions) -> Result<Parsed, ParseError> {
    let escaped = EscapedSource::new(xml);
    let tree = roxmltree::Document::parse(&escaped.text)?;
    let root = tree.root_element();
    if root.tag_name().name() != "rtmml" {
        return Err(ParseError::Root(root.tag_name().name().to_string()));
    }
    let mut reader = Reader { options, source: &escaped, warnings: Vec::new(), ids: HashSet::new() };
    let document = reader.read_root(root)?;
    Ok(Parsed { document, warnings: reader.warnings })
}

/// Hand-written RTMML puts raw `<` into relation attributes (`sr="<="`),
/// which XML forbids. Such characters are escaped before parsing and byte
/// offsets are mapped back to the original text.
struct EscapedSource {
    text: String,
    /// Offsets in `text` where an inserted `&lt;` starts.
    inserted_at: Vec<usize>,
}

impl EscapedSource {
    fn new(src: &str) -> Self {
        let bytes = src.as_bytes();
        let mut text = String::with_capacity(src.len());
        let mut inserted_at = Vec::new();
        let mut in_tag = false;
        let mut quote: Option<u8> = None;
        let mut i = 0;
        while i < src.len() {
            let rest = &src[i..];
            if !in_tag {
                if let Some(len) = opaque_section_len(rest) {
                    text.push_str(&rest[..len]);
                    i += len;
                    continue;
                }
                in_tag = bytes[i] == b'<';
            } else {
                match (bytes[i], quote) {
                    (b'"' | b'\'', None) => quote = Some(bytes[i]),
                    (q, Some(open)) if q == open => quote = None,
                    (b'<', Some(_)) => {
                        inserted_at.push(text.len());
                        text.push_str("&lt;");
                        i += 1;
                        continue;
                    }
                    (b'>', None) => in_tag = false,
                    _ => {}
                }
            }
            let c = rest.chars().next().unwrap();
            text.push(c);
            i += c.len_utf8();
        }
        EscapedSource { text, inserted_at }
    }

    fn original_offset(&self, pos: usize) -> usize {
        let shifted = self.inserted_at.iter().take_while(|&&p| p < pos).count();
        pos - 3 * shifted
    }
}

/// Length of a comment, CDATA section or processing instruction at the
/// start of `rest`; these are copied through untouched.
fn opaque_section_len(rest: &str) -> Option<usize> {
    for (open, close) in [("<!--", "-->"), ("<![CDATA[", "]]>"), ("<?", "?>")] {
        if let Some(body) = rest.strip_prefix(open) {
            let end = body.find(close).map(|p| p + open.len() + close.len());
            return Some(end.unwrap_or(rest.len()));
        }
    }
    None
}

struct Reader<'s> {
    options: ParseOptions,
    source: &'s EscapedSource,
    warnings: Vec<Issue>,
    ids: HashSet<String>,
}

const VERB_ATTRS: &[&str] = &["id", "target", "view", "tense", "se", "er", "sr", "s", "e", "r"];
const TIMEREFX_ATTRS: &[&str] = &["id", "target", "value"];
const DOC_ATTRS: &[&str] = &["id", "time", "mod"];
const LINK_ATTRS: &[&str] = &["id", "type", "target", "source"];

impl<'s> Reader<'s> {
    fn offset(&self, node: Node) -> usize {
        self.source.original_offset(node.range().start)
    }

    fn invalid(&self, node: Node, message: impl Into<String>) -> ParseError {
        ParseError::Invalid {
            element: node.tag_name().name().to_string(),
            offset: self.offset(node),
            message: message.into(),
        }
    }

    fn unknown(&mut self, node: Node, code: IssueCode, message: String) -> Result<(), ParseError> {
        if self.options.strict {
            return Err(self.invalid(node, message));
        }
        self.warnings.push(Issue::warning(code, Location::Offset(self.offset(node)), message));
        Ok(())
    }

    fn check_attributes(&mut self, node: Node, allowed: &[&str]) -> Result<(), ParseError> {
        for attr in node.attributes() {
            let known = match attr.namespace() {
                Some(NS_XML_URI) => attr.name() == "id",
                Some(_) => false,
                None => allowed.contains(&attr.name()),
            };
            if !known {
                let msg = format!("unknown attribute {:?} on <{}>", attr.name(), node.tag_name().name());
                self.unknown(node, IssueCode::UnknownAttribute, msg)?;
            }
        }
        Ok(())
    }

    fn id_of(&self, node: Node) -> Option<String> {
        node.attribute((NS_XML_URI, "id"))
            .or_else(|| node.attribute("id"))
            .map(|s| s.trim().to_string())
    }

    fn required_id(&mut self, node: Node) -> Result<String, ParseError> {
        let id = self.id_of(node).filter(|s| !s.is_empty()).ok_or_else(|| self.invalid(node, "missing xml:id"))?;
        if id == "doc" {
            return Err(self.invalid(node, "\"doc\" is reserved and cannot be used as an id"));
        }
        if !self.ids.insert(id.clone()) {
            return Err(self.invalid(node, format!("duplicate xml:id {id:?}")));
        }
        Ok(id)
    }

    fn target(&self, node: Node) -> Result<TargetRef, ParseError> {
        let spec = node.attribute("target").ok_or_else(|| self.invalid(node, "missing target"))?;
        let target = parse_target(spec).map_err(|e| self.invalid(node, e.to_string()))?;
        if self.options.strict {
            // Strict mode additionally requires the terms in increasing order.
            crate::tokenizer::resolve_target(spec, usize::MAX, true).map_err(|e: TargetError| self.invalid(node, e.to_string()))?;
        }
        Ok(target)
    }

    fn relation(&self, node: Node, name: &str) -> Result<Option<RelationSet>, ParseError> {
        node.attribute(name)
            .map(|v| v.parse().map_err(|e| self.invalid(node, format!("attribute {name}: {e}"))))
            .transpose()
    }

    fn read_root(&mut self, root: Node) -> Result<AnnotatedDocument, ParseError> {
        let text: String = root.children().filter(|n| n.is_text()).filter_map(|n| n.text()).collect();
        let text = text.trim().to_string();
        let tokens = tokenize(&text);
        let mut doc = AnnotatedDocument { text, tokens, ..Default::default() };

        let elements: Vec<Node> = root.children().filter(|n| n.is_element()).collect();
        // Timerefx ids decide how bare point references resolve, so collect
        // them before reading any verb.
        let timex_ids: HashSet<String> = elements
            .iter()
            .filter(|n| n.tag_name().name() == "timerefx")
            .filter_map(|n| self.id_of(*n))
            .collect();

        let mut seen_seg = false;
        let mut seen_doc = false;
        for node in elements {
            match node.tag_name().name() {
                "seg" => {
                    if seen_seg {
                        return Err(self.invalid(node, "more than one <seg>"));
                    }
                    seen_seg = true;
                    self.check_attributes(node, &["type"])?;
                    match node.attribute("type") {
                        Some("token") => {}
                        Some(other) => {
                            return Err(self.invalid(node, format!("unsupported segmentation type {other:?}")))
                        }
                        None => return Err(self.invalid(node, "missing segmentation type")),
                    }
                }
                "doc" => {
                    if seen_doc {
                        return Err(self.invalid(node, "more than one <doc>"));
                    }
                    seen_doc = true;
                    self.check_attributes(node, DOC_ATTRS)?;
                    doc.doc = DocAnn {
                        time: node.attribute("time").map(str::to_string),
                        modifier: node.attribute("mod").map(str::to_string),
                    };
                }
                "timerefx" => {
                    self.check_attributes(node, TIMEREFX_ATTRS)?;
                    let id = self.required_id(node)?;
                    let target = self.target(node)?;
                    doc.timerefxs.push(TimeRefAnn { id, target, value: node.attribute("value").map(str::to_string) });
                }
                "verb" => {
                    let verb = self.read_verb(node, &timex_ids)?;
                    doc.verbs.push(verb);
                }
                "rtmlink" => {
                    let link = self.read_link(node)?;
                    doc.links.push(link);
                }
                other => {
                    let msg = format!("unknown element <{other}>");
                    self.unknown(node, IssueCode::UnknownElement, msg)?;
                }
            }
        }
        Ok(doc)
    }

    fn read_verb(&mut self, node: Node, timex_ids: &HashSet<String>) -> Result<VerbAnn, ParseError> {
        self.check_attributes(node, VERB_ATTRS)?;
        let id = self.required_id(node)?;
        let mut verb = VerbAnn::new(id, self.target(node)?);
        verb.view = node
            .attribute("view")
            .map(|v| v.trim().parse().map_err(|e: String| self.invalid(node, e)))
            .transpose()?;
        verb.tense = node
            .attribute("tense")
            .map(|v| v.trim().parse().map_err(|e: String| self.invalid(node, e)))
            .transpose()?;
        verb.se = self.relation(node, "se")?;
        verb.er = self.relation(node, "er")?;
        verb.sr = self.relation(node, "sr")?;
        let point = |name: &str| -> Result<Option<PointRef>, ParseError> {
            node.attribute(name)
                .map(|v| {
                    PointRef::parse(v, |s| timex_ids.contains(s))
                        .map_err(|e| self.invalid(node, format!("attribute {name}: {e}")))
                })
                .transpose()
        };
        verb.s = point("s")?;
        verb.e = point("e")?;
        verb.r = point("r")?;
        Ok(verb)
    }

    fn read_link(&mut self, node: Node) -> Result<LinkAnn, ParseError> {
        self.check_attributes(node, LINK_ATTRS)?;
        let id = self.required_id(node)?;
        let kind: LinkKind = node
            .attribute("type")
            .ok_or_else(|| self.invalid(node, "missing link type"))?
            .trim()
            .parse()
            .map_err(|e: String| self.invalid(node, e))?;

        let mut sources: Vec<String> = Vec::new();
        let mut targets: Vec<String> = Vec::new();
        let add = |list: &mut Vec<String>, raw: &str| {
            for r in raw.split_whitespace() {
                let r = r.strip_prefix('#').unwrap_or(r).to_string();
                if !list.contains(&r) {
                    list.push(r);
                }
            }
        };
        if let Some(s) = node.attribute("source") {
            add(&mut sources, s);
        }
        if let Some(t) = node.attribute("target") {
            add(&mut targets, t);
        }
        for child in node.children().filter(|n| n.is_element()) {
            if child.tag_name().name() != "link" {
                let msg = format!("unknown element <{}> inside <rtmlink>", child.tag_name().name());
                self.unknown(child, IssueCode::UnknownElement, msg)?;
                continue;
            }
            self.check_attributes(child, &["source", "target"])?;
            if child.attribute("source").is_none() && child.attribute("target").is_none() {
                return Err(self.invalid(child, "<link> needs a source or target"));
            }
            if let Some(s) = child.attribute("source") {
                add(&mut sources, s);
            }
            if let Some(t) = child.attribute("target") {
                add(&mut targets, t);
            }
        }
        if sources.len() > 1 {
            return Err(self.invalid(node, "a link takes at most one source"));
        }
        Ok(LinkAnn { id, kind, source: sources.pop(), targets })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PointKind, Tense, View};

    const YESTERDAY: &str = r##"<rtmml>
Yesterday, John ate well.
 <seg type="token" />
 <doc time="now" />
 <timerefx xml:id="t1" target="
       #token0" />
 <verb xml:id="v1" target="#token3"
       view="simple" tense="past"
       sr=">" er="=" se=">"
       r="t1" s="doc" />
 </rtmml>"##;

    #[test]
    fn parses_single_verb_example() {
        let doc = parse_rtmml(YESTERDAY).unwrap();
        assert_eq!(doc.text, "Yesterday, John ate well.");
        assert_eq!(doc.timerefxs.len(), 1);
        assert_eq!(doc.timerefxs[0].target.indices(), &[0]);
        let v = &doc.verbs[0];
        assert_eq!(v.id, "v1");
        assert_eq!(doc.target_text(&v.target), "ate");
        assert_eq!((v.view, v.tense), (Some(View::Simple), Some(Tense::Past)));
        assert_eq!((v.sr, v.er, v.se), (Some(RelationSet::AFTER), Some(RelationSet::EQUAL), Some(RelationSet::AFTER)));
        assert_eq!(v.r, Some(PointRef::Timex("t1".into())));
        assert_eq!(v.s, Some(PointRef::DocCreation));
        assert_eq!(doc.doc.time.as_deref(), Some("now"));
    }

    #[test]
    fn raw_less_than_in_attributes() {
        let doc = parse_rtmml(r##"<rtmml>a b<seg type="token"/><verb xml:id="v1" target="#token0" sr="<="/></rtmml>"##)
            .unwrap();
        assert_eq!(doc.verbs[0].sr, Some(RelationSet::BEFORE_OR_EQUAL));
    }

    #[test]
    fn empty_document() {
        let doc = parse_rtmml("<rtmml></rtmml>").unwrap();
        assert_eq!(doc, AnnotatedDocument::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_rtmml("<rtmml>"), Err(ParseError::Xml(_))));
        assert!(matches!(parse_rtmml("<doc/>"), Err(ParseError::Root(_))));
        let empty_rel = r##"<rtmml>a<verb xml:id="v1" target="#token0" se=""/></rtmml>"##;
        assert!(matches!(parse_rtmml(empty_rel), Err(ParseError::Invalid { .. })));
        let dup = r##"<rtmml>a<timerefx xml:id="x" target="#token0"/><verb xml:id="x" target="#token0" se="<"/></rtmml>"##;
        let err = parse_rtmml(dup).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
        let seg = r##"<rtmml>a<seg type="char"/></rtmml>"##;
        assert!(parse_rtmml(seg).is_err());
        let untyped = r##"<rtmml>a<rtmlink xml:id="l1"><link target="#v1"/></rtmlink></rtmml>"##;
        assert!(parse_rtmml(untyped).unwrap_err().to_string().contains("missing link type"));
    }

    #[test]
    fn error_offsets_refer_to_original_text() {
        let src = r##"<rtmml>a<verb xml:id="v1" target="#token0" sr="<"/><verb xml:id="v1" target="#token0"/></rtmml>"##;
        match parse_rtmml(src) {
            Err(ParseError::Invalid { offset, .. }) => assert_eq!(&src[offset..offset + 5], "<verb"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strict_and_lenient_unknowns() {
        let src = r##"<rtmml>a<verb xml:id="v1" target="#token0" se="<" colour="red"/><note/></rtmml>"##;
        let parsed = parse_rtmml_with(src, ParseOptions::default()).unwrap();
        assert_eq!(parsed.warnings.len(), 2);
        assert_eq!(parsed.warnings[0].code, IssueCode::UnknownAttribute);
        assert_eq!(parsed.warnings[1].code, IssueCode::UnknownElement);
        assert!(parse_rtmml_with(src, ParseOptions { strict: true }).is_err());

        let unordered = r##"<rtmml>a b<verb xml:id="v1" target="#token1,#token0" se="<"/></rtmml>"##;
        assert_eq!(parse_rtmml(unordered).unwrap().verbs[0].target.indices(), &[0, 1]);
        assert!(parse_rtmml_with(unordered, ParseOptions { strict: true }).is_err());
    }

    #[test]
    fn both_link_syntaxes() {
        let src = r##"<rtmml>a b
<timerefx xml:id="t1" target="#token0"/>
<verb xml:id="v1" target="#token1" view="anterior" tense="past"/>
<rtmlink xml:id="l1" type="POSITIONS" target="#t1 #v1">
  <link target="#t1" />
  <link target="#v1" />
</rtmlink>
<rtmlink xml:id="l2" type="POSITIONS"><link source="#t1"/><link target="#v1"/></rtmlink>
</rtmml>"##;
        let doc = parse_rtmml(src).unwrap();
        assert_eq!(doc.links[0].targets, ["t1", "v1"]);
        assert_eq!(doc.links[0].source, None);
        assert_eq!(doc.links[1].source.as_deref(), Some("t1"));
        assert_eq!(doc.links[1].targets, ["v1"]);
    }

    #[test]
    fn verb_point_references() {
        let src = r##"<rtmml>a b<verb xml:id="v1" target="#token0" se="<"/><verb xml:id="v2" target="#token1" se="&lt;" r="#v1.e" s="sv2"/></rtmml>"##;
        let doc = parse_rtmml(src).unwrap();
        assert_eq!(doc.verbs[1].r, Some(PointRef::VerbPoint("v1".into(), PointKind::Event)));
        assert_eq!(doc.verbs[1].s, Some(PointRef::Named("sv2".into())));
        assert_eq!(doc.verbs[1].se, Some(RelationSet::BEFORE));
    }
}
