//! Parser and serializer for the XACML 1.0 subset: PolicySet documents
//! in the policy namespace, request/response documents in the context
//! namespace.
//!
//! Parsing is lenient where historical policy text demands it — a
//! single `*Match` element holding several (AttributeValue, designator)
//! pairs is split into that many conjunctive clauses and the split is
//! recorded as a normalization. Serialization is canonical and
//! deterministic: one pair per match element, fixed attribute order,
//! fixed indentation, so identical IR yields byte-identical output and
//! `parse(serialize(ps))` reproduces `ps`.

use std::fmt::Write as _;

use quick_xml::events::Event;
use quick_xml::name::ResolveResult;
use quick_xml::NsReader;

use crate::ir::{
    AttributeRef, CombiningAlg, DataType, Effect, MatchClause, MatchFn, Policy, PolicySet,
    PolicySetChild, RequestCtx, ResponseCtx, Rule, Target, CONTEXT_NS, POLICY_NS,
};

/// Notes emitted while parsing: non-fatal oddities and the lossless
/// rewrites applied to reach canonical form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub warnings: Vec<(u64, String)>,
    pub normalizations: Vec<String>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum XmlError {
    #[error("xml-syntax: line {line}: {message}")]
    Syntax { line: u64, message: String },
    #[error("unsupported-id: line {line}: {id}")]
    UnsupportedId { line: u64, id: String },
    #[error("bad-namespace: line {line}: {found}")]
    BadNamespace { line: u64, found: String },
}

impl XmlError {
    pub fn code(&self) -> &'static str {
        match self {
            XmlError::Syntax { .. } => "xml-syntax",
            XmlError::UnsupportedId { .. } => "unsupported-id",
            XmlError::BadNamespace { .. } => "bad-namespace",
        }
    }

    pub fn line(&self) -> u64 {
        match self {
            XmlError::Syntax { line, .. }
            | XmlError::UnsupportedId { line, .. }
            | XmlError::BadNamespace { line, .. } => *line,
        }
    }
}

// ---------------------------------------------------------------------------
// Generic element tree
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct XmlElement {
    ns: Option<String>,
    local: String,
    attrs: Vec<(String, String)>,
    children: Vec<XmlElement>,
    text: String,
    line: u64,
}

impl XmlElement {
    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn require_attr(&self, name: &str) -> Result<&str, XmlError> {
        self.attr(name).ok_or_else(|| XmlError::Syntax {
            line: self.line,
            message: format!("<{}> is missing attribute {}", self.local, name),
        })
    }

    fn trimmed_text(&self) -> &str {
        self.text.trim()
    }
}

fn line_of(input: &str, byte_offset: u64) -> u64 {
    let end = (byte_offset as usize).min(input.len());
    1 + input.as_bytes()[..end].iter().filter(|b| **b == b'\n').count() as u64
}

fn parse_tree(input: &[u8]) -> Result<XmlElement, XmlError> {
    let text = std::str::from_utf8(input).map_err(|e| XmlError::Syntax {
        line: 1,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut reader = NsReader::from_str(text);
    reader.config_mut().expand_empty_elements = true;

    let mut stack: Vec<XmlElement> = Vec::new();
    let mut root: Option<XmlElement> = None;
    loop {
        let offset = reader.buffer_position();
        let event = reader.read_event().map_err(|e| XmlError::Syntax {
            line: line_of(text, reader.error_position()),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err(XmlError::Syntax {
                        line: line_of(text, offset),
                        message: "content after document root".into(),
                    });
                }
                let (resolution, local) = reader.resolver().resolve_element(start.name());
                let ns = match resolution {
                    ResolveResult::Bound(ns) => {
                        Some(String::from_utf8_lossy(ns.as_ref()).into_owned())
                    }
                    ResolveResult::Unbound => None,
                    ResolveResult::Unknown(prefix) => {
                        return Err(XmlError::Syntax {
                            line: line_of(text, offset),
                            message: format!(
                                "unbound namespace prefix {}",
                                String::from_utf8_lossy(&prefix)
                            ),
                        })
                    }
                };
                let mut attrs = Vec::new();
                for attr in start.attributes() {
                    let attr = attr.map_err(|e| XmlError::Syntax {
                        line: line_of(text, offset),
                        message: format!("bad attribute: {e}"),
                    })?;
                    let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
                    if key == "xmlns" || key.starts_with("xmlns:") {
                        continue;
                    }
                    let value = attr
                        .normalized_value(quick_xml::XmlVersion::default())
                        .map_err(|e| XmlError::Syntax {
                            line: line_of(text, offset),
                            message: format!("bad attribute value: {e}"),
                        })?
                        .into_owned();
                    attrs.push((key, value));
                }
                stack.push(XmlElement {
                    ns,
                    local: String::from_utf8_lossy(local.as_ref()).into_owned(),
                    attrs,
                    children: Vec::new(),
                    text: String::new(),
                    line: line_of(text, offset),
                });
            }
            Event::End(_) => {
                let element = stack.pop().ok_or(XmlError::Syntax {
                    line: line_of(text, offset),
                    message: "unmatched end tag".into(),
                })?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(element),
                    None => root = Some(element),
                }
            }
            Event::Text(t) => {
                let chunk = t.decode().map_err(|e| XmlError::Syntax {
                    line: line_of(text, offset),
                    message: e.to_string(),
                })?;
                match stack.last_mut() {
                    Some(parent) => parent.text.push_str(&chunk),
                    None if chunk.trim().is_empty() => {}
                    None => {
                        return Err(XmlError::Syntax {
                            line: line_of(text, offset),
                            message: "text outside document root".into(),
                        })
                    }
                }
            }
            Event::CData(c) => {
                let chunk = c.decode().map_err(|e| XmlError::Syntax {
                    line: line_of(text, offset),
                    message: e.to_string(),
                })?;
                if let Some(parent) = stack.last_mut() {
                    parent.text.push_str(&chunk);
                }
            }
            Event::GeneralRef(r) => {
                let resolved = resolve_general_ref(&r).map_err(|message| XmlError::Syntax {
                    line: line_of(text, offset),
                    message,
                })?;
                if let Some(parent) = stack.last_mut() {
                    parent.text.push_str(&resolved);
                }
            }
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            // expand_empty_elements rewrites <x/> into Start + End
            Event::Empty(_) => unreachable!("empty elements are expanded"),
            Event::Eof => break,
        }
    }
    if !stack.is_empty() {
        return Err(XmlError::Syntax {
            line: line_of(text, reader.buffer_position()),
            message: "unexpected end of document".into(),
        });
    }
    root.ok_or(XmlError::Syntax {
        line: 1,
        message: "document has no root element".into(),
    })
}

fn resolve_general_ref(r: &quick_xml::events::BytesRef<'_>) -> Result<String, String> {
    if let Some(c) = r
        .resolve_char_ref()
        .map_err(|e| format!("bad character reference: {e}"))?
    {
        return Ok(c.to_string());
    }
    let name = r
        .decode()
        .map_err(|e| format!("bad entity reference: {e}"))?;
    match name.as_ref() {
        "amp" => Ok("&".into()),
        "lt" => Ok("<".into()),
        "gt" => Ok(">".into()),
        "quot" => Ok("\"".into()),
        "apos" => Ok("'".into()),
        other => Err(format!("unknown entity &{other};")),
    }
}

fn expect_ns(el: &XmlElement, ns: &str) -> Result<(), XmlError> {
    if el.ns.as_deref() == Some(ns) {
        Ok(())
    } else {
        Err(XmlError::BadNamespace {
            line: el.line,
            found: el.ns.clone().unwrap_or_else(|| "<none>".into()),
        })
    }
}

// ---------------------------------------------------------------------------
// Policy documents
// ---------------------------------------------------------------------------

/// Parses a `PolicySet` document in the policy namespace.
pub fn parse_policy_set(input: &[u8]) -> Result<(PolicySet, ParseDiagnostics), XmlError> {
    let root = parse_tree(input)?;
    if root.local != "PolicySet" {
        return Err(XmlError::Syntax {
            line: root.line,
            message: format!("expected root PolicySet, found {}", root.local),
        });
    }
    expect_ns(&root, POLICY_NS)?;
    let mut diagnostics = ParseDiagnostics::default();
    let ps = map_policy_set(&root, &mut diagnostics)?;
    Ok((ps, diagnostics))
}

fn map_policy_set(
    el: &XmlElement,
    diagnostics: &mut ParseDiagnostics,
) -> Result<PolicySet, XmlError> {
    expect_ns(el, POLICY_NS)?;
    let id = el.require_attr("PolicySetId")?.to_owned();
    let combining_uri = el.require_attr("PolicyCombiningAlgId")?;
    let combining =
        CombiningAlg::from_policy_uri(combining_uri).ok_or_else(|| XmlError::UnsupportedId {
            line: el.line,
            id: combining_uri.to_owned(),
        })?;

    let mut target = Target::any();
    let mut children = Vec::new();
    for child in &el.children {
        match child.local.as_str() {
            "Target" => target = map_target(child, diagnostics)?,
            "Policy" => children.push(PolicySetChild::Policy(map_policy(child, diagnostics)?)),
            "PolicySet" => {
                children.push(PolicySetChild::PolicySet(map_policy_set(child, diagnostics)?))
            }
            "PolicySetIdReference" => {
                children.push(PolicySetChild::Reference(child.trimmed_text().to_owned()))
            }
            other => {
                return Err(XmlError::Syntax {
                    line: child.line,
                    message: format!("unsupported element <{other}> in PolicySet"),
                })
            }
        }
    }
    Ok(PolicySet {
        id,
        combining,
        target,
        children,
    })
}

fn map_policy(el: &XmlElement, diagnostics: &mut ParseDiagnostics) -> Result<Policy, XmlError> {
    expect_ns(el, POLICY_NS)?;
    let id = el.require_attr("PolicyId")?.to_owned();
    let combining_uri = el.require_attr("RuleCombiningAlgId")?;
    let combining =
        CombiningAlg::from_rule_uri(combining_uri).ok_or_else(|| XmlError::UnsupportedId {
            line: el.line,
            id: combining_uri.to_owned(),
        })?;
    let mut target = Target::any();
    let mut rules = Vec::new();
    for child in &el.children {
        match child.local.as_str() {
            "Target" => target = map_target(child, diagnostics)?,
            "Rule" => rules.push(map_rule(child, diagnostics)?),
            other => {
                return Err(XmlError::Syntax {
                    line: child.line,
                    message: format!("unsupported element <{other}> in Policy"),
                })
            }
        }
    }
    Ok(Policy {
        id,
        combining,
        target,
        rules,
    })
}

fn map_rule(el: &XmlElement, diagnostics: &mut ParseDiagnostics) -> Result<Rule, XmlError> {
    expect_ns(el, POLICY_NS)?;
    let id = el.require_attr("RuleId")?.to_owned();
    let effect = match el.require_attr("Effect")? {
        "Permit" => Effect::Permit,
        "Deny" => Effect::Deny,
        other => {
            return Err(XmlError::Syntax {
                line: el.line,
                message: format!("unknown rule effect {other}"),
            })
        }
    };
    let mut target = None;
    for child in &el.children {
        match child.local.as_str() {
            "Target" => target = Some(map_target(child, diagnostics)?),
            other => {
                return Err(XmlError::Syntax {
                    line: child.line,
                    message: format!("unsupported element <{other}> in Rule"),
                })
            }
        }
    }
    Ok(Rule { id, effect, target })
}

const SECTIONS: [(&str, &str, &str, &str); 3] = [
    ("Subjects", "Subject", "SubjectMatch", "SubjectAttributeDesignator"),
    ("Resources", "Resource", "ResourceMatch", "ResourceAttributeDesignator"),
    ("Actions", "Action", "ActionMatch", "ActionAttributeDesignator"),
];

fn map_target(el: &XmlElement, diagnostics: &mut ParseDiagnostics) -> Result<Target, XmlError> {
    expect_ns(el, POLICY_NS)?;
    let mut target = Target::any();
    for child in &el.children {
        let Some(section) = SECTIONS.iter().find(|s| s.0 == child.local) else {
            return Err(XmlError::Syntax {
                line: child.line,
                message: format!("unsupported element <{}> in Target", child.local),
            });
        };
        let groups = map_section(child, section, diagnostics)?;
        match section.0 {
            "Subjects" => target.subjects = groups,
            "Resources" => target.resources = groups,
            _ => target.actions = groups,
        }
    }
    Ok(target)
}

fn map_section(
    el: &XmlElement,
    section: &(&str, &str, &str, &str),
    diagnostics: &mut ParseDiagnostics,
) -> Result<Vec<Vec<MatchClause>>, XmlError> {
    let mut groups = Vec::new();
    for group_el in &el.children {
        if group_el.local != section.1 {
            return Err(XmlError::Syntax {
                line: group_el.line,
                message: format!(
                    "unsupported element <{}> in {}",
                    group_el.local, section.0
                ),
            });
        }
        let mut clauses = Vec::new();
        for match_el in &group_el.children {
            if match_el.local != section.2 {
                return Err(XmlError::Syntax {
                    line: match_el.line,
                    message: format!(
                        "unsupported element <{}> in {}",
                        match_el.local, section.1
                    ),
                });
            }
            clauses.extend(map_match(match_el, section, diagnostics)?);
        }
        groups.push(clauses);
    }
    Ok(groups)
}

/// Maps one `*Match` element to one or more clauses. A match holding
/// several (AttributeValue, designator) pairs is historical shorthand
/// for a conjunction; it is split here and never re-emitted.
fn map_match(
    el: &XmlElement,
    section: &(&str, &str, &str, &str),
    diagnostics: &mut ParseDiagnostics,
) -> Result<Vec<MatchClause>, XmlError> {
    let match_uri = el.require_attr("MatchId")?;
    let function = MatchFn::from_uri(match_uri).ok_or_else(|| XmlError::UnsupportedId {
        line: el.line,
        id: match_uri.to_owned(),
    })?;

    let mut pending_value: Option<(String, DataType)> = None;
    let mut clauses = Vec::new();
    for child in &el.children {
        match child.local.as_str() {
            "AttributeValue" => {
                if pending_value.is_some() {
                    return Err(XmlError::Syntax {
                        line: child.line,
                        message: "AttributeValue not followed by a designator".into(),
                    });
                }
                let dt_uri = child.require_attr("DataType")?;
                let dt = DataType::from_uri(dt_uri).ok_or_else(|| XmlError::UnsupportedId {
                    line: child.line,
                    id: dt_uri.to_owned(),
                })?;
                pending_value = Some((child.trimmed_text().to_owned(), dt));
            }
            designator if designator == section.3 => {
                let Some((literal, value_dt)) = pending_value.take() else {
                    return Err(XmlError::Syntax {
                        line: child.line,
                        message: format!("{designator} without a preceding AttributeValue"),
                    });
                };
                let attribute_id = child.require_attr("AttributeId")?.to_owned();
                let dt_uri = child.require_attr("DataType")?;
                let dt = DataType::from_uri(dt_uri).ok_or_else(|| XmlError::UnsupportedId {
                    line: child.line,
                    id: dt_uri.to_owned(),
                })?;
                if dt != value_dt {
                    return Err(XmlError::Syntax {
                        line: child.line,
                        message: format!(
                            "AttributeValue DataType {} differs from designator DataType {}",
                            value_dt.uri(),
                            dt.uri()
                        ),
                    });
                }
                clauses.push(MatchClause {
                    function,
                    literal,
                    designator: AttributeRef::new(attribute_id, dt),
                });
            }
            other => {
                return Err(XmlError::Syntax {
                    line: child.line,
                    message: format!("unsupported element <{other}> in {}", section.2),
                })
            }
        }
    }
    if pending_value.is_some() {
        return Err(XmlError::Syntax {
            line: el.line,
            message: "AttributeValue not followed by a designator".into(),
        });
    }
    if clauses.is_empty() {
        return Err(XmlError::Syntax {
            line: el.line,
            message: format!("{} holds no value/designator pair", section.2),
        });
    }
    if clauses.len() > 1 {
        diagnostics.normalizations.push(format!(
            "line {}: split {} into {} conjunctive {} clauses",
            el.line,
            section.2,
            clauses.len(),
            section.2
        ));
    }
    Ok(clauses)
}

// ---------------------------------------------------------------------------
// Request documents
// ---------------------------------------------------------------------------

/// Parses a `Request` document in the context namespace into attribute
/// bags. Multiple sections of one kind merge into one bag; multiple
/// `AttributeValue` children of one `Attribute` each contribute an
/// entry.
pub fn parse_request(input: &[u8]) -> Result<RequestCtx, XmlError> {
    let root = parse_tree(input)?;
    if root.local != "Request" {
        return Err(XmlError::Syntax {
            line: root.line,
            message: format!("expected root Request, found {}", root.local),
        });
    }
    expect_ns(&root, CONTEXT_NS)?;
    let mut req = RequestCtx::default();
    for section in &root.children {
        let bag = match section.local.as_str() {
            "Subject" => &mut req.subject,
            "Resource" => &mut req.resource,
            "Action" => &mut req.action,
            other => {
                return Err(XmlError::Syntax {
                    line: section.line,
                    message: format!("unsupported element <{other}> in Request"),
                })
            }
        };
        for attr_el in &section.children {
            if attr_el.local != "Attribute" {
                return Err(XmlError::Syntax {
                    line: attr_el.line,
                    message: format!("unsupported element <{}> in {}", attr_el.local, section.local),
                });
            }
            let attribute_id = attr_el.require_attr("AttributeId")?.to_owned();
            let dt_uri = attr_el.require_attr("DataType")?;
            let dt = DataType::from_uri(dt_uri).ok_or_else(|| XmlError::UnsupportedId {
                line: attr_el.line,
                id: dt_uri.to_owned(),
            })?;
            let mut any_value = false;
            for value_el in &attr_el.children {
                if value_el.local != "AttributeValue" {
                    return Err(XmlError::Syntax {
                        line: value_el.line,
                        message: format!(
                            "unsupported element <{}> in Attribute",
                            value_el.local
                        ),
                    });
                }
                any_value = true;
                bag.push(
                    AttributeRef::new(attribute_id.clone(), dt),
                    value_el.trimmed_text(),
                );
            }
            if !any_value {
                return Err(XmlError::Syntax {
                    line: attr_el.line,
                    message: "Attribute holds no AttributeValue".into(),
                });
            }
        }
    }
    Ok(req)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

const XML_DECL: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

fn esc(value: &str) -> String {
    quick_xml::escape::escape(value).into_owned()
}

struct XmlWriter {
    out: String,
    depth: usize,
}

impl XmlWriter {
    fn new() -> Self {
        XmlWriter {
            out: String::from(XML_DECL),
            depth: 0,
        }
    }

    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn open(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {}=\"{}\"", k, esc(v));
        }
        self.out.push_str(">\n");
        self.depth += 1;
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        let _ = write!(self.out, "</{}>\n", name);
    }

    fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {}=\"{}\"", k, esc(v));
        }
        self.out.push_str("/>\n");
    }

    fn leaf(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) {
        if text.is_empty() {
            self.empty(name, attrs);
            return;
        }
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {}=\"{}\"", k, esc(v));
        }
        let _ = write!(self.out, ">{}</{}>\n", esc(text), name);
    }
}

/// Serializes a PolicySet to canonical UTF-8 XML.
pub fn serialize_policy_set(ps: &PolicySet) -> Vec<u8> {
    let mut w = XmlWriter::new();
    write_policy_set(&mut w, ps, true);
    w.out.into_bytes()
}

fn write_policy_set(w: &mut XmlWriter, ps: &PolicySet, root: bool) {
    let mut attrs: Vec<(&str, &str)> = Vec::new();
    if root {
        attrs.push(("xmlns", POLICY_NS));
    }
    attrs.push(("PolicySetId", &ps.id));
    attrs.push(("PolicyCombiningAlgId", ps.combining.policy_uri()));
    w.open("PolicySet", &attrs);
    write_target(w, &ps.target);
    for child in &ps.children {
        match child {
            PolicySetChild::Policy(p) => write_policy(w, p),
            PolicySetChild::PolicySet(nested) => write_policy_set(w, nested, false),
            PolicySetChild::Reference(id) => w.leaf("PolicySetIdReference", &[], id),
        }
    }
    w.close("PolicySet");
}

fn write_policy(w: &mut XmlWriter, p: &Policy) {
    w.open(
        "Policy",
        &[
            ("PolicyId", p.id.as_str()),
            ("RuleCombiningAlgId", p.combining.rule_uri()),
        ],
    );
    write_target(w, &p.target);
    for rule in &p.rules {
        let attrs = [("RuleId", rule.id.as_str()), ("Effect", rule.effect.as_str())];
        match &rule.target {
            None => w.empty("Rule", &attrs),
            Some(t) => {
                w.open("Rule", &attrs);
                write_target(w, t);
                w.close("Rule");
            }
        }
    }
    w.close("Policy");
}

fn write_target(w: &mut XmlWriter, t: &Target) {
    if t.is_any() {
        w.empty("Target", &[]);
        return;
    }
    w.open("Target", &[]);
    for (section, groups) in [
        (&SECTIONS[0], &t.subjects),
        (&SECTIONS[1], &t.resources),
        (&SECTIONS[2], &t.actions),
    ] {
        if groups.is_empty() {
            continue;
        }
        w.open(section.0, &[]);
        for group in groups {
            w.open(section.1, &[]);
            for clause in group {
                w.open(section.2, &[("MatchId", clause.function.uri())]);
                w.leaf(
                    "AttributeValue",
                    &[("DataType", clause.designator.data_type.uri())],
                    &clause.literal,
                );
                w.empty(
                    section.3,
                    &[
                        ("AttributeId", clause.designator.attribute_id.as_str()),
                        ("DataType", clause.designator.data_type.uri()),
                    ],
                );
                w.close(section.2);
            }
            w.close(section.1);
        }
        w.close(section.0);
    }
    w.close("Target");
}

/// Serializes a request context to canonical UTF-8 XML; inverse of
/// [`parse_request`] for whitespace-trimmed values.
pub fn serialize_request(req: &RequestCtx) -> Vec<u8> {
    let mut w = XmlWriter::new();
    w.open("Request", &[("xmlns", CONTEXT_NS)]);
    for (name, bag) in [
        ("Subject", &req.subject),
        ("Resource", &req.resource),
        ("Action", &req.action),
    ] {
        if bag.is_empty() {
            w.empty(name, &[]);
            continue;
        }
        w.open(name, &[]);
        for (attr, value) in bag.iter() {
            w.open(
                "Attribute",
                &[
                    ("AttributeId", attr.attribute_id.as_str()),
                    ("DataType", attr.data_type.uri()),
                ],
            );
            w.leaf("AttributeValue", &[], value);
            w.close("Attribute");
        }
        w.close(name);
    }
    w.close("Request");
    w.out.into_bytes()
}

/// Serializes a response context:
/// `<Response><Result><Decision>…</Decision><Status>…</Status></Result></Response>`.
pub fn serialize_response(r: &ResponseCtx) -> Vec<u8> {
    let mut w = XmlWriter::new();
    w.open("Response", &[("xmlns", CONTEXT_NS)]);
    w.open("Result", &[]);
    w.leaf("Decision", &[], r.decision.as_str());
    w.leaf("Status", &[], r.status.as_str());
    w.close("Result");
    w.close("Response");
    w.out.into_bytes()
}
