//! In-memory representation of the XACML 1.x subset used by the policy
//! compiler and decision point: PolicySets, Policies, Rules, Targets,
//! match clauses, and the request/response contexts they are evaluated
//! against.
//!
//! The subset is closed on purpose: two match functions (`string-equal`,
//! `anyURI-equal`) and three combining algorithms. Anything else is
//! rejected at parse time rather than silently passed through.

use std::collections::HashSet;
use std::fmt;

pub const POLICY_NS: &str = "urn:oasis:names:tc:xacml:1.0:policy";
pub const CONTEXT_NS: &str = "urn:oasis:names:tc:xacml:1.0:context";

pub const ATTR_SUBJECT_ROLE: &str = "urn:oasis:names:tc:xacml:1.0:subject:role";
pub const ATTR_SUBJECT_ID: &str = "urn:oasis:names:tc:xacml:1.0:subject:subject-id";
pub const ATTR_RESOURCE_ID: &str = "urn:oasis:names:tc:xacml:1.0:resource:resource-id";
pub const ATTR_ACTION_ID: &str = "urn:oasis:names:tc:xacml:1.0:action:action-id";
/// Subject attribute carrying one `name-value` role parameter per entry.
pub const ATTR_RPARAMS: &str = "RParams";
/// Action attribute carrying one `name-value` privilege parameter per entry.
pub const ATTR_APARAMS: &str = "AParams";

/// Synthetic action id used by role-activation requests.
pub const ACTIVATE_ROLE_ACTION: &str = "activate-role";

/// The two attribute data types exercised by the subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataType {
    String,
    AnyUri,
}

impl DataType {
    pub fn uri(self) -> &'static str {
        match self {
            DataType::String => "http://www.w3.org/2001/XMLSchema#string",
            DataType::AnyUri => "http://www.w3.org/2001/XMLSchema#anyURI",
        }
    }

    pub fn from_uri(uri: &str) -> Option<Self> {
        match uri {
            "http://www.w3.org/2001/XMLSchema#string" => Some(DataType::String),
            "http://www.w3.org/2001/XMLSchema#anyURI" => Some(DataType::AnyUri),
            _ => None,
        }
    }
}

/// Supported match functions. Both compare exact codepoint equality;
/// they differ only in the operand data type they are defined over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchFn {
    StringEqual,
    AnyUriEqual,
}

impl MatchFn {
    pub fn uri(self) -> &'static str {
        match self {
            MatchFn::StringEqual => "urn:oasis:names:tc:xacml:1.0:function:string-equal",
            MatchFn::AnyUriEqual => "urn:oasis:names:tc:xacml:1.0:function:anyURI-equal",
        }
    }

    pub fn from_uri(uri: &str) -> Option<Self> {
        match uri {
            "urn:oasis:names:tc:xacml:1.0:function:string-equal" => Some(MatchFn::StringEqual),
            "urn:oasis:names:tc:xacml:1.0:function:anyURI-equal" => Some(MatchFn::AnyUriEqual),
            _ => None,
        }
    }

    /// Data type both operands must have for the clause to be well typed.
    pub fn operand_type(self) -> DataType {
        match self {
            MatchFn::StringEqual => DataType::String,
            MatchFn::AnyUriEqual => DataType::AnyUri,
        }
    }
}

/// Supported combining algorithms, shared by the policy- and
/// rule-combining URI families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombiningAlg {
    PermitOverrides,
    DenyOverrides,
    FirstApplicable,
}

impl CombiningAlg {
    pub fn policy_uri(self) -> &'static str {
        match self {
            CombiningAlg::PermitOverrides => {
                "urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:permit-overrides"
            }
            CombiningAlg::DenyOverrides => {
                "urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:deny-overrides"
            }
            CombiningAlg::FirstApplicable => {
                "urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:first-applicable"
            }
        }
    }

    pub fn rule_uri(self) -> &'static str {
        match self {
            CombiningAlg::PermitOverrides => {
                "urn:oasis:names:tc:xacml:1.0:rule-combining-algorithm:permit-overrides"
            }
            CombiningAlg::DenyOverrides => {
                "urn:oasis:names:tc:xacml:1.0:rule-combining-algorithm:deny-overrides"
            }
            CombiningAlg::FirstApplicable => {
                "urn:oasis:names:tc:xacml:1.0:rule-combining-algorithm:first-applicable"
            }
        }
    }

    pub fn from_policy_uri(uri: &str) -> Option<Self> {
        [
            CombiningAlg::PermitOverrides,
            CombiningAlg::DenyOverrides,
            CombiningAlg::FirstApplicable,
        ]
        .into_iter()
        .find(|alg| alg.policy_uri() == uri)
    }

    pub fn from_rule_uri(uri: &str) -> Option<Self> {
        [
            CombiningAlg::PermitOverrides,
            CombiningAlg::DenyOverrides,
            CombiningAlg::FirstApplicable,
        ]
        .into_iter()
        .find(|alg| alg.rule_uri() == uri)
    }
}

/// Names one attribute in a request bag: id plus expected data type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeRef {
    pub attribute_id: String,
    pub data_type: DataType,
}

impl AttributeRef {
    pub fn new(attribute_id: impl Into<String>, data_type: DataType) -> Self {
        AttributeRef {
            attribute_id: attribute_id.into(),
            data_type,
        }
    }
}

/// One `<*Match>` element: literal compared against a designated
/// request attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchClause {
    pub function: MatchFn,
    pub literal: String,
    pub designator: AttributeRef,
}

impl MatchClause {
    pub fn new(function: MatchFn, literal: impl Into<String>, designator: AttributeRef) -> Self {
        MatchClause {
            function,
            literal: literal.into(),
            designator,
        }
    }

    /// String-equality clause over a `#string` designator.
    pub fn string_eq(attribute_id: &str, literal: impl Into<String>) -> Self {
        MatchClause::new(
            MatchFn::StringEqual,
            literal,
            AttributeRef::new(attribute_id, DataType::String),
        )
    }

    /// URI-equality clause over a `#anyURI` designator.
    pub fn any_uri_eq(attribute_id: &str, literal: impl Into<String>) -> Self {
        MatchClause::new(
            MatchFn::AnyUriEqual,
            literal,
            AttributeRef::new(attribute_id, DataType::AnyUri),
        )
    }
}

/// Applicability condition of a PolicySet, Policy, or Rule.
///
/// Each section is a disjunction of conjunctive clause groups; an empty
/// section matches every request.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Target {
    pub subjects: Vec<Vec<MatchClause>>,
    pub resources: Vec<Vec<MatchClause>>,
    pub actions: Vec<Vec<MatchClause>>,
}

impl Target {
    /// Target with no sections: applies to every request.
    pub fn any() -> Self {
        Target::default()
    }

    pub fn is_any(&self) -> bool {
        self.subjects.is_empty() && self.resources.is_empty() && self.actions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Effect {
    Permit,
    Deny,
}

impl Effect {
    pub fn as_str(self) -> &'static str {
        match self {
            Effect::Permit => "Permit",
            Effect::Deny => "Deny",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub effect: Effect,
    pub target: Option<Target>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub id: String,
    pub combining: CombiningAlg,
    pub target: Target,
    pub rules: Vec<Rule>,
}

/// Child slot of a PolicySet: inline policy, inline set, or an id
/// reference resolved against the store at evaluation time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicySetChild {
    Policy(Policy),
    PolicySet(PolicySet),
    Reference(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicySet {
    pub id: String,
    pub combining: CombiningAlg,
    pub target: Target,
    pub children: Vec<PolicySetChild>,
}

/// Multiset of (attribute, value) pairs for one request category.
/// Duplicate values for one attribute are legal; clause matching
/// succeeds if any bag value satisfies it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttributeBag {
    entries: Vec<(AttributeRef, String)>,
}

impl AttributeBag {
    pub fn new() -> Self {
        AttributeBag::default()
    }

    pub fn push(&mut self, attr: AttributeRef, value: impl Into<String>) {
        self.entries.push((attr, value.into()));
    }

    /// All values whose attribute id and data type equal `r`, in
    /// insertion order.
    pub fn lookup(&self, r: &AttributeRef) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(a, _)| a == r)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(AttributeRef, String)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

impl FromIterator<(AttributeRef, String)> for AttributeBag {
    fn from_iter<T: IntoIterator<Item = (AttributeRef, String)>>(iter: T) -> Self {
        AttributeBag {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Attribute bags for one access request, split by category.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RequestCtx {
    pub subject: AttributeBag,
    pub resource: AttributeBag,
    pub action: AttributeBag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Permit,
    Deny,
    NotApplicable,
    Indeterminate,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Permit => "Permit",
            Decision::Deny => "Deny",
            Decision::NotApplicable => "NotApplicable",
            Decision::Indeterminate => "Indeterminate",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<Effect> for Decision {
    fn from(e: Effect) -> Self {
        match e {
            Effect::Permit => Decision::Permit,
            Effect::Deny => Decision::Deny,
        }
    }
}

/// Evaluation status: `ok`, or the error code explaining an
/// Indeterminate decision (and, for the actor flow, a denied
/// activation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    Error(String),
}

impl Status {
    pub fn as_str(&self) -> &str {
        match self {
            Status::Ok => "ok",
            Status::Error(code) => code,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decision plus status, the PDP's answer to one request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseCtx {
    pub decision: Decision,
    pub status: Status,
}

impl ResponseCtx {
    /// Wraps a decision, attaching `cause` as the status when the
    /// decision is Indeterminate and `ok` otherwise.
    pub fn from_decision(decision: Decision, cause: Option<String>) -> Self {
        let status = if decision == Decision::Indeterminate {
            Status::Error(cause.unwrap_or_else(|| "indeterminate".to_owned()))
        } else {
            Status::Ok
        };
        ResponseCtx { decision, status }
    }
}

/// Structural problem found in a PolicySet tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrViolation {
    pub code: &'static str,
    pub detail: String,
}

impl IrViolation {
    fn new(code: &'static str, detail: impl Into<String>) -> Self {
        IrViolation {
            code,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for IrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

/// Checks a PolicySet tree for id collisions, ill-typed match clauses,
/// and references that resolve neither inside `known_ids` nor anywhere
/// else. Returns an empty list when the tree is sound; violations are
/// sorted so the result is independent of child ordering.
pub fn well_formed(ps: &PolicySet, known_ids: &HashSet<String>) -> Vec<IrViolation> {
    let mut violations = Vec::new();
    let mut seen_ids = HashSet::new();
    walk_policy_set(ps, known_ids, &mut seen_ids, &mut violations);
    violations.sort_by(|a, b| (a.code, &a.detail).cmp(&(b.code, &b.detail)));
    violations.dedup();
    violations
}

fn walk_policy_set(
    ps: &PolicySet,
    known_ids: &HashSet<String>,
    seen_ids: &mut HashSet<String>,
    out: &mut Vec<IrViolation>,
) {
    record_id(&ps.id, seen_ids, out);
    check_target(&ps.target, &ps.id, out);
    for child in &ps.children {
        match child {
            PolicySetChild::Policy(p) => walk_policy(p, seen_ids, out),
            PolicySetChild::PolicySet(nested) => {
                walk_policy_set(nested, known_ids, seen_ids, out)
            }
            PolicySetChild::Reference(id) => {
                if !known_ids.contains(id) {
                    out.push(IrViolation::new("dangling-ref", id.clone()));
                }
            }
        }
    }
}

fn walk_policy(p: &Policy, seen_ids: &mut HashSet<String>, out: &mut Vec<IrViolation>) {
    record_id(&p.id, seen_ids, out);
    check_target(&p.target, &p.id, out);
    let mut rule_ids = HashSet::new();
    for rule in &p.rules {
        if !rule_ids.insert(rule.id.clone()) {
            out.push(IrViolation::new("duplicate-id", rule.id.clone()));
        }
        if let Some(t) = &rule.target {
            check_target(t, &rule.id, out);
        }
    }
}

fn record_id(id: &str, seen_ids: &mut HashSet<String>, out: &mut Vec<IrViolation>) {
    if !seen_ids.insert(id.to_owned()) {
        out.push(IrViolation::new("duplicate-id", id));
    }
}

fn check_target(t: &Target, owner: &str, out: &mut Vec<IrViolation>) {
    for group in t
        .subjects
        .iter()
        .chain(t.resources.iter())
        .chain(t.actions.iter())
    {
        for clause in group {
            if clause.function.operand_type() != clause.designator.data_type {
                out.push(IrViolation::new(
                    "type-mismatch",
                    format!(
                        "{}: {} applied to {} designator {}",
                        owner,
                        clause.function.uri(),
                        clause.designator.data_type.uri(),
                        clause.designator.attribute_id
                    ),
                ));
            }
        }
    }
}
