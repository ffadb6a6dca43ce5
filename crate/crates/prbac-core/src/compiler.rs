//! Compiles a model document into the layered PolicySet structure the
//! decision point evaluates:
//!
//! * one role-assignment set (`RAS:…`) per user assignment, granting
//!   the `activate-role` action on a role-value URI to one subject;
//! * one role set (`RPS:…`) per concrete role instance, targeting the
//!   instance's role-value URI plus one `RParams` clause per binding
//!   and referencing the instance's permission set;
//! * one permission set (`PPS:…`) per instance, holding one Permit
//!   policy per privilege and a reference to each direct junior
//!   instance's permission set.
//!
//! Permission sets have empty targets and are never roots, so a
//! privilege is reachable only by traversing a role set: holding the
//! role attribute is the only way to reach its permissions.

use std::fs;
use std::io;
use std::path::Path;

use crate::batch::map_collect;
use crate::ir::{
    AttributeRef, CombiningAlg, DataType, Effect, MatchClause, Policy, PolicySet, PolicySetChild,
    RequestCtx, Rule, Target, ACTIVATE_ROLE_ACTION, ATTR_ACTION_ID, ATTR_APARAMS,
    ATTR_RESOURCE_ID, ATTR_RPARAMS, ATTR_SUBJECT_ID, ATTR_SUBJECT_ROLE,
};
use crate::model::{
    authorized_privileges_own_role, direct_junior_instances, encode_param, instance_closure,
    validate_model, ModelDocument, ParamBinding, Privilege, RoleInstance, Violation,
};
use crate::pdp::PolicyStore;
use crate::xml::serialize_policy_set;

/// Id prefixes and the URI base role values are minted under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamingScheme {
    pub rps_prefix: String,
    pub pps_prefix: String,
    pub ras_prefix: String,
    pub role_value_base: String,
}

impl Default for NamingScheme {
    fn default() -> Self {
        NamingScheme {
            rps_prefix: "RPS".into(),
            pps_prefix: "PPS".into(),
            ras_prefix: "RAS".into(),
            role_value_base: "urn:example:role-values".into(),
        }
    }
}

/// Which layer a PolicySet id belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// Role PolicySet: subject-targeted entry point.
    Rps,
    /// Permission PolicySet: reachable only by reference.
    Pps,
}

impl NamingScheme {
    fn suffix(ri: &RoleInstance) -> String {
        let mut s = format!("{}:role", ri.role);
        for b in &ri.bindings {
            s.push(':');
            s.push_str(&encode_param(b));
        }
        s
    }

    /// `<KIND>:<role>:role[:<name>-<value>…]`, bindings in canonical
    /// order; unparameterized roles yield `<KIND>:<role>:role`.
    pub fn policy_set_id(&self, kind: SetKind, ri: &RoleInstance) -> String {
        let prefix = match kind {
            SetKind::Rps => &self.rps_prefix,
            SetKind::Pps => &self.pps_prefix,
        };
        format!("{}:{}", prefix, Self::suffix(ri))
    }

    /// The URI carried by the subject role attribute for an activated
    /// instance: `<base>:<role>:rparams:<name>-<value>…`, or
    /// `<base>:<role>` for an unparameterized role.
    pub fn role_value_uri(&self, ri: &RoleInstance) -> String {
        if ri.bindings.is_empty() {
            return format!("{}:{}", self.role_value_base, ri.role);
        }
        let mut s = format!("{}:{}:rparams", self.role_value_base, ri.role);
        for b in &ri.bindings {
            s.push(':');
            s.push_str(&encode_param(b));
        }
        s
    }

    /// `RAS:<user>:<rps-suffix>` — one id per user assignment.
    pub fn role_assignment_id(&self, user: &str, ri: &RoleInstance) -> String {
        format!("{}:{}:{}", self.ras_prefix, user, Self::suffix(ri))
    }
}

/// Role PolicySet for one instance: subject target over the role-value
/// URI plus one `RParams` clause per binding, single child referencing
/// the instance's permission set.
pub fn compile_rps(scheme: &NamingScheme, ri: &RoleInstance) -> PolicySet {
    let mut group = vec![MatchClause::any_uri_eq(
        ATTR_SUBJECT_ROLE,
        scheme.role_value_uri(ri),
    )];
    for b in &ri.bindings {
        group.push(MatchClause::string_eq(ATTR_RPARAMS, encode_param(b)));
    }
    PolicySet {
        id: scheme.policy_set_id(SetKind::Rps, ri),
        combining: CombiningAlg::PermitOverrides,
        target: Target {
            subjects: vec![group],
            ..Target::default()
        },
        children: vec![PolicySetChild::Reference(
            scheme.policy_set_id(SetKind::Pps, ri),
        )],
    }
}

/// Permission PolicySet for one instance: empty target (reachable only
/// by reference), one Permit policy per privilege, then references to
/// each direct junior instance's permission set.
///
/// Each privilege policy gates on the service id in its own target;
/// its single Permit rule carries the action target — action id plus
/// one `AParams` clause per concrete privilege parameter. Wildcard
/// parameters emit no clause and so match any request value.
pub fn compile_pps(
    scheme: &NamingScheme,
    ri: &RoleInstance,
    privileges: &[Privilege],
    junior_instances: &[RoleInstance],
) -> PolicySet {
    let pps_id = scheme.policy_set_id(SetKind::Pps, ri);
    let mut children = Vec::with_capacity(privileges.len() + junior_instances.len());
    for (i, privilege) in privileges.iter().enumerate() {
        let policy_id = format!("{pps_id}:p{i}");
        let mut action_group = vec![MatchClause::string_eq(ATTR_ACTION_ID, &privilege.action)];
        for b in &privilege.aparams {
            if !b.is_wildcard() {
                action_group.push(MatchClause::string_eq(ATTR_APARAMS, encode_param(b)));
            }
        }
        children.push(PolicySetChild::Policy(Policy {
            id: policy_id.clone(),
            combining: CombiningAlg::PermitOverrides,
            target: Target {
                resources: vec![vec![MatchClause::string_eq(
                    ATTR_RESOURCE_ID,
                    &privilege.service,
                )]],
                ..Target::default()
            },
            rules: vec![Rule {
                id: format!("{policy_id}:r"),
                effect: Effect::Permit,
                target: Some(Target {
                    actions: vec![action_group],
                    ..Target::default()
                }),
            }],
        }));
    }
    for junior in junior_instances {
        children.push(PolicySetChild::Reference(
            scheme.policy_set_id(SetKind::Pps, junior),
        ));
    }
    PolicySet {
        id: pps_id,
        combining: CombiningAlg::PermitOverrides,
        target: Target::any(),
        children,
    }
}

/// One role-assignment PolicySet per UA entry: the named subject may
/// run the `activate-role` action on the instance's role-value URI.
/// These power the role-membership query and actor activation.
pub fn compile_role_assignment(scheme: &NamingScheme, doc: &ModelDocument) -> Vec<PolicySet> {
    let mut entries: Vec<(&str, &RoleInstance)> = doc
        .ua
        .iter()
        .map(|ua| (ua.user.as_str(), &ua.role_instance))
        .collect();
    entries.sort();
    entries.dedup();
    entries
        .into_iter()
        .map(|(user, ri)| {
            let id = scheme.role_assignment_id(user, ri);
            let grant_id = format!("{id}:grant");
            PolicySet {
                id,
                combining: CombiningAlg::PermitOverrides,
                target: Target {
                    subjects: vec![vec![MatchClause::string_eq(ATTR_SUBJECT_ID, user)]],
                    resources: vec![vec![MatchClause::any_uri_eq(
                        ATTR_RESOURCE_ID,
                        scheme.role_value_uri(ri),
                    )]],
                    actions: vec![vec![MatchClause::string_eq(
                        ATTR_ACTION_ID,
                        ACTIVATE_ROLE_ACTION,
                    )]],
                },
                children: vec![PolicySetChild::Policy(Policy {
                    id: grant_id.clone(),
                    combining: CombiningAlg::PermitOverrides,
                    target: Target::any(),
                    rules: vec![Rule {
                        id: format!("{grant_id}:r"),
                        effect: Effect::Permit,
                        target: None,
                    }],
                })],
            }
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("model is invalid: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

impl CompileError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            CompileError::Invalid(v) => v,
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Compiles a whole model with the default naming scheme.
pub fn compile_model(doc: &ModelDocument) -> Result<PolicyStore, CompileError> {
    compile_model_with(&NamingScheme::default(), doc)
}

/// Compiles a whole model: role-assignment sets and role sets become
/// roots, permission sets stay reachable only by reference. Role sets
/// are generated for every instance activated in UA plus every
/// instance induced through hierarchy edges, so senior references
/// always resolve.
pub fn compile_model_with(
    scheme: &NamingScheme,
    doc: &ModelDocument,
) -> Result<PolicyStore, CompileError> {
    let violations = validate_model(doc);
    if !violations.is_empty() {
        return Err(CompileError::Invalid(violations));
    }

    let mut instances: Vec<RoleInstance> = Vec::new();
    for ua in &doc.ua {
        instances.extend(instance_closure(doc, &ua.role_instance));
    }
    instances.sort();
    instances.dedup();

    let pairs = map_collect(&instances, |ri| {
        let privileges = authorized_privileges_own_role(doc, ri);
        let juniors = direct_junior_instances(doc, ri);
        (
            compile_rps(scheme, ri),
            compile_pps(scheme, ri, &privileges, &juniors),
        )
    });

    let mut sets = compile_role_assignment(scheme, doc);
    let mut roots: Vec<String> = sets.iter().map(|ps| ps.id.clone()).collect();
    for (rps, pps) in pairs {
        roots.push(rps.id.clone());
        sets.push(rps);
        sets.push(pps);
    }
    roots.sort();

    let store = PolicyStore::new(sets, roots)
        .expect("compiled ids are unique and every root is emitted");
    debug_assert!(store.well_formed_violations().is_empty());
    Ok(store)
}

/// Writes one `<id with ':' replaced by '_'>.xml` file per PolicySet
/// plus `roots.txt` listing root ids in evaluation order.
pub fn write_policy_dir(store: &PolicyStore, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for ps in store.sets() {
        let file = format!("{}.xml", ps.id.replace(':', "_"));
        fs::write(dir.join(file), serialize_policy_set(ps))?;
    }
    let mut roots = store.roots().join("\n");
    if !roots.is_empty() {
        roots.push('\n');
    }
    fs::write(dir.join("roots.txt"), roots)
}

/// Request a PEP would send for an activated instance accessing a
/// service: subject carries the role-value URI and one `RParams` entry
/// per binding; resource and action carry the service, action, and
/// encoded `AParams` values.
pub fn access_request(
    scheme: &NamingScheme,
    ri: &RoleInstance,
    service: &str,
    action: &str,
    aparams: &[ParamBinding],
) -> RequestCtx {
    let mut req = RequestCtx::default();
    req.subject.push(
        AttributeRef::new(ATTR_SUBJECT_ROLE, DataType::AnyUri),
        scheme.role_value_uri(ri),
    );
    for b in &ri.bindings {
        req.subject.push(
            AttributeRef::new(ATTR_RPARAMS, DataType::String),
            encode_param(b),
        );
    }
    req.resource.push(
        AttributeRef::new(ATTR_RESOURCE_ID, DataType::String),
        service,
    );
    req.action
        .push(AttributeRef::new(ATTR_ACTION_ID, DataType::String), action);
    for b in aparams {
        req.action.push(
            AttributeRef::new(ATTR_APARAMS, DataType::String),
            encode_param(b),
        );
    }
    req
}

/// Phase-1 request asking to activate a role: subject id, the
/// `activate-role` action, and the role-value URI as the resource.
pub fn activation_request(user: &str, role_uri: &str) -> RequestCtx {
    let mut req = RequestCtx::default();
    req.subject
        .push(AttributeRef::new(ATTR_SUBJECT_ID, DataType::String), user);
    req.resource.push(
        AttributeRef::new(ATTR_RESOURCE_ID, DataType::AnyUri),
        role_uri,
    );
    req.action.push(
        AttributeRef::new(ATTR_ACTION_ID, DataType::String),
        ACTIVATE_ROLE_ACTION,
    );
    req
}
