//! Declarative SRBAC model: users, parameterized roles, services, and
//! the assignment relations between them, plus a brute-force decision
//! oracle that fixes the intended semantics independently of the policy
//! compiler and decision point.
//!
//! Model documents are UTF-8 JSON with top-level keys `users`, `roles`,
//! `services`, `ua`, `pa`; unknown keys are rejected. The wildcard
//! parameter value is spelled `"*"` and is legal only in privilege
//! assignments, never in a concrete role activation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ir::Decision;

/// Wildcard parameter value: matches any request value.
pub const WILDCARD: &str = "*";

/// Access mode denoting the absence of a permission. Privileges with
/// this action compile to nothing and never grant access.
pub const NULL_ACTION: &str = "null";

/// Named parameter value. `value` is either a literal or [`WILDCARD`].
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(deny_unknown_fields)]
pub struct ParamBinding {
    pub name: String,
    pub value: String,
}

impl ParamBinding {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        ParamBinding {
            name: name.into(),
            value: value.into(),
        }
    }

    pub fn is_wildcard(&self) -> bool {
        self.value == WILDCARD
    }
}

/// Role declaration: name, ordered parameter names, and direct junior
/// roles (RBAC₁ hierarchy edges, senior to junior).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleDecl {
    pub name: String,
    #[serde(default)]
    pub param_names: Vec<String>,
    #[serde(default)]
    pub juniors: Vec<String>,
}

/// A role with concrete parameter values, e.g.
/// `student[studentid=02123781]`. Bindings are kept sorted by name so
/// equal instances compare equal and derive stable ids.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(deny_unknown_fields)]
pub struct RoleInstance {
    pub role: String,
    #[serde(default)]
    pub bindings: Vec<ParamBinding>,
}

impl RoleInstance {
    /// Builds a canonical instance: bindings sorted by name.
    pub fn new(role: impl Into<String>, mut bindings: Vec<ParamBinding>) -> Self {
        bindings.sort();
        RoleInstance {
            role: role.into(),
            bindings,
        }
    }

    /// Instance of an unparameterized role.
    pub fn plain(role: impl Into<String>) -> Self {
        RoleInstance::new(role, Vec::new())
    }

    pub fn canonicalize(&mut self) {
        self.bindings.sort();
    }
}

impl fmt::Display for RoleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.role)?;
        for (i, b) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", b.name, b.value)?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct User {
    pub id: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

/// A service with its access modes. Services replace the bare object
/// construct: privileges name a service id plus one of its actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Service {
    pub id: String,
    pub actions: BTreeSet<String>,
}

/// (service, action) pair plus privilege parameters. Parameters may be
/// wildcarded; a wildcard constrains nothing at request time.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(deny_unknown_fields)]
pub struct Privilege {
    pub service: String,
    pub action: String,
    #[serde(default)]
    pub aparams: Vec<ParamBinding>,
}

/// Privilege-to-role assignment. The pattern restricts which role
/// instances receive the privilege: literals must match the instance
/// binding exactly, wildcards match any value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrivAssignment {
    pub role: String,
    #[serde(default)]
    pub role_param_pattern: Vec<ParamBinding>,
    pub privilege: Privilege,
}

/// User-to-role-instance assignment. Activation is explicit per entry;
/// bindings must be concrete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserAssignment {
    pub user: String,
    pub role_instance: RoleInstance,
}

/// The whole declarative world a policy store is compiled from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default)]
    pub users: Vec<User>,
    #[serde(default)]
    pub roles: Vec<RoleDecl>,
    #[serde(default)]
    pub services: Vec<Service>,
    #[serde(default)]
    pub ua: Vec<UserAssignment>,
    #[serde(default)]
    pub pa: Vec<PrivAssignment>,
}

impl ModelDocument {
    /// Parses a model document from JSON and canonicalizes binding
    /// order everywhere.
    pub fn from_json_str(input: &str) -> Result<Self, ModelError> {
        let mut doc: ModelDocument = serde_json::from_str(input)?;
        doc.canonicalize();
        Ok(doc)
    }

    pub fn canonicalize(&mut self) {
        for ua in &mut self.ua {
            ua.role_instance.canonicalize();
        }
        for pa in &mut self.pa {
            pa.role_param_pattern.sort();
            pa.privilege.aparams.sort();
        }
    }

    pub fn role(&self, name: &str) -> Option<&RoleDecl> {
        self.roles.iter().find(|r| r.name == name)
    }

    pub fn user(&self, id: &str) -> Option<&User> {
        self.users.iter().find(|u| u.id == id)
    }

    pub fn service(&self, id: &str) -> Option<&Service> {
        self.services.iter().find(|s| s.id == id)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("unknown-user: {0}")]
    UnknownUser(String),
    #[error("unknown-role: {0}")]
    UnknownRole(String),
    #[error("unknown-service: {0}")]
    UnknownService(String),
    #[error("model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// One broken invariant: the offending entity and the rule it breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub rule: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(entity: impl Into<String>, rule: &'static str, detail: impl Into<String>) -> Self {
        Violation {
            entity: entity.into(),
            rule,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.entity, self.rule, self.detail)
    }
}

/// Checks every model invariant. An empty list means the document is
/// valid; violations are data, not failures.
pub fn validate_model(doc: &ModelDocument) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut user_ids = HashSet::new();
    for user in &doc.users {
        if user.id.is_empty() {
            out.push(Violation::new("user", "empty-id", "user id must be non-empty"));
        }
        if !user_ids.insert(user.id.clone()) {
            out.push(Violation::new(&user.id, "duplicate-user", "user id declared twice"));
        }
    }

    let mut role_names = HashSet::new();
    for role in &doc.roles {
        if role.name.is_empty() {
            out.push(Violation::new("role", "empty-id", "role name must be non-empty"));
        }
        if !role_names.insert(role.name.clone()) {
            out.push(Violation::new(&role.name, "duplicate-role", "role declared twice"));
        }
        let mut params = HashSet::new();
        for p in &role.param_names {
            if p.is_empty() {
                out.push(Violation::new(&role.name, "empty-param-name", "parameter name must be non-empty"));
            }
            if !params.insert(p.clone()) {
                out.push(Violation::new(
                    &role.name,
                    "duplicate-param",
                    format!("parameter {p} declared twice"),
                ));
            }
        }
    }
    for role in &doc.roles {
        for junior in &role.juniors {
            if doc.role(junior).is_none() {
                out.push(Violation::new(
                    &role.name,
                    "unknown-role",
                    format!("junior {junior} is not declared"),
                ));
            }
        }
    }
    out.extend(hierarchy_cycles(doc));

    let mut service_ids = HashSet::new();
    for service in &doc.services {
        if service.id.is_empty() {
            out.push(Violation::new("service", "empty-id", "service id must be non-empty"));
        }
        if !service_ids.insert(service.id.clone()) {
            out.push(Violation::new(&service.id, "duplicate-service", "service id declared twice"));
        }
        if service.actions.is_empty() {
            out.push(Violation::new(&service.id, "empty-actions", "service must declare at least one action"));
        }
    }

    for ua in &doc.ua {
        let entity = format!("ua:{}:{}", ua.user, ua.role_instance);
        if doc.user(&ua.user).is_none() {
            out.push(Violation::new(&entity, "unknown-user", format!("user {} is not declared", ua.user)));
        }
        match doc.role(&ua.role_instance.role) {
            None => out.push(Violation::new(
                &entity,
                "unknown-role",
                format!("role {} is not declared", ua.role_instance.role),
            )),
            Some(role) => check_instance_bindings(&entity, role, &ua.role_instance, &mut out),
        }
    }

    for pa in &doc.pa {
        let entity = format!("pa:{}:{}:{}", pa.role, pa.privilege.service, pa.privilege.action);
        match doc.role(&pa.role) {
            None => out.push(Violation::new(
                &entity,
                "unknown-role",
                format!("role {} is not declared", pa.role),
            )),
            Some(role) => {
                for b in &pa.role_param_pattern {
                    if b.name.is_empty() {
                        out.push(Violation::new(&entity, "empty-param-name", "pattern name must be non-empty"));
                    }
                    if !role.param_names.contains(&b.name) {
                        out.push(Violation::new(
                            &entity,
                            "pattern-name",
                            format!("pattern names {} which role {} does not declare", b.name, role.name),
                        ));
                    }
                }
            }
        }
        match doc.service(&pa.privilege.service) {
            None => out.push(Violation::new(
                &entity,
                "unknown-service",
                format!("service {} is not declared", pa.privilege.service),
            )),
            Some(service) => {
                if pa.privilege.action != NULL_ACTION
                    && !service.actions.contains(&pa.privilege.action)
                {
                    out.push(Violation::new(
                        &entity,
                        "unknown-action",
                        format!(
                            "service {} does not offer action {}",
                            service.id, pa.privilege.action
                        ),
                    ));
                }
            }
        }
        for b in &pa.privilege.aparams {
            if b.name.is_empty() {
                out.push(Violation::new(&entity, "empty-param-name", "aparam name must be non-empty"));
            }
        }
    }

    out
}

fn check_instance_bindings(
    entity: &str,
    role: &RoleDecl,
    ri: &RoleInstance,
    out: &mut Vec<Violation>,
) {
    let bound: BTreeSet<&str> = ri.bindings.iter().map(|b| b.name.as_str()).collect();
    let declared: BTreeSet<&str> = role.param_names.iter().map(|p| p.as_str()).collect();
    if bound.len() != ri.bindings.len() {
        out.push(Violation::new(entity, "duplicate-param", "binding names must be distinct"));
    }
    if bound != declared {
        out.push(Violation::new(
            entity,
            "binding-mismatch",
            format!(
                "bindings [{}] must name exactly the role parameters [{}]",
                itertools_join(bound.iter()),
                itertools_join(declared.iter())
            ),
        ));
    }
    for b in &ri.bindings {
        if b.is_wildcard() {
            out.push(Violation::new(
                entity,
                "wildcard-binding",
                format!("binding {} must be concrete in an activation", b.name),
            ));
        }
        if b.name.is_empty() {
            out.push(Violation::new(entity, "empty-param-name", "binding name must be non-empty"));
        }
    }
}

fn itertools_join<'a>(items: impl Iterator<Item = &'a &'a str>) -> String {
    items.copied().collect::<Vec<_>>().join(",")
}

/// Reports one violation per hierarchy back edge (DFS), so a simple
/// two-role cycle yields exactly one entry.
fn hierarchy_cycles(doc: &ModelDocument) -> Vec<Violation> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color: HashMap<&str, Color> =
        doc.roles.iter().map(|r| (r.name.as_str(), Color::White)).collect();
    let mut out = Vec::new();

    fn visit<'a>(
        doc: &'a ModelDocument,
        name: &'a str,
        color: &mut HashMap<&'a str, Color>,
        out: &mut Vec<Violation>,
    ) {
        color.insert(name, Color::Grey);
        if let Some(role) = doc.role(name) {
            for junior in &role.juniors {
                match color.get(junior.as_str()) {
                    Some(Color::White) => visit(doc, junior, color, out),
                    Some(Color::Grey) => out.push(Violation::new(
                        name,
                        "hierarchy-cycle",
                        format!("edge {name} -> {junior} closes a cycle"),
                    )),
                    _ => {}
                }
            }
        }
        color.insert(name, Color::Black);
    }

    for role in &doc.roles {
        if color.get(role.name.as_str()) == Some(&Color::White) {
            visit(doc, &role.name, &mut color, &mut out);
        }
    }
    out
}

/// The role instances a user may activate: exactly the UA entries for
/// that user, with no hierarchy expansion.
pub fn enabled_role_instances(
    doc: &ModelDocument,
    user_id: &str,
) -> Result<BTreeSet<RoleInstance>, ModelError> {
    if doc.user(user_id).is_none() {
        return Err(ModelError::UnknownUser(user_id.to_owned()));
    }
    Ok(doc
        .ua
        .iter()
        .filter(|ua| ua.user == user_id)
        .map(|ua| ua.role_instance.clone())
        .collect())
}

/// True when every pattern entry is satisfied by the bindings: a
/// wildcard matches anything, a literal must appear verbatim.
pub fn pattern_matches(pattern: &[ParamBinding], bindings: &[ParamBinding]) -> bool {
    pattern.iter().all(|p| {
        p.is_wildcard()
            || bindings
                .iter()
                .any(|b| b.name == p.name && b.value == p.value)
    })
}

/// Derives the instance of a direct junior role reachable from `ri`:
/// the junior inherits the senior's bindings restricted to its own
/// parameter names. Returns `None` when the junior declares a
/// parameter the senior instance does not bind, in which case nothing
/// is inherited along that edge.
pub fn junior_instance(
    doc: &ModelDocument,
    ri: &RoleInstance,
    junior: &str,
) -> Option<RoleInstance> {
    let decl = doc.role(junior)?;
    let mut bindings = Vec::with_capacity(decl.param_names.len());
    for name in &decl.param_names {
        let b = ri.bindings.iter().find(|b| &b.name == name)?;
        bindings.push(b.clone());
    }
    Some(RoleInstance::new(junior.to_owned(), bindings))
}

/// Direct junior instances reachable from `ri`, in canonical order.
pub fn direct_junior_instances(doc: &ModelDocument, ri: &RoleInstance) -> Vec<RoleInstance> {
    let mut out: Vec<RoleInstance> = doc
        .role(&ri.role)
        .map(|decl| {
            decl.juniors
                .iter()
                .filter_map(|j| junior_instance(doc, ri, j))
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out.dedup();
    out
}

/// `ri` plus every instance transitively reachable through hierarchy
/// edges, in canonical order.
pub fn instance_closure(doc: &ModelDocument, ri: &RoleInstance) -> Vec<RoleInstance> {
    let mut seen = BTreeSet::new();
    let mut queue = vec![ri.clone()];
    while let Some(current) = queue.pop() {
        if !seen.insert(current.clone()) {
            continue;
        }
        queue.extend(direct_junior_instances(doc, &current));
    }
    seen.into_iter().collect()
}

/// All privileges a role instance holds: PA entries of its own role
/// and of every reachable junior whose pattern matches the instance
/// bindings. Wildcard privilege parameters stay symbolic; privileges
/// with the `null` action are excluded.
pub fn authorized_privileges(
    doc: &ModelDocument,
    ri: &RoleInstance,
) -> Result<BTreeSet<Privilege>, ModelError> {
    if doc.role(&ri.role).is_none() {
        return Err(ModelError::UnknownRole(ri.role.clone()));
    }
    let mut out = BTreeSet::new();
    for instance in instance_closure(doc, ri) {
        for pa in doc.pa.iter().filter(|pa| pa.role == instance.role) {
            if pa.privilege.action == NULL_ACTION {
                continue;
            }
            if pattern_matches(&pa.role_param_pattern, &instance.bindings) {
                out.insert(pa.privilege.clone());
            }
        }
    }
    Ok(out)
}

/// Privileges granted directly to the instance's own role (no
/// hierarchy traversal), in canonical order. The compiler attaches
/// these to the instance's permission set and reaches inherited ones
/// through junior references instead.
pub fn authorized_privileges_own_role(doc: &ModelDocument, ri: &RoleInstance) -> Vec<Privilege> {
    let mut out: Vec<Privilege> = doc
        .pa
        .iter()
        .filter(|pa| {
            pa.role == ri.role
                && pa.privilege.action != NULL_ACTION
                && pattern_matches(&pa.role_param_pattern, &ri.bindings)
        })
        .map(|pa| pa.privilege.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Encodes a binding the way requests and compiled policies carry it.
pub fn encode_param(b: &ParamBinding) -> String {
    format!("{}-{}", b.name, b.value)
}

fn aparams_satisfied(privilege: &Privilege, request_aparams: &[ParamBinding]) -> bool {
    privilege.aparams.iter().all(|p| {
        p.is_wildcard()
            || request_aparams
                .iter()
                .any(|r| encode_param(r) == encode_param(p))
    })
}

/// Ground-truth decision by brute force: Permit iff the instance is
/// enabled for the user and some authorized privilege covers the
/// requested service, action, and parameters. Never returns Deny; the
/// model expresses only positive permissions.
pub fn oracle_decide(
    doc: &ModelDocument,
    user_id: &str,
    ri: &RoleInstance,
    service: &str,
    action: &str,
    aparams: &[ParamBinding],
) -> Result<Decision, ModelError> {
    let enabled = enabled_role_instances(doc, user_id)?;
    if doc.service(service).is_none() {
        return Err(ModelError::UnknownService(service.to_owned()));
    }
    if !enabled.contains(ri) {
        return Ok(Decision::NotApplicable);
    }
    let held = authorized_privileges(doc, ri)?;
    let permitted = held.iter().any(|p| {
        p.service == service && p.action == action && aparams_satisfied(p, aparams)
    });
    Ok(if permitted {
        Decision::Permit
    } else {
        Decision::NotApplicable
    })
}
