//! The policy decision point: target matching, recursive
//! PolicySet/Policy/Rule evaluation with combining algorithms, and
//! reference resolution that is safe against cycles.
//!
//! Evaluation never aborts; failures surface as Indeterminate decisions
//! with a status code ("cycle", "dangling-ref").

use std::collections::{BTreeMap, HashSet};

use crate::ir::{
    AttributeBag, AttributeRef, CombiningAlg, DataType, Decision, IrViolation, MatchClause,
    Policy, PolicySet, PolicySetChild, RequestCtx, ResponseCtx, Rule, Target, ACTIVATE_ROLE_ACTION,
    ATTR_ACTION_ID, ATTR_RESOURCE_ID,
};

/// Immutable, id-indexed snapshot of loaded PolicySets. Only `roots`
/// are evaluated top-level; everything else is reachable by reference,
/// which is what keeps permission sets inert until a role set links to
/// them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyStore {
    sets: BTreeMap<String, PolicySet>,
    roots: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("duplicate-id: {0}")]
    DuplicateId(String),
    #[error("dangling-ref: root {0} is not a loaded PolicySet")]
    UnknownRoot(String),
}

impl PolicyStore {
    /// Indexes top-level sets by id, checking that every id in every
    /// tree is unique and every root names a loaded set. References
    /// are not resolved here; a dangling reference evaluates to
    /// Indeterminate at decision time.
    pub fn new(sets: Vec<PolicySet>, roots: Vec<String>) -> Result<Self, StoreError> {
        let mut all_ids = HashSet::new();
        for ps in &sets {
            for id in subtree_ids(ps) {
                if !all_ids.insert(id.clone()) {
                    return Err(StoreError::DuplicateId(id));
                }
            }
        }
        let by_id: BTreeMap<String, PolicySet> =
            sets.into_iter().map(|ps| (ps.id.clone(), ps)).collect();
        for root in &roots {
            if !by_id.contains_key(root) {
                return Err(StoreError::UnknownRoot(root.clone()));
            }
        }
        Ok(PolicyStore { sets: by_id, roots })
    }

    pub fn empty() -> Self {
        PolicyStore {
            sets: BTreeMap::new(),
            roots: Vec::new(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&PolicySet> {
        self.sets.get(id)
    }

    pub fn roots(&self) -> &[String] {
        &self.roots
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.sets.keys().map(|s| s.as_str())
    }

    pub fn sets(&self) -> impl Iterator<Item = &PolicySet> {
        self.sets.values()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Runs [`well_formed`](crate::ir::well_formed) over every set
    /// against the ids resolvable through this store.
    pub fn well_formed_violations(&self) -> Vec<IrViolation> {
        let known: HashSet<String> = self.sets.keys().cloned().collect();
        let mut out = Vec::new();
        for ps in self.sets.values() {
            out.extend(crate::ir::well_formed(ps, &known));
        }
        out
    }
}

fn subtree_ids(ps: &PolicySet) -> Vec<String> {
    let mut out = vec![ps.id.clone()];
    for child in &ps.children {
        match child {
            PolicySetChild::Policy(p) => out.push(p.id.clone()),
            PolicySetChild::PolicySet(nested) => out.extend(subtree_ids(nested)),
            PolicySetChild::Reference(_) => {}
        }
    }
    out
}

/// Per-evaluation bookkeeping: the reference path (for cycle cuts),
/// per-node decisions, and the first Indeterminate cause.
#[derive(Debug, Default)]
pub struct EvalTrace {
    visited: Vec<String>,
    pub steps: Vec<(String, Decision)>,
    first_cause: Option<String>,
}

impl EvalTrace {
    pub fn new() -> Self {
        EvalTrace::default()
    }

    pub fn first_cause(&self) -> Option<&str> {
        self.first_cause.as_deref()
    }

    fn indeterminate(&mut self, cause: &str) -> Decision {
        if self.first_cause.is_none() {
            self.first_cause = Some(cause.to_owned());
        }
        Decision::Indeterminate
    }
}

/// A node the evaluator can be pointed at.
#[derive(Debug, Clone, Copy)]
pub enum Node<'a> {
    PolicySet(&'a PolicySet),
    Policy(&'a Policy),
    Rule(&'a Rule),
    Reference(&'a str),
}

/// True iff any bag value designated by the clause equals its literal.
/// Both supported functions are exact codepoint equality; the data type
/// gate is applied by the bag lookup, so an anyURI clause only ever
/// sees `#anyURI` values.
pub fn match_applies(clause: &MatchClause, bag: &AttributeBag) -> bool {
    bag.lookup(&clause.designator)
        .iter()
        .any(|v| *v == clause.literal)
}

/// Target semantics: every non-empty section must have at least one
/// conjunctive group whose clauses all match that section's bag; an
/// empty section always passes.
pub fn target_applies(t: &Target, req: &RequestCtx) -> bool {
    section_applies(&t.subjects, &req.subject)
        && section_applies(&t.resources, &req.resource)
        && section_applies(&t.actions, &req.action)
}

fn section_applies(groups: &[Vec<MatchClause>], bag: &AttributeBag) -> bool {
    groups.is_empty()
        || groups
            .iter()
            .any(|group| group.iter().all(|clause| match_applies(clause, bag)))
}

/// Reduces an ordered list of child decisions.
///
/// permit-overrides: Permit if any Permit, else Deny if any Deny, else
/// Indeterminate if any Indeterminate, else NotApplicable.
/// deny-overrides: Deny if any Deny or any Indeterminate (a failed
/// child could have denied), else Permit if any Permit, else
/// NotApplicable. first-applicable: the first decision that is not
/// NotApplicable, else NotApplicable.
pub fn combine(alg: CombiningAlg, decisions: &[Decision]) -> Decision {
    use Decision::*;
    match alg {
        CombiningAlg::PermitOverrides => {
            if decisions.contains(&Permit) {
                Permit
            } else if decisions.contains(&Deny) {
                Deny
            } else if decisions.contains(&Indeterminate) {
                Indeterminate
            } else {
                NotApplicable
            }
        }
        CombiningAlg::DenyOverrides => {
            if decisions.contains(&Deny) || decisions.contains(&Indeterminate) {
                Deny
            } else if decisions.contains(&Permit) {
                Permit
            } else {
                NotApplicable
            }
        }
        CombiningAlg::FirstApplicable => decisions
            .iter()
            .copied()
            .find(|d| *d != NotApplicable)
            .unwrap_or(NotApplicable),
    }
}

/// Recursive evaluation of one node against a request.
///
/// Rules yield their effect when their target (if any) matches.
/// Policies and PolicySets gate on their target, then combine child
/// decisions. A PolicySet id already on the visited path means the
/// reference graph loops: that branch yields Indeterminate with cause
/// "cycle" instead of recursing forever. A reference that the store
/// cannot resolve yields Indeterminate with cause "dangling-ref".
pub fn evaluate_node(
    store: &PolicyStore,
    node: Node<'_>,
    req: &RequestCtx,
    trace: &mut EvalTrace,
) -> Decision {
    match node {
        Node::Rule(rule) => {
            let decision = match &rule.target {
                Some(t) if !target_applies(t, req) => Decision::NotApplicable,
                _ => rule.effect.into(),
            };
            trace.steps.push((rule.id.clone(), decision));
            decision
        }
        Node::Policy(policy) => {
            let decision = if !target_applies(&policy.target, req) {
                Decision::NotApplicable
            } else {
                let child_decisions: Vec<Decision> = policy
                    .rules
                    .iter()
                    .map(|rule| evaluate_node(store, Node::Rule(rule), req, trace))
                    .collect();
                combine(policy.combining, &child_decisions)
            };
            trace.steps.push((policy.id.clone(), decision));
            decision
        }
        Node::PolicySet(ps) => {
            let decision = if !target_applies(&ps.target, req) {
                Decision::NotApplicable
            } else if trace.visited.iter().any(|id| id == &ps.id) {
                trace.indeterminate("cycle")
            } else {
                trace.visited.push(ps.id.clone());
                let child_decisions: Vec<Decision> = ps
                    .children
                    .iter()
                    .map(|child| match child {
                        PolicySetChild::Policy(p) => {
                            evaluate_node(store, Node::Policy(p), req, trace)
                        }
                        PolicySetChild::PolicySet(nested) => {
                            evaluate_node(store, Node::PolicySet(nested), req, trace)
                        }
                        PolicySetChild::Reference(id) => {
                            evaluate_node(store, Node::Reference(id), req, trace)
                        }
                    })
                    .collect();
                trace.visited.pop();
                combine(ps.combining, &child_decisions)
            };
            trace.steps.push((ps.id.clone(), decision));
            decision
        }
        Node::Reference(id) => match store.get(id) {
            Some(ps) => evaluate_node(store, Node::PolicySet(ps), req, trace),
            None => {
                let decision = trace.indeterminate("dangling-ref");
                trace.steps.push((id.to_owned(), decision));
                decision
            }
        },
    }
}

/// Evaluates every root in order, combines across roots with
/// permit-overrides, and reports the first Indeterminate cause when
/// the final decision is Indeterminate.
pub fn decide(store: &PolicyStore, req: &RequestCtx) -> ResponseCtx {
    decide_traced(store, req).0
}

/// [`decide`] plus the evaluation trace, for diagnostics and tests.
pub fn decide_traced(store: &PolicyStore, req: &RequestCtx) -> (ResponseCtx, EvalTrace) {
    let mut trace = EvalTrace::new();
    let decisions: Vec<Decision> = store
        .roots()
        .iter()
        .map(|root| evaluate_node(store, Node::Reference(root), req, &mut trace))
        .collect();
    let decision = combine(CombiningAlg::PermitOverrides, &decisions);
    let cause = trace.first_cause.clone();
    (ResponseCtx::from_decision(decision, cause), trace)
}

/// Role-membership query: which role-value URIs do the store's
/// role-assignment PolicySets grant to a subject with these
/// attributes? Sets whose id starts with `RAS:` are probed with a
/// synthetic activation request carrying the granted URI; results are
/// ordered by PolicySet id.
pub fn enabled_roles_query(store: &PolicyStore, subject_attrs: &AttributeBag) -> Vec<String> {
    let mut out = Vec::new();
    for ps in store.sets().filter(|ps| ps.id.starts_with("RAS:")) {
        let Some(role_uri) = granted_role_uri(ps) else {
            continue;
        };
        let mut req = RequestCtx {
            subject: subject_attrs.clone(),
            ..RequestCtx::default()
        };
        req.resource.push(
            AttributeRef::new(ATTR_RESOURCE_ID, DataType::AnyUri),
            role_uri.clone(),
        );
        req.action.push(
            AttributeRef::new(ATTR_ACTION_ID, DataType::String),
            ACTIVATE_ROLE_ACTION,
        );
        let mut trace = EvalTrace::new();
        if evaluate_node(store, Node::PolicySet(ps), &req, &mut trace) == Decision::Permit {
            out.push(role_uri);
        }
    }
    out
}

/// The role-value URI a role-assignment set grants: the literal of its
/// resource-id clause.
fn granted_role_uri(ps: &PolicySet) -> Option<String> {
    ps.target
        .resources
        .iter()
        .flatten()
        .find(|clause| clause.designator.attribute_id == ATTR_RESOURCE_ID)
        .map(|clause| clause.literal.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Effect, MatchClause, Status, ATTR_RPARAMS, ATTR_SUBJECT_ROLE};

    fn rparams_clause() -> MatchClause {
        MatchClause::string_eq(ATTR_RPARAMS, "studentid-02123781")
    }

    fn request_with_rparams(value: &str) -> RequestCtx {
        let mut req = RequestCtx::default();
        req.subject.push(
            AttributeRef::new(ATTR_RPARAMS, DataType::String),
            value,
        );
        req
    }

    #[test]
    fn match_applies_any_value_semantics() {
        let clause = rparams_clause();
        assert!(match_applies(&clause, &request_with_rparams("studentid-02123781").subject));
        assert!(!match_applies(&clause, &AttributeBag::new()));

        let mut bag = AttributeBag::new();
        bag.push(AttributeRef::new(ATTR_RPARAMS, DataType::String), "x");
        bag.push(
            AttributeRef::new(ATTR_RPARAMS, DataType::String),
            "studentid-02123781",
        );
        assert!(match_applies(&clause, &bag));
    }

    #[test]
    fn target_conjunction_requires_every_clause() {
        let target = Target {
            subjects: vec![vec![
                MatchClause::any_uri_eq(
                    ATTR_SUBJECT_ROLE,
                    "urn:example:role-values:student:rparams:studentid-02123781",
                ),
                rparams_clause(),
            ]],
            ..Target::default()
        };
        let mut both = RequestCtx::default();
        both.subject.push(
            AttributeRef::new(ATTR_SUBJECT_ROLE, DataType::AnyUri),
            "urn:example:role-values:student:rparams:studentid-02123781",
        );
        both.subject.push(
            AttributeRef::new(ATTR_RPARAMS, DataType::String),
            "studentid-02123781",
        );
        assert!(target_applies(&target, &both));

        let mut partial = RequestCtx::default();
        partial.subject.push(
            AttributeRef::new(ATTR_SUBJECT_ROLE, DataType::AnyUri),
            "urn:example:role-values:student:rparams:studentid-02123781",
        );
        partial.subject.push(
            AttributeRef::new(ATTR_RPARAMS, DataType::String),
            "other",
        );
        assert!(!target_applies(&target, &partial));

        assert!(target_applies(&Target::any(), &RequestCtx::default()));
    }

    #[test]
    fn combining_algorithms_match_their_tables() {
        use Decision::*;
        assert_eq!(combine(CombiningAlg::PermitOverrides, &[Deny, Permit]), Permit);
        assert_eq!(combine(CombiningAlg::PermitOverrides, &[]), NotApplicable);
        assert_eq!(combine(CombiningAlg::DenyOverrides, &[]), NotApplicable);
        assert_eq!(combine(CombiningAlg::FirstApplicable, &[]), NotApplicable);
        assert_eq!(
            combine(CombiningAlg::FirstApplicable, &[NotApplicable, Deny, Permit]),
            Deny
        );
        assert_eq!(
            combine(CombiningAlg::DenyOverrides, &[Indeterminate, Permit]),
            Deny
        );
        assert_eq!(
            combine(CombiningAlg::PermitOverrides, &[Indeterminate, NotApplicable]),
            Indeterminate
        );
    }

    fn permit_all_policy(id: &str) -> Policy {
        Policy {
            id: id.into(),
            combining: CombiningAlg::PermitOverrides,
            target: Target::any(),
            rules: vec![Rule {
                id: format!("{id}:r"),
                effect: Effect::Permit,
                target: None,
            }],
        }
    }

    #[test]
    fn self_reference_terminates_with_cycle_status() {
        let ps = PolicySet {
            id: "loop".into(),
            combining: CombiningAlg::PermitOverrides,
            target: Target::any(),
            children: vec![PolicySetChild::Reference("loop".into())],
        };
        let store = PolicyStore::new(vec![ps], vec!["loop".into()]).unwrap();
        let resp = decide(&store, &RequestCtx::default());
        assert_eq!(resp.decision, Decision::Indeterminate);
        assert_eq!(resp.status, Status::Error("cycle".into()));
    }

    #[test]
    fn dangling_reference_is_indeterminate_at_evaluation() {
        let ps = PolicySet {
            id: "RPS:student:role:studentid-02123781".into(),
            combining: CombiningAlg::PermitOverrides,
            target: Target::any(),
            children: vec![PolicySetChild::Reference(
                "PPS:student:role:studentid-02123781".into(),
            )],
        };
        let store = PolicyStore::new(vec![ps], vec!["RPS:student:role:studentid-02123781".into()])
            .unwrap();
        let resp = decide(&store, &RequestCtx::default());
        assert_eq!(resp.decision, Decision::Indeterminate);
        assert_eq!(resp.status, Status::Error("dangling-ref".into()));
    }

    #[test]
    fn empty_store_is_not_applicable() {
        let resp = decide(&PolicyStore::empty(), &RequestCtx::default());
        assert_eq!(resp.decision, Decision::NotApplicable);
        assert_eq!(resp.status, Status::Ok);
    }

    #[test]
    fn rule_target_gates_its_effect() {
        let rule = Rule {
            id: "r".into(),
            effect: Effect::Permit,
            target: Some(Target {
                actions: vec![vec![MatchClause::string_eq(ATTR_ACTION_ID, "register")]],
                ..Target::default()
            }),
        };
        let store = PolicyStore::empty();
        let mut trace = EvalTrace::new();
        let mut req = RequestCtx::default();
        assert_eq!(
            evaluate_node(&store, Node::Rule(&rule), &req, &mut trace),
            Decision::NotApplicable
        );
        req.action.push(
            AttributeRef::new(ATTR_ACTION_ID, DataType::String),
            "register",
        );
        assert_eq!(
            evaluate_node(&store, Node::Rule(&rule), &req, &mut trace),
            Decision::Permit
        );
    }

    #[test]
    fn store_rejects_duplicate_ids_and_unknown_roots() {
        let a = PolicySet {
            id: "a".into(),
            combining: CombiningAlg::PermitOverrides,
            target: Target::any(),
            children: vec![],
        };
        assert!(matches!(
            PolicyStore::new(vec![a.clone(), a.clone()], vec![]),
            Err(StoreError::DuplicateId(_))
        ));
        assert!(matches!(
            PolicyStore::new(vec![a], vec!["missing".into()]),
            Err(StoreError::UnknownRoot(_))
        ));
    }

    #[test]
    fn adding_a_root_never_retracts_a_permit() {
        let permit = PolicySet {
            id: "grant".into(),
            combining: CombiningAlg::PermitOverrides,
            target: Target::any(),
            children: vec![PolicySetChild::Policy(permit_all_policy("grant:p"))],
        };
        let inert = PolicySet {
            id: "inert".into(),
            combining: CombiningAlg::PermitOverrides,
            target: Target::any(),
            children: vec![],
        };
        let req = RequestCtx::default();
        let one = PolicyStore::new(vec![permit.clone()], vec!["grant".into()]).unwrap();
        assert_eq!(decide(&one, &req).decision, Decision::Permit);
        let two = PolicyStore::new(
            vec![permit, inert],
            vec!["grant".into(), "inert".into()],
        )
        .unwrap();
        assert_eq!(decide(&two, &req).decision, Decision::Permit);
    }
}
