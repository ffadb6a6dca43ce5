//! Ready-made model documents: a small worked example, a sized
//! synthetic model for benchmarks, and a seeded random generator for
//! differential testing against the decision oracle. Everything here
//! is deterministic; the generator uses its own splitmix64 stream so
//! results are reproducible across platforms.

use std::collections::BTreeMap;

use crate::model::{
    ModelDocument, ParamBinding, PrivAssignment, Privilege, RoleDecl, RoleInstance, Service,
    User, UserAssignment, WILDCARD,
};

/// One-user registration scenario: `u1` activates
/// `student[studentid=02123781]` and may run `register` on the
/// registration service with the matching `AParams` value.
pub fn student_model() -> ModelDocument {
    ModelDocument {
        users: vec![User {
            id: "u1".into(),
            attributes: BTreeMap::new(),
        }],
        roles: vec![RoleDecl {
            name: "student".into(),
            param_names: vec!["studentid".into()],
            juniors: vec![],
        }],
        services: vec![Service {
            id: "registrationService".into(),
            actions: ["register".to_owned()].into_iter().collect(),
        }],
        ua: vec![UserAssignment {
            user: "u1".into(),
            role_instance: RoleInstance::new(
                "student",
                vec![ParamBinding::new("studentid", "02123781")],
            ),
        }],
        pa: vec![PrivAssignment {
            role: "student".into(),
            role_param_pattern: vec![ParamBinding::new("studentid", "02123781")],
            privilege: Privilege {
                service: "registrationService".into(),
                action: "register".into(),
                aparams: vec![ParamBinding::new("studentid", "02123781")],
            },
        }],
    }
}

/// Deterministic model sized for load tests: `n` users, paired role
/// hierarchy, one parameterized instance per user. Compiles to roughly
/// `5n/2` PolicySets.
pub fn synthetic_model(n: usize) -> ModelDocument {
    let n_roles = (n / 2).max(1);
    let roles: Vec<RoleDecl> = (0..n_roles)
        .map(|i| RoleDecl {
            name: format!("role{i}"),
            param_names: vec!["p0".into()],
            // pair i (even, senior) with i+1 (odd, junior)
            juniors: if i % 2 == 0 && i + 1 < n_roles {
                vec![format!("role{}", i + 1)]
            } else {
                vec![]
            },
        })
        .collect();
    let services: Vec<Service> = (0..4)
        .map(|i| Service {
            id: format!("svc{i}"),
            actions: ["read".to_owned(), "write".to_owned()].into_iter().collect(),
        })
        .collect();
    let users: Vec<User> = (0..n)
        .map(|i| User {
            id: format!("user{i}"),
            attributes: BTreeMap::new(),
        })
        .collect();
    let ua: Vec<UserAssignment> = (0..n)
        .map(|i| UserAssignment {
            user: format!("user{i}"),
            role_instance: RoleInstance::new(
                format!("role{}", i % n_roles),
                vec![ParamBinding::new("p0", format!("v{i}"))],
            ),
        })
        .collect();
    let pa: Vec<PrivAssignment> = (0..n_roles)
        .map(|i| PrivAssignment {
            role: format!("role{i}"),
            role_param_pattern: vec![ParamBinding::new("p0", WILDCARD)],
            privilege: Privilege {
                service: format!("svc{}", i % 4),
                action: "read".into(),
                aparams: vec![],
            },
        })
        .collect();
    ModelDocument {
        users,
        roles,
        services,
        ua,
        pa,
    }
}

/// Size caps for [`random_model`]. Small enough that the request space
/// over a model's literal alphabet stays exhaustively enumerable.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub max_users: usize,
    pub max_roles: usize,
    pub max_params_per_role: usize,
    pub max_services: usize,
    pub max_actions: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_users: 5,
            max_roles: 4,
            max_params_per_role: 2,
            max_services: 4,
            max_actions: 3,
        }
    }
}

/// splitmix64; enough randomness for model shapes, with no dependency
/// and stable output everywhere.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// True with probability `percent`/100.
    pub fn chance(&mut self, percent: u64) -> bool {
        self.next_u64() % 100 < percent
    }
}

const PARAM_NAMES: [&str; 2] = ["p0", "p1"];
const APARAM_NAMES: [&str; 2] = ["q0", "q1"];
const VALUES: [&str; 3] = ["v0", "v1", "v2"];
const ACTION_NAMES: [&str; 3] = ["read", "write", "exec"];

/// Generates a valid model within `bounds`, deterministically from the
/// seed. Hierarchy edges only run from lower to higher role index, so
/// the role graph is a DAG by construction; every cross-reference is
/// drawn from entities that exist.
pub fn random_model(seed: u64, bounds: &Bounds) -> ModelDocument {
    let mut rng = SplitMix64::new(seed);

    let n_roles = 1 + rng.below(bounds.max_roles);
    let roles: Vec<RoleDecl> = (0..n_roles)
        .map(|i| {
            let n_params = rng.below(bounds.max_params_per_role.min(PARAM_NAMES.len()) + 1);
            RoleDecl {
                name: format!("role{i}"),
                param_names: PARAM_NAMES[..n_params].iter().map(|s| s.to_string()).collect(),
                juniors: ((i + 1)..n_roles)
                    .filter(|_| rng.chance(35))
                    .map(|j| format!("role{j}"))
                    .collect(),
            }
        })
        .collect();

    let n_services = 1 + rng.below(bounds.max_services);
    let services: Vec<Service> = (0..n_services)
        .map(|i| {
            let n_actions = 1 + rng.below(bounds.max_actions.min(ACTION_NAMES.len()));
            Service {
                id: format!("svc{i}"),
                actions: ACTION_NAMES[..n_actions].iter().map(|s| s.to_string()).collect(),
            }
        })
        .collect();

    let n_users = 1 + rng.below(bounds.max_users);
    let users: Vec<User> = (0..n_users)
        .map(|i| User {
            id: format!("user{i}"),
            attributes: BTreeMap::new(),
        })
        .collect();

    let mut ua = Vec::new();
    for user in &users {
        for _ in 0..rng.below(3) {
            let role = &roles[rng.below(n_roles)];
            let bindings = role
                .param_names
                .iter()
                .map(|p| ParamBinding::new(p.clone(), VALUES[rng.below(VALUES.len())]))
                .collect();
            ua.push(UserAssignment {
                user: user.id.clone(),
                role_instance: RoleInstance::new(role.name.clone(), bindings),
            });
        }
    }
    ua.sort_by(|a, b| (a.user.clone(), a.role_instance.clone()).cmp(&(
        b.user.clone(),
        b.role_instance.clone(),
    )));
    ua.dedup();

    let mut pa = Vec::new();
    for _ in 0..rng.below(7) {
        let role = &roles[rng.below(n_roles)];
        let mut pattern = Vec::new();
        for p in &role.param_names {
            if !rng.chance(60) {
                continue;
            }
            let value = if rng.chance(30) {
                WILDCARD.to_owned()
            } else {
                VALUES[rng.below(VALUES.len())].to_owned()
            };
            pattern.push(ParamBinding::new(p.clone(), value));
        }
        let service = &services[rng.below(n_services)];
        let action = if rng.chance(10) {
            crate::model::NULL_ACTION.to_owned()
        } else {
            let actions: Vec<&String> = service.actions.iter().collect();
            actions[rng.below(actions.len())].clone()
        };
        let n_aparams = rng.below(3).min(APARAM_NAMES.len());
        let mut aparams = Vec::new();
        for q in &APARAM_NAMES[..n_aparams] {
            let value = if rng.chance(20) {
                WILDCARD.to_owned()
            } else {
                VALUES[rng.below(VALUES.len())].to_owned()
            };
            aparams.push(ParamBinding::new(q.to_string(), value));
        }
        pa.push(PrivAssignment {
            role: role.name.clone(),
            role_param_pattern: pattern,
            privilege: Privilege {
                service: service.id.clone(),
                action,
                aparams,
            },
        });
    }

    ModelDocument {
        users,
        roles,
        services,
        ua,
        pa,
    }
}

/// One enumerable access request: a user presenting an activated
/// instance, asking for an action on a service with concrete
/// parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessTuple {
    pub user: String,
    pub instance: RoleInstance,
    pub service: String,
    pub action: String,
    pub aparams: Vec<ParamBinding>,
}

/// Every access request over the model's literal alphabet whose role
/// instance the requesting user has actually activated: the full space
/// differential tests compare the decision point against the oracle
/// on. Request parameters range over each privilege-parameter name
/// crossed with every literal value in the model (or absent).
pub fn enumerate_requests(doc: &ModelDocument) -> Vec<AccessTuple> {
    let mut aparam_names: Vec<String> = doc
        .pa
        .iter()
        .flat_map(|pa| pa.privilege.aparams.iter().map(|b| b.name.clone()))
        .collect();
    aparam_names.sort();
    aparam_names.dedup();
    aparam_names.truncate(2);

    let mut values: Vec<String> = doc
        .ua
        .iter()
        .flat_map(|ua| ua.role_instance.bindings.iter().map(|b| b.value.clone()))
        .chain(doc.pa.iter().flat_map(|pa| {
            pa.role_param_pattern
                .iter()
                .chain(pa.privilege.aparams.iter())
                .filter(|b| !b.is_wildcard())
                .map(|b| b.value.clone())
        }))
        .collect();
    values.sort();
    values.dedup();
    values.truncate(6);

    // each name is either absent or bound to one alphabet value
    let mut assignments: Vec<Vec<ParamBinding>> = vec![Vec::new()];
    for name in &aparam_names {
        let mut next = Vec::new();
        for assignment in &assignments {
            next.push(assignment.clone());
            for value in &values {
                let mut with = assignment.clone();
                with.push(ParamBinding::new(name.clone(), value.clone()));
                next.push(with);
            }
        }
        assignments = next;
    }

    let mut out = Vec::new();
    for user in &doc.users {
        let mut instances: Vec<&RoleInstance> = doc
            .ua
            .iter()
            .filter(|ua| ua.user == user.id)
            .map(|ua| &ua.role_instance)
            .collect();
        instances.sort();
        instances.dedup();
        for instance in instances {
            for service in &doc.services {
                for action in &service.actions {
                    for aparams in &assignments {
                        out.push(AccessTuple {
                            user: user.id.clone(),
                            instance: instance.clone(),
                            service: service.id.clone(),
                            action: action.clone(),
                            aparams: aparams.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}
