//! Differential tests: the compiled store evaluated by the decision
//! point must agree with the brute-force model oracle on every
//! enumerable request, and must never produce Deny — the model only
//! expresses positive permissions.

use proptest::prelude::*;

use prbac_core::compiler::{access_request, compile_model, NamingScheme};
use prbac_core::ir::Decision;
use prbac_core::model::{
    oracle_decide, ModelDocument, ParamBinding, PrivAssignment, Privilege, RoleDecl,
    RoleInstance, Service, User, UserAssignment,
};
use prbac_core::pdp::decide;
use prbac_core::sample::{enumerate_requests, random_model, Bounds};

fn assert_store_matches_oracle(doc: &ModelDocument) -> usize {
    let store = compile_model(doc).expect("valid model");
    assert!(store.well_formed_violations().is_empty());
    let scheme = NamingScheme::default();
    let tuples = enumerate_requests(doc);
    for t in &tuples {
        let expected =
            oracle_decide(doc, &t.user, &t.instance, &t.service, &t.action, &t.aparams)
                .expect("ids come from the model");
        let req = access_request(&scheme, &t.instance, &t.service, &t.action, &t.aparams);
        let got = decide(&store, &req);
        assert_ne!(got.decision, Decision::Deny, "positive permissions only: {t:?}");
        assert_eq!(
            got.decision, expected,
            "decision point and oracle disagree on {t:?}"
        );
    }
    tuples.len()
}

/// Three users, two roles (one parameterized, one hierarchy edge),
/// wildcards and privilege parameters all in play; comparison is
/// exhaustive over the request alphabet.
#[test]
fn hand_built_model_agrees_exhaustively() {
    let doc = ModelDocument {
        users: vec![
            User { id: "alice".into(), attributes: Default::default() },
            User { id: "bob".into(), attributes: Default::default() },
            User { id: "carol".into(), attributes: Default::default() },
        ],
        roles: vec![
            RoleDecl {
                name: "advisor".into(),
                param_names: vec!["dept".into()],
                juniors: vec!["student".into()],
            },
            RoleDecl {
                name: "student".into(),
                param_names: vec![],
                juniors: vec![],
            },
        ],
        services: vec![
            Service {
                id: "records".into(),
                actions: ["read".to_owned(), "write".to_owned()].into_iter().collect(),
            },
            Service {
                id: "registration".into(),
                actions: ["register".to_owned()].into_iter().collect(),
            },
        ],
        ua: vec![
            UserAssignment {
                user: "alice".into(),
                role_instance: RoleInstance::new("advisor", vec![ParamBinding::new("dept", "cs")]),
            },
            UserAssignment {
                user: "bob".into(),
                role_instance: RoleInstance::plain("student"),
            },
            UserAssignment {
                user: "carol".into(),
                role_instance: RoleInstance::new("advisor", vec![ParamBinding::new("dept", "ee")]),
            },
        ],
        pa: vec![
            PrivAssignment {
                role: "advisor".into(),
                role_param_pattern: vec![ParamBinding::new("dept", "cs")],
                privilege: Privilege {
                    service: "records".into(),
                    action: "write".into(),
                    aparams: vec![ParamBinding::new("sid", "42")],
                },
            },
            PrivAssignment {
                role: "advisor".into(),
                role_param_pattern: vec![ParamBinding::new("dept", "*")],
                privilege: Privilege {
                    service: "records".into(),
                    action: "read".into(),
                    aparams: vec![],
                },
            },
            PrivAssignment {
                role: "student".into(),
                role_param_pattern: vec![],
                privilege: Privilege {
                    service: "registration".into(),
                    action: "register".into(),
                    aparams: vec![ParamBinding::new("sid", "*")],
                },
            },
        ],
    };
    // 3 users x 3 (service, action) pairs x 4 sid assignments
    let checked = assert_store_matches_oracle(&doc);
    assert_eq!(checked, 36);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn random_models_agree_with_the_oracle(seed in any::<u64>()) {
        let doc = random_model(seed, &Bounds::default());
        assert_store_matches_oracle(&doc);
    }
}
