//! Property tests for the XML layer: serialization is deterministic
//! and `parse(serialize(ps))` reproduces the IR for arbitrary trees in
//! the subset, and the historical multi-pair match form evaluates
//! exactly like its normalized form.

use proptest::prelude::*;

use prbac_core::ir::{
    AttributeBag, AttributeRef, CombiningAlg, DataType, Effect, MatchClause, MatchFn, Policy,
    PolicySet, PolicySetChild, RequestCtx, Rule, Target,
};
use prbac_core::pdp::{decide, PolicyStore};
use prbac_core::xml::{
    parse_policy_set, parse_request, serialize_policy_set, serialize_request,
};

fn value_string() -> impl Strategy<Value = String> {
    // inner spaces allowed, boundaries trimmed like the parser trims
    prop::string::string_regex("[a-zA-Z0-9 :&<>'\"/#._-]{0,18}")
        .unwrap()
        .prop_map(|s| s.trim().to_owned())
}

fn id_string() -> impl Strategy<Value = String> {
    prop::string::string_regex("[a-zA-Z][a-zA-Z0-9:&._-]{0,20}").unwrap()
}

fn data_type() -> impl Strategy<Value = DataType> {
    prop_oneof![Just(DataType::String), Just(DataType::AnyUri)]
}

fn match_fn() -> impl Strategy<Value = MatchFn> {
    prop_oneof![Just(MatchFn::StringEqual), Just(MatchFn::AnyUriEqual)]
}

fn combining() -> impl Strategy<Value = CombiningAlg> {
    prop_oneof![
        Just(CombiningAlg::PermitOverrides),
        Just(CombiningAlg::DenyOverrides),
        Just(CombiningAlg::FirstApplicable),
    ]
}

fn clause() -> impl Strategy<Value = MatchClause> {
    (match_fn(), value_string(), id_string(), data_type()).prop_map(
        |(function, literal, attribute_id, dt)| MatchClause {
            function,
            literal,
            designator: AttributeRef::new(attribute_id, dt),
        },
    )
}

fn section() -> impl Strategy<Value = Vec<Vec<MatchClause>>> {
    prop::collection::vec(prop::collection::vec(clause(), 0..3), 0..3)
}

fn target() -> impl Strategy<Value = Target> {
    (section(), section(), section()).prop_map(|(subjects, resources, actions)| Target {
        subjects,
        resources,
        actions,
    })
}

fn rule() -> impl Strategy<Value = Rule> {
    (id_string(), prop_oneof![Just(Effect::Permit), Just(Effect::Deny)], prop::option::of(target()))
        .prop_map(|(id, effect, target)| Rule { id, effect, target })
}

fn policy() -> impl Strategy<Value = Policy> {
    (id_string(), combining(), target(), prop::collection::vec(rule(), 0..3)).prop_map(
        |(id, combining, target, rules)| Policy {
            id,
            combining,
            target,
            rules,
        },
    )
}

fn policy_set() -> impl Strategy<Value = PolicySet> {
    let leaf = (id_string(), combining(), target()).prop_map(|(id, combining, target)| PolicySet {
        id,
        combining,
        target,
        children: vec![],
    });
    leaf.prop_recursive(3, 12, 3, |inner| {
        let child = prop_oneof![
            policy().prop_map(PolicySetChild::Policy),
            inner.prop_map(PolicySetChild::PolicySet),
            id_string().prop_map(PolicySetChild::Reference),
        ];
        (id_string(), combining(), target(), prop::collection::vec(child, 0..4)).prop_map(
            |(id, combining, target, children)| PolicySet {
                id,
                combining,
                target,
                children,
            },
        )
    })
}

proptest! {
    #[test]
    fn policy_set_round_trips_and_is_deterministic(ps in policy_set()) {
        let bytes = serialize_policy_set(&ps);
        let (parsed, _) = parse_policy_set(&bytes).expect("canonical output always parses");
        prop_assert_eq!(&parsed, &ps);
        prop_assert_eq!(serialize_policy_set(&parsed), bytes);
    }

    #[test]
    fn request_round_trips(
        entries in prop::collection::vec((id_string(), data_type(), value_string()), 0..6)
    ) {
        let mut req = RequestCtx::default();
        for (i, (id, dt, value)) in entries.into_iter().enumerate() {
            let bag = match i % 3 {
                0 => &mut req.subject,
                1 => &mut req.resource,
                _ => &mut req.action,
            };
            bag.push(AttributeRef::new(id, dt), value);
        }
        let bytes = serialize_request(&req);
        prop_assert_eq!(parse_request(&bytes).expect("canonical output always parses"), req);
    }
}

/// The two spellings of a conjunctive action match — several pairs in
/// one `ActionMatch` versus sibling single-pair matches — must decide
/// identically for every request over their value alphabet.
#[test]
fn multi_pair_and_normalized_forms_decide_identically() {
    let multi = r#"<PolicySet xmlns="urn:oasis:names:tc:xacml:1.0:policy"
  PolicySetId="ps" PolicyCombiningAlgId="urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:permit-overrides">
  <Policy PolicyId="p" RuleCombiningAlgId="urn:oasis:names:tc:xacml:1.0:rule-combining-algorithm:permit-overrides">
    <Target>
      <Actions>
        <Action>
          <ActionMatch MatchId="urn:oasis:names:tc:xacml:1.0:function:string-equal">
            <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">register</AttributeValue>
            <ActionAttributeDesignator AttributeId="urn:oasis:names:tc:xacml:1.0:action:action-id" DataType="http://www.w3.org/2001/XMLSchema#string"/>
            <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">studentid-02123781</AttributeValue>
            <ActionAttributeDesignator AttributeId="AParams" DataType="http://www.w3.org/2001/XMLSchema#string"/>
          </ActionMatch>
        </Action>
      </Actions>
    </Target>
    <Rule RuleId="p:r" Effect="Permit"/>
  </Policy>
</PolicySet>"#;
    let normalized = r#"<PolicySet xmlns="urn:oasis:names:tc:xacml:1.0:policy"
  PolicySetId="ps" PolicyCombiningAlgId="urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:permit-overrides">
  <Policy PolicyId="p" RuleCombiningAlgId="urn:oasis:names:tc:xacml:1.0:rule-combining-algorithm:permit-overrides">
    <Target>
      <Actions>
        <Action>
          <ActionMatch MatchId="urn:oasis:names:tc:xacml:1.0:function:string-equal">
            <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">register</AttributeValue>
            <ActionAttributeDesignator AttributeId="urn:oasis:names:tc:xacml:1.0:action:action-id" DataType="http://www.w3.org/2001/XMLSchema#string"/>
          </ActionMatch>
          <ActionMatch MatchId="urn:oasis:names:tc:xacml:1.0:function:string-equal">
            <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">studentid-02123781</AttributeValue>
            <ActionAttributeDesignator AttributeId="AParams" DataType="http://www.w3.org/2001/XMLSchema#string"/>
          </ActionMatch>
        </Action>
      </Actions>
    </Target>
    <Rule RuleId="p:r" Effect="Permit"/>
  </Policy>
</PolicySet>"#;

    let (ps_multi, diag) = parse_policy_set(multi.as_bytes()).unwrap();
    assert_eq!(diag.normalizations.len(), 1);
    let (ps_norm, diag) = parse_policy_set(normalized.as_bytes()).unwrap();
    assert!(diag.normalizations.is_empty());
    assert_eq!(ps_multi, ps_norm, "normalization is applied at parse time");

    let store_multi = PolicyStore::new(vec![ps_multi], vec!["ps".into()]).unwrap();
    let store_norm = PolicyStore::new(vec![ps_norm], vec!["ps".into()]).unwrap();
    let action_id = AttributeRef::new(
        "urn:oasis:names:tc:xacml:1.0:action:action-id",
        DataType::String,
    );
    let aparams = AttributeRef::new("AParams", DataType::String);
    let alphabet = ["register", "studentid-02123781", "other"];
    for action_value in alphabet {
        for aparam_value in alphabet {
            for include_aparam in [true, false] {
                let mut bag = AttributeBag::new();
                bag.push(action_id.clone(), action_value);
                if include_aparam {
                    bag.push(aparams.clone(), aparam_value);
                }
                let req = RequestCtx {
                    action: bag,
                    ..RequestCtx::default()
                };
                assert_eq!(decide(&store_multi, &req), decide(&store_norm, &req));
            }
        }
    }
}
