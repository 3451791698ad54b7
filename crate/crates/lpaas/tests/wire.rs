mod common;

use common::term;
use lpaas::wire::{decode_term, encode_term, WireSolution, WireTerm};
use lpaas_core::logic::{parse_term, Term};
use proptest::prelude::*;
use serde_json::json;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn json_round_trip(t in term()) {
        let text = serde_json::to_string(&WireTerm(t.clone())).unwrap();
        let back: WireTerm = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.0, t.clone());
        prop_assert_eq!(decode_term(&encode_term(&t)).unwrap(), t);
    }

    /// Goals travel as text, so printing must parse back to the same term.
    #[test]
    fn text_round_trip(t in term()) {
        // every `_` reads back as a fresh variable
        prop_assume!(!has_anonymous(&t));
        let printed = t.to_string();
        prop_assert_eq!(parse_term(&printed).unwrap(), t, "{}", printed);
    }

    #[test]
    fn solutions_round_trip(goal in term(), x in term(), more in any::<bool>()) {
        let s = WireSolution {
            success: true,
            bindings: [("X".to_string(), WireTerm(x))].into_iter().collect(),
            solved_goal: WireTerm(goal),
            more,
            error: None,
        };
        let text = serde_json::to_string(&s).unwrap();
        let back: WireSolution = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

fn has_anonymous(t: &Term) -> bool {
    match t {
        Term::Var(v) => &**v == "_",
        Term::Compound(_, args) => args.iter().any(has_anonymous),
        _ => false,
    }
}

#[test]
fn numbers_keep_their_kind() {
    assert_eq!(decode_term(&json!({"num": 1})).unwrap(), Term::int(1));
    assert_eq!(decode_term(&json!({"num": 1.0})).unwrap(), Term::float(1.0));
    assert_eq!(encode_term(&Term::float(2.0)), json!({"num": 2.0}));
}

#[test]
fn decode_errors_name_the_offending_path() {
    let bad = json!({"struct": "f", "args": [{"atom": "a"}, {"struct": "g", "args": [{"var": "lower"}]}]});
    let err = decode_term(&bad).unwrap_err();
    assert_eq!(err.path, "$.args[1].args[0]");
    for bad in [
        json!({"struct": "f", "args": []}),
        json!({"num": "1"}),
        json!({"num": u64::MAX}),
        json!({"atom": "a", "var": "X"}),
        json!({"thing": 1}),
        json!(3),
    ] {
        assert!(decode_term(&bad).is_err(), "{bad}");
    }
}
