use lpaas_core::access::{Role, UserRecord};
use lpaas_core::clock::Timestamp;
use lpaas_core::kb::ValidityInterval;
use lpaas_core::persistence::{PersistedState, Store, StoredClause, StoredConfig, FORMAT_VERSION};
use lpaas_core::service::KbMode;
use proptest::prelude::*;

fn config() -> impl Strategy<Value = StoredConfig> {
    (any::<bool>(), any::<bool>(), any::<bool>(), 1u64..1_000_000).prop_map(|(dynamic, sf, sl, deadline)| StoredConfig {
        kb_mode: if dynamic { KbMode::Dynamic } else { KbMode::Static },
        stateful_enabled: sf,
        stateless_enabled: sl,
        default_deadline_ms: deadline,
    })
}

fn clause() -> impl Strategy<Value = StoredClause> {
    ("[a-z][a-z0-9_]{0,6}", 0u32..100, 0u64..10_000, proptest::option::of(1u64..10_000)).prop_map(
        |(name, arg, from, len)| StoredClause {
            clause: format!("{name}({arg})."),
            validity: ValidityInterval { from: Timestamp(from), to: len.map(|l| Timestamp(from + l)) },
        },
    )
}

fn user() -> impl Strategy<Value = UserRecord> {
    ("[a-z]{1,8}", "[0-9a-f]{32}", any::<bool>()).prop_map(|(name, hash, admin)| UserRecord {
        username: name,
        salted_password_hash: format!("pbkdf2-sha256$100000${hash}${hash}"),
        role: if admin { Role::Configurator } else { Role::Client },
    })
}

fn state() -> impl Strategy<Value = PersistedState> {
    (
        config(),
        prop::collection::vec("[a-z]{1,5}\\([A-Z]\\)", 0..6),
        prop::collection::vec(clause(), 0..20),
        prop::collection::vec(user(), 0..4),
    )
        .prop_map(|(config, goals, theory, users)| PersistedState {
            format_version: FORMAT_VERSION,
            config,
            goals,
            theory,
            users,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_load_round_trip(s in state()) {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::new(dir.path().join("state.json"));
        store.save(&s).unwrap();
        prop_assert_eq!(store.load().unwrap(), Some(s));
    }

    #[test]
    fn any_single_byte_flip_is_detected(s in state(), pos in any::<prop::sample::Index>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        let store = Store::new(&path);
        store.save(&s).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let i = pos.index(bytes.len());
        bytes[i] ^= 0x01;
        std::fs::write(&path, &bytes).unwrap();
        // a flip may land in insignificant whitespace and decode to the same state
        match store.load() {
            Ok(Some(loaded)) => prop_assert_eq!(loaded, s),
            Ok(None) => prop_assert!(false, "file vanished"),
            Err(_) => {}
        }
    }
}
