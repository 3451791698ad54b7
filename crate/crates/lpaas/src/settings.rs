//! Server settings: a TOML file plus `LPAAS_*` environment overrides.
//!
//! ```toml
//! listen = "127.0.0.1:8080"
//! store = "lpaas-state.json"
//! token_secret = "change me"
//! token_ttl_ms = 3600000
//! session_ttl_ms = 600000
//! gc_interval_ms = 5000
//! kb_retention_ms = 3600000
//! require_client_auth = false
//!
//! [[users]]
//! username = "admin"
//! password = "admin"
//! role = "configurator"
//! ```

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use lpaas_core::access::Role;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum SettingsError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid settings file {path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("invalid value for {var}: {value:?}")]
    Env { var: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct BootstrapUser {
    pub username: String,
    pub password: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub listen: SocketAddr,
    /// `None` keeps all state in memory.
    pub store: Option<PathBuf>,
    /// Without a secret, tokens are signed with a per-process random key.
    pub token_secret: Option<String>,
    pub token_ttl_ms: u64,
    pub session_ttl_ms: u64,
    pub gc_interval_ms: u64,
    /// Ended clauses older than this are pruned from a dynamic KB.
    pub kb_retention_ms: u64,
    /// When false, requests without a token act as an anonymous client.
    pub require_client_auth: bool,
    pub users: Vec<BootstrapUser>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            store: Some(PathBuf::from("lpaas-state.json")),
            token_secret: None,
            token_ttl_ms: 60 * 60 * 1000,
            session_ttl_ms: lpaas_core::service::DEFAULT_SESSION_TTL_MS,
            gc_interval_ms: 5_000,
            kb_retention_ms: 60 * 60 * 1000,
            require_client_auth: false,
            users: Vec::new(),
        }
    }
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Settings, SettingsError> {
        let text = std::fs::read_to_string(path).map_err(|source| SettingsError::Read { path: path.into(), source })?;
        toml::from_str(&text).map_err(|source| SettingsError::Parse { path: path.into(), source: Box::new(source) })
    }

    /// Defaults, then the file if given, then the environment.
    pub fn load(path: Option<&Path>) -> Result<Settings, SettingsError> {
        let mut s = match path {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        s.apply_env(|k| std::env::var(k).ok())?;
        Ok(s)
    }

    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), SettingsError> {
        fn parse<T: std::str::FromStr>(var: &'static str, value: String) -> Result<T, SettingsError> {
            value.parse().map_err(|_| SettingsError::Env { var, value })
        }
        if let Some(v) = get("LPAAS_LISTEN") {
            self.listen = parse("LPAAS_LISTEN", v)?;
        }
        if let Some(v) = get("LPAAS_STORE") {
            self.store = (!v.is_empty()).then(|| PathBuf::from(v));
        }
        if let Some(v) = get("LPAAS_TOKEN_SECRET") {
            self.token_secret = Some(v);
        }
        if let Some(v) = get("LPAAS_TOKEN_TTL_MS") {
            self.token_ttl_ms = parse("LPAAS_TOKEN_TTL_MS", v)?;
        }
        if let Some(v) = get("LPAAS_SESSION_TTL_MS") {
            self.session_ttl_ms = parse("LPAAS_SESSION_TTL_MS", v)?;
        }
        if let Some(v) = get("LPAAS_REQUIRE_CLIENT_AUTH") {
            self.require_client_auth = parse("LPAAS_REQUIRE_CLIENT_AUTH", v)?;
        }
        if let (Some(username), Some(password)) = (get("LPAAS_ADMIN_USER"), get("LPAAS_ADMIN_PASSWORD")) {
            self.users.push(BootstrapUser { username, password, role: Role::Configurator });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn file_values_and_defaults() {
        let s: Settings = toml::from_str(
            r#"
            listen = "0.0.0.0:9000"
            require_client_auth = true
            [[users]]
            username = "root"
            password = "pw"
            role = "configurator"
            "#,
        )
        .unwrap();
        assert_eq!(s.listen.port(), 9000);
        assert!(s.require_client_auth);
        assert_eq!(s.users[0].role, Role::Configurator);
        assert_eq!(s.session_ttl_ms, Settings::default().session_ttl_ms);
        assert!(toml::from_str::<Settings>("unknown_key = 1").is_err());
    }

    #[test]
    fn environment_overrides() {
        let env: HashMap<&str, &str> = [
            ("LPAAS_LISTEN", "127.0.0.1:0"),
            ("LPAAS_STORE", ""),
            ("LPAAS_ADMIN_USER", "a"),
            ("LPAAS_ADMIN_PASSWORD", "b"),
        ]
        .into();
        let mut s = Settings::default();
        s.apply_env(|k| env.get(k).map(|v| v.to_string())).unwrap();
        assert_eq!(s.listen.port(), 0);
        assert_eq!(s.store, None);
        assert_eq!(s.users.len(), 1);
        let bad = |k: &str| (k == "LPAAS_TOKEN_TTL_MS").then(|| "soon".to_string());
        assert!(matches!(Settings::default().apply_env(bad), Err(SettingsError::Env { .. })));
    }
}
