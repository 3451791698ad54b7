//! Single-file JSON store for configuration, whitelist, configurator theory
//! and users. See `docs/persistence.md` for the format.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::access::UserRecord;
use crate::kb::ValidityInterval;
use crate::service::{KbMode, PublicConfig};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistedState {
    pub format_version: u64,
    pub config: StoredConfig,
    /// Goal templates as term text, in whitelist order.
    pub goals: Vec<String>,
    /// Configurator-origin clauses, including ended ones.
    pub theory: Vec<StoredClause>,
    pub users: Vec<UserRecord>,
}

impl Default for PersistedState {
    fn default() -> Self {
        PersistedState {
            format_version: FORMAT_VERSION,
            config: PublicConfig::default().into(),
            goals: Vec::new(),
            theory: Vec::new(),
            users: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredConfig {
    pub kb_mode: KbMode,
    pub stateful_enabled: bool,
    pub stateless_enabled: bool,
    pub default_deadline_ms: u64,
}

impl From<PublicConfig> for StoredConfig {
    fn from(c: PublicConfig) -> Self {
        StoredConfig {
            kb_mode: c.kb_mode,
            stateful_enabled: c.stateful_enabled,
            stateless_enabled: c.stateless_enabled,
            default_deadline_ms: c.default_deadline_ms,
        }
    }
}

impl From<StoredConfig> for PublicConfig {
    fn from(c: StoredConfig) -> Self {
        PublicConfig {
            kb_mode: c.kb_mode,
            stateful_enabled: c.stateful_enabled,
            stateless_enabled: c.stateless_enabled,
            default_deadline_ms: c.default_deadline_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredClause {
    /// Clause text, terminated by a full stop.
    pub clause: String,
    pub validity: ValidityInterval,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt store ({reason}); moved to {}", quarantined.display())]
    Corrupt { reason: String, quarantined: PathBuf },
    #[error("store format version {0} is not supported (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u64),
}

/// A store file. Saves are serialised and atomic (temp file, then rename).
#[derive(Debug)]
pub struct Store {
    path: PathBuf,
    lock: Mutex<()>,
}

fn checksum(state: &Value) -> String {
    hex::encode(Sha256::digest(state.to_string().as_bytes()))
}

impl Store {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Store { path: path.into(), lock: Mutex::new(()) }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn save(&self, state: &PersistedState) -> Result<(), StoreError> {
        let _guard = self.lock.lock();
        let state = serde_json::to_value(state).map_err(io::Error::other)?;
        let envelope = serde_json::json!({ "checksum": checksum(&state), "state": state });
        let bytes = serde_json::to_vec_pretty(&envelope).map_err(io::Error::other)?;
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut tmp_name = self.path.as_os_str().to_owned();
        tmp_name.push(".tmp");
        let tmp = PathBuf::from(tmp_name);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }

    /// `Ok(None)` when no store exists yet. A damaged file is moved aside
    /// and reported as [`StoreError::Corrupt`].
    pub fn load(&self) -> Result<Option<PersistedState>, StoreError> {
        let _guard = self.lock.lock();
        let bytes = match fs::read(&self.path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let envelope: Value = match serde_json::from_slice(&bytes) {
            Ok(v) => v,
            Err(e) => return Err(self.quarantine(format!("unreadable JSON: {e}"))),
        };
        let state = envelope.get("state");
        let version = state.and_then(|s| s.get("format_version")).and_then(Value::as_u64);
        let Some(version) = version else {
            return Err(self.quarantine("missing format_version".into()));
        };
        if version != FORMAT_VERSION {
            return Err(StoreError::UnsupportedVersion(version));
        }
        let state = state.expect("checked above");
        if envelope.get("checksum").and_then(Value::as_str) != Some(checksum(state).as_str()) {
            return Err(self.quarantine("checksum mismatch".into()));
        }
        match serde_json::from_value(state.clone()) {
            Ok(s) => Ok(Some(s)),
            Err(e) => Err(self.quarantine(format!("malformed state: {e}"))),
        }
    }

    fn quarantine(&self, reason: String) -> StoreError {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_millis();
        let mut name = self.path.as_os_str().to_owned();
        name.push(format!(".corrupt-{stamp}"));
        let quarantined = PathBuf::from(name);
        if let Err(e) = fs::rename(&self.path, &quarantined) {
            log::error!("could not quarantine {}: {e}", self.path.display());
        }
        StoreError::Corrupt { reason, quarantined }
    }
}
