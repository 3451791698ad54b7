use serde::{Deserialize, Serialize};

use crate::logic::Term;

use super::error::ServiceError;

pub const DEFAULT_DEADLINE_MS: u64 = 10_000;
pub const DEFAULT_SESSION_TTL_MS: u64 = 10 * 60 * 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KbMode {
    #[default]
    Static,
    Dynamic,
}

/// Configurator-controlled behaviour of the service.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub kb_mode: KbMode,
    pub stateful_enabled: bool,
    pub stateless_enabled: bool,
    pub default_deadline_ms: u64,
    /// Whitelisted goal templates; 1-based position is the `index` selector.
    pub goal_list: Vec<Term>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            kb_mode: KbMode::Static,
            stateful_enabled: true,
            stateless_enabled: true,
            default_deadline_ms: DEFAULT_DEADLINE_MS,
            goal_list: Vec::new(),
        }
    }
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<(), ServiceError> {
        if !self.stateful_enabled && !self.stateless_enabled {
            return Err(ServiceError::InvalidConfig("at least one interaction mode must be enabled".into()));
        }
        if self.default_deadline_ms == 0 {
            return Err(ServiceError::InvalidConfig("defaultDeadlineMs must be positive".into()));
        }
        if let Some(g) = self.goal_list.iter().find(|g| !g.is_callable()) {
            return Err(ServiceError::InvalidConfig(format!("goal template {g} is not callable")));
        }
        Ok(())
    }

    pub fn public(&self) -> PublicConfig {
        PublicConfig {
            kb_mode: self.kb_mode,
            stateful_enabled: self.stateful_enabled,
            stateless_enabled: self.stateless_enabled,
            default_deadline_ms: self.default_deadline_ms,
        }
    }

    pub fn with_public(public: PublicConfig, goal_list: Vec<Term>) -> Self {
        ServiceConfig {
            kb_mode: public.kb_mode,
            stateful_enabled: public.stateful_enabled,
            stateless_enabled: public.stateless_enabled,
            default_deadline_ms: public.default_deadline_ms,
            goal_list,
        }
    }
}

/// The part of the configuration any client may read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PublicConfig {
    pub kb_mode: KbMode,
    pub stateful_enabled: bool,
    pub stateless_enabled: bool,
    pub default_deadline_ms: u64,
}

impl Default for PublicConfig {
    fn default() -> Self {
        ServiceConfig::default().public()
    }
}

/// Operational limits that are not part of the configurator interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceOptions {
    pub session_ttl_ms: u64,
    pub max_depth: usize,
    /// How many closed session ids are remembered for diagnostics.
    pub tombstones: usize,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        ServiceOptions {
            session_ttl_ms: DEFAULT_SESSION_TTL_MS,
            max_depth: crate::logic::DEFAULT_MAX_DEPTH,
            tombstones: 4096,
        }
    }
}
