//! Signed bearer tokens.
//!
//! A token is `base64url(claims) "." base64url(hmac_sha256(secret, claims))`
//! where `claims` is the JSON object `{"sub", "role", "exp"}` and `exp` is in
//! milliseconds since the Unix epoch.

use std::time::{SystemTime, UNIX_EPOCH};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use hmac::{Hmac, Mac};
use lpaas_core::access::{Principal, Role};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::Sha256;

type HmacSha256 = Hmac<Sha256>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TokenError {
    #[error("malformed token")]
    Malformed,
    #[error("token signature mismatch")]
    BadSignature,
    #[error("token expired")]
    Expired,
}

#[derive(Debug, Serialize, Deserialize)]
struct Claims {
    sub: String,
    role: Role,
    exp: u64,
}

pub fn unix_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

#[derive(Clone)]
pub struct TokenAuthority {
    secret: Vec<u8>,
    ttl_ms: u64,
}

impl std::fmt::Debug for TokenAuthority {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TokenAuthority").field("ttl_ms", &self.ttl_ms).finish_non_exhaustive()
    }
}

impl TokenAuthority {
    pub fn new(secret: impl Into<Vec<u8>>, ttl_ms: u64) -> Self {
        TokenAuthority { secret: secret.into(), ttl_ms }
    }

    /// Tokens from a random secret do not survive a restart.
    pub fn ephemeral(ttl_ms: u64) -> Self {
        let mut secret = vec![0u8; 32];
        rand::thread_rng().fill_bytes(&mut secret);
        TokenAuthority::new(secret, ttl_ms)
    }

    pub fn ttl_ms(&self) -> u64 {
        self.ttl_ms
    }

    fn mac(&self) -> HmacSha256 {
        HmacSha256::new_from_slice(&self.secret).expect("hmac takes keys of any length")
    }

    /// Returns the token and its expiry.
    pub fn issue(&self, who: &Principal) -> (String, u64) {
        self.issue_at(who, unix_millis())
    }

    pub fn issue_at(&self, who: &Principal, now_ms: u64) -> (String, u64) {
        let exp = now_ms.saturating_add(self.ttl_ms);
        let claims = Claims { sub: who.name.clone(), role: who.role, exp };
        let payload = URL_SAFE_NO_PAD.encode(serde_json::to_vec(&claims).expect("claims serialise"));
        let mut mac = self.mac();
        mac.update(payload.as_bytes());
        let sig = URL_SAFE_NO_PAD.encode(mac.finalize().into_bytes());
        (format!("{payload}.{sig}"), exp)
    }

    pub fn verify(&self, token: &str) -> Result<Principal, TokenError> {
        self.verify_at(token, unix_millis())
    }

    pub fn verify_at(&self, token: &str, now_ms: u64) -> Result<Principal, TokenError> {
        let (payload, sig) = token.split_once('.').ok_or(TokenError::Malformed)?;
        let sig = URL_SAFE_NO_PAD.decode(sig).map_err(|_| TokenError::Malformed)?;
        let mut mac = self.mac();
        mac.update(payload.as_bytes());
        mac.verify_slice(&sig).map_err(|_| TokenError::BadSignature)?;
        let bytes = URL_SAFE_NO_PAD.decode(payload).map_err(|_| TokenError::Malformed)?;
        let claims: Claims = serde_json::from_slice(&bytes).map_err(|_| TokenError::Malformed)?;
        if now_ms >= claims.exp {
            return Err(TokenError::Expired);
        }
        Ok(Principal::new(claims.sub, claims.role))
    }
}
