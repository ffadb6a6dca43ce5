//! Optional two-phase activation flow. Phase 1 asks the store whether
//! a user may activate a role instance and, if permitted, issues a
//! bearer token `<user, role, time, constraints>` sealed with
//! HMAC-SHA-256 under a server-side secret. Phase 2 verifies the token
//! (constant-time, bounded age) before the access request is
//! evaluated. The wrapper adds integrity to the second request; it
//! never changes the authorization answer. Callers that skip it simply
//! use [`decide`](crate::pdp::decide) directly — both paths are
//! first-class.
//!
//! Wire form, one UTF-8 line: `user|role_uri|time|constraints|mac`.
//! Fields must not contain `|`; `mac` is 64 lowercase hex chars. The
//! secret never appears in tokens, responses, or serialized output.

use hmac::{Hmac, KeyInit, Mac};
use sha2::Sha256;

use crate::compiler::{access_request, activation_request, NamingScheme};
use crate::ir::{Decision, RequestCtx, ResponseCtx, Status};
use crate::model::{ParamBinding, RoleInstance};
use crate::pdp::{decide, PolicyStore};

type HmacSha256 = Hmac<Sha256>;

/// Activation credential bound to user, role-value URI, issue time
/// (Unix seconds), and an opaque constraints string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorToken {
    pub user: String,
    pub role_uri: String,
    pub time: u64,
    pub constraints: String,
    pub mac: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TokenError {
    #[error("field-separator")]
    FieldSeparator,
    #[error("no-secret")]
    NoSecret,
    #[error("tampered")]
    Tampered,
    #[error("expired")]
    Expired,
    #[error("future")]
    Future,
    #[error("token-format")]
    Format,
}

impl TokenError {
    pub fn code(self) -> &'static str {
        match self {
            TokenError::FieldSeparator => "field-separator",
            TokenError::NoSecret => "no-secret",
            TokenError::Tampered => "tampered",
            TokenError::Expired => "expired",
            TokenError::Future => "future",
            TokenError::Format => "token-format",
        }
    }
}

fn canonical_message(
    user: &str,
    role_uri: &str,
    time: u64,
    constraints: &str,
) -> Result<String, TokenError> {
    if user.contains('|') || role_uri.contains('|') || constraints.contains('|') {
        return Err(TokenError::FieldSeparator);
    }
    Ok(format!("{user}|{role_uri}|{time}|{constraints}"))
}

fn keyed_mac(secret: &[u8], message: &str) -> HmacSha256 {
    let mut mac = HmacSha256::new_from_slice(secret).expect("HMAC accepts any key length");
    mac.update(message.as_bytes());
    mac
}

/// Issues a token over the canonical `|`-delimited message. The mac is
/// HMAC-SHA-256 of that message under `secret`, lowercase hex.
pub fn issue_token(
    secret: &[u8],
    user: &str,
    role_uri: &str,
    time: u64,
    constraints: &str,
) -> Result<ActorToken, TokenError> {
    if secret.is_empty() {
        return Err(TokenError::NoSecret);
    }
    let message = canonical_message(user, role_uri, time, constraints)?;
    let mac = hex::encode(keyed_mac(secret, &message).finalize().into_bytes());
    Ok(ActorToken {
        user: user.to_owned(),
        role_uri: role_uri.to_owned(),
        time,
        constraints: constraints.to_owned(),
        mac,
    })
}

/// Accepts the token iff the recomputed mac matches (constant-time)
/// and `0 <= now - time <= window_secs`.
pub fn verify_token(
    secret: &[u8],
    token: &ActorToken,
    now: u64,
    window_secs: u64,
) -> Result<(), TokenError> {
    if secret.is_empty() {
        return Err(TokenError::NoSecret);
    }
    let message =
        canonical_message(&token.user, &token.role_uri, token.time, &token.constraints)?;
    let presented = hex::decode(&token.mac).map_err(|_| TokenError::Tampered)?;
    keyed_mac(secret, &message)
        .verify_slice(&presented)
        .map_err(|_| TokenError::Tampered)?;
    if token.time > now {
        return Err(TokenError::Future);
    }
    if now - token.time > window_secs {
        return Err(TokenError::Expired);
    }
    Ok(())
}

impl ActorToken {
    /// Single-line wire form: `user|role_uri|time|constraints|mac`.
    pub fn to_line(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}",
            self.user, self.role_uri, self.time, self.constraints, self.mac
        )
    }

    pub fn from_line(line: &str) -> Result<Self, TokenError> {
        let parts: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('|').collect();
        let [user, role_uri, time, constraints, mac] = parts.as_slice() else {
            return Err(TokenError::Format);
        };
        let time: u64 = time.parse().map_err(|_| TokenError::Format)?;
        if mac.len() != 64 || !mac.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(TokenError::Format);
        }
        Ok(ActorToken {
            user: (*user).to_owned(),
            role_uri: (*role_uri).to_owned(),
            time,
            constraints: (*constraints).to_owned(),
            mac: (*mac).to_owned(),
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ActivationError {
    /// The store's role-assignment sets do not permit the activation.
    #[error("activation-denied")]
    Denied,
    #[error(transparent)]
    Token(#[from] TokenError),
}

/// Phase 1: evaluates the activation request and issues a token when
/// the store permits it. `constraints` is carried opaquely under the
/// mac but never interpreted.
pub fn activate(
    store: &PolicyStore,
    secret: &[u8],
    user: &str,
    role_uri: &str,
    now: u64,
    constraints: &str,
) -> Result<ActorToken, ActivationError> {
    let response = decide(store, &activation_request(user, role_uri));
    if response.decision != Decision::Permit {
        return Err(ActivationError::Denied);
    }
    Ok(issue_token(secret, user, role_uri, now, constraints)?)
}

/// Phase 2: verifies the token, then evaluates the access request.
/// Verification failure yields Indeterminate with the error code as
/// status; the access decision is otherwise exactly [`decide`]'s.
pub fn verified_decide(
    store: &PolicyStore,
    secret: &[u8],
    token: &ActorToken,
    request: &RequestCtx,
    now: u64,
    window_secs: u64,
) -> ResponseCtx {
    if let Err(e) = verify_token(secret, token, now, window_secs) {
        return ResponseCtx::from_decision(Decision::Indeterminate, Some(e.code().to_owned()));
    }
    decide(store, request)
}

/// The whole two-request flow against one store: activate at
/// `activated_at`, then verify and evaluate at `now`. A denied
/// activation yields NotApplicable with status `activation-denied`; a
/// stale or tampered token yields Indeterminate with the verify error;
/// otherwise the result equals the plain decision for the same access
/// request.
#[allow(clippy::too_many_arguments)]
pub fn two_phase_decide(
    store: &PolicyStore,
    secret: &[u8],
    user: &str,
    ri: &RoleInstance,
    service: &str,
    action: &str,
    aparams: &[ParamBinding],
    activated_at: u64,
    now: u64,
    window_secs: u64,
) -> ResponseCtx {
    let scheme = NamingScheme::default();
    let role_uri = scheme.role_value_uri(ri);
    let token = match activate(store, secret, user, &role_uri, activated_at, "") {
        Ok(token) => token,
        Err(ActivationError::Denied) => {
            return ResponseCtx {
                decision: Decision::NotApplicable,
                status: Status::Error("activation-denied".into()),
            }
        }
        Err(ActivationError::Token(e)) => {
            return ResponseCtx::from_decision(Decision::Indeterminate, Some(e.code().to_owned()))
        }
    };
    let request = access_request(&scheme, ri, service, action, aparams);
    verified_decide(store, secret, &token, &request, now, window_secs)
}
