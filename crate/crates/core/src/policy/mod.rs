//! Seller policies.
//!
//! A policy maps an observation to a reply: a seller action, a parser-invalid
//! classification (LLM policies only), or a transport failure. Policies are
//! stateless between calls apart from the per-episode rng stream the runner
//! hands them, so one instance can serve concurrent episodes.

pub mod heuristics;
pub mod llm;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Observation, SellerAction};

/// The six parser-invalid categories, evaluated in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidKind {
    MalformedJson,
    NonObject,
    UnsupportedMove,
    MissingPrice,
    NonNumericPrice,
    NegativePrice,
}

impl InvalidKind {
    pub const ALL: [InvalidKind; 6] = [
        InvalidKind::MalformedJson,
        InvalidKind::NonObject,
        InvalidKind::UnsupportedMove,
        InvalidKind::MissingPrice,
        InvalidKind::NonNumericPrice,
        InvalidKind::NegativePrice,
    ];
}

/// Wire-level metadata of one model exchange, kept for trace inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeLog {
    pub prompt: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raw_reply: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub http_status: Option<u16>,
    pub attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub latency_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prompt_tokens: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub completion_tokens: Option<u64>,
}

/// What a policy produced for one decision point.
#[derive(Debug, Clone)]
pub enum PolicyReply {
    Action { action: SellerAction, reason: Option<String>, exchange: Option<ExchangeLog> },
    Invalid { category: InvalidKind, raw_reply: String, exchange: Option<ExchangeLog> },
    Transport { error: String, exchange: Option<ExchangeLog> },
}

impl PolicyReply {
    pub fn action(action: SellerAction) -> PolicyReply {
        PolicyReply::Action { action, reason: None, exchange: None }
    }
}

pub trait SellerPolicy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Decide the next move. `rng` is the episode's policy substream.
    fn decide(&self, obs: &Observation, rng: &mut ChaCha8Rng) -> PolicyReply;
}
