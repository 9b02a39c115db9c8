//! LLM-backed seller policy.
//!
//! Renders the observable state into the v1 or v2 prompt, calls an
//! OpenAI-compatible chat-completions endpoint, and parses the reply under
//! the strict structured-action contract. Parsing is strict by default: no
//! code-fence salvage, whitespace trimming only. A lenient mode exists for
//! exploration but is excluded from benchmark-grade runs.

use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::{Observation, SellerAction};
use crate::error::Error;
use crate::policy::{ExchangeLog, InvalidKind, PolicyReply, SellerPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptVersion {
    V1,
    V2,
}

impl PromptVersion {
    pub fn label(self) -> &'static str {
        match self {
            PromptVersion::V1 => "v1",
            PromptVersion::V2 => "v2",
        }
    }
}

/// Endpoint and prompt configuration for the LLM policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptConfig {
    pub version: PromptVersion,
    pub model_id: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub endpoint_url: String,
    /// Name of the environment variable holding the API key. The key itself
    /// never appears in config files or flags.
    pub api_key_env_var: String,
    pub retry_limit: u32,
    pub initial_backoff_ms: u64,
    pub request_timeout_secs: u64,
    /// Opaque provider extension fields merged into the request body
    /// (e.g. thinking/reasoning toggles). Not interpreted by the harness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_body: Option<Value>,
    pub lenient_parse: bool,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            version: PromptVersion::V1,
            model_id: "gpt-4o-mini".to_string(),
            temperature: 0.0,
            max_tokens: 512,
            endpoint_url: "https://api.openai.com".to_string(),
            api_key_env_var: "OPENAI_API_KEY".to_string(),
            retry_limit: 3,
            initial_backoff_ms: 250,
            request_timeout_secs: 120,
            extra_body: None,
            lenient_parse: false,
        }
    }
}

impl PromptConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.max_tokens < 64 {
            return Err(Error::validation("max_tokens must be at least 64"));
        }
        if self.temperature < 0.0 || !self.temperature.is_finite() {
            return Err(Error::validation("temperature must be a non-negative number"));
        }
        Ok(())
    }
}

/// Render money values as integers when integral, keeping prompts close to
/// the integer-dollar protocol.
fn money(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        json!(v as i64)
    } else {
        json!(v)
    }
}

fn opt_i64(v: Option<i64>) -> Value {
    match v {
        Some(x) => json!(x),
        None => Value::Null,
    }
}

/// Render the prompt for one decision point. Rendering is byte-stable for a
/// fixed observation and never includes hidden buyer variables.
pub fn render_prompt(obs: &Observation, version: PromptVersion) -> String {
    let mut policy_contract = json!({
        "role": "You are the seller in a personalized pricing benchmark.",
        "objective": "Maximize expected seller profit from the customization bundle.",
        "profit_formula": "profit_usd = deal_price_usd - estimated_implementation_cost_usd",
        "information_limit": "Use only the observable buyer profile, bundle information, and negotiation history below. Hidden willingness-to-pay, hidden preferences, patience, and walkaway tendency are not observable.",
        "action_meanings": {
            "offer": "Propose a customization-bundle price in USD. This is not the full vehicle price.",
            "accept": "Accept the buyer's last counter-offer. Use only when last_consumer_offer_usd is not null.",
            "walkaway": "End the negotiation without a deal."
        },
        "accept_precondition": "Use accept only when last_consumer_offer_usd is not null; otherwise accept is unavailable in the environment.",
        "decision_guidance": [
            "Prefer profitable deals over no deal.",
            "Do not optimize only for immediate acceptance.",
            "When several rounds remain, use the opportunity to make a profitable but ambitious opening offer.",
            "A first-round offer may be above the expected settlement price if it is still plausible for the bundle.",
            "Avoid offering below estimated_implementation_cost_usd unless strategically necessary.",
            "If the buyer made a counter-offer, compare it with implementation cost and remaining rounds.",
            "If remaining rounds are low, make a realistic final offer or accept a profitable counter.",
            "Treat the observable buyer profile as weak evidence only."
        ]
    });
    if version == PromptVersion::V2 {
        let extra = policy_contract.as_object_mut().expect("object");
        extra.insert(
            "scenario".to_string(),
            json!("The product is a fixed vehicle customization bundle selected before the negotiation. You price only the customization bundle, not the base vehicle."),
        );
        extra.insert(
            "evaluation_note".to_string(),
            json!("High deal rate alone is not sufficient; low-price immediate acceptance can reduce profit."),
        );
        extra.insert(
            "interaction_dynamics".to_string(),
            json!("After an offer, the buyer may accept, reject, make a counter-offer, or walk away. A reject or counter-offer creates a new observation in the next round if the episode continues."),
        );
    }

    let selected_options: Vec<Value> = obs
        .bundle
        .selected_options
        .iter()
        .map(|o| {
            json!({
                "key": o.key,
                "dimension": o.dimension,
                "msrp_delta_usd": money(o.msrp_delta_usd),
            })
        })
        .collect();

    let mut root = json!({
        "prompt_version": version.label(),
        "policy_contract": policy_contract,
        "output_contract": {
            "instruction": "Return exactly one JSON object and nothing else.",
            "allowed_actions": ["offer", "accept", "walkaway"],
            "schema": {
                "move": "one of: offer, accept, walkaway",
                "price_offer_usd": "non-negative number required for offer; use 0 for accept or walkaway",
                "reason": "brief string for trace only"
            },
            "example": {
                "move": "offer",
                "price_offer_usd": 5200,
                "reason": "profitable offer adjusted for buyer profile and remaining rounds"
            }
        },
        "current_state": {
            "round": {
                "round_idx": obs.round_idx,
                "remaining_rounds": obs.remaining_rounds
            },
            "bundle": {
                "selected_options": selected_options,
                "selected_option_keys": obs.bundle.selected_option_keys,
                "total_msrp_delta_usd": money(obs.bundle.total_msrp_delta_usd),
                "estimated_implementation_cost_usd": money(obs.bundle.estimated_implementation_cost_usd),
                "aesthetic_proxy_score": obs.bundle.aesthetic_proxy_score
            },
            "buyer_observable_profile": obs.buyer_observable_profile,
            "negotiation_state": {
                "last_agent_offer_usd": opt_i64(obs.last_agent_offer_usd),
                "last_consumer_response": obs.last_consumer_response,
                "last_consumer_offer_usd": opt_i64(obs.last_consumer_offer_usd),
                "history_len": obs.history_len
            }
        }
    });

    if version == PromptVersion::V2 {
        let state_description = json!({
            "round_idx": "Current seller decision turn, starting from 1.",
            "remaining_rounds": "Number of seller decision turns left after the current one.",
            "selected_options": "Customization options included in the fixed bundle being negotiated.",
            "total_msrp_delta_usd": "Reference retail price increase for the selected customization bundle.",
            "estimated_implementation_cost_usd": "Estimated seller-side cost to provide the selected customization bundle.",
            "aesthetic_proxy_score": "Coarse visible distinctiveness/style proxy for the selected bundle, not a hidden preference.",
            "buyer_observable_profile": "Observable buyer demographic and usage-context signals. These are weak evidence, not hidden preferences.",
            "last_agent_offer_usd": "Your previous seller offer, or null if no offer has been made.",
            "last_consumer_response": "Buyer response to the previous seller action.",
            "last_consumer_offer_usd": "Buyer counter-offer if one was made; otherwise null.",
            "history_len": "Number of completed negotiation steps so far."
        });
        // Insert state_description between output_contract and current_state.
        let map = root.as_object_mut().expect("object");
        let current_state = map.remove("current_state").expect("present");
        map.insert("state_description".to_string(), state_description);
        map.insert("current_state".to_string(), current_state);
    }

    let body = serde_json::to_string_pretty(&root).expect("template serializes");
    format!("Return only valid JSON. Do not include Markdown, code fences, or extra text.\n\n{body}")
}

/// Result of parsing one model reply.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseResult {
    Action { action: SellerAction, reason: Option<String> },
    Invalid(InvalidKind),
}

/// Strict parse of a model reply into an action. Classification follows the
/// fixed category order: malformed JSON, non-object, unsupported move,
/// missing price, non-numeric price, negative price. The `reason` field is
/// trace metadata and never scored.
pub fn parse_action(text: &str) -> ParseResult {
    let trimmed = text.trim();
    let value: Value = match serde_json::from_str(trimmed) {
        Ok(v) => v,
        Err(_) => return ParseResult::Invalid(InvalidKind::MalformedJson),
    };
    let Some(obj) = value.as_object() else {
        return ParseResult::Invalid(InvalidKind::NonObject);
    };
    let mv = obj.get("move").and_then(Value::as_str);
    let reason = obj.get("reason").and_then(Value::as_str).map(str::to_string);
    match mv {
        Some("offer") => {
            let price = match obj.get("price_offer_usd") {
                None | Some(Value::Null) => {
                    return ParseResult::Invalid(InvalidKind::MissingPrice)
                }
                Some(v) => v,
            };
            let Some(price) = price.as_f64() else {
                return ParseResult::Invalid(InvalidKind::NonNumericPrice);
            };
            if !price.is_finite() {
                return ParseResult::Invalid(InvalidKind::NonNumericPrice);
            }
            if price < 0.0 {
                return ParseResult::Invalid(InvalidKind::NegativePrice);
            }
            ParseResult::Action { action: SellerAction::Offer { price_offer_usd: price }, reason }
        }
        Some("accept") => ParseResult::Action { action: SellerAction::Accept, reason },
        Some("walkaway") => ParseResult::Action { action: SellerAction::Walkaway, reason },
        _ => ParseResult::Invalid(InvalidKind::UnsupportedMove),
    }
}

/// Lenient variant: strips a single leading/trailing Markdown code fence
/// before the strict parse. Off by default; not benchmark-grade.
pub fn parse_action_lenient(text: &str) -> ParseResult {
    let trimmed = text.trim();
    if let Some(rest) = trimmed.strip_prefix("```") {
        let rest = rest.strip_prefix("json").unwrap_or(rest);
        if let Some(inner) = rest.trim_start_matches(['\r', '\n']).strip_suffix("```") {
            return parse_action(inner);
        }
    }
    parse_action(trimmed)
}

/// Successful chat-completions call.
#[derive(Debug, Clone)]
pub struct ChatSuccess {
    pub content: String,
    pub http_status: u16,
    pub attempts: u32,
    pub latency_ms: u64,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

/// Transport-level failure after the retry budget.
#[derive(Debug, Clone)]
pub struct TransportError {
    pub message: String,
    pub http_status: Option<u16>,
    pub attempts: u32,
}

/// Blocking OpenAI-compatible chat-completions client with retry and
/// exponential backoff. 4xx statuses other than 429 are non-retryable.
pub struct ChatClient {
    http: reqwest::blocking::Client,
    config: PromptConfig,
    api_key: Option<String>,
}

impl ChatClient {
    pub fn new(config: PromptConfig) -> Result<ChatClient, Error> {
        config.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.request_timeout_secs))
            .build()
            .map_err(|e| Error::validation(format!("http client: {e}")))?;
        let api_key = std::env::var(&config.api_key_env_var).ok();
        Ok(ChatClient { http, config, api_key })
    }

    pub fn config(&self) -> &PromptConfig {
        &self.config
    }

    fn request_body(&self, prompt: &str) -> Value {
        let mut body = json!({
            "model": self.config.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        });
        if let Some(Value::Object(extra)) = &self.config.extra_body {
            let map = body.as_object_mut().expect("object");
            for (k, v) in extra {
                map.insert(k.clone(), v.clone());
            }
        }
        body
    }

    pub fn call(&self, prompt: &str) -> Result<ChatSuccess, TransportError> {
        let url = format!(
            "{}/v1/chat/completions",
            self.config.endpoint_url.trim_end_matches('/')
        );
        let body = self.request_body(prompt);
        let max_attempts = self.config.retry_limit + 1;
        let started = Instant::now();
        let mut last_error = String::new();
        let mut last_status = None;
        for attempt in 1..=max_attempts {
            let mut request = self.http.post(&url).json(&body);
            if let Some(key) = &self.api_key {
                request = request.bearer_auth(key);
            }
            match request.send() {
                Ok(response) => {
                    let status = response.status().as_u16();
                    last_status = Some(status);
                    if response.status().is_success() {
                        match response.json::<Value>() {
                            Ok(reply) => match extract_content(&reply) {
                                Some(content) => {
                                    let usage = reply.get("usage");
                                    let tokens = |k: &str| {
                                        usage.and_then(|u| u.get(k)).and_then(Value::as_u64)
                                    };
                                    return Ok(ChatSuccess {
                                        content,
                                        http_status: status,
                                        attempts: attempt,
                                        latency_ms: started.elapsed().as_millis() as u64,
                                        prompt_tokens: tokens("prompt_tokens"),
                                        completion_tokens: tokens("completion_tokens"),
                                    });
                                }
                                None => {
                                    last_error =
                                        "response body missing choices[0].message.content".into();
                                }
                            },
                            Err(e) => last_error = format!("unreadable response body: {e}"),
                        }
                    } else if status == 429 || status >= 500 {
                        last_error = format!("retryable http status {status}");
                    } else {
                        return Err(TransportError {
                            message: format!("non-retryable http status {status}"),
                            http_status: Some(status),
                            attempts: attempt,
                        });
                    }
                }
                Err(e) => {
                    last_error = format!("request failed: {e}");
                }
            }
            if attempt < max_attempts {
                let backoff = self.config.initial_backoff_ms.saturating_mul(1 << (attempt - 1));
                std::thread::sleep(Duration::from_millis(backoff.min(10_000)));
            }
        }
        Err(TransportError {
            message: format!("retries exhausted after {max_attempts} attempts: {last_error}"),
            http_status: last_status,
            attempts: max_attempts,
        })
    }
}

fn extract_content(reply: &Value) -> Option<String> {
    reply
        .get("choices")?
        .get(0)?
        .get("message")?
        .get("content")?
        .as_str()
        .map(str::to_string)
}

/// Prompt-based seller policy: render, call, parse.
pub struct LlmPolicy {
    client: ChatClient,
}

impl LlmPolicy {
    pub fn new(config: PromptConfig) -> Result<LlmPolicy, Error> {
        Ok(LlmPolicy { client: ChatClient::new(config)? })
    }
}

impl SellerPolicy for LlmPolicy {
    fn name(&self) -> &'static str {
        "llm"
    }

    fn decide(&self, obs: &Observation, _rng: &mut ChaCha8Rng) -> PolicyReply {
        let config = self.client.config();
        let prompt = render_prompt(obs, config.version);
        match self.client.call(&prompt) {
            Ok(success) => {
                let exchange = ExchangeLog {
                    prompt,
                    raw_reply: Some(success.content.clone()),
                    http_status: Some(success.http_status),
                    attempts: success.attempts,
                    latency_ms: Some(success.latency_ms),
                    prompt_tokens: success.prompt_tokens,
                    completion_tokens: success.completion_tokens,
                };
                let parsed = if config.lenient_parse {
                    parse_action_lenient(&success.content)
                } else {
                    parse_action(&success.content)
                };
                match parsed {
                    ParseResult::Action { action, reason } => {
                        PolicyReply::Action { action, reason, exchange: Some(exchange) }
                    }
                    ParseResult::Invalid(category) => PolicyReply::Invalid {
                        category,
                        raw_reply: success.content,
                        exchange: Some(exchange),
                    },
                }
            }
            Err(err) => {
                let exchange = ExchangeLog {
                    prompt,
                    raw_reply: None,
                    http_status: err.http_status,
                    attempts: err.attempts,
                    latency_ms: None,
                    prompt_tokens: None,
                    completion_tokens: None,
                };
                PolicyReply::Transport { error: err.message, exchange: Some(exchange) }
            }
        }
    }
}
