//! Application configuration.
//!
//! Precedence is flags > config file > built-in defaults. Config files are
//! JSON objects mirroring this structure; unknown keys are rejected so typos
//! fail loudly. Secrets never live here — the LLM block only names the
//! environment variable that holds the API key.

use serde::{Deserialize, Serialize};

use crate::buyer::BuyerConfig;
use crate::error::Error;
use crate::policy::llm::PromptConfig;

/// Parameter block for the random reference policy (bounds are derived from
/// the catalog at startup, not configured).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomPolicyConfig {
    pub p_accept_counter: f64,
    pub p_walkaway: f64,
}

impl Default for RandomPolicyConfig {
    fn default() -> Self {
        RandomPolicyConfig { p_accept_counter: 0.12, p_walkaway: 0.08 }
    }
}

/// Parameter block for the linear-concession policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcessionConfig {
    pub anchor_mult: f64,
    pub floor_mult: f64,
    pub min_spread_usd: f64,
    pub noise_sigma_usd: f64,
    pub blend_target: f64,
    pub blend_counter: f64,
    pub counter_bump_usd: f64,
}

impl Default for ConcessionConfig {
    fn default() -> Self {
        ConcessionConfig {
            anchor_mult: 2.20,
            floor_mult: 1.10,
            min_spread_usd: 200.0,
            noise_sigma_usd: 100.0,
            blend_target: 0.62,
            blend_counter: 0.38,
            counter_bump_usd: 120.0,
        }
    }
}

/// Run block: seed, episode count, horizon, and execution knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunBlock {
    pub seed: u64,
    pub episodes: u64,
    pub horizon: u32,
    pub concurrency: usize,
    pub transport_failure_budget: u64,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            seed: 123,
            episodes: 7_500,
            horizon: 5,
            concurrency: 1,
            transport_failure_budget: 25,
        }
    }
}

/// Full application configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    /// Catalog file path; the built-in catalog is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog_path: Option<String>,
    pub buyer: BuyerConfig,
    pub random_policy: RandomPolicyConfig,
    pub concession_policy: ConcessionConfig,
    pub llm: PromptConfig,
    pub run: RunBlock,
}

impl AppConfig {
    pub fn from_json_str(text: &str) -> Result<AppConfig, Error> {
        serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("bad config file: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<AppConfig, Error> {
        let text = std::fs::read_to_string(path)?;
        AppConfig::from_json_str(&text)
    }
}
