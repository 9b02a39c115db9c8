//! Buyer-side valuation and response model.
//!
//! Each round the buyer's willingness to pay is assembled from a reservation
//! base, bundle-conditioned value terms, a fatigue discount, and round noise,
//! floored at 1,000 USD. An offer at or below WTP is accepted; otherwise the
//! buyer walks away with a utility-gap-dependent probability, or counters at
//! a level shaped by counter strength, or rejects.
//!
//! Per-round draws come from a dedicated buyer substream keyed by
//! (episode, round), so identical seller behavior reproduces identical buyer
//! behavior across policies. Draw order within a round: WTP noise, walkaway
//! uniform, counter-vs-reject uniform.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::catalog::Bundle;
use crate::persona::{HiddenTraits, Persona, TechAffinity};

/// Coefficients of the buyer model. Every value is config-overridable; the
/// defaults are the benchmark-grade settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuyerConfig {
    /// WTP floor in USD.
    pub wtp_floor_usd: f64,
    /// Customization value: `m * (custom_base + custom_match_gain * feature_match)`.
    pub custom_base: f64,
    pub custom_match_gain: f64,
    /// Aesthetic value: `aesthetic_gain * m * aesthetic_sensitivity * aesthetic_proxy`.
    pub aesthetic_gain: f64,
    /// Brand/technology value:
    /// `brand_tech_gain * m * (brand_loyalty + tech_level * tech_share) / 2`.
    pub brand_tech_gain: f64,
    pub tech_level_low: f64,
    pub tech_level_medium: f64,
    pub tech_level_high: f64,
    /// Fatigue: `fatigue_gain * m * (t - 1) * (1 + impulsivity) / patience`.
    pub fatigue_gain: f64,
    /// Round noise is N(0, (noise_scale * m)^2).
    pub noise_scale: f64,
    /// Walkaway probability:
    /// `clip(walkaway_threshold + walk_gap_gain * price_sensitivity * gap_ratio, 0, walk_prob_cap)`.
    pub walk_gap_gain: f64,
    pub walk_prob_cap: f64,
    /// Probability of countering (rather than rejecting) after declining.
    pub counter_prob: f64,
    /// Counter level: `wtp * (counter_base - counter_strength_gain * counter_strength)`.
    pub counter_base: f64,
    pub counter_strength_gain: f64,
}

impl Default for BuyerConfig {
    fn default() -> Self {
        BuyerConfig {
            wtp_floor_usd: 1_000.0,
            custom_base: 0.25,
            custom_match_gain: 1.25,
            aesthetic_gain: 0.15,
            brand_tech_gain: 0.10,
            tech_level_low: 0.2,
            tech_level_medium: 0.5,
            tech_level_high: 0.8,
            fatigue_gain: 0.08,
            noise_scale: 0.03,
            walk_gap_gain: 0.6,
            walk_prob_cap: 0.95,
            counter_prob: 0.7,
            counter_base: 0.90,
            counter_strength_gain: 0.35,
        }
    }
}

impl BuyerConfig {
    pub fn tech_level(&self, affinity: TechAffinity) -> f64 {
        match affinity {
            TechAffinity::Low => self.tech_level_low,
            TechAffinity::Medium => self.tech_level_medium,
            TechAffinity::High => self.tech_level_high,
        }
    }
}

/// Persona-conditioned bundle summary used by the valuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundleSignals {
    pub total_msrp_delta_usd: f64,
    /// Dot product of persona feature weights and bundle feature channels.
    pub feature_match: f64,
    pub aesthetic_proxy: f64,
    /// Technology channel mass of the bundle.
    pub tech_share: f64,
}

pub fn bundle_signals(persona: &Persona, bundle: &Bundle) -> BundleSignals {
    let feature_match = persona
        .hidden
        .feature_weights
        .iter()
        .zip(&bundle.feature_channels)
        .map(|(w, b)| w * b)
        .sum();
    BundleSignals {
        total_msrp_delta_usd: bundle.total_msrp_delta_usd,
        feature_match,
        aesthetic_proxy: bundle.aesthetic_proxy,
        tech_share: bundle.tech_share(),
    }
}

/// Decomposition of one round's willingness to pay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WtpComponents {
    pub r_base: f64,
    pub v_custom: f64,
    pub v_aesthetic: f64,
    pub v_brand_tech: f64,
    pub v_fatigue: f64,
    pub epsilon: f64,
    pub wtp: f64,
}

/// Compute the round-`t` willingness to pay (`t` starts at 1).
pub fn willingness_to_pay(
    hidden: &HiddenTraits,
    signals: &BundleSignals,
    t: u32,
    cfg: &BuyerConfig,
    rng: &mut ChaCha8Rng,
) -> WtpComponents {
    let m = signals.total_msrp_delta_usd;
    let r_base = hidden.reservation_value_usd;
    let v_custom = m * (cfg.custom_base + cfg.custom_match_gain * signals.feature_match);
    let v_aesthetic = cfg.aesthetic_gain * m * hidden.aesthetic_sensitivity * signals.aesthetic_proxy;
    let tech_level = cfg.tech_level(hidden.tech_affinity);
    let v_brand_tech =
        cfg.brand_tech_gain * m * (hidden.brand_loyalty + tech_level * signals.tech_share) / 2.0;
    let v_fatigue = cfg.fatigue_gain * m * (t as f64 - 1.0) * (1.0 + hidden.impulsivity)
        / hidden.patience as f64;
    let epsilon = Normal::new(0.0, cfg.noise_scale * m).expect("valid normal").sample(rng);
    let wtp = (r_base + v_custom + v_aesthetic + v_brand_tech - v_fatigue + epsilon)
        .max(cfg.wtp_floor_usd);
    WtpComponents { r_base, v_custom, v_aesthetic, v_brand_tech, v_fatigue, epsilon, wtp }
}

/// Buyer-side utility of an offer.
pub fn buyer_utility(wtp: f64, offer: f64) -> f64 {
    wtp - offer
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuyerResponse {
    Accept,
    Reject,
    Counter { counter_offer_usd: i64 },
    Walkaway,
}

/// Walkaway probability for a declined offer with the given utility gap
/// ratio `(offer - wtp) / wtp`.
pub fn walkaway_probability(hidden: &HiddenTraits, gap_ratio: f64, cfg: &BuyerConfig) -> f64 {
    (hidden.walkaway_threshold + cfg.walk_gap_gain * hidden.price_sensitivity * gap_ratio)
        .clamp(0.0, cfg.walk_prob_cap)
}

/// Generate the buyer's reaction to an integer-dollar seller offer at round `t`.
pub fn respond(
    hidden: &HiddenTraits,
    signals: &BundleSignals,
    t: u32,
    offer_usd: i64,
    cfg: &BuyerConfig,
    rng: &mut ChaCha8Rng,
) -> BuyerResponse {
    let wtp = willingness_to_pay(hidden, signals, t, cfg, rng).wtp;
    if buyer_utility(wtp, offer_usd as f64) >= 0.0 {
        return BuyerResponse::Accept;
    }
    let gap_ratio = (offer_usd as f64 - wtp) / wtp;
    let p_walk = walkaway_probability(hidden, gap_ratio, cfg);
    if rng.random::<f64>() < p_walk {
        return BuyerResponse::Walkaway;
    }
    if rng.random::<f64>() < cfg.counter_prob {
        let level = (wtp * (cfg.counter_base - cfg.counter_strength_gain * hidden.counter_strength))
            .round() as i64;
        let counter = level.min(offer_usd - 1).max(1);
        return BuyerResponse::Counter { counter_offer_usd: counter };
    }
    BuyerResponse::Reject
}
