//! Negotiation session engine.
//!
//! One persistent session per episode: the seller acts up to `horizon` times;
//! the buyer model answers offers; terminal outcomes carry realized profit
//! (deal price minus implementation cost, zero for no-deals). Observations
//! are built from a seller-visible projection only — hidden traits never
//! enter an `Observation` by construction.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::buyer::{bundle_signals, respond, BundleSignals, BuyerConfig, BuyerResponse};
use crate::catalog::Bundle;
use crate::error::Error;
use crate::persona::{ObservableProfile, Persona};
use crate::policy::{ExchangeLog, InvalidKind, PolicyReply, SellerPolicy};
use crate::rng::substream;

/// Maximum number of seller decision rounds in the benchmark configuration.
pub const DEFAULT_HORIZON: u32 = 5;

/// Identifies an episode inside a run; buyer, bundle, and policy substreams
/// are derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeKey {
    pub master_seed: u64,
    pub episode_index: u64,
}

/// The seller's three-move grammar. Offer prices are real-valued; the
/// protocol rounds them to integer dollars at submission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum SellerAction {
    Offer { price_offer_usd: f64 },
    Accept,
    Walkaway,
}

/// Buyer response tag surfaced to the seller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseTag {
    Accept,
    Reject,
    Counter,
    Walkaway,
}

/// Seller-visible bundle summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedOptionView {
    pub key: String,
    pub dimension: String,
    pub msrp_delta_usd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleView {
    pub selected_options: Vec<SelectedOptionView>,
    pub selected_option_keys: Vec<String>,
    pub total_msrp_delta_usd: f64,
    pub estimated_implementation_cost_usd: f64,
    pub aesthetic_proxy_score: f64,
}

impl BundleView {
    fn of(bundle: &Bundle) -> BundleView {
        BundleView {
            selected_options: bundle
                .selected
                .iter()
                .map(|o| SelectedOptionView {
                    key: o.key.clone(),
                    dimension: o.dimension.clone(),
                    msrp_delta_usd: o.msrp_delta_usd,
                })
                .collect(),
            selected_option_keys: bundle.selected.iter().map(|o| o.key.clone()).collect(),
            total_msrp_delta_usd: bundle.total_msrp_delta_usd,
            estimated_implementation_cost_usd: bundle.implementation_cost_usd,
            aesthetic_proxy_score: bundle.aesthetic_proxy,
        }
    }
}

/// Everything the seller can see at a decision point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub round_idx: u32,
    /// Seller turns remaining after the current decision.
    pub remaining_rounds: u32,
    pub bundle: BundleView,
    pub buyer_observable_profile: ObservableProfile,
    pub last_agent_offer_usd: Option<i64>,
    pub last_consumer_response: Option<ResponseTag>,
    pub last_consumer_offer_usd: Option<i64>,
    pub history_len: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Deal,
    NoDeal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoDealReason {
    SellerWalkaway,
    BuyerWalkaway,
    Timeout,
    ParserInvalid,
    TransportFailure,
}

/// Terminal result of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub kind: OutcomeKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub deal_price_usd: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub no_deal_reason: Option<NoDealReason>,
    pub profit_usd: f64,
    pub rounds_used: u32,
}

impl Outcome {
    fn deal(price_usd: i64, implementation_cost_usd: f64, rounds_used: u32) -> Outcome {
        Outcome {
            kind: OutcomeKind::Deal,
            deal_price_usd: Some(price_usd),
            no_deal_reason: None,
            profit_usd: price_usd as f64 - implementation_cost_usd,
            rounds_used,
        }
    }

    fn no_deal(reason: NoDealReason, rounds_used: u32) -> Outcome {
        Outcome {
            kind: OutcomeKind::NoDeal,
            deal_price_usd: None,
            no_deal_reason: Some(reason),
            profit_usd: 0.0,
            rounds_used,
        }
    }

    pub fn is_deal(&self) -> bool {
        self.kind == OutcomeKind::Deal
    }
}

/// Record of an invalid policy output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvalidRecord {
    pub category: InvalidKind,
    pub raw_reply: String,
}

/// One seller decision and its consequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub round: u32,
    pub observation: Observation,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub action: Option<SellerAction>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub submitted_offer_usd: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub invalid: Option<InvalidRecord>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub unavailable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub buyer_response: Option<BuyerResponse>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exchange: Option<ExchangeLog>,
}

/// Seller-visible bundle descriptor stored in traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleDescriptor {
    pub options: Vec<SelectedOptionView>,
    pub total_msrp_delta_usd: f64,
    pub implementation_cost_usd: f64,
    pub aesthetic_proxy_score: f64,
}

/// One negotiation's trace: step log, flags, and terminal outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode_index: u64,
    pub persona_id: String,
    pub bundle: BundleDescriptor,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
    pub unavailable_action_count: u32,
}

/// Result of stepping a session.
#[derive(Debug, Clone, PartialEq)]
pub enum StepResult {
    Continue(Observation),
    Terminal(Outcome),
}

/// Optional trace metadata attached to a step by the policy layer.
#[derive(Debug, Clone, Default)]
pub struct StepMeta {
    pub reason: Option<String>,
    pub exchange: Option<ExchangeLog>,
}

/// A persistent negotiation session for one (persona, bundle) episode.
#[derive(Debug, Clone)]
pub struct Session {
    persona: Persona,
    bundle: Bundle,
    signals: BundleSignals,
    buyer_cfg: BuyerConfig,
    horizon: u32,
    episode: EpisodeKey,
    round_idx: u32,
    last_agent_offer_usd: Option<i64>,
    last_consumer_response: Option<ResponseTag>,
    last_consumer_offer_usd: Option<i64>,
    steps: Vec<StepRecord>,
    unavailable_action_count: u32,
    outcome: Option<Outcome>,
}

impl Session {
    pub fn new(
        persona: Persona,
        bundle: Bundle,
        buyer_cfg: BuyerConfig,
        horizon: u32,
        episode: EpisodeKey,
    ) -> Session {
        let signals = bundle_signals(&persona, &bundle);
        Session {
            persona,
            bundle,
            signals,
            buyer_cfg,
            horizon,
            episode,
            round_idx: 1,
            last_agent_offer_usd: None,
            last_consumer_response: None,
            last_consumer_offer_usd: None,
            steps: Vec::new(),
            unavailable_action_count: 0,
            outcome: None,
        }
    }

    pub fn observation(&self) -> Observation {
        Observation {
            round_idx: self.round_idx,
            remaining_rounds: self.horizon - self.round_idx,
            bundle: BundleView::of(&self.bundle),
            buyer_observable_profile: self.persona.observable,
            last_agent_offer_usd: self.last_agent_offer_usd,
            last_consumer_response: self.last_consumer_response,
            last_consumer_offer_usd: self.last_consumer_offer_usd,
            history_len: self.steps.len() as u32,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.outcome.is_some()
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        self.outcome.as_ref()
    }

    pub fn round_idx(&self) -> u32 {
        self.round_idx
    }

    fn buyer_rng(&self, round: u32) -> ChaCha8Rng {
        substream(self.episode.master_seed, "buyer", &[self.episode.episode_index, round as u64])
    }

    pub fn step(&mut self, action: SellerAction) -> Result<StepResult, Error> {
        self.step_with_meta(action, StepMeta::default())
    }

    /// Apply one seller action; `meta` carries trace-only annotations.
    pub fn step_with_meta(
        &mut self,
        action: SellerAction,
        meta: StepMeta,
    ) -> Result<StepResult, Error> {
        if self.is_terminal() {
            return Err(Error::usage("cannot step a terminal session"));
        }
        let t = self.round_idx;
        let mut step = StepRecord {
            round: t,
            observation: self.observation(),
            action: Some(action),
            submitted_offer_usd: None,
            invalid: None,
            unavailable: false,
            buyer_response: None,
            reason: meta.reason,
            exchange: meta.exchange,
        };
        match action {
            SellerAction::Offer { price_offer_usd } => {
                if !price_offer_usd.is_finite() || price_offer_usd < 0.0 {
                    return Err(Error::usage(
                        "offer price must be a finite non-negative value",
                    ));
                }
                let submitted = price_offer_usd.round() as i64;
                step.submitted_offer_usd = Some(submitted);
                let mut rng = self.buyer_rng(t);
                let response =
                    respond(&self.persona.hidden, &self.signals, t, submitted, &self.buyer_cfg, &mut rng);
                step.buyer_response = Some(response);
                self.steps.push(step);
                match response {
                    BuyerResponse::Accept => {
                        Ok(self.finish(Outcome::deal(submitted, self.bundle.implementation_cost_usd, t)))
                    }
                    BuyerResponse::Walkaway => {
                        Ok(self.finish(Outcome::no_deal(NoDealReason::BuyerWalkaway, t)))
                    }
                    BuyerResponse::Reject => {
                        self.last_agent_offer_usd = Some(submitted);
                        self.last_consumer_response = Some(ResponseTag::Reject);
                        Ok(self.advance_or_timeout(t))
                    }
                    BuyerResponse::Counter { counter_offer_usd } => {
                        self.last_agent_offer_usd = Some(submitted);
                        self.last_consumer_response = Some(ResponseTag::Counter);
                        self.last_consumer_offer_usd = Some(counter_offer_usd);
                        Ok(self.advance_or_timeout(t))
                    }
                }
            }
            SellerAction::Accept => match self.last_consumer_offer_usd {
                Some(counter) => {
                    self.steps.push(step);
                    Ok(self.finish(Outcome::deal(counter, self.bundle.implementation_cost_usd, t)))
                }
                None => {
                    // No standing counter: an unavailable environment step.
                    // The round is consumed with no buyer interaction.
                    step.unavailable = true;
                    self.unavailable_action_count += 1;
                    self.steps.push(step);
                    Ok(self.advance_or_timeout(t))
                }
            },
            SellerAction::Walkaway => {
                self.steps.push(step);
                Ok(self.finish(Outcome::no_deal(NoDealReason::SellerWalkaway, t)))
            }
        }
    }

    /// Terminate with a parser-invalid policy output.
    pub fn terminate_invalid(
        &mut self,
        category: InvalidKind,
        raw_reply: String,
        exchange: Option<ExchangeLog>,
    ) -> Result<Outcome, Error> {
        if self.is_terminal() {
            return Err(Error::usage("cannot step a terminal session"));
        }
        let t = self.round_idx;
        self.steps.push(StepRecord {
            round: t,
            observation: self.observation(),
            action: None,
            submitted_offer_usd: None,
            invalid: Some(InvalidRecord { category, raw_reply }),
            unavailable: false,
            buyer_response: None,
            reason: None,
            exchange,
        });
        let StepResult::Terminal(outcome) =
            self.finish(Outcome::no_deal(NoDealReason::ParserInvalid, t))
        else {
            unreachable!("finish always returns Terminal");
        };
        Ok(outcome)
    }

    /// Terminate after the policy transport layer exhausted its retries.
    pub fn terminate_transport(
        &mut self,
        error: String,
        exchange: Option<ExchangeLog>,
    ) -> Result<Outcome, Error> {
        if self.is_terminal() {
            return Err(Error::usage("cannot step a terminal session"));
        }
        let t = self.round_idx;
        self.steps.push(StepRecord {
            round: t,
            observation: self.observation(),
            action: None,
            submitted_offer_usd: None,
            invalid: None,
            unavailable: false,
            buyer_response: None,
            reason: Some(error),
            exchange,
        });
        let StepResult::Terminal(outcome) =
            self.finish(Outcome::no_deal(NoDealReason::TransportFailure, t))
        else {
            unreachable!("finish always returns Terminal");
        };
        Ok(outcome)
    }

    fn advance_or_timeout(&mut self, t: u32) -> StepResult {
        if t >= self.horizon {
            self.finish(Outcome::no_deal(NoDealReason::Timeout, t))
        } else {
            self.round_idx = t + 1;
            StepResult::Continue(self.observation())
        }
    }

    fn finish(&mut self, outcome: Outcome) -> StepResult {
        self.outcome = Some(outcome.clone());
        StepResult::Terminal(outcome)
    }

    /// Consume the session into an episode record.
    pub fn into_record(self) -> EpisodeRecord {
        let outcome = self.outcome.expect("session must be terminal");
        EpisodeRecord {
            episode_index: self.episode.episode_index,
            persona_id: self.persona.id.clone(),
            bundle: BundleDescriptor {
                options: BundleView::of(&self.bundle).selected_options,
                total_msrp_delta_usd: self.bundle.total_msrp_delta_usd,
                implementation_cost_usd: self.bundle.implementation_cost_usd,
                aesthetic_proxy_score: self.bundle.aesthetic_proxy,
            },
            steps: self.steps,
            outcome,
            unavailable_action_count: self.unavailable_action_count,
        }
    }
}

/// Run one full episode under a policy.
pub fn run_episode(
    policy: &dyn SellerPolicy,
    persona: &Persona,
    bundle: &Bundle,
    buyer_cfg: &BuyerConfig,
    horizon: u32,
    episode: EpisodeKey,
) -> Result<EpisodeRecord, Error> {
    let mut session =
        Session::new(persona.clone(), bundle.clone(), buyer_cfg.clone(), horizon, episode);
    let mut policy_rng = substream(episode.master_seed, "policy", &[episode.episode_index]);
    loop {
        let obs = session.observation();
        match policy.decide(&obs, &mut policy_rng) {
            PolicyReply::Action { action, reason, exchange } => {
                match session.step_with_meta(action, StepMeta { reason, exchange })? {
                    StepResult::Continue(_) => continue,
                    StepResult::Terminal(_) => break,
                }
            }
            PolicyReply::Invalid { category, raw_reply, exchange } => {
                session.terminate_invalid(category, raw_reply, exchange)?;
                break;
            }
            PolicyReply::Transport { error, exchange } => {
                session.terminate_transport(error, exchange)?;
                break;
            }
        }
    }
    Ok(session.into_record())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{sample_bundle, Catalog};
    use crate::persona::generate_bank;
    use crate::policy::InvalidKind;

    fn fixture() -> (Persona, Bundle) {
        let bank = generate_bank(4, 123, false).unwrap();
        let catalog = Catalog::builtin_default();
        let mut rng = substream(123, "bundle", &[0]);
        let bundle = sample_bundle(&catalog, &mut rng);
        (bank.records[0].clone(), bundle)
    }

    fn new_session() -> Session {
        let (persona, bundle) = fixture();
        Session::new(
            persona,
            bundle,
            BuyerConfig::default(),
            DEFAULT_HORIZON,
            EpisodeKey { master_seed: 123, episode_index: 0 },
        )
    }

    #[test]
    fn fresh_session_observation() {
        let session = new_session();
        let obs = session.observation();
        assert_eq!(obs.round_idx, 1);
        assert_eq!(obs.remaining_rounds, 4);
        assert_eq!(obs.history_len, 0);
        assert!(obs.last_agent_offer_usd.is_none());
        assert!(obs.last_consumer_response.is_none());
        assert!(obs.last_consumer_offer_usd.is_none());
    }

    #[test]
    fn observation_exposes_no_hidden_keys() {
        let hidden_json =
            serde_json::to_value(&generate_bank(1, 1, false).unwrap().records[0].hidden).unwrap();
        let mut hidden_keys = std::collections::BTreeSet::new();
        collect_keys(&hidden_json, &mut hidden_keys);

        // Schema-diff every observation emitted across a full episode
        // (walkaway disabled so the session reaches the horizon).
        let (persona, bundle) = fixture();
        let cfg = BuyerConfig { walk_prob_cap: 0.0, ..BuyerConfig::default() };
        let mut session = Session::new(
            persona,
            bundle,
            cfg,
            DEFAULT_HORIZON,
            EpisodeKey { master_seed: 123, episode_index: 0 },
        );
        let mut observations = vec![session.observation()];
        loop {
            let offer = SellerAction::Offer { price_offer_usd: 200_000.0 };
            match session.step(offer).unwrap() {
                StepResult::Continue(obs) => observations.push(obs),
                StepResult::Terminal(_) => break,
            }
        }
        assert!(observations.len() > 1);
        for obs in observations {
            let obs_json = serde_json::to_value(&obs).unwrap();
            let mut obs_keys = std::collections::BTreeSet::new();
            collect_keys(&obs_json, &mut obs_keys);
            let overlap: Vec<&String> = obs_keys.intersection(&hidden_keys).collect();
            assert!(overlap.is_empty(), "hidden keys leaked: {overlap:?}");
        }
    }

    fn collect_keys(v: &serde_json::Value, out: &mut std::collections::BTreeSet<String>) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    out.insert(k.clone());
                    collect_keys(v, out);
                }
            }
            serde_json::Value::Array(items) => {
                for item in items {
                    collect_keys(item, out);
                }
            }
            _ => {}
        }
    }

    #[test]
    fn lowball_offer_deals_at_round_one() {
        let mut session = new_session();
        let result = session.step(SellerAction::Offer { price_offer_usd: 1_000.0 }).unwrap();
        let StepResult::Terminal(outcome) = result else { panic!("expected terminal") };
        assert!(outcome.is_deal());
        assert_eq!(outcome.deal_price_usd, Some(1_000));
        assert_eq!(outcome.rounds_used, 1);
        let cost = session.outcome().unwrap().deal_price_usd.unwrap() as f64 - outcome.profit_usd;
        assert!((cost - new_session().bundle.implementation_cost_usd).abs() < 1e-9);
    }

    #[test]
    fn profit_arithmetic() {
        let outcome = Outcome::deal(5_200, 4_000.0, 1);
        assert_eq!(outcome.profit_usd, 1_200.0);
        let below_cost = Outcome::deal(3_000, 4_000.0, 1);
        assert_eq!(below_cost.profit_usd, -1_000.0);
    }

    #[test]
    fn five_rejections_time_out() {
        // An offer so high the buyer never accepts, with walkaway disabled so
        // the session always continues.
        let (persona, bundle) = fixture();
        let cfg = BuyerConfig { walk_prob_cap: 0.0, counter_prob: 0.0, ..BuyerConfig::default() };
        let mut session = Session::new(
            persona,
            bundle,
            cfg,
            DEFAULT_HORIZON,
            EpisodeKey { master_seed: 9, episode_index: 0 },
        );
        for round in 1..=5u32 {
            assert_eq!(session.round_idx(), round);
            let result = session.step(SellerAction::Offer { price_offer_usd: 500_000.0 }).unwrap();
            match result {
                StepResult::Continue(obs) => {
                    assert!(round < 5);
                    assert_eq!(obs.round_idx, round + 1);
                    assert_eq!(obs.last_agent_offer_usd, Some(500_000));
                    assert_eq!(obs.last_consumer_response, Some(ResponseTag::Reject));
                }
                StepResult::Terminal(outcome) => {
                    assert_eq!(round, 5);
                    assert_eq!(outcome.no_deal_reason, Some(NoDealReason::Timeout));
                    assert_eq!(outcome.rounds_used, 5);
                    assert_eq!(outcome.profit_usd, 0.0);
                }
            }
        }
        assert!(session.is_terminal());
    }

    #[test]
    fn accept_without_counter_is_unavailable_not_invalid() {
        let mut session = new_session();
        let result = session.step(SellerAction::Accept).unwrap();
        let StepResult::Continue(obs) = result else { panic!("episode should continue") };
        assert_eq!(obs.round_idx, 2);
        assert_eq!(obs.history_len, 1);
        let record_steps = session.steps.clone();
        assert!(record_steps[0].unavailable);
        // Four more unavailable accepts exhaust the horizon.
        for _ in 0..4 {
            let r = session.step(SellerAction::Accept).unwrap();
            if let StepResult::Terminal(outcome) = r {
                assert_eq!(outcome.no_deal_reason, Some(NoDealReason::Timeout));
            }
        }
        let record = session.into_record();
        assert_eq!(record.unavailable_action_count, 5);
        assert_eq!(record.outcome.no_deal_reason, Some(NoDealReason::Timeout));
    }

    #[test]
    fn accept_with_standing_counter_deals_at_counter() {
        // Drive sessions until one yields a counter, then accept it.
        for ix in 0..50u64 {
            let (persona, bundle) = fixture();
            let mut session = Session::new(
                persona,
                bundle,
                BuyerConfig::default(),
                DEFAULT_HORIZON,
                EpisodeKey { master_seed: 123, episode_index: ix },
            );
            let result = session.step(SellerAction::Offer { price_offer_usd: 40_000.0 }).unwrap();
            if let StepResult::Continue(obs) = result {
                if let Some(counter) = obs.last_consumer_offer_usd {
                    let StepResult::Terminal(outcome) = session.step(SellerAction::Accept).unwrap()
                    else {
                        panic!("accept with counter must terminate");
                    };
                    assert!(outcome.is_deal());
                    assert_eq!(outcome.deal_price_usd, Some(counter));
                    assert_eq!(outcome.rounds_used, 2);
                    return;
                }
            }
        }
        panic!("no counter observed in 50 attempts");
    }

    #[test]
    fn seller_walkaway_terminates() {
        let mut session = new_session();
        let StepResult::Terminal(outcome) = session.step(SellerAction::Walkaway).unwrap() else {
            panic!("walkaway must terminate");
        };
        assert_eq!(outcome.no_deal_reason, Some(NoDealReason::SellerWalkaway));
        assert_eq!(outcome.rounds_used, 1);
        assert_eq!(outcome.profit_usd, 0.0);
    }

    #[test]
    fn stepping_terminal_session_is_usage_error() {
        let mut session = new_session();
        session.step(SellerAction::Walkaway).unwrap();
        let err = session.step(SellerAction::Walkaway).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn invalid_termination_records_category() {
        let mut session = new_session();
        let outcome = session
            .terminate_invalid(InvalidKind::MalformedJson, "not json".into(), None)
            .unwrap();
        assert_eq!(outcome.no_deal_reason, Some(NoDealReason::ParserInvalid));
        assert_eq!(outcome.rounds_used, 1);
        let record = session.into_record();
        assert_eq!(record.steps.len(), 1);
        assert_eq!(record.steps[0].invalid.as_ref().unwrap().category, InvalidKind::MalformedJson);
    }

    #[test]
    fn offer_must_be_finite_and_non_negative() {
        let mut session = new_session();
        assert!(session.step(SellerAction::Offer { price_offer_usd: f64::NAN }).is_err());
        assert!(session.step(SellerAction::Offer { price_offer_usd: -1.0 }).is_err());
    }

    #[test]
    fn episode_record_is_reproducible() {
        struct Scripted;
        impl SellerPolicy for Scripted {
            fn name(&self) -> &'static str {
                "scripted"
            }
            fn decide(&self, obs: &Observation, _rng: &mut ChaCha8Rng) -> PolicyReply {
                PolicyReply::action(SellerAction::Offer {
                    price_offer_usd: 30_000.0 - 4_000.0 * obs.round_idx as f64,
                })
            }
        }
        let (persona, bundle) = fixture();
        let key = EpisodeKey { master_seed: 55, episode_index: 3 };
        let a = run_episode(&Scripted, &persona, &bundle, &BuyerConfig::default(), 5, key).unwrap();
        let b = run_episode(&Scripted, &persona, &bundle, &BuyerConfig::default(), 5, key).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
