//! Non-learned reference policies.
//!
//! Both read the shared offer bounds `[L, U]` computed from the catalog at
//! startup, never per episode, and clip every emitted offer into them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::catalog::OfferBounds;
use crate::engine::{Observation, SellerAction};
use crate::error::Error;
use crate::policy::{PolicyReply, SellerPolicy};

/// Parameters of the random reference policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomPolicyParams {
    pub p_accept_counter: f64,
    pub p_walkaway: f64,
    pub bounds: OfferBounds,
}

impl RandomPolicyParams {
    pub fn new(bounds: OfferBounds) -> RandomPolicyParams {
        RandomPolicyParams { p_accept_counter: 0.12, p_walkaway: 0.08, bounds }
    }
}

/// Accepts an available counter with a fixed probability, otherwise walks
/// away with a fixed probability, otherwise offers uniformly in `[L, U]`.
/// The walkaway check runs unconditionally after a declined accept check.
pub struct RandomPolicy {
    params: RandomPolicyParams,
}

impl RandomPolicy {
    pub fn new(params: RandomPolicyParams) -> Result<RandomPolicy, Error> {
        for (name, p) in [
            ("p_accept_counter", params.p_accept_counter),
            ("p_walkaway", params.p_walkaway),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(format!("{name} must be a probability, got {p}")));
            }
        }
        Ok(RandomPolicy { params })
    }
}

impl SellerPolicy for RandomPolicy {
    fn name(&self) -> &'static str {
        "random"
    }

    fn decide(&self, obs: &Observation, rng: &mut ChaCha8Rng) -> PolicyReply {
        if obs.last_consumer_offer_usd.is_some()
            && rng.random::<f64>() < self.params.p_accept_counter
        {
            return PolicyReply::action(SellerAction::Accept);
        }
        if rng.random::<f64>() < self.params.p_walkaway {
            return PolicyReply::action(SellerAction::Walkaway);
        }
        let b = &self.params.bounds;
        let price = b.lower_usd + rng.random::<f64>() * (b.upper_usd - b.lower_usd);
        PolicyReply::action(SellerAction::Offer { price_offer_usd: price })
    }
}

/// Parameters of the linear-concession policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcessionParams {
    pub anchor_mult: f64,
    pub floor_mult: f64,
    pub min_spread_usd: f64,
    pub noise_sigma_usd: f64,
    pub blend_target: f64,
    pub blend_counter: f64,
    pub counter_bump_usd: f64,
    pub bounds: OfferBounds,
}

impl ConcessionParams {
    pub fn new(bounds: OfferBounds) -> ConcessionParams {
        ConcessionParams {
            anchor_mult: 2.20,
            floor_mult: 1.10,
            min_spread_usd: 200.0,
            noise_sigma_usd: 100.0,
            blend_target: 0.62,
            blend_counter: 0.38,
            counter_bump_usd: 120.0,
            bounds,
        }
    }
}

/// Anchors high, concedes linearly toward a floor across the horizon, blends
/// toward standing counters, and accepts a counter only in the final round
/// and only at or above the floor.
pub struct ConcessionPolicy {
    params: ConcessionParams,
}

impl ConcessionPolicy {
    pub fn new(params: ConcessionParams) -> Result<ConcessionPolicy, Error> {
        if !(params.anchor_mult > params.floor_mult && params.floor_mult > 1.0) {
            return Err(Error::validation("require anchor_mult > floor_mult > 1"));
        }
        if (params.blend_target + params.blend_counter - 1.0).abs() > 1e-9 {
            return Err(Error::validation("blend weights must sum to 1"));
        }
        Ok(ConcessionPolicy { params })
    }

    /// Floor, anchor, and the round-`r` schedule target (noise excluded).
    pub fn schedule(&self, m: f64, r: u32, total_rounds: u32) -> (f64, f64, f64) {
        let p = &self.params;
        let floor = f64::max(p.bounds.lower_usd, p.floor_mult * m);
        let anchor = f64::min(
            p.bounds.upper_usd,
            f64::max(floor + p.min_spread_usd, p.anchor_mult * m),
        );
        let frac = (r as f64 - 1.0) / f64::max(1.0, total_rounds as f64 - 1.0);
        (floor, anchor, anchor + (floor - anchor) * frac)
    }
}

impl SellerPolicy for ConcessionPolicy {
    fn name(&self) -> &'static str {
        "concession"
    }

    fn decide(&self, obs: &Observation, rng: &mut ChaCha8Rng) -> PolicyReply {
        let p = &self.params;
        let m = obs.bundle.total_msrp_delta_usd;
        let r = obs.round_idx;
        // remaining_rounds counts turns after this one, so the last decision
        // round is r + remaining_rounds.
        let total_rounds = r + obs.remaining_rounds;
        let final_round = obs.remaining_rounds == 0;
        let (floor, _anchor, target) = self.schedule(m, r, total_rounds);
        let noise = Normal::new(0.0, p.noise_sigma_usd).expect("valid normal").sample(rng);
        let target = target + noise;
        let price = match obs.last_consumer_offer_usd {
            Some(counter) => {
                let counter = counter as f64;
                if final_round && counter >= floor {
                    return PolicyReply::action(SellerAction::Accept);
                }
                f64::max(counter + p.counter_bump_usd, p.blend_target * target + p.blend_counter * counter)
            }
            None => target,
        };
        let price = price.clamp(p.bounds.lower_usd, p.bounds.upper_usd);
        PolicyReply::action(SellerAction::Offer { price_offer_usd: price })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{offer_bounds, Catalog};
    use crate::engine::{EpisodeKey, ResponseTag, Session};
    use crate::rng::substream;

    fn bounds() -> OfferBounds {
        offer_bounds(&Catalog::builtin_default())
    }

    fn observation(
        round_idx: u32,
        remaining: u32,
        m: f64,
        counter: Option<i64>,
    ) -> Observation {
        let catalog = Catalog::builtin_default();
        let mut rng = substream(1, "bundle", &[0]);
        let bundle = crate::catalog::sample_bundle(&catalog, &mut rng);
        let persona = crate::persona::generate_bank(1, 1, false).unwrap().records[0].clone();
        let session = Session::new(
            persona,
            bundle,
            crate::buyer::BuyerConfig::default(),
            5,
            EpisodeKey { master_seed: 1, episode_index: 0 },
        );
        let mut obs = session.observation();
        obs.round_idx = round_idx;
        obs.remaining_rounds = remaining;
        obs.bundle.total_msrp_delta_usd = m;
        obs.last_consumer_offer_usd = counter;
        if counter.is_some() {
            obs.last_consumer_response = Some(ResponseTag::Counter);
            obs.last_agent_offer_usd = Some(50_000);
        }
        obs
    }

    fn zero_noise_concession() -> ConcessionPolicy {
        let params = ConcessionParams { noise_sigma_usd: 0.0, ..ConcessionParams::new(bounds()) };
        ConcessionPolicy::new(params).unwrap()
    }

    fn offered_price(reply: PolicyReply) -> f64 {
        match reply {
            PolicyReply::Action { action: SellerAction::Offer { price_offer_usd }, .. } => {
                price_offer_usd
            }
            other => panic!("expected offer, got {other:?}"),
        }
    }

    #[test]
    fn random_never_accepts_without_counter() {
        let policy = RandomPolicy::new(RandomPolicyParams::new(bounds())).unwrap();
        let obs = observation(1, 4, 10_000.0, None);
        let mut rng = substream(0, "policy", &[0]);
        for _ in 0..5_000 {
            match policy.decide(&obs, &mut rng) {
                PolicyReply::Action { action: SellerAction::Accept, .. } => {
                    panic!("accept without a counter")
                }
                _ => {}
            }
        }
    }

    #[test]
    fn random_marginals_and_offer_range() {
        let policy = RandomPolicy::new(RandomPolicyParams::new(bounds())).unwrap();
        let obs = observation(1, 4, 10_000.0, None);
        let mut rng = substream(1, "policy", &[0]);
        let n = 100_000;
        let mut walks = 0u64;
        let mut offers = Vec::new();
        for _ in 0..n {
            match policy.decide(&obs, &mut rng) {
                PolicyReply::Action { action: SellerAction::Walkaway, .. } => walks += 1,
                PolicyReply::Action { action: SellerAction::Offer { price_offer_usd }, .. } => {
                    offers.push(price_offer_usd)
                }
                _ => panic!("unexpected reply"),
            }
        }
        let walk_freq = walks as f64 / n as f64;
        assert!((walk_freq - 0.08).abs() < 0.005, "walk freq {walk_freq}");
        let b = bounds();
        let min = offers.iter().copied().fold(f64::INFINITY, f64::min);
        let max = offers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = offers.iter().sum::<f64>() / offers.len() as f64;
        let mid = (b.lower_usd + b.upper_usd) / 2.0;
        assert!(min >= b.lower_usd);
        assert!(max <= b.upper_usd);
        assert!((mean - mid).abs() / mid < 0.01, "mean {mean} vs {mid}");
    }

    #[test]
    fn random_counter_acceptance_rate() {
        let policy = RandomPolicy::new(RandomPolicyParams::new(bounds())).unwrap();
        let obs = observation(2, 3, 10_000.0, Some(9_000));
        let mut rng = substream(2, "policy", &[0]);
        let n = 100_000;
        let mut accepts = 0u64;
        for _ in 0..n {
            if let PolicyReply::Action { action: SellerAction::Accept, .. } =
                policy.decide(&obs, &mut rng)
            {
                accepts += 1;
            }
        }
        let freq = accepts as f64 / n as f64;
        assert!((freq - 0.12).abs() < 0.005, "accept freq {freq}");
    }

    #[test]
    fn concession_schedule_endpoints() {
        let policy = zero_noise_concession();
        // m = 10,000: floor 11,000, anchor 22,000.
        let (floor, anchor, p1) = policy.schedule(10_000.0, 1, 5);
        assert_eq!(floor, 11_000.0);
        assert_eq!(anchor, 22_000.0);
        assert_eq!(p1, 22_000.0);
        let (_, _, p5) = policy.schedule(10_000.0, 5, 5);
        assert_eq!(p5, 11_000.0);

        let mut rng = substream(3, "policy", &[0]);
        let got1 = offered_price(policy.decide(&observation(1, 4, 10_000.0, None), &mut rng));
        assert_eq!(got1, 22_000.0);
        let got5 = offered_price(policy.decide(&observation(5, 0, 10_000.0, None), &mut rng));
        assert_eq!(got5, 11_000.0);
    }

    #[test]
    fn concession_schedule_is_affine_and_non_increasing() {
        let policy = zero_noise_concession();
        let mut prev = f64::INFINITY;
        let mut diffs = Vec::new();
        for r in 1..=5 {
            let (_, _, p) = policy.schedule(10_000.0, r, 5);
            assert!(p <= prev);
            if prev.is_finite() {
                diffs.push(prev - p);
            }
            prev = p;
        }
        for d in &diffs {
            assert!((d - diffs[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn concession_accepts_final_round_counter_at_or_above_floor() {
        let policy = zero_noise_concession();
        let mut rng = substream(4, "policy", &[0]);
        // Final round, counter above the 11,000 floor.
        let reply = policy.decide(&observation(5, 0, 10_000.0, Some(11_500)), &mut rng);
        assert!(matches!(reply, PolicyReply::Action { action: SellerAction::Accept, .. }));
        // Below the floor: no acceptance.
        let reply = policy.decide(&observation(5, 0, 10_000.0, Some(10_900)), &mut rng);
        assert!(matches!(reply, PolicyReply::Action { action: SellerAction::Offer { .. }, .. }));
        // Before the final round: never accept even above floor.
        let reply = policy.decide(&observation(3, 2, 10_000.0, Some(15_000)), &mut rng);
        assert!(matches!(reply, PolicyReply::Action { action: SellerAction::Offer { .. }, .. }));
    }

    #[test]
    fn concession_counter_blend() {
        let policy = zero_noise_concession();
        let mut rng = substream(5, "policy", &[0]);
        // r=2 of 5, m=10,000: target = 22000 - 2750 = 19,250.
        // blend = 0.62*19250 + 0.38*15000 = 17,635 > counter + 120.
        let got = offered_price(policy.decide(&observation(2, 3, 10_000.0, Some(15_000)), &mut rng));
        assert!((got - 17_635.0).abs() < 1e-9);
        // A counter close to the blend forces the +120 bump to win.
        let got = offered_price(policy.decide(&observation(2, 3, 10_000.0, Some(19_240)), &mut rng));
        assert!((got - 19_360.0).abs() < 1e-9);
    }

    #[test]
    fn all_offers_clipped_into_bounds() {
        let b = bounds();
        let random = RandomPolicy::new(RandomPolicyParams::new(b)).unwrap();
        let concession =
            ConcessionPolicy::new(ConcessionParams::new(b)).unwrap();
        let mut rng = substream(6, "policy", &[0]);
        for i in 0..20_000u64 {
            let m = 100.0 + (i % 40) as f64 * 1_000.0;
            let counter = if i % 3 == 0 { Some(500 + (i % 50_000) as i64) } else { None };
            let obs = observation(1 + (i % 5) as u32, 4 - (i % 5) as u32, m, counter);
            for reply in [random.decide(&obs, &mut rng), concession.decide(&obs, &mut rng)] {
                if let PolicyReply::Action {
                    action: SellerAction::Offer { price_offer_usd }, ..
                } = reply
                {
                    assert!(
                        (b.lower_usd..=b.upper_usd).contains(&price_offer_usd),
                        "offer {price_offer_usd} outside bounds"
                    );
                }
            }
        }
    }
}
