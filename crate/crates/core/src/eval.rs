//! Benchmark runner, episode metrics, and bootstrap confidence intervals.
//!
//! A run pins the episode stream: episode `i` pairs persona `i` of the bank
//! with a bundle drawn from the `("bundle", [i])` substream, and every buyer
//! draw comes from `("buyer", [i, t])`. Policies only influence outcomes
//! through their actions, so two policies under one config face the identical
//! (persona, bundle, buyer-noise) sequence.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::buyer::BuyerConfig;
use crate::catalog::{sample_bundle, Catalog};
use crate::engine::{run_episode, EpisodeKey, EpisodeRecord, NoDealReason};
use crate::error::Error;
use crate::persona::PersonaBank;
use crate::policy::SellerPolicy;
use crate::rng::{seeded, substream};
use crate::trace::{resume_point, TraceHeader, TraceWriter};

/// Settings for one benchmark run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSettings {
    pub episodes: u64,
    pub master_seed: u64,
    pub horizon: u32,
    pub concurrency: usize,
    /// Abort (exit code 3) once this many episodes end in transport failure.
    pub transport_failure_budget: u64,
    /// Trace output; in-memory only when absent.
    pub out: Option<PathBuf>,
    /// Continue an interrupted run from its last complete episode.
    pub resume: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            episodes: 7_500,
            master_seed: 123,
            horizon: 5,
            concurrency: 1,
            transport_failure_budget: 25,
            out: None,
            resume: false,
        }
    }
}

fn run_one(
    policy: &dyn SellerPolicy,
    catalog: &Catalog,
    bank: &PersonaBank,
    buyer_cfg: &BuyerConfig,
    settings: &RunSettings,
    index: u64,
) -> Result<EpisodeRecord, Error> {
    let persona = &bank.records[index as usize];
    let mut bundle_rng = substream(settings.master_seed, "bundle", &[index]);
    let bundle = sample_bundle(catalog, &mut bundle_rng);
    run_episode(
        policy,
        persona,
        &bundle,
        buyer_cfg,
        settings.horizon,
        EpisodeKey { master_seed: settings.master_seed, episode_index: index },
    )
}

/// Run the frozen episode stream under a policy, appending records to the
/// trace file (when configured) in episode order.
pub fn run_benchmark(
    policy: &dyn SellerPolicy,
    catalog: &Catalog,
    bank: &PersonaBank,
    buyer_cfg: &BuyerConfig,
    settings: &RunSettings,
) -> Result<Vec<EpisodeRecord>, Error> {
    if settings.horizon < 1 {
        return Err(Error::validation("horizon must be at least 1"));
    }
    if settings.episodes as usize > bank.len() {
        return Err(Error::validation(format!(
            "requested {} episodes but the bank holds {} personas",
            settings.episodes,
            bank.len()
        )));
    }

    let header =
        TraceHeader::new(policy.name(), settings.master_seed, settings.episodes, settings.horizon);
    let mut start_index = 0u64;
    let mut writer = match &settings.out {
        Some(path) => {
            if settings.resume && path.exists() {
                let (existing, complete) = resume_point(path)?;
                if existing != header {
                    return Err(Error::validation(
                        "trace file was produced by a different run configuration; \
                         refusing to resume",
                    ));
                }
                start_index = complete.min(settings.episodes);
                Some(TraceWriter::append(path)?)
            } else {
                Some(TraceWriter::create(path, &header)?)
            }
        }
        None => None,
    };

    let mut records: Vec<EpisodeRecord> = Vec::with_capacity(settings.episodes as usize);
    let mut transport_failures = 0u64;

    let mut handle = |record: EpisodeRecord, writer: &mut Option<TraceWriter>| -> Result<(), Error> {
        if record.outcome.no_deal_reason == Some(NoDealReason::TransportFailure) {
            transport_failures += 1;
        }
        if let Some(w) = writer.as_mut() {
            w.write_record(&record)?;
        }
        records.push(record);
        if transport_failures > settings.transport_failure_budget {
            return Err(Error::TransportBudget {
                failures: transport_failures,
                budget: settings.transport_failure_budget,
            });
        }
        Ok(())
    };

    if settings.concurrency <= 1 {
        for index in start_index..settings.episodes {
            let record = run_one(policy, catalog, bank, buyer_cfg, settings, index)?;
            handle(record, &mut writer)?;
        }
    } else {
        let next = AtomicU64::new(start_index);
        let stop = AtomicBool::new(false);
        let (tx, rx) = mpsc::channel::<Result<EpisodeRecord, Error>>();
        let result: Result<(), Error> = std::thread::scope(|scope| {
            for _ in 0..settings.concurrency {
                let tx = tx.clone();
                let next = &next;
                let stop = &stop;
                scope.spawn(move || {
                    loop {
                        if stop.load(Ordering::Relaxed) {
                            break;
                        }
                        let index = next.fetch_add(1, Ordering::Relaxed);
                        if index >= settings.episodes {
                            break;
                        }
                        let record = run_one(policy, catalog, bank, buyer_cfg, settings, index);
                        if tx.send(record).is_err() {
                            break;
                        }
                    }
                });
            }
            drop(tx);
            // Reorder buffer: emit records strictly by episode index.
            let mut pending = std::collections::BTreeMap::new();
            let mut want = start_index;
            for incoming in rx {
                let record = match incoming {
                    Ok(r) => r,
                    Err(e) => {
                        stop.store(true, Ordering::Relaxed);
                        return Err(e);
                    }
                };
                pending.insert(record.episode_index, record);
                while let Some(record) = pending.remove(&want) {
                    if let Err(e) = handle(record, &mut writer) {
                        stop.store(true, Ordering::Relaxed);
                        return Err(e);
                    }
                    want += 1;
                }
            }
            Ok(())
        });
        result?;
    }
    Ok(records)
}

/// Aggregate benchmark metrics over one run's episode records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub episodes: u64,
    pub deal_rate: f64,
    /// Mean realized profit over all episodes (no-deal episodes contribute 0).
    pub avg_profit_usd: f64,
    /// Total realized profit divided by the exact deal count; absent when no
    /// episode dealt.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub profit_per_deal_usd: Option<f64>,
    pub avg_rounds: f64,
    /// Fraction of episodes terminated by a parser-invalid policy output.
    /// Transport failures are excluded and reported separately.
    pub invalid_rate: f64,
    pub one_round_fraction: f64,
    pub unavailable_action_total: u64,
    pub transport_failure_count: u64,
}

/// Compute the summary metrics for a set of episode records.
pub fn summarize(records: &[EpisodeRecord]) -> Result<MetricsSummary, Error> {
    if records.is_empty() {
        return Err(Error::validation("cannot summarize zero episodes"));
    }
    let n = records.len() as f64;
    let deal_count = records.iter().filter(|r| r.outcome.is_deal()).count() as f64;
    let total_profit: f64 = records.iter().map(|r| r.outcome.profit_usd).sum();
    let invalid = records
        .iter()
        .filter(|r| r.outcome.no_deal_reason == Some(NoDealReason::ParserInvalid))
        .count() as f64;
    let transport = records
        .iter()
        .filter(|r| r.outcome.no_deal_reason == Some(NoDealReason::TransportFailure))
        .count() as u64;
    Ok(MetricsSummary {
        episodes: records.len() as u64,
        deal_rate: deal_count / n,
        avg_profit_usd: total_profit / n,
        profit_per_deal_usd: if deal_count > 0.0 { Some(total_profit / deal_count) } else { None },
        avg_rounds: records.iter().map(|r| r.outcome.rounds_used as f64).sum::<f64>() / n,
        invalid_rate: invalid / n,
        one_round_fraction: records.iter().filter(|r| r.outcome.rounds_used == 1).count() as f64
            / n,
        unavailable_action_total: records
            .iter()
            .map(|r| r.unavailable_action_count as u64)
            .sum(),
        transport_failure_count: transport,
    })
}

/// Metrics that support bootstrap intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    DealRate,
    AvgProfit,
    AvgRounds,
    InvalidRate,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::DealRate => "deal_rate",
            Metric::AvgProfit => "avg_profit_usd",
            Metric::AvgRounds => "avg_rounds",
            Metric::InvalidRate => "invalid_rate",
        }
    }

    fn per_episode(self, record: &EpisodeRecord) -> f64 {
        match self {
            Metric::DealRate => {
                if record.outcome.is_deal() {
                    1.0
                } else {
                    0.0
                }
            }
            Metric::AvgProfit => record.outcome.profit_usd,
            Metric::AvgRounds => record.outcome.rounds_used as f64,
            Metric::InvalidRate => {
                if record.outcome.no_deal_reason == Some(NoDealReason::ParserInvalid) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Percentile bootstrap settings; the defaults are the benchmark-grade
/// configuration (10,000 resamples, seed 20260511, 95% level).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSettings {
    pub resamples: u32,
    pub seed: u64,
    pub level: f64,
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        BootstrapSettings { resamples: 10_000, seed: 20_260_511, level: 0.95 }
    }
}

/// Percentile confidence interval for one metric, resampled at episode level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapInterval {
    pub metric: Metric,
    pub lower: f64,
    pub upper: f64,
    pub resamples: u32,
    pub seed: u64,
    pub level: f64,
    pub method: String,
    pub unit: String,
}

/// Compute percentile bootstrap intervals for the given metrics.
///
/// One generator is seeded once from the settings; metrics draw their
/// `n x resamples` indices from it in declaration order over records put in
/// canonical (episode index) order, so intervals are reproducible and
/// independent of input record order.
pub fn bootstrap_cis(
    records: &[EpisodeRecord],
    metrics: &[Metric],
    settings: &BootstrapSettings,
) -> Result<Vec<BootstrapInterval>, Error> {
    if records.is_empty() {
        return Err(Error::validation("cannot bootstrap zero episodes"));
    }
    let mut ordered: Vec<&EpisodeRecord> = records.iter().collect();
    ordered.sort_by_key(|r| r.episode_index);

    let n = ordered.len();
    let mut rng = seeded(settings.seed);
    let mut intervals = Vec::with_capacity(metrics.len());
    for &metric in metrics {
        let values: Vec<f64> = ordered.iter().map(|r| metric.per_episode(r)).collect();
        let mut stats = Vec::with_capacity(settings.resamples as usize);
        for _ in 0..settings.resamples {
            let mut acc = 0.0;
            for _ in 0..n {
                let ix = rand::Rng::random_range(&mut rng, 0..n as u64) as usize;
                acc += values[ix];
            }
            stats.push(acc / n as f64);
        }
        stats.sort_by(f64::total_cmp);
        let alpha = 1.0 - settings.level;
        let b = settings.resamples as usize;
        let lower_ix = ((alpha / 2.0) * b as f64) as usize;
        let upper_ix = (((1.0 - alpha / 2.0) * b as f64) as usize).min(b - 1);
        intervals.push(BootstrapInterval {
            metric,
            lower: stats[lower_ix],
            upper: stats[upper_ix],
            resamples: settings.resamples,
            seed: settings.seed,
            level: settings.level,
            method: "percentile".to_string(),
            unit: "episode".to_string(),
        });
    }
    Ok(intervals)
}

/// Convenience wrapper for a single metric.
pub fn bootstrap_ci(
    records: &[EpisodeRecord],
    metric: Metric,
    settings: &BootstrapSettings,
) -> Result<BootstrapInterval, Error> {
    Ok(bootstrap_cis(records, &[metric], settings)?.remove(0))
}
