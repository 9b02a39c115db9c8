//! Simulator and benchmark harness for hidden-preference personalized-pricing
//! negotiations.
//!
//! A simulated buyer with latent valuation and bargaining traits negotiates a
//! fixed customization bundle against a seller policy (heuristic or LLM-backed)
//! over a short horizon. The harness runs frozen episode streams, writes JSONL
//! traces, and reports seller-profit metrics with percentile bootstrap
//! confidence intervals.

pub mod buyer;
pub mod catalog;
pub mod config;
pub mod engine;
pub mod error;
pub mod eval;
pub mod persona;
pub mod policy;
pub mod report;
pub mod rng;
pub mod trace;

pub use buyer::{BundleSignals, BuyerConfig, BuyerResponse, WtpComponents};
pub use catalog::{Bundle, Catalog, FeatureChannel, OfferBounds, OptionSpec};
pub use config::AppConfig;
pub use engine::{
    EpisodeKey, EpisodeRecord, NoDealReason, Observation, Outcome, SellerAction, Session,
    StepResult,
};
pub use error::Error;
pub use eval::{BootstrapInterval, BootstrapSettings, Metric, MetricsSummary, RunSettings};
pub use persona::{HiddenTraits, ObservableProfile, Persona, PersonaBank};
pub use policy::{PolicyReply, SellerPolicy};
