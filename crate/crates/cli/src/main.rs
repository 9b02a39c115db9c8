//! `haggle` — benchmark harness CLI for hidden-preference pricing
//! negotiations.
//!
//! Subcommands: `validate-catalog`, `gen-personas`, `run`, `report`,
//! `show-config`. Configuration precedence is flags > config file >
//! built-in defaults. Exit codes: 0 success, 2 validation/usage error,
//! 3 transport-failure budget exceeded.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use haggle_core::catalog::{offer_bounds, Catalog};
use haggle_core::config::AppConfig;
use haggle_core::error::Error;
use haggle_core::eval::{BootstrapSettings, RunSettings};
use haggle_core::persona::{generate_bank, PersonaBank};
use haggle_core::policy::heuristics::{
    ConcessionParams, ConcessionPolicy, RandomPolicy, RandomPolicyParams,
};
use haggle_core::policy::llm::{LlmPolicy, PromptVersion};
use haggle_core::policy::SellerPolicy;
use haggle_core::report::{build_report, render_text};
use haggle_core::trace::read_trace;

#[derive(Parser)]
#[command(
    name = "haggle",
    version,
    about = "Benchmark harness for hidden-preference pricing negotiations",
    long_about = None
)]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyKind {
    Random,
    Concession,
    Llm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PromptArg {
    V1,
    V2,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a catalog file (the built-in catalog when --file is omitted)
    ValidateCatalog {
        /// Catalog JSON file to validate
        #[arg(long, value_name = "PATH")]
        file: Option<PathBuf>,
    },
    /// Generate a persona bank and write it as JSON Lines
    GenPersonas {
        /// Number of personas to generate
        #[arg(long)]
        n: u64,
        /// Master seed for deterministic generation
        #[arg(long)]
        seed: u64,
        /// Stratify by age and income with proportional quotas
        #[arg(long)]
        stratify: bool,
        /// Output bank path
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Run the frozen episode stream under a policy and write a trace
    Run {
        /// Seller policy to evaluate
        #[arg(long, value_enum)]
        policy: PolicyKind,
        /// Persona bank file; generated in memory (stratified) when omitted
        #[arg(long, value_name = "PATH")]
        bank: Option<PathBuf>,
        /// Number of episodes
        #[arg(long)]
        episodes: Option<u64>,
        /// Master seed of the episode stream
        #[arg(long)]
        seed: Option<u64>,
        /// Trace output path (JSON Lines)
        #[arg(long, value_name = "PATH", default_value = "traces.jsonl")]
        out: PathBuf,
        /// Resume an interrupted run from its last complete episode
        #[arg(long)]
        resume: bool,
        /// Worker threads for concurrent episodes
        #[arg(long)]
        concurrency: Option<usize>,
        /// LLM endpoint base URL (OpenAI-compatible)
        #[arg(long)]
        endpoint: Option<String>,
        /// LLM model identifier
        #[arg(long)]
        model: Option<String>,
        /// Prompt template version
        #[arg(long, value_enum)]
        prompt: Option<PromptArg>,
        /// Sampling temperature
        #[arg(long)]
        temperature: Option<f64>,
        /// Completion token cap
        #[arg(long)]
        max_tokens: Option<u32>,
        /// Salvage code-fenced replies (not benchmark-grade)
        #[arg(long)]
        lenient_parse: bool,
    },
    /// Summarize a trace file, optionally against a baseline trace
    Report {
        /// Trace file to report on
        #[arg(long, value_name = "PATH")]
        traces: PathBuf,
        /// Baseline trace for parenthesized deltas
        #[arg(long, value_name = "PATH")]
        baseline: Option<PathBuf>,
        /// Attach percentile bootstrap confidence intervals
        #[arg(long)]
        bootstrap: bool,
        /// Emit the machine-readable JSON report
        #[arg(long)]
        json: bool,
    },
    /// Print the fully resolved effective configuration
    ShowConfig,
}

fn load_config(path: Option<&Path>) -> Result<AppConfig, Error> {
    match path {
        Some(p) => AppConfig::load(p),
        None => Ok(AppConfig::default()),
    }
}

fn load_catalog(config: &AppConfig) -> Result<Catalog, Error> {
    match &config.catalog_path {
        Some(path) => Catalog::load(Path::new(path)),
        None => Ok(Catalog::builtin_default()),
    }
}

fn build_policy(
    kind: PolicyKind,
    config: &AppConfig,
    catalog: &Catalog,
) -> Result<Box<dyn SellerPolicy>, Error> {
    let bounds = offer_bounds(catalog);
    match kind {
        PolicyKind::Random => {
            let params = RandomPolicyParams {
                p_accept_counter: config.random_policy.p_accept_counter,
                p_walkaway: config.random_policy.p_walkaway,
                bounds,
            };
            Ok(Box::new(RandomPolicy::new(params)?))
        }
        PolicyKind::Concession => {
            let c = &config.concession_policy;
            let params = ConcessionParams {
                anchor_mult: c.anchor_mult,
                floor_mult: c.floor_mult,
                min_spread_usd: c.min_spread_usd,
                noise_sigma_usd: c.noise_sigma_usd,
                blend_target: c.blend_target,
                blend_counter: c.blend_counter,
                counter_bump_usd: c.counter_bump_usd,
                bounds,
            };
            Ok(Box::new(ConcessionPolicy::new(params)?))
        }
        PolicyKind::Llm => Ok(Box::new(LlmPolicy::new(config.llm.clone())?)),
    }
}

fn run_command(cli: Cli) -> Result<(), Error> {
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::ValidateCatalog { file } => {
            let catalog = match file {
                Some(path) => Catalog::load(&path)?,
                None => Catalog::builtin_default(),
            };
            println!(
                "catalog ok: {} options across {} dimensions",
                catalog.options().len(),
                catalog.dimensions().len()
            );
            Ok(())
        }
        Command::GenPersonas { n, seed, stratify, out } => {
            let bank = generate_bank(n, seed, stratify)?;
            bank.save(&out)?;
            println!(
                "wrote {} personas (seed {seed}, stratified: {stratify}) to {}",
                bank.len(),
                out.display()
            );
            Ok(())
        }
        Command::Run {
            policy,
            bank,
            episodes,
            seed,
            out,
            resume,
            concurrency,
            endpoint,
            model,
            prompt,
            temperature,
            max_tokens,
            lenient_parse,
        } => {
            if let Some(v) = endpoint {
                config.llm.endpoint_url = v;
            }
            if let Some(v) = model {
                config.llm.model_id = v;
            }
            if let Some(v) = prompt {
                config.llm.version = match v {
                    PromptArg::V1 => PromptVersion::V1,
                    PromptArg::V2 => PromptVersion::V2,
                };
            }
            if let Some(v) = temperature {
                config.llm.temperature = v;
            }
            if let Some(v) = max_tokens {
                config.llm.max_tokens = v;
            }
            if lenient_parse {
                config.llm.lenient_parse = true;
            }
            let episodes = episodes.unwrap_or(config.run.episodes);
            let seed = seed.unwrap_or(config.run.seed);
            let concurrency = concurrency.unwrap_or(config.run.concurrency);

            let catalog = load_catalog(&config)?;
            let bank = match bank {
                Some(path) => PersonaBank::load(&path)?,
                None => generate_bank(episodes, seed, true)?,
            };
            let policy = build_policy(policy, &config, &catalog)?;
            let settings = RunSettings {
                episodes,
                master_seed: seed,
                horizon: config.run.horizon,
                concurrency,
                transport_failure_budget: config.run.transport_failure_budget,
                out: Some(out.clone()),
                resume,
            };
            haggle_core::eval::run_benchmark(
                policy.as_ref(),
                &catalog,
                &bank,
                &config.buyer,
                &settings,
            )?;
            // Summarize the full trace (covers resumed runs).
            let (header, records) = read_trace(&out)?;
            let doc = build_report(&[(header.policy, records)], None, None)?;
            print!("{}", render_text(&doc));
            println!("trace written to {}", out.display());
            Ok(())
        }
        Command::Report { traces, baseline, bootstrap, json } => {
            let (header, records) = read_trace(&traces)?;
            let mut runs = vec![(header.policy.clone(), records)];
            let mut baseline_name = None;
            if let Some(path) = baseline {
                let (base_header, base_records) = read_trace(&path)?;
                let name = if base_header.policy == header.policy {
                    format!("{} (baseline)", base_header.policy)
                } else {
                    base_header.policy.clone()
                };
                baseline_name = Some(name.clone());
                runs.push((name, base_records));
            }
            let settings = BootstrapSettings::default();
            let doc = build_report(
                &runs,
                baseline_name.as_deref(),
                bootstrap.then_some(&settings),
            )?;
            if json {
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                print!("{}", render_text(&doc));
            }
            Ok(())
        }
        Command::ShowConfig => {
            println!("{}", serde_json::to_string_pretty(&config)?);
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run_command(cli) {
        Ok(()) => {}
        Err(err @ Error::TransportBudget { .. }) => {
            eprintln!("error: {err}");
            std::process::exit(3);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(2);
        }
    }
}
