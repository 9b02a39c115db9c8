//! Report rendering: plain-text tables and a machine-readable JSON form.
//!
//! A report row carries one run's summary, optional bootstrap intervals, and
//! optional deltas against a named baseline run. The JSON document is the
//! source of truth; the text table is a pure function of it, so JSON output
//! round-trips to the identical rendering.

use serde::{Deserialize, Serialize};

use crate::engine::EpisodeRecord;
use crate::error::Error;
use crate::eval::{bootstrap_cis, summarize, BootstrapInterval, BootstrapSettings, Metric, MetricsSummary};

pub const REPORT_SCHEMA_VERSION: &str = "1";

/// Metric deltas versus the baseline row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub baseline: String,
    pub deal_rate: f64,
    pub avg_profit_usd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub summary: MetricsSummary,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub intervals: Vec<BootstrapInterval>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub deltas: Option<Deltas>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema_version: String,
    pub rows: Vec<ReportRow>,
}

/// Build a report from (run name, episode records) pairs. When a baseline is
/// named, every other row carries deltas against it; bootstrap intervals for
/// deal rate and average profit are attached when settings are given.
pub fn build_report(
    runs: &[(String, Vec<EpisodeRecord>)],
    baseline: Option<&str>,
    bootstrap: Option<&BootstrapSettings>,
) -> Result<ReportDoc, Error> {
    let baseline_summary = match baseline {
        Some(name) => {
            let (_, records) = runs
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| Error::validation(format!("baseline run {name:?} not found")))?;
            Some((name.to_string(), summarize(records)?))
        }
        None => None,
    };
    let mut rows = Vec::with_capacity(runs.len());
    for (name, records) in runs {
        let summary = summarize(records)?;
        let intervals = match bootstrap {
            Some(settings) => {
                bootstrap_cis(records, &[Metric::DealRate, Metric::AvgProfit], settings)?
            }
            None => Vec::new(),
        };
        let deltas = match &baseline_summary {
            Some((base_name, base)) if base_name != name => Some(Deltas {
                baseline: base_name.clone(),
                deal_rate: summary.deal_rate - base.deal_rate,
                avg_profit_usd: summary.avg_profit_usd - base.avg_profit_usd,
            }),
            _ => None,
        };
        rows.push(ReportRow { name: name.clone(), summary, intervals, deltas });
    }
    Ok(ReportDoc { schema_version: REPORT_SCHEMA_VERSION.to_string(), rows })
}

fn signed(v: f64, decimals: usize) -> String {
    format!("{:+.*}", decimals, v)
}

fn per_deal(summary: &MetricsSummary) -> String {
    match summary.profit_per_deal_usd {
        Some(v) => format!("{v:.2}"),
        None => "n/a".to_string(),
    }
}

/// Render the report as a plain-text table.
pub fn render_text(doc: &ReportDoc) -> String {
    let mut out = String::new();
    let header = format!(
        "{:<14} {:>9} {:>18} {:>22} {:>12} {:>14} {:>12}\n",
        "policy", "episodes", "deal_rate", "avg_profit_usd", "per_deal", "avg_rounds", "invalid"
    );
    out.push_str(&header);
    out.push_str(&"-".repeat(header.len() - 1));
    out.push('\n');
    for row in &doc.rows {
        let s = &row.summary;
        let deal_rate = match &row.deltas {
            Some(d) => format!("{:.4} ({})", s.deal_rate, signed(d.deal_rate, 4)),
            None => format!("{:.4}", s.deal_rate),
        };
        let avg_profit = match &row.deltas {
            Some(d) => format!("{:.2} ({})", s.avg_profit_usd, signed(d.avg_profit_usd, 2)),
            None => format!("{:.2}", s.avg_profit_usd),
        };
        out.push_str(&format!(
            "{:<14} {:>9} {:>18} {:>22} {:>12} {:>14.4} {:>12.4}\n",
            row.name,
            s.episodes,
            deal_rate,
            avg_profit,
            per_deal(s),
            s.avg_rounds,
            s.invalid_rate
        ));
        if s.transport_failure_count > 0 {
            out.push_str(&format!(
                "{:<14} transport_failures={} (excluded from invalid rate)\n",
                "", s.transport_failure_count
            ));
        }
        for ci in &row.intervals {
            out.push_str(&format!(
                "{:<14} {} 95% CI [{:.4}, {:.4}]  (percentile bootstrap, {} resamples, seed {})\n",
                "",
                ci.metric.label(),
                ci.lower,
                ci.upper,
                ci.resamples,
                ci.seed
            ));
        }
    }
    out
}
