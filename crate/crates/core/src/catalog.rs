//! The fixed vehicle-customization catalog and per-episode bundles.
//!
//! A bundle selects one option per catalog dimension. From the selection the
//! simulator derives the seller-visible totals (MSRP delta, implementation
//! cost, aesthetic proxy) and the simulator-private feature-channel vector
//! that feeds the buyer's valuation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Mass floor (in USD) credited to zero-cost options when routing MSRP mass
/// into feature channels and aesthetic weights.
pub const ZERO_COST_FLOOR_USD: f64 = 100.0;

/// Channel order used by every 5-vector in the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureChannel {
    Safety,
    Comfort,
    Performance,
    Technology,
    Aesthetics,
}

impl FeatureChannel {
    pub const ALL: [FeatureChannel; 5] = [
        FeatureChannel::Safety,
        FeatureChannel::Comfort,
        FeatureChannel::Performance,
        FeatureChannel::Technology,
        FeatureChannel::Aesthetics,
    ];

    pub fn index(self) -> usize {
        match self {
            FeatureChannel::Safety => 0,
            FeatureChannel::Comfort => 1,
            FeatureChannel::Performance => 2,
            FeatureChannel::Technology => 3,
            FeatureChannel::Aesthetics => 4,
        }
    }
}

/// One customization option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub key: String,
    pub dimension: String,
    pub msrp_delta_usd: f64,
    pub aesthetic_prior: f64,
    pub feature_channel: FeatureChannel,
}

/// Number of options and dimensions the catalog must carry.
pub const CATALOG_OPTION_COUNT: usize = 20;
pub const CATALOG_DIMENSION_COUNT: usize = 11;

/// The fixed customization catalog: 20 options across 11 dimensions.
#[derive(Debug, Clone, Serialize)]
pub struct Catalog {
    options: Vec<OptionSpec>,
    dimensions: Vec<String>,
}

impl Catalog {
    /// The built-in catalog used when no catalog file is supplied.
    pub fn builtin_default() -> Catalog {
        let rows: &[(&str, &str, f64, f64, FeatureChannel)] = &[
            ("paint_standard", "paint", 0.0, 0.20, FeatureChannel::Aesthetics),
            ("paint_metallic", "paint", 750.0, 0.45, FeatureChannel::Aesthetics),
            ("paint_manufaktur", "paint", 1750.0, 0.80, FeatureChannel::Aesthetics),
            ("wheel_18_standard", "wheels", 0.0, 0.20, FeatureChannel::Aesthetics),
            ("wheel_19_upgrade", "wheels", 600.0, 0.50, FeatureChannel::Aesthetics),
            ("wheel_amg_high", "wheels", 1950.0, 0.85, FeatureChannel::Aesthetics),
            ("styling_upgrade", "exterior_style", 400.0, 0.55, FeatureChannel::Aesthetics),
            ("mb_tex", "upholstery", 0.0, 0.25, FeatureChannel::Comfort),
            ("leather", "upholstery", 1620.0, 0.65, FeatureChannel::Comfort),
            ("nappa_leather", "upholstery", 2990.0, 0.90, FeatureChannel::Comfort),
            ("standard_trim", "trim", 0.0, 0.25, FeatureChannel::Comfort),
            ("premium_trim", "trim", 150.0, 0.55, FeatureChannel::Comfort),
            ("multicontour_package", "comfort", 2950.0, 0.85, FeatureChannel::Comfort),
            ("seat_comfort_upgrade", "comfort", 500.0, 0.45, FeatureChannel::Comfort),
            ("soft_close_doors", "comfort", 550.0, 0.40, FeatureChannel::Comfort),
            ("burmester_4d", "audio", 1030.0, 0.70, FeatureChannel::Comfort),
            ("mbux_superscreen", "technology", 1500.0, 0.90, FeatureChannel::Technology),
            ("driver_assistance_package", "safety", 1950.0, 0.60, FeatureChannel::Safety),
            ("airmatic_package", "performance", 3200.0, 0.65, FeatureChannel::Performance),
            ("digital_light", "lighting", 990.0, 0.60, FeatureChannel::Aesthetics),
        ];
        let options = rows
            .iter()
            .map(|&(key, dim, msrp, prior, channel)| OptionSpec {
                key: key.to_string(),
                dimension: dim.to_string(),
                msrp_delta_usd: msrp,
                aesthetic_prior: prior,
                feature_channel: channel,
            })
            .collect();
        Catalog::from_options(options).expect("built-in catalog is valid")
    }

    /// Build and validate a catalog from raw option rows. Dimension order is
    /// first-appearance order.
    pub fn from_options(options: Vec<OptionSpec>) -> Result<Catalog, Error> {
        let mut dimensions: Vec<String> = Vec::new();
        for (row, opt) in options.iter().enumerate() {
            if opt.key.is_empty() {
                return Err(Error::validation(format!("catalog row {row}: empty option key")));
            }
            if opt.dimension.is_empty() {
                return Err(Error::validation(format!(
                    "catalog row {row} (option {:?}): empty dimension",
                    opt.key
                )));
            }
            if !opt.msrp_delta_usd.is_finite() || opt.msrp_delta_usd < 0.0 {
                return Err(Error::validation(format!(
                    "catalog row {row} (option {:?}): msrp_delta_usd must be non-negative",
                    opt.key
                )));
            }
            if !(0.0..=1.0).contains(&opt.aesthetic_prior) {
                return Err(Error::validation(format!(
                    "catalog row {row} (option {:?}): aesthetic_prior must be in [0, 1]",
                    opt.key
                )));
            }
            if options[..row].iter().any(|o| o.key == opt.key) {
                return Err(Error::validation(format!(
                    "catalog row {row}: duplicate option key {:?}",
                    opt.key
                )));
            }
            if !dimensions.contains(&opt.dimension) {
                dimensions.push(opt.dimension.clone());
            }
        }
        if options.len() != CATALOG_OPTION_COUNT {
            return Err(Error::validation(format!(
                "catalog must contain exactly {CATALOG_OPTION_COUNT} options, found {}",
                options.len()
            )));
        }
        if dimensions.len() != CATALOG_DIMENSION_COUNT {
            return Err(Error::validation(format!(
                "catalog must span exactly {CATALOG_DIMENSION_COUNT} dimensions, found {}",
                dimensions.len()
            )));
        }
        Ok(Catalog { options, dimensions })
    }

    /// Parse a catalog from its JSON file form: an array of option objects.
    pub fn from_json_str(text: &str) -> Result<Catalog, Error> {
        let options: Vec<OptionSpec> = serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("malformed catalog file: {e}")))?;
        Catalog::from_options(options)
    }

    pub fn load(path: &std::path::Path) -> Result<Catalog, Error> {
        let text = std::fs::read_to_string(path)?;
        Catalog::from_json_str(&text)
    }

    pub fn options(&self) -> &[OptionSpec] {
        &self.options
    }

    pub fn dimensions(&self) -> &[String] {
        &self.dimensions
    }

    pub fn option(&self, key: &str) -> Option<&OptionSpec> {
        self.options.iter().find(|o| o.key == key)
    }

    pub fn options_in(&self, dimension: &str) -> Vec<&OptionSpec> {
        self.options.iter().filter(|o| o.dimension == dimension).collect()
    }
}

/// Shared offer bounds for the heuristic policies, derived from the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfferBounds {
    pub lower_usd: f64,
    pub upper_usd: f64,
    pub m_min: f64,
    pub m_max: f64,
}

/// Compute the shared heuristic offer bounds.
///
/// `m_min`/`m_max` are the sums of dimension-wise minimum/maximum MSRP deltas;
/// the bounds are `L = max(100, 0.4 m_min)` and
/// `U = max(L + 500, 3 m_max, 60000)`.
pub fn offer_bounds(catalog: &Catalog) -> OfferBounds {
    let mut m_min = 0.0;
    let mut m_max = 0.0;
    for dim in catalog.dimensions() {
        let opts = catalog.options_in(dim);
        let lo = opts.iter().map(|o| o.msrp_delta_usd).fold(f64::INFINITY, f64::min);
        let hi = opts.iter().map(|o| o.msrp_delta_usd).fold(f64::NEG_INFINITY, f64::max);
        m_min += lo;
        m_max += hi;
    }
    let lower = f64::max(100.0, 0.4 * m_min);
    let upper = f64::max(f64::max(lower + 500.0, 3.0 * m_max), 60_000.0);
    OfferBounds { lower_usd: lower, upper_usd: upper, m_min, m_max }
}

/// A fixed per-episode selection of one option per dimension, with the
/// derived quantities the simulator needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bundle {
    /// Selected options, one per dimension, in catalog dimension order.
    pub selected: Vec<OptionSpec>,
    pub total_msrp_delta_usd: f64,
    pub implementation_cost_usd: f64,
    pub aesthetic_proxy: f64,
    /// Normalized channel masses (simulator-private; never shown to sellers).
    pub feature_channels: [f64; 5],
}

impl Bundle {
    /// Build a bundle from an explicit selection (one option per dimension).
    pub fn from_selection(catalog: &Catalog, keys_by_dimension: &[&str]) -> Result<Bundle, Error> {
        if keys_by_dimension.len() != catalog.dimensions().len() {
            return Err(Error::validation("selection must pick one option per dimension"));
        }
        let mut selected = Vec::with_capacity(keys_by_dimension.len());
        for (dim, key) in catalog.dimensions().iter().zip(keys_by_dimension) {
            let opt = catalog
                .option(key)
                .ok_or_else(|| Error::validation(format!("unknown option key {key:?}")))?;
            if &opt.dimension != dim {
                return Err(Error::validation(format!(
                    "option {key:?} belongs to dimension {:?}, expected {dim:?}",
                    opt.dimension
                )));
            }
            selected.push(opt.clone());
        }
        Ok(Bundle::from_options(selected))
    }

    fn from_options(selected: Vec<OptionSpec>) -> Bundle {
        let total: f64 = selected.iter().map(|o| o.msrp_delta_usd).sum();
        let cost = implementation_cost_of_total(total);
        let channels = feature_channels_of(&selected);
        let proxy = aesthetic_proxy_of(&selected);
        Bundle {
            selected,
            total_msrp_delta_usd: total,
            implementation_cost_usd: cost,
            aesthetic_proxy: proxy,
            feature_channels: channels,
        }
    }

    pub fn option_for(&self, dimension: &str) -> Option<&OptionSpec> {
        self.selected.iter().find(|o| o.dimension == dimension)
    }

    /// Technology channel share of the bundle's feature mass.
    pub fn tech_share(&self) -> f64 {
        self.feature_channels[FeatureChannel::Technology.index()]
    }
}

/// Sample one option per dimension, uniformly within each dimension.
pub fn sample_bundle(catalog: &Catalog, rng: &mut ChaCha8Rng) -> Bundle {
    let mut selected = Vec::with_capacity(catalog.dimensions().len());
    for dim in catalog.dimensions() {
        let opts = catalog.options_in(dim);
        let k = rng.random_range(0..opts.len() as u64) as usize;
        selected.push(opts[k].clone());
    }
    Bundle::from_options(selected)
}

/// Seller-side cost proxy: half the bundle's total MSRP delta.
pub fn implementation_cost(bundle: &Bundle) -> f64 {
    implementation_cost_of_total(bundle.total_msrp_delta_usd)
}

fn implementation_cost_of_total(total_msrp_delta_usd: f64) -> f64 {
    0.5 * total_msrp_delta_usd
}

/// Route each option's MSRP mass (floored for zero-cost options) into its
/// feature channel and normalize to a probability vector.
fn feature_channels_of(selected: &[OptionSpec]) -> [f64; 5] {
    let mut mass = [0.0f64; 5];
    for opt in selected {
        mass[opt.feature_channel.index()] += opt.msrp_delta_usd.max(ZERO_COST_FLOOR_USD);
    }
    let total: f64 = mass.iter().sum();
    for m in &mut mass {
        *m /= total;
    }
    mass
}

/// MSRP-delta-weighted mean of the selected options' aesthetic priors, with
/// zero-cost options weighted at the structural floor.
fn aesthetic_proxy_of(selected: &[OptionSpec]) -> f64 {
    let mut weight_sum = 0.0;
    let mut acc = 0.0;
    for opt in selected {
        let w = opt.msrp_delta_usd.max(ZERO_COST_FLOOR_USD);
        weight_sum += w;
        acc += w * opt.aesthetic_prior;
    }
    acc / weight_sum
}
