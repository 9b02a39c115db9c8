//! Semi-synthetic persona bank.
//!
//! A persona pairs a seller-visible observable profile with simulator-private
//! hidden traits. Banks are generated deterministically from a master seed:
//! persona `i` draws its observable profile from the `("persona-obs", [i])`
//! substream and its hidden traits from `("persona-hidden", [i])`, so any
//! record can be regenerated bit-exactly in isolation.

pub mod tables;

use std::io::{BufRead, Write};
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::{pick, substream};

pub const BANK_SCHEMA_VERSION: &str = "1";

/// Floor applied to every feature-weight channel.
pub const FEATURE_WEIGHT_FLOOR: f64 = 0.02;
/// Reservation values never drop below this floor.
pub const RESERVATION_FLOOR_USD: f64 = 1_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgeBand {
    #[serde(rename = "18-25")]
    Age18To25,
    #[serde(rename = "26-35")]
    Age26To35,
    #[serde(rename = "36-50")]
    Age36To50,
    #[serde(rename = "50+")]
    Age50Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IncomeBand {
    #[serde(rename = "<60k")]
    Under60k,
    #[serde(rename = "60-100k")]
    From60To100k,
    #[serde(rename = "100-180k")]
    From100To180k,
    #[serde(rename = "180k+")]
    Over180k,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HouseholdStage {
    Single,
    Couple,
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OwnershipStage {
    #[serde(rename = "first-time")]
    FirstTime,
    #[serde(rename = "replacement")]
    Replacement,
    #[serde(rename = "additional")]
    Additional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UseCase {
    Commute,
    Family,
    Luxury,
    Performance,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionStyle {
    Analytic,
    Balanced,
    Expressive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TechAffinity {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Priority {
    Price,
    Comfort,
    Safety,
    Tech,
    Aesthetics,
    Performance,
}

impl Priority {
    /// Channel index boosted by this priority, in
    /// [safety, comfort, performance, technology, aesthetics] order.
    /// `Price` has no channel of its own; it reshapes the vector instead.
    fn channel_index(self) -> Option<usize> {
        match self {
            Priority::Safety => Some(0),
            Priority::Comfort => Some(1),
            Priority::Performance => Some(2),
            Priority::Tech => Some(3),
            Priority::Aesthetics => Some(4),
            Priority::Price => None,
        }
    }
}

/// Seller-visible profile fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservableProfile {
    pub age_band: AgeBand,
    pub income_band: IncomeBand,
    pub household_stage: HouseholdStage,
    pub ownership_stage: OwnershipStage,
    pub primary_use_case: UseCase,
}

/// Simulator-private buyer traits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenTraits {
    pub reservation_value_usd: f64,
    pub price_sensitivity: f64,
    pub aesthetic_sensitivity: f64,
    pub patience: u32,
    pub counter_strength: f64,
    pub walkaway_threshold: f64,
    pub belief_obscurity: f64,
    pub brand_loyalty: f64,
    pub impulsivity: f64,
    pub decision_style: DecisionStyle,
    pub tech_affinity: TechAffinity,
    pub priority_pair: (Priority, Priority),
    pub feature_weights: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Persona {
    pub id: String,
    pub seed_tag: u64,
    pub observable: ObservableProfile,
    pub hidden: HiddenTraits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersonaBank {
    pub records: Vec<Persona>,
    pub master_seed: u64,
    pub stratified: bool,
    pub schema_version: String,
}

/// Sample an observable profile: age from its prior, then income, household
/// stage, and ownership stage conditioned on age, then use case conditioned
/// on household stage.
pub fn sample_observable(rng: &mut ChaCha8Rng) -> ObservableProfile {
    let age_ix = pick(rng, &tables::AGE_PRIOR);
    sample_observable_from_age(age_ix, None, rng)
}

fn sample_observable_from_age(
    age_ix: usize,
    fixed_income_ix: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> ObservableProfile {
    let income_ix = match fixed_income_ix {
        Some(ix) => ix,
        None => pick(rng, &tables::INCOME_GIVEN_AGE[age_ix]),
    };
    let household_ix = pick(rng, &tables::HOUSEHOLD_GIVEN_AGE[age_ix]);
    let ownership_ix = pick(rng, &tables::OWNERSHIP_GIVEN_AGE[age_ix]);
    let use_case_ix = pick(rng, &tables::USE_CASE_GIVEN_HOUSEHOLD[household_ix]);
    ObservableProfile {
        age_band: tables::AGE_BANDS[age_ix],
        income_band: tables::INCOME_BANDS[income_ix],
        household_stage: tables::HOUSEHOLD_STAGES[household_ix],
        ownership_stage: tables::OWNERSHIP_STAGES[ownership_ix],
        primary_use_case: tables::USE_CASES[use_case_ix],
    }
}

fn sample_mixture<const N: usize>(m: &tables::Mixture<N>, rng: &mut ChaCha8Rng) -> f64 {
    m.support[pick(rng, &m.probs)]
}

fn clamp_unit_cap(v: f64) -> f64 {
    v.clamp(0.0, 0.95)
}

/// Generate hidden traits for an observable profile.
///
/// Draw order is a stability contract: decision style, tech affinity,
/// priority pair, the eight numeric mixtures in table order, the reservation
/// base, then the five feature-weight noise draws. Shifts, clamps, and
/// couplings consume no randomness.
pub fn sample_hidden(observable: &ObservableProfile, rng: &mut ChaCha8Rng) -> HiddenTraits {
    let use_case_ix = tables::USE_CASES
        .iter()
        .position(|&u| u == observable.primary_use_case)
        .expect("use case in table");
    let age_ix = tables::AGE_BANDS
        .iter()
        .position(|&a| a == observable.age_band)
        .expect("age band in table");
    let income_ix = tables::INCOME_BANDS
        .iter()
        .position(|&b| b == observable.income_band)
        .expect("income band in table");

    let decision_style = tables::DECISION_STYLES
        [pick(rng, &tables::DECISION_STYLE_GIVEN_USE_CASE[use_case_ix])];
    let tech_affinity = match pick(rng, &tables::TECH_AFFINITY_GIVEN_AGE[age_ix]) {
        0 => TechAffinity::Low,
        1 => TechAffinity::Medium,
        _ => TechAffinity::High,
    };
    let pairs = tables::priority_pairs_for(observable.primary_use_case);
    let pair_probs: Vec<f64> = pairs.iter().map(|&(_, p)| p).collect();
    let priority_pair = pairs[pick(rng, &pair_probs)].0;

    let mut price_sensitivity = sample_mixture(&tables::PRICE_SENSITIVITY, rng);
    let mut aesthetic_sensitivity = sample_mixture(&tables::AESTHETIC_SENSITIVITY, rng);
    let mut patience = sample_mixture(&tables::PATIENCE, rng);
    let mut counter_strength = sample_mixture(&tables::COUNTER_STRENGTH, rng);
    let mut walkaway_threshold = sample_mixture(&tables::WALKAWAY_THRESHOLD, rng);
    let belief_obscurity = sample_mixture(&tables::BELIEF_OBSCURITY, rng);
    let mut brand_loyalty = sample_mixture(&tables::BRAND_LOYALTY, rng);
    let mut impulsivity = sample_mixture(&tables::IMPULSIVITY, rng);

    let (res_mean, res_std) = tables::RESERVATION_BY_INCOME[income_ix];
    let res_draw = Normal::new(res_mean, res_std).expect("valid normal").sample(rng);
    let mut reservation = res_draw.max(RESERVATION_FLOOR_USD);

    // Conditional shifts, applied in table order.
    match observable.primary_use_case {
        UseCase::Luxury => brand_loyalty += 0.08,
        UseCase::Performance => price_sensitivity -= 0.08,
        _ => {}
    }
    match observable.ownership_stage {
        OwnershipStage::FirstTime => {
            price_sensitivity += 0.12;
            brand_loyalty -= 0.10;
            walkaway_threshold += 0.08;
            patience -= 1.0;
        }
        OwnershipStage::Replacement => {
            brand_loyalty += 0.06;
            walkaway_threshold -= 0.03;
            patience += 1.0;
        }
        OwnershipStage::Additional => {
            price_sensitivity -= 0.05;
            aesthetic_sensitivity += 0.08;
            brand_loyalty += 0.04;
        }
    }
    if tech_affinity == TechAffinity::High {
        brand_loyalty += 0.04;
    }
    if priority_pair.0 == Priority::Price || priority_pair.1 == Priority::Price {
        price_sensitivity += 0.12;
    }

    let mut patience = (patience as i64).clamp(2, 7) as u32;
    walkaway_threshold = clamp_unit_cap(walkaway_threshold);
    brand_loyalty = clamp_unit_cap(brand_loyalty);
    impulsivity = clamp_unit_cap(impulsivity);
    counter_strength = clamp_unit_cap(counter_strength);

    // Coupling rules keep hidden-variable combinations coherent.
    let factor = (1.08 - 0.18 * price_sensitivity).clamp(0.75, 1.20);
    reservation *= factor;
    walkaway_threshold += 0.10 * (price_sensitivity - 1.00);
    walkaway_threshold += -0.04 * (patience as f64 - 5.0);
    counter_strength += 0.15 * (belief_obscurity - 0.50);

    reservation = reservation.max(RESERVATION_FLOOR_USD);
    walkaway_threshold = clamp_unit_cap(walkaway_threshold);
    counter_strength = clamp_unit_cap(counter_strength);
    patience = patience.clamp(2, 7);

    let feature_weights =
        feature_weights(observable.primary_use_case, decision_style, priority_pair, rng);

    HiddenTraits {
        reservation_value_usd: reservation,
        price_sensitivity,
        aesthetic_sensitivity,
        patience,
        counter_strength,
        walkaway_threshold,
        belief_obscurity,
        brand_loyalty,
        impulsivity,
        decision_style,
        tech_affinity,
        priority_pair,
        feature_weights,
    }
}

/// Build the normalized feature-weight vector over
/// [safety, comfort, performance, technology, aesthetics].
///
/// Starts from the use-case template, applies decision-style and priority
/// adjustments, perturbs each channel with N(0, 0.01), then floors at 0.02
/// and renormalizes. Components pinned at the floor are held there while the
/// rest renormalize, so the floor survives normalization.
pub fn feature_weights(
    use_case: UseCase,
    style: DecisionStyle,
    priority_pair: (Priority, Priority),
    rng: &mut ChaCha8Rng,
) -> [f64; 5] {
    let mut w = adjusted_template(use_case, style, priority_pair);
    for wk in &mut w {
        *wk += Normal::new(0.0, 0.01).expect("valid normal").sample(rng);
    }
    floor_and_normalize(w, FEATURE_WEIGHT_FLOOR)
}

/// The deterministic part of the weight pipeline: template plus
/// decision-style and priority adjustments, before noise and normalization.
pub fn adjusted_template(
    use_case: UseCase,
    style: DecisionStyle,
    priority_pair: (Priority, Priority),
) -> [f64; 5] {
    let use_case_ix = tables::USE_CASES.iter().position(|&u| u == use_case).expect("known use case");
    let mut w = tables::FEATURE_WEIGHT_TEMPLATES[use_case_ix];

    match style {
        DecisionStyle::Analytic => {
            w[0] += 0.04; // safety
            w[3] += 0.04; // technology
        }
        DecisionStyle::Expressive => {
            w[4] += 0.04; // aesthetics
            w[2] += 0.04; // performance
        }
        DecisionStyle::Balanced => {}
    }
    for priority in [priority_pair.0, priority_pair.1] {
        match priority.channel_index() {
            Some(ix) => w[ix] += 0.06,
            None => {
                // A price priority shifts weight toward safety and comfort
                // and away from performance and aesthetics.
                w[0] += 0.04;
                w[1] += 0.04;
                w[2] -= 0.04;
                w[4] -= 0.04;
            }
        }
    }
    w
}

fn floor_and_normalize(mut w: [f64; 5], floor: f64) -> [f64; 5] {
    let mut pinned = [false; 5];
    loop {
        let pinned_mass: f64 = pinned.iter().filter(|&&p| p).count() as f64 * floor;
        let free_sum: f64 =
            w.iter().zip(&pinned).filter(|&(_, &p)| !p).map(|(v, _)| v.max(floor)).sum();
        let scale = (1.0 - pinned_mass) / free_sum;
        let mut newly_pinned = false;
        for k in 0..5 {
            if pinned[k] {
                w[k] = floor;
            } else {
                w[k] = w[k].max(floor) * scale;
                if w[k] < floor {
                    pinned[k] = true;
                    newly_pinned = true;
                }
            }
        }
        if !newly_pinned {
            for k in 0..5 {
                if pinned[k] {
                    w[k] = floor;
                }
            }
            return w;
        }
    }
}

fn persona_id(master_seed: u64, index: u64) -> String {
    format!("{master_seed}-{index:06}")
}

fn generate_record(master_seed: u64, index: u64, cell: Option<(usize, usize)>) -> Persona {
    let mut obs_rng = substream(master_seed, "persona-obs", &[index]);
    let observable = match cell {
        Some((age_ix, income_ix)) => {
            sample_observable_from_age(age_ix, Some(income_ix), &mut obs_rng)
        }
        None => sample_observable(&mut obs_rng),
    };
    let mut hidden_rng = substream(master_seed, "persona-hidden", &[index]);
    let hidden = sample_hidden(&observable, &mut hidden_rng);
    Persona { id: persona_id(master_seed, index), seed_tag: index, observable, hidden }
}

/// Proportional quotas over the 16 age x income cells with largest-remainder
/// rounding. Cells are ordered age-major.
pub fn stratification_quotas(n: u64) -> Vec<((usize, usize), u64)> {
    let mut cells: Vec<((usize, usize), f64)> = Vec::with_capacity(16);
    for (age_ix, age_p) in tables::AGE_PRIOR.iter().enumerate() {
        for (income_ix, inc_p) in tables::INCOME_GIVEN_AGE[age_ix].iter().enumerate() {
            cells.push(((age_ix, income_ix), age_p * inc_p * n as f64));
        }
    }
    let mut quotas: Vec<u64> = cells.iter().map(|&(_, target)| target.floor() as u64).collect();
    let assigned: u64 = quotas.iter().sum();
    let mut remainders: Vec<(usize, f64)> = cells
        .iter()
        .enumerate()
        .map(|(i, &(_, target))| (i, target - target.floor()))
        .collect();
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for k in 0..(n - assigned) as usize {
        quotas[remainders[k].0] += 1;
    }
    cells.iter().map(|&(cell, _)| cell).zip(quotas).map(|(c, q)| (c, q)).collect()
}

/// Generate a persona bank of `n` records.
///
/// With `stratify`, age x income cell counts follow proportional quotas with
/// largest-remainder rounding; otherwise profiles are sampled freely from the
/// priors and conditionals.
pub fn generate_bank(n: u64, master_seed: u64, stratify: bool) -> Result<PersonaBank, Error> {
    tables::validate()?;
    if n == 0 {
        return Err(Error::validation("persona bank size must be at least 1"));
    }
    let mut records = Vec::with_capacity(n as usize);
    if stratify {
        let mut index = 0u64;
        for (cell, quota) in stratification_quotas(n) {
            for _ in 0..quota {
                records.push(generate_record(master_seed, index, Some(cell)));
                index += 1;
            }
        }
    } else {
        for index in 0..n {
            records.push(generate_record(master_seed, index, None));
        }
    }
    Ok(PersonaBank {
        records,
        master_seed,
        stratified: stratify,
        schema_version: BANK_SCHEMA_VERSION.to_string(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct BankHeader {
    schema_version: String,
    master_seed: u64,
    n: u64,
    stratified: bool,
}

impl PersonaBank {
    /// Write the bank as JSON Lines: a header line followed by one persona
    /// per line.
    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let header = BankHeader {
            schema_version: self.schema_version.clone(),
            master_seed: self.master_seed,
            n: self.records.len() as u64,
            stratified: self.stratified,
        };
        writeln!(out, "{}", serde_json::to_string(&header)?)?;
        for record in &self.records {
            writeln!(out, "{}", serde_json::to_string(record)?)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PersonaBank, Error> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = file.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::validation("persona bank file is empty"))??;
        let header: BankHeader = serde_json::from_str(&header_line)
            .map_err(|e| Error::validation(format!("bad persona bank header: {e}")))?;
        if header.schema_version != BANK_SCHEMA_VERSION {
            return Err(Error::validation(format!(
                "persona bank schema version {:?} not supported (expected {BANK_SCHEMA_VERSION:?})",
                header.schema_version
            )));
        }
        let mut records = Vec::with_capacity(header.n as usize);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Persona = serde_json::from_str(&line).map_err(|e| {
                Error::validation(format!("bad persona record on line {}: {e}", lineno + 2))
            })?;
            records.push(record);
        }
        if records.len() as u64 != header.n {
            return Err(Error::validation(format!(
                "persona bank header claims {} records, found {}",
                header.n,
                records.len()
            )));
        }
        Ok(PersonaBank {
            records,
            master_seed: header.master_seed,
            stratified: header.stratified,
            schema_version: header.schema_version,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
