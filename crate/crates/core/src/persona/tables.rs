//! Probability tables driving persona generation.
//!
//! Observable profiles come from an age prior plus conditionals; hidden traits
//! come from conditional mappings, three-point numeric mixtures, bounded
//! shifts, and coupling rules. Every row here is validated to sum to 1 before
//! a bank is generated.

use crate::error::Error;

use super::{AgeBand, DecisionStyle, HouseholdStage, IncomeBand, OwnershipStage, Priority, UseCase};

pub const AGE_BANDS: [AgeBand; 4] =
    [AgeBand::Age18To25, AgeBand::Age26To35, AgeBand::Age36To50, AgeBand::Age50Plus];
pub const INCOME_BANDS: [IncomeBand; 4] = [
    IncomeBand::Under60k,
    IncomeBand::From60To100k,
    IncomeBand::From100To180k,
    IncomeBand::Over180k,
];
pub const HOUSEHOLD_STAGES: [HouseholdStage; 3] =
    [HouseholdStage::Single, HouseholdStage::Couple, HouseholdStage::Family];
pub const OWNERSHIP_STAGES: [OwnershipStage; 3] =
    [OwnershipStage::FirstTime, OwnershipStage::Replacement, OwnershipStage::Additional];
pub const USE_CASES: [UseCase; 5] =
    [UseCase::Commute, UseCase::Family, UseCase::Luxury, UseCase::Performance, UseCase::Mixed];
pub const DECISION_STYLES: [DecisionStyle; 3] =
    [DecisionStyle::Analytic, DecisionStyle::Balanced, DecisionStyle::Expressive];

pub const AGE_PRIOR: [f64; 4] = [0.08, 0.24, 0.39, 0.29];
pub const INCOME_PRIOR: [f64; 4] = [0.08, 0.22, 0.40, 0.30];
pub const HOUSEHOLD_PRIOR: [f64; 3] = [0.27, 0.31, 0.42];
pub const OWNERSHIP_PRIOR: [f64; 3] = [0.15, 0.68, 0.17];
pub const USE_CASE_PRIOR: [f64; 5] = [0.19, 0.22, 0.14, 0.10, 0.35];

/// P(income band | age band); rows in `AGE_BANDS` order.
pub const INCOME_GIVEN_AGE: [[f64; 4]; 4] = [
    [0.42, 0.36, 0.17, 0.05],
    [0.14, 0.33, 0.34, 0.19],
    [0.05, 0.20, 0.43, 0.32],
    [0.06, 0.18, 0.40, 0.36],
];

/// P(household stage | age band).
pub const HOUSEHOLD_GIVEN_AGE: [[f64; 3]; 4] = [
    [0.56, 0.25, 0.19],
    [0.32, 0.31, 0.37],
    [0.17, 0.29, 0.54],
    [0.34, 0.46, 0.20],
];

/// P(ownership stage | age band).
pub const OWNERSHIP_GIVEN_AGE: [[f64; 3]; 4] = [
    [0.52, 0.42, 0.06],
    [0.21, 0.65, 0.14],
    [0.08, 0.70, 0.22],
    [0.03, 0.72, 0.25],
];

/// P(primary use case | household stage).
pub const USE_CASE_GIVEN_HOUSEHOLD: [[f64; 5]; 3] = [
    [0.30, 0.08, 0.17, 0.10, 0.35],
    [0.20, 0.14, 0.18, 0.11, 0.37],
    [0.12, 0.43, 0.08, 0.06, 0.31],
];

/// P(decision style | primary use case).
pub const DECISION_STYLE_GIVEN_USE_CASE: [[f64; 3]; 5] = [
    [0.46, 0.44, 0.10],
    [0.40, 0.50, 0.10],
    [0.24, 0.46, 0.30],
    [0.26, 0.34, 0.40],
    [0.31, 0.44, 0.25],
];

/// P(tech-affinity band | age band); columns low, medium, high.
pub const TECH_AFFINITY_GIVEN_AGE: [[f64; 3]; 4] = [
    [0.10, 0.36, 0.54],
    [0.12, 0.43, 0.45],
    [0.19, 0.51, 0.30],
    [0.33, 0.50, 0.17],
];

/// P(top-two priority pair | primary use case).
pub fn priority_pairs_for(use_case: UseCase) -> &'static [((Priority, Priority), f64)] {
    use Priority::*;
    match use_case {
        UseCase::Commute => &[
            ((Price, Comfort), 0.30),
            ((Comfort, Safety), 0.24),
            ((Tech, Comfort), 0.18),
            ((Safety, Tech), 0.18),
            ((Aesthetics, Comfort), 0.10),
        ],
        UseCase::Family => &[
            ((Comfort, Safety), 0.35),
            ((Safety, Tech), 0.32),
            ((Price, Comfort), 0.23),
            ((Tech, Comfort), 0.10),
        ],
        UseCase::Luxury => &[
            ((Aesthetics, Comfort), 0.34),
            ((Tech, Comfort), 0.30),
            ((Performance, Aesthetics), 0.24),
            ((Comfort, Safety), 0.12),
        ],
        UseCase::Performance => &[
            ((Performance, Aesthetics), 0.50),
            ((Tech, Comfort), 0.20),
            ((Aesthetics, Comfort), 0.18),
            ((Price, Comfort), 0.12),
        ],
        UseCase::Mixed => &[
            ((Price, Comfort), 0.20),
            ((Comfort, Safety), 0.22),
            ((Performance, Aesthetics), 0.13),
            ((Tech, Comfort), 0.17),
            ((Safety, Tech), 0.16),
            ((Aesthetics, Comfort), 0.12),
        ],
    }
}

/// Three-point numeric mixture: support values with their probabilities.
pub struct Mixture<const N: usize> {
    pub support: [f64; N],
    pub probs: [f64; N],
}

pub const PRICE_SENSITIVITY: Mixture<3> =
    Mixture { support: [0.70, 1.00, 1.35], probs: [0.28, 0.50, 0.22] };
pub const AESTHETIC_SENSITIVITY: Mixture<3> =
    Mixture { support: [0.45, 0.75, 1.05], probs: [0.24, 0.52, 0.24] };
pub const PATIENCE: Mixture<4> =
    Mixture { support: [3.0, 4.0, 5.0, 6.0], probs: [0.20, 0.34, 0.30, 0.16] };
pub const COUNTER_STRENGTH: Mixture<3> =
    Mixture { support: [0.30, 0.55, 0.80], probs: [0.30, 0.48, 0.22] };
pub const WALKAWAY_THRESHOLD: Mixture<3> =
    Mixture { support: [0.05, 0.10, 0.18], probs: [0.42, 0.40, 0.18] };
pub const BELIEF_OBSCURITY: Mixture<3> =
    Mixture { support: [0.20, 0.45, 0.70], probs: [0.30, 0.50, 0.20] };
pub const BRAND_LOYALTY: Mixture<3> =
    Mixture { support: [0.30, 0.55, 0.80], probs: [0.24, 0.52, 0.24] };
pub const IMPULSIVITY: Mixture<3> =
    Mixture { support: [0.20, 0.45, 0.75], probs: [0.30, 0.48, 0.22] };

/// Income-conditioned reservation-price base: (mean, std) in USD, rows in
/// `INCOME_BANDS` order.
pub const RESERVATION_BY_INCOME: [(f64, f64); 4] =
    [(6_800.0, 850.0), (9_200.0, 1_100.0), (12_800.0, 1_400.0), (17_200.0, 1_700.0)];

/// Base feature-weight templates per use case, in channel order
/// [safety, comfort, performance, technology, aesthetics].
pub const FEATURE_WEIGHT_TEMPLATES: [[f64; 5]; 5] = [
    [0.20, 0.28, 0.10, 0.22, 0.20],
    [0.30, 0.28, 0.08, 0.18, 0.16],
    [0.15, 0.24, 0.12, 0.20, 0.29],
    [0.12, 0.16, 0.42, 0.16, 0.14],
    [0.20, 0.23, 0.16, 0.21, 0.20],
];

const ROW_SUM_TOLERANCE: f64 = 1e-9;

fn check_row(name: &str, row: &[f64]) -> Result<(), Error> {
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::validation(format!("probability row {name} sums to {sum}, expected 1")));
    }
    if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::validation(format!("probability row {name} has an entry outside [0, 1]")));
    }
    Ok(())
}

/// Validate every probability row. Called before any persona sampling; a
/// violation aborts bank generation.
pub fn validate() -> Result<(), Error> {
    check_row("age prior", &AGE_PRIOR)?;
    check_row("income prior", &INCOME_PRIOR)?;
    check_row("household prior", &HOUSEHOLD_PRIOR)?;
    check_row("ownership prior", &OWNERSHIP_PRIOR)?;
    check_row("use-case prior", &USE_CASE_PRIOR)?;
    for (i, row) in INCOME_GIVEN_AGE.iter().enumerate() {
        check_row(&format!("income|age[{i}]"), row)?;
    }
    for (i, row) in HOUSEHOLD_GIVEN_AGE.iter().enumerate() {
        check_row(&format!("household|age[{i}]"), row)?;
    }
    for (i, row) in OWNERSHIP_GIVEN_AGE.iter().enumerate() {
        check_row(&format!("ownership|age[{i}]"), row)?;
    }
    for (i, row) in USE_CASE_GIVEN_HOUSEHOLD.iter().enumerate() {
        check_row(&format!("use-case|household[{i}]"), row)?;
    }
    for (i, row) in DECISION_STYLE_GIVEN_USE_CASE.iter().enumerate() {
        check_row(&format!("decision-style|use-case[{i}]"), row)?;
    }
    for (i, row) in TECH_AFFINITY_GIVEN_AGE.iter().enumerate() {
        check_row(&format!("tech-affinity|age[{i}]"), row)?;
    }
    for use_case in USE_CASES {
        let row: Vec<f64> = priority_pairs_for(use_case).iter().map(|&(_, p)| p).collect();
        check_row(&format!("priority-pair|{use_case:?}"), &row)?;
    }
    check_row("price-sensitivity mixture", &PRICE_SENSITIVITY.probs)?;
    check_row("aesthetic-sensitivity mixture", &AESTHETIC_SENSITIVITY.probs)?;
    check_row("patience mixture", &PATIENCE.probs)?;
    check_row("counter-strength mixture", &COUNTER_STRENGTH.probs)?;
    check_row("walkaway-threshold mixture", &WALKAWAY_THRESHOLD.probs)?;
    check_row("belief-obscurity mixture", &BELIEF_OBSCURITY.probs)?;
    check_row("brand-loyalty mixture", &BRAND_LOYALTY.probs)?;
    check_row("impulsivity mixture", &IMPULSIVITY.probs)?;
    for (i, row) in FEATURE_WEIGHT_TEMPLATES.iter().enumerate() {
        check_row(&format!("feature-weight template[{i}]"), row)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_rows_sum_to_one() {
        validate().unwrap();
    }

    #[test]
    fn income_given_age_spot_value() {
        // 36-50 row, 100-180k column.
        assert_eq!(INCOME_GIVEN_AGE[2][2], 0.43);
    }

    #[test]
    fn performance_template_spot_value() {
        assert_eq!(FEATURE_WEIGHT_TEMPLATES[3][2], 0.42);
    }
}
