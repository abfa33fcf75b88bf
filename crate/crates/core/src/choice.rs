//! Logit market-share allocation and base-year share-weight calibration.
//!
//! Relative-cost form: `s_i = b_i c_i^γ / Σ_j b_j c_j^γ` with γ < 0.
//! Shares are scale-free in costs, which keeps calibration independent of
//! units. Costs are clamped below at [`COST_FLOOR`] so large subsidies
//! cannot push a cost through zero and flip the exponent.

use thiserror::Error;

use crate::model::{Commodity, ResolvedTech};

/// Lower clamp applied to costs before exponentiation.
pub const COST_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ChoiceError {
    #[error("no price for commodity '{0}'")]
    MissingPrice(String),
    #[error("all share weights are zero")]
    AllWeightsZero,
    #[error("technology {index} has observed share {share} at zero cost")]
    ZeroObservedCostWithPositiveShare { index: usize, share: f64 },
    #[error("cost and weight vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Full unit cost of one output unit of a technology at given commodity
/// prices and carbon price (USD/tCO₂ ≡ MUSD/Mt).
///
/// `NE + Σ price_f × intensity_f + τ × net emission rate`. The net rate is
/// `(1 − κ)·e` for fossil carbon; biogenic technologies emit nothing gross
/// and earn the negative-emission value of what they capture, `−κ·e`.
/// Storage cost enters through the storage-resource input's price.
pub fn levelized_cost(
    tech: &ResolvedTech,
    prices: &[f64],
    commodities: &[Commodity],
    carbon_price: f64,
) -> Result<f64, ChoiceError> {
    let mut cost = tech.non_energy_cost;
    for &(ci, intensity) in &tech.inputs {
        let p = prices.get(ci).copied().unwrap_or(f64::NAN);
        if !p.is_finite() {
            return Err(ChoiceError::MissingPrice(commodities[ci].id.clone()));
        }
        cost += p * intensity;
    }
    let net_rate = if tech.biogenic {
        -tech.capture_fraction * tech.emission_factor
    } else {
        (1.0 - tech.capture_fraction) * tech.emission_factor
    };
    Ok(cost + carbon_price * net_rate)
}

/// Market shares for competing alternatives.
///
/// Weight-zero alternatives get share 0 exactly; remaining shares sum to 1.
pub fn logit_shares(costs: &[f64], weights: &[f64], exponent: f64) -> Result<Vec<f64>, ChoiceError> {
    if costs.len() != weights.len() {
        return Err(ChoiceError::LengthMismatch(costs.len(), weights.len()));
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(ChoiceError::AllWeightsZero);
    }
    // Normalize by the cheapest active cost: keeps c^γ well-conditioned for
    // steep exponents and makes homogeneity hold to rounding.
    let ref_cost = costs
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&c, _)| c.max(COST_FLOOR))
        .fold(f64::INFINITY, f64::min);
    let mut terms = vec![0.0; costs.len()];
    let mut total = 0.0;
    for i in 0..costs.len() {
        if weights[i] > 0.0 {
            terms[i] = weights[i] * (costs[i].max(COST_FLOOR) / ref_cost).powf(exponent);
            total += terms[i];
        }
    }
    Ok(terms.into_iter().map(|t| t / total).collect())
}

/// Aggregate price of a nest: the logit inclusive value `(Σ b c^γ)^(1/γ)`.
///
/// Collapses to the single active cost when only one alternative has
/// positive weight (with weight 1).
pub fn nest_price(costs: &[f64], weights: &[f64], exponent: f64) -> Result<f64, ChoiceError> {
    if costs.len() != weights.len() {
        return Err(ChoiceError::LengthMismatch(costs.len(), weights.len()));
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(ChoiceError::AllWeightsZero);
    }
    let ref_cost = costs
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&c, _)| c.max(COST_FLOOR))
        .fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for i in 0..costs.len() {
        if weights[i] > 0.0 {
            total += weights[i] * (costs[i].max(COST_FLOOR) / ref_cost).powf(exponent);
        }
    }
    Ok(ref_cost * total.powf(1.0 / exponent))
}

/// Share weights reproducing observed base-year shares at base costs:
/// `b_i = s_i / c_i^γ`, renormalized so the largest weight is 1.
pub fn calibrate_share_weights(
    observed_shares: &[f64],
    base_costs: &[f64],
    exponent: f64,
) -> Result<Vec<f64>, ChoiceError> {
    if observed_shares.len() != base_costs.len() {
        return Err(ChoiceError::LengthMismatch(
            observed_shares.len(),
            base_costs.len(),
        ));
    }
    let ref_cost = base_costs
        .iter()
        .zip(observed_shares)
        .filter(|(_, &s)| s > 0.0)
        .map(|(&c, _)| c)
        .fold(f64::INFINITY, f64::min);
    let mut weights = vec![0.0; observed_shares.len()];
    for i in 0..observed_shares.len() {
        let s = observed_shares[i];
        if s <= 0.0 {
            continue;
        }
        if base_costs[i] <= 0.0 {
            return Err(ChoiceError::ZeroObservedCostWithPositiveShare { index: i, share: s });
        }
        weights[i] = s / (base_costs[i] / ref_cost).powf(exponent);
    }
    let max = weights.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(ChoiceError::AllWeightsZero);
    }
    Ok(weights.into_iter().map(|w| w / max).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn test_tech(ne: f64, inputs: Vec<(usize, f64)>, e: f64, kappa: f64, biogenic: bool) -> ResolvedTech {
        ResolvedTech {
            id: "t".into(),
            sector: "s".into(),
            nest: "n".into(),
            output: 0,
            inputs,
            non_energy_cost: ne,
            emission_factor: e,
            capture_fraction: kappa,
            biogenic,
            lifetime: 30,
            capacity_factor: 0.5,
            first_available_year: 2015,
            share_weight_path: vec![],
            potential_gw: None,
            vre: false,
            calibrated_weight: 1.0,
            entrant: false,
        }
    }

    fn test_commodities() -> Vec<Commodity> {
        use crate::model::{CommodityKind, Unit};
        vec![
            Commodity { id: "out".into(), kind: CommodityKind::SecondaryCarrier, unit: Unit::Energy },
            Commodity { id: "fuel".into(), kind: CommodityKind::PrimaryResource, unit: Unit::Energy },
        ]
    }

    #[test]
    fn levelized_fuel_plus_nonenergy() {
        // NE 10, fuel price 5 at intensity 2 (η = 0.5), no carbon → 20.
        let t = test_tech(10.0, vec![(1, 2.0)], 0.0, 0.0, false);
        let c = levelized_cost(&t, &[f64::NAN, 5.0], &test_commodities(), 0.0).unwrap();
        assert_close(c, 20.0, 1e-12);
    }

    #[test]
    fn levelized_no_inputs_is_nonenergy_cost() {
        let t = test_tech(7.25, vec![], 0.0, 0.0, false);
        let c = levelized_cost(&t, &[f64::NAN, f64::NAN], &test_commodities(), 432.1).unwrap();
        assert_close(c, 7.25, 1e-12);
    }

    #[test]
    fn levelized_carbon_term() {
        // e = 0.1 t/GJ, κ = 0, τ = 100 $/t, NE = 0, no fuels → 10 $/GJ.
        let t = test_tech(0.0, vec![], 0.1, 0.0, false);
        let c = levelized_cost(&t, &[0.0, 0.0], &test_commodities(), 100.0).unwrap();
        assert_close(c, 10.0, 1e-12);
    }

    #[test]
    fn levelized_capture_and_biogenic_rates() {
        // Fossil with κ: τ applies to the uncaptured share only.
        let fossil = test_tech(0.0, vec![], 1.0, 0.9, false);
        let c = levelized_cost(&fossil, &[0.0, 0.0], &test_commodities(), 100.0).unwrap();
        assert_close(c, 10.0, 1e-12);
        // Biogenic with κ: captured carbon earns the carbon price.
        let bio = test_tech(0.0, vec![], 1.0, 0.9, true);
        let c = levelized_cost(&bio, &[0.0, 0.0], &test_commodities(), 100.0).unwrap();
        assert_close(c, -90.0, 1e-12);
    }

    #[test]
    fn levelized_missing_price_names_commodity() {
        let t = test_tech(1.0, vec![(1, 2.0)], 0.0, 0.0, false);
        let e = levelized_cost(&t, &[0.0, f64::NAN], &test_commodities(), 0.0).unwrap_err();
        assert_eq!(e, ChoiceError::MissingPrice("fuel".into()));
    }

    #[test]
    fn equal_costs_split_evenly() {
        let s = logit_shares(&[1.0, 1.0], &[1.0, 1.0], -3.0).unwrap();
        assert_close(s[0], 0.5, 1e-15);
        assert_close(s[1], 0.5, 1e-15);
    }

    #[test]
    fn cost_ratio_two_gamma_minus_three() {
        // c = (1, 2), b = (1, 1), γ = -3: terms 1 and 1/8 → shares 8/9, 1/9.
        let s = logit_shares(&[1.0, 2.0], &[1.0, 1.0], -3.0).unwrap();
        assert_close(s[0], 8.0 / 9.0, 1e-12);
        assert_close(s[1], 1.0 / 9.0, 1e-12);
    }

    #[test]
    fn zero_weight_gets_zero_share() {
        let s = logit_shares(&[5.0, 0.01], &[1.0, 0.0], -3.0).unwrap();
        assert_eq!(s, vec![1.0, 0.0]);
    }

    #[test]
    fn all_zero_weights_rejected() {
        assert_eq!(
            logit_shares(&[1.0, 1.0], &[0.0, 0.0], -3.0),
            Err(ChoiceError::AllWeightsZero)
        );
    }

    #[test]
    fn calibration_symmetric_case() {
        let w = calibrate_share_weights(&[0.5, 0.5], &[1.0, 1.0], -3.0).unwrap();
        assert_eq!(w, vec![1.0, 1.0]);
        let s = logit_shares(&[1.0, 1.0], &w, -3.0).unwrap();
        assert_close(s[0], 0.5, 1e-15);
    }

    #[test]
    fn calibration_inverts_formula_by_hand() {
        // shares (0.9, 0.1) at equal costs: b = (0.9, 0.1) → (1, 1/9).
        let w = calibrate_share_weights(&[0.9, 0.1], &[1.0, 1.0], -3.0).unwrap();
        assert_close(w[0], 1.0, 1e-15);
        assert_close(w[1], 1.0 / 9.0, 1e-15);
    }

    #[test]
    fn zero_cost_with_share_rejected() {
        let e = calibrate_share_weights(&[0.6, 0.4], &[0.0, 1.0], -3.0).unwrap_err();
        assert!(matches!(
            e,
            ChoiceError::ZeroObservedCostWithPositiveShare { index: 0, .. }
        ));
    }

    #[test]
    fn nest_price_single_alternative_is_its_cost() {
        let p = nest_price(&[7.5, 123.0], &[1.0, 0.0], -4.0).unwrap();
        assert_close(p, 7.5, 1e-12);
    }

    #[test]
    fn nest_price_between_min_and_max() {
        let p = nest_price(&[10.0, 20.0], &[1.0, 1.0], -4.0).unwrap();
        assert!(p > 9.0 && p < 20.0, "{p}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn shares_sum_to_one(
            costs in proptest::collection::vec(0.01f64..1e4, 1..8),
            seed in proptest::collection::vec(0.0f64..1.0, 1..8),
            gamma in -12.0f64..-0.5,
        ) {
            let n = costs.len().min(seed.len());
            let costs = &costs[..n];
            let mut weights: Vec<f64> = seed[..n].to_vec();
            weights[0] = weights[0].max(0.1);
            let s = logit_shares(costs, &weights, gamma).unwrap();
            let sum: f64 = s.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(s.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
        }

        #[test]
        fn homogeneity_in_costs(
            costs in proptest::collection::vec(0.01f64..1e4, 2..6),
            lambda in 0.001f64..1000.0,
            gamma in -12.0f64..-0.5,
        ) {
            let weights = vec![1.0; costs.len()];
            let a = logit_shares(&costs, &weights, gamma).unwrap();
            let scaled: Vec<f64> = costs.iter().map(|c| c * lambda).collect();
            let b = logit_shares(&scaled, &weights, gamma).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn calibration_round_trip(
            seed in proptest::collection::vec(0.05f64..1.0, 2..6),
            costs in proptest::collection::vec(0.1f64..100.0, 2..6),
            gamma in -10.0f64..-0.5,
        ) {
            let n = seed.len().min(costs.len());
            let total: f64 = seed[..n].iter().sum();
            let shares: Vec<f64> = seed[..n].iter().map(|s| s / total).collect();
            let costs = &costs[..n];
            let w = calibrate_share_weights(&shares, costs, gamma).unwrap();
            let got = logit_shares(costs, &w, gamma).unwrap();
            for (g, s) in got.iter().zip(&shares) {
                prop_assert!((g - s).abs() < 1e-9, "{} vs {}", g, s);
            }
        }
    }
}
