//! End-use service demand.

/// Service demand from income, price and population ratios against the
/// base year: `D = D₀ · g^α · p^β · n`.
///
/// Ratios must be positive; enforced upstream by dataset validation.
pub fn service_demand(
    base: f64,
    gdppc_ratio: f64,
    price_ratio: f64,
    pop_ratio: f64,
    income_elasticity: f64,
    price_elasticity: f64,
) -> f64 {
    base * gdppc_ratio.powf(income_elasticity) * price_ratio.powf(price_elasticity) * pop_ratio
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_unit_ratios() {
        assert_eq!(service_demand(42.0, 1.0, 1.0, 1.0, 0.7, -0.3), 42.0);
    }

    #[test]
    fn unit_income_elasticity_doubles() {
        assert_eq!(service_demand(10.0, 2.0, 1.0, 1.0, 1.0, -0.3), 20.0);
    }

    #[test]
    fn combined_ratios() {
        // Independent arithmetic: 1.5^0.8 × 1.2^-0.3 × 1.1.
        let expected = 1.5f64.powf(0.8) * 1.2f64.powf(-0.3) * 1.1;
        let got = service_demand(1.0, 1.5, 1.2, 1.1, 0.8, -0.3);
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn price_elasticity_is_weakly_decreasing() {
        let low = service_demand(10.0, 1.0, 1.0, 1.0, 0.5, -0.4);
        let high = service_demand(10.0, 1.0, 1.5, 1.0, 0.5, -0.4);
        assert!(high < low);
        // β = 0: price has no effect.
        assert_eq!(
            service_demand(10.0, 1.0, 9.0, 1.0, 0.5, 0.0),
            service_demand(10.0, 1.0, 1.0, 1.0, 0.5, 0.0)
        );
    }
}
