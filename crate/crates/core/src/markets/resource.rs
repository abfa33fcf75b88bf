//! Graded resource supply pricing.

use crate::model::GradedResource;

/// Scarcity multiplier applied to the final grade cost once the supply
/// curve is exhausted.
pub const SCARCITY_MULTIPLIER: f64 = 10.0;

/// Fraction of each grade over which the price blends into the next
/// grade's cost. Keeps the supply curve continuous so the damped price
/// iteration can settle on a grade boundary instead of flip-flopping
/// across the step.
const BLEND_BAND: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceQuote {
    /// MUSD per unit of the marginal grade.
    pub price: f64,
    /// Demand ran past the final grade.
    pub scarce: bool,
}

/// Price of the marginal grade needed to meet `demand` given prior
/// depletion. For annually renewable resources `cumulative` is ignored;
/// for depletable ones the position on the curve is `cumulative + demand`
/// (callers integrate demand over the period step).
///
/// Demand beyond the final grade prices at the final-grade cost times
/// [`SCARCITY_MULTIPLIER`] and flags scarcity.
pub fn resource_price(resource: &GradedResource, demand: f64, cumulative: f64) -> ResourceQuote {
    let position = if resource.cumulative_tracking {
        cumulative + demand
    } else {
        demand
    };
    let grades = &resource.grades;
    let last_cost = grades[grades.len() - 1].cost;
    let ceiling = last_cost * SCARCITY_MULTIPLIER;

    let mut boundary = 0.0;
    for (g, grade) in grades.iter().enumerate() {
        let lower = boundary;
        boundary += grade.quantity;
        if position <= boundary {
            let next_cost = grades.get(g + 1).map(|n| n.cost).unwrap_or(ceiling);
            let band_start = boundary - BLEND_BAND * grade.quantity;
            let price = if position > band_start {
                let theta = (position - band_start) / (boundary - band_start);
                grade.cost + theta * (next_cost - grade.cost)
            } else {
                grade.cost
            };
            let _ = lower;
            return ResourceQuote {
                price,
                scarce: false,
            };
        }
    }
    ResourceQuote {
        price: ceiling,
        scarce: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Grade;

    fn two_grade(depletable: bool) -> GradedResource {
        GradedResource {
            commodity: "fuel".into(),
            grades: vec![
                Grade {
                    quantity: 10.0,
                    cost: 2.0,
                },
                Grade {
                    quantity: 10.0,
                    cost: 5.0,
                },
            ],
            cumulative_tracking: depletable,
        }
    }

    #[test]
    fn zero_demand_prices_cheapest_grade() {
        let q = resource_price(&two_grade(false), 0.0, 0.0);
        assert_eq!(q.price, 2.0);
        assert!(!q.scarce);
    }

    #[test]
    fn demand_past_first_grade_prices_second() {
        let q = resource_price(&two_grade(false), 12.0, 0.0);
        assert_eq!(q.price, 5.0);
        assert!(!q.scarce);
    }

    #[test]
    fn depletion_shifts_marginal_grade() {
        let q = resource_price(&two_grade(true), 1.0, 10.0);
        assert_eq!(q.price, 5.0);
    }

    #[test]
    fn renewable_ignores_cumulative() {
        let q = resource_price(&two_grade(false), 1.0, 10.0);
        assert_eq!(q.price, 2.0);
    }

    #[test]
    fn beyond_final_grade_is_scarce_at_ten_times() {
        let q = resource_price(&two_grade(false), 25.0, 0.0);
        assert_eq!(q.price, 50.0);
        assert!(q.scarce);
    }

    #[test]
    fn blend_band_is_continuous_and_monotone() {
        let r = two_grade(false);
        // Inside the last 10% of grade 1 the price blends from 2 to 5.
        let mid = resource_price(&r, 9.5, 0.0).price;
        assert!((mid - 3.5).abs() < 1e-12, "{mid}");
        let mut prev = 0.0;
        for i in 0..200 {
            let d = i as f64 * 0.11;
            let p = resource_price(&r, d, 0.0).price;
            assert!(p >= prev - 1e-12, "non-monotone at {d}: {p} < {prev}");
            prev = p;
        }
    }
}
