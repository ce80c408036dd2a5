#![allow(dead_code)]

use atomsched::{Appliance, CostModel, Horizon, ProblemInstance};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

/// Loads straight from the definition: slot `h` sees appliance `n` started
/// at `s` when `(h - s) mod H` falls inside the operation.
pub fn naive_loads(instance: &ProblemInstance, flows: &DMatrix<f64>) -> Vec<f64> {
    let h_len = instance.slots();
    (0..h_len)
        .map(|h| {
            let mut total = 0.0;
            for (n, appliance) in instance.appliances().iter().enumerate() {
                for s in 0..h_len {
                    let offset = (h + h_len - s) % h_len;
                    if offset < appliance.delta() {
                        total += flows[(n, s)] * appliance.pattern()[offset];
                    }
                }
            }
            total
        })
        .collect()
}

pub fn naive_cost(instance: &ProblemInstance, flows: &DMatrix<f64>) -> f64 {
    naive_loads(instance, flows)
        .iter()
        .zip(instance.cost_model().coefficients())
        .map(|(l, a)| a * l * l)
        .sum()
}

/// Random point of the relaxed feasible set: nonnegative weights on each
/// start set, normalized per row. Some rows are made sparse.
pub fn random_flows(instance: &ProblemInstance, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(instance.len(), instance.slots());
    for (n, set) in instance.start_sets().iter().enumerate() {
        let sparse = rng.random_bool(0.3);
        let weights: Vec<f64> = set
            .iter()
            .map(|_| if sparse && rng.random_bool(0.7) { 0.0 } else { rng.random::<f64>() })
            .collect();
        let mut total: f64 = weights.iter().sum();
        if total == 0.0 {
            total = 1.0;
            m[(n, set.as_slice()[0] % instance.slots())] = 1.0;
        }
        for (s, w) in set.iter().zip(&weights) {
            m[(n, s)] += w / total;
        }
    }
    m
}

fn appliance(h: usize) -> impl Strategy<Value = Appliance> {
    (1..=h.min(6))
        .prop_flat_map(move |delta| {
            (
                0..h,
                0..h,
                proptest::collection::vec(0.05f64..4.0, delta),
            )
        })
        .prop_map(move |(alpha, extra, pattern)| {
            let delta = pattern.len();
            let span = (delta - 1 + extra).clamp(1, h - 1);
            Appliance::new("p", alpha, alpha + span, pattern).unwrap()
        })
}

/// Small random instances: horizon 4..=24, up to `max_users` appliances,
/// windows that may wrap past midnight, non-constant patterns and random
/// positive prices.
pub fn instances(max_users: usize) -> impl Strategy<Value = ProblemInstance> {
    (4usize..=24)
        .prop_flat_map(move |h| {
            (
                Just(h),
                proptest::collection::vec(appliance(h), 1..=max_users),
                proptest::collection::vec(0.01f64..1.0, h),
            )
        })
        .prop_map(|(h, appliances, prices)| {
            let horizon = Horizon::new(h).unwrap();
            ProblemInstance::new(horizon, appliances, CostModel::new(prices).unwrap()).unwrap()
        })
}
