//! Energy-cost and peak-to-average-ratio objectives, with the analytic
//! gradient and Hessian of the quadratic cost.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{load_profile, FlowConfiguration, LoadProfile};
use crate::model::{Horizon, ProblemInstance};

/// Hourly quadratic cost `C_h(L) = a_h * L^2`, coefficients in cent/kWh^2.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    coefficients: Vec<f64>,
}

impl CostModel {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coefficients.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidConfig(format!("cost coefficients must be nonnegative, got {bad}")));
        }
        Ok(CostModel { coefficients })
    }

    /// Expands inclusive slot ranges `(first, last, rate)` into one
    /// coefficient per slot. Every slot must be covered exactly once.
    pub fn from_tiers(horizon: Horizon, tiers: &[(usize, usize, f64)]) -> Result<Self> {
        let mut coefficients = vec![None; horizon.slots()];
        for &(first, last, rate) in tiers {
            if first > last || last >= horizon.slots() {
                return Err(Error::InvalidConfig(format!(
                    "tier [{first}, {last}] is not a slot range within [0, {}]",
                    horizon.slots() - 1
                )));
            }
            for slot in &mut coefficients[first..=last] {
                if slot.is_some() {
                    return Err(Error::InvalidConfig(format!("tier [{first}, {last}] overlaps another tier")));
                }
                *slot = Some(rate);
            }
        }
        let coefficients = coefficients
            .into_iter()
            .enumerate()
            .map(|(h, a)| a.ok_or_else(|| Error::InvalidConfig(format!("slot {h} is not covered by any tier"))))
            .collect::<Result<Vec<_>>>()?;
        CostModel::new(coefficients)
    }

    /// 0.2 cent/kWh^2 from midnight to 8 AM, 0.3 for the rest of the day.
    pub fn tiered_default(horizon: Horizon) -> Self {
        let h = horizon.slots();
        let coefficients = (0..h).map(|slot| if slot * 24 < 8 * h { 0.2 } else { 0.3 }).collect();
        CostModel { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Cost,
    Par,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::Cost => "cost",
            ObjectiveKind::Par => "par",
        })
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cost" => Ok(ObjectiveKind::Cost),
            "par" => Ok(ObjectiveKind::Par),
            other => Err(Error::InvalidConfig(format!("unknown objective `{other}`"))),
        }
    }
}

/// Total energy cost in cents, `sum_h a_h L_h^2`.
pub fn energy_cost(loads: &LoadProfile, model: &CostModel) -> Result<f64> {
    if loads.len() != model.len() {
        return Err(Error::LengthMismatch {
            expected: model.len(),
            found: loads.len(),
        });
    }
    Ok(loads
        .as_slice()
        .iter()
        .zip(model.coefficients())
        .map(|(l, a)| a * l * l)
        .sum())
}

/// Peak-to-average ratio `H * max_h L_h / total_energy`.
pub fn par(loads: &LoadProfile, total_energy: f64, horizon: Horizon) -> Result<f64> {
    if loads.len() != horizon.slots() {
        return Err(Error::LengthMismatch {
            expected: horizon.slots(),
            found: loads.len(),
        });
    }
    if total_energy.is_nan() || total_energy <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    Ok(horizon.slots() as f64 * loads.peak() / total_energy)
}

/// Value of the chosen objective for a load profile: cents for cost, the
/// dimensionless ratio for PAR.
pub fn evaluate(instance: &ProblemInstance, kind: ObjectiveKind, loads: &LoadProfile) -> Result<f64> {
    match kind {
        ObjectiveKind::Cost => energy_cost(loads, instance.cost_model()),
        ObjectiveKind::Par => par(loads, instance.total_energy(), instance.horizon()),
    }
}

/// Gradient of the cost with respect to every flow entry `(n, s)`,
/// including starts outside the feasible set.
pub fn cost_gradient(instance: &ProblemInstance, flows: &FlowConfiguration) -> Result<DMatrix<f64>> {
    let loads = load_profile(instance, flows)?;
    Ok(cost_gradient_at_loads(instance, &loads))
}

/// The gradient expressed through the load profile it depends on.
pub fn cost_gradient_at_loads(instance: &ProblemInstance, loads: &LoadProfile) -> DMatrix<f64> {
    let horizon = instance.horizon();
    let h_len = horizon.slots();
    let a = instance.cost_model().coefficients();
    let mut grad = DMatrix::zeros(instance.len(), h_len);
    for (n, appliance) in instance.appliances().iter().enumerate() {
        let delta = appliance.delta();
        for s in 0..h_len {
            let mut acc = 0.0;
            for h in 0..h_len {
                let offset = (h + h_len - s) % h_len;
                let in_range = offset < delta;
                let level = appliance.level_at(offset);
                debug_assert_eq!(in_range, level > 0.0);
                if in_range {
                    acc += a[h] * level * loads[h];
                }
            }
            grad[(n, s)] = 2.0 * acc;
        }
    }
    grad
}

/// Hessian of the cost over the `N*H` flow entries, indexed `n * H + s`.
/// The cost is quadratic so the Hessian does not depend on the flows.
pub fn cost_hessian(instance: &ProblemInstance) -> DMatrix<f64> {
    let h_len = instance.slots();
    let a = instance.cost_model().coefficients();
    // Row h of `map` holds the weighted contribution of every flow entry to L_h.
    let dim = instance.len() * h_len;
    let mut map = DMatrix::zeros(h_len, dim);
    let mut weighted = DMatrix::zeros(h_len, dim);
    for (n, appliance) in instance.appliances().iter().enumerate() {
        for s in 0..h_len {
            for (k, level) in appliance.pattern().iter().enumerate() {
                let h = (s + k) % h_len;
                map[(h, n * h_len + s)] = *level;
                weighted[(h, n * h_len + s)] = 2.0 * a[h] * level;
            }
        }
    }
    map.transpose() * weighted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{load_profile_from_schedule, schedule_to_flows, Schedule};
    use crate::model::Appliance;

    const H: Horizon = Horizon::HOURLY;

    fn single(appliance: Appliance) -> ProblemInstance {
        ProblemInstance::new(H, vec![appliance], CostModel::tiered_default(H)).unwrap()
    }

    fn dish_washer() -> Appliance {
        Appliance::constant("dish washer", 0, 23, 0.72, 2).unwrap()
    }

    #[test]
    fn default_tiers() {
        let model = CostModel::tiered_default(H);
        assert_eq!(&model.coefficients()[..8], &[0.2; 8]);
        assert_eq!(&model.coefficients()[8..], &[0.3; 16]);
        let tiers = CostModel::from_tiers(H, &[(0, 7, 0.2), (8, 23, 0.3)]).unwrap();
        assert_eq!(tiers, model);
        assert!(CostModel::from_tiers(H, &[(0, 7, 0.2)]).is_err());
        assert!(CostModel::from_tiers(H, &[(0, 8, 0.2), (8, 23, 0.3)]).is_err());
        assert!(CostModel::new(vec![-0.1]).is_err());
    }

    #[test]
    fn cost_values() {
        let inst = single(dish_washer());
        let loads = load_profile_from_schedule(&inst, &Schedule::new(&inst, vec![3]).unwrap()).unwrap();
        assert!((energy_cost(&loads, inst.cost_model()).unwrap() - 0.20736).abs() < 1e-12);
        assert_eq!(energy_cost(&LoadProfile::zeros(24), inst.cost_model()).unwrap(), 0.0);
        assert!(energy_cost(&LoadProfile::zeros(23), inst.cost_model()).is_err());

        let inst = single(Appliance::constant("phev", 22, 29, 3.3, 3).unwrap());
        let loads = load_profile_from_schedule(&inst, &Schedule::new(&inst, vec![22]).unwrap()).unwrap();
        assert!((energy_cost(&loads, inst.cost_model()).unwrap() - 8.712).abs() < 1e-12);
    }

    #[test]
    fn par_values() {
        let inst = single(dish_washer());
        let loads = load_profile_from_schedule(&inst, &Schedule::new(&inst, vec![10]).unwrap()).unwrap();
        assert!((par(&loads, 1.44, H).unwrap() - 12.0).abs() < 1e-12);
        let flat = LoadProfile::new(vec![0.5; 24]);
        assert!((par(&flat, 12.0, H).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(par(&flat, 0.0, H), Err(Error::ZeroEnergy));

        let pair = ProblemInstance::new(
            H,
            vec![
                Appliance::constant("u1", 0, 5, 1.0, 2).unwrap(),
                Appliance::constant("u2", 9, 14, 1.0, 3).unwrap(),
            ],
            CostModel::tiered_default(H),
        )
        .unwrap();
        let loads = load_profile_from_schedule(&pair, &Schedule::new(&pair, vec![2, 11]).unwrap()).unwrap();
        assert!((par(&loads, pair.total_energy(), H).unwrap() - 4.8).abs() < 1e-12);
    }

    #[test]
    fn gradient_values() {
        let inst = single(dish_washer());
        let zero = cost_gradient_at_loads(&inst, &LoadProfile::zeros(24));
        assert!(zero.iter().all(|g| *g == 0.0));

        let flows = schedule_to_flows(&inst, &Schedule::new(&inst, vec![3]).unwrap()).unwrap();
        let grad = cost_gradient(&inst, &flows).unwrap();
        assert!((grad[(0, 3)] - 0.41472).abs() < 1e-12);
    }

    #[test]
    fn hessian_values() {
        let inst = single(dish_washer());
        let hess = cost_hessian(&inst);
        assert!((hess[(3, 3)] - 0.41472).abs() < 1e-12);
        // ranges {3,4} and {10,11} never meet
        assert_eq!(hess[(3, 10)], 0.0);
        assert_eq!(hess, hess.transpose());
    }

    #[test]
    fn objective_names() {
        assert_eq!("cost".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::Cost);
        assert_eq!("PAR".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::Par);
        assert!("peak".parse::<ObjectiveKind>().is_err());
        assert_eq!(ObjectiveKind::Par.to_string(), "par");
    }
}
