//! Appliance templates and seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Appliance, Horizon, ProblemInstance};
use crate::objective::CostModel;

#[derive(Debug, Clone, PartialEq)]
pub struct ApplianceTemplate {
    /// Short identifier used in instance files.
    pub key: String,
    pub name: String,
    pub alpha: usize,
    pub beta: usize,
    pub pattern: Vec<f64>,
}

impl ApplianceTemplate {
    pub fn constant(key: &str, name: &str, alpha: usize, beta: usize, level: f64, delta: usize) -> Self {
        ApplianceTemplate {
            key: key.to_owned(),
            name: name.to_owned(),
            alpha,
            beta,
            pattern: vec![level; delta],
        }
    }

    pub fn instantiate(&self) -> Result<Appliance> {
        Appliance::new(self.name.clone(), self.alpha, self.beta, self.pattern.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplianceCatalog {
    entries: Vec<ApplianceTemplate>,
}

impl ApplianceCatalog {
    pub fn new(entries: Vec<ApplianceTemplate>) -> Self {
        ApplianceCatalog { entries }
    }

    /// Household appliances on an hourly grid. The PHEV charges between
    /// 10 PM and 5 AM.
    pub fn residential() -> Self {
        ApplianceCatalog::new(vec![
            ApplianceTemplate::constant("dish_washer", "Dish Washer", 0, 23, 0.72, 2),
            ApplianceTemplate::constant("washing_machine_energy_star", "Washing Machine (Energy-Star)", 0, 23, 0.4967, 3),
            ApplianceTemplate::constant("washing_machine_regular", "Washing Machine (Regular)", 0, 23, 0.6467, 3),
            ApplianceTemplate::constant("clothes_dryer", "Clothes Dryer", 0, 23, 0.625, 4),
            ApplianceTemplate::constant("phev", "Plug-in Hybrid Electric Vehicle", 22, 29, 3.3, 3),
        ])
    }

    pub fn entries(&self) -> &[ApplianceTemplate] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Result<&ApplianceTemplate> {
        let wanted = key.to_ascii_lowercase().replace(['-', ' '], "_");
        self.entries
            .iter()
            .find(|t| t.key == wanted)
            .ok_or_else(|| Error::UnknownCatalogEntry(key.to_owned()))
    }
}

impl Default for ApplianceCatalog {
    fn default() -> Self {
        ApplianceCatalog::residential()
    }
}

/// `n` appliances drawn uniformly with replacement from the catalog, on an
/// hourly horizon with the default two-tier prices.
///
/// Draws come from ChaCha8 seeded with `seed`, one `random_range(0..len)`
/// per appliance, so `(n, seed, catalog)` always gives the same instance.
pub fn generate_instance(n: usize, seed: u64, catalog: &ApplianceCatalog) -> Result<ProblemInstance> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    if n == 0 {
        return Err(Error::InvalidInstance("at least one appliance is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let appliances = (0..n)
        .map(|_| catalog.entries[rng.random_range(0..catalog.len())].instantiate())
        .collect::<Result<Vec<_>>>()?;
    let horizon = Horizon::HOURLY;
    ProblemInstance::new(horizon, appliances, CostModel::tiered_default(horizon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residential_rows() {
        let catalog = ApplianceCatalog::residential();
        assert_eq!(catalog.len(), 5);
        let phev = catalog.get("phev").unwrap().instantiate().unwrap();
        assert_eq!((phev.alpha(), phev.beta(), phev.delta()), (22, 29, 3));
        assert_eq!(phev.constant_level(), Some(3.3));
        assert_eq!(catalog.get("Washing-Machine-Regular").unwrap().pattern, vec![0.6467; 3]);
        assert_eq!(catalog.get("washing_machine_energy_star").unwrap().pattern, vec![0.4967; 3]);
        assert!(catalog.get("toaster").is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let catalog = ApplianceCatalog::residential();
        let a = generate_instance(3, 42, &catalog).unwrap();
        let b = generate_instance(3, 42, &catalog).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let first = generate_instance(5, 0, &catalog).unwrap();
        assert!((1..20).any(|s| generate_instance(5, s, &catalog).unwrap() != first));
    }

    #[test]
    fn generation_errors() {
        let catalog = ApplianceCatalog::residential();
        assert!(generate_instance(0, 1, &catalog).is_err());
        assert_eq!(generate_instance(2, 1, &ApplianceCatalog::new(vec![])), Err(Error::EmptyCatalog));
    }

    #[test]
    fn draws_are_uniform() {
        // chi-square goodness of fit, 4 degrees of freedom; 18.47 is the
        // 0.999 quantile
        let catalog = ApplianceCatalog::residential();
        let inst = generate_instance(1000, 7, &catalog).unwrap();
        let mut counts = [0usize; 5];
        for appliance in inst.appliances() {
            let idx = catalog.entries().iter().position(|t| t.name == appliance.name()).unwrap();
            counts[idx] += 1;
        }
        let expected = 200.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 18.47, "counts {counts:?}, chi2 {chi2}");
        // and each count within 3 sigma of the binomial mean
        let sigma = (1000.0f64 * 0.2 * 0.8).sqrt();
        assert!(counts.iter().all(|&c| (c as f64 - expected).abs() <= 3.0 * sigma));
    }
}
