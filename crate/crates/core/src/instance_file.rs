//! Versioned TOML instance documents.
//!
//! ```toml
//! version = 1
//! horizon = 24
//!
//! [cost]
//! tiers = [{ first = 0, last = 7, rate = 0.2 }, { first = 8, last = 23, rate = 0.3 }]
//!
//! [[appliance]]
//! catalog = "phev"
//!
//! [[appliance]]
//! name = "heater"
//! alpha = 6
//! beta = 11
//! pattern = [1.5, 0.75]
//! ```
//!
//! `cost` takes either `tiers` or a `per_slot` list of length `horizon`; when
//! omitted the default two-tier prices apply. An appliance either names a
//! catalog entry (whose fields may be overridden) or gives `alpha`, `beta`
//! and either `pattern` or `level` with `delta`.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::catalog::ApplianceCatalog;
use crate::error::{Error, Result};
use crate::model::{Appliance, Horizon, ProblemInstance};
use crate::objective::CostModel;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    version: Spanned<u32>,
    horizon: Option<Spanned<usize>>,
    cost: Option<Spanned<RawCost>>,
    #[serde(default, rename = "appliance")]
    appliances: Vec<Spanned<RawAppliance>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCost {
    per_slot: Option<Vec<f64>>,
    tiers: Option<Vec<RawTier>>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawTier {
    first: usize,
    last: usize,
    rate: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAppliance {
    catalog: Option<String>,
    name: Option<String>,
    alpha: Option<usize>,
    beta: Option<usize>,
    delta: Option<usize>,
    level: Option<f64>,
    pattern: Option<Vec<f64>>,
}

/// Parses a document, resolving catalog references against the residential
/// catalog.
pub fn parse_instance(document: &str) -> Result<ProblemInstance> {
    parse_instance_with(document, &ApplianceCatalog::residential())
}

pub fn parse_instance_with(document: &str, catalog: &ApplianceCatalog) -> Result<ProblemInstance> {
    let raw: RawDocument = toml::from_str(document).map_err(|e| {
        let message = e.message().to_owned();
        positioned(document, e.span().unwrap_or(0..0), message)
    })?;
    let at = |span: Range<usize>, err: Error| positioned(document, span, err.to_string());

    if *raw.version.get_ref() != FORMAT_VERSION {
        return Err(positioned(
            document,
            raw.version.span(),
            format!("unsupported format version {}, expected {FORMAT_VERSION}", raw.version.get_ref()),
        ));
    }
    let horizon = match &raw.horizon {
        Some(h) => Horizon::new(*h.get_ref()).map_err(|e| at(h.span(), e))?,
        None => Horizon::HOURLY,
    };
    let cost = match &raw.cost {
        None => CostModel::tiered_default(horizon),
        Some(spanned) => resolve_cost(horizon, spanned.get_ref()).map_err(|e| at(spanned.span(), e))?,
    };
    if raw.appliances.is_empty() {
        return Err(positioned(document, 0..0, "at least one [[appliance]] is required".into()));
    }
    let appliances = raw
        .appliances
        .iter()
        .enumerate()
        .map(|(i, spanned)| {
            let appliance = resolve_appliance(i, spanned.get_ref(), catalog).map_err(|e| at(spanned.span(), e))?;
            appliance.validate(horizon).map_err(|e| at(spanned.span(), e))?;
            Ok(appliance)
        })
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(horizon, appliances, cost).map_err(|e| positioned(document, 0..0, e.to_string()))
}

fn resolve_cost(horizon: Horizon, raw: &RawCost) -> Result<CostModel> {
    match (&raw.per_slot, &raw.tiers) {
        (Some(values), None) => {
            if values.len() != horizon.slots() {
                return Err(Error::InvalidConfig(format!(
                    "per_slot has {} entries, expected {}",
                    values.len(),
                    horizon.slots()
                )));
            }
            CostModel::new(values.clone())
        }
        (None, Some(tiers)) => {
            let tiers: Vec<_> = tiers.iter().map(|t| (t.first, t.last, t.rate)).collect();
            CostModel::from_tiers(horizon, &tiers)
        }
        _ => Err(Error::InvalidConfig("cost needs exactly one of `per_slot` or `tiers`".into())),
    }
}

fn resolve_appliance(index: usize, raw: &RawAppliance, catalog: &ApplianceCatalog) -> Result<Appliance> {
    let template = raw.catalog.as_deref().map(|key| catalog.get(key)).transpose()?;
    let name = raw
        .name
        .clone()
        .or_else(|| template.map(|t| t.name.clone()))
        .unwrap_or_else(|| format!("appliance-{index}"));
    let missing = |field: &str| Error::InvalidAppliance {
        name: name.clone(),
        reason: format!("missing `{field}`"),
    };
    let alpha = raw.alpha.or(template.map(|t| t.alpha)).ok_or_else(|| missing("alpha"))?;
    let beta = raw.beta.or(template.map(|t| t.beta)).ok_or_else(|| missing("beta"))?;
    let pattern = match (&raw.pattern, raw.level, raw.delta) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::InvalidAppliance {
                name,
                reason: "give either `pattern` or `level` with `delta`, not both".into(),
            })
        }
        (Some(pattern), None, None) => pattern.clone(),
        (None, level, delta) => {
            let base = template.map(|t| t.pattern.as_slice());
            let level = level
                .or_else(|| base.map(|p| p[0]))
                .ok_or_else(|| missing("pattern` or `level"))?;
            let delta = delta.or_else(|| base.map(<[f64]>::len)).ok_or_else(|| missing("delta"))?;
            vec![level; delta]
        }
    };
    Appliance::new(name, alpha, beta, pattern)
}

fn positioned(document: &str, span: Range<usize>, message: String) -> Error {
    let offset = span.start.min(document.len());
    let before = &document[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Error::Parse { line, column, message }
}

#[derive(Serialize)]
struct OutDocument<'a> {
    version: u32,
    horizon: usize,
    cost: OutCost<'a>,
    appliance: Vec<OutAppliance<'a>>,
}

#[derive(Serialize)]
struct OutCost<'a> {
    per_slot: &'a [f64],
}

#[derive(Serialize)]
struct OutAppliance<'a> {
    name: &'a str,
    alpha: usize,
    beta: usize,
    pattern: &'a [f64],
}

/// Writes an instance with explicit per-slot prices and inline appliances.
pub fn serialize_instance(instance: &ProblemInstance) -> Result<String> {
    let doc = OutDocument {
        version: FORMAT_VERSION,
        horizon: instance.slots(),
        cost: OutCost {
            per_slot: instance.cost_model().coefficients(),
        },
        appliance: instance
            .appliances()
            .iter()
            .map(|a| OutAppliance {
                name: a.name(),
                alpha: a.alpha(),
                beta: a.beta(),
                pattern: a.pattern(),
            })
            .collect(),
    };
    toml::to_string(&doc).map_err(|e| Error::Io(format!("cannot serialize instance: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::generate_instance;

    #[test]
    fn catalog_reference() {
        let inst = parse_instance("version = 1\n[[appliance]]\ncatalog = \"phev\"\n").unwrap();
        let phev = &inst.appliances()[0];
        assert_eq!((phev.alpha(), phev.beta(), phev.delta()), (22, 29, 3));
        assert_eq!(phev.constant_level(), Some(3.3));
        assert_eq!(inst.cost_model(), &CostModel::tiered_default(Horizon::HOURLY));
    }

    #[test]
    fn tiered_costs_expand() {
        let doc = r#"
version = 1
horizon = 24

[cost]
tiers = [{ first = 0, last = 7, rate = 0.2 }, { first = 8, last = 23, rate = 0.3 }]

[[appliance]]
name = "heater"
alpha = 6
beta = 11
pattern = [1.5, 0.75]
"#;
        let inst = parse_instance(doc).unwrap();
        let mut expected = vec![0.2; 8];
        expected.extend(vec![0.3; 16]);
        assert_eq!(inst.cost_model().coefficients(), expected.as_slice());
        assert_eq!(inst.appliances()[0].pattern(), &[1.5, 0.75]);
    }

    #[test]
    fn window_violation_is_positioned() {
        let doc = "version = 1\n\n[[appliance]]\nname = \"w\"\nalpha = 3\nbeta = 5\nlevel = 1.0\ndelta = 4\n";
        match parse_instance(doc) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("beta (5) must be >= alpha + delta - 1 (6)"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let doc = "version = 1\n[[appliance]]\ncatalog = \"phev\"\ncolour = \"red\"\n";
        match parse_instance(doc) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn other_errors() {
        assert!(matches!(parse_instance("version = 2\n[[appliance]]\ncatalog = \"phev\"\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_instance("version = 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_instance("version = 1\n[[appliance]]\ncatalog = \"toaster\"\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_instance("version = 1\n[cost]\nper_slot = [0.1]\n[[appliance]]\ncatalog = \"phev\"\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_instance("version = "), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn serialized_instances_parse_back() {
        let catalog = ApplianceCatalog::residential();
        for seed in 0..10 {
            let inst = generate_instance(6, seed, &catalog).unwrap();
            let text = serialize_instance(&inst).unwrap();
            assert_eq!(parse_instance(&text).unwrap(), inst);
        }
        let odd = ProblemInstance::new(
            Horizon::new(12).unwrap(),
            vec![Appliance::new("x", 10, 14, vec![0.1 + 0.2, 1.0 / 3.0]).unwrap()],
            CostModel::new((0..12).map(|h| h as f64 / 7.0).collect()).unwrap(),
        )
        .unwrap();
        assert_eq!(parse_instance(&serialize_instance(&odd).unwrap()).unwrap(), odd);
    }
}
