//! JSON case-file reading and writing.
//!
//! ```json
//! {"base_mva":100,
//!  "buses":[{"id":1,"name":"..."}],
//!  "lines":[{"id":1,"from":1,"to":2,"b_pu":..,"rating_mw":..,"lambda_per_yr":..,"mu_per_yr":..}],
//!  "generators":[{"id":1,"bus":1,"pmin_mw":..,"pmax_mw":..,"lambda_per_yr":..,"mu_per_yr":..}],
//!  "loads":[{"bus":1,"peak_mw":..}],
//!  "profile_8760":[..]}
//! ```
//!
//! `profile_8760` and `variant_label` are optional. Ids may be arbitrary
//! unique positive integers on input; they are renumbered to 1..N in
//! ascending order and all references are rewritten.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{Bus, BusId, GenId, Generator, Line, LineId, Load, NetworkCase};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BusRecord {
    id: u32,
    name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRecord {
    id: u32,
    from: u32,
    to: u32,
    b_pu: f64,
    rating_mw: f64,
    lambda_per_yr: f64,
    mu_per_yr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorRecord {
    id: u32,
    bus: u32,
    pmin_mw: f64,
    pmax_mw: f64,
    lambda_per_yr: f64,
    mu_per_yr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadRecord {
    bus: u32,
    peak_mw: f64,
}

#[derive(Serialize)]
struct CaseDocument<'a> {
    base_mva: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant_label: Option<&'a str>,
    buses: Vec<BusRecord>,
    lines: Vec<LineRecord>,
    generators: Vec<GeneratorRecord>,
    loads: Vec<LoadRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile_8760: Option<&'a [f64]>,
}

const TOP_LEVEL_FIELDS: [&str; 7] = [
    "base_mva",
    "variant_label",
    "buses",
    "lines",
    "generators",
    "loads",
    "profile_8760",
];

/// Parses and validates a case document.
pub fn load_case(source: &str) -> Result<NetworkCase> {
    let doc: Value =
        serde_json::from_str(source).map_err(|e| Error::parse("document", e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::parse("document", "top level must be an object"))?;
    if let Some(unknown) = obj.keys().find(|k| !TOP_LEVEL_FIELDS.contains(&k.as_str())) {
        return Err(Error::parse("document", format!("unknown field `{unknown}`")));
    }

    let base_mva = obj
        .get("base_mva")
        .ok_or_else(|| Error::parse("document", "missing field `base_mva`"))?
        .as_f64()
        .ok_or_else(|| Error::parse("base_mva", "expected a number"))?;
    let variant_label = match obj.get("variant_label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(Error::parse("variant_label", "expected a string")),
    };

    let buses: Vec<BusRecord> = records(obj, "buses")?;
    let lines: Vec<LineRecord> = records(obj, "lines")?;
    let generators: Vec<GeneratorRecord> = records(obj, "generators")?;
    let loads: Vec<LoadRecord> = records(obj, "loads")?;
    let profile = match obj.get("profile_8760") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            serde_json::from_value::<Vec<f64>>(v.clone())
                .map_err(|e| Error::parse("profile_8760", e.to_string()))?,
        ),
    };

    // Renumber buses to 1..N by ascending raw id.
    let mut bus_map: BTreeMap<u32, BusId> = BTreeMap::new();
    let mut sorted_buses = buses;
    sorted_buses.sort_by_key(|b| b.id);
    for (i, b) in sorted_buses.iter().enumerate() {
        if bus_map.insert(b.id, BusId::from_index(i)).is_some() {
            return Err(Error::validation(format!("bus {}", b.id), "duplicate bus id"));
        }
    }
    let resolve = |raw: u32, record: String| -> Result<BusId> {
        bus_map
            .get(&raw)
            .copied()
            .ok_or_else(|| Error::validation(record, format!("references unknown bus {raw}")))
    };

    let model_buses = sorted_buses
        .iter()
        .enumerate()
        .map(|(i, b)| Bus {
            id: BusId::from_index(i),
            name: b.name.clone(),
        })
        .collect();

    let mut sorted_lines = lines;
    sorted_lines.sort_by_key(|l| l.id);
    check_unique(sorted_lines.iter().map(|l| l.id), "line")?;
    let model_lines = sorted_lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            Ok(Line {
                id: LineId::from_index(i),
                from_bus: resolve(l.from, format!("line {}", l.id))?,
                to_bus: resolve(l.to, format!("line {}", l.id))?,
                susceptance: l.b_pu,
                rating: l.rating_mw,
                failure_rate: l.lambda_per_yr,
                repair_rate: l.mu_per_yr,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sorted_gens = generators;
    sorted_gens.sort_by_key(|g| g.id);
    check_unique(sorted_gens.iter().map(|g| g.id), "generator")?;
    let model_gens = sorted_gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Ok(Generator {
                id: GenId::from_index(i),
                bus: resolve(g.bus, format!("generator {}", g.id))?,
                p_min: g.pmin_mw,
                p_max: g.pmax_mw,
                failure_rate: g.lambda_per_yr,
                repair_rate: g.mu_per_yr,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let model_loads = loads
        .iter()
        .enumerate()
        .map(|(i, l)| {
            Ok(Load {
                bus: resolve(l.bus, format!("loads[{i}]"))?,
                p_peak: l.peak_mw,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    NetworkCase::new(
        base_mva,
        model_buses,
        model_lines,
        model_gens,
        model_loads,
        profile,
        variant_label,
    )
}

pub fn load_case_file(path: impl AsRef<Path>) -> Result<NetworkCase> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    load_case(&text)
}

/// Serializes a case in the canonical (pretty, normalized) layout.
pub fn to_json(case: &NetworkCase) -> String {
    let doc = CaseDocument {
        base_mva: case.base_mva(),
        variant_label: case.variant_label(),
        buses: case
            .buses()
            .iter()
            .map(|b| BusRecord {
                id: b.id.0,
                name: b.name.clone(),
            })
            .collect(),
        lines: case
            .lines()
            .iter()
            .map(|l| LineRecord {
                id: l.id.0,
                from: l.from_bus.0,
                to: l.to_bus.0,
                b_pu: l.susceptance,
                rating_mw: l.rating,
                lambda_per_yr: l.failure_rate,
                mu_per_yr: l.repair_rate,
            })
            .collect(),
        generators: case
            .generators()
            .iter()
            .map(|g| GeneratorRecord {
                id: g.id.0,
                bus: g.bus.0,
                pmin_mw: g.p_min,
                pmax_mw: g.p_max,
                lambda_per_yr: g.failure_rate,
                mu_per_yr: g.repair_rate,
            })
            .collect(),
        loads: case
            .loads()
            .iter()
            .map(|l| LoadRecord {
                bus: l.bus.0,
                peak_mw: l.p_peak,
            })
            .collect(),
        profile_8760: case.load_profile(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("case document serializes");
    s.push('\n');
    s
}

fn records<T: DeserializeOwned>(obj: &serde_json::Map<String, Value>, field: &str) -> Result<Vec<T>> {
    let arr = match obj.get(field) {
        Some(Value::Array(a)) => a,
        Some(_) => return Err(Error::parse(field, "expected an array")),
        None => return Err(Error::parse("document", format!("missing field `{field}`"))),
    };
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value(v.clone()).map_err(|e| Error::parse(format!("{field}[{i}]"), e.to_string()))
        })
        .collect()
}

fn check_unique(ids: impl Iterator<Item = u32>, what: &str) -> Result<()> {
    let mut seen = HashMap::new();
    for id in ids {
        if seen.insert(id, ()).is_some() {
            return Err(Error::validation(format!("{what} {id}"), format!("duplicate {what} id")));
        }
    }
    Ok(())
}
