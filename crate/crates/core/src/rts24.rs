//! IEEE RTS-24 (single area) network data, its chronological load model and
//! the eight line-addition variants.
//!
//! Buses 101..124 of the published data are numbered 1..24 here. Lines and
//! transformers follow the published branch order; parallel circuits are
//! separate lines. Failure data are the permanent outage rates and repair
//! durations; transient outages are not modeled. Unit minimum outputs are
//! zero because unit commitment is not modeled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bus, BusId, GenId, Generator, Line, LineId, Load, NetworkCase, HOURS_PER_YEAR};

/// Shipped case file (constant peak load).
pub const RTS24_JSON: &str = include_str!("../data/rts24.json");
/// Same network with the 8760-hour chronological load profile.
pub const RTS24_HOURLY_JSON: &str = include_str!("../data/rts24_hourly.json");
/// Candidate lines, donors and per-variant line sets.
pub const VARIANTS_JSON: &str = include_str!("../data/rts24_variants.json");

/// (from, to, x_pu, rating_mw, outages_per_yr, repair_hours)
const BRANCHES: [(u32, u32, f64, f64, f64, f64); 38] = [
    (1, 2, 0.0139, 175.0, 0.24, 16.0),
    (1, 3, 0.2112, 175.0, 0.51, 10.0),
    (1, 5, 0.0845, 175.0, 0.33, 10.0),
    (2, 4, 0.1267, 175.0, 0.39, 10.0),
    (2, 6, 0.1920, 175.0, 0.48, 10.0),
    (3, 9, 0.1190, 175.0, 0.38, 10.0),
    (3, 24, 0.0839, 400.0, 0.02, 768.0),
    (4, 9, 0.1037, 175.0, 0.36, 10.0),
    (5, 10, 0.0883, 175.0, 0.34, 10.0),
    (6, 10, 0.0605, 175.0, 0.33, 35.0),
    (7, 8, 0.0614, 175.0, 0.30, 10.0),
    (8, 9, 0.1651, 175.0, 0.44, 10.0),
    (8, 10, 0.1651, 175.0, 0.44, 10.0),
    (9, 11, 0.0839, 400.0, 0.02, 768.0),
    (9, 12, 0.0839, 400.0, 0.02, 768.0),
    (10, 11, 0.0839, 400.0, 0.02, 768.0),
    (10, 12, 0.0839, 400.0, 0.02, 768.0),
    (11, 13, 0.0476, 500.0, 0.40, 11.0),
    (11, 14, 0.0418, 500.0, 0.39, 11.0),
    (12, 13, 0.0476, 500.0, 0.40, 11.0),
    (12, 23, 0.0966, 500.0, 0.52, 11.0),
    (13, 23, 0.0865, 500.0, 0.49, 11.0),
    (14, 16, 0.0389, 500.0, 0.38, 11.0),
    (15, 16, 0.0173, 500.0, 0.33, 11.0),
    (15, 21, 0.0490, 500.0, 0.41, 11.0),
    (15, 21, 0.0490, 500.0, 0.41, 11.0),
    (15, 24, 0.0519, 500.0, 0.41, 11.0),
    (16, 17, 0.0259, 500.0, 0.35, 11.0),
    (16, 19, 0.0231, 500.0, 0.34, 11.0),
    (17, 18, 0.0144, 500.0, 0.32, 11.0),
    (17, 22, 0.1053, 500.0, 0.54, 11.0),
    (18, 21, 0.0259, 500.0, 0.35, 11.0),
    (18, 21, 0.0259, 500.0, 0.35, 11.0),
    (19, 20, 0.0396, 500.0, 0.38, 11.0),
    (19, 20, 0.0396, 500.0, 0.38, 11.0),
    (20, 23, 0.0216, 500.0, 0.34, 11.0),
    (20, 23, 0.0216, 500.0, 0.34, 11.0),
    (21, 22, 0.0678, 500.0, 0.45, 11.0),
];

/// (bus, peak MW)
const LOADS: [(u32, f64); 17] = [
    (1, 108.0),
    (2, 97.0),
    (3, 180.0),
    (4, 74.0),
    (5, 71.0),
    (6, 136.0),
    (7, 125.0),
    (8, 171.0),
    (9, 175.0),
    (10, 195.0),
    (13, 265.0),
    (14, 194.0),
    (15, 317.0),
    (16, 100.0),
    (18, 333.0),
    (19, 181.0),
    (20, 128.0),
];

/// Unit types: (capacity MW, MTTF h, MTTR h)
const U12: (f64, f64, f64) = (12.0, 2940.0, 60.0);
const U20: (f64, f64, f64) = (20.0, 450.0, 50.0);
const U50: (f64, f64, f64) = (50.0, 1980.0, 20.0);
const U76: (f64, f64, f64) = (76.0, 1960.0, 40.0);
const U100: (f64, f64, f64) = (100.0, 1200.0, 50.0);
const U155: (f64, f64, f64) = (155.0, 960.0, 40.0);
const U197: (f64, f64, f64) = (197.0, 950.0, 50.0);
const U350: (f64, f64, f64) = (350.0, 1150.0, 100.0);
const U400: (f64, f64, f64) = (400.0, 1100.0, 150.0);

const UNITS: [(u32, (f64, f64, f64)); 32] = [
    (1, U20),
    (1, U20),
    (1, U76),
    (1, U76),
    (2, U20),
    (2, U20),
    (2, U76),
    (2, U76),
    (7, U100),
    (7, U100),
    (7, U100),
    (13, U197),
    (13, U197),
    (13, U197),
    (15, U12),
    (15, U12),
    (15, U12),
    (15, U12),
    (15, U12),
    (15, U155),
    (16, U155),
    (18, U400),
    (21, U400),
    (22, U50),
    (22, U50),
    (22, U50),
    (22, U50),
    (22, U50),
    (22, U50),
    (23, U155),
    (23, U155),
    (23, U350),
];

/// Weekly peak as a percentage of the annual peak, weeks 1..52.
const WEEKLY_PEAK: [f64; 52] = [
    86.2, 90.0, 87.8, 83.4, 88.0, 84.1, 83.2, 80.6, 74.0, 73.7, 71.5, 72.7, 70.4, 75.0, 72.1, 80.0,
    75.4, 83.7, 87.0, 88.0, 85.6, 81.1, 90.0, 88.7, 89.6, 86.1, 75.5, 81.6, 80.1, 88.0, 72.2, 77.6,
    80.0, 72.9, 72.6, 70.5, 78.0, 69.5, 72.4, 72.4, 74.3, 74.4, 80.0, 88.1, 88.5, 90.9, 94.0, 89.0,
    94.2, 97.0, 100.0, 95.2,
];

/// Daily peak as a percentage of the weekly peak, Monday first.
const DAILY_PEAK: [f64; 7] = [93.0, 100.0, 98.0, 96.0, 94.0, 77.0, 75.0];

/// Hourly load as a percentage of the daily peak. Columns: winter weekday,
/// winter weekend, summer weekday, summer weekend, spring/fall weekday,
/// spring/fall weekend.
const HOURLY: [[f64; 6]; 24] = [
    [67.0, 78.0, 64.0, 74.0, 63.0, 75.0],
    [63.0, 72.0, 60.0, 70.0, 62.0, 73.0],
    [60.0, 68.0, 58.0, 66.0, 60.0, 69.0],
    [59.0, 66.0, 56.0, 65.0, 58.0, 66.0],
    [59.0, 64.0, 56.0, 64.0, 59.0, 65.0],
    [60.0, 65.0, 58.0, 62.0, 65.0, 65.0],
    [74.0, 66.0, 64.0, 62.0, 72.0, 68.0],
    [86.0, 70.0, 76.0, 66.0, 85.0, 74.0],
    [95.0, 80.0, 87.0, 81.0, 95.0, 83.0],
    [96.0, 88.0, 95.0, 86.0, 99.0, 89.0],
    [96.0, 90.0, 99.0, 91.0, 100.0, 92.0],
    [95.0, 91.0, 100.0, 93.0, 99.0, 94.0],
    [95.0, 90.0, 99.0, 93.0, 93.0, 91.0],
    [95.0, 88.0, 100.0, 92.0, 92.0, 90.0],
    [93.0, 87.0, 100.0, 91.0, 90.0, 90.0],
    [94.0, 87.0, 97.0, 91.0, 88.0, 86.0],
    [99.0, 91.0, 96.0, 92.0, 90.0, 85.0],
    [100.0, 100.0, 96.0, 94.0, 92.0, 88.0],
    [100.0, 99.0, 93.0, 95.0, 96.0, 92.0],
    [96.0, 97.0, 92.0, 95.0, 98.0, 100.0],
    [91.0, 94.0, 92.0, 100.0, 96.0, 97.0],
    [83.0, 92.0, 93.0, 93.0, 90.0, 95.0],
    [73.0, 87.0, 87.0, 88.0, 80.0, 90.0],
    [63.0, 81.0, 72.0, 80.0, 70.0, 85.0],
];

/// Builds the base network from the tables above.
pub fn base_case(with_profile: bool) -> NetworkCase {
    let buses = (1..=24)
        .map(|i| Bus {
            id: BusId(i),
            name: format!("Bus {}", 100 + i),
        })
        .collect();
    let lines = BRANCHES
        .iter()
        .enumerate()
        .map(|(k, &(from, to, x, rating, lambda, repair_h))| Line {
            id: LineId::from_index(k),
            from_bus: BusId(from),
            to_bus: BusId(to),
            susceptance: 1.0 / x,
            rating,
            failure_rate: lambda,
            repair_rate: HOURS_PER_YEAR / repair_h,
        })
        .collect();
    let generators = UNITS
        .iter()
        .enumerate()
        .map(|(k, &(bus, (cap, mttf, mttr)))| Generator {
            id: GenId::from_index(k),
            bus: BusId(bus),
            p_min: 0.0,
            p_max: cap,
            failure_rate: HOURS_PER_YEAR / mttf,
            repair_rate: HOURS_PER_YEAR / mttr,
        })
        .collect();
    let loads = LOADS
        .iter()
        .map(|&(bus, p)| Load {
            bus: BusId(bus),
            p_peak: p,
        })
        .collect();
    let profile = with_profile.then(hourly_profile);
    NetworkCase::new(
        100.0,
        buses,
        lines,
        generators,
        loads,
        profile,
        Some("Case 1".to_string()),
    )
    .expect("built-in RTS-24 data is valid")
}

/// 8760 per-unit hourly factors of the annual peak. The year starts on a
/// Monday; day 365 reuses the week-52 Monday shape.
pub fn hourly_profile() -> Vec<f64> {
    let mut out = Vec::with_capacity(8760);
    for day in 0..365usize {
        let week = (day / 7).min(51);
        let weekday = day % 7;
        let week_no = week + 1;
        let season = match week_no {
            1..=8 | 44..=52 => 0,
            18..=30 => 1,
            _ => 2,
        };
        let weekend = weekday >= 5;
        let col = season * 2 + usize::from(weekend);
        for hour in HOURLY.iter() {
            out.push(WEEKLY_PEAK[week] / 100.0 * DAILY_PEAK[weekday] / 100.0 * hour[col] / 100.0);
        }
    }
    out
}

/// A line the variants may add, with the existing line it copies
/// electrical and reliability parameters from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLine {
    pub key: String,
    pub from: u32,
    pub to: u32,
    pub donor_line: u32,
    pub donor_reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub variant: u8,
    pub label: String,
    /// Candidate keys, added in this order.
    pub added: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantManifest {
    pub candidate_lines: Vec<CandidateLine>,
    pub variants: Vec<VariantSpec>,
    /// Buses whose incident lines are not used as initiating events.
    pub event_exclusions: Vec<u32>,
}

impl VariantManifest {
    pub fn builtin() -> Self {
        serde_json::from_str(VARIANTS_JSON).expect("built-in variant manifest parses")
    }

    pub fn event_exclusions(&self) -> Vec<BusId> {
        self.event_exclusions.iter().map(|&b| BusId(b)).collect()
    }
}

/// Returns `base` with the candidate lines of `variant` (1..=8) appended.
pub fn build_variant(base: &NetworkCase, variant: u8) -> Result<NetworkCase> {
    build_variant_with(base, variant, &VariantManifest::builtin())
}

pub fn build_variant_with(
    base: &NetworkCase,
    variant: u8,
    manifest: &VariantManifest,
) -> Result<NetworkCase> {
    let spec = manifest
        .variants
        .iter()
        .find(|v| v.variant == variant)
        .ok_or_else(|| Error::Domain(format!("variant {variant} is outside 1..=8")))?;
    let mut next_id = base.line_count();
    let mut extra = Vec::new();
    for key in &spec.added {
        let cand = manifest
            .candidate_lines
            .iter()
            .find(|c| &c.key == key)
            .ok_or_else(|| Error::Domain(format!("variant {variant} names unknown line {key}")))?;
        let donor = base.line(LineId(cand.donor_line))?;
        extra.push(Line {
            id: LineId::from_index(next_id),
            from_bus: BusId(cand.from),
            to_bus: BusId(cand.to),
            ..donor.clone()
        });
        next_id += 1;
    }
    base.with_extra_lines(extra, Some(spec.label.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_file::{load_case, to_json};
    use crate::topology::incident_lines;

    #[test]
    fn base_case_matches_published_totals() {
        let case = base_case(false);
        assert_eq!(case.bus_count(), 24);
        assert_eq!(case.line_count(), 38);
        assert_eq!(case.generator_count(), 32);
        assert!((case.total_peak_load() - 2850.0).abs() < 1e-9);
        assert!((case.total_capacity() - 3405.0).abs() < 1e-9);
    }

    #[test]
    fn profile_peaks_at_one() {
        let p = hourly_profile();
        assert_eq!(p.len(), 8760);
        let max = p.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|f| *f > 0.0));
    }

    #[test]
    fn shipped_files_match_builtin() {
        let regenerate = std::env::var_os("R3GRID_REGENERATE_DATA").is_some();
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
        for (name, shipped, with_profile) in [
            ("rts24.json", RTS24_JSON, false),
            ("rts24_hourly.json", RTS24_HOURLY_JSON, true),
        ] {
            let built = to_json(&base_case(with_profile));
            if regenerate {
                std::fs::write(format!("{dir}/{name}"), &built).unwrap();
            } else {
                assert_eq!(shipped, built, "{name} is stale; rerun with R3GRID_REGENERATE_DATA=1");
                assert_eq!(load_case(shipped).unwrap(), base_case(with_profile));
            }
        }
    }

    #[test]
    fn bus_7_has_a_single_line() {
        let case = base_case(false);
        assert_eq!(incident_lines(&case, BusId(7)).unwrap(), vec![LineId(11)]);
    }

    #[test]
    fn variant_line_counts() {
        let base = base_case(false);
        let counts: Vec<usize> = (1..=8)
            .map(|v| build_variant(&base, v).unwrap().line_count())
            .collect();
        assert_eq!(counts, vec![38, 39, 39, 39, 40, 40, 40, 41]);
        let v2 = build_variant(&base, 2).unwrap();
        let added = &v2.lines()[38];
        assert_eq!((added.from_bus, added.to_bus), (BusId(14), BusId(15)));
        assert_eq!(v2.variant_label(), Some("Case 2"));
    }

    #[test]
    fn variant_one_is_byte_identical() {
        let base = base_case(false);
        assert_eq!(to_json(&build_variant(&base, 1).unwrap()), to_json(&base));
    }

    #[test]
    fn variant_out_of_range() {
        let base = base_case(false);
        assert!(matches!(build_variant(&base, 0), Err(Error::Domain(_))));
        assert!(matches!(build_variant(&base, 9), Err(Error::Domain(_))));
    }

    #[test]
    fn variant_eight_adds_all_three() {
        let v8 = build_variant(&base_case(false), 8).unwrap();
        let ends: Vec<(u32, u32)> = v8.lines()[38..]
            .iter()
            .map(|l| (l.from_bus.0, l.to_bus.0))
            .collect();
        assert_eq!(ends, vec![(14, 15), (14, 24), (6, 9)]);
    }
}
